//! Loss models and efficiency boundaries for medium-voltage corridors whose
//! AC conductors can be refurbished for DC service, either fully or as
//! parallel AC-DC links.
//!
//! The crate answers one question: for a given demand, power factor and link
//! length, which conductor configuration delivers the power with the lowest
//! total loss? It provides
//!
//! * configuration enumeration and capacity limits ([`model`]),
//! * the conductor temperature/resistance fixed point ([`thermal`]),
//! * conduction and converter losses per configuration ([`losses`]),
//! * crossover lengths, optimal DC share, boundary maps and sensitivity
//!   sweeps ([`boundaries`]),
//! * the scenario-driven `gridlink` command line front end ([`cli`]).

pub mod boundaries;
pub mod cli;
pub mod error;
pub mod losses;
pub mod model;
pub mod search;
pub mod thermal;

pub use boundaries::{
    boundary_map, crossover_a, crossover_b, crossover_c, crossover_extrema, optimal_y,
    select_configuration, sensitivity_sweep, BoundaryMap, CrossoverSet, Selection, SweepAxis,
    SweepResult,
};
pub use error::{Error, ErrorCategory, Result};
pub use losses::{loss_breakdown, loss_c0, loss_c1, loss_cn, LossBreakdown};
pub use model::{
    capacity_limits, enumerate_configurations, is_feasible, link_capacity, y_limits, CableSpec,
    Configuration, SystemParams,
};
pub use thermal::{solve_thermal, ConductorMode, ThermalState};
