//! Conductor temperature and resistance as a coupled fixed point.
//!
//! Joule heating is scaled against the rated operating point (rated current
//! at 90 °C), and resistance follows a linear temperature law referenced to
//! the ambient temperature:
//!
//! ```text
//! T_k = T_amb + (I² R_{k-1}) / (I_rated² R_90) · (90 − T_amb)
//! R_k = R_90 · (1 + α (T_k − T_amb)) / (1 + α (90 − T_amb))
//! ```
//!
//! starting from `R_0 = R_90`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::CableSpec;

/// Conductor temperature at rated current, °C.
pub const RATED_TEMPERATURE: f64 = 90.0;
/// Stop once successive resistances differ by less than this, Ω/km.
pub const RESISTANCE_TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConductorMode {
    Ac,
    Dc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalState {
    /// Conductor current, A.
    pub current: f64,
    /// Operating temperature, °C.
    pub temperature: f64,
    /// Operating resistance, Ω/km. Includes the AC/DC ratio in AC mode.
    pub resistance_per_km: f64,
    pub iterations: usize,
    /// Set when the converged temperature exceeds the 90 °C rating.
    pub overloaded: bool,
}

pub fn solve_thermal(
    current: f64,
    cable: &CableSpec,
    t_amb: f64,
    mode: ConductorMode,
) -> Result<ThermalState> {
    if !(current >= 0.0 && current.is_finite()) {
        return Err(Error::validation("current", "must be >= 0"));
    }
    if !(t_amb < RATED_TEMPERATURE) {
        return Err(Error::validation("t_amb", "must be below 90 °C"));
    }

    let rise_rated = RATED_TEMPERATURE - t_amb;
    let loading = (current / cable.i_rated).powi(2);
    let denominator = 1.0 + cable.alpha * rise_rated;

    let mut resistance = cable.r_90;
    for k in 1..=MAX_ITERATIONS {
        let temperature = t_amb + loading * (resistance / cable.r_90) * rise_rated;
        let next = cable.r_90 * (1.0 + cable.alpha * (temperature - t_amb)) / denominator;
        if !next.is_finite() {
            break;
        }
        let step = (next - resistance).abs();
        resistance = next;
        if step < RESISTANCE_TOLERANCE {
            let resistance_per_km = match mode {
                ConductorMode::Ac => resistance * cable.ac_dc_resistance_ratio,
                ConductorMode::Dc => resistance,
            };
            return Ok(ThermalState {
                current,
                temperature,
                resistance_per_km,
                iterations: k,
                overloaded: temperature > RATED_TEMPERATURE,
            });
        }
    }
    Err(Error::Divergence {
        iterations: MAX_ITERATIONS,
        current,
    })
}
