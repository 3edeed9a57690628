//! Domain types for a refurbishable corridor and the combinatorial rules
//! that turn an original conductor count into operating configurations.
//!
//! Units follow the usual distribution-planning convention: kV, MVA, km,
//! Ω/km, A and °C. Losses elsewhere in the crate are in W.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Slack used when comparing a DC share against its feasible interval.
pub const Y_TOLERANCE: f64 = 1e-12;

/// Corridor-wide givens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    /// Line-to-line RMS voltage at the sending-end substation, kV.
    pub v_ll_rms: f64,
    /// Apparent power demand at the receiving-end substation, MVA.
    pub s_actual: f64,
    /// Receiving-end power factor, cos θ.
    pub pf: f64,
    /// Link length, km.
    pub link_length: f64,
    /// Average efficiency of one converter station.
    pub eta: f64,
    /// Ambient temperature, °C.
    pub t_amb: f64,
    /// Number of conductors in the original all-AC corridor.
    pub n_ori: u32,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_ll_rms > 0.0 && self.v_ll_rms.is_finite()) {
            return Err(Error::validation("v_ll_rms", "must be > 0"));
        }
        if !(self.s_actual >= 0.0 && self.s_actual.is_finite()) {
            return Err(Error::validation("s_actual", "must be >= 0"));
        }
        if !(self.pf > 0.0 && self.pf <= 1.0) {
            return Err(Error::validation("pf", "pf out of (0,1]"));
        }
        if !(self.link_length >= 0.0 && self.link_length.is_finite()) {
            return Err(Error::validation("link_length", "must be >= 0"));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::validation("eta", "eta out of (0,1)"));
        }
        if !self.t_amb.is_finite() || self.t_amb >= 90.0 {
            return Err(Error::validation("t_amb", "must be below 90 °C"));
        }
        if self.n_ori == 0 || self.n_ori % 3 != 0 {
            return Err(Error::validation(
                "n_ori",
                "must be a positive multiple of 3",
            ));
        }
        Ok(())
    }

    pub fn with_length(self, link_length: f64) -> Self {
        Self {
            link_length,
            ..self
        }
    }

    pub fn with_demand(self, s_actual: f64) -> Self {
        Self { s_actual, ..self }
    }

    pub fn with_pf(self, pf: f64) -> Self {
        Self { pf, ..self }
    }

    /// Sets the demand as a multiple of the single-link capacity of `cable`.
    pub fn with_demand_pu(self, demand_pu: f64, cable: &CableSpec) -> Self {
        self.with_demand(demand_pu * single_link_mva(cable.i_rated, self.v_ll_rms))
    }
}

/// Datasheet values for one conductor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CableSpec {
    /// Cross-section, mm².
    pub area: f64,
    /// Resistance at 90 °C, Ω/km.
    pub r_90: f64,
    /// Temperature coefficient of resistance, 1/K.
    pub alpha: f64,
    /// Rated current, A.
    pub i_rated: f64,
    /// AC/DC resistance ratio (skin and proximity allowance).
    pub ac_dc_resistance_ratio: f64,
}

impl CableSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("area", self.area),
            ("r_90", self.r_90),
            ("alpha", self.alpha),
            ("i_rated", self.i_rated),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::validation(field, "must be > 0"));
            }
        }
        if !(self.ac_dc_resistance_ratio >= 1.0 && self.ac_dc_resistance_ratio.is_finite()) {
            return Err(Error::validation("ac_dc_resistance_ratio", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigKind {
    /// Conventional expansion, every conductor in AC service.
    AllAc,
    /// Full DC refurbishment.
    AllDc,
    /// Parallel AC and DC links.
    Hybrid,
}

/// One operating strategy Cn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Configuration {
    pub index: u32,
    pub n_ac: u32,
    pub n_dc: u32,
    pub n_red: u32,
}

impl Configuration {
    pub fn kind(&self) -> ConfigKind {
        match self.index {
            0 => ConfigKind::AllAc,
            1 => ConfigKind::AllDc,
            _ => ConfigKind::Hybrid,
        }
    }

    pub fn is_hybrid(&self) -> bool {
        self.kind() == ConfigKind::Hybrid
    }

    /// Full-load DC share: the fraction of combined capacity sitting in DC links.
    pub fn preset_y(&self) -> Option<f64> {
        if !self.is_hybrid() {
            return None;
        }
        let (ac, dc) = capacity_limits(self, 1.0);
        Some(dc / (ac + dc))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.index)
    }
}

/// Demand and DC share at which a configuration is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub s_actual: f64,
    pub pf: f64,
    pub y: f64,
}

fn check_n_ori(n_ori: u32) -> Result<()> {
    if n_ori < 3 || n_ori % 3 != 0 {
        return Err(Error::validation(
            "n_ori",
            format!("{n_ori} is not a positive multiple of 3"),
        ));
    }
    Ok(())
}

/// All configurations for a corridor of `n_ori` conductors: C0 followed by
/// C1..C(n_ori/3).
pub fn enumerate_configurations(n_ori: u32) -> Result<Vec<Configuration>> {
    check_n_ori(n_ori)?;
    let groups = n_ori / 3;
    let mut configs = Vec::with_capacity(groups as usize + 1);
    for n in 1..=groups {
        // One more three-phase circuit per step.
        let n_ac = 3 * (n - 1);
        let rest = n_ori - n_ac;
        let n_dc = if rest % 2 == 0 { rest } else { rest - 1 };
        configs.push(Configuration {
            index: n,
            n_ac,
            n_dc,
            n_red: n_ori - n_ac - n_dc,
        });
    }

    // C0 carries 1.5x the conductor count of full DC operation, in whole
    // three-phase circuits.
    let n_dc_c1 = configs[0].n_dc;
    let needed = (3 * n_dc_c1).div_ceil(2);
    let n_ac_c0 = needed.div_ceil(3) * 3;
    configs.insert(
        0,
        Configuration {
            index: 0,
            n_ac: n_ac_c0,
            n_dc: 0,
            n_red: 0,
        },
    );
    Ok(configs)
}

/// Configuration `index` of the `n_ori` family.
pub fn configuration(n_ori: u32, index: u32) -> Result<Configuration> {
    enumerate_configurations(n_ori)?
        .into_iter()
        .find(|c| c.index == index)
        .ok_or_else(|| {
            Error::validation("config", format!("C{index} does not exist for n_ori = {n_ori}"))
        })
}

/// Maximum AC and DC transfer capacities, in the units of `s_link`.
pub fn capacity_limits(config: &Configuration, s_link: f64) -> (f64, f64) {
    (
        f64::from(config.n_ac) / 3.0 * s_link,
        f64::from(config.n_dc) / 2.0 * s_link,
    )
}

/// Capacity of one three-phase AC link (and, by assumption, of one
/// two-conductor DC link), MVA.
pub fn link_capacity(cable: &CableSpec, v_ll_rms: f64) -> Result<f64> {
    if !(cable.i_rated > 0.0) {
        return Err(Error::validation("i_rated", "must be > 0"));
    }
    if !(v_ll_rms > 0.0) {
        return Err(Error::validation("v_ll_rms", "must be > 0"));
    }
    Ok(single_link_mva(cable.i_rated, v_ll_rms))
}

fn single_link_mva(i_rated: f64, v_ll_rms: f64) -> f64 {
    3f64.sqrt() * v_ll_rms * i_rated / 1e3
}

/// Feasible interval of the DC share, evaluated at unity power factor.
pub fn y_limits(s_actual: f64, s_max_ac: f64, s_max_dc: f64) -> Result<(f64, f64)> {
    if !(s_actual > 0.0) {
        return Err(Error::validation("s_actual", "must be > 0 for DC share limits"));
    }
    let y_min = if s_actual <= s_max_ac {
        0.0
    } else {
        (s_actual - s_max_ac) / s_actual
    };
    let y_max = if s_actual <= s_max_dc {
        1.0
    } else {
        s_max_dc / s_actual
    };
    if y_min > y_max + Y_TOLERANCE {
        return Err(Error::Infeasible(format!(
            "demand {s_actual} exceeds combined capacity {}",
            s_max_ac + s_max_dc
        )));
    }
    Ok((y_min, y_max.max(y_min)))
}

pub fn is_feasible(config: &Configuration, s_actual: f64, s_link: f64) -> bool {
    let (ac, dc) = capacity_limits(config, s_link);
    s_actual <= ac + dc
}
