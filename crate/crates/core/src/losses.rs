//! System losses for the three configuration families: all-AC (C0),
//! all-DC (C1) and parallel AC-DC hybrids (C2 and up).
//!
//! Inputs are in kV, MVA and km; currents come out in A and losses in W.
//! Converter losses count both the sending and receiving station.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    capacity_limits, link_capacity, y_limits, CableSpec, ConfigKind, Configuration, SystemParams,
    Y_TOLERANCE,
};
use crate::thermal::{solve_thermal, ConductorMode, ThermalState};

const CAPACITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossBreakdown {
    /// Ohmic loss in all energised conductors, W.
    pub conductor_loss: f64,
    /// Loss of both converter stations, W.
    pub converter_loss: f64,
    pub total_loss: f64,
    pub ac_state: Option<ThermalState>,
    pub dc_state: Option<ThermalState>,
    /// Total loss as a fraction of the apparent demand.
    pub normalized_loss: f64,
    /// DC share the breakdown was evaluated at, hybrids only.
    pub dc_share: Option<f64>,
}

impl LossBreakdown {
    fn new(
        params: &SystemParams,
        conductor_loss: f64,
        converter_loss: f64,
        ac_state: Option<ThermalState>,
        dc_state: Option<ThermalState>,
        dc_share: Option<f64>,
    ) -> Self {
        let total_loss = conductor_loss + converter_loss;
        let normalized_loss = if params.s_actual > 0.0 {
            total_loss / (params.s_actual * 1e6)
        } else {
            0.0
        };
        Self {
            conductor_loss,
            converter_loss,
            total_loss,
            ac_state,
            dc_state,
            normalized_loss,
            dc_share,
        }
    }
}

/// Pole-to-pole voltage of a refurbished DC link, chosen at the peak of the
/// AC phase voltage on each pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DcLinkVoltage {
    /// kV.
    pub v_dc: f64,
}

impl DcLinkVoltage {
    pub fn from_ac(v_ll_rms: f64) -> Self {
        Self {
            v_dc: 2.0 * 2f64.sqrt() / 3f64.sqrt() * v_ll_rms,
        }
    }
}

fn expect_kind(config: &Configuration, kind: ConfigKind, what: &str) -> Result<()> {
    if config.kind() != kind {
        return Err(Error::validation("config", format!("{config} is not {what}")));
    }
    Ok(())
}

fn check_capacity(demand: f64, capacity: f64, what: &str) -> Result<()> {
    if demand > capacity * (1.0 + CAPACITY_SLACK) {
        return Err(Error::Infeasible(format!(
            "{what} demand {demand:.6} MVA exceeds capacity {capacity:.6} MVA"
        )));
    }
    Ok(())
}

/// Per-conductor current of the all-AC configuration, A.
pub fn c0_current(params: &SystemParams, config: &Configuration) -> f64 {
    let circuits = f64::from(config.n_ac) / 3.0;
    params.s_actual * 1e3 / (circuits * 3f64.sqrt() * params.v_ll_rms)
}

/// Per-conductor current of the all-DC configuration, A.
pub fn c1_current(params: &SystemParams, config: &Configuration) -> f64 {
    let links = f64::from(config.n_dc) / 2.0;
    let v_dc = DcLinkVoltage::from_ac(params.v_ll_rms).v_dc;
    params.s_actual * params.pf * 1e3 / (links * v_dc)
}

/// AC and DC conductor currents of a hybrid at DC share `y`, A.
///
/// The AC current carries the cos θ factor, i.e. both classes are sized on
/// active power.
pub fn hybrid_currents(params: &SystemParams, config: &Configuration, y: f64) -> (f64, f64) {
    let active_kw = params.s_actual * params.pf * 1e3;
    let v_dc = DcLinkVoltage::from_ac(params.v_ll_rms).v_dc;
    let i_dc = if config.n_dc > 0 {
        y * active_kw / (f64::from(config.n_dc) / 2.0 * v_dc)
    } else {
        0.0
    };
    let i_ac = if config.n_ac > 0 {
        (1.0 - y) * active_kw / (3f64.sqrt() * f64::from(config.n_ac) / 3.0 * params.v_ll_rms)
    } else {
        0.0
    };
    (i_ac, i_dc)
}

/// Loss of both converter stations when `share` of the active power is
/// routed through DC, W.
pub fn converter_loss(params: &SystemParams, share: f64) -> f64 {
    2.0 * (1.0 - params.eta) * share * params.s_actual * params.pf * 1e6
}

pub fn loss_c0(
    params: &SystemParams,
    cable: &CableSpec,
    config: &Configuration,
) -> Result<LossBreakdown> {
    params.validate()?;
    cable.validate()?;
    expect_kind(config, ConfigKind::AllAc, "the all-AC configuration")?;
    let s_link = link_capacity(cable, params.v_ll_rms)?;
    let (s_max_ac, _) = capacity_limits(config, s_link);
    check_capacity(params.s_actual, s_max_ac, "apparent")?;

    let current = c0_current(params, config);
    let state = solve_thermal(current, cable, params.t_amb, ConductorMode::Ac)?;
    let conductor =
        f64::from(config.n_ac) * current * current * state.resistance_per_km * params.link_length;
    Ok(LossBreakdown::new(
        params,
        conductor,
        0.0,
        Some(state),
        None,
        None,
    ))
}

pub fn loss_c1(
    params: &SystemParams,
    cable: &CableSpec,
    config: &Configuration,
) -> Result<LossBreakdown> {
    params.validate()?;
    cable.validate()?;
    expect_kind(config, ConfigKind::AllDc, "the all-DC configuration")?;
    let s_link = link_capacity(cable, params.v_ll_rms)?;
    let (_, s_max_dc) = capacity_limits(config, s_link);
    check_capacity(params.s_actual * params.pf, s_max_dc, "active")?;

    let current = c1_current(params, config);
    let state = solve_thermal(current, cable, params.t_amb, ConductorMode::Dc)?;
    let conductor =
        f64::from(config.n_dc) * current * current * state.resistance_per_km * params.link_length;
    Ok(LossBreakdown::new(
        params,
        conductor,
        converter_loss(params, 1.0),
        None,
        Some(state),
        None,
    ))
}

pub fn loss_cn(
    params: &SystemParams,
    cable: &CableSpec,
    config: &Configuration,
    y: f64,
) -> Result<LossBreakdown> {
    params.validate()?;
    cable.validate()?;
    expect_kind(config, ConfigKind::Hybrid, "a hybrid configuration")?;
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::validation("y", format!("{y} outside [0, 1]")));
    }
    if params.s_actual > 0.0 {
        let s_link = link_capacity(cable, params.v_ll_rms)?;
        let (s_max_ac, s_max_dc) = capacity_limits(config, s_link);
        let (y_min, y_max) = y_limits(params.s_actual, s_max_ac, s_max_dc)?;
        if y < y_min - Y_TOLERANCE || y > y_max + Y_TOLERANCE {
            return Err(Error::validation(
                "y",
                format!("{y} outside feasible interval [{y_min}, {y_max}] for {config}"),
            ));
        }
    }
    hybrid_loss_unchecked(params, cable, config, y)
}

/// Hybrid loss without the share-limit check; the caller guarantees `y` is
/// admissible.
pub(crate) fn hybrid_loss_unchecked(
    params: &SystemParams,
    cable: &CableSpec,
    config: &Configuration,
    y: f64,
) -> Result<LossBreakdown> {
    let (i_ac, i_dc) = hybrid_currents(params, config, y);
    let ac = solve_thermal(i_ac, cable, params.t_amb, ConductorMode::Ac)?;
    let dc = solve_thermal(i_dc, cable, params.t_amb, ConductorMode::Dc)?;
    let conductor = (f64::from(config.n_ac) * i_ac * i_ac * ac.resistance_per_km
        + f64::from(config.n_dc) * i_dc * i_dc * dc.resistance_per_km)
        * params.link_length;
    Ok(LossBreakdown::new(
        params,
        conductor,
        converter_loss(params, y),
        Some(ac),
        Some(dc),
        Some(y),
    ))
}

/// Loss of any configuration. Hybrids without an explicit share run at their
/// full-load distribution factor.
pub fn loss_breakdown(
    params: &SystemParams,
    cable: &CableSpec,
    config: &Configuration,
    y: Option<f64>,
) -> Result<LossBreakdown> {
    match config.kind() {
        ConfigKind::AllAc | ConfigKind::AllDc => {
            if let Some(y) = y {
                warn!("DC share {y} ignored for {config}");
            }
            if config.kind() == ConfigKind::AllAc {
                loss_c0(params, cable, config)
            } else {
                loss_c1(params, cable, config)
            }
        }
        ConfigKind::Hybrid => {
            let y = match y {
                Some(y) => y,
                None => config.preset_y().expect("hybrid has a preset"),
            };
            loss_cn(params, cable, config, y)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::enumerate_configurations;

    fn cable() -> CableSpec {
        CableSpec {
            area: 400.0,
            r_90: 0.0998,
            alpha: 0.00403,
            i_rated: 460.0,
            ac_dc_resistance_ratio: 1.02,
        }
    }

    fn params(demand_pu: f64, length: f64) -> SystemParams {
        SystemParams {
            v_ll_rms: 10.0,
            s_actual: 0.0,
            pf: 0.9,
            link_length: length,
            eta: 0.9934,
            t_amb: 20.0,
            n_ori: 9,
        }
        .with_demand_pu(demand_pu, &cable())
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn dc_voltage() {
        let v = DcLinkVoltage::from_ac(10.0).v_dc;
        assert!((v - 16.329_931_618_554_52).abs() < 1e-12);
    }

    #[test]
    fn zero_demand_is_lossless() {
        let c = enumerate_configurations(9).unwrap();
        let p = params(0.0, 10.0);
        for cfg in &c {
            let b = loss_breakdown(&p, &cable(), cfg, None).unwrap();
            assert_eq!(b.total_loss, 0.0, "{cfg}");
            assert_eq!(b.normalized_loss, 0.0);
        }
    }

    #[test]
    fn c0_general_form_matches_table_one_closed_form() {
        let c = enumerate_configurations(9).unwrap();
        let p = params(3.0, 10.0);
        let b = loss_c0(&p, &cable(), &c[0]).unwrap();
        let k = p.s_actual * 1e3 / p.v_ll_rms;
        let r = b.ac_state.unwrap().resistance_per_km;
        let closed = 3.0 * k * k * p.link_length * r / f64::from(p.n_ori + 3);
        assert!(rel(b.conductor_loss, closed) < 1e-12);
        assert_eq!(b.converter_loss, 0.0);
    }

    #[test]
    fn c0_reference_value() {
        // 12 conductors at 345 A, thermal fixed point at 55.05 °C, 30-digit evaluation.
        const EXPECTED_W: f64 = 1_294_221.115_679_260;
        let c = enumerate_configurations(9).unwrap();
        let b = loss_c0(&params(3.0, 10.0), &cable(), &c[0]).unwrap();
        assert!((b.ac_state.unwrap().current - 345.0).abs() < 1e-9);
        assert!(rel(b.total_loss, EXPECTED_W) < 1e-5);
    }

    #[test]
    fn c1_intercept() {
        let c = enumerate_configurations(9).unwrap();
        let b = loss_c1(&params(3.0, 0.0), &cable(), &c[1]).unwrap();
        assert!(rel(b.normalized_loss, 2.0 * (1.0 - 0.9934) * 0.9) < 1e-12);
        assert!((b.normalized_loss - 0.01188).abs() < 1e-12);
    }

    #[test]
    fn c1_to_c0_current_ratio_at_unity_pf() {
        // I_C1 / I_C0 = sqrt(3/2) k / n_dc  /  (sqrt(3) k / n_ac) = n_ac / (sqrt(2) n_dc)
        let c = enumerate_configurations(9).unwrap();
        let p = params(2.0, 1.0).with_pf(1.0);
        let ratio = c1_current(&p, &c[1]) / c0_current(&p, &c[0]);
        assert!(rel(ratio, 12.0 / (2f64.sqrt() * 8.0)) < 1e-12);
    }

    #[test]
    fn hybrid_at_full_share_matches_c1() {
        // A hybrid with C1's DC conductor count degenerates to C1 at y = 1.
        let c = enumerate_configurations(9).unwrap();
        let p = params(2.0, 12.0);
        let c1 = loss_c1(&p, &cable(), &c[1]).unwrap();
        let pseudo = Configuration {
            index: 2,
            n_ac: 3,
            n_dc: c[1].n_dc,
            n_red: 0,
        };
        let hy = hybrid_loss_unchecked(&p, &cable(), &pseudo, 1.0).unwrap();
        assert!(rel(hy.total_loss, c1.total_loss) < 1e-12);
        assert!(rel(hy.converter_loss, c1.converter_loss) < 1e-12);
    }

    #[test]
    fn hybrid_at_zero_share_is_pure_ac() {
        let c = enumerate_configurations(9).unwrap();
        let p = params(0.8, 5.0);
        let b = loss_cn(&p, &cable(), &c[2], 0.0).unwrap();
        assert_eq!(b.converter_loss, 0.0);
        assert_eq!(b.dc_state.unwrap().current, 0.0);
        assert!(b.conductor_loss > 0.0);
    }

    #[test]
    fn hybrid_rejects_share_outside_limits() {
        let c = enumerate_configurations(9).unwrap();
        let p = params(3.0, 5.0);
        assert!(loss_cn(&p, &cable(), &c[2], 0.5).is_err());
        assert!(loss_cn(&p, &cable(), &c[2], 0.7).is_ok());
    }

    #[test]
    fn capacity_is_enforced() {
        let c = enumerate_configurations(9).unwrap();
        let p = params(4.2, 5.0);
        assert!(matches!(loss_c0(&p, &cable(), &c[0]), Err(Error::Infeasible(_))));
        // C1 is screened on active power: 4.2 * 0.9 < 4.
        assert!(loss_c1(&p, &cable(), &c[1]).is_ok());
        assert!(loss_c1(&p.with_pf(1.0), &cable(), &c[1]).is_err());
    }

    #[test]
    fn wrong_family_is_rejected() {
        let c = enumerate_configurations(9).unwrap();
        let p = params(1.0, 1.0);
        assert!(loss_c0(&p, &cable(), &c[1]).is_err());
        assert!(loss_c1(&p, &cable(), &c[2]).is_err());
        assert!(loss_cn(&p, &cable(), &c[0], 0.5).is_err());
    }

    #[test]
    fn presets_are_applied() {
        let c = enumerate_configurations(9).unwrap();
        let p = params(2.0, 10.0);
        let c2 = loss_breakdown(&p, &cable(), &c[2], None).unwrap();
        assert_eq!(c2.dc_share, Some(0.75));
        let c3 = loss_breakdown(&p, &cable(), &c[3], None).unwrap();
        assert!((c3.dc_share.unwrap() - 0.33).abs() < 0.005);
        let c0 = loss_breakdown(&p, &cable(), &c[0], Some(0.4)).unwrap();
        assert_eq!(c0.dc_share, None);
        assert_eq!(c0.total_loss, loss_c0(&p, &cable(), &c[0]).unwrap().total_loss);
    }

    #[test]
    fn c2_beats_both_inside_its_band() {
        let c = enumerate_configurations(9).unwrap();
        let p = params(3.0, 10.0);
        let c0 = loss_c0(&p, &cable(), &c[0]).unwrap().total_loss;
        let c1 = loss_c1(&p, &cable(), &c[1]).unwrap().total_loss;
        let c2 = loss_cn(&p, &cable(), &c[2], 0.75).unwrap().total_loss;
        // 10 km lies past the C0/C1 crossover and inside the C2 band.
        assert!(c1 < c0);
        assert!(c2 < c1);
    }
}
