//! Efficiency boundaries between configurations.
//!
//! Every configuration's total loss is affine in link length: conduction
//! grows linearly with L while converter loss does not depend on it, and the
//! conductor currents (hence temperatures and resistances) are independent
//! of L. Two configurations therefore cross at most once, at
//!
//! ```text
//! L = Δ(converter loss) / Δ(conduction loss per km)
//! ```
//!
//! which is what the closed forms below evaluate. With `k = S·10³/V` the
//! conduction loss per km of each family is
//!
//! ```text
//! all-AC   3k² r₀ / n_ac
//! all-DC   3k² cos²θ r₁ / (2 n_dc)
//! hybrid   3k² cos²θ ((1−y)² r_ac / n_ac + y² r_dc / (2 n_dc))
//! ```
//!
//! A crossover that does not exist (the second configuration never
//! overtakes the first) is reported as [`Error::NoCrossover`] and stored as
//! an absent value, never as a sentinel length.

use log::debug;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::losses::{
    c0_current, c1_current, hybrid_currents, hybrid_loss_unchecked, loss_c0, loss_c1,
    LossBreakdown,
};
use crate::model::{
    capacity_limits, enumerate_configurations, is_feasible, link_capacity, y_limits, CableSpec,
    ConfigKind, Configuration, SystemParams, Y_TOLERANCE,
};
use crate::search::{golden_section, scan_then_golden};
use crate::thermal::{solve_thermal, ConductorMode};

/// Bracket width at which DC-share searches stop.
pub const Y_SEARCH_TOLERANCE: f64 = 1e-4;
/// Uniform samples taken before refining a crossover extremum.
const EXTREMUM_SCAN_SAMPLES: usize = 64;
/// Relative loss gap below which the region rule may disagree with argmin.
pub const RULE_GAP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossoverSet {
    /// DC share used for `l_cr_a` and `l_cr_c`.
    pub y: f64,
    /// C0 / C2 crossover at `y`, km.
    pub l_cr_a: Option<f64>,
    /// C0 / C1 crossover, km.
    pub l_cr_b: Option<f64>,
    /// C1 / C2 crossover at `y`, km.
    pub l_cr_c: Option<f64>,
    /// Smallest C0 / C2 crossover over the feasible shares, km.
    pub l_cr_a_min: Option<f64>,
    pub y_at_a_min: Option<f64>,
    /// Largest C1 / C2 crossover over the feasible shares, km.
    pub l_cr_c_max: Option<f64>,
    pub y_at_c_max: Option<f64>,
}

impl CrossoverSet {
    /// Configuration picked by the crossover-region rule at `length`, or
    /// `None` where the rule leaves a gap. Absent crossovers count as
    /// infinitely far away.
    pub fn region_rule(&self, length: f64) -> Option<u32> {
        let a_min = self.l_cr_a_min.unwrap_or(f64::INFINITY);
        let b = self.l_cr_b.unwrap_or(f64::INFINITY);
        let c_max = self.l_cr_c_max.unwrap_or(f64::INFINITY);
        if length < a_min && length < b {
            Some(0)
        } else if length >= b && length >= c_max {
            Some(1)
        } else if length >= a_min && length < c_max {
            Some(2)
        } else {
            None
        }
    }
}

/// Most efficient configuration at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Selection {
    pub config: Configuration,
    /// Optimal DC share, hybrids only.
    pub y_opt: Option<f64>,
    pub breakdown: LossBreakdown,
    pub runner_up: Option<Configuration>,
    /// Relative loss excess of the runner-up over the winner.
    pub runner_up_gap: Option<f64>,
    /// Choice of the crossover-region rule over C0, C1 and C2.
    pub rule_choice: Option<u32>,
}

impl Selection {
    pub fn rule_agrees(&self) -> bool {
        self.rule_choice == Some(self.config.index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleDisagreement {
    pub demand_pu: f64,
    pub length_km: f64,
    pub argmin: u32,
    pub rule: Option<u32>,
    pub runner_up_gap: Option<f64>,
}

/// Most efficient configuration over a (demand, length) grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryMap {
    /// Demand as a multiple of the single-link capacity.
    pub demand_axis: Vec<f64>,
    /// km.
    pub length_axis: Vec<f64>,
    /// `winner[i][j]` for demand `i` and length `j`; `None` marks cells with
    /// no feasible configuration.
    pub winner: Vec<Vec<Option<u32>>>,
    pub pf: f64,
    pub disagreements: Vec<RuleDisagreement>,
}

impl BoundaryMap {
    /// First and last length of the C2 run in row `i`, if any.
    pub fn c2_band(&self, row: usize) -> Option<(f64, f64)> {
        let cells = &self.winner[row];
        let first = cells.iter().position(|w| *w == Some(2))?;
        let last = cells.iter().rposition(|w| *w == Some(2))?;
        Some((self.length_axis[first], self.length_axis[last]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepAxisKind {
    Voltage,
    Area,
    Eta,
}

impl SweepAxisKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxisKind::Voltage => "voltage",
            SweepAxisKind::Area => "area",
            SweepAxisKind::Eta => "eta",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    /// Line-to-line voltages, kV.
    Voltage(Vec<f64>),
    /// One cable per conductor area, resolved from a cable library.
    Area(Vec<CableSpec>),
    /// Converter station efficiencies.
    Eta(Vec<f64>),
}

impl SweepAxis {
    pub fn kind(&self) -> SweepAxisKind {
        match self {
            SweepAxis::Voltage(_) => SweepAxisKind::Voltage,
            SweepAxis::Area(_) => SweepAxisKind::Area,
            SweepAxis::Eta(_) => SweepAxisKind::Eta,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            SweepAxis::Voltage(v) | SweepAxis::Eta(v) => v.clone(),
            SweepAxis::Area(cables) => cables.iter().map(|c| c.area).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis_name: SweepAxisKind,
    pub axis_values: Vec<f64>,
    /// Shortest length at which C2 beats C0, km.
    pub l_c2_min: Vec<Option<f64>>,
    /// Longest length at which C2 beats C1, km.
    pub l_c2_max: Vec<Option<f64>>,
}

fn family(params: &SystemParams) -> Result<Vec<Configuration>> {
    params.validate()?;
    enumerate_configurations(params.n_ori)
}

fn c2_of(configs: &[Configuration]) -> Result<Configuration> {
    configs
        .iter()
        .copied()
        .find(|c| c.index == 2)
        .ok_or_else(|| Error::validation("n_ori", "needs at least 6 conductors for a hybrid"))
}

fn require_demand(params: &SystemParams) -> Result<()> {
    if params.s_actual > 0.0 {
        Ok(())
    } else {
        Err(Error::validation("s_actual", "crossovers need a positive demand"))
    }
}

fn share_interval(
    params: &SystemParams,
    cable: &CableSpec,
    config: &Configuration,
) -> Result<(f64, f64)> {
    let s_link = link_capacity(cable, params.v_ll_rms)?;
    let (ac, dc) = capacity_limits(config, s_link);
    y_limits(params.s_actual, ac, dc)
}

fn check_share(params: &SystemParams, cable: &CableSpec, hybrid: &Configuration, y: f64) -> Result<()> {
    let (y_min, y_max) = share_interval(params, cable, hybrid)?;
    if y < y_min - Y_TOLERANCE || y > y_max + Y_TOLERANCE {
        return Err(Error::validation(
            "y",
            format!("{y} outside feasible interval [{y_min}, {y_max}] for {hybrid}"),
        ));
    }
    Ok(())
}

/// V²/S, Ω.
fn voltage_term(params: &SystemParams) -> f64 {
    params.v_ll_rms * params.v_ll_rms / params.s_actual
}

fn ac_resistance(params: &SystemParams, cable: &CableSpec, c0: &Configuration) -> Result<f64> {
    let state = solve_thermal(c0_current(params, c0), cable, params.t_amb, ConductorMode::Ac)?;
    Ok(state.resistance_per_km)
}

fn dc_resistance(params: &SystemParams, cable: &CableSpec, c1: &Configuration) -> Result<f64> {
    let state = solve_thermal(c1_current(params, c1), cable, params.t_amb, ConductorMode::Dc)?;
    Ok(state.resistance_per_km)
}

/// Hybrid conduction term `(1−y)² r_ac / n_ac + y² r_dc / (2 n_dc)`, Ω/km.
fn hybrid_term(
    params: &SystemParams,
    cable: &CableSpec,
    hybrid: &Configuration,
    y: f64,
) -> Result<f64> {
    let (i_ac, i_dc) = hybrid_currents(params, hybrid, y);
    let r_ac = solve_thermal(i_ac, cable, params.t_amb, ConductorMode::Ac)?.resistance_per_km;
    let r_dc = solve_thermal(i_dc, cable, params.t_amb, ConductorMode::Dc)?.resistance_per_km;
    let mut term = 0.0;
    if hybrid.n_ac > 0 {
        term += (1.0 - y).powi(2) * r_ac / f64::from(hybrid.n_ac);
    }
    if hybrid.n_dc > 0 {
        term += y * y * r_dc / (2.0 * f64::from(hybrid.n_dc));
    }
    Ok(term)
}

fn finite_crossover(numerator: f64, denominator: f64, what: &str) -> Result<f64> {
    if denominator > 0.0 {
        Ok(numerator / denominator)
    } else {
        Err(Error::NoCrossover(what.to_string()))
    }
}

/// C0 / C1 crossover length, km.
pub fn crossover_b(params: &SystemParams, cable: &CableSpec) -> Result<f64> {
    let configs = family(params)?;
    cable.validate()?;
    require_demand(params)?;
    let (c0, c1) = (configs[0], configs[1]);
    let r0 = ac_resistance(params, cable, &c0)?;
    let r1 = dc_resistance(params, cable, &c1)?;
    let pf = params.pf;
    let numerator = 2.0 * (1.0 - params.eta) * pf * voltage_term(params);
    let denominator =
        3.0 * (r0 / f64::from(c0.n_ac) - pf * pf * r1 / (2.0 * f64::from(c1.n_dc)));
    finite_crossover(numerator, denominator, "C1 never overtakes C0")
}

/// C0 / hybrid crossover length at DC share `y`, km.
pub fn crossover_a_with(
    params: &SystemParams,
    cable: &CableSpec,
    hybrid: &Configuration,
    y: f64,
) -> Result<f64> {
    let configs = family(params)?;
    cable.validate()?;
    require_demand(params)?;
    check_share(params, cable, hybrid, y)?;
    let c0 = configs[0];
    let r0 = ac_resistance(params, cable, &c0)?;
    let term = hybrid_term(params, cable, hybrid, y)?;
    let pf = params.pf;
    let numerator = 2.0 * (1.0 - params.eta) * y * pf * voltage_term(params);
    let denominator = 3.0 * (r0 / f64::from(c0.n_ac) - pf * pf * term);
    finite_crossover(numerator, denominator, "the hybrid never overtakes C0")
}

/// C1 / hybrid crossover length at DC share `y`, km.
pub fn crossover_c_with(
    params: &SystemParams,
    cable: &CableSpec,
    hybrid: &Configuration,
    y: f64,
) -> Result<f64> {
    let configs = family(params)?;
    cable.validate()?;
    require_demand(params)?;
    check_share(params, cable, hybrid, y)?;
    let c1 = configs[1];
    let r1 = dc_resistance(params, cable, &c1)?;
    let term = hybrid_term(params, cable, hybrid, y)?;
    let pf = params.pf;
    let numerator = 2.0 * (1.0 - params.eta) * (1.0 - y) * voltage_term(params);
    let denominator = 3.0 * pf * (term - r1 / (2.0 * f64::from(c1.n_dc)));
    finite_crossover(numerator, denominator, "C1 never overtakes the hybrid")
}

/// C0 / C2 crossover length at DC share `y`, km.
pub fn crossover_a(params: &SystemParams, cable: &CableSpec, y: f64) -> Result<f64> {
    let c2 = c2_of(&family(params)?)?;
    crossover_a_with(params, cable, &c2, y)
}

/// C1 / C2 crossover length at DC share `y`, km.
pub fn crossover_c(params: &SystemParams, cable: &CableSpec, y: f64) -> Result<f64> {
    let c2 = c2_of(&family(params)?)?;
    crossover_c_with(params, cable, &c2, y)
}

/// DC share minimising the hybrid's total loss at the configured length.
pub fn optimal_y(
    params: &SystemParams,
    cable: &CableSpec,
    config: &Configuration,
) -> Result<(f64, LossBreakdown)> {
    params.validate()?;
    cable.validate()?;
    if config.kind() != ConfigKind::Hybrid {
        return Err(Error::validation("config", format!("{config} is not a hybrid")));
    }
    require_demand(params)?;
    let (y_min, y_max) = share_interval(params, cable, config)?;

    let mut failure = None;
    let best = golden_section(
        |y| match hybrid_loss_unchecked(params, cable, config, y) {
            Ok(b) => b.total_loss,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        y_min,
        y_max,
        Y_SEARCH_TOLERANCE,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let breakdown = hybrid_loss_unchecked(params, cable, config, best.x)?;
    Ok((best.x, breakdown))
}

/// Minimises `f` over `[lo, hi]`; `Ok(None)` when the objective is infinite
/// everywhere.
fn extremum<F>(lo: f64, hi: f64, mut f: F) -> Result<Option<(f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut failure = None;
    let best = scan_then_golden(
        |y| match f(y) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        EXTREMUM_SCAN_SAMPLES,
        Y_SEARCH_TOLERANCE,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.value.is_finite().then_some((best.x, best.value)))
}

fn absent_if_no_crossover(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NoCrossover(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Crossovers for C2 at the preset share plus their extrema over the
/// feasible share interval.
pub fn crossover_extrema(params: &SystemParams, cable: &CableSpec) -> Result<CrossoverSet> {
    let configs = family(params)?;
    let c2 = c2_of(&configs)?;
    let y = c2.preset_y().expect("C2 is a hybrid");
    crossover_set_at(params, cable, y)
}

/// As [`crossover_extrema`] with `l_cr_a` and `l_cr_c` evaluated at `y`.
pub fn crossover_set_at(params: &SystemParams, cable: &CableSpec, y: f64) -> Result<CrossoverSet> {
    let configs = family(params)?;
    cable.validate()?;
    require_demand(params)?;
    let c2 = c2_of(&configs)?;
    let (y_min, y_max) = share_interval(params, cable, &c2)?;

    let l_cr_b = absent_if_no_crossover(crossover_b(params, cable))?;
    let l_cr_a = absent_if_no_crossover(crossover_a_with(params, cable, &c2, y))?;
    let l_cr_c = absent_if_no_crossover(crossover_c_with(params, cable, &c2, y))?;

    // Where C2 never overtakes C0 the crossover is at infinity.
    let a_min = extremum(y_min, y_max, |y| {
        Ok(absent_if_no_crossover(crossover_a_with(params, cable, &c2, y))?
            .unwrap_or(f64::INFINITY))
    })?;
    // Where C1 never overtakes C2 the crossover is at infinity too, so the
    // maximum is unbounded.
    let c_max = extremum(y_min, y_max, |y| {
        Ok(-absent_if_no_crossover(crossover_c_with(params, cable, &c2, y))?
            .unwrap_or(f64::INFINITY))
    })?;

    Ok(CrossoverSet {
        y,
        l_cr_a,
        l_cr_b,
        l_cr_c,
        l_cr_a_min: a_min.map(|(_, v)| v),
        y_at_a_min: a_min.map(|(y, _)| y),
        l_cr_c_max: c_max.map(|(_, v)| -v),
        y_at_c_max: c_max.map(|(y, _)| y),
    })
}

struct Candidate {
    config: Configuration,
    y_opt: Option<f64>,
    breakdown: LossBreakdown,
}

fn candidates(
    params: &SystemParams,
    cable: &CableSpec,
    configs: &[Configuration],
) -> Result<Vec<Candidate>> {
    let s_link = link_capacity(cable, params.v_ll_rms)?;
    let mut out = Vec::with_capacity(configs.len());
    for config in configs {
        if !is_feasible(config, params.s_actual, s_link) {
            continue;
        }
        let evaluated = match config.kind() {
            ConfigKind::AllAc => loss_c0(params, cable, config).map(|b| (None, b)),
            ConfigKind::AllDc => loss_c1(params, cable, config).map(|b| (None, b)),
            ConfigKind::Hybrid if params.s_actual > 0.0 => {
                optimal_y(params, cable, config).map(|(y, b)| (Some(y), b))
            }
            ConfigKind::Hybrid => continue,
        };
        match evaluated {
            Ok((y_opt, breakdown)) => out.push(Candidate {
                config: *config,
                y_opt,
                breakdown,
            }),
            Err(Error::Infeasible(reason)) => debug!("{config} skipped: {reason}"),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn select_with(
    params: &SystemParams,
    cable: &CableSpec,
    configs: &[Configuration],
    crossovers: Option<&CrossoverSet>,
) -> Result<Selection> {
    let mut ranked = candidates(params, cable, configs)?;
    if ranked.is_empty() {
        return Err(Error::Infeasible(format!(
            "no configuration can carry {:.6} MVA",
            params.s_actual
        )));
    }
    // Stable sort keeps the lower index on exact ties.
    ranked.sort_by(|a, b| a.breakdown.total_loss.total_cmp(&b.breakdown.total_loss));
    let best = &ranked[0];
    let runner_up = ranked.get(1);
    let runner_up_gap = runner_up.map(|r| {
        let w = best.breakdown.total_loss;
        if w > 0.0 {
            (r.breakdown.total_loss - w) / w
        } else if r.breakdown.total_loss > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    });
    let rule_choice = crossovers.and_then(|set| set.region_rule(params.link_length));
    Ok(Selection {
        config: best.config,
        y_opt: best.y_opt,
        breakdown: best.breakdown,
        runner_up: runner_up.map(|r| r.config),
        runner_up_gap,
        rule_choice,
    })
}

fn rule_crossovers(params: &SystemParams, cable: &CableSpec) -> Option<CrossoverSet> {
    match crossover_extrema(params, cable) {
        Ok(set) => Some(set),
        Err(e) => {
            debug!("region rule unavailable: {e}");
            None
        }
    }
}

/// Most efficient configuration by direct comparison of optimised total
/// losses, with the crossover-region rule recorded alongside.
pub fn select_configuration(params: &SystemParams, cable: &CableSpec) -> Result<Selection> {
    let configs = family(params)?;
    cable.validate()?;
    let crossovers = rule_crossovers(params, cable);
    let selection = select_with(params, cable, &configs, crossovers.as_ref())?;
    if !selection.rule_agrees() {
        debug!(
            "argmin picked {} where the region rule gives {:?} (runner-up gap {:?})",
            selection.config, selection.rule_choice, selection.runner_up_gap
        );
    }
    Ok(selection)
}

fn strictly_increasing(axis: &[f64]) -> bool {
    axis.windows(2).all(|w| w[0] < w[1]) && axis.iter().all(|v| v.is_finite())
}

/// Evaluates [`select_configuration`] over a grid of demands (per unit of
/// the single-link capacity) and lengths. Cells are evaluated in parallel on
/// the current rayon pool and assembled by index.
pub fn boundary_map(
    params_template: &SystemParams,
    cable: &CableSpec,
    demand_axis: &[f64],
    length_axis: &[f64],
) -> Result<BoundaryMap> {
    let configs = family(params_template)?;
    cable.validate()?;
    if !strictly_increasing(demand_axis) || demand_axis.iter().any(|d| *d < 0.0) {
        return Err(Error::validation("demand_axis", "must be non-negative and strictly increasing"));
    }
    if !strictly_increasing(length_axis) || length_axis.iter().any(|l| *l < 0.0) {
        return Err(Error::validation("length_axis", "must be non-negative and strictly increasing"));
    }

    let rows: Vec<SystemParams> = demand_axis
        .iter()
        .map(|d| params_template.with_demand_pu(*d, cable))
        .collect();
    let row_crossovers: Vec<Option<CrossoverSet>> = rows
        .par_iter()
        .map(|p| {
            if p.s_actual > 0.0 {
                rule_crossovers(p, cable)
            } else {
                None
            }
        })
        .collect();

    let width = length_axis.len();
    let cells: Vec<Option<Selection>> = (0..rows.len() * width)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / width, idx % width);
            let p = rows[i].with_length(length_axis[j]);
            select_with(&p, cable, &configs, row_crossovers[i].as_ref()).ok()
        })
        .collect();

    let mut winner = vec![vec![None; width]; rows.len()];
    let mut disagreements = Vec::new();
    for (idx, cell) in cells.iter().enumerate() {
        let (i, j) = (idx / width, idx % width);
        let Some(sel) = cell else { continue };
        winner[i][j] = Some(sel.config.index);
        if row_crossovers[i].is_some() && !sel.rule_agrees() {
            disagreements.push(RuleDisagreement {
                demand_pu: demand_axis[i],
                length_km: length_axis[j],
                argmin: sel.config.index,
                rule: sel.rule_choice,
                runner_up_gap: sel.runner_up_gap,
            });
        }
    }

    Ok(BoundaryMap {
        demand_axis: demand_axis.to_vec(),
        length_axis: length_axis.to_vec(),
        winner,
        pf: params_template.pf,
        disagreements,
    })
}

/// C2 band limits along one parameter axis at the template's per-unit
/// demand.
pub fn sensitivity_sweep(
    axis: &SweepAxis,
    params_template: &SystemParams,
    cable_template: &CableSpec,
) -> Result<SweepResult> {
    params_template.validate()?;
    cable_template.validate()?;
    let values = axis.values();
    let ascending = values.windows(2).all(|w| w[0] < w[1]);
    let descending = values.windows(2).all(|w| w[0] > w[1]);
    if values.is_empty() || !(ascending || descending) {
        return Err(Error::validation(
            format!("{} axis", axis.kind().name()),
            "values must be strictly monotone",
        ));
    }
    let base_link = link_capacity(cable_template, params_template.v_ll_rms)?;
    let demand_pu = params_template.s_actual / base_link;

    let points: Vec<(SystemParams, CableSpec)> = (0..values.len())
        .map(|i| {
            let (p, c) = match axis {
                SweepAxis::Voltage(v) => (
                    SystemParams {
                        v_ll_rms: v[i],
                        ..*params_template
                    },
                    *cable_template,
                ),
                SweepAxis::Eta(e) => (
                    SystemParams {
                        eta: e[i],
                        ..*params_template
                    },
                    *cable_template,
                ),
                SweepAxis::Area(cables) => (*params_template, cables[i]),
            };
            (p.with_demand_pu(demand_pu, &c), c)
        })
        .collect();

    let sets: Vec<Result<CrossoverSet>> = points
        .par_iter()
        .map(|(p, c)| crossover_extrema(p, c))
        .collect();

    let mut l_c2_min = Vec::with_capacity(values.len());
    let mut l_c2_max = Vec::with_capacity(values.len());
    for set in sets {
        let set = set?;
        l_c2_min.push(set.l_cr_a_min);
        l_c2_max.push(set.l_cr_c_max);
    }
    Ok(SweepResult {
        axis_name: axis.kind(),
        axis_values: values,
        l_c2_min,
        l_c2_max,
    })
}
