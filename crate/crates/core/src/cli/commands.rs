//! Subcommand implementations. Each builds a [`CsvDoc`]; column orders are
//! fixed and listed in the README.

use log::warn;

use super::output::{fmt_float, fmt_opt, CsvDoc};
use super::scenario::{Axis, Scenario};
use super::Command;
use crate::boundaries::{
    boundary_map, crossover_set_at, optimal_y, sensitivity_sweep, SweepAxis, SweepAxisKind,
};
use crate::error::{Error, Result};
use crate::losses::loss_breakdown;
use crate::model::{
    capacity_limits, configuration, enumerate_configurations, y_limits, ConfigKind, Configuration,
};

/// Flags shared by all subcommands, already parsed.
#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub axis: Option<Axis>,
    pub config: Option<u32>,
    pub y: Option<f64>,
}

impl Flags {
    fn echo(&self, doc: &mut CsvDoc) {
        if let Some(axis) = &self.axis {
            doc.comment("flag_axis", axis.spec.clone());
        }
        if let Some(config) = self.config {
            doc.comment("flag_config", format!("C{config}"));
        }
        if let Some(y) = self.y {
            doc.comment("flag_y", fmt_float(y));
        }
    }
}

fn document<S: Into<String>>(
    command: Command,
    scenario: &Scenario,
    flags: &Flags,
    header: impl IntoIterator<Item = S>,
) -> CsvDoc {
    let mut doc = CsvDoc::new(header);
    doc.comment("tool", format!("gridlink {}", env!("CARGO_PKG_VERSION")));
    doc.comment("subcommand", command.name());
    for (key, value) in scenario.echo() {
        doc.comment(key, value);
    }
    flags.echo(&mut doc);
    doc
}

pub fn run(command: Command, scenario: &Scenario, flags: &Flags) -> Result<CsvDoc> {
    match command {
        Command::Configs => configs(scenario, flags),
        Command::Losses => losses(scenario, flags),
        Command::Crossover => crossover(scenario, flags),
        Command::OptimalY => optimal_share(scenario, flags),
        Command::Boundary => boundary(scenario, flags),
        Command::Sweep => sweep(scenario, flags),
    }
}

fn configs(scenario: &Scenario, flags: &Flags) -> Result<CsvDoc> {
    let mut doc = document(
        Command::Configs,
        scenario,
        flags,
        ["config", "n_ac", "n_dc", "n_red", "s_max_ac_pu", "s_max_dc_pu", "preset_y"],
    );
    for c in enumerate_configurations(scenario.system.n_ori)? {
        let (ac, dc) = capacity_limits(&c, 1.0);
        doc.push(vec![
            c.to_string(),
            c.n_ac.to_string(),
            c.n_dc.to_string(),
            c.n_red.to_string(),
            fmt_float(ac),
            fmt_float(dc),
            fmt_opt(scenario.preset(c.index)),
        ]);
    }
    Ok(doc)
}

fn selected_configs(scenario: &Scenario, flags: &Flags) -> Result<Vec<Configuration>> {
    match flags.config {
        Some(index) => Ok(vec![configuration(scenario.system.n_ori, index)?]),
        None => enumerate_configurations(scenario.system.n_ori),
    }
}

fn length_axis<'a>(scenario: &'a Scenario, flags: &'a Flags) -> &'a [f64] {
    flags
        .axis
        .as_ref()
        .map_or(&scenario.length_axis.values, |a| &a.values)
}

fn losses(scenario: &Scenario, flags: &Flags) -> Result<CsvDoc> {
    let mut doc = document(
        Command::Losses,
        scenario,
        flags,
        [
            "length_km",
            "config",
            "y",
            "conductor_loss_w",
            "converter_loss_w",
            "total_loss_w",
            "normalized_loss",
            "ac_temperature_c",
            "dc_temperature_c",
        ],
    );
    let explicit = flags.config.is_some();
    for config in selected_configs(scenario, flags)? {
        let y = if config.is_hybrid() {
            flags.y.or_else(|| scenario.preset(config.index))
        } else {
            if flags.y.is_some() && explicit {
                warn!("--y ignored for {config}");
            }
            None
        };
        for &length in length_axis(scenario, flags) {
            let params = scenario.system.with_length(length);
            let b = match loss_breakdown(&params, &scenario.cable, &config, y) {
                Ok(b) => b,
                Err(e @ (Error::Infeasible(_) | Error::Validation { .. })) if !explicit => {
                    warn!("{config} skipped: {e}");
                    break;
                }
                Err(e) => return Err(e),
            };
            doc.push(vec![
                fmt_float(length),
                config.to_string(),
                fmt_opt(b.dc_share),
                fmt_float(b.conductor_loss),
                fmt_float(b.converter_loss),
                fmt_float(b.total_loss),
                fmt_float(b.normalized_loss),
                fmt_opt(b.ac_state.map(|s| s.temperature)),
                fmt_opt(b.dc_state.map(|s| s.temperature)),
            ]);
        }
    }
    Ok(doc)
}

fn crossover(scenario: &Scenario, flags: &Flags) -> Result<CsvDoc> {
    let mut doc = document(
        Command::Crossover,
        scenario,
        flags,
        [
            "s_actual_pu",
            "pf",
            "y",
            "l_cr_a_km",
            "l_cr_b_km",
            "l_cr_c_km",
            "l_cr_a_min_km",
            "y_at_a_min",
            "l_cr_c_max_km",
            "y_at_c_max",
        ],
    );
    let y = match flags.y.or_else(|| scenario.preset(2)) {
        Some(y) => y,
        None => return Err(Error::validation("n_ori", "crossovers need a hybrid C2")),
    };
    let set = crossover_set_at(&scenario.system, &scenario.cable, y)?;
    doc.push(vec![
        fmt_float(scenario.demand_pu),
        fmt_float(scenario.system.pf),
        fmt_float(set.y),
        fmt_opt(set.l_cr_a),
        fmt_opt(set.l_cr_b),
        fmt_opt(set.l_cr_c),
        fmt_opt(set.l_cr_a_min),
        fmt_opt(set.y_at_a_min),
        fmt_opt(set.l_cr_c_max),
        fmt_opt(set.y_at_c_max),
    ]);
    Ok(doc)
}

fn optimal_share(scenario: &Scenario, flags: &Flags) -> Result<CsvDoc> {
    let config = configuration(scenario.system.n_ori, flags.config.unwrap_or(2))?;
    if config.kind() != ConfigKind::Hybrid {
        return Err(Error::validation("config", format!("{config} is not a hybrid")));
    }
    let mut doc = document(
        Command::OptimalY,
        scenario,
        flags,
        [
            "length_km",
            "config",
            "y_min",
            "y_max",
            "y_opt",
            "total_loss_w",
            "normalized_loss",
            "preset_y",
            "preset_total_loss_w",
        ],
    );
    let (ac, dc) = capacity_limits(&config, scenario.s_link);
    let (y_min, y_max) = y_limits(scenario.system.s_actual, ac, dc)?;
    let preset = scenario.preset(config.index).expect("hybrid preset");
    for &length in length_axis(scenario, flags) {
        let params = scenario.system.with_length(length);
        let (y, best) = optimal_y(&params, &scenario.cable, &config)?;
        let preset_loss = loss_breakdown(&params, &scenario.cable, &config, Some(preset))
            .map(|b| b.total_loss)
            .ok();
        doc.push(vec![
            fmt_float(length),
            config.to_string(),
            fmt_float(y_min),
            fmt_float(y_max),
            fmt_float(y),
            fmt_float(best.total_loss),
            fmt_float(best.normalized_loss),
            fmt_float(preset),
            fmt_opt(preset_loss),
        ]);
    }
    Ok(doc)
}

fn boundary(scenario: &Scenario, flags: &Flags) -> Result<CsvDoc> {
    let lengths = length_axis(scenario, flags);
    let map = boundary_map(
        &scenario.system,
        &scenario.cable,
        &scenario.demand_axis.values,
        lengths,
    )?;
    for d in &map.disagreements {
        warn!(
            "region rule disagrees with argmin at {} p.u., {} km: argmin C{}, rule {}, runner-up gap {}",
            fmt_float(d.demand_pu),
            fmt_float(d.length_km),
            d.argmin,
            d.rule.map_or("none".to_string(), |r| format!("C{r}")),
            fmt_opt(d.runner_up_gap),
        );
    }
    let header = std::iter::once("s_actual_pu".to_string())
        .chain(lengths.iter().map(|l| fmt_float(*l)));
    let mut doc = document(Command::Boundary, scenario, flags, header);
    doc.comment("rule_disagreements", map.disagreements.len().to_string());
    for (demand, row) in map.demand_axis.iter().zip(&map.winner) {
        let mut cells = vec![fmt_float(*demand)];
        cells.extend(row.iter().map(|w| w.map(|i| format!("C{i}")).unwrap_or_default()));
        doc.push(cells);
    }
    Ok(doc)
}

fn sweep(scenario: &Scenario, flags: &Flags) -> Result<CsvDoc> {
    let kind = scenario.sweep.axis;
    let values = flags
        .axis
        .as_ref()
        .map_or(&scenario.sweep.values.values, |a| &a.values);
    let axis = match kind {
        SweepAxisKind::Voltage => SweepAxis::Voltage(values.clone()),
        SweepAxisKind::Eta => SweepAxis::Eta(values.clone()),
        SweepAxisKind::Area => SweepAxis::Area(
            values
                .iter()
                .map(|a| scenario.library.get(*a))
                .collect::<Result<_>>()?,
        ),
    };
    let column = match kind {
        SweepAxisKind::Voltage => "v_ll_rms_kv",
        SweepAxisKind::Area => "area_mm2",
        SweepAxisKind::Eta => "eta",
    };
    let result = sensitivity_sweep(&axis, &scenario.system, &scenario.cable)?;
    let mut doc = document(
        Command::Sweep,
        scenario,
        flags,
        [column, "l_c2_min_km", "l_c2_max_km"],
    );
    for ((v, lo), hi) in result
        .axis_values
        .iter()
        .zip(&result.l_c2_min)
        .zip(&result.l_c2_max)
    {
        doc.push(vec![fmt_float(*v), fmt_opt(*lo), fmt_opt(*hi)]);
    }
    Ok(doc)
}
