//! Scenario files: flat `key = value` text with units in the key names.
//!
//! ```text
//! v_ll_rms_kv = 10
//! s_actual_pu = 3          # or s_actual_mva
//! pf = 0.9
//! eta = 0.9934
//! n_ori = 9
//! cable_area_mm2 = 400     # looked up in the cable library
//! length_axis_km = "0:30:0.1"
//! ```
//!
//! Values follow TOML syntax, so axis specs and paths are quoted strings.
//! Unknown keys are rejected. Everything is validated before any analysis
//! runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use super::library::{CableLibrary, REFERENCE_NAME};
use crate::boundaries::SweepAxisKind;
use crate::error::{Error, Result};
use crate::model::{enumerate_configurations, link_capacity, CableSpec, SystemParams};

pub const DEFAULT_LINK_LENGTH_KM: f64 = 10.0;
pub const DEFAULT_T_AMB_C: f64 = 20.0;
pub const DEFAULT_LENGTH_AXIS: &str = "0:50:0.1";
pub const DEFAULT_DEMAND_AXIS: &str = "0.05:4:0.05";

const INLINE_CABLE_KEYS: [&str; 4] = [
    "cable_r90_ohm_per_km",
    "cable_alpha_per_k",
    "cable_i_rated_a",
    "cable_ac_dc_ratio",
];

const KNOWN_KEYS: [&str; 18] = [
    "v_ll_rms_kv",
    "s_actual_mva",
    "s_actual_pu",
    "pf",
    "link_length_km",
    "eta",
    "t_amb_c",
    "n_ori",
    "cable_area_mm2",
    "cable_library",
    "cable_r90_ohm_per_km",
    "cable_alpha_per_k",
    "cable_i_rated_a",
    "cable_ac_dc_ratio",
    "length_axis_km",
    "demand_axis_pu",
    "sweep_axis",
    "sweep_values",
];

#[derive(Debug, Clone, PartialEq)]
pub enum CableSource {
    Inline,
    Library(String),
}

/// A named axis: the spec it was written as and the values it expands to.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub spec: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn parse(spec: &str) -> std::result::Result<Self, String> {
        Ok(Self {
            spec: spec.trim().to_string(),
            values: parse_axis(spec)?,
        })
    }
}

/// Expands `start:stop:step` (inclusive of `stop` when it lies on the
/// step grid) or a comma-separated list.
pub fn parse_axis(spec: &str) -> std::result::Result<Vec<f64>, String> {
    let spec = spec.trim();
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{s}` is not a number"))
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("axis `{spec}` is not start:stop:step"));
        };
        let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
        if step <= 0.0 {
            return Err("axis step must be > 0".to_string());
        }
        if stop < start {
            return Err("axis stop must not be below start".to_string());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        if count > 1_000_000 {
            return Err("axis has more than a million points".to_string());
        }
        Ok((0..=count).map(|i| start + step * i as f64).collect())
    } else {
        let values = spec.split(',').map(number).collect::<std::result::Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err("axis is empty".to_string());
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxisKind,
    pub values: Axis,
}

/// A fully validated scenario with every default filled in.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub source: PathBuf,
    pub system: SystemParams,
    /// Demand per unit of the single-link capacity.
    pub demand_pu: f64,
    pub s_link: f64,
    pub cable: CableSpec,
    pub cable_source: CableSource,
    pub library: CableLibrary,
    /// DC share presets for hybrid configurations, keyed by index.
    pub y_presets: BTreeMap<u32, f64>,
    pub length_axis: Axis,
    pub demand_axis: Axis,
    pub sweep: SweepSpec,
}

fn line_of(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(0, |i| i + 1)
}

struct Fields<'a> {
    table: Table,
    text: &'a str,
    path: &'a Path,
}

impl Fields<'_> {
    fn error(&self, key: &str, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.display().to_string(),
            line: line_of(self.text, key),
            message: format!("{key}: {}", message.into()),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(self.error(key, format!("expected a number, found {}", other.type_str()))),
        }
    }

    fn required(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| self.error(key, "missing required key"))
    }

    fn string(&self, key: &str) -> Result<Option<String>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(self.error(key, format!("expected a string, found {}", other.type_str()))),
        }
    }

    fn axis(&self, key: &str, default: &str) -> Result<Axis> {
        let spec = self.string(key)?.unwrap_or_else(|| default.to_string());
        Axis::parse(&spec).map_err(|m| self.error(key, m))
    }
}

fn preset_index(key: &str) -> Option<u32> {
    key.strip_prefix("y_preset_c")?.parse().ok()
}

pub fn sweep_axis_kind(name: &str) -> Option<SweepAxisKind> {
    match name {
        "voltage" => Some(SweepAxisKind::Voltage),
        "area" => Some(SweepAxisKind::Area),
        "eta" => Some(SweepAxisKind::Eta),
        _ => None,
    }
}

fn default_sweep_values(kind: SweepAxisKind, library: &CableLibrary) -> String {
    match kind {
        SweepAxisKind::Voltage => "5:35:1".to_string(),
        SweepAxisKind::Eta => "0.985:0.999:0.001".to_string(),
        SweepAxisKind::Area => library
            .areas()
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(","),
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            context: format!("reading scenario {}", path.display()),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Parses scenario text; `path` names the file in diagnostics and anchors
    /// a relative `cable_library`.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| {
            let line = e
                .span()
                .map_or(0, |span| text[..span.start].lines().count().max(1));
            Error::Parse {
                path: path.display().to_string(),
                line,
                message: e.message().to_string(),
            }
        })?;
        let fields = Fields { table, text, path };

        for key in fields.table.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) && preset_index(key).is_none() {
                return Err(fields.error(key, "unknown key"));
            }
        }

        let n_ori = match fields.table.get("n_ori") {
            Some(Value::Integer(n)) if *n > 0 && *n <= i64::from(u32::MAX) => *n as u32,
            Some(_) => return Err(fields.error("n_ori", "expected a positive integer")),
            None => return Err(fields.error("n_ori", "missing required key")),
        };

        let library = match fields.string("cable_library")? {
            Some(lib) => {
                let lib_path = path.parent().unwrap_or(Path::new(".")).join(&lib);
                (CableLibrary::load(&lib_path)?, Some(lib_path))
            }
            None => (CableLibrary::reference(), None),
        };
        let (library, library_path) = library;

        let area = fields.required("cable_area_mm2")?;
        let inline: Vec<Option<f64>> = INLINE_CABLE_KEYS
            .iter()
            .map(|k| fields.number(k))
            .collect::<Result<_>>()?;
        let (cable, cable_source) = if inline.iter().all(Option::is_none) {
            let cable = library
                .get(area)
                .map_err(|e| fields.error("cable_area_mm2", e.to_string()))?;
            let name = library_path.map_or(REFERENCE_NAME.to_string(), |p| p.display().to_string());
            (cable, CableSource::Library(name))
        } else if let [Some(r_90), Some(alpha), Some(i_rated), Some(ratio)] = inline[..] {
            let cable = CableSpec {
                area,
                r_90,
                alpha,
                i_rated,
                ac_dc_resistance_ratio: ratio,
            };
            (cable, CableSource::Inline)
        } else {
            let missing = INLINE_CABLE_KEYS
                .iter()
                .zip(&inline)
                .find(|(_, v)| v.is_none())
                .map(|(k, _)| *k)
                .unwrap_or("cable");
            return Err(fields.error(missing, "inline cables need all four datasheet keys"));
        };
        let validation = |e: Error| match e {
            Error::Validation { field, reason } => fields.error(&field, reason),
            other => other,
        };
        cable.validate().map_err(|e| match e {
            Error::Validation { field, reason } => {
                fields.error(&format!("cable {field}"), reason)
            }
            other => other,
        })?;

        let v_ll_rms = fields.required("v_ll_rms_kv")?;
        let pf = fields.required("pf")?;
        let eta = fields.required("eta")?;
        let link_length = fields
            .number("link_length_km")?
            .unwrap_or(DEFAULT_LINK_LENGTH_KM);
        let t_amb = fields.number("t_amb_c")?.unwrap_or(DEFAULT_T_AMB_C);
        if !(v_ll_rms > 0.0) {
            return Err(fields.error("v_ll_rms_kv", "must be > 0"));
        }
        let s_link = link_capacity(&cable, v_ll_rms).map_err(validation)?;
        let (s_actual, demand_pu) = match (fields.number("s_actual_mva")?, fields.number("s_actual_pu")?) {
            (Some(mva), None) => (mva, mva / s_link),
            (None, Some(pu)) => (pu * s_link, pu),
            (Some(_), Some(_)) => {
                return Err(fields.error("s_actual_pu", "give either s_actual_mva or s_actual_pu, not both"))
            }
            (None, None) => return Err(fields.error("s_actual_mva", "missing required key (or s_actual_pu)")),
        };
        let system = SystemParams {
            v_ll_rms,
            s_actual,
            pf,
            link_length,
            eta,
            t_amb,
            n_ori,
        };
        system.validate().map_err(|e| match e {
            Error::Validation { field, reason } => {
                let key = match field.as_str() {
                    "v_ll_rms" => "v_ll_rms_kv",
                    "s_actual" if fields.table.contains_key("s_actual_pu") => "s_actual_pu",
                    "s_actual" => "s_actual_mva",
                    "link_length" => "link_length_km",
                    "t_amb" => "t_amb_c",
                    other => other,
                };
                fields.error(key, reason)
            }
            other => other,
        })?;

        let configs = enumerate_configurations(n_ori).map_err(validation)?;
        let mut y_presets = BTreeMap::new();
        for config in configs.iter().filter(|c| c.is_hybrid()) {
            y_presets.insert(config.index, config.preset_y().expect("hybrid"));
        }
        for key in fields.table.keys().filter(|k| preset_index(k).is_some()) {
            let index = preset_index(key).expect("filtered");
            if !y_presets.contains_key(&index) {
                return Err(fields.error(key, format!("C{index} is not a hybrid configuration for n_ori = {n_ori}")));
            }
            let y = fields.required(key)?;
            if !(0.0..=1.0).contains(&y) {
                return Err(fields.error(key, "y out of [0,1]"));
            }
            y_presets.insert(index, y);
        }

        let length_axis = fields.axis("length_axis_km", DEFAULT_LENGTH_AXIS)?;
        if length_axis.values.iter().any(|l| *l < 0.0) {
            return Err(fields.error("length_axis_km", "lengths must be >= 0"));
        }
        let demand_axis = fields.axis("demand_axis_pu", DEFAULT_DEMAND_AXIS)?;
        if demand_axis.values.iter().any(|d| *d < 0.0) {
            return Err(fields.error("demand_axis_pu", "demands must be >= 0"));
        }
        let axis_name = fields.string("sweep_axis")?.unwrap_or_else(|| "voltage".to_string());
        let kind = sweep_axis_kind(&axis_name)
            .ok_or_else(|| fields.error("sweep_axis", "expected voltage, area or eta"))?;
        let sweep_values = fields.axis("sweep_values", &default_sweep_values(kind, &library))?;

        Ok(Self {
            source: path.to_path_buf(),
            system,
            demand_pu,
            s_link,
            cable,
            cable_source,
            library,
            y_presets,
            length_axis,
            demand_axis,
            sweep: SweepSpec {
                axis: kind,
                values: sweep_values,
            },
        })
    }

    pub fn preset(&self, index: u32) -> Option<f64> {
        self.y_presets.get(&index).copied()
    }

    /// Every effective parameter, in a fixed order, for output headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        use super::output::fmt_float as f;
        let s = &self.system;
        let mut out = vec![
            ("scenario".to_string(), self.source.display().to_string()),
            ("v_ll_rms_kv".to_string(), f(s.v_ll_rms)),
            ("s_actual_mva".to_string(), f(s.s_actual)),
            ("s_actual_pu".to_string(), f(self.demand_pu)),
            ("s_link_mva".to_string(), f(self.s_link)),
            ("pf".to_string(), f(s.pf)),
            ("link_length_km".to_string(), f(s.link_length)),
            ("eta".to_string(), f(s.eta)),
            ("t_amb_c".to_string(), f(s.t_amb)),
            ("n_ori".to_string(), s.n_ori.to_string()),
            (
                "cable_source".to_string(),
                match &self.cable_source {
                    CableSource::Inline => "inline".to_string(),
                    CableSource::Library(name) => name.clone(),
                },
            ),
            ("cable_area_mm2".to_string(), f(self.cable.area)),
            ("cable_r90_ohm_per_km".to_string(), f(self.cable.r_90)),
            ("cable_alpha_per_k".to_string(), f(self.cable.alpha)),
            ("cable_i_rated_a".to_string(), f(self.cable.i_rated)),
            ("cable_ac_dc_ratio".to_string(), f(self.cable.ac_dc_resistance_ratio)),
        ];
        for (index, y) in &self.y_presets {
            out.push((format!("y_preset_c{index}"), f(*y)));
        }
        out.push(("length_axis_km".to_string(), self.length_axis.spec.clone()));
        out.push(("demand_axis_pu".to_string(), self.demand_axis.spec.clone()));
        out.push(("sweep_axis".to_string(), self.sweep.axis.name().to_string()));
        out.push(("sweep_values".to_string(), self.sweep.values.spec.clone()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = "\
v_ll_rms_kv = 10
s_actual_pu = 3
pf = 0.9
eta = 0.9934
t_amb_c = 20
n_ori = 9
cable_area_mm2 = 400
";

    fn parse(text: &str) -> Result<Scenario> {
        Scenario::parse(text, Path::new("test.scn"))
    }

    #[test]
    fn reference_scenario() {
        let s = parse(REFERENCE).unwrap();
        assert_eq!(s.system.v_ll_rms, 10.0);
        assert_eq!(s.system.n_ori, 9);
        assert_eq!(s.cable.area, 400.0);
        assert_eq!(s.demand_pu, 3.0);
        assert_eq!(s.system.link_length, DEFAULT_LINK_LENGTH_KM);
        assert_eq!(s.preset(2), Some(0.75));
        assert!((s.preset(3).unwrap() - 0.33).abs() < 0.005);
        assert_eq!(s.length_axis.values.len(), 501);
        assert_eq!(s.demand_axis.values.len(), 80);
        let echo = s.echo();
        assert!(echo.iter().any(|(k, v)| k == "y_preset_c2" && v == "0.75"));
    }

    #[test]
    fn pf_out_of_range() {
        let text = REFERENCE.replace("pf = 0.9", "pf = 1.3");
        let err = parse(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("pf out of (0,1]"), "{msg}");
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse(&format!("{REFERENCE}voltage = 3\n")).unwrap_err();
        assert!(err.to_string().contains("unknown key"));
        assert!(matches!(err, Error::Parse { line: 8, .. }));
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = parse("v_ll_rms_kv = 10\npf = = 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn presets_can_be_overridden() {
        let s = parse(&format!("{REFERENCE}y_preset_c2 = 0.8\n")).unwrap();
        assert_eq!(s.preset(2), Some(0.8));
        assert!(parse(&format!("{REFERENCE}y_preset_c5 = 0.8\n")).is_err());
        assert!(parse(&format!("{REFERENCE}y_preset_c3 = 1.5\n")).is_err());
    }

    #[test]
    fn inline_cable() {
        let text = "v_ll_rms_kv = 10\ns_actual_mva = 10\npf = 1\neta = 0.99\nn_ori = 9\n\
            cable_area_mm2 = 1\ncable_r90_ohm_per_km = 0.1\ncable_alpha_per_k = 0.004\n\
            cable_i_rated_a = 577.350269\ncable_ac_dc_ratio = 1\n";
        let s = parse(text).unwrap();
        assert_eq!(s.cable_source, CableSource::Inline);
        assert!((s.demand_pu - 1.0).abs() < 1e-6);

        let partial = "v_ll_rms_kv = 10\ns_actual_mva = 10\npf = 1\neta = 0.99\nn_ori = 9\n\
            cable_area_mm2 = 1\ncable_r90_ohm_per_km = 0.1\n";
        assert!(parse(partial).is_err());
    }

    #[test]
    fn missing_library_area() {
        let err = parse(&REFERENCE.replace("= 400", "= 185")).unwrap_err();
        assert!(err.to_string().contains("185"));
    }

    #[test]
    fn demand_must_be_given_once() {
        assert!(parse(&REFERENCE.replace("s_actual_pu = 3\n", "")).is_err());
        assert!(parse(&format!("{REFERENCE}s_actual_mva = 3\n")).is_err());
    }

    #[test]
    fn axes() {
        assert_eq!(parse_axis("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_axis("150, 240,630").unwrap(), vec![150.0, 240.0, 630.0]);
        assert_eq!(parse_axis("0:50:0.1").unwrap().len(), 501);
        assert!(parse_axis("1:0:0.1").is_err());
        assert!(parse_axis("0:1:0").is_err());
        assert!(parse_axis("0:1").is_err());
        assert!(parse_axis("a,b").is_err());
    }
}
