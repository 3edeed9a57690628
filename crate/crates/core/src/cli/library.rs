//! Cable datasheet library keyed by conductor area.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::CableSpec;

pub const LIBRARY_HEADER: [&str; 5] = [
    "area_mm2",
    "r90_ohm_per_km",
    "alpha_per_k",
    "i_rated_a",
    "ac_dc_ratio",
];

/// 10 kV XLPE single-core aluminium cables, the calibration point for every
/// analysis that names a cable by area.
pub const REFERENCE_LIBRARY: &str = include_str!("../../data/reference_cables.csv");
pub const REFERENCE_NAME: &str = "builtin:reference_cables.csv";

#[derive(Debug, Deserialize)]
struct Row {
    area_mm2: f64,
    r90_ohm_per_km: f64,
    alpha_per_k: f64,
    i_rated_a: f64,
    ac_dc_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CableLibrary {
    cables: Vec<CableSpec>,
}

impl CableLibrary {
    pub fn reference() -> Self {
        Self::parse(REFERENCE_LIBRARY, REFERENCE_NAME).expect("reference library is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            context: format!("reading cable library {}", path.display()),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_string(),
            line,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        if header.iter().ne(LIBRARY_HEADER.iter().copied()) {
            return Err(parse_err(
                1,
                format!("expected header `{}`", LIBRARY_HEADER.join(",")),
            ));
        }

        let mut cables: Vec<CableSpec> = Vec::new();
        for record in reader.deserialize::<Row>() {
            let line = cables.len() + 2;
            let row = record.map_err(|e| parse_err(line, e.to_string()))?;
            let cable = CableSpec {
                area: row.area_mm2,
                r_90: row.r90_ohm_per_km,
                alpha: row.alpha_per_k,
                i_rated: row.i_rated_a,
                ac_dc_resistance_ratio: row.ac_dc_ratio,
            };
            cable
                .validate()
                .map_err(|e| parse_err(line, e.to_string()))?;
            if let Some(prev) = cables.last() {
                if cable.area <= prev.area {
                    return Err(parse_err(
                        line,
                        "areas must be unique and ascending".to_string(),
                    ));
                }
            }
            cables.push(cable);
        }
        if cables.is_empty() {
            return Err(parse_err(1, "library has no rows".to_string()));
        }
        Ok(Self { cables })
    }

    pub fn get(&self, area: f64) -> Result<CableSpec> {
        self.cables
            .iter()
            .find(|c| c.area == area)
            .copied()
            .ok_or(Error::MissingCable { area })
    }

    pub fn cables(&self) -> &[CableSpec] {
        &self.cables
    }

    pub fn areas(&self) -> Vec<f64> {
        self.cables.iter().map(|c| c.area).collect()
    }
}
