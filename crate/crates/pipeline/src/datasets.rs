//! Bundled CICS datasets.

use std::fmt;
use std::str::FromStr;

use qcorr_core::models::{JaynesCummings, ModelSpec, PhasePoint, PullenEdmonds};
use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, PipelineResult};

const CICS_CSV: &str = include_str!("../data/cics.csv");

/// Spin of the reduced Jaynes-Cummings family, `2J`.
pub const REDUCED_TWO_J: u32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetId {
    PeRegular,
    PeMixed,
    JcRegular,
    JcMixed,
    /// `jc-regular` carried to `J = 9/2` by the exact scaling of the
    /// classical Hamiltonian: coordinates times `sqrt(J'/J)`, energy times
    /// `J'/J`.
    JcReduced,
}

impl DatasetId {
    pub const ALL: [DatasetId; 5] =
        [DatasetId::PeRegular, DatasetId::PeMixed, DatasetId::JcRegular, DatasetId::JcMixed, DatasetId::JcReduced];

    pub fn name(self) -> &'static str {
        match self {
            DatasetId::PeRegular => "pe-regular",
            DatasetId::PeMixed => "pe-mixed",
            DatasetId::JcRegular => "jc-regular",
            DatasetId::JcMixed => "jc-mixed",
            DatasetId::JcReduced => "jc-reduced",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            DatasetId::PeRegular => "coupled oscillators, regular phase space (lambda=0.0075, E=58, q2=sqrt10)",
            DatasetId::PeMixed => "coupled oscillators, mixed phase space (lambda=0.0075, E=150.75, q2=sqrt10/4)",
            DatasetId::JcRegular => "Jaynes-Cummings, regular (J=29, G=0.25, G'=0, E=40, q2=0)",
            DatasetId::JcMixed => "Jaynes-Cummings, mixed (J=25, G=0.4, G'=0.25, E=35, q2=0)",
            DatasetId::JcReduced => "jc-regular rescaled to J=9/2 (E=40*9/58, coordinates*sqrt(9/58))",
        }
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetId {
    type Err = PipelineError;

    fn from_str(s: &str) -> PipelineResult<Self> {
        DatasetId::ALL.into_iter().find(|d| d.name() == s).ok_or_else(|| PipelineError::UnknownDataset(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CicsEntry {
    /// 1-based position in the dataset.
    pub index: usize,
    /// Region tag (`A`..`D`, `lower`/`upper`, `chaotic`; `B/C` for the
    /// point shared by two rows).
    pub label: String,
    /// Unscaled coordinates.
    pub q1: f64,
    pub p1: f64,
    pub q2: f64,
    /// Text as printed in the source table.
    pub raw: [String; 3],
    /// Half a unit in the last printed digit of `p1`, unscaled.
    pub p1_half_ulp: f64,
}

impl CicsEntry {
    pub fn is_chaotic(&self) -> bool {
        self.label == "chaotic"
    }
}

/// A resolved initial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub point: PhasePoint<f64>,
    /// Set when the printed `p1` lay just outside the energy shell and was
    /// moved toward zero by half a unit in its last printed digit.
    pub p1_adjusted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CicsDataset {
    pub id: DatasetId,
    pub model: ModelSpec<f64>,
    pub energy: f64,
    /// Scale applied to the printed coordinates.
    pub scale: f64,
    pub entries: Vec<CicsEntry>,
}

impl CicsDataset {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, index: usize) -> PipelineResult<&CicsEntry> {
        self.entries
            .get(index.wrapping_sub(1))
            .ok_or_else(|| PipelineError::Config(format!("{} has no entry {index}", self.id)))
    }

    /// Completes the entry with `p2 > 0` on the dataset's energy shell.
    ///
    /// Printed coordinates are rounded; when that rounding pushes a point
    /// off the shell the printed `p1` is moved toward zero by half a unit
    /// in its last digit, the largest change consistent with the text.
    pub fn resolve(&self, entry: &CicsEntry) -> qcorr_core::Result<Resolved> {
        let solve = |p1: f64| self.model.solve_p2(entry.q1, p1, entry.q2, self.energy);
        match solve(entry.p1) {
            Ok(p2) => Ok(Resolved { point: PhasePoint::new(entry.q1, entry.p1, entry.q2, p2), p1_adjusted: false }),
            Err(err @ qcorr_core::Error::InfeasibleEnergy { .. }) => {
                let p1 = entry.p1 - entry.p1.signum() * entry.p1_half_ulp;
                match solve(p1) {
                    Ok(p2) => Ok(Resolved { point: PhasePoint::new(entry.q1, p1, entry.q2, p2), p1_adjusted: true }),
                    Err(_) => Err(err),
                }
            }
            Err(err) => Err(err),
        }
    }
}

/// Loads a bundled dataset.
pub fn load_cics(id: DatasetId) -> PipelineResult<CicsDataset> {
    let (source, model, energy, scale) = match id {
        DatasetId::PeRegular => (id, PullenEdmonds::natural(0.0075).into(), 58.0, 10f64.sqrt()),
        DatasetId::PeMixed => (id, PullenEdmonds::natural(0.0075).into(), 150.75, 10f64.sqrt()),
        DatasetId::JcRegular => (id, JaynesCummings::natural(0.25, 0.0, 58)?.into(), 40.0, 1.0),
        DatasetId::JcMixed => (id, JaynesCummings::natural(0.4, 0.25, 50)?.into(), 35.0, 1.0),
        DatasetId::JcReduced => {
            let ratio = REDUCED_TWO_J as f64 / 58.0;
            let model = JaynesCummings::natural(0.25, 0.0, REDUCED_TWO_J)?.into();
            (DatasetId::JcRegular, model, 40.0 * ratio, ratio.sqrt())
        }
    };
    let entries = parse_entries(source, scale)?;
    Ok(CicsDataset { id, model, energy, scale, entries })
}

fn parse_entries(id: DatasetId, scale: f64) -> PipelineResult<Vec<CicsEntry>> {
    let body: String = CICS_CSV.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let mut entries: Vec<CicsEntry> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| PipelineError::Data(e.to_string()))?;
        if &record[0] != id.name() {
            continue;
        }
        let raw = [record[2].to_string(), record[3].to_string(), record[4].to_string()];
        if let Some(last) = entries.last_mut() {
            if last.raw == raw {
                last.label = format!("{}/{}", last.label, &record[1]);
                continue;
            }
        }
        let value = |s: &str| parse_number(s).map(|v| v * scale);
        entries.push(CicsEntry {
            index: entries.len() + 1,
            label: record[1].to_string(),
            q1: value(&raw[0])?,
            p1: value(&raw[1])?,
            q2: value(&raw[2])?,
            p1_half_ulp: 0.5 * 10f64.powi(-(decimals(&raw[1]) as i32)) * scale,
            raw,
        });
    }
    Ok(entries)
}

/// Parses a decimal or a fraction `a/b`.
fn parse_number(s: &str) -> PipelineResult<f64> {
    let bad = || PipelineError::Data(format!("cannot parse coordinate '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            Ok(a / b)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

fn decimals(s: &str) -> usize {
    s.split_once('.').map_or(0, |(_, frac)| frac.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_decimals() {
        assert_eq!(parse_number("2/9").unwrap(), 2.0 / 9.0);
        assert_eq!(parse_number("-2.3963").unwrap(), -2.3963);
        assert!(parse_number("x").is_err());
        assert_eq!(decimals("3.25576"), 5);
        assert_eq!(decimals("1/4"), 0);
    }

    #[test]
    fn ids_round_trip() {
        for id in DatasetId::ALL {
            assert_eq!(id.name().parse::<DatasetId>().unwrap(), id);
        }
        assert!(matches!("pe-other".parse::<DatasetId>(), Err(PipelineError::UnknownDataset(_))));
    }
}
