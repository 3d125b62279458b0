//! Experiment configuration (JSON) and its resolved numeric settings.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use qcorr_core::models::{BasisTruncation, Subsystem};
use qcorr_core::spectral::Window;
use serde::{Deserialize, Serialize};

use crate::datasets::DatasetId;
use crate::error::{PipelineError, PipelineResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Trajectory,
    Poincare,
    Spectrum,
    FreqEntropy,
    Lyapunov,
    EntropyCurve,
    DensitySpectrum,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Trajectory,
        Stage::Poincare,
        Stage::Spectrum,
        Stage::FreqEntropy,
        Stage::Lyapunov,
        Stage::EntropyCurve,
        Stage::DensitySpectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Trajectory => "trajectory",
            Stage::Poincare => "poincare",
            Stage::Spectrum => "spectrum",
            Stage::FreqEntropy => "freq-entropy",
            Stage::Lyapunov => "lyapunov",
            Stage::EntropyCurve => "entropy-curve",
            Stage::DensitySpectrum => "density-spectrum",
        }
    }

    pub fn is_quantum(self) -> bool {
        matches!(self, Stage::EntropyCurve | Stage::DensitySpectrum)
    }
}

impl std::str::FromStr for Stage {
    type Err = PipelineError;

    fn from_str(s: &str) -> PipelineResult<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| PipelineError::Config(format!("unknown stage '{s}'")))
    }
}

/// Basis truncation as written in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TruncationSpec {
    /// `n1 + n2 <= n_max`.
    Triangular {
        n_max: usize,
    },
    Rectangular {
        n1_max: usize,
        n2_max: usize,
    },
    /// Photon cutoff; the atomic dimension follows from the dataset.
    Photon {
        n_ph_max: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalOverrides {
    /// Integration step.
    pub dt: Option<f64>,
    /// Trajectory length used for spectra.
    pub t_max: Option<f64>,
    /// Spacing of stored samples, a multiple of `dt`.
    pub dt_sample: Option<f64>,
    pub drift_budget: Option<f64>,
    pub section_t_max: Option<f64>,
    pub lyapunov_t_max: Option<f64>,
    pub renorm_interval: Option<f64>,
    /// Stored samples per written trajectory row.
    pub write_every: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralOverrides {
    pub window: Option<String>,
    pub rel_threshold: Option<f64>,
    /// Lyapunov exponent above which the continuous entropy is used.
    pub chaos_threshold: Option<f64>,
    /// Highest frequency written to spectrum CSVs.
    pub write_max_omega: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumOverrides {
    pub truncation: Option<TruncationSpec>,
    pub t_max: Option<f64>,
    pub dt_sample: Option<f64>,
    pub plateau_tol: Option<f64>,
    pub max_doublings: Option<usize>,
    /// Re-run with cutoffs enlarged by `gate_step` and compare `S_M`.
    pub gate: Option<bool>,
    pub gate_step: Option<usize>,
    pub gate_tol: Option<f64>,
    pub density_floor: Option<f64>,
    pub max_block_dim: Option<usize>,
    pub subsystem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetId,
    pub stages: Vec<Stage>,
    /// 1-based entry indices; all entries when absent.
    #[serde(default)]
    pub entries: Option<Vec<usize>>,
    #[serde(default = "default_outdir")]
    pub outdir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub classical: ClassicalOverrides,
    #[serde(default)]
    pub spectral: SpectralOverrides,
    #[serde(default)]
    pub quantum: QuantumOverrides,
}

fn default_outdir() -> PathBuf {
    PathBuf::from("out")
}

fn default_workers() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetId, stages: Vec<Stage>) -> Self {
        Self {
            dataset,
            stages,
            entries: None,
            outdir: default_outdir(),
            workers: 1,
            seed: 0,
            classical: ClassicalOverrides::default(),
            spectral: SpectralOverrides::default(),
            quantum: QuantumOverrides::default(),
        }
    }

    pub fn from_json(text: &str) -> PipelineResult<Self> {
        serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> PipelineResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn stage_set(&self) -> BTreeSet<Stage> {
        self.stages.iter().copied().collect()
    }

    /// Fills in dataset defaults and checks ranges.
    pub fn resolve(&self) -> PipelineResult<Settings> {
        if self.stages.is_empty() {
            return Err(PipelineError::Config("stages must not be empty".into()));
        }
        if self.workers == 0 {
            return Err(PipelineError::Config("workers must be at least 1".into()));
        }
        let pe = matches!(self.dataset, DatasetId::PeRegular | DatasetId::PeMixed);
        let c = &self.classical;
        let (dt_default, t_default, sample_default) = match self.dataset {
            DatasetId::PeRegular => (0.125 / 16.0, 131_072.0, 0.125),
            DatasetId::PeMixed => (0.125 / 32.0, 131_072.0, 0.125),
            _ => (2e-3, 524_288.0, 0.5),
        };
        let dt = c.dt.unwrap_or(dt_default);
        let dt_sample = c.dt_sample.unwrap_or(sample_default);
        let stride = (dt_sample / dt).round();
        if !(dt > 0.0) || stride < 1.0 || ((stride * dt - dt_sample) / dt_sample).abs() > 1e-9 {
            return Err(PipelineError::Config(format!(
                "classical.dt_sample ({dt_sample}) must be a positive multiple of classical.dt ({dt})"
            )));
        }
        let classical = ClassicalSettings {
            dt,
            t_max: c.t_max.unwrap_or(t_default),
            sample_stride: stride as usize,
            drift_budget: c.drift_budget.unwrap_or(qcorr_core::classical::DEFAULT_DRIFT_BUDGET),
            section_t_max: c.section_t_max.unwrap_or(5_000.0),
            lyapunov_t_max: c.lyapunov_t_max.unwrap_or(1e4),
            renorm_interval: c.renorm_interval.unwrap_or(qcorr_core::classical::DEFAULT_RENORM_INTERVAL),
            write_every: c.write_every.unwrap_or(8),
        };
        for (name, v) in [
            ("classical.t_max", classical.t_max),
            ("classical.section_t_max", classical.section_t_max),
            ("classical.lyapunov_t_max", classical.lyapunov_t_max),
            ("classical.renorm_interval", classical.renorm_interval),
            ("classical.drift_budget", classical.drift_budget),
        ] {
            positive(name, v)?;
        }
        if classical.write_every == 0 {
            return Err(PipelineError::Config("classical.write_every must be at least 1".into()));
        }

        let s = &self.spectral;
        let window = match &s.window {
            Some(w) => w.parse::<Window>().map_err(|e| PipelineError::Config(e.to_string()))?,
            None => Window::Hann,
        };
        let spectral = SpectralSettings {
            window,
            rel_threshold: s.rel_threshold.unwrap_or(qcorr_core::spectral::DEFAULT_REL_THRESHOLD),
            chaos_threshold: s.chaos_threshold.unwrap_or(0.05),
            write_max_omega: s.write_max_omega.unwrap_or(5.0),
        };
        if !(spectral.rel_threshold > 0.0 && spectral.rel_threshold < 1.0) {
            return Err(PipelineError::Config("spectral.rel_threshold must lie in (0, 1)".into()));
        }

        let q = &self.quantum;
        let default_trunc = match self.dataset {
            DatasetId::PeRegular => TruncationSpec::Triangular { n_max: 104 },
            DatasetId::PeMixed => TruncationSpec::Triangular { n_max: 216 },
            DatasetId::JcRegular | DatasetId::JcMixed => TruncationSpec::Photon { n_ph_max: 160 },
            DatasetId::JcReduced => TruncationSpec::Photon { n_ph_max: 48 },
        };
        let subsystem = match &q.subsystem {
            Some(name) => name.parse::<Subsystem>().map_err(|e| PipelineError::Config(e.to_string()))?,
            None if pe => Subsystem::Mode1,
            None => Subsystem::Field,
        };
        let quantum = QuantumSettings {
            truncation: q.truncation.unwrap_or(default_trunc),
            t_max: q.t_max.unwrap_or(if pe { 300.0 } else { 350.0 }),
            dt_sample: q.dt_sample.unwrap_or(0.5),
            plateau_tol: q.plateau_tol.unwrap_or(1e-3),
            max_doublings: q.max_doublings.unwrap_or(match self.dataset {
                DatasetId::PeRegular => 3,
                // N = 216 costs minutes per window; 2 keeps 27 entries near 1 h
                DatasetId::PeMixed => 2,
                _ => 4,
            }),
            gate: q.gate.unwrap_or(true),
            gate_step: q.gate_step.unwrap_or(8),
            gate_tol: q.gate_tol.unwrap_or(1e-3),
            density_floor: q.density_floor.unwrap_or(qcorr_core::quantum::DEFAULT_DENSITY_FLOOR),
            max_block_dim: q.max_block_dim.unwrap_or(10_000),
            subsystem,
        };
        positive("quantum.t_max", quantum.t_max)?;
        positive("quantum.dt_sample", quantum.dt_sample)?;
        positive("quantum.plateau_tol", quantum.plateau_tol)?;
        positive("quantum.gate_tol", quantum.gate_tol)?;
        if quantum.max_doublings > 8 {
            return Err(PipelineError::Config("quantum.max_doublings must be at most 8".into()));
        }
        match (pe, quantum.truncation) {
            (true, TruncationSpec::Photon { .. })
            | (false, TruncationSpec::Triangular { .. } | TruncationSpec::Rectangular { .. }) => {
                return Err(PipelineError::Config(format!(
                    "truncation {:?} does not fit dataset {}",
                    quantum.truncation, self.dataset
                )))
            }
            _ => {}
        }
        Ok(Settings { classical, spectral, quantum })
    }
}

fn positive(name: &str, v: f64) -> PipelineResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(PipelineError::Config(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub classical: ClassicalSettings,
    pub spectral: SpectralSettings,
    pub quantum: QuantumSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalSettings {
    pub dt: f64,
    pub t_max: f64,
    pub sample_stride: usize,
    pub drift_budget: f64,
    pub section_t_max: f64,
    pub lyapunov_t_max: f64,
    pub renorm_interval: f64,
    pub write_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSettings {
    #[serde(serialize_with = "window_name")]
    pub window: Window,
    pub rel_threshold: f64,
    pub chaos_threshold: f64,
    pub write_max_omega: f64,
}

fn window_name<S: serde::Serializer>(w: &Window, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match w {
        Window::None => "none",
        Window::Hann => "hann",
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumSettings {
    pub truncation: TruncationSpec,
    pub t_max: f64,
    pub dt_sample: f64,
    pub plateau_tol: f64,
    pub max_doublings: usize,
    pub gate: bool,
    pub gate_step: usize,
    pub gate_tol: f64,
    pub density_floor: f64,
    pub max_block_dim: usize,
    #[serde(serialize_with = "subsystem_name")]
    pub subsystem: Subsystem,
}

fn subsystem_name<S: serde::Serializer>(v: &Subsystem, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(v.name())
}

impl QuantumSettings {
    pub fn basis(&self, two_j: Option<u32>) -> PipelineResult<BasisTruncation> {
        match (self.truncation, two_j) {
            (TruncationSpec::Triangular { n_max }, None) => Ok(BasisTruncation::oscillators_triangular(n_max)),
            (TruncationSpec::Rectangular { n1_max, n2_max }, None) => Ok(BasisTruncation::oscillators(n1_max, n2_max)),
            (TruncationSpec::Photon { n_ph_max }, Some(two_j)) => Ok(BasisTruncation::jaynes_cummings(n_ph_max, two_j)),
            (spec, _) => Err(PipelineError::Config(format!("truncation {spec:?} does not fit the model"))),
        }
    }
}
