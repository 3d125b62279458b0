//! Runs the requested stages over a dataset and writes the artifacts.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use qcorr_core::classical::{
    integrate_with, lyapunov_max_from, poincare_section, IntegrationOptions, SectionCondition, Trajectory,
};
use qcorr_core::io::fmt_float;
use qcorr_core::models::{
    build_hamiltonian, coherent_state_with_leakage, BasisTruncation, MemoryBudget, ModelSpec, PhasePoint, QuantumState,
    LEAKAGE_THRESHOLD,
};
use qcorr_core::quantum::{density_spectrum, diagonalize_with, entropy_curve, entropy_curve_plateau, EigenSystem};
use qcorr_core::spectral::{
    extract_lines, frequency_entropy, frequency_entropy_continuous, trajectory_spectra, PowerSpectrum,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Settings, Stage};
use crate::datasets::{load_cics, CicsDataset, CicsEntry};
use crate::error::{PipelineError, PipelineResult};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

const SUMMARY_HEADER: [&str; 21] = [
    "dataset",
    "index",
    "label",
    "q1",
    "p1",
    "q2",
    "p2",
    "E",
    "p1_adjusted",
    "S_M",
    "t_of_max",
    "entropy_window",
    "plateau_converged",
    "gate_delta",
    "S_Fr",
    "S_Fr_mode",
    "n_lines",
    "lyapunov",
    "participation_ratio",
    "leakage",
    "status",
];

/// One summary row; quantities of stages that were not run stay empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub index: usize,
    pub label: String,
    pub point: Option<[f64; 4]>,
    pub energy: f64,
    pub p1_adjusted: bool,
    pub s_max: Option<f64>,
    pub t_of_max: Option<f64>,
    pub entropy_window: Option<f64>,
    pub plateau_converged: Option<bool>,
    pub gate_delta: Option<f64>,
    pub s_fr: Option<f64>,
    pub s_fr_mode: Option<&'static str>,
    pub n_lines: Option<usize>,
    pub lyapunov: Option<f64>,
    pub participation_ratio: Option<f64>,
    pub leakage: Option<f64>,
    pub errors: Vec<String>,
}

impl SummaryRow {
    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn phase_point(&self) -> Option<PhasePoint<f64>> {
        self.point.map(PhasePoint::from_array)
    }

    fn record(&self) -> Vec<String> {
        let f = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        let b = |v: Option<bool>| v.map(|x| x.to_string()).unwrap_or_default();
        let p = self.point.map(|p| p.map(fmt_float)).unwrap_or_default();
        vec![
            self.dataset.clone(),
            self.index.to_string(),
            self.label.clone(),
            p[0].clone(),
            p[1].clone(),
            p[2].clone(),
            p[3].clone(),
            fmt_float(self.energy),
            self.p1_adjusted.to_string(),
            f(self.s_max),
            f(self.t_of_max),
            f(self.entropy_window),
            b(self.plateau_converged),
            f(self.gate_delta),
            f(self.s_fr),
            self.s_fr_mode.unwrap_or_default().to_string(),
            self.n_lines.map(|n| n.to_string()).unwrap_or_default(),
            f(self.lyapunov),
            f(self.participation_ratio),
            f(self.leakage),
            if self.ok() { "ok".to_string() } else { format!("failed: {}", self.errors.join("; ")) },
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryReport {
    pub index: usize,
    pub label: String,
    pub status: &'static str,
    pub errors: Vec<String>,
    pub files: Vec<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigensystemReport {
    pub role: &'static str,
    pub truncation: String,
    pub dim: usize,
    pub block_dims: Vec<usize>,
    pub computations: usize,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub dataset: String,
    pub stages: Vec<&'static str>,
    pub seed: u64,
    pub workers: usize,
    pub settings: Settings,
    pub summary: String,
    pub entries: Vec<EntryReport>,
    pub eigensystems: Vec<EigensystemReport>,
    pub failed: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rows: Vec<SummaryRow>,
    pub manifest: Manifest,
    pub summary_path: PathBuf,
    pub manifest_path: PathBuf,
}

impl RunOutcome {
    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| !r.ok()).count()
    }
}

struct Ctx<'a> {
    data: &'a CicsDataset,
    settings: &'a Settings,
    stages: BTreeSet<Stage>,
    dir: PathBuf,
    seed: u64,
}

impl Ctx<'_> {
    fn path(&self, index: usize, stage: &str) -> PathBuf {
        self.dir.join(format!("{index}_{stage}.csv"))
    }

    fn has(&self, s: Stage) -> bool {
        self.stages.contains(&s)
    }
}

#[derive(Default)]
struct EntryWork {
    row: SummaryRow,
    files: Vec<String>,
    seconds: f64,
    psi_ok: bool,
}

/// Runs `config`. Entry failures are reported in the outcome; only
/// configuration and output-directory problems return `Err`.
pub fn run_experiment(config: &ExperimentConfig) -> PipelineResult<RunOutcome> {
    let settings = config.resolve()?;
    let data = load_cics(config.dataset)?;
    let indices: Vec<usize> = match &config.entries {
        Some(list) => {
            let mut list = list.clone();
            list.sort_unstable();
            list.dedup();
            for &i in &list {
                data.entry(i)?;
            }
            list
        }
        None => (1..=data.len()).collect(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| PipelineError::Config(format!("cannot start {} workers: {e}", config.workers)))?;
    let dir = config.outdir.join(config.dataset.name());
    fs::create_dir_all(&dir).map_err(|e| PipelineError::io(&dir, e))?;
    let ctx = Ctx { data: &data, settings: &settings, stages: config.stage_set(), dir, seed: config.seed };

    let mut work: Vec<EntryWork> = pool.install(|| {
        indices
            .par_iter()
            .map(|&i| {
                let entry = data.entry(i).expect("indices were validated");
                let start = Instant::now();
                let mut w = classical_entry(&ctx, entry);
                w.seconds = start.elapsed().as_secs_f64();
                w
            })
            .collect()
    });

    let mut eigensystems = Vec::new();
    if ctx.stages.iter().any(|s| s.is_quantum()) {
        quantum_stage(&ctx, &pool, &mut work, &mut eigensystems)?;
    }

    let rows: Vec<SummaryRow> = work.iter().map(|w| w.row.clone()).collect();
    let summary_path = config.outdir.join(SUMMARY_FILE);
    write_summary(&summary_path, &rows)?;
    let entries = work
        .iter()
        .map(|w| EntryReport {
            index: w.row.index,
            label: w.row.label.clone(),
            status: if w.row.ok() { "ok" } else { "failed" },
            errors: w.row.errors.clone(),
            files: w.files.clone(),
            seconds: w.seconds,
        })
        .collect();
    let manifest = Manifest {
        dataset: config.dataset.name().to_string(),
        stages: ctx.stages.iter().map(|s| s.name()).collect(),
        seed: config.seed,
        workers: config.workers,
        settings: settings.clone(),
        summary: summary_path.display().to_string(),
        entries,
        eigensystems,
        failed: rows.iter().filter(|r| !r.ok()).count(),
    };
    let manifest_path = config.outdir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&manifest_path, text + "\n").map_err(|e| PipelineError::io(&manifest_path, e))?;
    Ok(RunOutcome { rows, manifest, summary_path, manifest_path })
}

fn write_summary(path: &Path, rows: &[SummaryRow]) -> PipelineResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))?;
    let to_err = |e: csv::Error| PipelineError::Data(format!("{}: {e}", path.display()));
    w.write_record(SUMMARY_HEADER).map_err(to_err)?;
    for row in rows {
        w.write_record(row.record()).map_err(to_err)?;
    }
    w.flush().map_err(|e| PipelineError::io(path, e))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> PipelineResult<String> {
    let file = File::create(path).map_err(|e| PipelineError::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| PipelineError::io(path, e))?;
    Ok(path.display().to_string())
}

/// Unit tangent vector drawn from the run seed and the entry index.
pub fn seeded_tangent(seed: u64, index: usize) -> [f64; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

fn classical_entry(ctx: &Ctx<'_>, entry: &CicsEntry) -> EntryWork {
    let data = ctx.data;
    let mut w = EntryWork {
        row: SummaryRow {
            dataset: data.id.name().to_string(),
            index: entry.index,
            label: entry.label.clone(),
            energy: data.energy,
            ..SummaryRow::default()
        },
        ..EntryWork::default()
    };
    match data.resolve(entry) {
        Ok(r) => {
            w.row.point = Some(r.point.to_array());
            w.row.p1_adjusted = r.p1_adjusted;
            w.psi_ok = true;
        }
        Err(e) => {
            w.row.errors.push(format!("initial condition: {e}"));
            return w;
        }
    }
    if let Err(e) = classical_stages(ctx, &mut w) {
        w.row.errors.push(e);
    }
    w
}

fn classical_stages(ctx: &Ctx<'_>, w: &mut EntryWork) -> Result<(), String> {
    let c = &ctx.settings.classical;
    let sp = &ctx.settings.spectral;
    let model = &ctx.data.model;
    let x0 = w.row.phase_point().expect("resolved");
    let index = w.row.index;
    let opts = IntegrationOptions { drift_budget: c.drift_budget };
    let tag = |stage: Stage| move |e: PipelineError| format!("{}: {e}", stage.name());

    if ctx.has(Stage::Lyapunov) || ctx.has(Stage::FreqEntropy) {
        let v0 = seeded_tangent(ctx.seed, index);
        let l = lyapunov_max_from(model, &x0, c.lyapunov_t_max, c.dt, c.renorm_interval, &opts, v0)
            .map_err(|e| format!("lyapunov: {e}"))?;
        w.row.lyapunov = Some(l);
    }
    if ctx.has(Stage::Poincare) {
        let section = SectionCondition::q2(0.0)
            .and_then(|cond| poincare_section(model, &x0, &cond, c.section_t_max, c.dt))
            .map_err(|e| format!("poincare: {e}"))?;
        let f = write_file(&ctx.path(index, "poincare"), |f| section.write_csv(f)).map_err(tag(Stage::Poincare))?;
        w.files.push(f);
    }
    let need_traj = [Stage::Trajectory, Stage::Spectrum, Stage::FreqEntropy].iter().any(|s| ctx.has(*s));
    if !need_traj {
        return Ok(());
    }
    let traj =
        integrate_with(model, &x0, c.dt, c.t_max, c.sample_stride, &opts).map_err(|e| format!("trajectory: {e}"))?;
    if ctx.has(Stage::Trajectory) {
        let thin = decimate(&traj, c.write_every);
        let f = write_file(&ctx.path(index, "trajectory"), |f| thin.write_csv(f)).map_err(tag(Stage::Trajectory))?;
        w.files.push(f);
    }
    if !(ctx.has(Stage::Spectrum) || ctx.has(Stage::FreqEntropy)) {
        return Ok(());
    }
    let (s1, s2) = trajectory_spectra(&traj, sp.window).map_err(|e| format!("spectrum: {e}"))?;
    drop(traj);
    let lines = extract_lines(&s1, &s2, sp.rel_threshold).map_err(|e| format!("spectrum: {e}"))?;
    w.row.n_lines = Some(lines.len());
    if ctx.has(Stage::Spectrum) {
        for (name, s) in [("spectrum_q1", &s1), ("spectrum_q2", &s2)] {
            let cut = cap_spectrum(s, sp.write_max_omega).map_err(|e| format!("spectrum: {e}"))?;
            let f = write_file(&ctx.path(index, name), |f| cut.write_csv(f)).map_err(tag(Stage::Spectrum))?;
            w.files.push(f);
        }
        let f = write_file(&ctx.path(index, "lines"), |f| lines.write_csv(f)).map_err(tag(Stage::Spectrum))?;
        w.files.push(f);
    }
    if ctx.has(Stage::FreqEntropy) {
        let chaotic = w.row.lyapunov.is_some_and(|l| l >= sp.chaos_threshold);
        let fe = if chaotic { frequency_entropy_continuous(&s1, &s2) } else { frequency_entropy(&lines) }
            .map_err(|e| format!("freq-entropy: {e}"))?;
        w.row.s_fr = Some(fe.value);
        w.row.s_fr_mode = Some(fe.mode.name());
    }
    Ok(())
}

fn decimate(traj: &Trajectory<f64>, every: usize) -> Trajectory<f64> {
    let mut thin = traj.clone();
    thin.samples = traj.samples.iter().step_by(every).copied().collect();
    thin.sample_stride *= every;
    thin
}

fn cap_spectrum(s: &PowerSpectrum<f64>, max_omega: f64) -> qcorr_core::Result<PowerSpectrum<f64>> {
    let keep = s.frequencies().iter().take_while(|w| **w <= max_omega).count().max(1);
    let mut cut = PowerSpectrum::from_intensities(s.duration, s.intensities[..keep].to_vec(), s.window)?;
    cut.observable = s.observable;
    Ok(cut)
}

struct Eigen {
    es: Option<EigenSystem<f64>>,
    report: EigensystemReport,
}

fn eigensystem(model: &ModelSpec<f64>, trunc: BasisTruncation, budget: &MemoryBudget, role: &'static str) -> Eigen {
    let start = Instant::now();
    let result = build_hamiltonian(model, &trunc, budget).and_then(|h| diagonalize_with(&h, budget));
    let mut report = EigensystemReport {
        role,
        truncation: format!("{trunc:?}"),
        dim: trunc.active_count(),
        block_dims: Vec::new(),
        computations: 1,
        seconds: start.elapsed().as_secs_f64(),
        error: None,
    };
    match result {
        Ok(es) => {
            report.block_dims = es.block_dims();
            Eigen { es: Some(es), report }
        }
        Err(e) => {
            report.error = Some(e.to_string());
            Eigen { es: None, report }
        }
    }
}

fn coherent(
    model: &ModelSpec<f64>,
    x0: &PhasePoint<f64>,
    trunc: &BasisTruncation,
) -> Result<(QuantumState<f64>, f64), String> {
    let (psi, leakage) = coherent_state_with_leakage(model, x0, trunc).map_err(|e| e.to_string())?;
    if !(leakage < LEAKAGE_THRESHOLD) {
        let err = qcorr_core::Error::Truncation { leakage, threshold: LEAKAGE_THRESHOLD };
        return Err(err.to_string());
    }
    Ok((psi, leakage))
}

fn quantum_stage(
    ctx: &Ctx<'_>,
    pool: &rayon::ThreadPool,
    work: &mut [EntryWork],
    reports: &mut Vec<EigensystemReport>,
) -> PipelineResult<()> {
    let q = &ctx.settings.quantum;
    let model = &ctx.data.model;
    let two_j = match model {
        ModelSpec::JaynesCummings(jc) => Some(jc.two_j),
        ModelSpec::PullenEdmonds(_) => None,
    };
    let trunc = q.basis(two_j)?;
    let budget = MemoryBudget { max_block_dim: q.max_block_dim, ..MemoryBudget::default() };
    let base = eigensystem(model, trunc, &budget, "base");
    reports.push(base.report.clone());
    let Some(es) = base.es else {
        let msg = format!("eigensystem: {}", base.report.error.unwrap_or_default());
        work.iter_mut().for_each(|w| w.row.errors.push(msg.clone()));
        return Ok(());
    };

    pool.install(|| {
        work.par_iter_mut().filter(|w| w.psi_ok).for_each(|w| {
            let start = Instant::now();
            if let Err(e) = quantum_entry(ctx, &es, w) {
                w.row.errors.push(e);
            }
            w.seconds += start.elapsed().as_secs_f64();
        })
    });
    drop(es);

    if !(q.gate && ctx.has(Stage::EntropyCurve)) {
        return Ok(());
    }
    let big = trunc.enlarged(q.gate_step);
    let gate = eigensystem(model, big, &budget, "gate");
    reports.push(gate.report.clone());
    let Some(es) = gate.es else {
        let msg = format!("truncation gate: {}", gate.report.error.unwrap_or_default());
        work.iter_mut().filter(|w| w.row.s_max.is_some()).for_each(|w| w.row.errors.push(msg.clone()));
        return Ok(());
    };
    pool.install(|| {
        work.par_iter_mut().filter(|w| w.row.s_max.is_some()).for_each(|w| {
            let start = Instant::now();
            let x0 = w.row.phase_point().expect("resolved");
            let window = w.row.entropy_window.expect("entropy ran");
            let delta = coherent(model, &x0, &big).and_then(|(psi, _)| {
                entropy_curve(&es, &psi, window, q.dt_sample, q.subsystem).map_err(|e| e.to_string())
            });
            match delta {
                Ok(curve) => w.row.gate_delta = Some((curve.s_max - w.row.s_max.unwrap()).abs()),
                Err(e) => w.row.errors.push(format!("truncation gate: {e}")),
            }
            w.seconds += start.elapsed().as_secs_f64();
        })
    });
    Ok(())
}

fn quantum_entry(ctx: &Ctx<'_>, es: &EigenSystem<f64>, w: &mut EntryWork) -> Result<(), String> {
    let q = &ctx.settings.quantum;
    let x0 = w.row.phase_point().expect("resolved");
    let (psi, leakage) = coherent(&ctx.data.model, &x0, es.truncation()).map_err(|e| format!("coherent state: {e}"))?;
    w.row.leakage = Some(leakage);
    let index = w.row.index;
    if ctx.has(Stage::DensitySpectrum) {
        let ds = density_spectrum(es, &psi, q.density_floor).map_err(|e| format!("density-spectrum: {e}"))?;
        w.row.participation_ratio = Some(ds.participation_ratio);
        let f = write_file(&ctx.path(index, "density"), |f| ds.write_csv(f))
            .map_err(|e| format!("density-spectrum: {e}"))?;
        w.files.push(f);
    }
    if ctx.has(Stage::EntropyCurve) {
        let plateau =
            entropy_curve_plateau(es, &psi, q.t_max, q.dt_sample, q.subsystem, q.plateau_tol, q.max_doublings)
                .map_err(|e| format!("entropy-curve: {e}"))?;
        let curve = &plateau.curve;
        w.row.s_max = Some(curve.s_max);
        w.row.t_of_max = Some(curve.t_of_max);
        w.row.entropy_window = curve.times.last().copied();
        w.row.plateau_converged = Some(plateau.converged);
        let f = write_file(&ctx.path(index, "entropy"), |f| curve.write_csv(f))
            .map_err(|e| format!("entropy-curve: {e}"))?;
        w.files.push(f);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_tangent_is_unit_and_reproducible() {
        let a = seeded_tangent(7, 3);
        assert_eq!(a, seeded_tangent(7, 3));
        assert_ne!(a, seeded_tangent(7, 4));
        assert_ne!(a, seeded_tangent(8, 3));
        assert!((a.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn summary_record_layout() {
        let row = SummaryRow {
            dataset: "pe-regular".into(),
            index: 2,
            label: "A".into(),
            point: Some([1.0, 0.0, 0.5, 2.0]),
            energy: 58.0,
            s_max: Some(0.25),
            errors: vec!["x: boom".into()],
            ..SummaryRow::default()
        };
        let rec = row.record();
        assert_eq!(rec.len(), SUMMARY_HEADER.len());
        assert_eq!(rec[3], "1.0000000000000000e0");
        assert_eq!(rec[9], "2.5000000000000000e-1");
        assert_eq!(rec[10], "");
        assert_eq!(rec[20], "failed: x: boom");
    }
}
