use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcorr::config::{ExperimentConfig, Stage, TruncationSpec};
use qcorr::datasets::{load_cics, DatasetId};
use qcorr::error::{PipelineError, PipelineResult};
use qcorr::experiment::run_experiment;

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Classical and quantum correspondence runs over the bundled CICS datasets")]
struct Cli {
    /// Output directory (overrides the config file).
    #[arg(long, global = true)]
    outdir: Option<PathBuf>,
    /// Worker threads for entry-level parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the bundled datasets.
    ListDatasets,
    /// Print the entries of a dataset with their completed phase points.
    ShowCics { id: String },
    /// Trajectories, Poincare sections and Lyapunov exponents.
    Classical {
        #[command(flatten)]
        sel: Selection,
        /// Comma-separated subset of trajectory,poincare,lyapunov.
        #[arg(long, value_delimiter = ',', default_value = "poincare,lyapunov")]
        stages: Vec<String>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        section_t_max: Option<f64>,
        #[arg(long)]
        lyapunov_t_max: Option<f64>,
    },
    /// Power spectra, spectral lines and frequency entropy.
    Spectrum {
        #[command(flatten)]
        sel: Selection,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        dt_sample: Option<f64>,
        /// hann or none.
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        rel_threshold: Option<f64>,
    },
    /// Entanglement entropy curves and eigenstate populations.
    Quantum {
        #[command(flatten)]
        sel: Selection,
        /// Triangular oscillator cutoff n1 + n2 <= N.
        #[arg(long, conflicts_with = "n_ph_max")]
        n_max: Option<usize>,
        /// Photon cutoff for Jaynes-Cummings datasets.
        #[arg(long)]
        n_ph_max: Option<usize>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        dt_sample: Option<f64>,
        #[arg(long)]
        max_doublings: Option<usize>,
        /// Skip the enlarged-truncation comparison.
        #[arg(long)]
        no_gate: bool,
    },
    /// Run a JSON experiment config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct Selection {
    #[arg(long)]
    dataset: String,
    /// Comma-separated 1-based entry indices; all when omitted.
    #[arg(long, value_delimiter = ',')]
    entries: Option<Vec<usize>>,
}

impl Selection {
    fn config(&self, stages: Vec<Stage>) -> PipelineResult<ExperimentConfig> {
        let mut c = ExperimentConfig::new(self.dataset.parse()?, stages);
        c.entries = self.entries.clone();
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(failed) if failed > 0 => {
            eprintln!("{failed} entries failed; see manifest.json");
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> PipelineResult<usize> {
    let mut config = match cli.command {
        Command::ListDatasets => {
            for id in DatasetId::ALL {
                let data = load_cics(id)?;
                println!("{:<11} {:>3} entries  E = {:<10}  {}", id.name(), data.len(), data.energy, id.description());
            }
            return Ok(0);
        }
        Command::ShowCics { id } => {
            show_cics(id.parse()?)?;
            return Ok(0);
        }
        Command::Classical { sel, stages, dt, t_max, section_t_max, lyapunov_t_max } => {
            let stages = stages.iter().map(|s| s.parse()).collect::<PipelineResult<Vec<Stage>>>()?;
            if let Some(bad) =
                stages.iter().find(|s| !matches!(s, Stage::Trajectory | Stage::Poincare | Stage::Lyapunov))
            {
                return Err(PipelineError::Config(format!("'{}' is not a classical stage", bad.name())));
            }
            let mut c = sel.config(stages)?;
            c.classical.dt = dt;
            c.classical.t_max = t_max;
            c.classical.section_t_max = section_t_max;
            c.classical.lyapunov_t_max = lyapunov_t_max;
            c
        }
        Command::Spectrum { sel, dt, t_max, dt_sample, window, rel_threshold } => {
            let mut c = sel.config(vec![Stage::Spectrum, Stage::Lyapunov, Stage::FreqEntropy])?;
            c.classical.dt = dt;
            c.classical.t_max = t_max;
            c.classical.dt_sample = dt_sample;
            c.spectral.window = window;
            c.spectral.rel_threshold = rel_threshold;
            c
        }
        Command::Quantum { sel, n_max, n_ph_max, t_max, dt_sample, max_doublings, no_gate } => {
            let mut c = sel.config(vec![Stage::EntropyCurve, Stage::DensitySpectrum])?;
            c.quantum.truncation = match (n_max, n_ph_max) {
                (Some(n_max), _) => Some(TruncationSpec::Triangular { n_max }),
                (None, Some(n_ph_max)) => Some(TruncationSpec::Photon { n_ph_max }),
                _ => None,
            };
            c.quantum.t_max = t_max;
            c.quantum.dt_sample = dt_sample;
            c.quantum.max_doublings = max_doublings;
            c.quantum.gate = no_gate.then_some(false);
            c
        }
        Command::Experiment { config } => ExperimentConfig::from_file(&config)?,
    };
    if let Some(dir) = cli.outdir {
        config.outdir = dir;
    }
    if let Some(w) = cli.workers {
        config.workers = w;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    let outcome = run_experiment(&config)?;
    println!("{} entries, {} failed; summary {}", outcome.rows.len(), outcome.failed(), outcome.summary_path.display());
    Ok(outcome.failed())
}

fn show_cics(id: DatasetId) -> PipelineResult<()> {
    let data = load_cics(id)?;
    println!("# {}: {} entries, E = {}, coordinates scaled by {}", id, data.len(), data.energy, data.scale);
    println!("index,label,q1,p1,q2,p2,note");
    for e in &data.entries {
        match data.resolve(e) {
            Ok(r) => {
                let p = r.point;
                let note = if r.p1_adjusted { "p1 moved by half a printed digit" } else { "" };
                println!("{},{},{},{},{},{},{}", e.index, e.label, p.q1, p.p1, p.q2, p.p2, note);
            }
            Err(err) => println!("{},{},{},{},{},,{}", e.index, e.label, e.q1, e.p1, e.q2, err),
        }
    }
    Ok(())
}
