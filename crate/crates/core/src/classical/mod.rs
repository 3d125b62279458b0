//! Classical trajectories, Poincaré sections and maximal Lyapunov exponents.

mod integrator;
mod lyapunov;
mod section;

pub use lyapunov::{lyapunov_max, lyapunov_max_from, lyapunov_max_with, DEFAULT_RENORM_INTERVAL};
pub use section::{poincare_section, SectionCondition, SectionPoints, SECTION_TOL};

use std::io::Write;

use crate::error::{Error, Result};
use crate::io::fmt_float;
use crate::models::{ModelSpec, PhasePoint};
use crate::scalar::Real;
use integrator::{Scheme, State};

/// Default relative energy drift allowed along a trajectory.
pub const DEFAULT_DRIFT_BUDGET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Largest `|E(t) - E0| / |E0|` accepted at any step (absolute drift
    /// when `E0 = 0`).
    pub drift_budget: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { drift_budget: DEFAULT_DRIFT_BUDGET }
    }
}

/// Tracks energy drift against the initial energy.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DriftMonitor<T> {
    scheme: Scheme<T>,
    energy0: T,
    scale: f64,
    budget: f64,
    pub(crate) worst: f64,
}

impl<T: Real> DriftMonitor<T> {
    pub(crate) fn new(scheme: &Scheme<T>, y0: &State<T>, budget: f64) -> Result<Self> {
        let energy0 = scheme.energy(y0)?;
        let e = energy0.to_f64().unwrap_or(f64::NAN);
        let scale = if e != 0.0 { e.abs() } else { 1.0 };
        Ok(Self { scheme: *scheme, energy0, scale, budget, worst: 0.0 })
    }

    pub(crate) fn check(&mut self, y: &State<T>, t: T) -> Result<()> {
        let e = self.scheme.energy(y)?;
        let drift = ((e - self.energy0).to_f64().unwrap_or(f64::NAN)).abs() / self.scale;
        self.worst = self.worst.max(drift);
        if !(drift <= self.budget) {
            return Err(Error::IntegrationQuality { drift, budget: self.budget, time: t.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(())
    }
}

pub(crate) fn step_count<T: Real>(t_max: T, dt: T) -> Result<usize> {
    if !(dt > T::zero()) || !(t_max >= dt) || !t_max.is_finite() {
        return Err(Error::Input(format!("need dt > 0 and t_max >= dt (dt={dt}, t_max={t_max})")));
    }
    let n = (t_max / dt).to_f64().unwrap();
    // tolerate t_max that is an integer multiple of dt up to rounding
    Ok((n - 1e-9 * n.max(1.0)).ceil() as usize)
}

/// Uniformly sampled classical orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub model: ModelSpec<T>,
    /// Integration step.
    pub dt: T,
    /// Integration steps between stored samples.
    pub sample_stride: usize,
    /// `samples[k]` is the state at `t = k * dt * sample_stride`.
    pub samples: Vec<PhasePoint<T>>,
    pub energy0: T,
    /// Largest relative energy drift seen over the whole run.
    pub max_drift: f64,
}

impl<T: Real> Trajectory<T> {
    pub fn sample_interval(&self) -> T {
        self.dt * T::from_usize_lossy(self.sample_stride)
    }

    pub fn time(&self, k: usize) -> T {
        T::from_usize_lossy(k) * self.sample_interval()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn q1(&self) -> Vec<T> {
        self.samples.iter().map(|x| x.q1).collect()
    }

    pub fn q2(&self) -> Vec<T> {
        self.samples.iter().map(|x| x.q2).collect()
    }

    /// Relative energy drift at every stored sample.
    pub fn drifts(&self) -> Result<Vec<f64>> {
        let e0 = self.energy0.to_f64().unwrap();
        let scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
        self.samples.iter().map(|x| Ok((self.model.energy(x)?.to_f64().unwrap() - e0).abs() / scale)).collect()
    }

    /// CSV with header `t,q1,p1,q2,p2`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,q1,p1,q2,p2")?;
        for (k, x) in self.samples.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_float(self.time(k)),
                fmt_float(x.q1),
                fmt_float(x.p1),
                fmt_float(x.q2),
                fmt_float(x.p2)
            )?;
        }
        Ok(())
    }
}

/// Integrates Hamilton's equations from `x0` over `[0, t_max]` with step
/// `dt`, keeping every `sample_stride`-th state.
///
/// Oscillators use the symplectic fourth-order composition; Jaynes-Cummings
/// uses RK4. Either way the run fails once the relative energy drift exceeds
/// the default budget of `1e-8`.
pub fn integrate<T: Real>(
    model: &ModelSpec<T>,
    x0: &PhasePoint<T>,
    dt: T,
    t_max: T,
    sample_stride: usize,
) -> Result<Trajectory<T>> {
    integrate_with(model, x0, dt, t_max, sample_stride, &IntegrationOptions::default())
}

pub fn integrate_with<T: Real>(
    model: &ModelSpec<T>,
    x0: &PhasePoint<T>,
    dt: T,
    t_max: T,
    sample_stride: usize,
    opts: &IntegrationOptions,
) -> Result<Trajectory<T>> {
    if sample_stride == 0 {
        return Err(Error::Input("sample_stride must be positive".into()));
    }
    let steps = step_count(t_max, dt)?;
    let scheme = Scheme::for_model(model);
    let mut y = scheme.lift(x0)?;
    let mut monitor = DriftMonitor::new(&scheme, &y, opts.drift_budget)?;
    let mut samples = Vec::with_capacity(steps / sample_stride + 1);
    samples.push(*x0);
    for k in 1..=steps {
        scheme.step(&mut y, dt)?;
        monitor.check(&y, T::from_usize_lossy(k) * dt)?;
        if k % sample_stride == 0 {
            samples.push(scheme.chart(&y)?);
        }
    }
    Ok(Trajectory { model: *model, dt, sample_stride, samples, energy0: monitor.energy0, max_drift: monitor.worst })
}
