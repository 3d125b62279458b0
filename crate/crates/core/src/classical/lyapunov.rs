use super::integrator::{Scheme, State};
use super::{step_count, DriftMonitor, IntegrationOptions};
use crate::error::{Error, Result};
use crate::models::{ModelSpec, PhasePoint};
use crate::scalar::Real;

pub const DEFAULT_RENORM_INTERVAL: f64 = 1.0;

/// Maximal Lyapunov exponent by the Benettin method with the default drift
/// budget.
pub fn lyapunov_max<T: Real>(
    model: &ModelSpec<T>,
    x0: &PhasePoint<T>,
    t_max: T,
    dt: T,
    renorm_interval: T,
) -> Result<T> {
    lyapunov_max_with(model, x0, t_max, dt, renorm_interval, &IntegrationOptions::default())
}

/// A unit tangent vector is carried along by the linearized scheme and
/// renormalized every `renorm_interval`; the result is `sum(ln r_i) / t`.
pub fn lyapunov_max_with<T: Real>(
    model: &ModelSpec<T>,
    x0: &PhasePoint<T>,
    t_max: T,
    dt: T,
    renorm_interval: T,
    opts: &IntegrationOptions,
) -> Result<T> {
    let half = T::lit(0.5);
    lyapunov_max_from(model, x0, t_max, dt, renorm_interval, opts, [half; 4])
}

/// As [`lyapunov_max_with`], starting from the tangent vector `tangent0`.
pub fn lyapunov_max_from<T: Real>(
    model: &ModelSpec<T>,
    x0: &PhasePoint<T>,
    t_max: T,
    dt: T,
    renorm_interval: T,
    opts: &IntegrationOptions,
    tangent0: [T; 4],
) -> Result<T> {
    if !(renorm_interval >= dt) {
        return Err(Error::Input(format!("renorm_interval ({renorm_interval}) must be at least dt ({dt})")));
    }
    let steps = step_count(t_max, dt)?;
    let every = (renorm_interval / dt).round().to_usize().unwrap_or(1).max(1);
    let scheme = Scheme::for_model(model);
    let mut x = scheme.lift(x0)?;
    let mut monitor = DriftMonitor::new(&scheme, &x, opts.drift_budget)?;
    let mut v = scheme.lift_tangent(x0, &tangent0)?;
    let n0 = v.iter().map(|c| *c * *c).sum::<T>().sqrt();
    if !(n0 > T::zero()) || !n0.is_finite() {
        return Err(Error::Input("initial tangent vector must be finite and non-zero".into()));
    }
    v.iter_mut().for_each(|c| *c /= n0);
    let mut log_sum = T::zero();
    let renorm = |v: &mut State<T>, log_sum: &mut T| -> Result<()> {
        let r = v.iter().map(|c| *c * *c).sum::<T>().sqrt();
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::Domain(format!("tangent vector degenerated (norm {r})")));
        }
        *log_sum += r.ln();
        v.iter_mut().for_each(|c| *c /= r);
        Ok(())
    };
    for k in 1..=steps {
        scheme.step_tangent(&mut x, &mut v, dt)?;
        monitor.check(&x, T::from_usize_lossy(k) * dt)?;
        if k % every == 0 || k == steps {
            renorm(&mut v, &mut log_sum)?;
        }
    }
    Ok(log_sum / (T::from_usize_lossy(steps) * dt))
}
