use std::io::Write;

use super::integrator::{Scheme, State};
use super::{step_count, DriftMonitor, DEFAULT_DRIFT_BUDGET};
use crate::error::{Error, Result};
use crate::io::fmt_float;
use crate::models::{ModelSpec, PhasePoint};
use crate::scalar::Real;

/// Largest accepted `|q2(t*) - value|` at a stored crossing.
pub const SECTION_TOL: f64 = 1e-9;

const MAX_REFINE: usize = 60;

/// The surface `q2 = value`, crossed with `p2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionCondition<T> {
    pub value: T,
}

impl<T: Real> SectionCondition<T> {
    pub fn q2(value: T) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("section value must be finite, got {value}")));
        }
        Ok(Self { value })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SectionPoints<T> {
    /// `(q1, p1)` at each refined crossing.
    pub points: Vec<(T, T)>,
    pub crossing_times: Vec<T>,
    /// Full phase point at each crossing, useful for checking the condition.
    pub states: Vec<PhasePoint<T>>,
}

impl<T: Real> SectionPoints<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with header `t_cross,q1,p1`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t_cross,q1,p1")?;
        for (t, (q1, p1)) in self.crossing_times.iter().zip(&self.points) {
            writeln!(w, "{},{},{}", fmt_float(*t), fmt_float(*q1), fmt_float(*p1))?;
        }
        Ok(())
    }
}

/// Collects the crossings of `cond` along the orbit of `x0` over `[0, t_max]`.
///
/// A crossing is bracketed by a sign change of `q2 - value` between two
/// steps, then located by Illinois-modified secant iteration on the length
/// of a partial step taken from the earlier state.
pub fn poincare_section<T: Real>(
    model: &ModelSpec<T>,
    x0: &PhasePoint<T>,
    cond: &SectionCondition<T>,
    t_max: T,
    dt: T,
) -> Result<SectionPoints<T>> {
    let steps = step_count(t_max, dt)?;
    let scheme = Scheme::for_model(model);
    let mut x = scheme.lift(x0)?;
    let mut monitor = DriftMonitor::new(&scheme, &x, DEFAULT_DRIFT_BUDGET)?;
    let mut out = SectionPoints::default();
    let mut f_prev = scheme.q2(&x) - cond.value;
    for k in 0..steps {
        let t = T::from_usize_lossy(k) * dt;
        let prev = x;
        scheme.step(&mut x, dt)?;
        monitor.check(&x, t + dt)?;
        let f = scheme.q2(&x) - cond.value;
        if (f_prev < T::zero()) != (f < T::zero()) {
            let (h, y) = refine(&scheme, &prev, f_prev, f, dt, cond.value)?;
            if scheme.p2(&y) > T::zero() {
                let p = scheme.chart(&y)?;
                out.points.push((p.q1, p.p1));
                out.crossing_times.push(t + h);
                out.states.push(p);
            }
        }
        f_prev = f;
    }
    Ok(out)
}

fn refine<T: Real>(scheme: &Scheme<T>, start: &State<T>, fa: T, fb: T, dt: T, value: T) -> Result<(T, State<T>)> {
    let tol = T::lit(SECTION_TOL * 1e-3);
    let (mut a, mut b, mut fa, mut fb) = (T::zero(), dt, fa, fb);
    let mut side = 0i8;
    let mut best = (b, fb.abs());
    for _ in 0..MAX_REFINE {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a && c < b { c } else { (a + b) * T::lit(0.5) };
        let mut y = *start;
        scheme.step(&mut y, c)?;
        let fc = scheme.q2(&y) - value;
        if fc.abs() < best.1 {
            best = (c, fc.abs());
        }
        if fc.abs() <= tol || b - a <= T::epsilon() * dt {
            return Ok((c, y));
        }
        if (fc < T::zero()) == (fb < T::zero()) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= T::lit(0.5);
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= T::lit(0.5);
            }
            side = 1;
        }
    }
    let mut y = *start;
    scheme.step(&mut y, best.0)?;
    Ok((best.0, y))
}
