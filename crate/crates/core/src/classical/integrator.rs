//! Fixed-step schemes: a fourth-order Yoshida composition of velocity Verlet
//! for the separable oscillator Hamiltonian, classic RK4 for Jaynes-Cummings.
//!
//! The Jaynes-Cummings chart `(q1, p1)` degenerates at the pole
//! `q1^2 + p1^2 = 4J`, where the vector field blows up like `1/s`. Orbits
//! pass close to it, so RK4 runs on the regular variables
//! `(Jx, Jy, Jz, q2, p2)` with `Jx = sqrt(J) s q1`, `Jy = sqrt(J) s p1`,
//! `Jz = (q1^2 + p1^2)/2 - J`, where the equations are `dJ/dt = J x Omega`
//! and the chart is only used on input and output.

use crate::error::{Error, Result};
use crate::models::{JaynesCummings, ModelSpec, PhasePoint, PullenEdmonds};
use crate::scalar::Real;

/// Internal state. Oscillators: `(q1, p1, q2, p2, 0)`; Jaynes-Cummings:
/// `(Jx, Jy, Jz, q2, p2)`.
pub(crate) type State<T> = [T; 5];

#[derive(Debug, Clone, Copy)]
pub(crate) enum Scheme<T> {
    Yoshida(PullenEdmonds<T>),
    Rk4(JaynesCummings<T>),
}

/// Yoshida weights `w1 = 1/(2 - 2^{1/3})`, `w0 = 1 - 2 w1`.
fn yoshida_weights<T: Real>() -> (T, T) {
    let cbrt2 = T::lit(2.0).cbrt();
    let w1 = T::one() / (T::lit(2.0) - cbrt2);
    (w1, T::one() - T::lit(2.0) * w1)
}

impl<T: Real> Scheme<T> {
    pub(crate) fn for_model(model: &ModelSpec<T>) -> Self {
        match model {
            ModelSpec::PullenEdmonds(pe) => Scheme::Yoshida(*pe),
            ModelSpec::JaynesCummings(jc) => Scheme::Rk4(*jc),
        }
    }

    pub(crate) fn lift(&self, x: &PhasePoint<T>) -> Result<State<T>> {
        match self {
            Scheme::Yoshida(_) => {
                if !x.is_finite() {
                    return Err(Error::Domain(format!("non-finite phase point {x:?}")));
                }
                Ok([x.q1, x.p1, x.q2, x.p2, T::zero()])
            }
            Scheme::Rk4(jc) => {
                ModelSpec::JaynesCummings(*jc).check_domain(x)?;
                let j = jc.j();
                let r2 = x.q1 * x.q1 + x.p1 * x.p1;
                let s = (T::one() - r2 / (T::lit(4.0) * j)).sqrt();
                let a = j.sqrt() * s;
                Ok([a * x.q1, a * x.p1, r2 * T::lit(0.5) - j, x.q2, x.p2])
            }
        }
    }

    /// Tangent vector of the chart carried to the internal variables.
    pub(crate) fn lift_tangent(&self, x: &PhasePoint<T>, v: &[T; 4]) -> Result<State<T>> {
        match self {
            Scheme::Yoshida(_) => Ok([v[0], v[1], v[2], v[3], T::zero()]),
            Scheme::Rk4(jc) => {
                ModelSpec::JaynesCummings(*jc).check_domain(x)?;
                let j = jc.j();
                let sj = j.sqrt();
                let r2 = x.q1 * x.q1 + x.p1 * x.p1;
                let s = (T::one() - r2 / (T::lit(4.0) * j)).sqrt();
                let k = T::one() / (T::lit(4.0) * j * s);
                let (sq, sp) = (-x.q1 * k, -x.p1 * k);
                Ok([
                    sj * ((s + x.q1 * sq) * v[0] + x.q1 * sp * v[1]),
                    sj * (x.p1 * sq * v[0] + (s + x.p1 * sp) * v[1]),
                    x.q1 * v[0] + x.p1 * v[1],
                    v[2],
                    v[3],
                ])
            }
        }
    }

    pub(crate) fn chart(&self, y: &State<T>) -> Result<PhasePoint<T>> {
        match self {
            Scheme::Yoshida(_) => Ok(PhasePoint::new(y[0], y[1], y[2], y[3])),
            Scheme::Rk4(jc) => {
                // radius from Jz and direction from (Jx, Jy), so the point
                // stays inside the disc even when |J| has drifted slightly
                let j = jc.j();
                if !(y[2] < j) {
                    return Err(Error::Domain(format!(
                        "orbit reached the pole Jz = J (Jz = {}), where (q1, p1) is undefined",
                        y[2]
                    )));
                }
                let r = (T::lit(2.0) * (y[2] + j)).max(T::zero()).sqrt();
                let rho = (y[0] * y[0] + y[1] * y[1]).sqrt();
                let (c, s) = if rho > T::zero() { (y[0] / rho, y[1] / rho) } else { (T::one(), T::zero()) };
                Ok(PhasePoint::new(r * c, r * s, y[3], y[4]))
            }
        }
    }

    pub(crate) fn q2(&self, y: &State<T>) -> T {
        match self {
            Scheme::Yoshida(_) => y[2],
            Scheme::Rk4(_) => y[3],
        }
    }

    pub(crate) fn p2(&self, y: &State<T>) -> T {
        match self {
            Scheme::Yoshida(_) => y[3],
            Scheme::Rk4(_) => y[4],
        }
    }

    pub(crate) fn energy(&self, y: &State<T>) -> Result<T> {
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain(format!("non-finite state {y:?}")));
        }
        let half = T::lit(0.5);
        Ok(match self {
            Scheme::Yoshida(pe) => {
                let mw2 = pe.mass * pe.omega * pe.omega;
                (y[1] * y[1] + y[3] * y[3]) * half / pe.mass
                    + mw2 * (y[0] * y[0] + y[2] * y[2]) * half
                    + pe.lambda * y[0] * y[0] * y[2] * y[2]
            }
            Scheme::Rk4(jc) => {
                let (gp, gm) = (jc.g + jc.g_prime, jc.g - jc.g_prime);
                jc.omega * half * (y[3] * y[3] + y[4] * y[4])
                    + jc.epsilon * y[2]
                    + (gm * y[0] * y[3] + gp * y[1] * y[4]) / jc.j().sqrt()
            }
        })
    }

    /// Advances `y` by `h`.
    pub(crate) fn step(&self, y: &mut State<T>, h: T) -> Result<()> {
        match self {
            Scheme::Yoshida(pe) => {
                let (w1, w0) = yoshida_weights::<T>();
                let half = T::lit(0.5);
                let kicks = [w1 * half, (w1 + w0) * half, (w1 + w0) * half, w1 * half];
                let drifts = [w1, w0, w1];
                let inv_m = T::one() / pe.mass;
                let mw2 = pe.mass * pe.omega * pe.omega;
                let two_l = T::lit(2.0) * pe.lambda;
                let kick = |x: &mut State<T>, c: T| {
                    let (q1, q2) = (x[0], x[2]);
                    x[1] -= c * h * (mw2 * q1 + two_l * q1 * q2 * q2);
                    x[3] -= c * h * (mw2 * q2 + two_l * q2 * q1 * q1);
                };
                for k in 0..3 {
                    kick(y, kicks[k]);
                    y[0] += drifts[k] * h * y[1] * inv_m;
                    y[2] += drifts[k] * h * y[3] * inv_m;
                }
                kick(y, kicks[3]);
            }
            Scheme::Rk4(jc) => {
                let f = |y: &State<T>| jc_flow(jc, y);
                let k1 = f(y);
                let k2 = f(&axpy(y, h * T::lit(0.5), &k1));
                let k3 = f(&axpy(y, h * T::lit(0.5), &k2));
                let k4 = f(&axpy(y, h, &k3));
                for i in 0..5 {
                    y[i] += h / T::lit(6.0) * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]);
                }
            }
        }
        finite(y)
    }

    /// Advances `y` and a tangent vector `v` together by `h`, the tangent
    /// following the linearization of the same scheme.
    pub(crate) fn step_tangent(&self, y: &mut State<T>, v: &mut State<T>, h: T) -> Result<()> {
        match self {
            Scheme::Yoshida(pe) => {
                let (w1, w0) = yoshida_weights::<T>();
                let half = T::lit(0.5);
                let kicks = [w1 * half, (w1 + w0) * half, (w1 + w0) * half, w1 * half];
                let drifts = [w1, w0, w1];
                let inv_m = T::one() / pe.mass;
                let mw2 = pe.mass * pe.omega * pe.omega;
                let two_l = T::lit(2.0) * pe.lambda;
                // dp_i/dt depends on q only
                let kick = |x: &mut State<T>, v: &mut State<T>, c: T| {
                    let (q1, q2) = (x[0], x[2]);
                    let (h11, h33, h13) = (mw2 + two_l * q2 * q2, mw2 + two_l * q1 * q1, T::lit(2.0) * two_l * q1 * q2);
                    x[1] -= c * h * (mw2 * q1 + two_l * q1 * q2 * q2);
                    x[3] -= c * h * (mw2 * q2 + two_l * q2 * q1 * q1);
                    let (dv1, dv3) = (h11 * v[0] + h13 * v[2], h13 * v[0] + h33 * v[2]);
                    v[1] -= c * h * dv1;
                    v[3] -= c * h * dv3;
                };
                for k in 0..3 {
                    kick(y, v, kicks[k]);
                    y[0] += drifts[k] * h * y[1] * inv_m;
                    y[2] += drifts[k] * h * y[3] * inv_m;
                    v[0] += drifts[k] * h * v[1] * inv_m;
                    v[2] += drifts[k] * h * v[3] * inv_m;
                }
                kick(y, v, kicks[3]);
            }
            Scheme::Rk4(jc) => {
                let f = |y: &State<T>, w: &State<T>| (jc_flow(jc, y), jc_flow_linear(jc, y, w));
                let half = h * T::lit(0.5);
                let (a1, b1) = f(y, v);
                let (a2, b2) = f(&axpy(y, half, &a1), &axpy(v, half, &b1));
                let (a3, b3) = f(&axpy(y, half, &a2), &axpy(v, half, &b2));
                let (a4, b4) = f(&axpy(y, h, &a3), &axpy(v, h, &b3));
                let sixth = h / T::lit(6.0);
                for i in 0..5 {
                    y[i] += sixth * (a1[i] + T::lit(2.0) * (a2[i] + a3[i]) + a4[i]);
                    v[i] += sixth * (b1[i] + T::lit(2.0) * (b2[i] + b3[i]) + b4[i]);
                }
            }
        }
        finite(y)?;
        finite(v)
    }
}

fn finite<T: Real>(y: &State<T>) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain(format!("integration produced a non-finite state {y:?}")))
    }
}

/// `Omega = dH/dJ`.
#[inline]
fn omega_vec<T: Real>(jc: &JaynesCummings<T>, q2: T, p2: T) -> [T; 3] {
    let inv = T::one() / jc.j().sqrt();
    [(jc.g - jc.g_prime) * q2 * inv, (jc.g + jc.g_prime) * p2 * inv, jc.epsilon]
}

#[inline]
fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn jc_flow<T: Real>(jc: &JaynesCummings<T>, y: &State<T>) -> State<T> {
    let inv = T::one() / jc.j().sqrt();
    let (gp, gm) = (jc.g + jc.g_prime, jc.g - jc.g_prime);
    let dj = cross([y[0], y[1], y[2]], omega_vec(jc, y[3], y[4]));
    [dj[0], dj[1], dj[2], jc.omega * y[4] + gp * y[1] * inv, -(jc.omega * y[3] + gm * y[0] * inv)]
}

fn jc_flow_linear<T: Real>(jc: &JaynesCummings<T>, y: &State<T>, w: &State<T>) -> State<T> {
    let inv = T::one() / jc.j().sqrt();
    let (gp, gm) = (jc.g + jc.g_prime, jc.g - jc.g_prime);
    let a = cross([w[0], w[1], w[2]], omega_vec(jc, y[3], y[4]));
    let b = cross([y[0], y[1], y[2]], [gm * w[3] * inv, gp * w[4] * inv, T::zero()]);
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], jc.omega * w[4] + gp * w[1] * inv, -(jc.omega * w[3] + gm * w[0] * inv)]
}

#[inline]
fn axpy<T: Real>(x: &State<T>, a: T, y: &State<T>) -> State<T> {
    [x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2], x[3] + a * y[3], x[4] + a * y[4]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jc() -> JaynesCummings<f64> {
        JaynesCummings::natural(0.4, 0.25, 50).unwrap()
    }

    #[test]
    fn lift_and_chart_round_trip() {
        let s = Scheme::Rk4(jc());
        let x = PhasePoint::new(1.3, -4.2, 0.7, 5.1);
        let back = s.chart(&s.lift(&x).unwrap()).unwrap();
        assert!(x.distance(&back) < 1e-13);
        let m = ModelSpec::JaynesCummings(jc());
        assert!((s.energy(&s.lift(&x).unwrap()).unwrap() - m.energy(&x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn spin_flow_matches_chart_flow() {
        // d lift(x)/dt = D lift . chart flow
        let s = Scheme::Rk4(jc());
        let m = ModelSpec::JaynesCummings(jc());
        for x in [PhasePoint::new(1.3, -4.2, 0.7, 5.1), PhasePoint::new(-6.0, 2.0, -1.0, 0.3)] {
            let f = m.flow(&x).unwrap();
            let lhs = s.lift_tangent(&x, &f).unwrap();
            let rhs = jc_flow(&jc(), &s.lift(&x).unwrap());
            for i in 0..5 {
                assert!((lhs[i] - rhs[i]).abs() < 1e-12, "{i}: {lhs:?} vs {rhs:?}");
            }
        }
    }

    #[test]
    fn spin_linearization_matches_finite_difference() {
        let j = jc();
        let y = Scheme::Rk4(j).lift(&PhasePoint::new(1.3, -4.2, 0.7, 5.1)).unwrap();
        let w = [0.3, -0.2, 0.5, 0.1, -0.7];
        let eps = 1e-6;
        let fp = jc_flow(&j, &axpy(&y, eps, &w));
        let fm = jc_flow(&j, &axpy(&y, -eps, &w));
        let lin = jc_flow_linear(&j, &y, &w);
        for i in 0..5 {
            assert!(((fp[i] - fm[i]) / (2.0 * eps) - lin[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn chart_rejects_pole() {
        let s = Scheme::Rk4(jc());
        assert!(s.chart(&[0.0, 0.0, 25.0, 0.0, 1.0]).is_err());
    }
}
