//! Classical and quantum descriptions of the two bipartite models.
//!
//! Phase-space ordering is always `(q1, p1, q2, p2)`. For the oscillator pair
//! subsystem 1 is oscillator 1; for Jaynes-Cummings `(q1, p1)` parametrize the
//! collective atom (via its spin coherent state) and `(q2, p2)` the field.

mod basis;
mod coherent;
mod operator;
mod state;

pub use basis::{BasisTruncation, Subsystem};
pub use coherent::{
    coherent_state_with_leakage, glauber_amplitudes, initial_coherent_state, spin_coherent_amplitudes,
    LEAKAGE_THRESHOLD,
};
pub use operator::HERMITIAN_TOL;
pub use operator::{build_hamiltonian, HermitianOperator, MemoryBudget};
pub use state::{QuantumState, NORM_TOL};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Point `(q1, p1, q2, p2)` of the four-dimensional phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint<T> {
    pub q1: T,
    pub p1: T,
    pub q2: T,
    pub p2: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(q1: T, p1: T, q2: T, p2: T) -> Self {
        Self { q1, p1, q2, p2 }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.q1, self.p1, self.q2, self.p2]
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Same positions, momenta reversed.
    pub fn time_reversed(self) -> Self {
        Self::new(self.q1, -self.p1, self.q2, -self.p2)
    }

    pub fn distance(&self, other: &Self) -> T {
        self.to_array().iter().zip(other.to_array()).map(|(a, b)| (*a - b) * (*a - b)).sum::<T>().sqrt()
    }
}

/// `H = (p1^2 + p2^2)/2m + m w^2 (q1^2 + q2^2)/2 + lambda q1^2 q2^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullenEdmonds<T> {
    pub mass: T,
    pub omega: T,
    pub lambda: T,
}

impl<T: Real> PullenEdmonds<T> {
    pub fn new(mass: T, omega: T, lambda: T) -> Result<Self> {
        if !(mass > T::zero() && omega > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Pullen-Edmonds needs m > 0, omega > 0, finite lambda (got m={mass}, omega={omega}, lambda={lambda})"
            )));
        }
        Ok(Self { mass, omega, lambda })
    }

    /// `m = omega = hbar = 1`.
    pub fn natural(lambda: T) -> Self {
        Self { mass: T::one(), omega: T::one(), lambda }
    }
}

/// Generalized Jaynes-Cummings model with `2J` two-level atoms:
/// `H = w a†a + eps Jz + G/sqrt(2J) (a J+ + a† J-) + G'/sqrt(2J) (a† J+ + a J-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JaynesCummings<T> {
    pub omega: T,
    pub epsilon: T,
    pub g: T,
    pub g_prime: T,
    /// Twice the collective spin, i.e. the number of atoms.
    pub two_j: u32,
}

impl<T: Real> JaynesCummings<T> {
    pub fn new(omega: T, epsilon: T, g: T, g_prime: T, two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidParameter("J must be positive".into()));
        }
        if ![omega, epsilon, g, g_prime].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Jaynes-Cummings coupling".into()));
        }
        Ok(Self { omega, epsilon, g, g_prime, two_j })
    }

    /// `omega = epsilon = 1`.
    pub fn natural(g: T, g_prime: T, two_j: u32) -> Result<Self> {
        Self::new(T::one(), T::one(), g, g_prime, two_j)
    }

    pub fn j(&self) -> T {
        T::from_u32(self.two_j).unwrap() / T::lit(2.0)
    }

    /// `sqrt(1 - (q1^2 + p1^2) / 4J)`, or a domain error outside the disc.
    fn shrink(&self, q1: T, p1: T) -> Result<T> {
        let four_j = T::lit(4.0) * self.j();
        let r2 = q1 * q1 + p1 * p1;
        if !(r2 < four_j) {
            return Err(Error::Domain(format!("q1^2 + p1^2 = {r2} must be below 4J = {four_j}")));
        }
        Ok((T::one() - r2 / four_j).sqrt())
    }
}

/// The model selection: exactly one parameter bundle is active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec<T> {
    PullenEdmonds(PullenEdmonds<T>),
    JaynesCummings(JaynesCummings<T>),
}

impl<T: Real> From<PullenEdmonds<T>> for ModelSpec<T> {
    fn from(m: PullenEdmonds<T>) -> Self {
        ModelSpec::PullenEdmonds(m)
    }
}

impl<T: Real> From<JaynesCummings<T>> for ModelSpec<T> {
    fn from(m: JaynesCummings<T>) -> Self {
        ModelSpec::JaynesCummings(m)
    }
}

/// 4x4 matrix indexed `[row][col]` in `(q1, p1, q2, p2)` order.
pub type Matrix4<T> = [[T; 4]; 4];

impl<T: Real> ModelSpec<T> {
    pub fn check_domain(&self, x: &PhasePoint<T>) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("non-finite phase point {x:?}")));
        }
        if let ModelSpec::JaynesCummings(jc) = self {
            jc.shrink(x.q1, x.p1)?;
        }
        Ok(())
    }

    pub fn energy(&self, x: &PhasePoint<T>) -> Result<T> {
        let half = T::lit(0.5);
        match self {
            ModelSpec::PullenEdmonds(pe) => {
                x.is_finite().then_some(()).ok_or_else(|| Error::Domain(format!("non-finite phase point {x:?}")))?;
                let mw2 = pe.mass * pe.omega * pe.omega;
                Ok((x.p1 * x.p1 + x.p2 * x.p2) * half / pe.mass
                    + mw2 * (x.q1 * x.q1 + x.q2 * x.q2) * half
                    + pe.lambda * x.q1 * x.q1 * x.q2 * x.q2)
            }
            ModelSpec::JaynesCummings(jc) => {
                let s = jc.shrink(x.q1, x.p1)?;
                let (gp, gm) = (jc.g + jc.g_prime, jc.g - jc.g_prime);
                Ok(jc.omega * half * (x.q2 * x.q2 + x.p2 * x.p2)
                    + jc.epsilon * half * (x.q1 * x.q1 + x.p1 * x.p1 - T::lit(2.0) * jc.j())
                    + s * (gp * x.p1 * x.p2 + gm * x.q1 * x.q2))
            }
        }
    }

    /// `(dH/dq1, dH/dp1, dH/dq2, dH/dp2)`.
    pub fn gradient(&self, x: &PhasePoint<T>) -> Result<[T; 4]> {
        self.check_domain(x)?;
        Ok(match self {
            ModelSpec::PullenEdmonds(pe) => {
                let mw2 = pe.mass * pe.omega * pe.omega;
                let two_l = T::lit(2.0) * pe.lambda;
                [
                    mw2 * x.q1 + two_l * x.q1 * x.q2 * x.q2,
                    x.p1 / pe.mass,
                    mw2 * x.q2 + two_l * x.q2 * x.q1 * x.q1,
                    x.p2 / pe.mass,
                ]
            }
            ModelSpec::JaynesCummings(jc) => {
                let s = jc.shrink(x.q1, x.p1)?;
                let k = T::one() / (T::lit(4.0) * jc.j());
                let (gp, gm) = (jc.g + jc.g_prime, jc.g - jc.g_prime);
                let c = gp * x.p1 * x.p2 + gm * x.q1 * x.q2;
                [
                    jc.epsilon * x.q1 - k * x.q1 / s * c + s * gm * x.q2,
                    jc.epsilon * x.p1 - k * x.p1 / s * c + s * gp * x.p2,
                    jc.omega * x.q2 + s * gm * x.q1,
                    jc.omega * x.p2 + s * gp * x.p1,
                ]
            }
        })
    }

    /// Second derivatives of `H`, symmetric.
    pub fn hessian(&self, x: &PhasePoint<T>) -> Result<Matrix4<T>> {
        self.check_domain(x)?;
        let z = T::zero();
        let mut h = [[z; 4]; 4];
        match self {
            ModelSpec::PullenEdmonds(pe) => {
                let mw2 = pe.mass * pe.omega * pe.omega;
                let two_l = T::lit(2.0) * pe.lambda;
                h[0][0] = mw2 + two_l * x.q2 * x.q2;
                h[2][2] = mw2 + two_l * x.q1 * x.q1;
                h[0][2] = T::lit(2.0) * two_l * x.q1 * x.q2;
                h[2][0] = h[0][2];
                h[1][1] = T::one() / pe.mass;
                h[3][3] = T::one() / pe.mass;
            }
            ModelSpec::JaynesCummings(jc) => {
                let s = jc.shrink(x.q1, x.p1)?;
                let k = T::one() / (T::lit(4.0) * jc.j());
                let (gp, gm) = (jc.g + jc.g_prime, jc.g - jc.g_prime);
                let c = gp * x.p1 * x.p2 + gm * x.q1 * x.q2;
                // derivatives of the shrink factor s(q1, p1) and of c
                let a = [x.q1, x.p1];
                let ds = [-k * x.q1 / s, -k * x.p1 / s, z, z];
                let dc = [gm * x.q2, gp * x.p2, gm * x.q1, gp * x.p1];
                let mut dds = [[z; 4]; 4];
                for i in 0..2 {
                    for j in 0..2 {
                        let delta = if i == j { k / s } else { z };
                        dds[i][j] = -delta - k * k * a[i] * a[j] / (s * s * s);
                    }
                }
                let mut ddc = [[z; 4]; 4];
                ddc[0][2] = gm;
                ddc[2][0] = gm;
                ddc[1][3] = gp;
                ddc[3][1] = gp;
                for i in 0..4 {
                    for j in 0..4 {
                        h[i][j] = dds[i][j] * c + ds[i] * dc[j] + ds[j] * dc[i] + s * ddc[i][j];
                    }
                }
                h[0][0] += jc.epsilon;
                h[1][1] += jc.epsilon;
                h[2][2] += jc.omega;
                h[3][3] += jc.omega;
            }
        }
        Ok(h)
    }

    /// Hamilton's equations: `(dH/dp1, -dH/dq1, dH/dp2, -dH/dq2)`.
    pub fn flow(&self, x: &PhasePoint<T>) -> Result<[T; 4]> {
        let g = self.gradient(x)?;
        Ok([g[1], -g[0], g[3], -g[2]])
    }

    /// Jacobian of [`ModelSpec::flow`] with respect to `(q1, p1, q2, p2)`.
    pub fn flow_jacobian(&self, x: &PhasePoint<T>) -> Result<Matrix4<T>> {
        let h = self.hessian(x)?;
        Ok([h[1], h[0].map(|v| -v), h[3], h[2].map(|v| -v)])
    }

    /// The `p2 > 0` at which `energy(q1, p1, q2, p2) = e`.
    ///
    /// For Jaynes-Cummings the energy is quadratic in `p2`; when both roots
    /// are positive the larger one is returned.
    pub fn solve_p2(&self, q1: T, p1: T, q2: T, e: T) -> Result<T> {
        let infeasible = || Error::InfeasibleEnergy { energy: e.to_f64().unwrap_or(f64::NAN) };
        match self {
            ModelSpec::PullenEdmonds(pe) => {
                let rest = self.energy(&PhasePoint::new(q1, p1, q2, T::zero()))?;
                let p2_sq = T::lit(2.0) * pe.mass * (e - rest);
                if !(p2_sq > T::zero()) {
                    return Err(infeasible());
                }
                Ok(p2_sq.sqrt())
            }
            ModelSpec::JaynesCummings(jc) => {
                let s = jc.shrink(q1, p1)?;
                let (gp, gm) = (jc.g + jc.g_prime, jc.g - jc.g_prime);
                let half = T::lit(0.5);
                let a = jc.omega * half;
                let b = s * gp * p1;
                let c = jc.omega * half * q2 * q2
                    + jc.epsilon * half * (q1 * q1 + p1 * p1 - T::lit(2.0) * jc.j())
                    + s * gm * q1 * q2
                    - e;
                let disc = b * b - T::lit(4.0) * a * c;
                if disc < T::zero() || a <= T::zero() {
                    return Err(infeasible());
                }
                // larger root, computed without cancellation
                let sq = disc.sqrt();
                let root = if b <= T::zero() { (-b + sq) / (T::lit(2.0) * a) } else { -T::lit(2.0) * c / (b + sq) };
                if root > T::zero() && root.is_finite() {
                    Ok(root)
                } else {
                    Err(infeasible())
                }
            }
        }
    }
}
