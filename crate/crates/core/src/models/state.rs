use ndarray::ArrayView2;
use num_complex::Complex;

use super::BasisTruncation;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Normalization tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;

/// Normalized pure state over a truncated product basis, amplitudes stored
/// row-major as `psi[i1 * d2 + i2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    truncation: BasisTruncation,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> QuantumState<T> {
    /// Takes amplitudes that are already normalized (within [`NORM_TOL`]).
    pub fn new(truncation: BasisTruncation, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != truncation.dim() {
            return Err(Error::DimensionMismatch { expected: truncation.dim(), found: amplitudes.len() });
        }
        let state = Self { truncation, amplitudes };
        let norm = state.norm().to_f64().unwrap_or(f64::NAN);
        if !((norm - 1.0).abs() <= NORM_TOL.max(100.0 * T::epsilon_f64())) {
            return Err(Error::Input(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(truncation: BasisTruncation, mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != truncation.dim() {
            return Err(Error::DimensionMismatch { expected: truncation.dim(), found: amplitudes.len() });
        }
        let n2: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(n2 > T::zero()) || !n2.is_finite() {
            return Err(Error::Input("cannot normalize a zero state".into()));
        }
        let inv = T::one() / n2.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(Self { truncation, amplitudes })
    }

    /// `|a> (x) |b>` for factor vectors of lengths `d1`, `d2`.
    pub fn product(truncation: BasisTruncation, a: &[Complex<T>], b: &[Complex<T>]) -> Result<Self> {
        let (d1, d2) = truncation.dims();
        if a.len() != d1 || b.len() != d2 {
            return Err(Error::DimensionMismatch { expected: d1 * d2, found: a.len() * b.len() });
        }
        let amps = a.iter().flat_map(|x| b.iter().map(move |y| *x * *y)).collect();
        Self::normalized(truncation, amps)
    }

    /// Basis vector `|i1, i2>`.
    pub fn basis_state(truncation: BasisTruncation, i1: usize, i2: usize) -> Result<Self> {
        let (d1, d2) = truncation.dims();
        if i1 >= d1 || i2 >= d2 {
            return Err(Error::Input(format!("basis label ({i1}, {i2}) out of range")));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); d1 * d2];
        amps[truncation.index(i1, i2)] = Complex::new(T::one(), T::zero());
        Ok(Self { truncation, amplitudes: amps })
    }

    pub fn truncation(&self) -> &BasisTruncation {
        &self.truncation
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Amplitudes as a `d1 x d2` matrix.
    pub fn as_matrix(&self) -> ArrayView2<'_, Complex<T>> {
        ArrayView2::from_shape(self.truncation.dims(), &self.amplitudes).expect("amplitude count matches truncation")
    }

    /// Marginal occupation probabilities of tensor factor `factor` (0 or 1).
    pub fn marginal(&self, factor: usize) -> Vec<T> {
        let m = self.as_matrix();
        let axis = ndarray::Axis(1 - factor);
        m.map(|a| a.norm_sqr()).sum_axis(axis).to_vec()
    }

    /// Mean quantum number `sum_n n P(n)` of tensor factor `factor`.
    pub fn mean_number(&self, factor: usize) -> T {
        self.marginal(factor).iter().enumerate().map(|(n, p)| T::from_usize_lossy(n) * *p).sum()
    }

    /// Total probability on basis states in the outermost truncation shells.
    pub fn outer_shell_weight(&self) -> T {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let (a, b) = self.truncation.labels(*k);
                self.truncation.in_outer_shells(a, b)
            })
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}
