use std::io::Write;

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::io::fmt_float;
use crate::linalg::{eigh_hermitian, eigvalsh_symmetric};
use crate::models::{QuantumState, Subsystem};
use crate::scalar::Real;

/// Reduced eigenvalues below zero but above this are treated as rounding.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity<T> {
    pub matrix: Array2<Complex<T>>,
    pub subsystem: Subsystem,
}

impl<T: Real> ReducedDensity<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.diag().iter().copied().sum()
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> T {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        if self.matrix.iter().all(|z| z.im == T::zero()) {
            eigvalsh_symmetric(self.matrix.mapv(|z| z.re).view())
        } else {
            Ok(eigh_hermitian(self.matrix.view(), false)?.0)
        }
    }

    /// CSV with header `row,col,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "row,col,re,im")?;
        for ((i, j), z) in self.matrix.indexed_iter() {
            writeln!(w, "{i},{j},{},{}", fmt_float(z.re), fmt_float(z.im))?;
        }
        Ok(())
    }
}

/// Partial trace over the complement of `subsystem`:
/// `rho[i, i'] = sum_j psi[i, j] conj(psi[i', j])`.
pub fn reduced_density<T: Real>(psi: &QuantumState<T>, subsystem: Subsystem) -> Result<ReducedDensity<T>> {
    let factor = psi.truncation().factor_of(subsystem)?;
    let m = psi.as_matrix();
    let m = if factor == 0 { m } else { m.reversed_axes() };
    Ok(ReducedDensity { matrix: gram(&m.mapv(|z| z.re), &m.mapv(|z| z.im)), subsystem })
}

/// `M M^dagger` for `M = A + iB`, via real products.
pub(crate) fn gram<T: Real>(a: &Array2<T>, b: &Array2<T>) -> Array2<Complex<T>> {
    let re = a.dot(&a.t()) + b.dot(&b.t());
    let im = b.dot(&a.t()) - a.dot(&b.t());
    ndarray::Zip::from(&re).and(&im).map_collect(|r, i| Complex::new(*r, *i))
}

/// `-sum(l ln l)` over the eigenvalues of `rho`, in nats.
///
/// Eigenvalues are clamped to `[0, 1]`; one below `-1e-8` means the input is
/// not a density matrix.
pub fn von_neumann_entropy<T: Real>(rho: &ReducedDensity<T>) -> Result<T> {
    entropy_of_spectrum(&rho.eigenvalues()?)
}

pub(crate) fn entropy_of_spectrum<T: Real>(eigenvalues: &[T]) -> Result<T> {
    let mut s = T::zero();
    for &l in eigenvalues {
        if l < -T::lit(NEGATIVE_EIGENVALUE_TOL) {
            return Err(Error::InvalidDensity { eigenvalue: l.to_f64().unwrap_or(f64::NAN) });
        }
        let l = l.max(T::zero()).min(T::one());
        if l > T::zero() {
            s -= l * l.ln();
        }
    }
    Ok(s)
}
