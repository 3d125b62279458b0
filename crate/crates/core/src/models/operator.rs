use ndarray::Array2;
use num_complex::Complex;

use super::{BasisTruncation, ModelSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hermiticity tolerance for operators, entrywise.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Size limits for quantum calculations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget {
    /// Largest product-basis dimension a Hamiltonian may be built on.
    pub max_dim: usize,
    /// Largest symmetry block diagonalized as a dense matrix.
    pub max_block_dim: usize,
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self { max_dim: 120_000, max_block_dim: 10_000 }
    }
}

/// Hermitian operator on a truncated product basis, stored by rows.
///
/// Both models produce operators with a handful of nonzeros per row, so
/// storage is sparse; [`HermitianOperator::to_dense`] materializes it.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T> {
    truncation: BasisTruncation,
    rows: Vec<Vec<(usize, Complex<T>)>>,
}

impl<T: Real> HermitianOperator<T> {
    /// Assembles an operator from `(row, col, value)` triplets; duplicates are
    /// summed. Hermiticity is not checked here (see [`Self::hermiticity_defect`]).
    pub fn from_triplets(
        truncation: BasisTruncation,
        triplets: impl IntoIterator<Item = (usize, usize, Complex<T>)>,
    ) -> Result<Self> {
        let dim = truncation.dim();
        let mut rows: Vec<Vec<(usize, Complex<T>)>> = vec![Vec::new(); dim];
        for (i, j, v) in triplets {
            if i >= dim || j >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: i.max(j) + 1 });
            }
            let (a, b) = truncation.labels(i);
            let (c, d) = truncation.labels(j);
            if !truncation.is_active(a, b) || !truncation.is_active(c, d) {
                return Err(Error::Input(format!("entry ({i}, {j}) outside the active basis")));
            }
            rows[i].push((j, v));
        }
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
            row.dedup_by(|later, kept| {
                if later.0 == kept.0 {
                    kept.1 += later.1;
                    true
                } else {
                    false
                }
            });
            row.retain(|e| e.1 != Complex::new(T::zero(), T::zero()));
        }
        Ok(Self { truncation, rows })
    }

    /// Wraps a dense matrix, rejecting it if it is not Hermitian within
    /// [`HERMITIAN_TOL`].
    pub fn from_dense(truncation: BasisTruncation, m: &Array2<Complex<T>>) -> Result<Self> {
        let dim = truncation.dim();
        if m.dim() != (dim, dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
        }
        let op = Self::from_triplets(
            truncation,
            m.indexed_iter().filter(|(_, v)| v.re != T::zero() || v.im != T::zero()).map(|((i, j), &v)| (i, j, v)),
        )?;
        let defect = op.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(op)
    }

    pub fn truncation(&self) -> &BasisTruncation {
        &self.truncation
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex<T>)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map(|k| self.rows[i][k].1)
            .unwrap_or_else(|_| Complex::new(T::zero(), T::zero()))
    }

    /// `max |H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                let d = (v - self.get(j, i).conj()).norm().to_f64().unwrap_or(f64::INFINITY);
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.rows.iter().flatten().all(|e| e.1.im == T::zero())
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(self.rows.iter().map(|row| row.iter().map(|&(j, v)| v * x[j]).sum()).collect())
    }

    /// `<x|H|x>` for a normalized `x`.
    pub fn expectation(&self, x: &[Complex<T>]) -> Result<T> {
        let hx = self.matvec(x)?;
        Ok(x.iter().zip(&hx).map(|(a, b)| (a.conj() * b).re).sum())
    }

    pub fn to_dense(&self) -> Array2<Complex<T>> {
        let n = self.dim();
        let mut m = Array2::from_elem((n, n), Complex::new(T::zero(), T::zero()));
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[[i, j]] = v;
            }
        }
        m
    }
}

/// Matrix of the model Hamiltonian on `trunc` (`hbar = 1`).
///
/// Oscillators use `q = (a + a†)/sqrt(2 m w)`, so `q^2` couples `n` to `n`
/// and `n +- 2`; the Jaynes-Cummings terms are the usual ladder-operator
/// matrix elements in `|n> (x) |J, m>`.
pub fn build_hamiltonian<T: Real>(
    model: &ModelSpec<T>,
    trunc: &BasisTruncation,
    budget: &MemoryBudget,
) -> Result<HermitianOperator<T>> {
    let dim = trunc.dim();
    if dim > budget.max_dim {
        return Err(Error::Resource { what: "basis dimension", requested: dim, limit: budget.max_dim });
    }
    let c = |x: T| Complex::new(x, T::zero());
    let mut triplets = Vec::new();
    match (model, trunc) {
        (ModelSpec::PullenEdmonds(pe), BasisTruncation::Oscillators { n1_max, n2_max, .. }) => {
            let scale = T::one() / (T::lit(2.0) * pe.mass * pe.omega);
            // <n + shift| q^2 |n>, shift in {-2, 0, 2}
            let q2 = |n: usize, shift: isize| -> T {
                let nf = T::from_usize_lossy(n);
                match shift {
                    0 => (T::lit(2.0) * nf + T::one()) * scale,
                    2 => ((nf + T::one()) * (nf + T::lit(2.0))).sqrt() * scale,
                    -2 => (nf * (nf - T::one())).sqrt() * scale,
                    _ => unreachable!(),
                }
            };
            for n1 in 0..=*n1_max {
                for n2 in 0..=*n2_max {
                    if !trunc.is_active(n1, n2) {
                        continue;
                    }
                    let col = trunc.index(n1, n2);
                    for s1 in [-2isize, 0, 2] {
                        let m1 = n1 as isize + s1;
                        if m1 < 0 || m1 > *n1_max as isize {
                            continue;
                        }
                        for s2 in [-2isize, 0, 2] {
                            let m2 = n2 as isize + s2;
                            if m2 < 0 || m2 > *n2_max as isize {
                                continue;
                            }
                            let (m1, m2) = (m1 as usize, m2 as usize);
                            if !trunc.is_active(m1, m2) {
                                continue;
                            }
                            let mut v = pe.lambda * q2(n1, s1) * q2(n2, s2);
                            if s1 == 0 && s2 == 0 {
                                v += pe.omega * T::from_usize_lossy(n1 + n2 + 1);
                            }
                            triplets.push((trunc.index(m1, m2), col, c(v)));
                        }
                    }
                }
            }
        }
        (ModelSpec::JaynesCummings(jc), BasisTruncation::JaynesCummings { n_ph_max, two_j }) if jc.two_j == *two_j => {
            let tj = *two_j as usize;
            let norm = T::one() / T::from_u32(*two_j).unwrap().sqrt();
            let (g, gp) = (jc.g * norm, jc.g_prime * norm);
            let j = jc.j();
            // J+|k> = raise(k)|k+1>, J-|k> = lower(k)|k-1>, with k = m + J
            let raise = |k: usize| T::from_usize_lossy((tj - k) * (k + 1)).sqrt();
            let lower = |k: usize| T::from_usize_lossy(k * (tj + 1 - k)).sqrt();
            for n in 0..=*n_ph_max {
                let nf = T::from_usize_lossy(n);
                for k in 0..=tj {
                    let col = trunc.index(n, k);
                    let diag = jc.omega * nf + jc.epsilon * (T::from_usize_lossy(k) - j);
                    triplets.push((col, col, c(diag)));
                    if n > 0 && k < tj {
                        // a J+
                        triplets.push((trunc.index(n - 1, k + 1), col, c(g * nf.sqrt() * raise(k))));
                    }
                    if n < *n_ph_max && k > 0 {
                        // a† J-
                        let v = g * (nf + T::one()).sqrt() * lower(k);
                        triplets.push((trunc.index(n + 1, k - 1), col, c(v)));
                    }
                    if gp != T::zero() {
                        if n < *n_ph_max && k < tj {
                            // a† J+
                            let v = gp * (nf + T::one()).sqrt() * raise(k);
                            triplets.push((trunc.index(n + 1, k + 1), col, c(v)));
                        }
                        if n > 0 && k > 0 {
                            // a J-
                            triplets.push((trunc.index(n - 1, k - 1), col, c(gp * nf.sqrt() * lower(k))));
                        }
                    }
                }
            }
        }
        _ => return Err(Error::Input(format!("truncation {trunc:?} does not match model {model:?}"))),
    }
    HermitianOperator::from_triplets(*trunc, triplets)
}
