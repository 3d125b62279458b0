use std::collections::VecDeque;

use ndarray::{Array2, ArrayView1};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{eigh_hermitian, eigh_symmetric};
use crate::models::{BasisTruncation, HermitianOperator, MemoryBudget, HERMITIAN_TOL};
use crate::scalar::Real;

/// Eigenpairs of one connected block of the Hamiltonian graph.
#[derive(Debug, Clone)]
pub(crate) struct Block<T> {
    /// Product-basis indices spanned by the block, ascending.
    pub(crate) indices: Vec<usize>,
    pub(crate) eigenvalues: Vec<T>,
    /// Real and imaginary parts of the eigenvectors (columns); the imaginary
    /// part is absent for real symmetric blocks.
    pub(crate) re: Array2<T>,
    pub(crate) im: Option<Array2<T>>,
}

/// Complete eigendecomposition of a Hamiltonian on its active basis.
///
/// Basis states that no matrix element connects are never mixed, so the
/// matrix is split into connected blocks (parity sectors for the
/// oscillators, excitation-number sectors for Jaynes-Cummings without
/// counter-rotating terms) and each block is diagonalized densely. The
/// global eigenvalue order is ascending across blocks.
#[derive(Debug, Clone)]
pub struct EigenSystem<T> {
    truncation: BasisTruncation,
    pub(crate) blocks: Vec<Block<T>>,
    /// `(block, column)` of the n-th eigenpair in ascending order.
    order: Vec<(usize, usize)>,
}

impl<T: Real> EigenSystem<T> {
    pub fn truncation(&self) -> &BasisTruncation {
        &self.truncation
    }

    /// Number of eigenpairs, the active basis size.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Block sizes, largest first.
    pub fn block_dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.blocks.iter().map(|b| b.indices.len()).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    pub fn eigenvalue(&self, n: usize) -> T {
        let (b, k) = self.order[n];
        self.blocks[b].eigenvalues[k]
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        (0..self.len()).map(|n| self.eigenvalue(n)).collect()
    }

    /// The n-th eigenvector expanded over the full product basis.
    pub fn eigenvector(&self, n: usize) -> Vec<Complex<T>> {
        let (b, k) = self.order[n];
        let block = &self.blocks[b];
        let mut v = vec![Complex::new(T::zero(), T::zero()); self.truncation.dim()];
        for (row, &i) in block.indices.iter().enumerate() {
            let im = block.im.as_ref().map_or(T::zero(), |m| m[[row, k]]);
            v[i] = Complex::new(block.re[[row, k]], im);
        }
        v
    }

    /// Entry `(i, j)` of `V diag(E) V^dagger`.
    pub fn reconstruct(&self, i: usize, j: usize) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for block in &self.blocks {
            let (Ok(r), Ok(c)) = (block.indices.binary_search(&i), block.indices.binary_search(&j)) else {
                continue;
            };
            for (k, e) in block.eigenvalues.iter().enumerate() {
                acc += block.entry(r, k) * block.entry(c, k).conj() * *e;
            }
        }
        acc
    }

    /// Overlaps `<n|psi>` for every eigenpair, in ascending eigenvalue order.
    pub fn project(&self, psi: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let per_block = self.project_blocks(psi)?;
        Ok(self.order.iter().map(|&(b, k)| per_block[b][k]).collect())
    }

    pub(crate) fn project_blocks(&self, psi: &[Complex<T>]) -> Result<Vec<Vec<Complex<T>>>> {
        if psi.len() != self.truncation.dim() {
            return Err(Error::DimensionMismatch { expected: self.truncation.dim(), found: psi.len() });
        }
        Ok(self
            .blocks
            .iter()
            .map(|block| {
                let pr: Vec<T> = block.indices.iter().map(|&i| psi[i].re).collect();
                let pi: Vec<T> = block.indices.iter().map(|&i| psi[i].im).collect();
                let (pr, pi) = (ArrayView1::from(&pr), ArrayView1::from(&pi));
                // V^dagger psi with V = A + iB: (A^T pr + B^T pi) + i (A^T pi - B^T pr)
                let mut re = block.re.t().dot(&pr);
                let mut im = block.re.t().dot(&pi);
                if let Some(b) = &block.im {
                    re += &b.t().dot(&pi);
                    im -= &b.t().dot(&pr);
                }
                re.iter().zip(im.iter()).map(|(a, b)| Complex::new(*a, *b)).collect()
            })
            .collect())
    }
}

impl<T: Real> Block<T> {
    pub(crate) fn entry(&self, row: usize, col: usize) -> Complex<T> {
        Complex::new(self.re[[row, col]], self.im.as_ref().map_or(T::zero(), |m| m[[row, col]]))
    }
}

/// Diagonalizes `h` under the default [`MemoryBudget`].
pub fn diagonalize<T: Real>(h: &HermitianOperator<T>) -> Result<EigenSystem<T>> {
    diagonalize_with(h, &MemoryBudget::default())
}

pub fn diagonalize_with<T: Real>(h: &HermitianOperator<T>, budget: &MemoryBudget) -> Result<EigenSystem<T>> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let trunc = *h.truncation();
    let components = connected_components(h);
    if let Some(big) = components.iter().map(Vec::len).max() {
        if big > budget.max_block_dim {
            return Err(Error::Resource { what: "dense block dimension", requested: big, limit: budget.max_block_dim });
        }
    }
    let mut blocks = Vec::with_capacity(components.len());
    for indices in components {
        blocks.push(diagonalize_block(h, indices)?);
    }
    let mut order: Vec<(usize, usize)> =
        blocks.iter().enumerate().flat_map(|(b, blk)| (0..blk.eigenvalues.len()).map(move |k| (b, k))).collect();
    order.sort_by(|x, y| {
        let ex = blocks[x.0].eigenvalues[x.1];
        let ey = blocks[y.0].eigenvalues[y.1];
        ex.partial_cmp(&ey).unwrap().then(x.cmp(y))
    });
    Ok(EigenSystem { truncation: trunc, blocks, order })
}

/// Groups the active basis states into connected components of the graph
/// whose edges are the nonzero off-diagonal elements.
fn connected_components<T: Real>(h: &HermitianOperator<T>) -> Vec<Vec<usize>> {
    let trunc = h.truncation();
    let dim = h.dim();
    let mut seen = vec![false; dim];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..dim {
        let (a, b) = trunc.labels(start);
        if seen[start] || !trunc.is_active(a, b) {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut comp = Vec::new();
        while let Some(i) = queue.pop_front() {
            comp.push(i);
            for &(j, _) in h.row(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn diagonalize_block<T: Real>(h: &HermitianOperator<T>, indices: Vec<usize>) -> Result<Block<T>> {
    let n = indices.len();
    let local = |j: usize| indices.binary_search(&j).expect("component is closed under the operator");
    let real = indices.iter().all(|&i| h.row(i).iter().all(|(_, v)| v.im == T::zero()));
    if real {
        let mut a = Array2::<T>::zeros((n, n));
        for (r, &i) in indices.iter().enumerate() {
            for &(j, v) in h.row(i) {
                a[[r, local(j)]] = v.re;
            }
        }
        let (eigenvalues, re) = eigh_symmetric(a.view())?;
        Ok(Block { indices, eigenvalues, re, im: None })
    } else {
        let mut a = Array2::<Complex<T>>::zeros((n, n));
        for (r, &i) in indices.iter().enumerate() {
            for &(j, v) in h.row(i) {
                a[[r, local(j)]] = v;
            }
        }
        let (eigenvalues, vecs) = eigh_hermitian(a.view(), true)?;
        let vecs = vecs.expect("eigenvectors requested");
        Ok(Block { indices, eigenvalues, re: vecs.mapv(|c| c.re), im: Some(vecs.mapv(|c| c.im)) })
    }
}
