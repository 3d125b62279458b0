use std::io::Write;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex;

use super::density::{entropy_of_spectrum, gram};
use super::EigenSystem;
use crate::error::{Error, Result};
use crate::io::write_pairs;
use crate::linalg::{eigh_hermitian, eigvalsh_symmetric};
use crate::models::{QuantumState, Subsystem};
use crate::scalar::Real;

/// Total population that may be discarded from the smallest eigencomponents
/// of an initial state before propagation.
pub const PRUNE_WEIGHT: f64 = 1e-14;
/// Default reporting floor for density spectra.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-12;

/// Bytes of evolved amplitudes held at once.
const CHUNK_BYTES: usize = 1 << 27;

/// Initial-state expansion restricted to the eigencomponents that matter.
struct Expansion<T> {
    /// Per block: eigenvalues, real/imaginary eigenvector columns and
    /// coefficients `<n|psi0>` of the kept components.
    parts: Vec<Part<T>>,
}

struct Part<T> {
    indices: Vec<usize>,
    energies: Vec<T>,
    re: Array2<T>,
    im: Option<Array2<T>>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Expansion<T> {
    fn new(es: &EigenSystem<T>, psi0: &QuantumState<T>, prune_weight: f64) -> Result<Self> {
        if psi0.truncation() != es.truncation() {
            return Err(Error::Input("state and eigensystem use different truncations".into()));
        }
        let coeffs = es.project_blocks(psi0.amplitudes())?;
        let mut weights: Vec<(T, usize, usize)> = coeffs
            .iter()
            .enumerate()
            .flat_map(|(b, c)| c.iter().enumerate().map(move |(k, z)| (z.norm_sqr(), b, k)))
            .collect();
        weights.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut keep: Vec<Vec<bool>> = coeffs.iter().map(|c| vec![true; c.len()]).collect();
        let mut dropped = 0.0;
        for (w, b, k) in weights {
            dropped += w.to_f64().unwrap();
            if dropped > prune_weight {
                break;
            }
            keep[b][k] = false;
        }
        let parts = es
            .blocks
            .iter()
            .zip(coeffs)
            .zip(keep)
            .filter_map(|((block, c), keep)| {
                let cols: Vec<usize> = (0..c.len()).filter(|&k| keep[k]).collect();
                if cols.is_empty() {
                    return None;
                }
                Some(Part {
                    indices: block.indices.clone(),
                    energies: cols.iter().map(|&k| block.eigenvalues[k]).collect(),
                    re: block.re.select(ndarray::Axis(1), &cols),
                    im: block.im.as_ref().map(|m| m.select(ndarray::Axis(1), &cols)),
                    coeffs: cols.iter().map(|&k| c[k]).collect(),
                })
            })
            .collect();
        Ok(Self { parts })
    }

    /// Calls `f(k, re, im)` with the amplitude matrix at `times[k]`, in order.
    fn for_each_state(
        &self,
        es: &EigenSystem<T>,
        times: &[T],
        mut f: impl FnMut(usize, &Array2<T>, &Array2<T>) -> Result<()>,
    ) -> Result<()> {
        let trunc = es.truncation();
        let dims = trunc.dims();
        let dim = trunc.dim();
        let chunk = (CHUNK_BYTES / (2 * std::mem::size_of::<T>() * dim.max(1))).clamp(1, 512);
        for (c, ts) in times.chunks(chunk).enumerate() {
            let mut evolved = Vec::with_capacity(self.parts.len());
            for part in &self.parts {
                // phases[n, t] = c_n exp(-i E_n t)
                let m = part.energies.len();
                let mut pr = Array2::<T>::zeros((m, ts.len()));
                let mut pi = Array2::<T>::zeros((m, ts.len()));
                for n in 0..m {
                    for (j, &t) in ts.iter().enumerate() {
                        let z = part.coeffs[n] * Complex::from_polar(T::one(), -part.energies[n] * t);
                        pr[[n, j]] = z.re;
                        pi[[n, j]] = z.im;
                    }
                }
                let mut re = part.re.dot(&pr);
                let mut im = part.re.dot(&pi);
                if let Some(b) = &part.im {
                    re -= &b.dot(&pi);
                    im += &b.dot(&pr);
                }
                evolved.push((re, im));
            }
            for j in 0..ts.len() {
                let mut a = Array2::<T>::zeros(dims);
                let mut b = Array2::<T>::zeros(dims);
                for (part, (re, im)) in self.parts.iter().zip(&evolved) {
                    for (row, &i) in part.indices.iter().enumerate() {
                        let (i1, i2) = trunc.labels(i);
                        a[[i1, i2]] = re[[row, j]];
                        b[[i1, i2]] = im[[row, j]];
                    }
                }
                f(c * chunk + j, &a, &b)?;
            }
        }
        Ok(())
    }
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !(**t >= T::zero()) || !t.is_finite()) {
        return Err(Error::Input(format!("evolution times must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// `psi(t) = V exp(-i D t) V^dagger psi0` at each requested time.
pub fn evolve<T: Real>(es: &EigenSystem<T>, psi0: &QuantumState<T>, times: &[T]) -> Result<Vec<QuantumState<T>>> {
    check_times(times)?;
    let exp = Expansion::new(es, psi0, 0.0)?;
    let trunc = *es.truncation();
    let mut out = Vec::with_capacity(times.len());
    exp.for_each_state(es, times, |k, a, b| {
        if times[k] == T::zero() {
            out.push(psi0.clone());
            return Ok(());
        }
        let amps = a.iter().zip(b.iter()).map(|(r, i)| Complex::new(*r, *i)).collect();
        out.push(QuantumState::new(trunc, amps)?);
        Ok(())
    })?;
    Ok(out)
}

/// Entanglement entropy `S_V(t)` on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve<T> {
    pub times: Vec<T>,
    pub values: Vec<T>,
    pub subsystem: Subsystem,
    pub s_max: T,
    /// Earliest sampled time at which `s_max` is attained.
    pub t_of_max: T,
}

impl<T: Real> EntropyCurve<T> {
    fn from_samples(times: Vec<T>, values: Vec<T>, subsystem: Subsystem) -> Self {
        let (mut s_max, mut t_of_max) = (T::neg_infinity(), T::zero());
        for (t, v) in times.iter().zip(&values) {
            if *v > s_max {
                s_max = *v;
                t_of_max = *t;
            }
        }
        Self { times, values, subsystem, s_max, t_of_max }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with header `t,S_V`.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_pairs(w, ("t", "S_V"), self.times.iter().copied().zip(self.values.iter().copied()))
    }
}

fn sample_times<T: Real>(from: usize, t_max: T, dt_sample: T) -> Result<Vec<T>> {
    if !(dt_sample > T::zero()) || !(t_max >= T::zero()) || !t_max.is_finite() {
        return Err(Error::Input(format!("need dt_sample > 0 and t_max >= 0 (dt={dt_sample}, t_max={t_max})")));
    }
    let n = (t_max / dt_sample).to_f64().unwrap();
    let last = (n + 1e-9 * n.max(1.0)).floor() as usize;
    Ok((from..=last).map(|k| T::from_usize_lossy(k) * dt_sample).collect())
}

fn entropy_values<T: Real>(es: &EigenSystem<T>, exp: &Expansion<T>, times: &[T], factor: usize) -> Result<Vec<T>> {
    let mut values = Vec::with_capacity(times.len());
    exp.for_each_state(es, times, |_, a, b| {
        let rho = if factor == 0 { gram(a, b) } else { gram(&a.t().to_owned(), &b.t().to_owned()) };
        values.push(entropy_of_spectrum(&hermitian_eigenvalues(rho.view())?)?);
        Ok(())
    })?;
    Ok(values)
}

fn hermitian_eigenvalues<T: Real>(m: ArrayView2<'_, Complex<T>>) -> Result<Vec<T>> {
    if m.iter().all(|z| z.im == T::zero()) {
        eigvalsh_symmetric(m.mapv(|z| z.re).view())
    } else {
        Ok(eigh_hermitian(m, false)?.0)
    }
}

/// `S_V` of `subsystem` at `t = 0, dt_sample, ..., t_max`.
pub fn entropy_curve<T: Real>(
    es: &EigenSystem<T>,
    psi0: &QuantumState<T>,
    t_max: T,
    dt_sample: T,
    subsystem: Subsystem,
) -> Result<EntropyCurve<T>> {
    let factor = es.truncation().factor_of(subsystem)?;
    let exp = Expansion::new(es, psi0, PRUNE_WEIGHT)?;
    let times = sample_times(0, t_max, dt_sample)?;
    let values = entropy_values(es, &exp, &times, factor)?;
    Ok(EntropyCurve::from_samples(times, values, subsystem))
}

/// Outcome of [`entropy_curve_plateau`].
#[derive(Debug, Clone, PartialEq)]
pub struct Plateau<T> {
    pub curve: EntropyCurve<T>,
    /// Whether the last doubling raised `s_max` by less than the tolerance.
    pub converged: bool,
    pub doublings: usize,
}

/// Extends the window `t_max -> 2 t_max` until the maximum entropy grows by
/// less than `tol`, at most `max_doublings` times.
pub fn entropy_curve_plateau<T: Real>(
    es: &EigenSystem<T>,
    psi0: &QuantumState<T>,
    t_max: T,
    dt_sample: T,
    subsystem: Subsystem,
    tol: T,
    max_doublings: usize,
) -> Result<Plateau<T>> {
    let factor = es.truncation().factor_of(subsystem)?;
    let exp = Expansion::new(es, psi0, PRUNE_WEIGHT)?;
    let mut times = sample_times(0, t_max, dt_sample)?;
    let mut values = entropy_values(es, &exp, &times, factor)?;
    let mut window = t_max;
    let peak = |v: &[T]| v.iter().copied().fold(T::neg_infinity(), T::max);
    for doublings in 1..=max_doublings {
        let before = peak(&values);
        window *= T::lit(2.0);
        let more = sample_times(times.len(), window, dt_sample)?;
        values.extend(entropy_values(es, &exp, &more, factor)?);
        times.extend(more);
        if peak(&values) - before < tol {
            return Ok(Plateau {
                curve: EntropyCurve::from_samples(times, values, subsystem),
                converged: true,
                doublings,
            });
        }
    }
    Ok(Plateau {
        curve: EntropyCurve::from_samples(times, values, subsystem),
        converged: false,
        doublings: max_doublings,
    })
}

/// Populations `rho_nn = |<n|psi0>|^2` of the energy eigenstates.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySpectrum<T> {
    /// `(E_n, rho_nn)` with `rho_nn >= floor`, ascending in energy.
    pub pairs: Vec<(T, T)>,
    /// `1 / sum rho_nn^2` over all eigenstates.
    pub participation_ratio: T,
    /// `sum rho_nn` over all eigenstates, before flooring.
    pub total: T,
    pub floor: T,
}

impl<T: Real> DensitySpectrum<T> {
    /// CSV with header `E_n,rho_nn`.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_pairs(w, ("E_n", "rho_nn"), self.pairs.iter().copied())
    }

    /// Population-weighted mean energy of the reported pairs.
    pub fn mean_energy(&self) -> T {
        self.pairs.iter().map(|(e, p)| *e * *p).sum::<T>() / self.pairs.iter().map(|p| p.1).sum::<T>()
    }
}

/// Eigenstate populations of `psi0`; they do not change under the
/// autonomous evolution.
pub fn density_spectrum<T: Real>(es: &EigenSystem<T>, psi0: &QuantumState<T>, floor: T) -> Result<DensitySpectrum<T>> {
    if psi0.truncation() != es.truncation() {
        return Err(Error::Input("state and eigensystem use different truncations".into()));
    }
    let rho: Vec<T> = es.project(psi0.amplitudes())?.iter().map(|z| z.norm_sqr()).collect();
    let total = rho.iter().copied().sum();
    let participation_ratio = T::one() / rho.iter().map(|p| *p * *p).sum::<T>();
    let pairs = rho.iter().enumerate().filter(|(_, p)| **p >= floor).map(|(n, p)| (es.eigenvalue(n), *p)).collect();
    Ok(DensitySpectrum { pairs, participation_ratio, total, floor })
}
