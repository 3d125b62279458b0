//! Periodograms of trajectory observables, spectral-line extraction and the
//! frequency entropy.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::classical::Trajectory;
use crate::error::{Error, Result};
use crate::io::fmt_float;
use crate::scalar::Real;

/// Shortest accepted series.
pub const MIN_SERIES_LEN: usize = 16;
/// Default line threshold relative to the global maximum.
pub const DEFAULT_REL_THRESHOLD: f64 = 1e-6;
/// Bins summed on each side of a peak to form a line weight.
pub const LINE_HALF_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    Q1,
    Q2,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Q1 => "q1",
            Observable::Q2 => "q2",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    None,
    #[default]
    Hann,
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "rect" | "rectangular" => Ok(Window::None),
            "hann" => Ok(Window::Hann),
            _ => Err(Error::Input(format!("unknown window '{s}'"))),
        }
    }
}

impl Window {
    fn coefficients<T: Real>(self, n: usize) -> Vec<T> {
        match self {
            Window::None => vec![T::one(); n],
            Window::Hann => {
                // periodic form: an on-grid tone leaks into exactly one
                // neighbour on each side
                let step = T::TAU() / T::from_usize_lossy(n);
                (0..n).map(|k| T::lit(0.5) * (T::one() - (step * T::from_usize_lossy(k)).cos())).collect()
            }
        }
    }
}

/// One-sided periodogram on the grid `omega_j = 2 pi j / duration`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum<T> {
    pub observable: Option<Observable>,
    /// Length of the (zero-padded) record that defines the grid.
    pub duration: T,
    pub intensities: Vec<T>,
    pub window: Window,
}

impl<T: Real> PowerSpectrum<T> {
    /// Wraps precomputed intensities on the grid of a record of length
    /// `duration`.
    pub fn from_intensities(duration: T, intensities: Vec<T>, window: Window) -> Result<Self> {
        if !(duration > T::zero()) || intensities.is_empty() {
            return Err(Error::Input("spectrum needs a positive duration and at least one bin".into()));
        }
        if intensities.iter().any(|i| !(*i >= T::zero()) || !i.is_finite()) {
            return Err(Error::Input("intensities must be finite and non-negative".into()));
        }
        Ok(Self { observable: None, duration, intensities, window })
    }

    pub fn with_observable(mut self, obs: Observable) -> Self {
        self.observable = Some(obs);
        self
    }

    pub fn spacing(&self) -> T {
        T::TAU() / self.duration
    }

    pub fn frequency(&self, j: usize) -> T {
        T::from_usize_lossy(j) * self.spacing()
    }

    pub fn frequencies(&self) -> Vec<T> {
        (0..self.intensities.len()).map(|j| self.frequency(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }

    /// Integrated intensity of bin `j`, `I_j * d_omega`.
    pub fn bin_weight(&self, j: usize) -> T {
        self.intensities[j] * self.spacing()
    }

    /// `sum_j I_j * d_omega`, the mean-square power of the windowed series.
    pub fn total_power(&self) -> T {
        self.intensities.iter().copied().sum::<T>() * self.spacing()
    }

    /// CSV with header `omega,intensity`.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        crate::io::write_pairs(
            w,
            ("omega", "intensity"),
            self.frequencies().into_iter().zip(self.intensities.iter().copied()),
        )
    }
}

/// Periodogram of `series` sampled every `dt_sample`.
///
/// The series is zero-padded to the next power of two `M`. With `N`
/// original samples, window `w` and `W = mean(w^2)`, bin `j` holds
/// `|dt sum_k x_k w_k e^{-i omega_j t_k}|^2 / (2 pi N dt W)`, doubled away
/// from zero and Nyquist so the spectrum is one-sided. A cosine
/// `A cos(omega_0 t)` with `omega_0` on the grid then carries weight
/// `A^2 / 2`, and `sum_j I_j d_omega` equals the mean square of the series.
pub fn power_spectrum<T: Real>(series: &[T], dt_sample: T, window: Window) -> Result<PowerSpectrum<T>> {
    let n = series.len();
    if n < MIN_SERIES_LEN {
        return Err(Error::Input(format!("series needs at least {MIN_SERIES_LEN} samples, got {n}")));
    }
    if !(dt_sample > T::zero()) || !dt_sample.is_finite() {
        return Err(Error::Input(format!("dt_sample must be positive, got {dt_sample}")));
    }
    let m = n.next_power_of_two();
    let w = window.coefficients::<T>(n);
    let w_power = w.iter().map(|c| *c * *c).sum::<T>() / T::from_usize_lossy(n);
    let mut buf: Vec<Complex<T>> = series
        .iter()
        .zip(&w)
        .map(|(x, c)| Complex::new(*x * *c, T::zero()))
        .chain(std::iter::repeat(Complex::new(T::zero(), T::zero())))
        .take(m)
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let norm = dt_sample / (T::TAU() * T::from_usize_lossy(n) * w_power);
    let half = m / 2;
    let intensities = (0..=half)
        .map(|j| {
            let fold = if j == 0 || j == half { T::one() } else { T::lit(2.0) };
            fold * buf[j].norm_sqr() * norm
        })
        .collect();
    Ok(PowerSpectrum { observable: None, duration: T::from_usize_lossy(m) * dt_sample, intensities, window })
}

/// Spectra of `q1(t)` and `q2(t)` along a trajectory.
///
/// Only the longest power-of-two prefix of the samples is used (a run over
/// `[0, 2^k dt]` has `2^k + 1` samples): zero-padding would interpolate the
/// window kernel and turn its sidelobes into spurious local maxima.
pub fn trajectory_spectra<T: Real>(
    traj: &Trajectory<T>,
    window: Window,
) -> Result<(PowerSpectrum<T>, PowerSpectrum<T>)> {
    let dt = traj.sample_interval();
    let n = traj.len();
    let keep = if n.is_power_of_two() { n } else { n.next_power_of_two() / 2 };
    let (q1, q2) = (traj.q1(), traj.q2());
    let s1 = power_spectrum(&q1[..keep], dt, window)?.with_observable(Observable::Q1);
    let s2 = power_spectrum(&q2[..keep], dt, window)?.with_observable(Observable::Q2);
    Ok((s1, s2))
}

/// Discrete lines `(omega_k, weight_k)` of both observables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpectralLines<T> {
    pub q1: Vec<(T, T)>,
    pub q2: Vec<(T, T)>,
}

impl<T: Real> SpectralLines<T> {
    pub fn len(&self) -> usize {
        self.q1.len() + self.q2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, obs: Observable) -> &[(T, T)] {
        match obs {
            Observable::Q1 => &self.q1,
            Observable::Q2 => &self.q2,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Observable, T, T)> + '_ {
        let tag = |o: Observable| move |&(w, i): &(T, T)| (o, w, i);
        self.q1.iter().map(tag(Observable::Q1)).chain(self.q2.iter().map(tag(Observable::Q2)))
    }

    /// CSV with header `observable,omega,weight`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "observable,omega,weight")?;
        for (obs, omega, weight) in self.iter() {
            writeln!(w, "{obs},{},{}", fmt_float(omega), fmt_float(weight))?;
        }
        Ok(())
    }
}

/// Picks the strict local maxima of both spectra that reach `rel_threshold`
/// times the larger of the two global maxima.
///
/// Frequencies are refined by a parabola through the peak and its
/// neighbours; weights sum the integrated intensity over the peak bin and
/// two bins either side.
pub fn extract_lines<T: Real>(
    q1: &PowerSpectrum<T>,
    q2: &PowerSpectrum<T>,
    rel_threshold: T,
) -> Result<SpectralLines<T>> {
    if !(rel_threshold > T::zero() && rel_threshold < T::one()) {
        return Err(Error::InvalidParameter(format!("rel_threshold must lie in (0, 1), got {rel_threshold}")));
    }
    check_common_grid(q1, q2)?;
    let peak = q1.intensities.iter().chain(&q2.intensities).copied().fold(T::zero(), T::max);
    if !(peak > T::zero()) {
        return Err(Error::EmptyLines);
    }
    let cut = rel_threshold * peak;
    Ok(SpectralLines { q1: lines_of(q1, cut), q2: lines_of(q2, cut) })
}

fn lines_of<T: Real>(s: &PowerSpectrum<T>, cut: T) -> Vec<(T, T)> {
    let v = &s.intensities;
    let n = v.len();
    let below = |j: usize, k: Option<usize>| k.is_none_or(|k| v[k] < v[j]);
    let mut out = Vec::new();
    for j in 0..n {
        let left = j.checked_sub(1);
        let right = (j + 1 < n).then_some(j + 1);
        if v[j] < cut || !below(j, left) || !below(j, right) {
            continue;
        }
        let offset = match (left, right) {
            (Some(l), Some(r)) => {
                let den = v[l] - T::lit(2.0) * v[j] + v[r];
                if den < T::zero() {
                    T::lit(0.5) * (v[l] - v[r]) / den
                } else {
                    T::zero()
                }
            }
            _ => T::zero(),
        };
        let lo = j.saturating_sub(LINE_HALF_WIDTH);
        let hi = (j + LINE_HALF_WIDTH).min(n - 1);
        let weight = (lo..=hi).map(|k| v[k]).sum::<T>() * s.spacing();
        out.push(((T::from_usize_lossy(j) + offset) * s.spacing(), weight));
    }
    out
}

fn check_common_grid<T: Real>(a: &PowerSpectrum<T>, b: &PowerSpectrum<T>) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let tol = T::lit(1e-12) * a.duration.abs();
    if (a.duration - b.duration).abs() > tol {
        return Err(Error::Input(format!("spectra on different grids (durations {} and {})", a.duration, b.duration)));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyMode {
    Discrete,
    Continuous,
}

impl EntropyMode {
    pub fn name(self) -> &'static str {
        match self {
            EntropyMode::Discrete => "discrete",
            EntropyMode::Continuous => "continuous",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyEntropy<T> {
    /// Entropy in nats.
    pub value: T,
    pub mode: EntropyMode,
    /// Line count (discrete) or total bin count over both spectra
    /// (continuous).
    pub count: usize,
}

/// Shannon entropy of the line weights normalized jointly over both
/// observables.
pub fn frequency_entropy<T: Real>(lines: &SpectralLines<T>) -> Result<FrequencyEntropy<T>> {
    if lines.is_empty() {
        return Err(Error::Input("frequency entropy needs at least one spectral line".into()));
    }
    let weights: Vec<T> = lines.iter().map(|(_, _, w)| w).collect();
    let value = shannon(weights.into_iter())?;
    Ok(FrequencyEntropy { value, mode: EntropyMode::Discrete, count: lines.len() })
}

/// Entropy of the binned intensities of both spectra treated as one
/// distribution. The value depends on the grid: halving the bin width adds
/// about `ln 2` for a smooth density.
pub fn frequency_entropy_continuous<T: Real>(
    q1: &PowerSpectrum<T>,
    q2: &PowerSpectrum<T>,
) -> Result<FrequencyEntropy<T>> {
    check_common_grid(q1, q2)?;
    let value = shannon(q1.intensities.iter().chain(&q2.intensities).copied())?;
    Ok(FrequencyEntropy { value, mode: EntropyMode::Continuous, count: q1.len() + q2.len() })
}

fn shannon<T: Real>(weights: impl Iterator<Item = T> + Clone) -> Result<T> {
    let total: T = weights.clone().sum();
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::Input(format!("weights must have a positive finite sum, got {total}")));
    }
    let mut s = T::zero();
    for w in weights {
        if w < T::zero() {
            return Err(Error::Input(format!("negative weight {w}")));
        }
        if w > T::zero() {
            let p = w / total;
            s -= p * p.ln();
        }
    }
    Ok(s.max(T::zero()))
}
