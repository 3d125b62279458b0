use num_complex::Complex;

use super::{BasisTruncation, ModelSpec, PhasePoint, QuantumState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest probability the initial state may hold in the two outermost
/// index shells of the truncation.
pub const LEAKAGE_THRESHOLD: f64 = 1e-6;

/// Fock amplitudes `e^{-|z|^2/2} z^n / sqrt(n!)` for `n = 0..=n_max`,
/// evaluated through logarithms so large `|z|` neither overflows nor
/// underflows prematurely.
pub fn glauber_amplitudes<T: Real>(z: Complex<T>, n_max: usize) -> Vec<Complex<T>> {
    let r2 = z.norm_sqr();
    let zero = Complex::new(T::zero(), T::zero());
    if r2 == T::zero() {
        let mut v = vec![zero; n_max + 1];
        v[0] = Complex::new(T::one(), T::zero());
        return v;
    }
    let ln_r = r2.ln() * T::lit(0.5);
    let phase = z.arg();
    let mut ln_fact = T::zero();
    (0..=n_max)
        .map(|n| {
            let nf = T::from_usize_lossy(n);
            if n > 0 {
                ln_fact += nf.ln();
            }
            let ln_mag = -r2 * T::lit(0.5) + nf * ln_r - ln_fact * T::lit(0.5);
            Complex::from_polar(ln_mag.exp(), nf * phase)
        })
        .collect()
}

/// Spin coherent state `(1 + |w|^2)^{-J} e^{w J+} |J, -J>` in the `|J, m>`
/// basis, index `k = m + J`.
pub fn spin_coherent_amplitudes<T: Real>(w: Complex<T>, two_j: u32) -> Vec<Complex<T>> {
    let tj = two_j as usize;
    let r2 = w.norm_sqr();
    let zero = Complex::new(T::zero(), T::zero());
    if r2 == T::zero() {
        let mut v = vec![zero; tj + 1];
        v[0] = Complex::new(T::one(), T::zero());
        return v;
    }
    let j = T::from_u32(two_j).unwrap() * T::lit(0.5);
    let ln_r = r2.ln() * T::lit(0.5);
    let phase = w.arg();
    // ln C(2J, k), built incrementally
    let mut ln_binom = T::zero();
    (0..=tj)
        .map(|k| {
            let kf = T::from_usize_lossy(k);
            if k > 0 {
                ln_binom += T::from_usize_lossy(tj + 1 - k).ln() - kf.ln();
            }
            let ln_mag = -j * r2.ln_1p() + ln_binom * T::lit(0.5) + kf * ln_r;
            Complex::from_polar(ln_mag.exp(), kf * phase)
        })
        .collect()
}

/// Coherent state centred on `x`, plus its truncation leakage: probability
/// lost outside the basis plus probability in the outermost two shells.
pub fn coherent_state_with_leakage<T: Real>(
    model: &ModelSpec<T>,
    x: &PhasePoint<T>,
    trunc: &BasisTruncation,
) -> Result<(QuantumState<T>, f64)> {
    model.check_domain(x)?;
    let (d1, d2) = trunc.dims();
    let sqrt2 = T::lit(2.0).sqrt();
    let (a, b) = match (model, trunc) {
        (ModelSpec::PullenEdmonds(pe), BasisTruncation::Oscillators { .. }) => {
            let s = (pe.mass * pe.omega).sqrt();
            let alpha = |q: T, p: T| Complex::new(s * q / sqrt2, p / (s * sqrt2));
            (glauber_amplitudes(alpha(x.q1, x.p1), d1 - 1), glauber_amplitudes(alpha(x.q2, x.p2), d2 - 1))
        }
        (ModelSpec::JaynesCummings(jc), BasisTruncation::JaynesCummings { two_j, .. }) if jc.two_j == *two_j => {
            let r2 = x.q1 * x.q1 + x.p1 * x.p1;
            let w = Complex::new(x.p1, x.q1) / (T::lit(4.0) * jc.j() - r2).sqrt();
            let v = Complex::new(x.p2, x.q2) / sqrt2;
            (glauber_amplitudes(v, d1 - 1), spin_coherent_amplitudes(w, *two_j))
        }
        _ => return Err(Error::Input(format!("truncation {trunc:?} does not match model {model:?}"))),
    };
    let zero = Complex::new(T::zero(), T::zero());
    let mut amps = Vec::with_capacity(d1 * d2);
    let mut kept = 0.0_f64;
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let v = if trunc.is_active(i, j) { *ai * *bj } else { zero };
            kept += v.norm_sqr().to_f64().unwrap_or(0.0);
            amps.push(v);
        }
    }
    let state = QuantumState::normalized(*trunc, amps)?;
    let shells = state.outer_shell_weight().to_f64().unwrap_or(f64::NAN);
    Ok((state, (1.0 - kept).max(0.0) + shells))
}

/// Coherent initial state for the phase point `x`.
///
/// Oscillators: `|alpha1> (x) |alpha2>` with `alpha = (q + i p)/sqrt(2)` in
/// natural units. Jaynes-Cummings: `|w> (x) |v>` with
/// `w = (p1 + i q1)/sqrt(4J - q1^2 - p1^2)` and `v = (p2 + i q2)/sqrt(2)`;
/// the field factor comes first in the product basis.
///
/// Fails with a truncation error when the leakage exceeds
/// [`LEAKAGE_THRESHOLD`].
pub fn initial_coherent_state<T: Real>(
    model: &ModelSpec<T>,
    x: &PhasePoint<T>,
    trunc: &BasisTruncation,
) -> Result<QuantumState<T>> {
    let (state, leakage) = coherent_state_with_leakage(model, x, trunc)?;
    if !(leakage < LEAKAGE_THRESHOLD) {
        return Err(Error::Truncation { leakage, threshold: LEAKAGE_THRESHOLD });
    }
    Ok(state)
}
