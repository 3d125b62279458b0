use super::*;
use crate::error::Error;
use crate::models::{
    build_hamiltonian, initial_coherent_state, BasisTruncation, HermitianOperator, JaynesCummings, MemoryBudget,
    ModelSpec, PhasePoint, PullenEdmonds, QuantumState, Subsystem,
};
use ndarray::Array2;
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::LN_2;

type C = Complex<f64>;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn random_state(rng: &mut ChaCha8Rng, trunc: BasisTruncation) -> QuantumState<f64> {
    let amps = (0..trunc.dim()).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    QuantumState::normalized(trunc, amps).unwrap()
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> Array2<C> {
    let mut m = Array2::<C>::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = c(rng.random_range(-2.0..2.0));
        for j in 0..i {
            let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
            let z = C::new(rng.random_range(-1.0..1.0), im);
            m[[i, j]] = z;
            m[[j, i]] = z.conj();
        }
    }
    m
}

fn pe_system(lambda: f64, n: usize) -> (ModelSpec<f64>, BasisTruncation, EigenSystem<f64>) {
    let model: ModelSpec<f64> = PullenEdmonds::natural(lambda).into();
    let trunc = BasisTruncation::oscillators(n, n);
    let h = build_hamiltonian(&model, &trunc, &MemoryBudget::default()).unwrap();
    (model, trunc, diagonalize(&h).unwrap())
}

/// Dense `exp(-i H t) psi` by scaled Taylor series, independent of the
/// eigendecomposition.
fn taylor_propagate(h: &Array2<C>, psi: &[C], t: f64) -> Vec<C> {
    let norm: f64 = h.iter().map(|z| z.norm()).fold(0.0, f64::max) * h.nrows() as f64;
    let steps = ((norm * t.abs()) / 0.5).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut v = ndarray::Array1::from(psi.to_vec());
    for _ in 0..steps {
        let mut term = v.clone();
        let mut acc = v.clone();
        for k in 1..40 {
            term = h.dot(&term).mapv(|z| z * C::new(0.0, -dt) / k as f64);
            acc += &term;
        }
        v = acc;
    }
    v.to_vec()
}

/// Partial trace by explicit summation.
fn brute_reduced(psi: &QuantumState<f64>, factor: usize) -> Array2<C> {
    let (d1, d2) = psi.truncation().dims();
    let a = psi.amplitudes();
    let (keep, other) = if factor == 0 { (d1, d2) } else { (d2, d1) };
    let mut rho = Array2::<C>::zeros((keep, keep));
    for i in 0..keep {
        for ip in 0..keep {
            let mut s = c(0.0);
            for j in 0..other {
                let (x, y) = if factor == 0 { (i * d2 + j, ip * d2 + j) } else { (j * d2 + i, j * d2 + ip) };
                s += a[x] * a[y].conj();
            }
            rho[[i, ip]] = s;
        }
    }
    rho
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi on its real 2n x 2n
/// embedding (each eigenvalue appears twice).
fn jacobi_eigenvalues(m: &Array2<C>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = Array2::<f64>::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            a[[i, j]] = m[[i, j]].re;
            a[[i + n, j + n]] = m[[i, j]].re;
            a[[i, j + n]] = -m[[i, j]].im;
            a[[i + n, j]] = m[[i, j]].im;
        }
    }
    let n2 = 2 * n;
    for _ in 0..100 {
        let off: f64 = (0..n2)
            .flat_map(|i| (0..n2).filter(move |j| *j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]].powi(2))
            .sum();
        if off < 1e-28 {
            break;
        }
        for p in 0..n2 {
            for q in p + 1..n2 {
                if a[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * a[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let (cs, sn) = (1.0 / (t * t + 1.0).sqrt(), t / (t * t + 1.0).sqrt());
                for k in 0..n2 {
                    let (akp, akq) = (a[[k, p]], a[[k, q]]);
                    a[[k, p]] = cs * akp - sn * akq;
                    a[[k, q]] = sn * akp + cs * akq;
                }
                for k in 0..n2 {
                    let (apk, aqk) = (a[[p, k]], a[[q, k]]);
                    a[[p, k]] = cs * apk - sn * aqk;
                    a[[q, k]] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n2).map(|i| a[[i, i]]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev.iter().step_by(2).copied().collect()
}

fn entropy_oracle(rho: &Array2<C>) -> f64 {
    jacobi_eigenvalues(rho).iter().filter(|l| **l > 0.0).map(|l| -l * l.ln()).sum()
}

#[test]
fn uncoupled_spectrum_multiplicities() {
    let (_, _, es) = pe_system(0.0, 5);
    let ev = es.eigenvalues();
    assert_eq!(ev.len(), 36);
    let mut expect: Vec<f64> = (0..=5).flat_map(|a| (0..=5).map(move |b| (a + b + 1) as f64)).collect();
    expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (e, x) in ev.iter().zip(&expect) {
        assert!((e - x).abs() < 1e-10);
    }
    // k+1 states at energy k+1 for k <= 5
    for k in 0..=5 {
        assert_eq!(ev.iter().filter(|e| (**e - (k + 1) as f64).abs() < 1e-10).count(), k + 1);
    }
}

#[test]
fn already_diagonal() {
    let trunc = BasisTruncation::oscillators(0, 2);
    let m = Array2::from_diag(&ndarray::arr1(&[c(3.0), c(1.0), c(2.0)]));
    let es = diagonalize(&HermitianOperator::from_dense(trunc, &m).unwrap()).unwrap();
    assert_eq!(es.eigenvalues(), vec![1.0, 2.0, 3.0]);
    assert_eq!(es.block_dims(), vec![1, 1, 1]);
}

#[test]
fn random_reconstruction_and_orthonormality() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for complex in [true, false] {
        let trunc = BasisTruncation::oscillators(4, 9);
        let m = random_hermitian(&mut rng, 50, complex);
        let es = diagonalize(&HermitianOperator::from_dense(trunc, &m).unwrap()).unwrap();
        let ev = es.eigenvalues();
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            for j in 0..50 {
                worst = worst.max((es.reconstruct(i, j) - m[[i, j]]).norm());
            }
        }
        assert!(worst < 1e-8, "{worst}");
        for _ in 0..40 {
            let (a, b) = (rng.random_range(0..50), rng.random_range(0..50));
            let (va, vb) = (es.eigenvector(a), es.eigenvector(b));
            let dot: C = va.iter().zip(&vb).map(|(x, y)| x.conj() * y).sum();
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((dot - c(expect)).norm() < 1e-10);
        }
    }
}

#[test]
fn coupled_oscillators_split_into_parity_blocks() {
    let (_, trunc, es) = pe_system(0.0075, 9);
    assert_eq!(es.block_dims(), vec![25, 25, 25, 25]);
    assert_eq!(es.len(), trunc.dim());
    let tri = BasisTruncation::oscillators_triangular(9);
    let h = build_hamiltonian(&PullenEdmonds::natural(0.0075).into(), &tri, &MemoryBudget::default()).unwrap();
    let es = diagonalize(&h).unwrap();
    assert_eq!(es.len(), tri.active_count());
    assert_eq!(es.block_dims().iter().sum::<usize>(), 55);
}

#[test]
fn rejects_non_hermitian_and_oversized() {
    let trunc = BasisTruncation::oscillators(0, 1);
    let h = HermitianOperator::from_triplets(trunc, [(0, 1, c(1.0)), (1, 0, c(0.5))]).unwrap();
    assert!(matches!(diagonalize(&h), Err(Error::NotHermitian { .. })));
    let (model, trunc, _) = pe_system(0.0075, 1);
    let h = build_hamiltonian(&model, &BasisTruncation::oscillators(11, 11), &MemoryBudget::default()).unwrap();
    let budget = MemoryBudget { max_dim: 1000, max_block_dim: 20 };
    assert!(matches!(diagonalize_with(&h, &budget), Err(Error::Resource { .. })));
    let _ = trunc;
}

#[test]
fn evolution_matches_taylor_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let model: ModelSpec<f64> = PullenEdmonds::natural(0.3).into();
    let trunc = BasisTruncation::oscillators(5, 5);
    let h = build_hamiltonian(&model, &trunc, &MemoryBudget::default()).unwrap();
    let es = diagonalize(&h).unwrap();
    let dense = h.to_dense();
    let psi = random_state(&mut rng, trunc);
    let times = [0.0, 0.3, 1.7, 4.0];
    let states = evolve(&es, &psi, &times).unwrap();
    assert_eq!(states[0], psi);
    for (t, s) in times.iter().zip(&states) {
        let oracle = taylor_propagate(&dense, psi.amplitudes(), *t);
        let err = s.amplitudes().iter().zip(&oracle).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "t={t}: {err}");
    }
}

#[test]
fn stationary_states() {
    let (_, trunc, es) = pe_system(0.0075, 8);
    for n in [0, 5, 40] {
        let v = QuantumState::new(trunc, es.eigenvector(n)).unwrap();
        let out = evolve(&es, &v, &[2.5]).unwrap();
        assert!((v.overlap(&out[0]).unwrap().norm() - 1.0).abs() < 1e-10);
        let expect = Complex::from_polar(1.0, -es.eigenvalue(n) * 2.5);
        assert!((v.overlap(&out[0]).unwrap() - expect).norm() < 1e-10);
        let ds = density_spectrum(&es, &v, DEFAULT_DENSITY_FLOOR).unwrap();
        assert_eq!(ds.pairs.len(), 1);
        assert!((ds.pairs[0].0 - es.eigenvalue(n)).abs() < 1e-12);
        assert!((ds.pairs[0].1 - 1.0).abs() < 1e-10);
        assert!((ds.participation_ratio - 1.0).abs() < 1e-9);
    }
}

#[test]
fn evolve_rejects_bad_input() {
    let (_, _, es) = pe_system(0.0, 2);
    let other = QuantumState::basis_state(BasisTruncation::oscillators(3, 3), 0, 0).unwrap();
    assert!(evolve(&es, &other, &[1.0]).is_err());
    let psi = QuantumState::basis_state(*es.truncation(), 0, 0).unwrap();
    assert!(evolve(&es, &psi, &[-1.0]).is_err());
}

#[test]
fn unitarity_and_population_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (_, trunc, es) = pe_system(0.0075, 7);
    for _ in 0..100 {
        let psi = random_state(&mut rng, trunc);
        let t = rng.random_range(0.0..500.0);
        let out = evolve(&es, &psi, &[t]).unwrap();
        assert!((out[0].norm() - 1.0).abs() < 1e-10);
    }
    let psi = random_state(&mut rng, trunc);
    let rho0 = density_spectrum(&es, &psi, 0.0).unwrap();
    assert!((rho0.total - 1.0).abs() < 1e-8);
    assert_eq!(rho0.pairs.len(), es.len());
    let times: Vec<f64> = (0..10).map(|k| 3.7 * k as f64).collect();
    let states = evolve(&es, &psi, &times).unwrap();
    for _ in 0..20 {
        let n = rng.random_range(0..es.len());
        let vn = es.eigenvector(n);
        for s in &states {
            let p: C = vn.iter().zip(s.amplitudes()).map(|(a, b)| a.conj() * b).sum();
            assert!((p.norm_sqr() - rho0.pairs[n].1).abs() < 1e-8);
        }
    }
}

#[test]
fn reduced_density_examples() {
    let trunc = BasisTruncation::oscillators(2, 2);
    let a = [c(0.6), C::new(0.0, 0.8), c(0.0)];
    let b = [c(0.0), c(1.0 / 2f64.sqrt()), C::new(0.0, -1.0 / 2f64.sqrt())];
    let prod = QuantumState::product(trunc, &a, &b).unwrap();
    let rho = reduced_density(&prod, Subsystem::Mode1).unwrap();
    assert!((rho.purity() - 1.0).abs() < 1e-10);
    for i in 0..3 {
        for j in 0..3 {
            assert!((rho.matrix[[i, j]] - a[i] * a[j].conj()).norm() < 1e-12);
        }
    }
    assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-9);

    let s = 1.0 / 2f64.sqrt();
    let mut amps = vec![c(0.0); 9];
    amps[trunc.index(0, 0)] = c(s);
    amps[trunc.index(1, 1)] = c(s);
    let bell = QuantumState::new(trunc, amps).unwrap();
    for sub in [Subsystem::Mode1, Subsystem::Mode2] {
        let rho = reduced_density(&bell, sub).unwrap();
        assert!((rho.matrix[[0, 0]] - c(0.5)).norm() < 1e-12);
        assert!((rho.matrix[[1, 1]] - c(0.5)).norm() < 1e-12);
        assert!(rho.matrix[[0, 1]].norm() < 1e-12 && rho.matrix[[2, 2]].norm() < 1e-12);
        assert!((von_neumann_entropy(&rho).unwrap() - LN_2).abs() < 1e-10);
    }
    assert!(reduced_density(&bell, Subsystem::Atom).is_err());
}

#[test]
fn reduced_density_and_entropy_match_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trunc = BasisTruncation::oscillators(3, 3);
    for _ in 0..100 {
        let psi = random_state(&mut rng, trunc);
        for (sub, factor) in [(Subsystem::Mode1, 0), (Subsystem::Mode2, 1)] {
            let rho = reduced_density(&psi, sub).unwrap();
            let oracle = brute_reduced(&psi, factor);
            let err = (&rho.matrix - &oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "{err}");
            assert!((rho.trace() - c(1.0)).norm() < 1e-10);
            let s = von_neumann_entropy(&rho).unwrap();
            assert!((s - entropy_oracle(&oracle)).abs() < 1e-10);
        }
    }
}

#[test]
fn entropy_values() {
    let mk = |d: &[f64]| ReducedDensity {
        matrix: Array2::from_diag(&ndarray::Array1::from_iter(d.iter().map(|x| c(*x)))),
        subsystem: Subsystem::Mode1,
    };
    assert!((von_neumann_entropy(&mk(&[0.5, 0.5])).unwrap() - LN_2).abs() < 1e-10);
    let expect = 0.5 * LN_2 + 0.5 * 4f64.ln();
    assert!((von_neumann_entropy(&mk(&[0.5, 0.25, 0.25])).unwrap() - expect).abs() < 1e-10);
    assert!((expect - 1.039721).abs() < 1e-6);
    assert!(von_neumann_entropy(&mk(&[1.0 + 5e-9, -5e-9])).unwrap().abs() < 1e-12);
    assert!(matches!(von_neumann_entropy(&mk(&[1.1, -0.1])), Err(Error::InvalidDensity { .. })));
}

#[test]
fn uncoupled_entropy_stays_zero() {
    let (model, trunc, es) = pe_system(0.0, 30);
    let psi = initial_coherent_state(&model, &PhasePoint::new(1.0, 0.5, -1.0, 1.2), &trunc).unwrap();
    let curve = entropy_curve(&es, &psi, 100.0, 0.5, Subsystem::Mode1).unwrap();
    assert_eq!(curve.len(), 201);
    assert!(curve.values.iter().all(|s| *s < 1e-8));
}

#[test]
fn coupled_entropy_properties() {
    let (model, trunc, es) = pe_system(0.2, 30);
    let psi = initial_coherent_state(&model, &PhasePoint::new(1.0, 0.5, -1.0, 1.2), &trunc).unwrap();
    let c1 = entropy_curve(&es, &psi, 40.0, 0.25, Subsystem::Mode1).unwrap();
    let c2 = entropy_curve(&es, &psi, 40.0, 0.25, Subsystem::Mode2).unwrap();
    assert!(c1.values[0] < 1e-8);
    assert!(c1.s_max > 0.1);
    let bound = 31f64.ln();
    for (a, b) in c1.values.iter().zip(&c2.values) {
        assert!((a - b).abs() < 1e-8);
        assert!(*a >= 0.0 && *a <= bound);
    }
    let k = c1.values.iter().position(|v| *v == c1.s_max).unwrap();
    assert_eq!(c1.t_of_max, c1.times[k]);
    // the pruned, chunked path agrees with evolve -> reduced_density
    let states = evolve(&es, &psi, &c1.times[..20]).unwrap();
    for (s, v) in states.iter().zip(&c1.values) {
        let direct = von_neumann_entropy(&reduced_density(s, Subsystem::Mode1).unwrap()).unwrap();
        assert!((direct - v).abs() < 1e-10);
    }
    let mut buf = Vec::new();
    c1.write_csv(&mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("t,S_V\n0.0000000000000000e0,"));
}

#[test]
fn plateau_doubling() {
    let (model, trunc, es) = pe_system(0.2, 30);
    let psi = initial_coherent_state(&model, &PhasePoint::new(1.0, 0.5, -1.0, 1.2), &trunc).unwrap();
    let p = entropy_curve_plateau(&es, &psi, 20.0, 0.5, Subsystem::Mode1, 1e-3, 6).unwrap();
    let full = entropy_curve(&es, &psi, *p.curve.times.last().unwrap(), 0.5, Subsystem::Mode1).unwrap();
    assert_eq!(p.curve.times.len(), full.times.len());
    assert!((p.curve.s_max - full.s_max).abs() < 1e-12);
    assert!(p.doublings >= 1);
}

#[test]
fn jaynes_cummings_entropy_both_sides() {
    let model: ModelSpec<f64> = JaynesCummings::natural(0.4, 0.25, 5).unwrap().into();
    let trunc = BasisTruncation::jaynes_cummings(40, 5);
    let h = build_hamiltonian(&model, &trunc, &MemoryBudget::default()).unwrap();
    let es = diagonalize(&h).unwrap();
    // counter-rotating terms keep only excitation parity
    assert_eq!(es.block_dims().len(), 2);
    let psi = initial_coherent_state(&model, &PhasePoint::new(0.5, -1.0, 1.0, 2.0), &trunc).unwrap();
    let field = entropy_curve(&es, &psi, 30.0, 0.5, Subsystem::Field).unwrap();
    let atom = entropy_curve(&es, &psi, 30.0, 0.5, Subsystem::Atom).unwrap();
    for (a, b) in field.values.iter().zip(&atom.values) {
        assert!((a - b).abs() < 1e-8);
        assert!(*b <= 6f64.ln() + 1e-12);
    }
    assert!(atom.s_max > 0.05);
}

#[test]
fn f32_pipeline() {
    let model: ModelSpec<f32> = PullenEdmonds::natural(0.2).into();
    let trunc = BasisTruncation::oscillators(12, 12);
    let h = build_hamiltonian(&model, &trunc, &MemoryBudget::default()).unwrap();
    let es = diagonalize(&h).unwrap();
    let psi = QuantumState::basis_state(trunc, 1, 0).unwrap();
    let curve = entropy_curve(&es, &psi, 5.0, 0.5, Subsystem::Mode1).unwrap();
    assert!(curve.values.iter().all(|s| s.is_finite() && *s >= 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn completeness_of_populations(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_hermitian(&mut rng, 12, seed % 2 == 0);
        let trunc = BasisTruncation::oscillators(2, 3);
        let es = diagonalize(&HermitianOperator::from_dense(trunc, &m).unwrap()).unwrap();
        let psi = random_state(&mut rng, trunc);
        let ds = density_spectrum(&es, &psi, 0.0).unwrap();
        prop_assert!((ds.total - 1.0).abs() < 1e-8);
        prop_assert!(ds.pairs.iter().all(|p| p.1 >= 0.0));
        prop_assert!(ds.participation_ratio >= 1.0 - 1e-12 && ds.participation_ratio <= 12.0 + 1e-9);
    }

    #[test]
    fn entropy_bounded_by_smaller_side(seed in any::<u64>(), n1 in 0usize..4, n2 in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trunc = BasisTruncation::oscillators(n1, n2);
        let psi = random_state(&mut rng, trunc);
        let s1 = von_neumann_entropy(&reduced_density(&psi, Subsystem::Mode1).unwrap()).unwrap();
        let s2 = von_neumann_entropy(&reduced_density(&psi, Subsystem::Mode2).unwrap()).unwrap();
        prop_assert!((s1 - s2).abs() < 1e-8);
        prop_assert!(s1 <= ((n1.min(n2) + 1) as f64).ln() + 1e-10);
    }
}
