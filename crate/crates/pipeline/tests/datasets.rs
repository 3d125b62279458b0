use qcorr::datasets::{load_cics, DatasetId};
use qcorr_core::models::ModelSpec;

const SQRT10: f64 = 3.1622776601683795;

fn coords(id: DatasetId, index: usize) -> (f64, f64, f64) {
    let d = load_cics(id).unwrap();
    let e = d.entry(index).unwrap();
    (e.q1, e.p1, e.q2)
}

fn close(a: (f64, f64, f64), b: (f64, f64, f64)) -> bool {
    (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12 && (a.2 - b.2).abs() < 1e-12
}

#[test]
fn cardinalities() {
    let count = |id| load_cics(id).unwrap().len();
    assert_eq!(count(DatasetId::PeRegular), 27);
    assert_eq!(count(DatasetId::PeMixed), 27);
    assert_eq!(count(DatasetId::JcRegular), 15);
    assert_eq!(count(DatasetId::JcMixed), 16);
    assert_eq!(count(DatasetId::JcReduced), 15);
    let mixed = load_cics(DatasetId::PeMixed).unwrap();
    let chaotic = mixed.entries.iter().filter(|e| e.is_chaotic()).count();
    assert_eq!((chaotic, mixed.len() - chaotic), (4, 23));
}

#[test]
fn shared_b_c_point_is_one_entry() {
    for id in [DatasetId::PeRegular, DatasetId::PeMixed] {
        let d = load_cics(id).unwrap();
        let shared: Vec<_> = d.entries.iter().filter(|e| e.label == "B/C").collect();
        assert_eq!(shared.len(), 1, "{id}");
        let mut seen = std::collections::HashSet::new();
        for e in &d.entries {
            assert!(seen.insert(e.raw.clone()), "{id}: duplicate {:?}", e.raw);
        }
    }
}

#[test]
fn spot_values_regular_oscillators() {
    let id = DatasetId::PeRegular;
    assert!(close(coords(id, 1), (0.0, 0.0, SQRT10)));
    assert!(close(coords(id, 3), (2.0 / 9.0 * SQRT10, 0.242 * SQRT10, SQRT10)));
    assert!(close(coords(id, 27), (0.0, 3.25576 * SQRT10, SQRT10)));
    let d = load_cics(id).unwrap();
    assert_eq!((d.energy, d.entries[0].label.as_str()), (58.0, "A"));
    let ModelSpec::PullenEdmonds(pe) = d.model else { panic!("oscillator model expected") };
    assert_eq!(pe.lambda, 0.0075);
}

#[test]
fn spot_values_mixed_oscillators() {
    let id = DatasetId::PeMixed;
    let q = SQRT10 / 4.0;
    assert!(close(coords(id, 1), (q, 2.2427 * SQRT10, q)));
    assert!(close(coords(id, 6), (SQRT10 / 36.0, 0.2041 * SQRT10, q)));
    assert!(close(coords(id, 27), (q, 5.4795 * SQRT10, q)));
    assert_eq!(load_cics(id).unwrap().energy, 150.75);
}

#[test]
fn spot_values_jaynes_cummings() {
    assert!(close(coords(DatasetId::JcRegular, 1), (0.1, -5.005, 0.0)));
    assert!(close(coords(DatasetId::JcRegular, 13), (0.1, 4.9542, 0.0)));
    assert!(close(coords(DatasetId::JcRegular, 15), (0.1, 5.005, 0.0)));
    assert!(close(coords(DatasetId::JcMixed, 5), (2.21, -2.2924, 0.0)));
    assert!(close(coords(DatasetId::JcMixed, 16), (0.1, 3.9, 0.0)));
    let d = load_cics(DatasetId::JcRegular).unwrap();
    let ModelSpec::JaynesCummings(jc) = d.model else { panic!("Jaynes-Cummings model expected") };
    assert_eq!((jc.two_j, jc.g, jc.g_prime, d.energy), (58, 0.25, 0.0, 40.0));
    let d = load_cics(DatasetId::JcMixed).unwrap();
    let ModelSpec::JaynesCummings(jc) = d.model else { panic!("Jaynes-Cummings model expected") };
    assert_eq!((jc.two_j, jc.g, jc.g_prime, d.energy), (50, 0.4, 0.25, 35.0));
}

#[test]
fn every_entry_lies_on_its_energy_shell() {
    for id in DatasetId::ALL {
        let d = load_cics(id).unwrap();
        for e in &d.entries {
            let r = d.resolve(e).unwrap_or_else(|err| panic!("{id} #{}: {err}", e.index));
            let x = r.point;
            assert!(x.p2 > 0.0);
            let energy = d.model.energy(&x).unwrap();
            assert!((energy - d.energy).abs() <= 1e-10 * d.energy, "{id} #{}: {energy}", e.index);
            if r.p1_adjusted {
                assert!((x.p1 - e.p1).abs() <= e.p1_half_ulp * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn only_the_last_mixed_d_entry_needs_adjustment() {
    let d = load_cics(DatasetId::PeMixed).unwrap();
    let adjusted: Vec<usize> =
        d.entries.iter().filter(|e| d.resolve(e).unwrap().p1_adjusted).map(|e| e.index).collect();
    assert_eq!(adjusted, vec![27]);
    for id in [DatasetId::PeRegular, DatasetId::JcRegular, DatasetId::JcMixed, DatasetId::JcReduced] {
        let d = load_cics(id).unwrap();
        assert!(d.entries.iter().all(|e| !d.resolve(e).unwrap().p1_adjusted), "{id}");
    }
}

#[test]
fn reduced_family_is_the_scaled_regular_family() {
    let full = load_cics(DatasetId::JcRegular).unwrap();
    let reduced = load_cics(DatasetId::JcReduced).unwrap();
    let k = (9.0f64 / 58.0).sqrt();
    assert!((reduced.energy - 40.0 * 9.0 / 58.0).abs() < 1e-12);
    for (a, b) in full.entries.iter().zip(&reduced.entries) {
        let xa = full.resolve(a).unwrap().point;
        let xb = reduced.resolve(b).unwrap().point;
        for (u, v) in xa.to_array().iter().zip(xb.to_array()) {
            assert!((u * k - v).abs() < 1e-12);
        }
        // inside the spin disc q1^2 + p1^2 < 4J = 18
        assert!(xb.q1 * xb.q1 + xb.p1 * xb.p1 < 18.0);
    }
}
