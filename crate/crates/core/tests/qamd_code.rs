use qtamper_core::field::{FqPoly, PrimeField};
use qtamper_core::haar::Seed;
use qtamper_core::qamd::{
    difference_polynomial, qamd_security_scan, qamd_tamper_experiment, DenseSimulator, QamdParams, ScanMode,
};

#[test]
fn roots_never_exceed_degree_d_plus_one() {
    let p = QamdParams::new(5, 2).unwrap();
    let mut rng = Seed(12).rng();
    for _ in 0..2000 {
        let s: Vec<u64> = (0..2).map(|_| rng.below(5)).collect();
        let x: Vec<u64> = (0..4).map(|_| rng.below(5)).collect();
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        let poly = difference_polynomial(&p, &s, &x);
        assert!(!poly.is_zero());
        assert!(poly.count_roots().unwrap() <= 3);
    }
}

#[test]
fn random_scan_d2_respects_bound() {
    let p = QamdParams::new(5, 2).unwrap();
    let rep = qamd_security_scan(&p, ScanMode::Random { trials: 20_000 }, Seed(3), true).unwrap();
    assert!(rep.passed, "{rep:?}");
    assert!(rep.max_prob <= 9.0 / 25.0 + 1e-12);
}

#[test]
fn exhaustive_scan_q7_small_slice_matches_dense() {
    // every tampering on one message, full dense comparison
    let p = QamdParams::new(7, 1).unwrap();
    let sim = DenseSimulator::new(&p).unwrap();
    let s = [3u64];
    let mut worst: f64 = 0.0;
    for t in 1..7u64.pow(6) {
        let mut digits = [0u64; 6];
        let mut rest = t;
        for d in digits.iter_mut().rev() {
            *d = rest % 7;
            rest /= 7;
        }
        let (x, z) = digits.split_at(3);
        let exact = qamd_tamper_experiment(&p, &s, x, z).unwrap();
        let dense = sim.distribution(&s, x, z).unwrap();
        worst = worst.max(exact.max_deviation(&dense));
        assert!(exact.p_diff() <= 4.0 / 49.0 + 1e-12);
    }
    assert!(worst < 1e-9);
}

#[test]
fn field_helpers_agree_with_tag() {
    let p = QamdParams::new(11, 1).unwrap();
    let f = PrimeField::new(11).unwrap();
    // f(s, r) = s r + r³
    let poly = FqPoly::new(f, &[0, 4, 0, 1]);
    for r in 0..11 {
        assert_eq!(p.tag(&[4], r), poly.eval_raw(r));
    }
}
