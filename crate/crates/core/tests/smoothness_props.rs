use decentral_core::linalg::Mat;
use decentral_core::problem::{CsrMatrix, LogisticObjective, Objective, QuadraticObjective};
use decentral_core::smoothness::{aggregate_l, estimate_smoothness_grad_diff, exact_smoothness};
use proptest::prelude::*;

/// Orthogonal change of basis from a product of plane rotations.
fn rotated(spectrum: &[f64], angles: &[f64]) -> Mat<f64> {
    let d = spectrum.len();
    let mut q = Mat::identity(d);
    for (k, &t) in angles.iter().enumerate() {
        let (i, j) = (k % d, (k + 1) % d);
        let mut r = Mat::identity(d);
        r[(i, i)] = t.cos();
        r[(j, j)] = t.cos();
        r[(i, j)] = -t.sin();
        r[(j, i)] = t.sin();
        q = r.matmul(&q);
    }
    q.transpose().matmul(&Mat::diag(spectrum)).matmul(&q).symmetrized()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_on_known_spectrum(spec in prop::collection::vec(0.05..5.0f64, 2..6), angles in prop::collection::vec(0.0..6.3f64, 6)) {
        let (lo, hi) = spec.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        // well separated extremes keep power iteration inside its budget
        prop_assume!(spec.iter().filter(|&&v| v > 0.9 * hi).count() == 1);
        prop_assume!(spec.iter().filter(|&&v| v < 1.1 * lo).count() == 1);
        let q: Objective<f64> = QuadraticObjective::new(rotated(&spec, &angles), vec![0.0; spec.len()], 0.0).unwrap().into();
        let (mu, l) = exact_smoothness(&q).unwrap();
        prop_assert!((l - hi).abs() <= 1e-9 * hi, "{l} vs {hi}");
        prop_assert!((mu - lo).abs() <= 1e-9 * lo, "{mu} vs {lo}");
    }

    #[test]
    fn grad_diff_never_exceeds_exact(
        rows in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 3), 1..5),
        reg in 0.0..0.3f64,
        seed in any::<u64>(),
    ) {
        let sparse: Vec<Vec<(usize, f64)>> = rows.iter().map(|r| r.iter().copied().enumerate().collect()).collect();
        let m = rows.len();
        let f: Objective<f64> = LogisticObjective::new(CsrMatrix::from_rows(3, &sparse).unwrap(), vec![1.0; m], reg).unwrap().into();
        let (_, exact) = exact_smoothness(&f).unwrap();
        let mut prev = 0.0;
        for trials in [10, 100, 1000] {
            let est = estimate_smoothness_grad_diff(&f, 1.0, trials, 1e-4, seed).unwrap();
            prop_assert!(est <= exact + 1e-9, "{est} > {exact}");
            prop_assert!(est >= prev);
            prev = est;
        }
    }

    #[test]
    fn aggregate_symmetries(ls in prop::collection::vec(0.1..10.0f64, 1..6), sizes in prop::collection::vec(1usize..50, 6), t in 0.1..10.0f64) {
        let sizes = &sizes[..ls.len()];
        let base = aggregate_l(&ls, sizes).unwrap();
        let mut rev_l = ls.clone();
        rev_l.reverse();
        let rev_s: Vec<usize> = sizes.iter().rev().copied().collect();
        prop_assert!((aggregate_l(&rev_l, &rev_s).unwrap() - base).abs() <= 1e-12 * base);
        let scaled: Vec<f64> = ls.iter().map(|l| t * l).collect();
        prop_assert!((aggregate_l(&scaled, sizes).unwrap() - t * base).abs() <= 1e-12 * t * base);
    }
}
