use decentral_core::algorithms::{run, run_algorithm1, run_dgd, run_gd, Method, MethodConfig, Threshold};
use decentral_core::problem::{Objective, ProblemInstance, QuadraticObjective};
use proptest::prelude::*;

fn quad(curv: &[f64], center: &[f64]) -> Objective<f64> {
    QuadraticObjective::diagonal(curv, center).unwrap().into()
}

fn single(curv: Vec<f64>, center: Vec<f64>) -> ProblemInstance<f64> {
    let lo = curv.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = curv.iter().copied().fold(0.0, f64::max);
    ProblemInstance::uniform(vec![quad(&curv, &center)], vec![lo], vec![hi]).unwrap()
}

fn max_dev(a: &[Vec<Vec<f64>>], b: &[Vec<Vec<f64>>]) -> f64 {
    a.iter().zip(b).flat_map(|(x, y)| x[0].iter().zip(&y[0]).map(|(u, v)| (u - v).abs())).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn one_agent_collapses_to_gd(
        curv in prop::collection::vec(0.1..4.0f64, 3),
        center in prop::collection::vec(-2.0..2.0f64, 3),
        x0 in prop::collection::vec(-2.0..2.0f64, 3),
    ) {
        let inst = single(curv, center);
        let gd = run_gd(&inst, &MethodConfig::new(Method::Gd, 25).with_x0(x0.clone())).unwrap();
        for m in [Method::Algorithm1, Method::Dgd, Method::GradientTracking] {
            let tr = run(&inst, &MethodConfig::new(m, 25).with_x0(x0.clone())).unwrap();
            prop_assert_eq!(&tr.iterates, &gd.iterates, "{}", m.name());
            prop_assert_eq!(&tr.losses, &gd.losses);
        }
    }

    #[test]
    fn homogeneous_steps_equal_gd(
        l in 0.5..4.0f64,
        centers in prop::collection::vec(-2.0..2.0f64, 3),
        eps in 0.0..0.5f64,
    ) {
        let locals = centers.iter().map(|&c| quad(&[l, l], &[c, -c])).collect();
        let inst = ProblemInstance::uniform(locals, vec![l; 3], vec![l; 3]).unwrap();
        let x0 = vec![1.5, -0.5];
        let gd = run_gd(&inst, &MethodConfig::new(Method::Gd, 40).with_x0(x0.clone())).unwrap();
        let a1 = run_algorithm1(&inst, &MethodConfig::new(Method::Algorithm1, 40).with_x0(x0).with_threshold(Threshold::Absolute(eps))).unwrap();
        prop_assert!(max_dev(&gd.iterates, &a1.iterates) <= 1e-12);
    }

    #[test]
    fn gd_descends(curv in prop::collection::vec(0.1..4.0f64, 4), center in prop::collection::vec(-2.0..2.0f64, 4)) {
        let inst = single(curv, center);
        let tr = run_gd(&inst, &MethodConfig::new(Method::Gd, 60).with_x0(vec![3.0; 4])).unwrap();
        let slack = 1e-14 * (1.0 + tr.losses[0].abs());
        prop_assert!(tr.losses.windows(2).all(|w| w[1] <= w[0] + slack));
    }

    #[test]
    fn switch_is_permanent(c1 in 0.2..1.0f64, c2 in 1.0..4.0f64, eps in 0.01..0.5f64) {
        let inst = ProblemInstance::uniform(vec![quad(&[c1], &[1.0]), quad(&[c2], &[-1.0])], vec![c1, c2], vec![c1, c2]).unwrap();
        let tr = run_algorithm1(&inst, &MethodConfig::new(Method::Algorithm1, 80).with_x0(vec![2.0]).with_threshold(Threshold::Absolute(eps))).unwrap();
        if let Some(s) = tr.switch_iteration {
            let reset = 2.0 / (c1 + c2);
            prop_assert!(tr.alphas[s..].iter().all(|a| a.iter().all(|&v| v == reset)));
            prop_assert!(tr.alphas[..s].iter().all(|a| a[0] == 1.0 / c1 && a[1] == 1.0 / c2));
        }
    }

    #[test]
    fn full_averaging_dgd_matches_server(centers in prop::collection::vec(-2.0..2.0f64, 3), curv in prop::collection::vec(0.2..3.0f64, 3)) {
        let locals = centers.iter().zip(&curv).map(|(&c, &k)| quad(&[k], &[c])).collect();
        let inst = ProblemInstance::uniform(locals, curv.clone(), curv).unwrap();
        let a1 = run_algorithm1(&inst, &MethodConfig::new(Method::Algorithm1, 30).with_x0(vec![0.5]).with_threshold(Threshold::Never)).unwrap();
        let dgd = run_dgd(&inst, &MethodConfig::new(Method::Dgd, 30).with_x0(vec![0.5])).unwrap();
        for (k, agents) in dgd.iterates.iter().enumerate() {
            for x in agents {
                prop_assert!((x[0] - a1.iterates[k][0][0]).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn full_participation_is_deterministic() {
    let inst = ProblemInstance::uniform(vec![quad(&[0.5], &[1.0]), quad(&[2.0], &[-1.0])], vec![0.5, 2.0], vec![0.5, 2.0]).unwrap();
    let base = MethodConfig::new(Method::Algorithm1, 50).with_x0(vec![1.0]);
    let a = run_algorithm1(&inst, &base).unwrap();
    let b = run_algorithm1(&inst, &base.clone().with_participation(1.0, 99)).unwrap();
    assert_eq!(a, b);
    let p1 = run_algorithm1(&inst, &base.clone().with_participation(0.5, 7)).unwrap();
    let p2 = run_algorithm1(&inst, &base.with_participation(0.5, 7)).unwrap();
    assert_eq!(p1, p2);
    assert!(p1.participants.iter().any(|p| p.len() < 2));
}

#[test]
fn switch_removes_bias() {
    let inst = ProblemInstance::uniform(vec![quad(&[1.0], &[1.0]), quad(&[2.0], &[-1.0])], vec![1.0, 2.0], vec![1.0, 2.0]).unwrap();
    let tr = run_algorithm1(&inst, &MethodConfig::new(Method::Algorithm1, 500).with_x0(vec![1.0]).with_threshold(Threshold::Absolute(0.1))).unwrap();
    assert!((tr.final_point[0] + 1.0 / 3.0).abs() <= 1e-6);
}
