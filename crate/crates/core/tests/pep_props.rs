use decentral_core::pep::{assemble_sdp, AgentClass, PepObjective, PepProblem};
use decentral_core::sdp::{SolveOptions, SolveStatus};

fn value(p: &PepProblem<f64>) -> f64 {
    let sol = assemble_sdp(p).unwrap().solve(&SolveOptions::default()).unwrap();
    assert!(matches!(sol.status, SolveStatus::Optimal | SolveStatus::NumericalLimit), "{:?}", sol.status);
    assert!(sol.duality_gap <= 1e-6 && sol.max_violation <= 1e-6);
    sol.primal_value
}

fn class(mu: f64, l: f64) -> AgentClass<f64> {
    AgentClass { mu, l }
}

#[test]
fn gd_matches_closed_form() {
    for k in 1..=4 {
        let p = PepProblem::new(k, vec![class(0.1, 1.0)], 1.0, PepObjective::MeanSqDistance);
        let v = value(&p);
        let want = 0.9f64.powi(2 * k as i32);
        assert!((v - want).abs() <= 1e-5 * want, "K={k}: {v} vs {want}");
    }
}

#[test]
fn duplicated_agents_keep_the_value() {
    for obj in [PepObjective::MeanSqDistance, PepObjective::FunctionGap] {
        for k in [1, 3] {
            let one = value(&PepProblem::new(k, vec![class(0.2, 1.5)], 1.0, obj));
            let two = value(&PepProblem::new(k, vec![class(0.2, 1.5); 2], 1.0, obj));
            assert!((one - two).abs() <= 1e-6 * (1.0 + one.abs()), "{obj:?} K={k}: {one} vs {two}");
        }
    }
    // heterogeneous pattern replicated twice
    let base = vec![class(0.1, 1.0 / 3.0), class(0.1, 3.0)];
    let a = value(&PepProblem::new(2, base.clone(), 1.0, PepObjective::MeanSqDistance));
    let b = value(&PepProblem::new(2, [base.clone(), base].concat(), 1.0, PepObjective::MeanSqDistance));
    assert!((a - b).abs() <= 1e-6 * (1.0 + a), "{a} vs {b}");
}

#[test]
fn value_does_not_grow_with_k() {
    let classes = vec![class(0.1, 1.0 / 3.0), class(0.1, 3.0)];
    for obj in [PepObjective::MeanSqDistance, PepObjective::FunctionGap] {
        for switch in [None, Some(0), Some(2)] {
            let vals: Vec<f64> = (1..=5).map(|k| value(&PepProblem::new(k, classes.clone(), 1.0, obj).with_switch(switch))).collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-6) + 1e-9), "{obj:?} {switch:?}: {vals:?}");
        }
    }
}

#[test]
fn radii_scale_quadratically() {
    let classes = vec![class(0.1, 0.5), class(0.1, 1.5)];
    let base = value(&PepProblem::new(3, classes.clone(), 1.0, PepObjective::MeanSqDistance).with_radius_star(0.5));
    let t = 3.0;
    let scaled = value(&PepProblem::new(3, classes, t, PepObjective::MeanSqDistance).with_radius_star(0.5 * t));
    assert!((scaled - t * t * base).abs() <= 1e-5 * t * t * base, "{scaled} vs {}", t * t * base);
}

#[test]
fn brute_force_quadratics_bound_gd() {
    // every 1-D quadratic c/2 x² in the class stays below the PEP value
    let k = 3;
    let pep = value(&PepProblem::new(k, vec![class(0.1, 1.0)], 1.0, PepObjective::MeanSqDistance));
    let best = (0..10_000)
        .map(|i| 0.1 + 0.9 * i as f64 / 9_999.0)
        .map(|c| (1.0 - c).powi(2 * k as i32))
        .fold(0.0, f64::max);
    assert!(best <= pep * (1.0 + 1e-6) && (pep - best).abs() <= 1e-5 * best);
}
