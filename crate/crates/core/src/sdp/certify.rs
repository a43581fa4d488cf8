use serde::Serialize;

use super::{relative_gap, SdpSolution, StandardSdp};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize)]
pub struct ConstraintCheck {
    pub index: usize,
    pub name: String,
    pub violation: f64,
}

/// Independent check of a returned solution against the original problem.
#[derive(Clone, Debug, Serialize)]
pub struct CertificationReport {
    pub passed: bool,
    pub max_violation: f64,
    pub min_eigenvalue: f64,
    pub duality_gap: f64,
    pub objective_mismatch: f64,
    /// Constraints violated by more than the feasibility tolerance, worst first.
    pub violated: Vec<ConstraintCheck>,
}

/// Re-evaluates every constraint, the PSD condition and the duality gap of
/// `sol` on `sdp`.
pub fn certify<T: Scalar>(sdp: &StandardSdp<T>, sol: &SdpSolution<T>, tol_feas: T, tol_gap: T) -> CertificationReport {
    let mut violated: Vec<ConstraintCheck> = sdp
        .constraints
        .iter()
        .enumerate()
        .filter_map(|(index, c)| {
            let v = c.violation(&sol.gram, &sol.free);
            (v > tol_feas).then(|| ConstraintCheck { index, name: c.name.clone(), violation: v.to_f64_lossy() })
        })
        .collect();
    violated.sort_by(|a, b| b.violation.total_cmp(&a.violation));
    let max_violation = sdp.max_violation(&sol.gram, &sol.free);
    let min_eigenvalue = sol.gram.sym_eigen().min();
    let primal = sdp.objective(&sol.gram, &sol.free);
    let gap = relative_gap(primal, sol.dual_value);
    let objective_mismatch = (primal - sol.primal_value).abs();
    let scale = T::one() + sol.gram.max_abs();
    let passed = violated.is_empty()
        && min_eigenvalue >= -tol_feas * scale
        && gap <= tol_gap
        && objective_mismatch <= tol_gap * (T::one() + primal.abs());
    CertificationReport {
        passed,
        max_violation: max_violation.to_f64_lossy(),
        min_eigenvalue: min_eigenvalue.to_f64_lossy(),
        duality_gap: gap.to_f64_lossy(),
        objective_mismatch: objective_mismatch.to_f64_lossy(),
        violated,
    }
}
