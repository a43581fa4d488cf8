//! Semidefinite programs over one PSD block plus a free vector, and a dense
//! primal-dual interior-point solver for them.
//!
//! Canonical form:
//!
//! ```text
//! maximize    ⟨C, G⟩ + cᵀF
//! subject to  ⟨A_j, G⟩ + b_jᵀF  (≤ | =)  d_j      j = 1..m
//!             G ⪰ 0,  F free
//! ```
//!
//! Symmetric matrices are stored as sparse upper triangles, matching the SDPA
//! convention: an entry `(i, j, v)` with `i < j` stands for both `G_ij` and
//! `G_ji`, so it contributes `2 v G_ij` to an inner product.

mod certify;
mod ipm;
mod presolve;
pub mod sdpa;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

pub use certify::{certify, CertificationReport, ConstraintCheck};

/// Sparse symmetric matrix stored as its upper triangle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymSparse<T> {
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> SymSparse<T> {
    pub fn zero() -> Self {
        Self { entries: Vec::new() }
    }

    /// Entries may come in any order and in either triangle; duplicates are
    /// summed and exact zeros dropped.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for (i, j, v) in entries {
            let key = if i <= j { (i, j) } else { (j, i) };
            *acc.entry(key).or_insert_with(T::zero) += v;
        }
        Self {
            entries: acc
                .into_iter()
                .filter(|&(_, v)| v != T::zero())
                .map(|((i, j), v)| (i, j, v))
                .collect(),
        }
    }

    /// `coef · ½(u vᵀ + v uᵀ)` for sparse vectors `u`, `v`.
    pub fn sym_outer(coef: T, u: &[(usize, T)], v: &[(usize, T)]) -> Self {
        let mut acc = SymAccumulator::new();
        acc.add_sym_outer(coef, u, v);
        acc.finish()
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.iter().map(|&(_, j, _)| j).max()
    }

    /// `⟨A, G⟩ = trace(A Gᵀ)`
    pub fn inner(&self, g: &Mat<T>) -> T {
        let two = T::c(2.0);
        self.entries
            .iter()
            .map(|&(i, j, v)| {
                if i == j {
                    v * g[(i, i)]
                } else {
                    two * v * T::c(0.5) * (g[(i, j)] + g[(j, i)])
                }
            })
            .sum()
    }

    pub fn to_dense(&self, n: usize) -> Mat<T> {
        let mut m = Mat::zeros(n, n);
        for &(i, j, v) in &self.entries {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            entries: self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect(),
        }
    }
}

/// Incremental builder for [`SymSparse`] from symmetric outer products.
#[derive(Debug, Default)]
pub struct SymAccumulator<T> {
    acc: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> SymAccumulator<T> {
    pub fn new() -> Self {
        Self { acc: BTreeMap::new() }
    }

    /// Adds `coef · ½(u vᵀ + v uᵀ)`.
    pub fn add_sym_outer(&mut self, coef: T, u: &[(usize, T)], v: &[(usize, T)]) {
        let half = T::c(0.5) * coef;
        for &(i, ui) in u {
            for &(j, vj) in v {
                let key = if i <= j { (i, j) } else { (j, i) };
                // (i, j) and (j, i) each receive half of ui vj; stored once in
                // the upper triangle, diagonal entries receive both halves.
                let add = if i == j { coef * ui * vj } else { half * ui * vj };
                *self.acc.entry(key).or_insert_with(T::zero) += add;
            }
        }
    }

    pub fn finish(self) -> SymSparse<T> {
        SymSparse {
            entries: self
                .acc
                .into_iter()
                .filter(|&(_, v)| v != T::zero())
                .map(|((i, j), v)| (i, j, v))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    /// `⟨A, G⟩ + bᵀF ≤ d`
    LessEq,
    /// `⟨A, G⟩ + bᵀF = d`
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpConstraint<T> {
    pub name: String,
    pub mat: SymSparse<T>,
    /// Sparse coefficients on the free vector, sorted by index.
    pub vec: Vec<(usize, T)>,
    pub sense: Sense,
    pub rhs: T,
}

impl<T: Scalar> SdpConstraint<T> {
    pub fn lhs(&self, g: &Mat<T>, f: &[T]) -> T {
        self.mat.inner(g) + self.vec.iter().map(|&(k, v)| v * f[k]).sum::<T>()
    }

    /// Amount by which `(G, F)` violates the constraint (0 when satisfied).
    pub fn violation(&self, g: &Mat<T>, f: &[T]) -> T {
        let r = self.lhs(g, f) - self.rhs;
        match self.sense {
            Sense::LessEq => r.max(T::zero()),
            Sense::Eq => r.abs(),
        }
    }
}

/// `maximize ⟨C, G⟩ + cᵀF` subject to affine constraints and `G ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardSdp<T> {
    pub psd_dim: usize,
    pub free_dim: usize,
    pub objective_mat: SymSparse<T>,
    pub objective_vec: Vec<(usize, T)>,
    pub constraints: Vec<SdpConstraint<T>>,
}

impl<T: Scalar> StandardSdp<T> {
    pub fn new(psd_dim: usize, free_dim: usize) -> Self {
        Self {
            psd_dim,
            free_dim,
            objective_mat: SymSparse::zero(),
            objective_vec: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, c: SdpConstraint<T>) {
        self.constraints.push(c);
    }

    pub fn validate(&self) -> Result<()> {
        if self.psd_dim == 0 {
            return Err(Error::Contract("PSD block must have dimension >= 1".into()));
        }
        let check_mat = |m: &SymSparse<T>, what: &str| -> Result<()> {
            if m.max_index().is_some_and(|j| j >= self.psd_dim) {
                return Err(Error::Contract(format!("{what}: matrix index out of range")));
            }
            if m.entries().iter().any(|e| !e.2.is_finite()) {
                return Err(Error::Contract(format!("{what}: non-finite entry")));
            }
            Ok(())
        };
        let check_vec = |v: &[(usize, T)], what: &str| -> Result<()> {
            if v.iter().any(|&(k, x)| k >= self.free_dim || !x.is_finite()) {
                return Err(Error::Contract(format!("{what}: free-vector coefficient invalid")));
            }
            Ok(())
        };
        check_mat(&self.objective_mat, "objective")?;
        check_vec(&self.objective_vec, "objective")?;
        for c in &self.constraints {
            check_mat(&c.mat, &c.name)?;
            check_vec(&c.vec, &c.name)?;
            if !c.rhs.is_finite() {
                return Err(Error::Contract(format!("{}: non-finite rhs", c.name)));
            }
        }
        Ok(())
    }

    pub fn objective(&self, g: &Mat<T>, f: &[T]) -> T {
        self.objective_mat.inner(g) + self.objective_vec.iter().map(|&(k, v)| v * f[k]).sum::<T>()
    }

    pub fn max_violation(&self, g: &Mat<T>, f: &[T]) -> T {
        self.constraints
            .iter()
            .map(|c| c.violation(g, f))
            .fold(T::zero(), T::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// No `(G, F)` satisfies the constraints.
    Infeasible,
    /// The objective is unbounded above on the feasible set.
    Unbounded,
    /// Iteration budget or numerical accuracy exhausted before the tolerances
    /// were met; the returned point is the best iterate.
    NumericalLimit,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions<T> {
    pub tol_gap: T,
    pub tol_feas: T,
    pub max_iters: usize,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            tol_gap: T::c(1e-8),
            tol_feas: T::c(1e-8),
            max_iters: 100,
        }
    }
}

/// Per-iteration log of the interior-point method on the reduced problem.
#[derive(Clone, Debug, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// `⟨X, Z⟩ + sᵀy`, which equals `dual − primal` once the iterate is
    /// primal and dual feasible.
    pub complementarity: f64,
    /// `dual − primal − complementarity`: the part of the gap explained by
    /// the remaining residuals.
    pub residual_gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T> {
    pub status: SolveStatus,
    pub primal_value: T,
    pub dual_value: T,
    pub gram: Mat<T>,
    pub free: Vec<T>,
    /// Multipliers for the original constraints (zero for rows removed in
    /// presolve).
    pub multipliers: Vec<T>,
    pub max_violation: T,
    pub min_eigenvalue: T,
    /// `|primal − dual| / (1 + |primal| + |dual|)`
    pub duality_gap: T,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    pub presolve: PresolveStats,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PresolveStats {
    pub psd_dim_in: usize,
    pub psd_dim_out: usize,
    pub free_dim_in: usize,
    pub free_dim_out: usize,
    pub rows_in: usize,
    pub rows_out: usize,
    pub facial_rounds: usize,
}

/// One-line serializable summary of a solve.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionSummary {
    pub status: SolveStatus,
    pub primal_value: f64,
    pub dual_value: f64,
    pub duality_gap: f64,
    pub max_violation: f64,
    pub min_eigenvalue: f64,
    pub iterations: usize,
}

impl<T: Scalar> SdpSolution<T> {
    pub fn summary(&self) -> SolutionSummary {
        SolutionSummary {
            status: self.status,
            primal_value: self.primal_value.to_f64_lossy(),
            dual_value: self.dual_value.to_f64_lossy(),
            duality_gap: self.duality_gap.to_f64_lossy(),
            max_violation: self.max_violation.to_f64_lossy(),
            min_eigenvalue: self.min_eigenvalue.to_f64_lossy(),
            iterations: self.iterations,
        }
    }
}

pub(crate) fn relative_gap<T: Scalar>(p: T, d: T) -> T {
    (p - d).abs() / (T::one() + p.abs() + d.abs())
}

/// Solves `sdp` to the requested tolerances. Deterministic for fixed input.
pub fn solve<T: Scalar>(sdp: &StandardSdp<T>, opts: &SolveOptions<T>) -> Result<SdpSolution<T>> {
    sdp.validate()?;
    let reduced = presolve::reduce(sdp)?;
    let stats = reduced.stats();
    let outcome = match reduced.verdict {
        presolve::Verdict::Infeasible => ipm::Outcome::trivial(&reduced, SolveStatus::Infeasible),
        presolve::Verdict::Unbounded => ipm::Outcome::trivial(&reduced, SolveStatus::Unbounded),
        presolve::Verdict::Proceed => ipm::run(&reduced, opts),
    };
    let (gram, free, multipliers) = reduced.recover(&outcome.x, &outcome.xi, &outcome.y);
    let primal_value = sdp.objective(&gram, &free);
    let dual_value = outcome.dual_obj + reduced.obj_const;
    let max_violation = sdp.max_violation(&gram, &free);
    let min_eigenvalue = gram.sym_eigen().min();
    let duality_gap = relative_gap(primal_value, dual_value);
    // The interior point works on the reduced problem; an answer that misses the
    // tolerances once lifted back is not reported as optimal.
    let mut status = outcome.status;
    if status == SolveStatus::Optimal
        && (duality_gap > opts.tol_gap || max_violation > opts.tol_feas || min_eigenvalue < -opts.tol_feas)
    {
        status = SolveStatus::NumericalLimit;
    }
    Ok(SdpSolution {
        status,
        primal_value,
        dual_value,
        gram,
        free,
        multipliers,
        max_violation,
        min_eigenvalue,
        duality_gap,
        iterations: outcome.history.len(),
        history: outcome.history,
        presolve: stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(i: usize) -> Vec<(usize, f64)> {
        vec![(i, 1.0)]
    }

    #[test]
    fn sym_outer_matches_dense() {
        let u: Vec<(usize, f64)> = vec![(0, 1.0), (2, -2.0)];
        let v = vec![(1, 3.0), (2, 0.5)];
        let s = SymSparse::sym_outer(2.0, &u, &v).to_dense(3);
        let mut du = [0.0; 3];
        let mut dv = [0.0; 3];
        for &(i, x) in &u {
            du[i] = x;
        }
        for &(i, x) in &v {
            dv[i] = x;
        }
        for i in 0..3 {
            for j in 0..3 {
                let expect = du[i] * dv[j] + dv[i] * du[j];
                assert!((s[(i, j)] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn inner_product_is_trace() {
        let a = SymSparse::<f64>::from_entries([(0, 1, 2.0), (1, 1, 3.0)]);
        let g = Mat::from_rows(&[vec![1.0, 0.5], vec![0.5, 2.0]]);
        let dense = a.to_dense(2);
        assert!((a.inner(&g) - dense.frob_dot(&g)).abs() < 1e-15);
    }

    #[test]
    fn minus_identity_gives_zero() {
        let mut sdp = StandardSdp::<f64>::new(2, 0);
        sdp.objective_mat = SymSparse::from_entries([(0, 0, -1.0), (1, 1, -1.0)]);
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.primal_value.abs() < 1e-7, "{}", sol.primal_value);
        assert!(sol.gram.max_abs() < 1e-7);
    }

    #[test]
    fn bounded_diagonal_entry() {
        let mut sdp = StandardSdp::<f64>::new(1, 0);
        sdp.objective_mat = SymSparse::from_entries([(0, 0, 1.0)]);
        sdp.push(SdpConstraint {
            name: "g11<=1".into(),
            mat: SymSparse::from_entries([(0, 0, 1.0)]),
            vec: vec![],
            sense: Sense::LessEq,
            rhs: 1.0,
        });
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal_value - 1.0).abs() < 1e-7);
        assert!((sol.dual_value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn free_variables_and_equalities() {
        // max f0 + g00 s.t. f0 + g00 + g11 <= 2, f0 = 0.5, g01 = 0.25
        let mut sdp = StandardSdp::<f64>::new(2, 1);
        sdp.objective_mat = SymSparse::from_entries([(0, 0, 1.0)]);
        sdp.objective_vec = unit(0);
        sdp.push(SdpConstraint {
            name: "budget".into(),
            mat: SymSparse::from_entries([(0, 0, 1.0), (1, 1, 1.0)]),
            vec: unit(0),
            sense: Sense::LessEq,
            rhs: 2.0,
        });
        sdp.push(SdpConstraint {
            name: "pin".into(),
            mat: SymSparse::zero(),
            vec: unit(0),
            sense: Sense::Eq,
            rhs: 0.5,
        });
        sdp.push(SdpConstraint {
            name: "offdiag".into(),
            mat: SymSparse::from_entries([(0, 1, 0.5)]),
            vec: vec![],
            sense: Sense::Eq,
            rhs: 0.25,
        });
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        // g00 + g11 <= 1.5, g00 g11 >= 1/16: optimum at g11 -> small root
        let g11 = (1.5 - (1.5f64 * 1.5 - 0.25).sqrt()) / 2.0;
        let expect = 0.5 + 1.5 - g11;
        assert!((sol.primal_value - expect).abs() < 1e-6, "{} vs {}", sol.primal_value, expect);
        assert!(sol.max_violation < 1e-7);
    }

    #[test]
    fn infeasible_detected() {
        let mut sdp = StandardSdp::<f64>::new(1, 0);
        sdp.objective_mat = SymSparse::from_entries([(0, 0, 1.0)]);
        sdp.push(SdpConstraint {
            name: "neg".into(),
            mat: SymSparse::from_entries([(0, 0, 1.0)]),
            vec: vec![],
            sense: Sense::LessEq,
            rhs: -1.0,
        });
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut sdp = StandardSdp::<f64>::new(1, 1);
        sdp.objective_vec = unit(0);
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Unbounded);
    }

    #[test]
    fn rejects_out_of_range_index() {
        let mut sdp = StandardSdp::<f64>::new(1, 0);
        sdp.objective_mat = SymSparse::from_entries([(0, 1, 1.0)]);
        assert!(solve(&sdp, &SolveOptions::default()).is_err());
    }
}
