//! Performance estimation problems for the server-assisted method with
//! heterogeneous local step sizes, posed as SDPs over a Gram matrix `G` and a
//! vector of function values `F`.
//!
//! Layout for `N` agents and `K` steps (blocks of `N`, agent `i` at offset `i`):
//!
//! | Gram block | vectors      | `F` block | values  |
//! |------------|--------------|-----------|---------|
//! | 0          | `x_i^0`      | k         | `f_i^k` |
//! | k+1        | `g_i^k`      | K+1       | `f_i^⋆` |
//! | K+2        | `g_i^⋆`      | K+2       | `f_i^∗` |
//! | K+3        | `g_i^∗`      |           |         |
//! | K+4        | `x_i^⋆`      |           |         |
//! | K+5        | `x_i^∗`      |           |         |
//!
//! `⋆` is the minimizer of the local function, `∗` the minimizer of the
//! weighted global objective.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sdp::{self, Sense, SdpConstraint, SdpSolution, SolveOptions, StandardSdp, SymAccumulator, SymSparse};
use crate::scalar::Scalar;

/// A point of the augmented index set `{0, …, K, ⋆, ∗}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PepPoint {
    Iter(usize),
    /// local minimizer
    Star,
    /// global minimizer
    Opt,
}

impl fmt::Display for PepPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PepPoint::Iter(k) => write!(f, "{k}"),
            PepPoint::Star => write!(f, "star"),
            PepPoint::Opt => write!(f, "opt"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PepIndexSet {
    pub k: usize,
    pub n: usize,
}

impl PepIndexSet {
    pub fn points(&self) -> Vec<PepPoint> {
        let mut v: Vec<PepPoint> = (0..=self.k).map(PepPoint::Iter).collect();
        v.push(PepPoint::Star);
        v.push(PepPoint::Opt);
        v
    }

    pub fn gram_dim(&self) -> usize {
        (self.k + 6) * self.n
    }

    pub fn f_dim(&self) -> usize {
        (self.k + 3) * self.n
    }
}

/// Selection vectors, as coordinate indices into the columns of `P` (Gram
/// side) and into `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GramBasis {
    pub index: PepIndexSet,
}

impl GramBasis {
    pub fn new(k: usize, n: usize) -> Self {
        Self { index: PepIndexSet { k, n } }
    }

    fn at(&self, block: usize, i: usize) -> usize {
        block * self.index.n + i
    }

    pub fn x0(&self, i: usize) -> usize {
        self.at(0, i)
    }

    pub fn g(&self, i: usize, p: PepPoint) -> usize {
        let k = self.index.k;
        match p {
            PepPoint::Iter(t) => self.at(t + 1, i),
            PepPoint::Star => self.at(k + 2, i),
            PepPoint::Opt => self.at(k + 3, i),
        }
    }

    pub fn x_star(&self, i: usize) -> usize {
        self.at(self.index.k + 4, i)
    }

    pub fn x_opt(&self, i: usize) -> usize {
        self.at(self.index.k + 5, i)
    }

    pub fn f(&self, i: usize, p: PepPoint) -> usize {
        let k = self.index.k;
        match p {
            PepPoint::Iter(t) => self.at(t, i),
            PepPoint::Star => self.at(k + 1, i),
            PepPoint::Opt => self.at(k + 2, i),
        }
    }
}

/// Linear combination of Gram basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearExpr<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> LinearExpr<T> {
    pub fn zero(dim: usize) -> Self {
        Self { coeffs: vec![T::zero(); dim] }
    }

    pub fn unit(dim: usize, idx: usize) -> Self {
        let mut e = Self::zero(dim);
        e.coeffs[idx] = T::one();
        e
    }

    pub fn add_scaled(&mut self, a: T, other: &Self) {
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += a * *o;
        }
    }

    pub fn add_unit(&mut self, a: T, idx: usize) {
        self.coeffs[idx] += a;
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-T::one(), other);
        out
    }

    pub fn coeff(&self, idx: usize) -> T {
        self.coeffs[idx]
    }

    pub fn to_sparse(&self) -> Vec<(usize, T)> {
        self.coeffs.iter().enumerate().filter(|(_, v)| **v != T::zero()).map(|(i, v)| (i, *v)).collect()
    }

    /// `⟨G, e eᵀ⟩`-type quantities evaluated directly from vector values.
    pub fn eval(&self, basis_values: &[Vec<T>]) -> Vec<T> {
        let d = basis_values.first().map_or(0, Vec::len);
        let mut out = vec![T::zero(); d];
        for (c, v) in self.coeffs.iter().zip(basis_values) {
            if *c != T::zero() {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += *c * *x;
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PepObjective {
    /// `Σ_i w_i (f_i(x_i^K) − f_i(x^∗))`
    FunctionGap,
    /// `(1/N) Σ_i ‖x_i^K − x^∗‖²`
    MeanSqDistance,
}

/// Function class `F_{μ,L}` of one agent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentClass<T> {
    pub mu: T,
    pub l: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PepProblem<T> {
    pub k: usize,
    pub classes: Vec<AgentClass<T>>,
    /// Normalized data weights `|D_i| / Σ|D|`.
    pub weights: Vec<T>,
    /// Step sizes before the switch (default `1/L_i`).
    pub local_steps: Vec<T>,
    /// Step size after the switch (default `1/L` with `L = Σ w_i L_i`).
    pub global_step: T,
    /// Iterations `t < switch` use the local steps; `None` never switches.
    pub switch: Option<usize>,
    pub radius0: T,
    pub radius_star: T,
    pub objective: PepObjective,
}

impl<T: Scalar> PepProblem<T> {
    /// Algorithm 1 with steps `1/L_i`, no switch, equal data sizes,
    /// `R_* = R_0`.
    pub fn new(k: usize, classes: Vec<AgentClass<T>>, radius0: T, objective: PepObjective) -> Self {
        let n = classes.len();
        let w = T::one() / T::from_count(n.max(1));
        let weights = vec![w; n];
        let l_bar: T = classes.iter().map(|c| c.l * w).sum();
        Self {
            k,
            local_steps: classes.iter().map(|c| T::one() / c.l).collect(),
            global_step: T::one() / l_bar,
            classes,
            weights,
            switch: None,
            radius0,
            radius_star: radius0,
            objective,
        }
    }

    /// Same classes, every step at the aggregate `1/L`: centralized GD on the
    /// weighted objective.
    pub fn centralized(&self) -> Self {
        Self { switch: Some(0), ..self.clone() }
    }

    pub fn with_switch(mut self, s: Option<usize>) -> Self {
        self.switch = s;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_radius_star(mut self, r: T) -> Self {
        self.radius_star = r;
        self
    }

    /// Sets data sizes; recomputes the weights and the aggregate step.
    pub fn with_sizes(mut self, sizes: &[usize]) -> Result<Self> {
        crate::error::check_dim(self.classes.len(), sizes.len())?;
        let total = T::from_count(sizes.iter().sum());
        self.weights = sizes.iter().map(|&s| T::from_count(s) / total).collect();
        let l_bar: T = self.classes.iter().zip(&self.weights).map(|(c, w)| c.l * *w).sum();
        self.global_step = T::one() / l_bar;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.classes.len()
    }

    pub fn basis(&self) -> GramBasis {
        GramBasis::new(self.k, self.n())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::Contract("PEP needs at least one agent".into()));
        }
        crate::error::check_dim(n, self.weights.len())?;
        crate::error::check_dim(n, self.local_steps.len())?;
        for (i, c) in self.classes.iter().enumerate() {
            if !(c.mu > T::zero() && c.mu <= c.l && c.l.is_finite()) {
                return Err(Error::Contract(format!("agent {i}: need 0 < mu <= L, got mu={} L={}", c.mu, c.l)));
            }
        }
        if self.weights.iter().any(|w| !(*w > T::zero())) {
            return Err(Error::Contract("weights must be positive".into()));
        }
        if !(self.radius0 > T::zero() && self.radius_star >= T::zero()) {
            return Err(Error::Contract("radii must satisfy R0 > 0, R* >= 0".into()));
        }
        Ok(())
    }

    /// Step size of agent `j` at iteration `t`.
    pub fn step(&self, j: usize, t: usize) -> T {
        match self.switch {
            Some(s) if t >= s => self.global_step,
            _ => self.local_steps[j],
        }
    }
}

/// Iterate expressions: `result[k][i]` is `x_i^k` for `k = 0..=K`.
pub fn build_iterates<T: Scalar>(problem: &PepProblem<T>) -> Vec<Vec<LinearExpr<T>>> {
    let basis = problem.basis();
    let dim = basis.index.gram_dim();
    let n = problem.n();
    let mut out: Vec<Vec<LinearExpr<T>>> = Vec::with_capacity(problem.k + 1);
    out.push((0..n).map(|i| LinearExpr::unit(dim, basis.x0(i))).collect());
    for t in 0..problem.k {
        let mut next = out[t].clone();
        for x in next.iter_mut() {
            for j in 0..n {
                x.add_unit(-problem.weights[j] * problem.step(j, t), basis.g(j, PepPoint::Iter(t)));
            }
        }
        out.push(next);
    }
    out
}

fn x_of<T: Scalar>(iters: &[Vec<LinearExpr<T>>], basis: &GramBasis, i: usize, p: PepPoint) -> LinearExpr<T> {
    let dim = basis.index.gram_dim();
    match p {
        PepPoint::Iter(k) => iters[k][i].clone(),
        PepPoint::Star => LinearExpr::unit(dim, basis.x_star(i)),
        PepPoint::Opt => LinearExpr::unit(dim, basis.x_opt(i)),
    }
}

fn g_of<T: Scalar>(basis: &GramBasis, i: usize, p: PepPoint) -> LinearExpr<T> {
    LinearExpr::unit(basis.index.gram_dim(), basis.g(i, p))
}

fn outer<T: Scalar>(coef: T, a: &LinearExpr<T>, b: &LinearExpr<T>, acc: &mut SymAccumulator<T>) {
    acc.add_sym_outer(coef, &a.to_sparse(), &b.to_sparse());
}

/// Matrix `A` of the `F_{μ,L}` interpolation inequality
/// `⟨G, A⟩ ≤ f_i^p − f_i^q` between points `p` and `q` of agent `i`:
///
/// ```text
/// ⟨g_q, Δx⟩ + ‖Δg − μΔx‖² / (2(L−μ)) + (μ/2)‖Δx‖² ≤ f_p − f_q
/// ```
///
/// with `Δx = x_p − x_q`, `Δg = g_p − g_q`. For `μ = L` the limit
/// `⟨g_q, Δx⟩ + ‖Δg‖²/(2L)` is used; [`assemble_sdp`] then adds the
/// equality `Δg = LΔx` separately.
pub fn interpolation_matrix<T: Scalar>(problem: &PepProblem<T>, agent: usize, p: PepPoint, q: PepPoint) -> Result<SymSparse<T>> {
    if p == q {
        return Err(Error::Contract(format!("interpolation pair needs p != q, got {p}")));
    }
    if agent >= problem.n() {
        return Err(Error::Contract(format!("agent {agent} out of range")));
    }
    let iters = build_iterates(problem);
    Ok(interpolation_with(&iters, problem, agent, p, q))
}

fn interpolation_with<T: Scalar>(iters: &[Vec<LinearExpr<T>>], problem: &PepProblem<T>, i: usize, p: PepPoint, q: PepPoint) -> SymSparse<T> {
    let basis = problem.basis();
    let AgentClass { mu, l } = problem.classes[i];
    let dx = x_of(iters, &basis, i, p).minus(&x_of(iters, &basis, i, q));
    let gq = g_of(&basis, i, q);
    let dg = g_of(&basis, i, p).minus(&gq);
    let mut acc = SymAccumulator::new();
    outer(T::one(), &dx, &gq, &mut acc);
    if mu < l {
        let mut r = dg.clone();
        r.add_scaled(-mu, &dx);
        outer(T::one() / (T::c(2.0) * (l - mu)), &r, &r, &mut acc);
        outer(mu / T::c(2.0), &dx, &dx, &mut acc);
    } else {
        outer(T::one() / (T::c(2.0) * l), &dg, &dg, &mut acc);
    }
    acc.finish()
}

/// Debugging record for one SDP row.
#[derive(Clone, Debug, Serialize)]
pub struct ConstraintMeta {
    pub id: usize,
    pub kind: &'static str,
    pub agent: Option<usize>,
    pub pair: Option<(PepPoint, PepPoint)>,
}

/// A PEP assembled as an SDP, with one metadata record per constraint.
#[derive(Clone, Debug)]
pub struct PepProgram<T> {
    pub basis: GramBasis,
    pub sdp: StandardSdp<T>,
    pub constraints: Vec<ConstraintMeta>,
}

impl<T: Scalar> PepProgram<T> {
    /// One JSON object per line: id, kind, agent, pair.
    pub fn metadata_jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.constraints {
            out.push_str(&serde_json::to_string(c).expect("metadata serializes"));
            out.push('\n');
        }
        out
    }

    pub fn solve(&self, opts: &SolveOptions<T>) -> Result<SdpSolution<T>> {
        sdp::solve(&self.sdp, opts)
    }
}

pub fn assemble_sdp<T: Scalar>(problem: &PepProblem<T>) -> Result<PepProgram<T>> {
    problem.validate()?;
    let basis = problem.basis();
    let n = problem.n();
    let dim = basis.index.gram_dim();
    let iters = build_iterates(problem);
    let points = basis.index.points();
    let mut sdp = StandardSdp::new(dim, basis.index.f_dim());
    let mut meta = Vec::new();
    let mut push = |sdp: &mut StandardSdp<T>, c: SdpConstraint<T>, kind: &'static str, agent: Option<usize>, pair: Option<(PepPoint, PepPoint)>| {
        meta.push(ConstraintMeta { id: sdp.constraints.len(), kind, agent, pair });
        sdp.push(c);
    };

    for i in 0..n {
        for &p in &points {
            for &q in &points {
                if p == q {
                    continue;
                }
                let mat = interpolation_with(&iters, problem, i, p, q);
                let (fp, fq) = (basis.f(i, p), basis.f(i, q));
                let mut vec = vec![(fp, -T::one()), (fq, T::one())];
                vec.sort_by_key(|e| e.0);
                push(
                    &mut sdp,
                    SdpConstraint { name: format!("interpolation[agent={i},p={p},q={q}]"), mat, vec, sense: Sense::LessEq, rhs: T::zero() },
                    "interpolation",
                    Some(i),
                    Some((p, q)),
                );
            }
        }
    }
    // μ = L: the pair of inequalities only bounds Δg = LΔx from one side.
    for i in 0..n {
        let AgentClass { mu, l } = problem.classes[i];
        if mu < l {
            continue;
        }
        for (a, &p) in points.iter().enumerate() {
            for &q in &points[a + 1..] {
                let mut r = x_of(&iters, &basis, i, p).minus(&x_of(&iters, &basis, i, q));
                let dg = g_of(&basis, i, p).minus(&g_of(&basis, i, q));
                r.add_scaled(-T::one() / l, &dg);
                let mut acc = SymAccumulator::new();
                outer(T::one(), &r, &r, &mut acc);
                push(
                    &mut sdp,
                    SdpConstraint { name: format!("quadratic_class[agent={i},p={p},q={q}]"), mat: acc.finish(), vec: vec![], sense: Sense::Eq, rhs: T::zero() },
                    "quadratic_class",
                    Some(i),
                    Some((p, q)),
                );
            }
        }
    }

    let mut stat = LinearExpr::zero(dim);
    for i in 0..n {
        stat.add_unit(problem.weights[i], basis.g(i, PepPoint::Opt));
    }
    let mut acc = SymAccumulator::new();
    outer(T::one(), &stat, &stat, &mut acc);
    push(
        &mut sdp,
        SdpConstraint { name: "global_stationarity".into(), mat: acc.finish(), vec: vec![], sense: Sense::Eq, rhs: T::zero() },
        "global_stationarity",
        None,
        None,
    );

    let square = |e: &LinearExpr<T>| {
        let mut acc = SymAccumulator::new();
        outer(T::one(), e, e, &mut acc);
        acc.finish()
    };
    let unit = |idx: usize| LinearExpr::unit(dim, idx);
    for i in 0..n {
        push(
            &mut sdp,
            SdpConstraint { name: format!("local_stationarity[agent={i}]"), mat: square(&unit(basis.g(i, PepPoint::Star))), vec: vec![], sense: Sense::Eq, rhs: T::zero() },
            "local_stationarity",
            Some(i),
            None,
        );
    }
    let r0 = problem.radius0 * problem.radius0;
    for i in 0..n {
        let e = unit(basis.x0(i)).minus(&unit(basis.x_opt(i)));
        push(
            &mut sdp,
            SdpConstraint { name: format!("initial_radius[agent={i}]"), mat: square(&e), vec: vec![], sense: Sense::LessEq, rhs: r0 },
            "initial_radius",
            Some(i),
            None,
        );
    }
    let rs = problem.radius_star * problem.radius_star;
    for i in 0..n {
        let e = unit(basis.x_star(i)).minus(&unit(basis.x_opt(i)));
        push(
            &mut sdp,
            SdpConstraint { name: format!("local_radius[agent={i}]"), mat: square(&e), vec: vec![], sense: Sense::LessEq, rhs: rs },
            "local_radius",
            Some(i),
            None,
        );
    }
    for i in 0..n {
        let e = unit(basis.x0(0)).minus(&unit(basis.x0(i)));
        push(
            &mut sdp,
            SdpConstraint { name: format!("equal_start[agent={i}]"), mat: square(&e), vec: vec![], sense: Sense::Eq, rhs: T::zero() },
            "equal_start",
            Some(i),
            None,
        );
    }
    for i in 0..n {
        let e = unit(basis.x_opt(0)).minus(&unit(basis.x_opt(i)));
        push(
            &mut sdp,
            SdpConstraint { name: format!("equal_optimum[agent={i}]"), mat: square(&e), vec: vec![], sense: Sense::Eq, rhs: T::zero() },
            "equal_optimum",
            Some(i),
            None,
        );
    }

    match problem.objective {
        PepObjective::FunctionGap => {
            let mut v: Vec<(usize, T)> = Vec::new();
            for i in 0..n {
                v.push((basis.f(i, PepPoint::Iter(problem.k)), problem.weights[i]));
                v.push((basis.f(i, PepPoint::Opt), -problem.weights[i]));
            }
            v.sort_by_key(|e| e.0);
            sdp.objective_vec = v;
        }
        PepObjective::MeanSqDistance => {
            let mut acc = SymAccumulator::new();
            let w = T::one() / T::from_count(n);
            for i in 0..n {
                let e = iters[problem.k][i].minus(&unit(basis.x_opt(i)));
                outer(w, &e, &e, &mut acc);
            }
            sdp.objective_mat = acc.finish();
        }
    }

    Ok(PepProgram { basis, sdp, constraints: meta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gd(k: usize, mu: f64, l: f64, obj: PepObjective) -> PepProblem<f64> {
        PepProblem::new(k, vec![AgentClass { mu, l }], 1.0, obj)
    }

    #[test]
    fn dimensions_and_layout() {
        let b = GramBasis::new(3, 2);
        assert_eq!(b.index.gram_dim(), 18);
        assert_eq!(b.index.f_dim(), 12);
        assert_eq!(b.g(1, PepPoint::Iter(2)), 3 * 2 + 1);
        assert_eq!(b.g(0, PepPoint::Star), 10);
        assert_eq!(b.g(0, PepPoint::Opt), 12);
        assert_eq!(b.x_star(1), 15);
        assert_eq!(b.x_opt(1), 17);
        assert_eq!(b.f(1, PepPoint::Opt), 11);
        let mut all: Vec<usize> = (0..2)
            .flat_map(|i| {
                let mut v = vec![b.x0(i), b.x_star(i), b.x_opt(i)];
                v.extend(b.index.points().into_iter().map(|p| b.g(i, p)));
                v
            })
            .collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 18);
    }

    #[test]
    fn iterates_single_agent() {
        let p = gd(1, 0.1, 2.0, PepObjective::MeanSqDistance);
        let it = build_iterates(&p);
        let b = p.basis();
        assert_eq!(it[1][0].coeff(b.x0(0)), 1.0);
        assert!((it[1][0].coeff(b.g(0, PepPoint::Iter(0))) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn iterates_two_agents_and_switch() {
        let classes: Vec<AgentClass<f64>> = vec![AgentClass { mu: 0.1, l: 1.0 / 3.0 }, AgentClass { mu: 0.1, l: 3.0 }];
        let p = PepProblem::new(1, classes.clone(), 1.0, PepObjective::MeanSqDistance);
        let it = build_iterates(&p);
        let b = p.basis();
        for x in &it[1] {
            assert!((x.coeff(b.g(0, PepPoint::Iter(0))) + 0.5 * 3.0).abs() < 1e-12);
            assert!((x.coeff(b.g(1, PepPoint::Iter(0))) + 0.5 / 3.0).abs() < 1e-12);
        }
        let p = PepProblem::new(2, classes, 1.0, PepObjective::MeanSqDistance).with_switch(Some(1));
        let it = build_iterates(&p);
        let l_bar: f64 = (1.0 / 3.0 + 3.0) / 2.0;
        for j in 0..2 {
            assert!((it[2][0].coeff(p.basis().g(j, PepPoint::Iter(1))) + 0.5 / l_bar).abs() < 1e-12);
        }
    }

    #[test]
    fn constraint_count() {
        let classes = vec![AgentClass { mu: 0.1, l: 1.0 }; 2];
        let prog = assemble_sdp(&PepProblem::new(3, classes, 1.0, PepObjective::FunctionGap)).unwrap();
        let interp = prog.constraints.iter().filter(|c| c.kind == "interpolation").count();
        assert_eq!(interp, 60);
        assert_eq!(prog.sdp.constraints.len(), 60 + 11);
        assert_eq!(prog.metadata_jsonl().lines().count(), 71);
    }

    #[test]
    fn self_pair_rejected() {
        let p = gd(1, 0.1, 1.0, PepObjective::FunctionGap);
        assert!(interpolation_matrix(&p, 0, PepPoint::Star, PepPoint::Star).is_err());
    }

    #[test]
    fn gd_one_step_contraction() {
        let prog = assemble_sdp(&gd(1, 0.1, 1.0, PepObjective::MeanSqDistance)).unwrap();
        let sol = prog.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, sdp::SolveStatus::Optimal, "{:?}", sol.history.last());
        assert!((sol.primal_value - 0.81).abs() < 1e-6, "{}", sol.primal_value);
    }

    #[test]
    fn quadratic_agent_keeps_full_face() {
        // f1 = 0.05(x+1)², f2 = 0.05(x−1)² is feasible with value 0.9⁴; the
        // quadratic-only class must not collapse the problem.
        let classes: Vec<AgentClass<f64>> = vec![AgentClass { mu: 0.1, l: 0.1 }, AgentClass { mu: 0.1, l: 1.9 }];
        let p = PepProblem::new(2, classes, 1.0, PepObjective::MeanSqDistance).centralized();
        let sol = assemble_sdp(&p).unwrap().solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, sdp::SolveStatus::Optimal);
        assert!((sol.primal_value - 0.6561).abs() < 1e-6, "{}", sol.primal_value);
    }
}
