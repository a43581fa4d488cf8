//! Centralized GD, the switching server method, DGD and gradient tracking.
//!
//! Every method reads local gradients through the instance weights
//! `w_i = |D_i| / Σ|D_j|`. Server methods step along `Σ w_i α_i ∇f_i`;
//! decentralized ones use the rescaled local gradient `N w_i ∇f_i`, which is
//! just `∇f_i` when sizes are equal.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, norm2, Mat};
use crate::problem::{Oracle, ProblemInstance};
use crate::scalar::Scalar;
use crate::smoothness::aggregate_l;

pub const DIVERGENCE_GUARD: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Gd,
    Algorithm1,
    Dgd,
    GradientTracking,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Gd => "gd",
            Method::Algorithm1 => "algorithm1",
            Method::Dgd => "dgd",
            Method::GradientTracking => "gradient_tracking",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "gd" => Ok(Method::Gd),
            "algorithm1" => Ok(Method::Algorithm1),
            "dgd" => Ok(Method::Dgd),
            "gradient_tracking" => Ok(Method::GradientTracking),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// How the switching threshold is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold<T> {
    /// `ε = c·‖Σ w_i α_i ∇f_i(x⁰)‖`
    Relative(T),
    Absolute(T),
    Never,
}

#[derive(Clone, Debug)]
pub struct MethodConfig<T> {
    pub method: Method,
    pub steps: usize,
    /// Per-agent step sizes. `None` picks the method default: `1/L` for gd and
    /// tracking, `1/L_i` for algorithm1 and dgd.
    pub alphas: Option<Vec<T>>,
    pub threshold: Threshold<T>,
    /// Mixing matrix for dgd and tracking, `(1/N)𝟙𝟙ᵀ` when unset.
    pub mixing: Option<Mat<T>>,
    pub participation: f64,
    pub seed: u64,
    /// Shared starting point, zero when unset.
    pub x0: Option<Vec<T>>,
    /// Keep every iterate. Long reference runs turn this off.
    pub keep_iterates: bool,
}

impl<T: Scalar> MethodConfig<T> {
    pub fn new(method: Method, steps: usize) -> Self {
        Self {
            method,
            steps,
            alphas: None,
            threshold: Threshold::Relative(T::c(1e-3)),
            mixing: None,
            participation: 1.0,
            seed: 0,
            x0: None,
            keep_iterates: true,
        }
    }

    pub fn with_alphas(mut self, a: Vec<T>) -> Self {
        self.alphas = Some(a);
        self
    }

    pub fn with_threshold(mut self, t: Threshold<T>) -> Self {
        self.threshold = t;
        self
    }

    pub fn with_mixing(mut self, w: Mat<T>) -> Self {
        self.mixing = Some(w);
        self
    }

    pub fn with_participation(mut self, p: f64, seed: u64) -> Self {
        self.participation = p;
        self.seed = seed;
        self
    }

    pub fn with_x0(mut self, x0: Vec<T>) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn without_iterates(mut self) -> Self {
        self.keep_iterates = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmTrace<T> {
    pub method: Method,
    /// `iterates[k][i]`: one entry per agent for dgd/tracking, a single shared
    /// entry otherwise. Empty when iterates were not kept.
    pub iterates: Vec<Vec<Vec<T>>>,
    /// Global loss at the (agent-averaged) iterate.
    pub losses: Vec<T>,
    pub grad_norms: Vec<T>,
    /// Step sizes in force for the update leaving iterate `k`.
    pub alphas: Vec<Vec<T>>,
    pub participants: Vec<Vec<usize>>,
    /// First `k` whose update `x^{k-1} → x^k` used the reset step `1/L`.
    pub switch_iteration: Option<usize>,
    pub final_point: Vec<T>,
}

impl<T: Scalar> AlgorithmTrace<T> {
    pub fn len(&self) -> usize {
        self.losses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.losses.is_empty()
    }

    pub fn switched_at(&self, k: usize) -> bool {
        self.switch_iteration.is_some_and(|s| k >= s)
    }

    /// First iteration with `loss − reference ≤ tol`.
    pub fn iterations_to(&self, reference: T, tol: T) -> Option<usize> {
        self.losses.iter().position(|&l| l - reference <= tol)
    }

    /// CSV `iteration,loss,grad_norm,switched,participants`; participants are
    /// `;`-separated agent ids.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,loss,grad_norm,switched,participants\n");
        for k in 0..self.len() {
            let ids: Vec<String> = self.participants[k].iter().map(|i| i.to_string()).collect();
            let _ = writeln!(
                out,
                "{k},{:e},{:e},{},{}",
                self.losses[k].to_f64_lossy(),
                self.grad_norms[k].to_f64_lossy(),
                u8::from(self.switched_at(k)),
                ids.join(";")
            );
        }
        out
    }
}

struct Recorder<T> {
    trace: AlgorithmTrace<T>,
    keep: bool,
}

impl<T: Scalar> Recorder<T> {
    fn new(method: Method, keep: bool) -> Self {
        Self {
            trace: AlgorithmTrace {
                method,
                iterates: Vec::new(),
                losses: Vec::new(),
                grad_norms: Vec::new(),
                alphas: Vec::new(),
                participants: Vec::new(),
                switch_iteration: None,
                final_point: Vec::new(),
            },
            keep,
        }
    }

    fn push(&mut self, k: usize, points: &[Vec<T>], loss: T, grad_norm: T, alphas: &[T], participants: Vec<usize>) -> Result<()> {
        let l = loss.to_f64_lossy();
        if !l.is_finite() || l.abs() > DIVERGENCE_GUARD {
            return Err(Error::Diverged { iteration: k, loss: l });
        }
        if self.keep {
            self.trace.iterates.push(points.to_vec());
        }
        self.trace.losses.push(loss);
        self.trace.grad_norms.push(grad_norm);
        self.trace.alphas.push(alphas.to_vec());
        self.trace.participants.push(participants);
        Ok(())
    }

    fn finish(mut self, last: Vec<T>) -> AlgorithmTrace<T> {
        self.trace.final_point = last;
        self.trace
    }
}

/// Local gradients, the weighted global gradient and the global loss at `x`.
fn probe<T: Scalar>(inst: &ProblemInstance<T>, w: &[T], x: &[T]) -> Result<(Vec<Vec<T>>, Vec<T>, T)> {
    let mut grads = Vec::with_capacity(inst.agents());
    let mut global = vec![T::zero(); x.len()];
    let mut loss = T::zero();
    for (f, &wi) in inst.locals().iter().zip(w) {
        let g = f.eval_grad(x)?;
        axpy(wi, &g, &mut global);
        loss += wi * f.eval_loss(x)?;
        grads.push(g);
    }
    Ok((grads, global, loss))
}

fn start<T: Scalar>(inst: &ProblemInstance<T>, cfg: &MethodConfig<T>) -> Result<Vec<T>> {
    if cfg.steps == 0 {
        return Err(Error::Config("need at least one step".into()));
    }
    match &cfg.x0 {
        Some(x) => {
            check_dim(inst.dim(), x.len())?;
            Ok(x.clone())
        }
        None => Ok(vec![T::zero(); inst.dim()]),
    }
}

fn resolve_alphas<T: Scalar>(inst: &ProblemInstance<T>, cfg: &MethodConfig<T>, local: bool) -> Result<Vec<T>> {
    let a = match &cfg.alphas {
        Some(a) => a.clone(),
        None if local => inst.ells().iter().map(|&l| T::one() / l).collect(),
        None => vec![T::one() / aggregate_l(inst.ells(), inst.sizes())?; inst.agents()],
    };
    check_dim(inst.agents(), a.len())?;
    if a.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::Config("step sizes must be positive".into()));
    }
    Ok(a)
}

fn weighted_direction<T: Scalar>(grads: &[Vec<T>], w: &[T], alphas: &[T], include: impl Fn(usize) -> bool) -> Vec<T> {
    let mut d = vec![T::zero(); grads[0].len()];
    for (i, g) in grads.iter().enumerate() {
        if include(i) {
            axpy(w[i] * alphas[i], g, &mut d);
        }
    }
    d
}

fn server_method<T: Scalar>(inst: &ProblemInstance<T>, cfg: &MethodConfig<T>, method: Method) -> Result<AlgorithmTrace<T>> {
    let n = inst.agents();
    let w = inst.weights();
    let mut x = start(inst, cfg)?;
    let mut alphas = resolve_alphas(inst, cfg, method == Method::Algorithm1)?;
    let reset = T::one() / aggregate_l(inst.ells(), inst.sizes())?;
    let p = cfg.participation;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Config(format!("participation must lie in (0, 1], got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rec = Recorder::new(method, cfg.keep_iterates);
    let all: Vec<usize> = (0..n).collect();

    let (mut grads, mut global, mut loss) = probe(inst, &w, &x)?;
    rec.push(0, std::slice::from_ref(&x), loss, norm2(&global), &alphas, all.clone())?;
    let eps = match cfg.threshold {
        _ if method == Method::Gd => None,
        Threshold::Never => None,
        Threshold::Absolute(e) => Some(e),
        Threshold::Relative(c) => Some(c * norm2(&weighted_direction(&grads, &w, &alphas, |_| true))),
    }
    .filter(|&e| e > T::zero());
    let mut switched = false;

    for k in 1..=cfg.steps {
        // the test sees the gradients the server already holds, g^{k-1}
        if let Some(e) = eps {
            if !switched && k > 1 && norm2(&weighted_direction(&grads, &w, &alphas, |_| true)) <= e {
                switched = true;
                alphas = vec![reset; n];
                rec.trace.switch_iteration = Some(k);
            }
        }
        let present: Vec<usize> = if p < 1.0 { (0..n).filter(|_| rng.random::<f64>() < p).collect() } else { all.clone() };
        let mut mask = vec![false; n];
        present.iter().for_each(|&i| mask[i] = true);
        let d = weighted_direction(&grads, &w, &alphas, |i| mask[i]);
        axpy(-T::one(), &d, &mut x);
        (grads, global, loss) = probe(inst, &w, &x)?;
        rec.push(k, std::slice::from_ref(&x), loss, norm2(&global), &alphas, present)?;
    }
    Ok(rec.finish(x))
}

/// `x^{k+1} = x^k − α ∇f(x^k)`, `α = 1/L` by default.
pub fn run_gd<T: Scalar>(inst: &ProblemInstance<T>, cfg: &MethodConfig<T>) -> Result<AlgorithmTrace<T>> {
    if let Some(a) = &cfg.alphas {
        if a.windows(2).any(|p| p[0] != p[1]) {
            return Err(Error::Config("gd takes a single step size".into()));
        }
    }
    server_method(inst, cfg, Method::Gd)
}

/// Server iterate moved by `Σ w_i α_i g_i` with `α_i = 1/L_i` until the
/// aggregated step falls below the threshold, then by `1/L` for good.
pub fn run_algorithm1<T: Scalar>(inst: &ProblemInstance<T>, cfg: &MethodConfig<T>) -> Result<AlgorithmTrace<T>> {
    server_method(inst, cfg, Method::Algorithm1)
}

fn mixing_matrix<T: Scalar>(n: usize, cfg: &MethodConfig<T>, doubly: bool) -> Result<Mat<T>> {
    let w = cfg.mixing.clone().unwrap_or_else(|| Mat::from_fn(n, n, |_, _| T::one() / T::from_count(n)));
    if w.rows() != n || w.cols() != n {
        return Err(Error::Config(format!("mixing matrix must be {n}x{n}")));
    }
    let tol = T::c(1e-10);
    for i in 0..n {
        let row: T = w.row(i).iter().copied().sum();
        let col: T = (0..n).map(|j| w[(j, i)]).sum();
        if w.row(i).iter().any(|&v| v < T::zero()) {
            return Err(Error::Config("mixing matrix has a negative entry".into()));
        }
        if (row - T::one()).abs() > tol {
            return Err(Error::Config(format!("mixing row {i} sums to {row}")));
        }
        if doubly && (col - T::one()).abs() > tol {
            return Err(Error::Config(format!("mixing column {i} sums to {col}")));
        }
    }
    Ok(w)
}

fn mix<T: Scalar>(w: &Mat<T>, v: &[Vec<T>]) -> Vec<Vec<T>> {
    (0..v.len())
        .map(|i| {
            let mut out = vec![T::zero(); v[0].len()];
            for (j, vj) in v.iter().enumerate() {
                let c = w[(i, j)];
                if c != T::zero() {
                    axpy(c, vj, &mut out);
                }
            }
            out
        })
        .collect()
}

fn average<T: Scalar>(v: &[Vec<T>]) -> Vec<T> {
    if v.len() == 1 {
        return v[0].clone();
    }
    let mut out = vec![T::zero(); v[0].len()];
    let inv = T::one() / T::from_count(v.len());
    v.iter().for_each(|vi| axpy(inv, vi, &mut out));
    out
}

/// `N w_i ∇f_i` at every agent's own iterate.
fn local_grads<T: Scalar>(inst: &ProblemInstance<T>, scale: &[T], xs: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    inst.locals()
        .iter()
        .zip(xs)
        .zip(scale)
        .map(|((f, x), &s)| Ok(f.eval_grad(x)?.into_iter().map(|g| s * g).collect()))
        .collect()
}

fn record_average<T: Scalar>(rec: &mut Recorder<T>, inst: &ProblemInstance<T>, k: usize, xs: &[Vec<T>], alphas: &[T]) -> Result<()> {
    let g = inst.global_objective();
    let xbar = average(xs);
    rec.push(k, xs, g.eval_loss(&xbar)?, norm2(&g.eval_grad(&xbar)?), alphas, (0..xs.len()).collect())
}

/// `x_i^{k+1} = Σ_j w_ij (x_j^k − α_j ∇f_j(x_j^k))`
pub fn run_dgd<T: Scalar>(inst: &ProblemInstance<T>, cfg: &MethodConfig<T>) -> Result<AlgorithmTrace<T>> {
    let n = inst.agents();
    let w = mixing_matrix(n, cfg, false)?;
    let alphas = resolve_alphas(inst, cfg, true)?;
    let scale: Vec<T> = inst.weights().iter().map(|&wi| T::from_count(n) * wi).collect();
    let coef: Vec<T> = alphas.iter().zip(&scale).map(|(&a, &s)| a * s).collect();
    let mut xs = vec![start(inst, cfg)?; n];
    let mut rec = Recorder::new(Method::Dgd, cfg.keep_iterates);
    record_average(&mut rec, inst, 0, &xs, &alphas)?;
    for k in 1..=cfg.steps {
        let grads: Vec<Vec<T>> = inst.locals().iter().zip(&xs).map(|(f, x)| f.eval_grad(x)).collect::<Result<_>>()?;
        let local: Vec<Vec<T>> = xs
            .iter()
            .zip(&grads)
            .zip(&coef)
            .map(|((x, g), &c)| {
                let mut y = x.clone();
                axpy(-c, g, &mut y);
                y
            })
            .collect();
        xs = mix(&w, &local);
        record_average(&mut rec, inst, k, &xs, &alphas)?;
    }
    Ok(rec.finish(average(&xs)))
}

/// `x_i^{k+1} = Σ_j w_ij x_j^k − α y_i^k`,
/// `y_i^{k+1} = Σ_j w_ij y_j^k + g_i^{k+1} − g_i^k`, `y⁰ = g⁰`.
pub fn run_gradient_tracking<T: Scalar>(inst: &ProblemInstance<T>, cfg: &MethodConfig<T>) -> Result<AlgorithmTrace<T>> {
    let n = inst.agents();
    let w = mixing_matrix(n, cfg, true)?;
    let alphas = resolve_alphas(inst, cfg, false)?;
    if alphas.windows(2).any(|p| p[0] != p[1]) {
        return Err(Error::Config("gradient tracking takes a single step size".into()));
    }
    let alpha = alphas[0];
    let scale: Vec<T> = inst.weights().iter().map(|&wi| T::from_count(n) * wi).collect();
    let mut xs = vec![start(inst, cfg)?; n];
    let mut g = local_grads(inst, &scale, &xs)?;
    let mut y = g.clone();
    let mut rec = Recorder::new(Method::GradientTracking, cfg.keep_iterates);
    record_average(&mut rec, inst, 0, &xs, &alphas)?;
    for k in 1..=cfg.steps {
        let mut next = mix(&w, &xs);
        next.iter_mut().zip(&y).for_each(|(x, yi)| axpy(-alpha, yi, x));
        xs = next;
        let g_new = local_grads(inst, &scale, &xs)?;
        let my = mix(&w, &y);
        // g_new + (mixed y − g_old): exact when the bracket cancels
        y = my
            .iter()
            .zip(&g)
            .zip(&g_new)
            .map(|((m, old), new)| new.iter().zip(m.iter().zip(old)).map(|(&gn, (&mv, &go))| gn + (mv - go)).collect())
            .collect();
        g = g_new;
        record_average(&mut rec, inst, k, &xs, &alphas)?;
    }
    Ok(rec.finish(average(&xs)))
}

pub fn run<T: Scalar>(inst: &ProblemInstance<T>, cfg: &MethodConfig<T>) -> Result<AlgorithmTrace<T>> {
    match cfg.method {
        Method::Gd => run_gd(inst, cfg),
        Method::Algorithm1 => run_algorithm1(inst, cfg),
        Method::Dgd => run_dgd(inst, cfg),
        Method::GradientTracking => run_gradient_tracking(inst, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Objective, QuadraticObjective};

    fn quad(c: f64, center: f64) -> Objective<f64> {
        QuadraticObjective::diagonal(&[c], &[center]).unwrap().into()
    }

    fn pair_1_3() -> ProblemInstance<f64> {
        ProblemInstance::uniform(vec![quad(1.0 / 3.0, 0.0), quad(3.0, 0.0)], vec![1.0 / 3.0, 3.0], vec![1.0 / 3.0, 3.0]).unwrap()
    }

    /// `f₁ = ½(x−1)²`, `f₂ = (x+1)²`
    fn bias() -> ProblemInstance<f64> {
        ProblemInstance::uniform(vec![quad(1.0, 1.0), quad(2.0, -1.0)], vec![1.0, 2.0], vec![1.0, 2.0]).unwrap()
    }

    fn x(tr: &AlgorithmTrace<f64>, k: usize) -> f64 {
        tr.iterates[k][0][0]
    }

    #[test]
    fn gd_examples() {
        let one = ProblemInstance::uniform(vec![quad(1.0, 0.0)], vec![1.0], vec![1.0]).unwrap();
        let tr = run_gd(&one, &MethodConfig::new(Method::Gd, 1).with_x0(vec![1.0])).unwrap();
        assert_eq!(x(&tr, 1), 0.0);
        let tr = run_gd(&pair_1_3(), &MethodConfig::new(Method::Gd, 1).with_x0(vec![1.0])).unwrap();
        assert!(x(&tr, 1).abs() < 1e-15);
        let slow = ProblemInstance::uniform(vec![quad(0.1, 0.0)], vec![0.1], vec![1.0]).unwrap();
        let tr = run_gd(&slow, &MethodConfig::new(Method::Gd, 5).with_x0(vec![1.0])).unwrap();
        for k in 0..=5 {
            assert!((x(&tr, k) - 0.9f64.powi(k as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn heterogeneous_step_solves_pair() {
        let cfg = MethodConfig::new(Method::Algorithm1, 1).with_x0(vec![1.0]).with_threshold(Threshold::Never);
        assert!(x(&run_algorithm1(&pair_1_3(), &cfg).unwrap(), 1).abs() < 1e-15);
    }

    #[test]
    fn bias_without_and_with_switch() {
        let cfg = MethodConfig::new(Method::Algorithm1, 200).with_x0(vec![1.0]).with_threshold(Threshold::Absolute(0.0));
        let tr = run_algorithm1(&bias(), &cfg).unwrap();
        assert!(x(&tr, 200).abs() <= 1e-8 && tr.switch_iteration.is_none());
        let cfg = MethodConfig::new(Method::Algorithm1, 500).with_x0(vec![1.0]).with_threshold(Threshold::Absolute(0.1));
        let tr = run_algorithm1(&bias(), &cfg).unwrap();
        assert!((x(&tr, 500) + 1.0 / 3.0).abs() <= 1e-6);
        let s = tr.switch_iteration.unwrap();
        let reset = 1.0 / 1.5;
        assert!(tr.alphas[s..].iter().all(|a| a.iter().all(|&v| v == reset)));
    }

    #[test]
    fn dgd_bias_and_tracking_fix() {
        let cfg = MethodConfig::new(Method::Dgd, 300).with_x0(vec![1.0]);
        let tr = run_dgd(&bias(), &cfg).unwrap();
        assert!(tr.final_point[0].abs() < 1e-8);
        // full averaging is unstable at 1/L, a lazy matrix is not
        let lazy = Mat::from_rows(&[vec![0.8, 0.2], vec![0.2, 0.8]]);
        let cfg = MethodConfig::new(Method::GradientTracking, 1000).with_x0(vec![1.0]).with_mixing(lazy);
        let tr = run_gradient_tracking(&bias(), &cfg).unwrap();
        assert!((tr.final_point[0] + 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn tracking_identity() {
        let inst = ProblemInstance::uniform(
            vec![quad(0.5, 1.0), quad(2.0, -3.0), quad(1.2, 0.5)].into_iter().collect(),
            vec![0.5, 2.0, 1.2],
            vec![0.5, 2.0, 1.2],
        )
        .unwrap();
        let w = Mat::from_rows(&[vec![0.5, 0.25, 0.25], vec![0.25, 0.5, 0.25], vec![0.25, 0.25, 0.5]]);
        let cfg = MethodConfig::new(Method::GradientTracking, 1).with_x0(vec![0.7]).with_mixing(w.clone());
        // rerun step by step so y can be compared against the local gradients
        let scale = vec![1.0; 3];
        let mut xs = vec![vec![0.7]; 3];
        let mut g = local_grads(&inst, &scale, &xs).unwrap();
        let mut y = g.clone();
        for _ in 0..30 {
            let mut next = mix(&w, &xs);
            next.iter_mut().zip(&y).for_each(|(x, yi)| axpy(-0.3, yi, x));
            xs = next;
            let gn = local_grads(&inst, &scale, &xs).unwrap();
            let my = mix(&w, &y);
            y = (0..3).map(|i| vec![gn[i][0] + (my[i][0] - g[i][0])]).collect();
            g = gn;
            let ay: f64 = y.iter().map(|v| v[0]).sum::<f64>() / 3.0;
            let ag: f64 = g.iter().map(|v| v[0]).sum::<f64>() / 3.0;
            assert!((ay - ag).abs() < 1e-10);
        }
        assert!(run_gradient_tracking(&inst, &cfg).is_ok());
    }

    #[test]
    fn rejects_bad_mixing() {
        let w = Mat::from_rows(&[vec![0.6, 0.6], vec![0.5, 0.5]]);
        let cfg = MethodConfig::new(Method::Dgd, 3).with_mixing(w);
        assert!(matches!(run_dgd(&pair_1_3(), &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn divergence_guard() {
        let one = ProblemInstance::uniform(vec![quad(1.0, 0.0)], vec![1.0], vec![1.0]).unwrap();
        let cfg = MethodConfig::new(Method::Gd, 100).with_x0(vec![1.0]).with_alphas(vec![3.0]);
        assert!(matches!(run_gd(&one, &cfg), Err(Error::Diverged { .. })));
    }

    #[test]
    fn trace_csv_shape() {
        let cfg = MethodConfig::new(Method::Algorithm1, 2).with_x0(vec![1.0]);
        let csv = run_algorithm1(&bias(), &cfg).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,") && lines[1].ends_with(",0,0;1"));
    }
}
