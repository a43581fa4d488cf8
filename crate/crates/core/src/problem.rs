//! Local objectives, the aggregated global objective, and their exact oracles.
//!
//! Two families are supported: dense quadratics `½ xᵀQx + cᵀx + r` and
//! ridge-regularized logistic losses on sparse features. The global objective
//! averages the locals weighted by dataset size, so equal sizes recover the
//! plain mean `(1/N) Σ f_i`.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, dot, Mat};
use crate::scalar::Scalar;

/// First- and second-order oracle of a smooth function on `R^d`.
pub trait Oracle<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;
    fn eval_loss(&self, x: &[T]) -> Result<T>;
    fn eval_grad(&self, x: &[T]) -> Result<Vec<T>>;
    /// `∇²f(x) v`, computed analytically.
    fn hessian_vec(&self, x: &[T], v: &[T]) -> Result<Vec<T>>;
}

/// `f(x) = ½ xᵀQx + cᵀx + r`
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticObjective<T> {
    q: Mat<T>,
    c: Vec<T>,
    r: T,
}

impl<T: Scalar> QuadraticObjective<T> {
    pub fn new(q: Mat<T>, c: Vec<T>, r: T) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::Contract(format!(
                "quadratic curvature must be square, got {}x{}",
                q.rows(),
                q.cols()
            )));
        }
        check_dim(q.rows(), c.len())?;
        let tol = T::c(1e-12) * q.max_abs().max(T::one());
        if q.asymmetry() > tol {
            return Err(Error::Contract("quadratic curvature is not symmetric".into()));
        }
        Ok(Self { q, c, r })
    }

    /// `½ Σ λ_k (x_k − center_k)²`
    pub fn diagonal(curvatures: &[T], center: &[T]) -> Result<Self> {
        check_dim(curvatures.len(), center.len())?;
        let half = T::c(0.5);
        let c: Vec<T> = curvatures.iter().zip(center).map(|(&l, &z)| -l * z).collect();
        let r = curvatures.iter().zip(center).map(|(&l, &z)| half * l * z * z).sum();
        Self::new(Mat::diag(curvatures), c, r)
    }

    pub fn curvature(&self) -> &Mat<T> {
        &self.q
    }

    pub fn linear(&self) -> &[T] {
        &self.c
    }

    pub fn offset(&self) -> T {
        self.r
    }
}

impl<T: Scalar> Oracle<T> for QuadraticObjective<T> {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn eval_loss(&self, x: &[T]) -> Result<T> {
        check_dim(self.dim(), x.len())?;
        let qx = self.q.matvec(x);
        Ok(T::c(0.5) * dot(x, &qx) + dot(&self.c, x) + self.r)
    }

    fn eval_grad(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim(), x.len())?;
        let mut g = self.q.matvec(x);
        axpy(T::one(), &self.c, &mut g);
        Ok(g)
    }

    fn hessian_vec(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), v.len())?;
        Ok(self.q.matvec(v))
    }
}

/// Compressed sparse rows; column indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn new(cols: usize, indptr: Vec<usize>, indices: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if indptr.first() != Some(&0) || indptr.last() != Some(&indices.len()) {
            return Err(Error::Contract("malformed row pointer array".into()));
        }
        if indices.len() != values.len() {
            return Err(Error::Contract("indices and values differ in length".into()));
        }
        if indptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Contract("row pointers not monotone".into()));
        }
        if indices.iter().any(|&j| j >= cols) {
            return Err(Error::Contract("column index out of range".into()));
        }
        Ok(Self {
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// Build from `(column, value)` rows.
    pub fn from_rows(cols: usize, rows: &[Vec<(usize, T)>]) -> Result<Self> {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in rows {
            for &(j, v) in row {
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Self::new(cols, indptr, indices, values)
    }

    pub fn rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn row_dot(&self, i: usize, x: &[T]) -> T {
        let (idx, val) = self.row(i);
        idx.iter().zip(val).map(|(&j, &v)| v * x[j]).sum()
    }

    /// `out += alpha * row_i`
    pub fn add_row_scaled(&self, i: usize, alpha: T, out: &mut [T]) {
        let (idx, val) = self.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            out[j] += alpha * v;
        }
    }

    pub fn row_norm_sq(&self, i: usize) -> T {
        self.row(i).1.iter().map(|&v| v * v).sum()
    }
}

/// `f(x) = (1/m) Σ log(1 + exp(−b_j a_jᵀx)) + (reg/2)‖x‖²`
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticObjective<T> {
    features: CsrMatrix<T>,
    labels: Vec<T>,
    reg: T,
}

/// `log(1 + exp(−t))` without overflow.
pub fn log1p_exp_neg<T: Scalar>(t: T) -> T {
    if t > T::zero() {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

/// Logistic sigmoid `1 / (1 + exp(−t))` without overflow.
pub fn sigmoid<T: Scalar>(t: T) -> T {
    if t >= T::zero() {
        T::one() / (T::one() + (-t).exp())
    } else {
        let e = t.exp();
        e / (T::one() + e)
    }
}

impl<T: Scalar> LogisticObjective<T> {
    pub fn new(features: CsrMatrix<T>, labels: Vec<T>, reg: T) -> Result<Self> {
        check_dim(features.rows(), labels.len())?;
        if labels.is_empty() {
            return Err(Error::Contract("logistic objective needs at least one sample".into()));
        }
        if labels.iter().any(|&b| b != T::one() && b != -T::one()) {
            return Err(Error::Contract("logistic labels must be ±1".into()));
        }
        if !(reg >= T::zero()) {
            return Err(Error::Contract("ridge weight must be nonnegative".into()));
        }
        Ok(Self {
            features,
            labels,
            reg,
        })
    }

    pub fn features(&self) -> &CsrMatrix<T> {
        &self.features
    }

    pub fn labels(&self) -> &[T] {
        &self.labels
    }

    pub fn reg(&self) -> T {
        self.reg
    }

    pub fn samples(&self) -> usize {
        self.labels.len()
    }

    /// `((1/4m) AᵀA + reg I) v`: the Hessian with `σ'` replaced by its global
    /// bound `¼`.
    pub fn curvature_bound_vec(&self, v: &[T]) -> Result<Vec<T>> {
        check_dim(self.features.cols(), v.len())?;
        let m = T::from_count(self.samples());
        let mut out: Vec<T> = v.iter().map(|&vi| self.reg * vi).collect();
        let w = T::c(0.25) / m;
        for j in 0..self.samples() {
            let av = self.features.row_dot(j, v);
            if av != T::zero() {
                self.features.add_row_scaled(j, w * av, &mut out);
            }
        }
        Ok(out)
    }
}

impl<T: Scalar> Oracle<T> for LogisticObjective<T> {
    fn dim(&self) -> usize {
        self.features.cols()
    }

    fn eval_loss(&self, x: &[T]) -> Result<T> {
        check_dim(self.dim(), x.len())?;
        let m = T::from_count(self.samples());
        let data: T = (0..self.samples())
            .map(|j| log1p_exp_neg(self.labels[j] * self.features.row_dot(j, x)))
            .sum();
        Ok(data / m + T::c(0.5) * self.reg * dot(x, x))
    }

    fn eval_grad(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim(), x.len())?;
        let m = T::from_count(self.samples());
        let mut g: Vec<T> = x.iter().map(|&xi| self.reg * xi).collect();
        for j in 0..self.samples() {
            let b = self.labels[j];
            let s = sigmoid(-b * self.features.row_dot(j, x));
            if s != T::zero() {
                self.features.add_row_scaled(j, -b * s / m, &mut g);
            }
        }
        Ok(g)
    }

    fn hessian_vec(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), v.len())?;
        let m = T::from_count(self.samples());
        let mut out: Vec<T> = v.iter().map(|&vi| self.reg * vi).collect();
        for j in 0..self.samples() {
            let t = self.features.row_dot(j, x);
            let w = sigmoid(t) * sigmoid(-t);
            let av = self.features.row_dot(j, v);
            if w != T::zero() && av != T::zero() {
                self.features.add_row_scaled(j, w * av / m, &mut out);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Objective<T> {
    Quadratic(QuadraticObjective<T>),
    Logistic(LogisticObjective<T>),
}

impl<T: Scalar> From<QuadraticObjective<T>> for Objective<T> {
    fn from(q: QuadraticObjective<T>) -> Self {
        Objective::Quadratic(q)
    }
}

impl<T: Scalar> From<LogisticObjective<T>> for Objective<T> {
    fn from(l: LogisticObjective<T>) -> Self {
        Objective::Logistic(l)
    }
}

impl<T: Scalar> Oracle<T> for Objective<T> {
    fn dim(&self) -> usize {
        match self {
            Objective::Quadratic(q) => q.dim(),
            Objective::Logistic(l) => l.dim(),
        }
    }

    fn eval_loss(&self, x: &[T]) -> Result<T> {
        match self {
            Objective::Quadratic(q) => q.eval_loss(x),
            Objective::Logistic(l) => l.eval_loss(x),
        }
    }

    fn eval_grad(&self, x: &[T]) -> Result<Vec<T>> {
        match self {
            Objective::Quadratic(q) => q.eval_grad(x),
            Objective::Logistic(l) => l.eval_grad(x),
        }
    }

    fn hessian_vec(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        match self {
            Objective::Quadratic(q) => q.hessian_vec(x, v),
            Objective::Logistic(l) => l.hessian_vec(x, v),
        }
    }
}

/// `N` local objectives with their dataset sizes and declared classes
/// `F_{μ_i, L_i}`. Immutable once built.
#[derive(Clone, Debug)]
pub struct ProblemInstance<T> {
    locals: Vec<Objective<T>>,
    sizes: Vec<usize>,
    mus: Vec<T>,
    ells: Vec<T>,
}

impl<T: Scalar> ProblemInstance<T> {
    /// Validates the declared classes: for quadratics the spectrum of `Q` must
    /// lie in `[μ_i, L_i]`; for logistic objectives `μ_i ≤ reg` is required.
    pub fn new(locals: Vec<Objective<T>>, sizes: Vec<usize>, mus: Vec<T>, ells: Vec<T>) -> Result<Self> {
        let n = locals.len();
        if n == 0 {
            return Err(Error::Contract("problem instance needs at least one agent".into()));
        }
        check_dim(n, sizes.len())?;
        check_dim(n, mus.len())?;
        check_dim(n, ells.len())?;
        let d = locals[0].dim();
        for (i, obj) in locals.iter().enumerate() {
            check_dim(d, obj.dim())?;
            if sizes[i] == 0 {
                return Err(Error::Contract(format!("agent {i} has an empty dataset")));
            }
            if !(mus[i] > T::zero() && mus[i] <= ells[i]) {
                return Err(Error::Contract(format!(
                    "agent {i}: need 0 < mu <= L, got mu={} L={}",
                    mus[i], ells[i]
                )));
            }
            let slack = T::c(1e-9) * ells[i].max(T::one());
            match obj {
                Objective::Quadratic(q) => {
                    let e = q.curvature().sym_eigen();
                    if e.min() < mus[i] - slack || e.max() > ells[i] + slack {
                        return Err(Error::Contract(format!(
                            "agent {i}: curvature spectrum [{}, {}] outside declared [{}, {}]",
                            e.min(),
                            e.max(),
                            mus[i],
                            ells[i]
                        )));
                    }
                }
                Objective::Logistic(l) => {
                    if mus[i] > l.reg() + slack {
                        return Err(Error::Contract(format!(
                            "agent {i}: logistic mu {} exceeds ridge weight {}",
                            mus[i],
                            l.reg()
                        )));
                    }
                }
            }
        }
        Ok(Self {
            locals,
            sizes,
            mus,
            ells,
        })
    }

    /// Equal dataset sizes.
    pub fn uniform(locals: Vec<Objective<T>>, mus: Vec<T>, ells: Vec<T>) -> Result<Self> {
        let n = locals.len();
        Self::new(locals, vec![1; n], mus, ells)
    }

    pub fn agents(&self) -> usize {
        self.locals.len()
    }

    pub fn dim(&self) -> usize {
        self.locals[0].dim()
    }

    pub fn locals(&self) -> &[Objective<T>] {
        &self.locals
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn mus(&self) -> &[T] {
        &self.mus
    }

    pub fn ells(&self) -> &[T] {
        &self.ells
    }

    /// `|D_i| / Σ|D_j|`
    pub fn weights(&self) -> Vec<T> {
        let total = T::from_count(self.sizes.iter().sum());
        self.sizes.iter().map(|&s| T::from_count(s) / total).collect()
    }

    pub fn global_objective(&self) -> GlobalObjective<'_, T> {
        GlobalObjective {
            locals: &self.locals,
            weights: self.weights(),
        }
    }
}

/// `f(x) = Σ |D_i| f_i(x) / Σ |D_i|`
#[derive(Clone, Debug)]
pub struct GlobalObjective<'a, T> {
    locals: &'a [Objective<T>],
    weights: Vec<T>,
}

impl<T: Scalar> GlobalObjective<'_, T> {
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

impl<T: Scalar> Oracle<T> for GlobalObjective<'_, T> {
    fn dim(&self) -> usize {
        self.locals[0].dim()
    }

    fn eval_loss(&self, x: &[T]) -> Result<T> {
        let mut acc = T::zero();
        for (f, &w) in self.locals.iter().zip(&self.weights) {
            acc += w * f.eval_loss(x)?;
        }
        Ok(acc)
    }

    fn eval_grad(&self, x: &[T]) -> Result<Vec<T>> {
        let mut g = vec![T::zero(); x.len()];
        for (f, &w) in self.locals.iter().zip(&self.weights) {
            axpy(w, &f.eval_grad(x)?, &mut g);
        }
        check_dim(self.dim(), g.len())?;
        Ok(g)
    }

    fn hessian_vec(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        let mut h = vec![T::zero(); x.len()];
        for (f, &w) in self.locals.iter().zip(&self.weights) {
            axpy(w, &f.hessian_vec(x, v)?, &mut h);
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_quad(q: f64, c: f64, r: f64) -> QuadraticObjective<f64> {
        QuadraticObjective::new(Mat::from_rows(&[vec![q]]), vec![c], r).unwrap()
    }

    fn single_logistic(a: f64, b: f64, reg: f64) -> LogisticObjective<f64> {
        let feats = if a == 0.0 {
            CsrMatrix::from_rows(1, &[vec![]]).unwrap()
        } else {
            CsrMatrix::from_rows(1, &[vec![(0, a)]]).unwrap()
        };
        LogisticObjective::new(feats, vec![b], reg).unwrap()
    }

    #[test]
    fn quadratic_loss_and_grad() {
        let q = scalar_quad(1.0, 0.0, 0.0);
        assert_eq!(q.eval_loss(&[2.0]).unwrap(), 2.0);
        assert_eq!(q.eval_grad(&[3.0]).unwrap(), vec![3.0]);
        let q2 = scalar_quad(2.0, 0.0, 0.0);
        assert_eq!(q2.hessian_vec(&[-7.0], &[1.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn logistic_zero_feature_is_ln2() {
        let l = single_logistic(0.0, 1.0, 0.0);
        assert!((l.eval_loss(&[5.0]).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(l.eval_grad(&[5.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn logistic_scalar_values() {
        let l = single_logistic(2.0, 1.0, 0.1);
        // direct scalar evaluation: log(1 + e^{-2}) + 0.1/2
        let oracle = (1.0 + (-2.0f64).exp()).ln() + 0.05;
        assert!((l.eval_loss(&[1.0]).unwrap() - oracle).abs() < 1e-14);
        assert!((oracle - 0.176928).abs() < 1e-6);

        let l0 = single_logistic(2.0, 1.0, 0.0);
        assert!((l0.eval_grad(&[0.0]).unwrap()[0] + 1.0).abs() < 1e-15);
        assert!((l0.hessian_vec(&[0.0], &[1.0]).unwrap()[0] - 1.0).abs() < 1e-15);
        let lr = single_logistic(2.0, 1.0, 0.1);
        assert!((lr.hessian_vec(&[0.0], &[1.0]).unwrap()[0] - 1.1).abs() < 1e-15);
    }

    #[test]
    fn logistic_extreme_margins_finite() {
        let l = single_logistic(1.0, -1.0, 0.0);
        for &x in &[-700.0, -300.0, 0.0, 300.0, 700.0] {
            let v = l.eval_loss(&[x]).unwrap();
            let g = l.eval_grad(&[x]).unwrap()[0];
            let h = l.hessian_vec(&[x], &[1.0]).unwrap()[0];
            assert!(v.is_finite() && g.is_finite() && h.is_finite(), "x={x}");
        }
        assert!((l.eval_loss(&[700.0]).unwrap() - 700.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let q = scalar_quad(1.0, 0.0, 0.0);
        assert!(matches!(q.eval_loss(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
        let l = single_logistic(1.0, 1.0, 0.0);
        assert!(matches!(l.hessian_vec(&[1.0], &[1.0, 0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn bad_labels_rejected() {
        let feats = CsrMatrix::from_rows(1, &[vec![(0, 1.0)]]).unwrap();
        assert!(LogisticObjective::new(feats, vec![0.5], 0.0).is_err());
    }

    #[test]
    fn global_objective_weighted_average() {
        let f1: Objective<f64> = scalar_quad(1.0 / 3.0, 0.0, 0.0).into();
        let f2: Objective<f64> = scalar_quad(3.0, 0.0, 0.0).into();
        let inst = ProblemInstance::uniform(vec![f1, f2], vec![1.0 / 3.0, 3.0], vec![1.0 / 3.0, 3.0]).unwrap();
        let v = inst.global_objective().eval_loss(&[1.0]).unwrap();
        assert!((v - 5.0 / 6.0).abs() < 1e-15);

        let g1: Objective<f64> = scalar_quad(1.0, 0.0, 0.0).into();
        let g2: Objective<f64> = scalar_quad(2.0, 0.0, 0.0).into();
        let inst = ProblemInstance::new(vec![g1, g2], vec![1, 3], vec![1.0, 2.0], vec![1.0, 2.0]).unwrap();
        let v = inst.global_objective().eval_loss(&[1.0]).unwrap();
        assert!((v - 0.875).abs() < 1e-15);
    }

    #[test]
    fn single_agent_global_matches_local() {
        let f: Objective<f64> = QuadraticObjective::diagonal(&[0.5, 2.0], &[1.0, -1.0]).unwrap().into();
        let inst = ProblemInstance::uniform(vec![f.clone()], vec![0.5], vec![2.0]).unwrap();
        let g = inst.global_objective();
        let x = [0.3, -0.7];
        assert_eq!(g.eval_loss(&x).unwrap(), f.eval_loss(&x).unwrap());
        assert_eq!(g.eval_grad(&x).unwrap(), f.eval_grad(&x).unwrap());
    }

    #[test]
    fn declared_class_is_checked() {
        let f: Objective<f64> = scalar_quad(3.0, 0.0, 0.0).into();
        assert!(ProblemInstance::uniform(vec![f], vec![0.1], vec![1.0]).is_err());
    }
}
