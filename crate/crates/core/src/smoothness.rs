//! Per-agent curvature constants `(μ_i, L_i)` and their size-weighted mean.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm2, Mat};
use crate::problem::{LogisticObjective, Objective, Oracle, QuadraticObjective};
use crate::scalar::Scalar;

const REL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ExactEig,
    GradDiff,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactEig => "exact_eig",
            Method::GradDiff => "grad_diff",
        }
    }
}

fn start_vector<T: Scalar>(d: usize) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let v: Vec<T> = (0..d).map(|_| T::c(rng.sample::<f64, _>(StandardNormal))).collect();
    let n = norm2(&v);
    v.into_iter().map(|x| x / n).collect()
}

/// Dominant eigenvalue of a symmetric positive semidefinite operator by
/// Lanczos with full reorthogonalization: the power iteration's Krylov space,
/// searched for its best Ritz value. Stops once the Ritz residual is at most
/// `1e-10·θ`, or when the space is exhausted.
pub fn dominant_eigenvalue<T: Scalar>(d: usize, mut apply: impl FnMut(&[T]) -> Result<Vec<T>>) -> Result<T> {
    if d == 0 {
        return Err(Error::Contract("eigenvalue of an empty space".into()));
    }
    let max_iter = 10 * d;
    let mut basis = vec![start_vector::<T>(d)];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let mut residual = T::infinity();
    for j in 0..max_iter.min(d) {
        let mut w = apply(&basis[j])?;
        let a = dot(&basis[j], &w);
        alphas.push(a);
        // two passes of Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, &qi)| *wi -= c * qi);
            }
        }
        let b = norm2(&w);
        let k = alphas.len();
        let t = Mat::from_fn(k, k, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c || c + 1 == r {
                betas[r.min(c)]
            } else {
                T::zero()
            }
        });
        let e = t.sym_eigen();
        let theta = e.max();
        residual = b * e.vectors[(k - 1, k - 1)].abs();
        let scale = theta.abs().max(alphas.iter().fold(T::zero(), |m, &v| m.max(v.abs())));
        if residual <= T::c(REL_TOL) * theta.abs() || b <= T::epsilon() * scale || k == d {
            return Ok(theta);
        }
        betas.push(b);
        basis.push(w.into_iter().map(|x| x / b).collect());
    }
    Err(Error::Numerical { msg: format!("Lanczos did not converge in {max_iter} steps"), residual: residual.to_f64_lossy() })
}

fn quadratic_bounds<T: Scalar>(q: &QuadraticObjective<T>) -> Result<(T, T)> {
    let m = q.curvature();
    let d = m.rows();
    let top = dominant_eigenvalue(d, |v| Ok(m.matvec(v)))?;
    let bottom = match m.cholesky() {
        Some(ch) => {
            let inv = dominant_eigenvalue(d, |v| Ok(ch.solve(v)))?;
            T::one() / inv
        }
        None => {
            // singular or indefinite: shift so the bottom becomes dominant
            let shifted = Mat::identity(d).scaled(top).sub(m);
            top - dominant_eigenvalue(d, |v| Ok(shifted.matvec(v)))?
        }
    };
    Ok((bottom, top))
}

fn logistic_bounds<T: Scalar>(l: &LogisticObjective<T>) -> Result<(T, T)> {
    let top = dominant_eigenvalue(l.dim(), |v| l.curvature_bound_vec(v))?;
    Ok((l.reg(), top))
}

/// `(μ_i, L_i)`. Quadratics report the extreme eigenvalues of `Q`; logistic
/// losses report the ridge weight and the top eigenvalue of `AᵀA/(4m) + reg·I`.
pub fn exact_smoothness<T: Scalar>(obj: &Objective<T>) -> Result<(T, T)> {
    match obj {
        Objective::Quadratic(q) => quadratic_bounds(q),
        Objective::Logistic(l) => logistic_bounds(l),
    }
}

/// `‖g(x + εu) − g(x)‖ / ‖εu‖`
pub fn difference_quotient<T: Scalar>(obj: &dyn Oracle<T>, x: &[T], u: &[T], eps: T) -> Result<T> {
    check_dim(x.len(), u.len())?;
    let shifted: Vec<T> = x.iter().zip(u).map(|(&a, &b)| a + eps * b).collect();
    let g0 = obj.eval_grad(x)?;
    let g1 = obj.eval_grad(&shifted)?;
    let diff: Vec<T> = g1.iter().zip(&g0).map(|(&a, &b)| a - b).collect();
    Ok(norm2(&diff) / (eps * norm2(u)))
}

/// Largest difference quotient over `trials` random points of the ball of
/// radius `radius`, each perturbed along a random unit direction. Trial `t`
/// draws from its own stream, so a larger trial count sees a superset.
pub fn estimate_smoothness_grad_diff<T: Scalar>(obj: &dyn Oracle<T>, radius: T, trials: usize, eps: T, seed: u64) -> Result<T> {
    if trials == 0 || !(eps > T::zero()) {
        return Err(Error::Contract("grad-diff estimate needs trials >= 1 and eps > 0".into()));
    }
    let d = obj.dim();
    let quotients: Vec<T> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let gauss = |rng: &mut ChaCha8Rng| -> Vec<T> { (0..d).map(|_| T::c(rng.sample::<f64, _>(StandardNormal))).collect() };
            let dir = gauss(&mut rng);
            let u = gauss(&mut rng);
            let r = radius * T::c(rng.random::<f64>().powf(1.0 / d as f64)) / norm2(&dir);
            let x: Vec<T> = dir.iter().map(|&v| v * r).collect();
            let nu = norm2(&u);
            let u: Vec<T> = u.into_iter().map(|v| v / nu).collect();
            difference_quotient(obj, &x, &u, eps)
        })
        .collect::<Result<_>>()?;
    Ok(quotients.into_iter().fold(T::zero(), T::max))
}

/// `Σ|D_i| L_i / Σ|D_i|`
pub fn aggregate_l<T: Scalar>(ells: &[T], sizes: &[usize]) -> Result<T> {
    if ells.is_empty() {
        return Err(Error::Contract("aggregate L of no agents".into()));
    }
    check_dim(ells.len(), sizes.len())?;
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return Err(Error::Contract("aggregate L with zero total size".into()));
    }
    let num: T = ells.iter().zip(sizes).map(|(&l, &s)| l * T::from_count(s)).sum();
    Ok(num / T::from_count(total))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessReport<T> {
    pub per_agent_l: Vec<T>,
    pub per_agent_mu: Vec<T>,
    pub aggregate_l: T,
    pub method: Method,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

impl<T: Scalar> SmoothnessReport<T> {
    pub fn exact(locals: &[Objective<T>], sizes: &[usize]) -> Result<Self> {
        let (mu, l): (Vec<T>, Vec<T>) = locals.iter().map(exact_smoothness).collect::<Result<Vec<_>>>()?.into_iter().unzip();
        Self::assemble(l, mu, sizes, Method::ExactEig, None, None)
    }

    /// `μ_i` is not estimated; the caller passes the known values.
    pub fn grad_diff(
        locals: &[Objective<T>],
        sizes: &[usize],
        mus: Vec<T>,
        radius: T,
        trials: usize,
        eps: T,
        seed: u64,
    ) -> Result<Self> {
        let l = locals
            .iter()
            .map(|f| estimate_smoothness_grad_diff(f, radius, trials, eps, seed))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(l, mus, sizes, Method::GradDiff, Some(trials), Some(seed))
    }

    fn assemble(l: Vec<T>, mu: Vec<T>, sizes: &[usize], method: Method, trials: Option<usize>, seed: Option<u64>) -> Result<Self> {
        check_dim(l.len(), mu.len())?;
        if let Some(i) = l.iter().position(|&v| !(v > T::zero())) {
            return Err(Error::Numerical { msg: format!("agent {i} has nonpositive L"), residual: l[i].to_f64_lossy() });
        }
        let aggregate_l = aggregate_l(&l, sizes)?;
        Ok(Self { per_agent_l: l, per_agent_mu: mu, aggregate_l, method, trials, seed })
    }

    /// CSV `agent_id,mu,L,method,seed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("agent_id,mu,L,method,seed\n");
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
        for (i, (l, mu)) in self.per_agent_l.iter().zip(&self.per_agent_mu).enumerate() {
            let _ = writeln!(out, "{i},{},{},{},{seed}", mu.to_f64_lossy(), l.to_f64_lossy(), self.method.name());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::CsrMatrix;

    fn logistic(rows: &[Vec<(usize, f64)>], cols: usize, reg: f64) -> Objective<f64> {
        let m = rows.len();
        LogisticObjective::new(CsrMatrix::from_rows(cols, rows).unwrap(), vec![1.0; m], reg).unwrap().into()
    }

    #[test]
    fn quadratic_extremes() {
        let q: Objective<f64> = QuadraticObjective::diagonal(&[1.0 / 3.0, 3.0], &[0.0, 0.0]).unwrap().into();
        let (mu, l) = exact_smoothness(&q).unwrap();
        assert!((mu - 1.0 / 3.0).abs() < 1e-9 && (l - 3.0).abs() < 1e-9);
    }

    #[test]
    fn logistic_bounds() {
        let (mu, l) = exact_smoothness(&logistic(&[vec![(0, 2.0)]], 1, 0.1)).unwrap();
        assert!((l - 1.1).abs() < 1e-12 && mu == 0.1);
        let (mu, l) = exact_smoothness(&logistic(&[vec![], vec![]], 3, 0.1)).unwrap();
        assert!((l - 0.1).abs() < 1e-12 && mu == 0.1);
    }

    #[test]
    fn grad_diff_on_quadratic() {
        let q: Objective<f64> = QuadraticObjective::diagonal(&[1.0, 2.0], &[0.0, 0.0]).unwrap().into();
        let est = estimate_smoothness_grad_diff(&q, 1.0, 10_000, 1e-4, 7).unwrap();
        assert!((1.9..=2.0 + 1e-9).contains(&est), "{est}");
        let exact = difference_quotient(&q, &[0.3, -0.2], &[0.0, 1.0], 1e-3).unwrap();
        assert!((exact - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grad_diff_on_logistic() {
        let f = logistic(&[vec![(0, 2.0)]], 1, 0.0);
        let est = estimate_smoothness_grad_diff(&f, 1.0, 10_000, 1e-4, 3).unwrap();
        assert!((0.9..=1.0 + 1e-9).contains(&est), "{est}");
    }

    #[test]
    fn aggregate_examples() {
        assert!((aggregate_l::<f64>(&[1.0 / 3.0, 3.0], &[1, 1]).unwrap() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(aggregate_l(&[2.5], &[7]).unwrap(), 2.5);
        assert!((aggregate_l::<f64>(&[1.0, 3.0], &[3, 1]).unwrap() - 1.5).abs() < 1e-15);
        assert!(aggregate_l(&[1.0], &[1, 2]).is_err());
    }

    #[test]
    fn report_csv() {
        let q: Objective<f64> = QuadraticObjective::diagonal(&[1.0], &[0.0]).unwrap().into();
        let r = SmoothnessReport::exact(&[q.clone(), q], &[1, 1]).unwrap();
        assert_eq!(r.to_csv(), "agent_id,mu,L,method,seed\n0,1,1,exact_eig,\n1,1,1,exact_eig,\n");
    }
}
