//! Reduction of a [`StandardSdp`] to a smaller, strictly feasible problem.
//!
//! PEP instances have no Slater point: equal-start, zero-gradient and
//! stationarity equalities pin the Gram matrix to a face of the PSD cone, and
//! pairs of interpolation inequalities can do the same once combined. The
//! passes below find that face, restrict `G = V X Vᵀ`, eliminate the free
//! vector along directions fixed or ignored by every row, and normalize rows.

use std::collections::HashMap;

use super::{PresolveStats, Sense, StandardSdp, SymSparse};
use crate::error::Result;
use crate::linalg::{complement_basis, dot, norm2, Mat};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Verdict {
    Proceed,
    Infeasible,
    Unbounded,
}

/// Spectral factor `A = Σ_a s_a u_a u_aᵀ`; the vectors are the rows of `u`.
#[derive(Clone, Debug)]
pub(crate) struct Factor<T> {
    pub u: Mat<T>,
    pub s: Vec<T>,
}

impl<T: Scalar> Factor<T> {
    fn empty(n: usize) -> Self {
        Self { u: Mat::zeros(0, n), s: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.s.len()
    }

    fn frob_norm(&self) -> T {
        norm2(&self.s)
    }

    /// Factor of a sparse symmetric matrix via the eigen-decomposition of its
    /// support submatrix.
    fn from_sparse(a: &SymSparse<T>, n: usize) -> Self {
        let mut support: Vec<usize> = a.entries().iter().flat_map(|&(i, j, _)| [i, j]).collect();
        support.sort_unstable();
        support.dedup();
        if support.is_empty() {
            return Self::empty(n);
        }
        let pos: HashMap<usize, usize> = support.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let k = support.len();
        let mut sub = Mat::zeros(k, k);
        for &(i, j, v) in a.entries() {
            sub[(pos[&i], pos[&j])] = v;
            sub[(pos[&j], pos[&i])] = v;
        }
        let eig = sub.sym_eigen();
        let scale = eig.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let cut = T::c(1e-13) * scale;
        let keep: Vec<usize> = (0..k).filter(|&t| eig.values[t].abs() > cut).collect();
        let mut u = Mat::zeros(keep.len(), n);
        for (r, &t) in keep.iter().enumerate() {
            for (loc, &i) in support.iter().enumerate() {
                u[(r, i)] = eig.vectors[(loc, t)];
            }
        }
        Self { u, s: keep.iter().map(|&t| eig.values[t]).collect() }
    }

    /// Expresses the factor in the coordinates of the orthonormal columns of
    /// `v` and recompresses it.
    fn restrict(&self, v: &Mat<T>) -> Self {
        let w = self.u.matmul(v);
        let reference = self.s.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        spectrum(&w, &self.s, reference)
    }

    fn concat(&self, other: &Self) -> Self {
        let n = self.u.cols();
        let r = self.rank() + other.rank();
        let mut u = Mat::zeros(r, n);
        for a in 0..self.rank() {
            u.row_mut(a).copy_from_slice(self.u.row(a));
        }
        for a in 0..other.rank() {
            u.row_mut(self.rank() + a).copy_from_slice(other.u.row(a));
        }
        let mut s = self.s.clone();
        s.extend_from_slice(&other.s);
        Self { u, s }
    }

    fn to_dense(&self) -> Mat<T> {
        let n = self.u.cols();
        let mut m = Mat::zeros(n, n);
        for a in 0..self.rank() {
            let ua = self.u.row(a);
            for i in 0..n {
                let f = self.s[a] * ua[i];
                if f == T::zero() {
                    continue;
                }
                let row = m.row_mut(i);
                for j in 0..n {
                    row[j] += f * ua[j];
                }
            }
        }
        m
    }
}

/// Eigen-decomposition of `Wᵀ diag(s) W` for a short-and-wide `W` (rows are
/// vectors), returned as an orthonormal [`Factor`]. Eigenvalues below
/// `1e-12 · max(|λ|_max, reference)` are dropped.
fn spectrum<T: Scalar>(w: &Mat<T>, s: &[T], reference: T) -> Factor<T> {
    let r = w.rows();
    let n = w.cols();
    if r == 0 {
        return Factor::empty(n);
    }
    let gram = w.matmul(&w.transpose());
    let ge = gram.sym_eigen();
    let gmax = ge.max().max(T::zero());
    if gmax == T::zero() {
        return Factor::empty(n);
    }
    let keep: Vec<usize> = (0..r).filter(|&t| ge.values[t] > T::c(1e-24) * gmax).collect();
    // W = Λ^{1/2} Eᵀ... written with orthonormal rows q_l = λ_l^{-1/2} Σ_a E_al w_a
    let k = keep.len();
    let mut q = Mat::zeros(k, n);
    for (l, &t) in keep.iter().enumerate() {
        let inv = T::one() / ge.values[t].sqrt();
        for a in 0..r {
            let e = ge.vectors[(a, t)] * inv;
            if e == T::zero() {
                continue;
            }
            let wa = w.row(a);
            let ql = q.row_mut(l);
            for j in 0..n {
                ql[j] += e * wa[j];
            }
        }
    }
    // core = Λ^{1/2} Eᵀ S E Λ^{1/2}
    let mut core = Mat::zeros(k, k);
    for (l1, &t1) in keep.iter().enumerate() {
        for (l2, &t2) in keep.iter().enumerate() {
            let mut acc = T::zero();
            for a in 0..r {
                acc += ge.vectors[(a, t1)] * s[a] * ge.vectors[(a, t2)];
            }
            core[(l1, l2)] = acc * (ge.values[t1] * ge.values[t2]).sqrt();
        }
    }
    let ce = core.sym_eigen();
    let cmax = ce.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let cut = T::c(1e-12) * cmax.max(reference);
    let sel: Vec<usize> = (0..k).filter(|&t| ce.values[t].abs() > cut).collect();
    let mut u = Mat::zeros(sel.len(), n);
    for (row, &t) in sel.iter().enumerate() {
        for l in 0..k {
            let f = ce.vectors[(l, t)];
            if f == T::zero() {
                continue;
            }
            let ql = q.row(l).to_vec();
            let ur = u.row_mut(row);
            for j in 0..n {
                ur[j] += f * ql[j];
            }
        }
    }
    Factor { u, s: sel.iter().map(|&t| ce.values[t]).collect() }
}

#[derive(Clone, Debug)]
pub(crate) struct Row<T> {
    pub orig: usize,
    pub fac: Factor<T>,
    pub b: Vec<T>,
    pub rhs: T,
    pub ineq: bool,
    /// The reduced row equals the original row divided by `scale`.
    pub scale: T,
}

#[derive(Clone, Debug)]
pub(crate) struct Reduced<T> {
    pub verdict: Verdict,
    pub n_orig: usize,
    pub p_orig: usize,
    pub m_orig: usize,
    /// Orthonormal basis of the face: `G = V X Vᵀ`.
    pub v: Mat<T>,
    /// `F = z0 + T ξ`
    pub z0: Vec<T>,
    pub t: Mat<T>,
    pub c_mat: Mat<T>,
    pub c_vec: Vec<T>,
    pub obj_const: T,
    pub rows: Vec<Row<T>>,
    pub facial_rounds: usize,
}

impl<T: Scalar> Reduced<T> {
    pub fn n(&self) -> usize {
        self.v.cols()
    }

    pub fn p(&self) -> usize {
        self.t.cols()
    }

    pub fn stats(&self) -> PresolveStats {
        PresolveStats {
            psd_dim_in: self.n_orig,
            psd_dim_out: self.n(),
            free_dim_in: self.p_orig,
            free_dim_out: self.p(),
            rows_in: self.m_orig,
            rows_out: self.rows.len(),
            facial_rounds: self.facial_rounds,
        }
    }

    /// Maps a reduced primal-dual point back to the original variables.
    pub fn recover(&self, x: &Mat<T>, xi: &[T], y: &[T]) -> (Mat<T>, Vec<T>, Vec<T>) {
        let g = self.v.matmul(x).matmul(&self.v.transpose()).symmetrized();
        let mut f = self.z0.clone();
        for (k, fk) in f.iter_mut().enumerate() {
            *fk += dot(self.t.row(k), xi);
        }
        let mut mult = vec![T::zero(); self.m_orig];
        for (row, &yr) in self.rows.iter().zip(y) {
            mult[row.orig] = yr / row.scale;
        }
        (g, f, mult)
    }
}

struct Work<T> {
    orig: usize,
    fac: Factor<T>,
    b: Vec<T>,
    rhs: T,
    ineq: bool,
}

fn is_zero_vec<T: Scalar>(v: &[T], tol: T) -> bool {
    v.iter().all(|x| x.abs() <= tol)
}

/// Signature used to pair `row` and `−row` inequalities.
fn signature<T: Scalar>(b: &[T], rhs: T, negate: bool) -> Vec<i64> {
    let sgn = if negate { -T::one() } else { T::one() };
    let q = |x: T| ((sgn * x).to_f64_lossy() * 1e9).round() as i64;
    let mut out: Vec<i64> = b.iter().map(|&x| q(x)).collect();
    out.push(q(rhs));
    out
}

fn max_abs_s<T: Scalar>(f: &Factor<T>) -> T {
    f.s.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Range of `f` when it is semidefinite (either sign), `None` otherwise.
/// `reference` is the scale of the unreduced rows `f` came from, so that
/// cancellation noise is not mistaken for a face.
fn semidefinite_range<T: Scalar>(f: &Factor<T>, allow_nsd: bool, reference: T) -> Option<Vec<Vec<T>>> {
    if f.rank() == 0 {
        return Some(Vec::new());
    }
    let tol = T::c(1e-9) * max_abs_s(f).max(reference);
    let psd = f.s.iter().all(|&v| v >= -tol);
    let nsd = allow_nsd && f.s.iter().all(|&v| v <= tol);
    if !(psd || nsd) {
        return None;
    }
    Some(
        (0..f.rank())
            .filter(|&a| f.s[a].abs() > tol)
            .map(|a| f.u.row(a).to_vec())
            .collect(),
    )
}

pub(crate) fn reduce<T: Scalar>(sdp: &StandardSdp<T>) -> Result<Reduced<T>> {
    let n = sdp.psd_dim;
    let p = sdp.free_dim;
    let m = sdp.constraints.len();
    let orig_factors: Vec<Factor<T>> = sdp.constraints.iter().map(|c| Factor::from_sparse(&c.mat, n)).collect();
    let obj_factor = Factor::from_sparse(&sdp.objective_mat, n);

    let mut rows: Vec<Work<T>> = sdp
        .constraints
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let mut b = vec![T::zero(); p];
            for &(k, v) in &c.vec {
                b[k] += v;
            }
            Work {
                orig: j,
                fac: orig_factors[j].clone(),
                b,
                rhs: c.rhs,
                ineq: c.sense == Sense::LessEq,
            }
        })
        .collect();

    let lin_tol = T::c(1e-12);
    let mut kernel: Vec<Vec<T>> = Vec::new();
    let mut v = Mat::identity(n);
    let mut rounds = 0;

    // Facial reduction passes.
    loop {
        let mut found: Vec<Vec<T>> = Vec::new();
        let mut drop = vec![false; rows.len()];

        for (idx, r) in rows.iter().enumerate() {
            if r.ineq || !is_zero_vec(&r.b, lin_tol) || r.rhs.abs() > lin_tol || r.fac.rank() == 0 {
                continue;
            }
            if let Some(range) = semidefinite_range(&r.fac, true, max_abs_s(&orig_factors[r.orig])) {
                found.extend(range);
                drop[idx] = true;
            }
        }

        let mut by_sig: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (idx, r) in rows.iter().enumerate() {
            if r.ineq && !drop[idx] {
                by_sig.entry(signature(&r.b, r.rhs, false)).or_default().push(idx);
            }
        }
        let mut paired = vec![false; rows.len()];
        let mut to_equality: Vec<usize> = Vec::new();
        for idx in 0..rows.len() {
            if !rows[idx].ineq || drop[idx] || paired[idx] {
                continue;
            }
            let Some(cands) = by_sig.get(&signature(&rows[idx].b, rows[idx].rhs, true)) else {
                continue;
            };
            for &k in cands {
                if k == idx || paired[k] || drop[k] {
                    continue;
                }
                let sum = rows[idx].fac.concat(&rows[k].fac);
                let reference = max_abs_s(&orig_factors[rows[idx].orig]).max(max_abs_s(&orig_factors[rows[k].orig]));
                let red = spectrum(&sum.u, &sum.s, reference);
                if let Some(range) = semidefinite_range(&red, false, reference) {
                    found.extend(range);
                    paired[idx] = true;
                    paired[k] = true;
                    to_equality.push(idx);
                    drop[k] = true;
                    break;
                }
            }
        }

        if found.is_empty() {
            // Directions orthogonal to every constraint and objective factor
            // are invisible to the problem: G can be projected off them.
            let nr = v.cols();
            let mut gram: Mat<T> = Mat::zeros(nr, nr);
            for f in rows.iter().map(|r| &r.fac).chain(std::iter::once(&obj_factor.restrict(&v))) {
                gram = gram.add(&f.u.transpose().matmul(&f.u));
            }
            let eig = gram.sym_eigen();
            let cut = T::c(1e-10) * eig.max().max(T::min_positive_value());
            let span: Vec<usize> = (0..nr).filter(|&t| eig.values[t] > cut).collect();
            if span.len() == nr {
                break;
            }
            for t in (0..nr).filter(|&t| eig.values[t] <= cut) {
                let w = eig.vectors.column(t);
                kernel.push((0..n).map(|i| dot(v.row(i), &w)).collect());
            }
            let e = Mat::from_fn(nr, span.len(), |i, j| eig.vectors[(i, span[j])]);
            v = v.matmul(&e);
            for r in rows.iter_mut() {
                r.fac = orig_factors[r.orig].restrict(&v);
            }
            rounds += 1;
            if v.cols() == 0 {
                break;
            }
            continue;
        }
        rounds += 1;
        for idx in to_equality {
            rows[idx].ineq = false;
        }
        let mut keep = drop.iter().map(|d| !d);
        rows.retain(|_| keep.next().unwrap());

        // Lift the new directions to original coordinates.
        for w in found {
            let mut lifted = vec![T::zero(); n];
            for (i, li) in lifted.iter_mut().enumerate() {
                *li = dot(v.row(i), &w);
            }
            kernel.push(lifted);
        }
        let (comp, _) = complement_basis(n, &kernel, T::c(1e-10));
        v = comp;
        for r in rows.iter_mut() {
            r.fac = orig_factors[r.orig].restrict(&v);
        }
        if v.cols() == 0 {
            break;
        }
    }

    let c_mat = {
        let c = sdp.objective_mat.to_dense(n);
        v.transpose().matmul(&c).matmul(&v).symmetrized()
    };
    let mut c_vec = vec![T::zero(); p];
    for &(k, val) in &sdp.objective_vec {
        c_vec[k] += val;
    }

    let mut verdict = Verdict::Proceed;
    let feas_tol = T::c(1e-9);

    // Rows with no Gram part are linear in F.
    let mut lin_eq: Vec<usize> = Vec::new();
    let mut keep = vec![true; rows.len()];
    for (idx, r) in rows.iter().enumerate() {
        if r.fac.rank() > 0 {
            continue;
        }
        let scale = T::one() + r.rhs.abs();
        if is_zero_vec(&r.b, lin_tol) {
            keep[idx] = false;
            let bad = if r.ineq { r.rhs < -feas_tol * scale } else { r.rhs.abs() > feas_tol * scale };
            if bad {
                verdict = Verdict::Infeasible;
            }
        } else if !r.ineq {
            lin_eq.push(idx);
            keep[idx] = false;
        }
    }

    // F = z0 + T1 ζ solves the linear equalities.
    let (z0, t1) = if lin_eq.is_empty() {
        (vec![T::zero(); p], Mat::identity(p))
    } else {
        let me = lin_eq.len();
        let beq = Mat::from_fn(me, p, |r, k| rows[lin_eq[r]].b[k]);
        let deq: Vec<T> = lin_eq.iter().map(|&r| rows[r].rhs).collect();
        let normal = beq.transpose().matmul(&beq);
        let eig = normal.sym_eigen();
        let cut = T::c(1e-12) * eig.max().max(T::min_positive_value());
        let rhs = beq.tmatvec(&deq);
        let mut z0 = vec![T::zero(); p];
        let mut null_cols = Vec::new();
        for t in 0..p {
            if eig.values[t] > cut {
                let coef = (0..p).map(|k| eig.vectors[(k, t)] * rhs[k]).sum::<T>() / eig.values[t];
                for (k, zk) in z0.iter_mut().enumerate() {
                    *zk += coef * eig.vectors[(k, t)];
                }
            } else {
                null_cols.push(t);
            }
        }
        let resid = beq.matvec(&z0).iter().zip(&deq).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max);
        if resid > feas_tol * (T::one() + deq.iter().fold(T::zero(), |m, v| m.max(v.abs()))) {
            verdict = Verdict::Infeasible;
        }
        let t1 = Mat::from_fn(p, null_cols.len(), |k, c| eig.vectors[(k, null_cols[c])]);
        (z0, t1)
    };

    let obj_const = dot(&c_vec, &z0);
    let mut kept: Vec<Work<T>> = Vec::new();
    for (idx, r) in rows.into_iter().enumerate() {
        if !keep[idx] {
            continue;
        }
        let shift = dot(&r.b, &z0);
        let b1 = t1.tmatvec(&r.b);
        kept.push(Work { rhs: r.rhs - shift, b: b1, ..r });
    }
    let c1 = t1.tmatvec(&c_vec);

    // Restrict ζ to the row space of the remaining free-vector coefficients.
    let p1 = t1.cols();
    let (range, c2) = {
        let b1 = Mat::from_fn(kept.len(), p1, |r, k| kept[r].b[k]);
        let normal = b1.transpose().matmul(&b1);
        let eig = normal.sym_eigen();
        let cut = T::c(1e-12) * eig.max().max(T::min_positive_value());
        let cols: Vec<usize> = (0..p1).filter(|&t| eig.values[t] > cut).collect();
        let r2 = Mat::from_fn(p1, cols.len(), |k, c| eig.vectors[(k, cols[c])]);
        let c2 = r2.tmatvec(&c1);
        let back = r2.matvec(&c2);
        let miss = c1.iter().zip(&back).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max);
        if miss > T::c(1e-9) * (T::one() + c1.iter().fold(T::zero(), |m, v| m.max(v.abs()))) && verdict == Verdict::Proceed {
            verdict = Verdict::Unbounded;
        }
        (r2, c2)
    };
    let t = t1.matmul(&range);

    let mut final_rows = Vec::with_capacity(kept.len());
    let mut seen: std::collections::HashSet<Vec<i64>> = std::collections::HashSet::new();
    for r in kept {
        let b = range.tmatvec(&r.b);
        let norm = (r.fac.frob_norm().powi(2) + dot(&b, &b)).sqrt();
        if norm == T::zero() {
            continue;
        }
        let inv = T::one() / norm;
        // Identical rows make the Schur complement singular; keep the first.
        let q = |x: T| ((x * inv).to_f64_lossy() * 1e8).round() as i64;
        let dense = r.fac.to_dense();
        let nr = dense.rows();
        let mut key: Vec<i64> = vec![i64::from(r.ineq)];
        for i in 0..nr {
            key.extend(dense.row(i)[i..].iter().map(|&x| q(x)));
        }
        key.extend(b.iter().map(|&x| q(x)));
        key.push(q(r.rhs));
        if !seen.insert(key) {
            continue;
        }
        final_rows.push(Row {
            orig: r.orig,
            fac: Factor { u: r.fac.u, s: r.fac.s.iter().map(|&x| x * inv).collect() },
            b: b.iter().map(|&x| x * inv).collect(),
            rhs: r.rhs * inv,
            ineq: r.ineq,
            scale: norm,
        });
    }

    Ok(Reduced {
        verdict,
        n_orig: n,
        p_orig: p,
        m_orig: m,
        v,
        z0,
        t,
        c_mat,
        c_vec: c2,
        obj_const,
        rows: final_rows,
        facial_rounds: rounds,
    })
}
