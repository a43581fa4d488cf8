//! Infeasible-start primal-dual interior-point method (HKM direction with a
//! Mehrotra predictor-corrector) on the presolved problem
//!
//! ```text
//! max ⟨C, X⟩ + cᵀξ   s.t.  𝒜(X) + Bξ + s_I = d,  X ⪰ 0, s ≥ 0
//! min dᵀy            s.t.  𝒜*(y) − C = Z ⪰ 0,  Bᵀy = c,  y_I ≥ 0
//! ```
//!
//! Each `A_j` is held as a spectral factor, so the Schur complement
//! `M_ij = tr(A_i X A_j Z⁻¹)` reduces to Hadamard products of `UᵀXU` and
//! `UᵀZ⁻¹U`.

use super::presolve::Reduced;
use super::{relative_gap, IterationRecord, SolveOptions, SolveStatus};
use crate::linalg::{dot, norm2, Cholesky, Mat};
use crate::scalar::Scalar;

pub(crate) struct Outcome<T> {
    pub status: SolveStatus,
    pub x: Mat<T>,
    pub xi: Vec<T>,
    pub y: Vec<T>,
    pub dual_obj: T,
    pub history: Vec<IterationRecord>,
}

impl<T: Scalar> Outcome<T> {
    pub fn trivial(red: &Reduced<T>, status: SolveStatus) -> Self {
        Self {
            status,
            x: Mat::zeros(red.n(), red.n()),
            xi: vec![T::zero(); red.p()],
            y: vec![T::zero(); red.rows.len()],
            dual_obj: T::zero(),
            history: Vec::new(),
        }
    }
}

struct Ops<T> {
    n: usize,
    m: usize,
    p: usize,
    /// All factor vectors as rows (R × n) and as columns (n × R).
    ut: Mat<T>,
    u: Mat<T>,
    sv: Vec<T>,
    row_of: Vec<usize>,
    /// Factor-row ranges of each constraint.
    offsets: Vec<usize>,
    b: Mat<T>,
    d: Vec<T>,
    is_ineq: Vec<bool>,
    c: Mat<T>,
    cv: Vec<T>,
}

impl<T: Scalar> Ops<T> {
    fn new(red: &Reduced<T>) -> Self {
        let n = red.n();
        let m = red.rows.len();
        let p = red.p();
        let total: usize = red.rows.iter().map(|r| r.fac.s.len()).sum();
        let mut ut = Mat::zeros(total, n);
        let mut sv = Vec::with_capacity(total);
        let mut row_of = Vec::with_capacity(total);
        let mut offsets = vec![0];
        let mut a = 0;
        for (j, r) in red.rows.iter().enumerate() {
            for k in 0..r.fac.s.len() {
                ut.row_mut(a).copy_from_slice(r.fac.u.row(k));
                sv.push(r.fac.s[k]);
                row_of.push(j);
                a += 1;
            }
            offsets.push(a);
        }
        let u = ut.transpose();
        Self {
            n,
            m,
            p,
            ut,
            u,
            sv,
            row_of,
            offsets,
            b: Mat::from_fn(m, p, |j, k| red.rows[j].b[k]),
            d: red.rows.iter().map(|r| r.rhs).collect(),
            is_ineq: red.rows.iter().map(|r| r.ineq).collect(),
            c: red.c_mat.clone(),
            cv: red.c_vec.clone(),
        }
    }

    fn a_op(&self, y: &Mat<T>) -> Vec<T> {
        let mut out = vec![T::zero(); self.m];
        if self.sv.is_empty() {
            return out;
        }
        let yu = self.ut.matmul(y);
        for (a, &j) in self.row_of.iter().enumerate() {
            out[j] += self.sv[a] * dot(self.ut.row(a), yu.row(a));
        }
        out
    }

    fn a_adj(&self, y: &[T]) -> Mat<T> {
        if self.sv.is_empty() {
            return Mat::zeros(self.n, self.n);
        }
        let mut du = self.ut.clone();
        for (a, &j) in self.row_of.iter().enumerate() {
            let f = self.sv[a] * y[j];
            du.row_mut(a).iter_mut().for_each(|v| *v *= f);
        }
        self.u.matmul(&du).symmetrized()
    }

    fn schur(&self, x: &Mat<T>, zinv: &Mat<T>) -> Mat<T> {
        let mut out = Mat::zeros(self.m, self.m);
        let total = self.sv.len();
        if total == 0 {
            return out;
        }
        let xu = x.matmul(&self.u);
        let zu = zinv.matmul(&self.u);
        let n = self.n;
        let mut j0 = 0;
        while j0 < self.m {
            let mut j1 = j0 + 1;
            while j1 < self.m && self.offsets[j1 + 1] - self.offsets[j0] <= 256 {
                j1 += 1;
            }
            let a0 = self.offsets[j0];
            let a1 = self.offsets[j1];
            if a1 > a0 {
                let blk = Mat::from_vec(a1 - a0, n, self.ut.as_slice()[a0 * n..a1 * n].to_vec());
                let pm = blk.matmul(&xu);
                let qm = blk.matmul(&zu);
                for i in 0..(a1 - a0) {
                    let a = a0 + i;
                    let sa = self.sv[a];
                    let prow = pm.row(i);
                    let qrow = qm.row(i);
                    let orow = out.row_mut(self.row_of[a]);
                    for bcol in 0..total {
                        orow[self.row_of[bcol]] += sa * self.sv[bcol] * prow[bcol] * qrow[bcol];
                    }
                }
            }
            j0 = j1;
        }
        out.symmetrized()
    }
}

/// Cholesky with a growing diagonal shift when the matrix is numerically
/// singular.
fn robust_cholesky<T: Scalar>(m: &Mat<T>) -> Option<Cholesky<T>> {
    if let Some(ch) = m.cholesky() {
        return Some(ch);
    }
    let n = m.rows();
    let dmax = (0..n).map(|i| m[(i, i)].abs()).fold(T::zero(), T::max);
    let mut delta = T::c(1e-14) * (T::one() + dmax);
    for _ in 0..10 {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] += delta;
        }
        if let Some(ch) = shifted.cholesky() {
            return Some(ch);
        }
        delta *= T::c(100.0);
    }
    None
}

/// Largest `α` with `V + αΔ ⪰ 0` given the Cholesky factor of `V`.
fn max_step_psd<T: Scalar>(ch: &Cholesky<T>, delta: &Mat<T>) -> T {
    if delta.rows() == 0 {
        return T::infinity();
    }
    let w = ch.whiten(delta);
    let lmin = w.sym_eigen().min();
    if lmin >= T::zero() {
        T::infinity()
    } else {
        -T::one() / lmin
    }
}

fn max_step_lp<T: Scalar>(v: &[T], dv: &[T], mask: &[bool]) -> T {
    let mut a = T::infinity();
    for j in 0..v.len() {
        if mask[j] && dv[j] < T::zero() {
            a = a.min(-v[j] / dv[j]);
        }
    }
    a
}

/// `½(X W Z⁻¹ + Z⁻¹ W X)`
fn sym_prod<T: Scalar>(x: &Mat<T>, w: &Mat<T>, zinv: &Mat<T>) -> Mat<T> {
    x.matmul(w).matmul(zinv).symmetrized()
}

struct Kkt<'a, T> {
    ops: &'a Ops<T>,
    mtot: Mat<T>,
    chol: Cholesky<T>,
    minv_b: Mat<T>,
    schur_free: Option<Cholesky<T>>,
}

impl<'a, T: Scalar> Kkt<'a, T> {
    fn new(ops: &'a Ops<T>, mtot: Mat<T>) -> Option<Self> {
        let chol = robust_cholesky(&mtot)?;
        let (minv_b, schur_free) = if ops.p > 0 {
            let minv_b = chol.solve_mat(&ops.b);
            let k = ops.b.transpose().matmul(&minv_b).symmetrized();
            (minv_b, Some(robust_cholesky(&k)?))
        } else {
            (Mat::zeros(ops.m, 0), None)
        };
        Some(Self { ops, mtot, chol, minv_b, schur_free })
    }

    /// Solves `Mtot Δy − BΔξ = h`, `BᵀΔy = g`.
    fn solve_once(&self, h: &[T], g: &[T]) -> (Vec<T>, Vec<T>) {
        let minv_h = self.chol.solve(h);
        match &self.schur_free {
            None => (minv_h, Vec::new()),
            Some(k) => {
                let bt_mh = self.ops.b.tmatvec(&minv_h);
                let rhs: Vec<T> = g.iter().zip(&bt_mh).map(|(&gi, &bi)| gi - bi).collect();
                let dxi = k.solve(&rhs);
                let corr = self.minv_b.matvec(&dxi);
                let dy = minv_h.iter().zip(&corr).map(|(&a, &b)| a + b).collect();
                (dy, dxi)
            }
        }
    }

    fn residual(&self, h: &[T], g: &[T], dy: &[T], dxi: &[T]) -> (Vec<T>, Vec<T>) {
        let mdy = self.mtot.matvec(dy);
        let bdxi = if self.ops.p > 0 { self.ops.b.matvec(dxi) } else { vec![T::zero(); self.ops.m] };
        let r1: Vec<T> = (0..self.ops.m).map(|j| h[j] - mdy[j] + bdxi[j]).collect();
        let btdy = self.ops.b.tmatvec(dy);
        let r2: Vec<T> = (0..self.ops.p).map(|k| g[k] - btdy[k]).collect();
        (r1, r2)
    }

    /// Solve with iterative refinement against the unshifted system, stopping
    /// once the residual no longer shrinks.
    fn solve(&self, h: &[T], g: &[T]) -> (Vec<T>, Vec<T>) {
        let (mut dy, mut dxi) = self.solve_once(h, g);
        let size = |a: &[T], b: &[T]| (dot(a, a) + dot(b, b)).sqrt();
        let target = T::epsilon() * size(h, g);
        let (mut r1, mut r2) = self.residual(h, g, &dy, &dxi);
        let mut rn = size(&r1, &r2);
        for _ in 0..10 {
            if rn <= target {
                break;
            }
            let (ey, exi) = self.solve_once(&r1, &r2);
            let ny: Vec<T> = dy.iter().zip(&ey).map(|(a, b)| *a + *b).collect();
            let nxi: Vec<T> = dxi.iter().zip(&exi).map(|(a, b)| *a + *b).collect();
            let (n1, n2) = self.residual(h, g, &ny, &nxi);
            let nn = size(&n1, &n2);
            if !(nn < rn) {
                break;
            }
            let gain = nn / rn;
            dy = ny;
            dxi = nxi;
            r1 = n1;
            r2 = n2;
            rn = nn;
            if gain > T::c(0.5) {
                break;
            }
        }
        (dy, dxi)
    }
}

struct Dir<T> {
    dx: Mat<T>,
    dz: Mat<T>,
    dy: Vec<T>,
    dxi: Vec<T>,
    ds: Vec<T>,
}

struct State<T> {
    x: Mat<T>,
    z: Mat<T>,
    y: Vec<T>,
    xi: Vec<T>,
    s: Vec<T>,
}

pub(crate) fn run<T: Scalar>(red: &Reduced<T>, opts: &SolveOptions<T>) -> Outcome<T> {
    let ops = Ops::new(red);
    let n = ops.n;
    let m = ops.m;
    let m_ineq = ops.is_ineq.iter().filter(|&&b| b).count();
    if n + m_ineq == 0 {
        return Outcome::trivial(red, SolveStatus::Optimal);
    }
    let nu = T::from_count(n + m_ineq);
    let tol_feas = opts.tol_feas * T::c(0.1);
    let tol_gap = opts.tol_gap * T::c(0.1);
    let shift = red.obj_const;

    let norm_d = norm2(&ops.d);
    let norm_c = (ops.c.frob_norm().powi(2) + dot(&ops.cv, &ops.cv)).sqrt();
    let sqrt_n = T::from_count(n.max(1)).sqrt();
    let dmax = ops.d.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let zeta = T::c(10.0).max(sqrt_n).max(T::from_count(n.max(1)) * (T::one() + dmax) / T::c(2.0));
    let eta = T::c(10.0).max(sqrt_n).max(norm_c);

    let mut st = State {
        x: Mat::identity(n).scaled(zeta),
        z: Mat::identity(n).scaled(eta),
        y: (0..m).map(|j| if ops.is_ineq[j] { eta } else { T::zero() }).collect(),
        xi: vec![T::zero(); ops.p],
        s: (0..m).map(|j| if ops.is_ineq[j] { zeta } else { T::zero() }).collect(),
    };

    let mut history = Vec::new();
    let mut status = SolveStatus::NumericalLimit;
    let mut last_steps = (0.0, 0.0);
    let mut stalls = 0;
    let mut best: Option<(T, State<T>)> = None;

    for it in 0..opts.max_iters.max(1) {
        let (Some(lx), Some(lz)) = (st.x.cholesky(), st.z.cholesky()) else {
            break;
        };
        let zinv = lz.inverse();
        let ax = ops.a_op(&st.x);
        let bxi = if ops.p > 0 { ops.b.matvec(&st.xi) } else { vec![T::zero(); m] };
        let rp: Vec<T> = (0..m).map(|j| ops.d[j] - ax[j] - bxi[j] - st.s[j]).collect();
        let rd = ops.a_adj(&st.y).sub(&st.z).sub(&ops.c);
        let btyv = ops.b.tmatvec(&st.y);
        let rz: Vec<T> = (0..ops.p).map(|k| btyv[k] - ops.cv[k]).collect();

        let pobj = ops.c.frob_dot(&st.x) + dot(&ops.cv, &st.xi);
        let dobj = dot(&ops.d, &st.y);
        let comp_lp: T = (0..m).filter(|&j| ops.is_ineq[j]).map(|j| st.s[j] * st.y[j]).sum();
        let comp = st.x.frob_dot(&st.z) + comp_lp;
        let mu = comp / nu;
        let pinf = norm2(&rp) / (T::one() + norm_d);
        let dinf = (rd.frob_norm() + norm2(&rz)) / (T::one() + norm_c);
        let gap = relative_gap(pobj + shift, dobj + shift);

        history.push(IterationRecord {
            iteration: it,
            primal_obj: (pobj + shift).to_f64_lossy(),
            dual_obj: (dobj + shift).to_f64_lossy(),
            complementarity: comp.to_f64_lossy(),
            residual_gap: (dobj - pobj - comp).to_f64_lossy(),
            primal_infeas: pinf.to_f64_lossy(),
            dual_infeas: dinf.to_f64_lossy(),
            step_primal: last_steps.0,
            step_dual: last_steps.1,
        });

        if !(pobj.is_finite() && dobj.is_finite() && mu.is_finite()) {
            break;
        }
        if pinf <= tol_feas && dinf <= tol_feas && gap <= tol_gap {
            status = SolveStatus::Optimal;
            break;
        }
        let merit = pinf.max(dinf).max(gap);
        if best.as_ref().is_none_or(|(b, _)| merit < *b) {
            best = Some((
                merit,
                State { x: st.x.clone(), z: st.z.clone(), y: st.y.clone(), xi: st.xi.clone(), s: st.s.clone() },
            ));
        }

        // Certificates of infeasibility: a dual ray (primal infeasible) or a
        // primal ray (unbounded).
        let big = T::c(1e8) * (T::one() + norm_c + norm_d);
        if -dobj > big {
            let scale = -T::one() / dobj;
            let ray: Vec<T> = st.y.iter().map(|&v| v * scale).collect();
            let zr = ops.a_adj(&ray);
            let bt = ops.b.tmatvec(&ray);
            if zr.sym_eigen().min() >= -T::c(1e-7) && norm2(&bt) <= T::c(1e-7) {
                status = SolveStatus::Infeasible;
                break;
            }
        }
        if pobj > big {
            let scale = T::one() / pobj;
            let axr = ops.a_op(&st.x);
            let res: Vec<T> = (0..m).map(|j| (axr[j] + bxi[j] + st.s[j]) * scale).collect();
            if norm2(&res) <= T::c(1e-7) {
                status = SolveStatus::Unbounded;
                break;
            }
        }

        let mut mtot = ops.schur(&st.x, &zinv);
        for j in 0..m {
            if ops.is_ineq[j] {
                mtot[(j, j)] += st.s[j] / st.y[j];
            }
        }
        let Some(kkt) = Kkt::new(&ops, mtot) else {
            break;
        };
        let xrdz = sym_prod(&st.x, &rd, &zinv);
        let neg_rz: Vec<T> = rz.iter().map(|&v| -v).collect();

        let direction = |rc: &Mat<T>, t: &[T]| -> Dir<T> {
            let base = rc.sub(&xrdz);
            let ab = ops.a_op(&base);
            let h: Vec<T> = (0..m)
                .map(|j| {
                    let lp = if ops.is_ineq[j] { t[j] / st.y[j] } else { T::zero() };
                    ab[j] + lp - rp[j]
                })
                .collect();
            let (dy, dxi) = kkt.solve(&h, &neg_rz);
            let dz = ops.a_adj(&dy).add(&rd);
            let mut dx = rc.sub(&sym_prod(&st.x, &dz, &zinv)).symmetrized();
            let mut dxi = dxi;
            let mut ds: Vec<T> = (0..m)
                .map(|j| if ops.is_ineq[j] { (t[j] - st.s[j] * dy[j]) / st.y[j] } else { T::zero() })
                .collect();
            // Forming X ΔZ Z⁻¹ loses accuracy once Z is nearly singular; push
            // the primal residual back down with corrections that leave ΔZ alone.
            let primal_err = |dx: &Mat<T>, dxi: &[T], ds: &[T]| -> Vec<T> {
                let adx = ops.a_op(dx);
                let bd = if ops.p > 0 { ops.b.matvec(dxi) } else { vec![T::zero(); m] };
                (0..m).map(|j| rp[j] - adx[j] - bd[j] - ds[j]).collect()
            };
            let zero_p = vec![T::zero(); ops.p];
            let mut e = primal_err(&dx, &dxi, &ds);
            for _ in 0..3 {
                let en = norm2(&e);
                if en <= T::c(0.1) * tol_feas * (T::one() + norm_d) {
                    break;
                }
                let (w, v) = kkt.solve(&e, &zero_p);
                let mut cx = dx.clone();
                cx.add_scaled(T::one(), &sym_prod(&st.x, &ops.a_adj(&w), &zinv).symmetrized());
                let cxi: Vec<T> = dxi.iter().zip(&v).map(|(a, b)| *a - *b).collect();
                let cs: Vec<T> = (0..m).map(|j| if ops.is_ineq[j] { ds[j] + st.s[j] / st.y[j] * w[j] } else { T::zero() }).collect();
                let ce = primal_err(&cx, &cxi, &cs);
                if !(norm2(&ce) < en) {
                    break;
                }
                dx = cx;
                dxi = cxi;
                ds = cs;
                e = ce;
            }
            Dir { dx, dz, dy, dxi, ds }
        };
        let steps = |dir: &Dir<T>| -> (T, T) {
            let ap = max_step_psd(&lx, &dir.dx).min(max_step_lp(&st.s, &dir.ds, &ops.is_ineq));
            let ad = max_step_psd(&lz, &dir.dz).min(max_step_lp(&st.y, &dir.dy, &ops.is_ineq));
            (ap, ad)
        };

        // Predictor.
        let t_aff: Vec<T> = (0..m).map(|j| if ops.is_ineq[j] { -st.s[j] * st.y[j] } else { T::zero() }).collect();
        let aff = direction(&st.x.scaled(-T::one()), &t_aff);
        let (ap_a, ad_a) = steps(&aff);
        let ap_a = ap_a.min(T::one());
        let ad_a = ad_a.min(T::one());
        let mut xa = st.x.clone();
        xa.add_scaled(ap_a, &aff.dx);
        let mut za = st.z.clone();
        za.add_scaled(ad_a, &aff.dz);
        let comp_aff: T = xa.frob_dot(&za)
            + (0..m)
                .filter(|&j| ops.is_ineq[j])
                .map(|j| (st.s[j] + ap_a * aff.ds[j]) * (st.y[j] + ad_a * aff.dy[j]))
                .sum::<T>();
        let ratio = (comp_aff / comp).max(T::zero()).min(T::one());
        let expo = T::one().max(T::c(3.0) * ap_a.min(ad_a).powi(2));
        let sigma = ratio.powf(expo);

        // Corrector.
        let smu = sigma * mu;
        let second = sym_prod(&aff.dx, &aff.dz, &zinv);
        let rc = zinv.scaled(smu).sub(&st.x).sub(&second);
        let t_cor: Vec<T> = (0..m)
            .map(|j| if ops.is_ineq[j] { smu - st.s[j] * st.y[j] - aff.ds[j] * aff.dy[j] } else { T::zero() })
            .collect();
        let dir = direction(&rc, &t_cor);
        let (ap, ad) = steps(&dir);
        let gamma = T::c(0.9) + T::c(0.09) * ap_a.min(ad_a);
        let ap = (gamma * ap).min(T::one());
        let ad = (gamma * ad).min(T::one());
        if !(ap.is_finite() && ad.is_finite()) {
            break;
        }

        st.x.add_scaled(ap, &dir.dx);
        st.x = st.x.symmetrized();
        st.xi.iter_mut().zip(&dir.dxi).for_each(|(v, d)| *v += ap * *d);
        st.s.iter_mut().zip(&dir.ds).for_each(|(v, d)| *v += ap * *d);
        st.z.add_scaled(ad, &dir.dz);
        st.z = st.z.symmetrized();
        st.y.iter_mut().zip(&dir.dy).for_each(|(v, d)| *v += ad * *d);
        last_steps = (ap.to_f64_lossy(), ad.to_f64_lossy());

        if ap.max(ad) < T::c(1e-7) {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
    }

    if status == SolveStatus::NumericalLimit {
        if let Some((_, b)) = best {
            st = b;
        }
    }
    let dual_obj = dot(&ops.d, &st.y);
    Outcome { status, x: st.x, xi: st.xi, y: st.y, dual_obj, history }
}
