//! Small dense linear algebra kernels, generic over [`Scalar`].
//!
//! Only what the solvers in this crate need: row-major matrices, Cholesky,
//! partially pivoted LU, and a cyclic Jacobi symmetric eigensolver. Sizes are
//! in the low hundreds, so nothing here is blocked beyond the `gemm` hook.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    // four partial sums so the loop vectorizes
    let mut acc = [T::zero(); 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = T::zero();
    for (&x, &y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yv, &xv) in y.iter_mut().zip(x) {
        *yv += alpha * xv;
    }
}

pub fn max_abs<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape/data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        T::gemm(
            self.rows,
            self.cols,
            other.cols,
            &self.data,
            &other.data,
            &mut out.data,
        );
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `self^T x`
    pub fn tmatvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.rows, x.len(), "tmatvec shape mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            axpy(xi, self.row(i), &mut out);
        }
        out
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: T, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        axpy(alpha, &other.data, &mut self.data);
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `(A + A^T) / 2`
    pub fn symmetrized(&self) -> Self {
        assert!(self.is_square());
        let half = T::c(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| half * (self[(i, j)] + self[(j, i)]))
    }

    /// Frobenius inner product `trace(A B^T)`.
    pub fn frob_dot(&self, other: &Self) -> T {
        dot(&self.data, &other.data)
    }

    pub fn frob_norm(&self) -> T {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.data)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `max |A - A^T|`
    pub fn asymmetry(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.rows {
            for j in 0..i {
                m = m.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        m
    }

    /// Lower Cholesky factor, or `None` if the matrix is not numerically
    /// positive definite.
    pub fn cholesky(&self) -> Option<Cholesky<T>> {
        Cholesky::new(self)
    }

    pub fn sym_eigen(&self) -> SymEigen<T> {
        SymEigen::new(self)
    }

    pub fn lu(&self) -> Option<Lu<T>> {
        Lu::new(self)
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// `A = L L^T` with `L` lower triangular.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: Mat<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn new(a: &Mat<T>) -> Option<Self> {
        assert!(a.is_square(), "cholesky of non-square matrix");
        const NB: usize = 64;
        let n = a.rows();
        let mut w = a.clone();
        let mut j0 = 0;
        while j0 < n {
            let j1 = (j0 + NB).min(n);
            for j in j0..j1 {
                let d = {
                    let r = &w.row(j)[j0..j];
                    w[(j, j)] - dot(r, r)
                };
                if !(d > T::zero()) || !d.is_finite() {
                    return None;
                }
                let djj = d.sqrt();
                w[(j, j)] = djj;
                let lj: Vec<T> = w.row(j)[j0..j].to_vec();
                for i in (j + 1)..n {
                    let ri = w.row_mut(i);
                    ri[j] = (ri[j] - dot(&ri[j0..j], &lj)) / djj;
                }
            }
            if j1 < n {
                // trailing update with the finished panel
                let rest = n - j1;
                let nb = j1 - j0;
                let panel = Mat::from_fn(rest, nb, |i, k| w[(j1 + i, j0 + k)]);
                let upd = panel.matmul(&panel.transpose());
                for i in 0..rest {
                    let src = upd.row(i);
                    let dst = &mut w.row_mut(j1 + i)[j1..=j1 + i];
                    for (dv, &sv) in dst.iter_mut().zip(src) {
                        *dv -= sv;
                    }
                }
            }
            j0 = j1;
        }
        for i in 0..n {
            w.row_mut(i)[i + 1..].iter_mut().for_each(|v| *v = T::zero());
        }
        Some(Self { l: w })
    }

    pub fn factor(&self) -> &Mat<T> {
        &self.l
    }

    /// Solve `L y = b` in place.
    pub fn forward(&self, b: &mut [T]) {
        let n = self.l.rows();
        for i in 0..n {
            let row = self.l.row(i);
            let s = b[i] - dot(&row[..i], &b[..i]);
            b[i] = s / row[i];
        }
    }

    /// Solve `L^T x = y` in place.
    pub fn backward(&self, b: &mut [T]) {
        let n = self.l.rows();
        for i in (0..n).rev() {
            let row = self.l.row(i);
            b[i] /= row[i];
            let bi = b[i];
            axpy(-bi, &row[..i], &mut b[..i]);
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.forward(&mut x);
        self.backward(&mut x);
        x
    }

    /// Solve for every column of `b`.
    pub fn solve_mat(&self, b: &Mat<T>) -> Mat<T> {
        let mut out = Mat::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve(&b.column(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn inverse(&self) -> Mat<T> {
        let n = self.l.rows();
        let mut linv = Mat::identity(n);
        // columns of L^{-1}
        for j in 0..n {
            let mut col = linv.column(j);
            self.forward(&mut col);
            for (i, v) in col.into_iter().enumerate() {
                linv[(i, j)] = v;
            }
        }
        // A^{-1} = L^{-T} L^{-1}
        linv.transpose().matmul(&linv).symmetrized()
    }

    /// `L^{-1} M L^{-T}` for symmetric `M`.
    pub fn whiten(&self, m: &Mat<T>) -> Mat<T> {
        let n = self.l.rows();
        let mut tmp = Mat::zeros(n, n);
        for j in 0..n {
            let mut col = m.column(j);
            self.forward(&mut col);
            for (i, v) in col.into_iter().enumerate() {
                tmp[(i, j)] = v;
            }
        }
        let tmp_t = tmp.transpose();
        let mut out = Mat::zeros(n, n);
        for j in 0..n {
            let mut col = tmp_t.column(j);
            self.forward(&mut col);
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out.symmetrized()
    }
}

/// `P A = L U` with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn new(a: &Mat<T>) -> Option<Self> {
        assert!(a.is_square(), "lu of non-square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(T::min_positive_value());
        for k in 0..n {
            let (mut p, mut best) = (k, lu[(k, k)].abs());
            for i in (k + 1)..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= T::epsilon() * scale * T::c(1e-4) {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != T::zero() {
                    for j in (k + 1)..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= f * u;
                    }
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s = dot(&row[..i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = x[i] - dot(&row[i + 1..], &x[i + 1..]);
            x[i] = s / row[i];
        }
        x
    }
}

/// Eigen-decomposition of a symmetric matrix; eigenvalues ascending,
/// eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Mat<T>,
}

impl<T: Scalar> SymEigen<T> {
    pub fn new(a: &Mat<T>) -> Self {
        assert!(a.is_square(), "eigen of non-square matrix");
        let n = a.rows();
        let mut m = a.symmetrized();
        let mut v = Mat::identity(n);
        let eps = T::epsilon();
        for _sweep in 0..64 {
            let mut off = T::zero();
            let mut diag = T::zero();
            for i in 0..n {
                diag += m[(i, i)] * m[(i, i)];
                for j in (i + 1)..n {
                    off += m[(i, j)] * m[(i, j)];
                }
            }
            if off <= eps * eps * diag.max(T::min_positive_value()) || off == T::zero() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let app = m[(p, p)];
                    let aqq = m[(q, q)];
                    if apq.abs() <= eps * T::c(0.01) * (app.abs() * aqq.abs()).sqrt() {
                        m[(p, q)] = T::zero();
                        m[(q, p)] = T::zero();
                        continue;
                    }
                    let theta = (aqq - app) / (T::c(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let t = if theta == T::zero() { T::one() } else { t };
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[(k, p)];
                        let mkq = m[(k, q)];
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(p, k)];
                        let mqk = m[(q, k)];
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| m[(a, a)].partial_cmp(&m[(b, b)]).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&i| m[(i, i)]).collect();
        let vectors = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
        Self { values, vectors }
    }

    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or(T::zero())
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or(T::zero())
    }
}

/// Orthonormal basis (as columns) of the orthogonal complement of the span of
/// `vectors` in `R^n`, together with a basis of the span itself.
pub fn complement_basis<T: Scalar>(n: usize, vectors: &[Vec<T>], rel_tol: T) -> (Mat<T>, Mat<T>) {
    let mut gram: Mat<T> = Mat::zeros(n, n);
    for v in vectors {
        assert_eq!(v.len(), n);
        for i in 0..n {
            if v[i] == T::zero() {
                continue;
            }
            for j in 0..n {
                gram[(i, j)] += v[i] * v[j];
            }
        }
    }
    let eig = gram.sym_eigen();
    let scale = eig.max().max(T::zero());
    let cut = rel_tol * scale.max(T::min_positive_value());
    let keep: Vec<usize> = (0..n).filter(|&j| eig.values[j] <= cut).collect();
    let span: Vec<usize> = (0..n).filter(|&j| eig.values[j] > cut).collect();
    let comp = Mat::from_fn(n, keep.len(), |i, j| eig.vectors[(i, keep[j])]);
    let range = Mat::from_fn(n, span.len(), |i, j| eig.vectors[(i, span[j])]);
    (comp, range)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> Mat<f64> {
        let b = Mat::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 1.0 } else { 0.0 });
        b.transpose().matmul(&b).add(&Mat::identity(n))
    }

    #[test]
    fn cholesky_solves() {
        let a = spd(6);
        let ch = a.cholesky().unwrap();
        let b: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
        let x = ch.solve(&b);
        let r = a.matvec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-10);
        }
        let inv = ch.inverse();
        let id = a.matmul(&inv);
        assert!(id.sub(&Mat::identity(6)).max_abs() < 1e-10);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(a.cholesky().is_none());
    }

    #[test]
    fn eigen_reconstructs() {
        let a = spd(7).sub(&Mat::identity(7).scaled(5.0));
        let e = a.sym_eigen();
        let back = e.vectors.matmul(&Mat::diag(&e.values)).matmul(&e.vectors.transpose());
        assert!(back.sub(&a).max_abs() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn lu_solves_indefinite() {
        let a = Mat::from_rows(&[vec![0.0, 2.0, 1.0], vec![2.0, 0.0, -1.0], vec![1.0, -1.0, 3.0]]);
        let lu = a.lu().unwrap();
        let x = lu.solve(&[1.0, 2.0, 3.0]);
        let r: Vec<f64> = a.matvec(&x);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12 && (r[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn complement_is_orthogonal() {
        let (comp, range) = complement_basis(4, &[vec![1.0, 1.0, 0.0, 0.0], vec![2.0, 2.0, 0.0, 0.0]], 1e-10);
        assert_eq!(comp.cols(), 3);
        assert_eq!(range.cols(), 1);
        for j in 0..3 {
            let c: Vec<f64> = comp.column(j);
            assert!((c[0] + c[1]).abs() < 1e-12);
        }
    }
}
