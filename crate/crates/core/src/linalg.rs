//! Dense linear algebra kernels.
//!
//! Everything here works on row-major [`DenseMatrix`] storage over either `f64`
//! or [`Complex64`]. Real symmetric problems go straight to the real kernels;
//! complex Hermitian problems are embedded into a real symmetric matrix of twice
//! the dimension,
//!
//! ```text
//!     A = X + iY   ->   [ X  -Y ]
//!                       [ Y   X ]
//! ```
//!
//! whose spectrum is that of `A` with every eigenvalue doubled.
//!
//! Two real symmetric kernels are provided: cyclic Jacobi (used whenever
//! eigenvectors are requested) and Householder tridiagonalization followed by
//! implicit QL (values only, several times faster on large inputs).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tolerance used when validating Hermitian inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Jacobi stops once the off-diagonal Frobenius norm falls below this fraction
/// of the matrix norm.
const JACOBI_REL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;
const QL_MAX_ITERATIONS: usize = 60;

/// Field element stored in a [`DenseMatrix`].
pub trait Scalar:
    Copy
    + Default
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_re(re: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn abs(self) -> f64;
    fn abs_sqr(self) -> f64;
    fn is_finite(self) -> bool;

    /// Eigen-decomposition of a matrix already validated as Hermitian.
    #[doc(hidden)]
    fn hermitian_eigen(m: &DenseMatrix<Self>, want_vectors: bool) -> Result<EigenResult<Self>>;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_re(re: f64) -> Self {
        re
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn abs_sqr(self) -> f64 {
        self * self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    fn hermitian_eigen(m: &DenseMatrix<f64>, want_vectors: bool) -> Result<EigenResult<f64>> {
        let n = m.rows;
        if want_vectors {
            let (values, vectors) = jacobi_eigen(m.data.clone(), n, true)?;
            Ok(EigenResult { values, vectors: vectors.map(|v| DenseMatrix { rows: n, cols: n, data: v }) })
        } else {
            Ok(EigenResult { values: tridiagonal_ql_eigenvalues(m.data.clone(), n)?, vectors: None })
        }
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_re(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn abs_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn hermitian_eigen(m: &DenseMatrix<Complex64>, want_vectors: bool) -> Result<EigenResult<Complex64>> {
        let n = m.rows;
        if m.data.iter().all(|z| z.im == 0.0) {
            let real = m.map(|z| z.re);
            let res = f64::hermitian_eigen(&real, want_vectors)?;
            return Ok(EigenResult { values: res.values, vectors: res.vectors.map(|v| v.map(Complex64::from_re)) });
        }

        let embedded = embed_hermitian(m);
        let big = 2 * n;
        if !want_vectors {
            let doubled = tridiagonal_ql_eigenvalues(embedded.data, big)?;
            let values = doubled.iter().step_by(2).copied().collect();
            return Ok(EigenResult { values, vectors: None });
        }

        let (doubled, vecs) = jacobi_eigen(embedded.data, big, true)?;
        let vecs = vecs.expect("vectors requested");
        let values: Vec<f64> = doubled.iter().step_by(2).copied().collect();

        // Each eigenvalue of A appears twice in the embedding, with real
        // eigenvectors (x, y) and (-y, x) that both map to multiples of x + iy.
        // Inside every cluster of equal eigenvalues, pivoted Gram-Schmidt picks
        // an orthonormal complex basis of the right size.
        let scale = doubled.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let cluster_tol = 1e-9 * scale;
        let candidate = |j: usize| -> Vec<Complex64> {
            (0..n).map(|i| Complex64::new(vecs[i * big + j], vecs[(i + n) * big + j])).collect()
        };

        let mut out = DenseMatrix::<Complex64>::zeros(n, n);
        let mut next_col = 0;
        let mut start = 0;
        while start < big {
            let mut end = start + 1;
            while end < big && doubled[end] - doubled[end - 1] <= cluster_tol {
                end += 1;
            }
            // number of values taken from this cluster by the step_by(2) rule
            let wanted = (start..end).filter(|j| j % 2 == 0).count();
            let mut pool: Vec<Vec<Complex64>> = (start..end).map(candidate).collect();
            for _ in 0..wanted {
                let (best, _) = pool.iter().enumerate().map(|(k, v)| (k, norm(v))).fold((0, -1.0), |acc, x| {
                    if x.1 > acc.1 {
                        x
                    } else {
                        acc
                    }
                });
                let mut chosen = pool.swap_remove(best);
                let nrm = norm(&chosen);
                if nrm == 0.0 {
                    return Err(Error::Convergence { iterations: 0, best_residual: f64::NAN });
                }
                chosen.iter_mut().for_each(|z| *z /= nrm);
                for v in pool.iter_mut() {
                    let proj = dot(&chosen, v);
                    v.iter_mut().zip(&chosen).for_each(|(a, b)| *a -= proj * b);
                }
                for (i, z) in chosen.into_iter().enumerate() {
                    out[(i, next_col)] = z;
                }
                next_col += 1;
            }
            start = end;
        }
        debug_assert_eq!(next_col, n);
        Ok(EigenResult { values, vectors: Some(out) })
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ComplexMatrix = DenseMatrix<Complex64>;

impl<T: Scalar> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries supplied for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
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

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> DenseMatrix<U> {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Copy of the `rows x cols` sub-block whose top-left corner is `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "submatrix out of bounds");
        let mut data = Vec::with_capacity(rows * cols);
        for i in r0..r0 + rows {
            data.extend_from_slice(&self.row(i)[c0..c0 + cols]);
        }
        Self { rows, cols, data }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `M M†`, Hermitian with dimension `rows`.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            let ri = self.row(i);
            for j in i..n {
                let rj = self.row(j);
                let mut acc = T::zero();
                for (&a, &b) in ri.iter().zip(rj) {
                    acc += a * b.conj();
                }
                out.data[i * n + j] = acc;
                out.data[j * n + i] = acc.conj();
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn trace(&self) -> T {
        let n = self.rows.min(self.cols);
        let mut acc = T::zero();
        for i in 0..n {
            acc += self[(i, i)];
        }
        acc
    }

    /// Largest `|m_ij - conj(m_ji)|`; `None` for non-square input.
    pub fn hermitian_defect(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).abs());
            }
        }
        Some(worst)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect().is_some_and(|d| d <= tol)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for DenseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols.max(1)) {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues in ascending order, optionally with eigenvectors stored as the
/// columns of `vectors` in the same order.
#[derive(Debug, Clone)]
pub struct EigenResult<T = f64> {
    pub values: Vec<f64>,
    pub vectors: Option<DenseMatrix<T>>,
}

/// Eigen-decomposition of a real symmetric or complex Hermitian matrix.
pub fn symmetric_eigen<T: Scalar>(m: &DenseMatrix<T>, want_vectors: bool) -> Result<EigenResult<T>> {
    let defect = m
        .hermitian_defect()
        .ok_or_else(|| Error::Dimension(format!("eigenproblem needs a square matrix, got {}x{}", m.rows, m.cols)))?;
    let tol = HERMITIAN_TOL * m.max_abs().max(1.0);
    if defect > tol {
        return Err(Error::Symmetry { max_asymmetry: defect, tolerance: tol });
    }
    T::hermitian_eigen(m, want_vectors)
}

/// Singular values in descending order, `min(rows, cols)` of them.
///
/// Computed as square roots of the eigenvalues of the smaller Gram matrix.
pub fn singular_values<T: Scalar>(m: &DenseMatrix<T>) -> Result<Vec<f64>> {
    if m.rows == 0 || m.cols == 0 || m.data.is_empty() {
        return Err(Error::Dimension("singular values of an empty matrix".into()));
    }
    let gram = if m.rows <= m.cols { m.gram() } else { m.adjoint().gram() };
    let eig = T::hermitian_eigen(&gram, false)?;
    let mut sv: Vec<f64> = eig
        .values
        .into_iter()
        .rev()
        .map(|v| {
            debug_assert!(v >= -1e-10 * gram.max_abs().max(1.0), "Gram eigenvalue {v}");
            v.max(0.0).sqrt()
        })
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Solve `A X = B` for square real `A` by LU with partial pivoting.
pub fn solve(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> Result<DenseMatrix<f64>> {
    if !a.is_square() || a.rows != b.rows {
        return Err(Error::Dimension(format!(
            "solve needs square A with matching B, got {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let n = a.rows;
    let nr = b.cols;
    let mut lu = a.data.clone();
    let mut x = b.data.clone();
    let scale = a.max_abs();

    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| lu[i * n + k].abs().total_cmp(&lu[j * n + k].abs())).expect("non-empty range");
        if lu[piv * n + k].abs() <= f64::EPSILON * scale * n as f64 {
            return Err(Error::Singular);
        }
        if piv != k {
            for j in 0..n {
                lu.swap(k * n + j, piv * n + j);
            }
            for j in 0..nr {
                x.swap(k * nr + j, piv * nr + j);
            }
        }
        let pivot = lu[k * n + k];
        let (upper, lower) = lu.split_at_mut((k + 1) * n);
        let row_k = &upper[k * n + k + 1..k * n + n];
        let (xu, xl) = x.split_at_mut((k + 1) * nr);
        let xrow_k = &xu[k * nr..(k + 1) * nr];
        for i in 0..n - k - 1 {
            let row_i = &mut lower[i * n..(i + 1) * n];
            let factor = row_i[k] / pivot;
            if factor == 0.0 {
                continue;
            }
            row_i[k] = factor;
            for (a, &b) in row_i[k + 1..].iter_mut().zip(row_k) {
                *a -= factor * b;
            }
            for (a, &b) in xl[i * nr..(i + 1) * nr].iter_mut().zip(xrow_k) {
                *a -= factor * b;
            }
        }
    }

    // back substitution, row by row
    for i in (0..n).rev() {
        let (head, tail) = x.split_at_mut((i + 1) * nr);
        let xi = &mut head[i * nr..];
        for j in i + 1..n {
            let u = lu[i * n + j];
            if u == 0.0 {
                continue;
            }
            let xj = &tail[(j - i - 1) * nr..(j - i) * nr];
            for (a, &b) in xi.iter_mut().zip(xj) {
                *a -= u * b;
            }
        }
        let d = lu[i * n + i];
        xi.iter_mut().for_each(|a| *a /= d);
    }
    Ok(DenseMatrix { rows: n, cols: nr, data: x })
}

fn embed_hermitian(m: &DenseMatrix<Complex64>) -> DenseMatrix<f64> {
    let n = m.rows;
    DenseMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Cyclic Jacobi on a real symmetric row-major matrix. Returns ascending
/// eigenvalues and, if requested, the row-major matrix whose columns are the
/// matching eigenvectors.
pub(crate) fn jacobi_eigen(mut a: Vec<f64>, n: usize, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let mut v = want_vectors.then(|| {
        let mut id = vec![0.0; n * n];
        (0..n).for_each(|i| id[i * n + i] = 1.0);
        id
    });
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_REL_TOL * norm;

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut off = off_norm(&a);
    while off > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Convergence { iterations: sweeps, best_residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_finite() { theta.signum() / (theta.abs() + theta.hypot(1.0)) } else { 0.0 };
                if t == 0.0 {
                    // |apq| negligible next to the diagonal gap
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    a[k * n + p] = new_p;
                    a[p * n + k] = new_p;
                    a[k * n + q] = new_q;
                    a[q * n + k] = new_q;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        off = off_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = v.map(|v| {
        let mut sorted = vec![0.0; n * n];
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                sorted[k * n + new_col] = v[k * n + old_col];
            }
        }
        sorted
    });
    Ok((values, vectors))
}

/// Ascending eigenvalues of a real symmetric row-major matrix via Householder
/// reduction to tridiagonal form and implicit QL with Wilkinson-style shifts.
pub(crate) fn tridiagonal_ql_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1; // size of the trailing block
        let x = &a[k * n + k + 1..(k + 1) * n];
        let xnorm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        diag[k] = a[k * n + k];
        if xnorm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
        let v = &mut v[..m];
        v.copy_from_slice(x);
        v[0] -= alpha;
        let vtv = v.iter().map(|t| t * t).sum::<f64>();
        off[k] = alpha;
        if vtv == 0.0 {
            continue;
        }
        // p = (2 / vtv) A22 v, w = p - (v.p / vtv) v
        let p = &mut p[..m];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            *pi = 2.0 * row.iter().zip(v.iter()).map(|(r, s)| r * s).sum::<f64>() / vtv;
        }
        let kfac = v.iter().zip(p.iter()).map(|(s, t)| s * t).sum::<f64>() / vtv;
        p.iter_mut().zip(v.iter()).for_each(|(t, s)| *t -= kfac * s);
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            for ((r, &vj), &wj) in row.iter_mut().zip(v.iter()).zip(p.iter()) {
                *r -= vi * wj + wi * vj;
            }
        }
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + n - 2];
        off[n - 2] = a[(n - 1) * n + n - 2];
    }
    diag[n - 1] = a[(n - 1) * n + n - 1];
    off[n - 1] = 0.0;

    tridiagonal_ql(&mut diag, &mut off)?;
    diag.sort_by(|x, y| x.total_cmp(y));
    Ok(diag)
}

/// Implicit QL on a symmetric tridiagonal matrix; `e[i]` couples `i` and
/// `i + 1`. Eigenvalues are left (unsorted) in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    // absolute deflation floor; dropping such a coupling moves eigenvalues by
    // at most one ulp of the matrix norm
    let floor = f64::EPSILON * d.iter().zip(e.iter()).map(|(x, y)| x.abs() + y.abs()).fold(0.0, f64::max);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITERATIONS {
                return Err(Error::Convergence { iterations: iter, best_residual: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Settings for [`iterative_ground_pair_with`].
#[derive(Debug, Clone, Copy)]
pub struct LanczosConfig {
    /// Seed of the random start vector.
    pub seed: u64,
    /// Cap on operator applications across all restarts.
    pub max_iterations: usize,
    /// Krylov subspace size before a restart from the current Ritz vector.
    pub krylov_dim: usize,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self { seed: 0x5eed_1a2c, max_iterations: 2000, krylov_dim: 120 }
    }
}

#[derive(Debug, Clone)]
pub struct GroundPair {
    pub value: f64,
    /// Unit-norm eigenvector.
    pub vector: Vec<Complex64>,
    /// `|A v - value v|` at exit.
    pub residual: f64,
    /// Number of operator applications used.
    pub iterations: usize,
}

/// Lowest eigenpair of a Hermitian operator given only as `apply(x, y)`,
/// which must write `A x` into `y`.
pub fn iterative_ground_pair<F>(apply: F, dim: usize, tol: f64) -> Result<GroundPair>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    iterative_ground_pair_with(apply, dim, tol, &LanczosConfig::default())
}

/// Restarted Lanczos with full reorthogonalization.
pub fn iterative_ground_pair_with<F>(apply: F, dim: usize, tol: f64, cfg: &LanczosConfig) -> Result<GroundPair>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    if dim < 2 {
        return Err(Error::Dimension(format!("Lanczos needs dim >= 2, got {dim}")));
    }
    let krylov = cfg.krylov_dim.clamp(2, dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut start: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n0 = norm(&start);
    start.iter_mut().for_each(|z| *z /= n0);

    let mut applied = 0;
    let mut best_residual = f64::INFINITY;
    let mut w = vec![Complex64::default(); dim];

    loop {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();

        loop {
            let j = basis.len() - 1;
            apply(&basis[j], &mut w);
            applied += 1;
            let alpha = dot(&basis[j], &w).re;
            alphas.push(alpha);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for b in &basis {
                    let proj = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
                }
            }
            let beta = norm(&w);

            let (theta, coeffs) = lowest_ritz(&alphas, &betas)?;
            let estimate = beta * coeffs[j].abs();
            let target = tol * theta.abs().max(1.0);
            let exhausted = basis.len() == krylov || beta <= 1e-14 * theta.abs().max(1.0);

            if estimate < target || exhausted || applied >= cfg.max_iterations {
                let mut ritz = vec![Complex64::default(); dim];
                for (c, b) in coeffs.iter().zip(&basis) {
                    ritz.iter_mut().zip(b).for_each(|(x, y)| *x += *c * y);
                }
                let rn = norm(&ritz);
                ritz.iter_mut().for_each(|z| *z /= rn);
                apply(&ritz, &mut w);
                applied += 1;
                let value = dot(&ritz, &w).re;
                let residual = w.iter().zip(&ritz).map(|(a, b)| (a - value * b).norm_sqr()).sum::<f64>().sqrt();
                best_residual = best_residual.min(residual);
                if residual < tol * value.abs().max(1.0) {
                    return Ok(GroundPair { value, vector: ritz, residual, iterations: applied });
                }
                if applied >= cfg.max_iterations {
                    return Err(Error::Convergence { iterations: applied, best_residual });
                }
                start = ritz;
                break;
            }

            betas.push(beta);
            basis.push(w.iter().map(|z| z / beta).collect());
        }
    }
}

/// Lowest eigenpair of the Lanczos tridiagonal matrix.
fn lowest_ritz(alphas: &[f64], betas: &[f64]) -> Result<(f64, Vec<f64>)> {
    let m = alphas.len();
    let mut t = vec![0.0; m * m];
    for i in 0..m {
        t[i * m + i] = alphas[i];
        if i + 1 < m {
            t[i * m + i + 1] = betas[i];
            t[(i + 1) * m + i] = betas[i];
        }
    }
    let (values, vectors) = jacobi_eigen(t, m, true)?;
    let vectors = vectors.expect("vectors requested");
    Ok((values[0], (0..m).map(|i| vectors[i * m]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_symmetric(n: usize, seed: u64) -> DenseMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.gen_range(-1.0..1.0);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        m
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn dense_apply(m: &ComplexMatrix) -> impl Fn(&[Complex64], &mut [Complex64]) + '_ {
        move |x, y| {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = m.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
            }
        }
    }

    /// Determinant of `a - x I` by Gaussian elimination; an independent route
    /// to the spectrum for small matrices.
    fn char_poly(a: &DenseMatrix<f64>, x: f64) -> f64 {
        let n = a.rows();
        let mut m: Vec<f64> = (0..n * n).map(|k| a.as_slice()[k] - if k % (n + 1) == 0 { x } else { 0.0 }).collect();
        let mut det = 1.0;
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| m[i * n + k].abs().total_cmp(&m[j * n + k].abs())).unwrap();
            if m[piv * n + k] == 0.0 {
                return 0.0;
            }
            if piv != k {
                for j in 0..n {
                    m.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            det *= m[k * n + k];
            for i in k + 1..n {
                let f = m[i * n + k] / m[k * n + k];
                for j in k..n {
                    m[i * n + j] -= f * m[k * n + j];
                }
            }
        }
        det
    }

    fn bisect_roots(a: &DenseMatrix<f64>, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
        let mut roots = Vec::new();
        let step = (hi - lo) / samples as f64;
        for k in 0..samples {
            let (mut x0, mut x1) = (lo + k as f64 * step, lo + (k + 1) as f64 * step);
            let (mut f0, f1) = (char_poly(a, x0), char_poly(a, x1));
            if f0 == 0.0 {
                roots.push(x0);
                continue;
            }
            if f0.signum() == f1.signum() {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (x0 + x1);
                let fm = char_poly(a, mid);
                if fm.signum() == f0.signum() {
                    x0 = mid;
                    f0 = fm;
                } else {
                    x1 = mid;
                }
            }
            roots.push(0.5 * (x0 + x1));
        }
        roots
    }

    #[test]
    fn identity_spectrum() {
        let r = symmetric_eigen(&DenseMatrix::<f64>::identity(3), true).unwrap();
        assert_eq!(r.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let m = DenseMatrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        for want in [false, true] {
            let r = symmetric_eigen(&m, want).unwrap();
            assert_abs_diff_eq!(r.values[0], -1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(r.values[1], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn hilbert_matrix_matches_characteristic_polynomial() {
        let h = DenseMatrix::from_fn(3, 3, |i, j| 1.0 / (i + j + 1) as f64);
        // eigenvalues of the 3x3 Hilbert matrix lie in (0, 1.5); the smallest is ~2.7e-3
        let roots = bisect_roots(&h, 1e-6, 1.5, 3000);
        assert_eq!(roots.len(), 3);
        for want in [false, true] {
            let r = symmetric_eigen(&h, want).unwrap();
            for (a, b) in r.values.iter().zip(&roots) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        let rect = DenseMatrix::<f64>::zeros(2, 3);
        assert!(matches!(symmetric_eigen(&rect, false), Err(Error::Dimension(_))));
        let skew = DenseMatrix::new(2, 2, vec![0.0, 1.0, -1.0, 0.0]).unwrap();
        assert!(matches!(symmetric_eigen(&skew, false), Err(Error::Symmetry { .. })));
        let complex_sym = ComplexMatrix::new(2, 2, vec![c(0., 0.), c(0., 1.), c(0., 1.), c(0., 0.)]).unwrap();
        assert!(matches!(symmetric_eigen(&complex_sym, true), Err(Error::Symmetry { .. })));
        assert!(DenseMatrix::<f64>::new(0, 3, vec![]).is_err());
    }

    #[test]
    fn jacobi_and_ql_agree() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (40, 4), (150, 5)] {
            let m = random_symmetric(n, seed);
            let a = symmetric_eigen(&m, true).unwrap().values;
            let b = symmetric_eigen(&m, false).unwrap().values;
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(*x, *y, epsilon = 1e-12 * n as f64);
            }
        }
    }

    #[test]
    fn ql_handles_already_diagonal_and_degenerate() {
        let m = DenseMatrix::from_diagonal(&[3.0, -1.0, 3.0, 0.0, 3.0]);
        assert_eq!(symmetric_eigen(&m, false).unwrap().values, vec![-1.0, 0.0, 3.0, 3.0, 3.0]);
    }

    #[test]
    fn reconstruction_residual_real_and_complex() {
        let m = random_symmetric(60, 11);
        let r = symmetric_eigen(&m, true).unwrap();
        let v = r.vectors.unwrap();
        let lam = DenseMatrix::from_diagonal(&r.values);
        let back = v.matmul(&lam).unwrap().matmul(&v.transpose()).unwrap();
        let err = (0..60 * 60).map(|k| (back.as_slice()[k] - m.as_slice()[k]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10 * m.max_abs(), "{err}");

        let h = random_hermitian(30, 12);
        let r = symmetric_eigen(&h, true).unwrap();
        let v = r.vectors.unwrap();
        let lam = ComplexMatrix::from_diagonal(&r.values.iter().map(|&x| c(x, 0.)).collect::<Vec<_>>());
        let back = v.matmul(&lam).unwrap().matmul(&v.adjoint()).unwrap();
        let err = (0..900).map(|k| (back.as_slice()[k] - h.as_slice()[k]).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10 * h.max_abs(), "{err}");
    }

    #[test]
    fn embedding_picks_independent_vectors_in_degenerate_clusters() {
        // eigenvalues {2, 2, 2, -1}: a triply degenerate complex cluster
        let u = {
            let h = random_hermitian(4, 99);
            symmetric_eigen(&h, true).unwrap().vectors.unwrap()
        };
        let d = ComplexMatrix::from_diagonal(&[c(2., 0.), c(2., 0.), c(-1., 0.), c(2., 0.)]);
        let m = u.matmul(&d).unwrap().matmul(&u.adjoint()).unwrap();
        // clean roundoff asymmetry before handing it over
        let m = ComplexMatrix::from_fn(4, 4, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
        let r = symmetric_eigen(&m, true).unwrap();
        assert_abs_diff_eq!(r.values[0], -1.0, epsilon = 1e-12);
        for v in &r.values[1..] {
            assert_abs_diff_eq!(*v, 2.0, epsilon = 1e-12);
        }
        let v = r.vectors.unwrap();
        let gram = v.adjoint().matmul(&v).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[(i, j)].norm(), want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn singular_value_examples() {
        let d = DenseMatrix::new(2, 2, vec![3.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(singular_values(&d).unwrap(), vec![3.0, 2.0]);
        let z = DenseMatrix::<f64>::zeros(3, 5);
        assert_eq!(singular_values(&z).unwrap(), vec![0.0; 3]);
        let row = DenseMatrix::new(1, 2, vec![3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(singular_values(&row).unwrap()[0], 5.0, epsilon = 1e-14);
        let col = DenseMatrix::new(2, 1, vec![3.0, 4.0]).unwrap();
        assert_eq!(singular_values(&col).unwrap().len(), 1);
    }

    #[test]
    fn singular_values_empty_is_error() {
        let empty = DenseMatrix::<f64> { rows: 0, cols: 0, data: vec![] };
        assert!(matches!(singular_values(&empty), Err(Error::Dimension(_))));
    }

    #[test]
    fn lu_solve_recovers_known_solution() {
        let a = random_symmetric(50, 21);
        let a = DenseMatrix::from_fn(50, 50, |i, j| {
            a[(i, j)] + if i == j { 0.1 } else { 0.0 } + 0.3 * (i as f64 - j as f64).sin()
        });
        let x = DenseMatrix::from_fn(50, 3, |i, j| (i * 3 + j) as f64 * 0.01 - 0.5);
        let b = a.matmul(&x).unwrap();
        let got = solve(&a, &b).unwrap();
        for k in 0..150 {
            assert_abs_diff_eq!(got.as_slice()[k], x.as_slice()[k], epsilon = 1e-9);
        }
        let sing = DenseMatrix::new(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(solve(&sing, &DenseMatrix::identity(2)), Err(Error::Singular));
    }

    #[test]
    fn lanczos_small_examples() {
        let px = ComplexMatrix::new(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let g = iterative_ground_pair(dense_apply(&px), 2, 1e-12).unwrap();
        assert_abs_diff_eq!(g.value, -1.0, epsilon = 1e-12);

        let d = ComplexMatrix::from_diagonal(&[c(5., 0.), c(-2., 0.), c(7., 0.)]);
        let g = iterative_ground_pair(dense_apply(&d), 3, 1e-12).unwrap();
        assert_abs_diff_eq!(g.value, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.vector[1].norm(), 1.0, epsilon = 1e-10);

        assert!(matches!(iterative_ground_pair(dense_apply(&d), 1, 1e-12), Err(Error::Dimension(_))));
    }

    #[test]
    fn lanczos_matches_dense_on_random_64() {
        let m = random_symmetric(64, 64).map(|x| c(x, 0.));
        let dense = symmetric_eigen(&m, false).unwrap().values[0];
        let g = iterative_ground_pair(dense_apply(&m), 64, 1e-11).unwrap();
        assert_abs_diff_eq!(g.value, dense, epsilon = 1e-9);
        assert!(g.residual < 1e-11 * dense.abs().max(1.0));
    }

    #[test]
    fn lanczos_is_deterministic() {
        let m = random_hermitian(40, 5);
        let a = iterative_ground_pair(dense_apply(&m), 40, 1e-10).unwrap();
        let b = iterative_ground_pair(dense_apply(&m), 40, 1e-10).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.vector, b.vector);
    }

    #[test]
    fn lanczos_reports_convergence_failure() {
        let m = random_hermitian(80, 6);
        let cfg = LanczosConfig { max_iterations: 5, krylov_dim: 4, ..Default::default() };
        match iterative_ground_pair_with(dense_apply(&m), 80, 1e-14, &cfg) {
            Err(Error::Convergence { best_residual, .. }) => assert!(best_residual.is_finite()),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn lanczos_agrees_with_dense_on_50_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..50 {
            let n = rng.gen_range(2..=128);
            let m = random_hermitian(n, 1000 + trial);
            let dense = symmetric_eigen(&m, false).unwrap().values[0];
            let g = iterative_ground_pair(dense_apply(&m), n, 1e-11).unwrap();
            assert!((g.value - dense).abs() < 1e-9, "trial {trial} n={n}: {} vs {dense}", g.value);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn eigenvalue_sum_is_trace(n in 1usize..24, seed in any::<u64>()) {
            let m = random_hermitian(n, seed);
            let r = symmetric_eigen(&m, false).unwrap();
            let sum: f64 = r.values.iter().sum();
            prop_assert!((sum - m.trace().re).abs() < 1e-10 * n as f64);
            prop_assert!(r.values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn eigenvectors_are_orthonormal(n in 1usize..32, seed in any::<u64>()) {
            let m = random_symmetric(n, seed);
            let v = symmetric_eigen(&m, true).unwrap().vectors.unwrap();
            let g = v.transpose().matmul(&v).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((g[(i, j)] - want).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn singular_values_invariant_under_adjoint(r in 1usize..12, cc in 1usize..12, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = ComplexMatrix::from_fn(r, cc, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let a = singular_values(&m).unwrap();
            let b = singular_values(&m.adjoint()).unwrap();
            prop_assert_eq!(a.len(), r.min(cc));
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12 * a[0].max(1.0));
            }
            prop_assert!(a.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(a.iter().all(|&s| s >= 0.0));
        }
    }
}
