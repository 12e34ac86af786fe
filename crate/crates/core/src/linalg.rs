//! Dense complex matrices of small size: Gram products, LU determinants,
//! a cyclic Jacobi eigen-solver for Hermitian matrices and Cholesky solves.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix needs at least one row and one column".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector length {} vs {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension("matrix sum needs equal shapes".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// Square complex matrix with exact conjugate symmetry and a real diagonal.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

impl HermitianMatrix {
    /// Validates `m = mᴴ` to within `1e-12` (relative to the largest entry)
    /// and stores the exactly symmetrized matrix.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", m.rows, m.cols)));
        }
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        let mut dev: f64 = 0.0;
        for i in 0..m.rows {
            for j in i..m.cols {
                dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if dev > 1e-12 * scale.max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::symmetrized(m))
    }

    fn symmetrized(mut m: ComplexMatrix) -> Self {
        let n = m.rows;
        for i in 0..n {
            m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in i + 1..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)].conj());
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        HermitianMatrix(m)
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Dimension("empty diagonal".into()));
        }
        let n = d.len();
        Ok(HermitianMatrix(ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                ZERO
            }
        })))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(ComplexMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// `self + s·I`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.rows {
            m[(i, i)].re += s;
        }
        HermitianMatrix(m)
    }

    pub fn scaled(&self, c: f64) -> Self {
        HermitianMatrix(self.0.scale(Complex64::new(c, 0.0)))
    }

    pub fn add(&self, rhs: &HermitianMatrix) -> Result<Self> {
        Ok(HermitianMatrix(self.0.add(&rhs.0)?))
    }

    /// Quadratic form `vᴴ·A·v` (real for Hermitian `A`).
    pub fn quadratic_form(&self, v: &[Complex64]) -> Result<f64> {
        let av = self.0.mul_vec(v)?;
        Ok(v.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum())
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// `H·Hᴴ`.
pub fn gram(h: &ComplexMatrix) -> HermitianMatrix {
    let (n, m) = (h.rows, h.cols);
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let ri = &h.data[i * m..(i + 1) * m];
        out[(i, i)] = Complex64::new(ri.iter().map(|z| z.norm_sqr()).sum(), 0.0);
        for j in i + 1..n {
            let rj = &h.data[j * m..(j + 1) * m];
            let v: Complex64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    HermitianMatrix(out)
}

/// Determinant by LU decomposition with partial pivoting.
pub fn det_complex(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant of a {}x{} matrix", m.rows, m.cols)));
    }
    let n = m.rows;
    let mut a = m.data.clone();
    let mut det = ONE;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
            .expect("non-empty range");
        let pivot = a[p * n + k];
        if pivot == ZERO {
            return Ok(ZERO);
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        det *= pivot;
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f == ZERO {
                continue;
            }
            for j in k + 1..n {
                let u = a[k * n + j];
                a[i * n + j] -= f * u;
            }
        }
    }
    Ok(det)
}

/// Sign and log-magnitude of a real determinant whose entries are given as
/// `sign·exp(ln_abs)` in row-major order.
///
/// Each row is divided by its largest magnitude before LU, and the scale is
/// carried in the log accumulator, so entries far outside the `f64` range are
/// handled. Returns `(0, −∞)` for a singular matrix.
pub fn signed_log_det(n: usize, sign: &[f64], ln_abs: &[f64]) -> Result<(f64, f64)> {
    if sign.len() != n * n || ln_abs.len() != n * n || n == 0 {
        return Err(Error::Dimension(format!("signed_log_det needs {} entries", n * n)));
    }
    let mut a = vec![0.0; n * n];
    let mut ln_acc = 0.0;
    for i in 0..n {
        let row = &ln_abs[i * n..(i + 1) * n];
        let peak = row
            .iter()
            .zip(&sign[i * n..(i + 1) * n])
            .filter(|(l, s)| l.is_finite() && **s != 0.0)
            .map(|(l, _)| *l)
            .fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return Ok((0.0, f64::NEG_INFINITY));
        }
        ln_acc += peak;
        for j in 0..n {
            let l = row[j];
            a[i * n + j] = if l == f64::NEG_INFINITY { 0.0 } else { sign[i * n + j] * (l - peak).exp() };
        }
    }
    let mut sgn = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .expect("non-empty range");
        let pivot = a[p * n + k];
        if pivot == 0.0 {
            return Ok((0.0, f64::NEG_INFINITY));
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sgn = -sgn;
        }
        sgn *= pivot.signum();
        ln_acc += pivot.abs().ln();
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    Ok((sgn, ln_acc))
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

// Cyclic complex Jacobi. Returns the diagonalized matrix and, optionally,
// the accumulated unitary whose columns are eigenvectors.
fn jacobi(m: &HermitianMatrix, want_vectors: bool) -> (Vec<f64>, Option<Vec<Complex64>>) {
    let n = m.dim();
    let mut a = m.0.data.clone();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n).data);
    let norm = m.0.frobenius_norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= JACOBI_TOL * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[p * n + q];
                let h = g.norm();
                if h <= f64::MIN_POSITIVE || h <= 1e-18 * norm {
                    continue;
                }
                let phase = g / h; // e^{iφ}
                let alpha = a[p * n + p].re;
                let beta = a[q * n + q].re;
                let zeta = (beta - alpha) / (2.0 * h);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e_minus = phase.conj();
                // A ← A·W, W = diag(1, e^{−iφ}) composed with the real rotation.
                for i in 0..n {
                    let ap = a[i * n + p];
                    let aq = a[i * n + q] * e_minus;
                    a[i * n + p] = ap * c - aq * s;
                    a[i * n + q] = ap * s + aq * c;
                }
                // A ← Wᴴ·A
                for j in 0..n {
                    let ap = a[p * n + j];
                    let aq = a[q * n + j] * phase;
                    a[p * n + j] = ap * c - aq * s;
                    a[q * n + j] = ap * s + aq * c;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                if let Some(v) = v.as_mut() {
                    for i in 0..n {
                        let vp = v[i * n + p];
                        let vq = v[i * n + q] * e_minus;
                        v[i * n + p] = vp * c - vq * s;
                        v[i * n + q] = vp * s + vq * c;
                    }
                }
            }
        }
    }
    let clip = 1e-10 * norm;
    let eig = (0..n)
        .map(|i| {
            let l = a[i * n + i].re;
            if l < 0.0 && l >= -clip {
                0.0
            } else {
                l
            }
        })
        .collect();
    (eig, v)
}

/// Eigenvalues in ascending order; values in `[−1e-10·‖A‖, 0)` are clipped to 0.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Vec<f64> {
    let (mut e, _) = jacobi(m, false);
    e.sort_by(f64::total_cmp);
    e
}

/// Eigenvalues (ascending) and the unitary matrix of matching eigenvectors
/// stored as columns.
pub fn hermitian_eigen(m: &HermitianMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.dim();
    let (e, v) = jacobi(m, true);
    let v = v.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| e[i].total_cmp(&e[j]));
    let vals = order.iter().map(|&i| e[i]).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    (vals, vecs)
}

/// Lower-triangular Cholesky factor `L` with `A = L·Lᴴ`.
pub fn cholesky(m: &HermitianMatrix) -> Result<ComplexMatrix> {
    let n = m.dim();
    let mut l = ComplexMatrix::zeros(n, n);
    let tol = 1e-300;
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > tol) {
            return Err(Error::NotPositiveDefinite);
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// `ln det A` for Hermitian positive definite `A`.
pub fn ln_det_hpd(m: &HermitianMatrix) -> Result<f64> {
    let l = cholesky(m)?;
    Ok((0..m.dim()).map(|i| 2.0 * l[(i, i)].re.ln()).sum())
}

/// Solves `A·x = v` for Hermitian positive definite `A`.
pub fn solve_hermitian(m: &HermitianMatrix, v: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if v.len() != n {
        return Err(Error::Dimension(format!("right-hand side has length {}, expected {n}", v.len())));
    }
    let l = cholesky(m)?;
    let mut y = vec![ZERO; n];
    for i in 0..n {
        let mut s = v[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    Ok(x)
}
