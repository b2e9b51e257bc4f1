//! Dense complex matrices and the handful of spectral routines the rest of the
//! crate is built on: operator norm, Hilbert-Schmidt pairing, exponential and
//! principal logarithm of small unitaries.
//!
//! Decompositions are delegated to `nalgebra`; everything else works on the
//! row-major [`ComplexMatrix`] defined here.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Base unitarity tolerance; the effective tolerance is this times the dimension.
pub const DEFAULT_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Default unitarity tolerance for an `n`-dimensional matrix.
pub fn default_tol(n: usize) -> f64 {
    DEFAULT_TOL * n as f64
}

/// Wraps an angle into the half-open interval (-pi, pi]; -pi maps to +pi.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Principal argument in (-pi, pi].
pub fn principal_arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix must have at least one row and column".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimMismatch { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
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

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_raw(self.rows, self.cols, data))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.data[k * other.cols + c];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self[(r1, c1)];
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out[(r1 * other.rows + r2, c1 * other.cols + c2)] = a * other[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_exactly_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)] == ZERO))
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Determinant via LU with partial pivoting (square only).
    pub fn determinant(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::DimMismatch { expected: self.rows, found: self.cols });
        }
        Ok(self.to_nalgebra().determinant())
    }

    /// `‖A†A − I‖_max`, the unitarity deviation.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = self.adjoint().matmul(self).expect("square");
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { ONE } else { ZERO };
                dev = dev.max((g[(r, c)] - target).norm());
            }
        }
        dev
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out[(r, c)] = m[(r, c)];
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<MatrixJson> {
        if !self.is_square() {
            return Err(Error::InvalidInput("matrix JSON requires a square matrix".into()));
        }
        Ok(MatrixJson { dim: self.rows, entries: self.data.iter().map(|z| [z.re, z.im]).collect() })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

/// Square matrix checked to be unitary within `tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
    tol: f64,
}

impl UnitaryMatrix {
    /// Checks unitarity with the default dimension-scaled tolerance.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let tol = default_tol(matrix.rows());
        Self::with_tol(matrix, tol)
    }

    pub fn with_tol(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        let dev = matrix.unitarity_deviation();
        if dev > tol {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix, tol })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        let tol = default_tol(matrix.rows());
        Self { matrix, tol }
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked(ComplexMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), tol: self.tol }
    }

    /// Product of two unitaries; the tolerance of the left factor is kept.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(Self { matrix: self.matrix.matmul(&other.matrix)?, tol: self.tol.max(other.tol) })
    }
}

impl Index<(usize, usize)> for UnitaryMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.matrix[idx]
    }
}

/// Element of u(N): `X† = −X` within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiHermitian {
    matrix: ComplexMatrix,
}

impl AntiHermitian {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let tol = default_tol(matrix.rows());
        Self::with_tol(matrix, tol)
    }

    pub fn with_tol(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        let dev = matrix.adjoint().add(&matrix)?.max_abs();
        if dev > tol {
            return Err(Error::InvalidInput(format!("matrix is not anti-Hermitian (deviation {dev:e})")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn zeros(n: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Real multiple of the generator.
    pub fn scaled(&self, s: f64) -> Self {
        Self { matrix: self.matrix.scale(C64::new(s, 0.0)) }
    }
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    if a.rows() == 1 && a.cols() == 1 {
        return Ok(a[(0, 0)].norm());
    }
    if a.is_exactly_diagonal() {
        return Ok(a.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let svd = a.to_nalgebra().svd(false, false);
    Ok(svd.singular_values.iter().copied().fold(0.0, f64::max))
}

/// `½ Re Tr(X†Y)`.
pub fn hs_inner(x: &AntiHermitian, y: &AntiHermitian) -> Result<f64> {
    hs_inner_raw(x.matrix(), y.matrix())
}

pub(crate) fn hs_inner_raw(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    if x.rows() != y.rows() || x.cols() != y.cols() {
        return Err(Error::DimMismatch { expected: x.rows(), found: y.rows() });
    }
    let s: f64 = x.entries().iter().zip(y.entries()).map(|(a, b)| (a.conj() * b).re).sum();
    Ok(0.5 * s)
}

/// Hilbert-Schmidt norm `sqrt(⟨X,X⟩_hs)`.
pub fn hs_norm(x: &AntiHermitian) -> f64 {
    hs_inner(x, x).expect("same dimension").sqrt()
}

/// Matrix exponential of an anti-Hermitian generator.
///
/// Diagonalizes the Hermitian matrix `iX`, so the output is unitary to
/// working precision; diagonal inputs are exponentiated entrywise.
pub fn mat_exp(x: &AntiHermitian) -> UnitaryMatrix {
    let m = x.matrix();
    let n = m.rows();
    if m.is_exactly_diagonal() {
        let d: Vec<C64> = m.diagonal().iter().map(|z| z.exp()).collect();
        return UnitaryMatrix::new_unchecked(ComplexMatrix::from_diag(&d));
    }
    // H = iX is Hermitian; exp(X) = Q diag(e^{-iλ}) Q†.
    let mut h = m.scale(I).to_nalgebra();
    // symmetrize to remove round-off asymmetry before the Hermitian solver
    let ht = h.adjoint();
    h = (h + ht).map(|z| z * 0.5);
    let eig = h.symmetric_eigen();
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::new(0.0, -lambda).exp();
        for r in 0..n {
            scaled[(r, j)] *= phase;
        }
    }
    let out = scaled * q.adjoint();
    UnitaryMatrix::new_unchecked(ComplexMatrix::from_nalgebra(&out))
}

/// Unitary eigendecomposition `U = Q diag(e^{iθ_j}) Q†` with principal angles.
pub(crate) fn unitary_eig(u: &UnitaryMatrix) -> Result<(ComplexMatrix, Vec<f64>)> {
    let m = u.matrix();
    let n = m.rows();
    if m.is_exactly_diagonal() {
        let angles = m.diagonal().iter().map(|&z| principal_arg(z)).collect();
        return Ok((ComplexMatrix::identity(n), angles));
    }
    let schur = nalgebra::Schur::try_new(m.to_nalgebra(), 1e-15, 10_000)
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    // A normal matrix has a diagonal Schur form; large off-diagonal mass means breakdown.
    let mut off: f64 = 0.0;
    for r in 0..n {
        for c in (r + 1)..n {
            off = off.max(t[(r, c)].norm());
        }
    }
    let tol = 10.0 * u.tol().max(default_tol(n));
    if off > tol {
        return Err(Error::NumericalFailure(format!("Schur form not diagonal (off-diagonal {off:e})")));
    }
    let angles = (0..n).map(|i| principal_arg(t[(i, i)])).collect();
    Ok((ComplexMatrix::from_nalgebra(&q), angles))
}

/// Principal logarithm: eigen-angles in (−π, π], angle exactly π kept as +π.
pub fn mat_log_principal(u: &UnitaryMatrix) -> Result<AntiHermitian> {
    let n = u.dim();
    let (q, angles) = unitary_eig(u)?;
    let d: Vec<C64> = angles.iter().map(|&t| C64::new(0.0, t)).collect();
    let x = q.matmul(&ComplexMatrix::from_diag(&d))?.matmul(&q.adjoint())?;
    // exact anti-Hermitian projection
    let x = x.sub(&x.adjoint())?.scale(C64::new(0.5, 0.0));
    let x = AntiHermitian::new_unchecked(x);
    let back = mat_exp(&x);
    let err = back.matrix().sub(u.matrix())?.max_abs();
    let tol = 10.0 * u.tol().max(default_tol(n)) * n as f64;
    if err > tol {
        return Err(Error::NumericalFailure(format!("logarithm round trip error {err:e}")));
    }
    Ok(x)
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let (a, b, c, d) = match self {
            Pauli::I => (ONE, ZERO, ZERO, ONE),
            Pauli::X => (ZERO, ONE, ONE, ZERO),
            Pauli::Y => (ZERO, -I, I, ZERO),
            Pauli::Z => (ONE, ZERO, ZERO, -ONE),
        };
        ComplexMatrix::from_raw(2, 2, vec![a, b, c, d])
    }
}

impl std::str::FromStr for Pauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" | "I" | "i" => Ok(Pauli::I),
            "x" | "X" => Ok(Pauli::X),
            "y" | "Y" => Ok(Pauli::Y),
            "z" | "Z" => Ok(Pauli::Z),
            other => Err(Error::InvalidInput(format!("unknown Pauli label `{other}`"))),
        }
    }
}

/// `T_P = −(i/2) P` for the Pauli string `P = σ_{a_1} ⊗ … ⊗ σ_{a_n}`.
pub fn pauli_generator(labels: &[Pauli]) -> Result<AntiHermitian> {
    if labels.is_empty() {
        return Err(Error::InvalidInput("empty Pauli string".into()));
    }
    if labels.iter().all(|&p| p == Pauli::I) {
        return Err(Error::InvalidInput("identity Pauli string has no generator".into()));
    }
    let p = labels
        .iter()
        .skip(1)
        .fold(labels[0].matrix(), |acc, l| acc.kron(&l.matrix()));
    Ok(AntiHermitian::new_unchecked(p.scale(C64::new(0.0, -0.5))))
}

/// Matrix JSON: `{"dim": N, "entries": [[re, im], ...]}` in row-major order.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let data = self.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::new(self.dim, self.dim, data)
    }
}

pub fn matrix_from_json_str(s: &str) -> Result<ComplexMatrix> {
    let j: MatrixJson = serde_json::from_str(s)?;
    j.to_matrix()
}

pub fn matrix_to_json_string(m: &ComplexMatrix) -> Result<String> {
    Ok(serde_json::to_string(&m.to_json()?)?)
}
