//! SU(2) and U(2) primitives: phase normalization, minimal Hilbert-Schmidt
//! logarithms and geodesic energies.
//!
//! [`Su2`] stores an element as a unit quaternion `(q0, q1, q2, q3)` with
//!
//! ```text
//! U = q0·I − i(q1·σx + q2·σy + q3·σz)
//! ```
//!
//! so that a rotation by angle `θ` about the unit axis `n` is
//! `(cos θ/2, sin θ/2 · n)`. Under this map the operator-norm distance
//! `‖U − V‖` equals the Euclidean distance of the quaternions.

use std::f64::consts::PI;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::numeric::{
    default_tol, mat_log_principal, principal_arg, unitary_eig, AntiHermitian, ComplexMatrix, UnitaryMatrix, C64,
};

/// Cut-locus detection threshold on the principal eigen-angle.
pub const CUT_LOCUS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    q: [f64; 4],
}

impl Default for Su2 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Su2 {
    pub const fn identity() -> Self {
        Self { q: [1.0, 0.0, 0.0, 0.0] }
    }

    /// Normalizes the given quaternion.
    pub fn from_quaternion(q: [f64; 4]) -> Result<Self> {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::InvalidInput("zero quaternion".into()));
        }
        Ok(Self { q: q.map(|x| x / n) })
    }

    /// Stores `q` as is; the caller guarantees unit norm.
    pub(crate) fn from_raw(q: [f64; 4]) -> Self {
        Self { q }
    }

    /// Rotation by `angle` about `axis` (normalized internally).
    pub fn rotation(axis: [f64; 3], angle: f64) -> Self {
        let n = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return Self::identity();
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Self { q: [c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n] }
    }

    /// Accepts a 2×2 unitary with `|det − 1| ≤ tol`.
    pub fn from_matrix(m: &ComplexMatrix, tol: f64) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::DimMismatch { expected: 2, found: m.rows() });
        }
        let dev = m.unitarity_deviation();
        if dev > tol {
            return Err(Error::NotUnitary(dev));
        }
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let det_dev = (det - C64::new(1.0, 0.0)).norm();
        if det_dev > tol {
            return Err(Error::NotSpecial(det_dev));
        }
        let (u00, u01, u10, u11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        Self::from_quaternion([
            (u00.re + u11.re) / 2.0,
            -(u01.im + u10.im) / 2.0,
            (u10.re - u01.re) / 2.0,
            (u11.im - u00.im) / 2.0,
        ])
    }

    pub fn from_unitary(u: &UnitaryMatrix) -> Result<Self> {
        Self::from_matrix(u.matrix(), u.tol().max(default_tol(2)))
    }

    pub fn quaternion(&self) -> [f64; 4] {
        self.q
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let [q0, q1, q2, q3] = self.q;
        ComplexMatrix::new(
            2,
            2,
            vec![C64::new(q0, -q3), C64::new(-q2, -q1), C64::new(q2, -q1), C64::new(q0, q3)],
        )
        .expect("finite")
    }

    pub fn to_unitary(&self) -> UnitaryMatrix {
        UnitaryMatrix::new_unchecked(self.to_matrix())
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.q;
        Self { q: [a, -b, -c, -d] }
    }

    /// Operator-norm distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.q.iter().zip(&other.q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// Rotation angle in `[0, 2π]`; eigenvalues are `e^{∓i·angle/2}`.
    pub fn rotation_angle(&self) -> f64 {
        2.0 * self.half_angle()
    }

    /// Principal eigen-angle `α ∈ [0, π]`.
    pub fn half_angle(&self) -> f64 {
        let v = (self.q[1] * self.q[1] + self.q[2] * self.q[2] + self.q[3] * self.q[3]).sqrt();
        v.atan2(self.q[0])
    }

    /// Unit rotation axis, or `None` for `±I`.
    pub fn axis(&self) -> Option<[f64; 3]> {
        let v = [self.q[1], self.q[2], self.q[3]];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 1e-300).then(|| v.map(|x| x / n))
    }
}

impl Mul for Su2 {
    type Output = Su2;
    fn mul(self, rhs: Su2) -> Su2 {
        let [a0, a1, a2, a3] = self.q;
        let [b0, b1, b2, b3] = rhs.q;
        Su2 {
            q: [
                a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
                a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
                a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
                a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
            ],
        }
    }
}

/// `V = e^{iθ} S` with `e^{iθ}` the principal square root of `det V`.
pub fn split_phase_u2(v: &UnitaryMatrix) -> Result<(f64, Su2)> {
    if v.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, found: v.dim() });
    }
    let m = v.matrix();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let theta = principal_arg(det) / 2.0;
    let s = m.scale(C64::from_polar(1.0, -theta));
    let s = Su2::from_matrix(&s, v.tol().max(default_tol(2)) * 10.0)?;
    Ok((theta, s))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinLogResult {
    pub generator: AntiHermitian,
    pub hs_norm: f64,
    pub unique: bool,
}

impl MinLogResult {
    /// `½‖X‖²_hs`, the energy of the constant-speed geodesic `t ↦ exp(tX)`.
    pub fn energy(&self) -> f64 {
        0.5 * self.hs_norm * self.hs_norm
    }
}

/// Minimal-norm logarithm in su(2): `X = −iα n·σ` with `α ∈ [0, π]`.
pub fn minlog_su2(v: &Su2) -> MinLogResult {
    let alpha = v.half_angle();
    let unique = (alpha - PI).abs() >= CUT_LOCUS_TOL;
    // at ±I the axis is arbitrary; z is used
    let n = v.axis().unwrap_or([0.0, 0.0, 1.0]);
    let x = Su2::generator_matrix([alpha * n[0], alpha * n[1], alpha * n[2]]);
    MinLogResult { generator: AntiHermitian::new_unchecked(x), hs_norm: alpha, unique }
}

impl Su2 {
    /// `−i(a·σ)` for a real 3-vector `a`.
    fn generator_matrix(a: [f64; 3]) -> ComplexMatrix {
        let [x, y, z] = a;
        ComplexMatrix::new(
            2,
            2,
            vec![C64::new(0.0, -z), C64::new(-y, -x), C64::new(y, -x), C64::new(0.0, z)],
        )
        .expect("finite")
    }
}

/// Minimal-norm logarithm in u(2) with principal eigen-angles;
/// `‖X‖²_hs = ½(θ₁² + θ₂²)`.
pub fn minlog_u2(v: &UnitaryMatrix) -> Result<MinLogResult> {
    if v.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, found: v.dim() });
    }
    let (_, angles) = unitary_eig(v)?;
    let generator = mat_log_principal(v)?;
    let hs_norm = (0.5 * angles.iter().map(|t| t * t).sum::<f64>()).sqrt();
    let unique = angles.iter().all(|t| (t.abs() - PI).abs() >= CUT_LOCUS_TOL);
    Ok(MinLogResult { generator, hs_norm, unique })
}

/// `½ min‖X‖²_hs` over the SU(2) (`special`) or U(2) logarithms of `V`.
pub fn geodesic_energy(v: &UnitaryMatrix, special: bool) -> Result<f64> {
    if special {
        let s = Su2::from_unitary(v)?;
        Ok(minlog_su2(&s).energy())
    } else {
        Ok(minlog_u2(v)?.energy())
    }
}

pub fn su2_distance(v: &Su2, w: &Su2) -> f64 {
    v.distance(w)
}
