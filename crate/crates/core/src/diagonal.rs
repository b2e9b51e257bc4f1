//! Phase bookkeeping for diagonal unitaries.
//!
//! A diagonal `D` is split as `e^{iθ} D₀` with `det D₀ = 1`, and `D₀` is written
//! as a product of the commuting two-level phase rotations
//! `γ_{1j}(t) = exp(t·(i/2)(E₁₁ − E_jj))`, `j = 2..N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{principal_arg, wrap_angle, ComplexMatrix, UnitaryMatrix, C64};

/// Angle-sum tolerance for the determinant-one test.
pub const SPECIAL_TOL: f64 = 1e-9;

/// Diagonal unitary stored by its phases, each in (−π, π].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalUnitary {
    angles: Vec<f64>,
}

impl DiagonalUnitary {
    pub fn from_angles(angles: impl IntoIterator<Item = f64>) -> Self {
        Self { angles: angles.into_iter().map(wrap_angle).collect() }
    }

    pub fn from_entries(entries: &[C64]) -> Self {
        Self { angles: entries.iter().map(|&z| principal_arg(z)).collect() }
    }

    pub fn identity(n: usize) -> Self {
        Self { angles: vec![0.0; n] }
    }

    /// Reads the diagonal of a unitary, rejecting off-diagonal mass above `tol`.
    pub fn from_unitary(u: &UnitaryMatrix, tol: f64) -> Result<Self> {
        let m = u.matrix();
        let n = m.rows();
        let mut off: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    off = off.max(m[(r, c)].norm());
                }
            }
        }
        if off > tol {
            return Err(Error::InvalidInput(format!("matrix is not diagonal (off-diagonal {off:e})")));
        }
        Ok(Self::from_entries(&m.diagonal()))
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn entries(&self) -> Vec<C64> {
        self.angles.iter().map(|&a| C64::from_polar(1.0, a)).collect()
    }

    pub fn to_unitary(&self) -> UnitaryMatrix {
        UnitaryMatrix::new_unchecked(ComplexMatrix::from_diag(&self.entries()))
    }

    pub fn is_identity(&self) -> bool {
        self.angles.iter().all(|&a| a == 0.0)
    }

    /// `Σφ_j ≡ 0 (mod 2π)` within [`SPECIAL_TOL`].
    pub fn is_special(&self) -> bool {
        angle_sum_residual(&self.angles).abs() <= SPECIAL_TOL
    }
}

fn angle_sum_residual(angles: &[f64]) -> f64 {
    wrap_angle(angles.iter().sum())
}

/// One-parameter rotation `γ_{1j}(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRotation {
    pub j: usize,
    pub t: f64,
}

impl PhaseRotation {
    /// The 2×2 block on `span{e₁, e_j}`: `diag(e^{it/2}, e^{−it/2})`.
    pub fn block(&self) -> UnitaryMatrix {
        let h = self.t / 2.0;
        UnitaryMatrix::new_unchecked(ComplexMatrix::from_diag(&[C64::from_polar(1.0, h), C64::from_polar(1.0, -h)]))
    }
}

/// `{"global_phase": θ, "rotations": [{"j": int, "t": real}, ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseProgram {
    pub global_phase: f64,
    pub rotations: Vec<PhaseRotation>,
}

impl PhaseProgram {
    /// Entrywise phases of `e^{iθ} ∏ γ_{1j}(t_j)` for ambient dimension `n`.
    pub fn evaluate_angles(&self, n: usize) -> Result<Vec<f64>> {
        let mut phases = vec![self.global_phase; n];
        for r in &self.rotations {
            if r.j < 2 || r.j > n {
                return Err(Error::InvalidIndex(format!("rotation index {} outside 2..={n}", r.j)));
            }
            phases[0] += r.t / 2.0;
            phases[r.j - 1] -= r.t / 2.0;
        }
        Ok(phases)
    }

    /// The diagonal matrix the program realizes.
    pub fn evaluate(&self, n: usize) -> Result<UnitaryMatrix> {
        let entries: Vec<C64> = self.evaluate_angles(n)?.into_iter().map(|a| C64::from_polar(1.0, a)).collect();
        Ok(UnitaryMatrix::new_unchecked(ComplexMatrix::from_diag(&entries)))
    }

    /// Rotations with `t ≠ 0`.
    pub fn effective_rotations(&self) -> impl Iterator<Item = &PhaseRotation> {
        self.rotations.iter().filter(|r| r.t != 0.0)
    }
}

/// `D = e^{iθ} D₀` with `θ = arg(det D)/N`, `arg ∈ (−π, π]`.
pub fn phase_split(d: &DiagonalUnitary) -> (f64, DiagonalUnitary) {
    let n = d.dim();
    let theta = angle_sum_residual(d.angles()) / n as f64;
    let d0 = DiagonalUnitary::from_angles(d.angles().iter().map(|&a| a - theta));
    (theta, d0)
}

/// `γ_{1j}(t)` as an `N × N` matrix.
pub fn gamma_1j(j: usize, t: f64, n: usize) -> Result<UnitaryMatrix> {
    if j < 2 || j > n {
        return Err(Error::InvalidIndex(format!("rotation index {j} outside 2..={n}")));
    }
    let mut d = vec![C64::new(1.0, 0.0); n];
    d[0] = C64::from_polar(1.0, t / 2.0);
    d[j - 1] = C64::from_polar(1.0, -t / 2.0);
    Ok(UnitaryMatrix::new_unchecked(ComplexMatrix::from_diag(&d)))
}

/// Writes a determinant-one diagonal as `∏_{j≥2} γ_{1j}(−2φ_j)`.
pub fn synth_special_diagonal(d0: &DiagonalUnitary) -> Result<PhaseProgram> {
    let residual = angle_sum_residual(d0.angles());
    if residual.abs() > SPECIAL_TOL {
        return Err(Error::NotSpecial(residual.abs()));
    }
    let rotations: Vec<PhaseRotation> = d0
        .angles()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &phi)| PhaseRotation { j: k + 1, t: 0.0 - 2.0 * phi })
        .collect();
    // the first entry is forced: e^{(i/2)Σt_j} must equal e^{iφ₁}
    let first: f64 = rotations.iter().map(|r| r.t).sum::<f64>() / 2.0;
    let mismatch = wrap_angle(first - d0.angles().first().copied().unwrap_or(0.0));
    if mismatch.abs() > SPECIAL_TOL {
        return Err(Error::NumericalFailure(format!("first-entry phase mismatch {mismatch:e}")));
    }
    Ok(PhaseProgram { global_phase: 0.0, rotations })
}

/// `phase_split` followed by [`synth_special_diagonal`].
pub fn synth_full_diagonal(d: &DiagonalUnitary) -> Result<PhaseProgram> {
    let (theta, d0) = phase_split(d);
    let mut program = synth_special_diagonal(&d0)?;
    program.global_phase = theta;
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::operator_norm;
    use crate::random::random_diagonal;
    use crate::two_level::is_two_level;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn dist(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
        operator_norm(&a.matrix().sub(b.matrix()).unwrap()).unwrap()
    }

    #[test]
    fn split_examples() {
        let (t, d0) = phase_split(&DiagonalUnitary::identity(3));
        assert_eq!(t, 0.0);
        assert!(d0.is_identity());

        let (t, d0) = phase_split(&DiagonalUnitary::from_angles([PI / 4.0, PI / 4.0]));
        assert!((t - PI / 4.0).abs() < 1e-15);
        assert!(d0.angles().iter().all(|a| a.abs() < 1e-15));

        let (t, d0) = phase_split(&DiagonalUnitary::from_angles([PI / 2.0, 0.0]));
        assert!((t - PI / 4.0).abs() < 1e-15);
        assert!((d0.angles()[0] - PI / 4.0).abs() < 1e-15);
        assert!((d0.angles()[1] + PI / 4.0).abs() < 1e-15);
        assert!(d0.is_special());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_1j(3, 0.0, 4).unwrap().matrix(), &ComplexMatrix::identity(4));
        let g = gamma_1j(2, 2.0 * PI, 2).unwrap();
        let minus = ComplexMatrix::identity(2).scale(C64::new(-1.0, 0.0));
        assert!(g.matrix().sub(&minus).unwrap().max_abs() < 1e-15);
        let g = gamma_1j(3, 0.8, 5).unwrap();
        let f = is_two_level(&g).unwrap();
        assert_eq!((f.p, f.q), (1, 3));
        assert!((f.block.matrix()[(0, 0)] - C64::from_polar(1.0, 0.4)).norm() < 1e-15);
        assert!((f.block.matrix()[(1, 1)] - C64::from_polar(1.0, -0.4)).norm() < 1e-15);
        assert!(matches!(gamma_1j(1, 0.1, 4), Err(Error::InvalidIndex(_))));
        assert!(matches!(gamma_1j(5, 0.1, 4), Err(Error::InvalidIndex(_))));
    }

    #[test]
    fn gamma_is_one_parameter_subgroup() {
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..20 {
            let (s, t): (f64, f64) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let lhs = gamma_1j(3, s, 4).unwrap().compose(&gamma_1j(3, t, 4).unwrap()).unwrap();
            let rhs = gamma_1j(3, s + t, 4).unwrap();
            assert!(lhs.matrix().sub(rhs.matrix()).unwrap().max_abs() < 1e-12);
            let det = gamma_1j(4, s, 6).unwrap().matrix().determinant().unwrap();
            assert!((det - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn special_synthesis_examples() {
        let p = synth_special_diagonal(&DiagonalUnitary::identity(4)).unwrap();
        assert!(p.rotations.iter().all(|r| r.t == 0.0));

        let d0 = DiagonalUnitary::from_angles([PI / 2.0, -PI / 2.0, 0.0, 0.0]);
        let p = synth_special_diagonal(&d0).unwrap();
        assert_eq!(p.rotations.len(), 3);
        assert!((p.rotations[0].t - PI).abs() < 1e-15);
        assert_eq!(p.rotations[1].t, 0.0);
        assert_eq!(p.rotations[2].t, 0.0);
        assert!(dist(&p.evaluate(4).unwrap(), &d0.to_unitary()) < 1e-15);

        let bad = DiagonalUnitary::from_angles([0.3, 0.0]);
        assert!(matches!(synth_special_diagonal(&bad), Err(Error::NotSpecial(_))));
    }

    #[test]
    fn special_synthesis_random() {
        let mut rng = StdRng::seed_from_u64(9);
        let d = DiagonalUnitary::from_entries(&random_diagonal(8, &mut rng));
        let (_, d0) = phase_split(&d);
        let p = synth_special_diagonal(&d0).unwrap();
        // explicit product of the γ matrices, independent of evaluate_angles
        let mut prod = UnitaryMatrix::identity(8);
        for r in &p.rotations {
            prod = prod.compose(&gamma_1j(r.j, r.t, 8).unwrap()).unwrap();
        }
        assert!(dist(&prod, &d0.to_unitary()) < 1e-10);
    }

    #[test]
    fn full_synthesis_examples() {
        let p = synth_full_diagonal(&DiagonalUnitary::identity(4)).unwrap();
        assert_eq!(p.global_phase, 0.0);
        assert_eq!(p.effective_rotations().count(), 0);

        let alpha = 0.7;
        let p = synth_full_diagonal(&DiagonalUnitary::from_angles([alpha; 4])).unwrap();
        assert!((p.global_phase - alpha).abs() < 1e-15);
        assert!(p.rotations.iter().all(|r| r.t.abs() < 1e-15));

        // 4α leaves (−π, π]: θ lands on another fourth root and D₀ is a nontrivial scalar
        let alpha = 1.1;
        let d = DiagonalUnitary::from_angles([alpha; 4]);
        let p = synth_full_diagonal(&d).unwrap();
        assert!((p.global_phase - (alpha - PI / 2.0)).abs() < 1e-15);
        assert!(dist(&p.evaluate(4).unwrap(), &d.to_unitary()) < 1e-10);

        let d = DiagonalUnitary::from_angles([PI / 2.0, 0.0, 0.0, 0.0]);
        let p = synth_full_diagonal(&d).unwrap();
        assert!((p.global_phase - PI / 8.0).abs() < 1e-15);
        assert!(dist(&p.evaluate(4).unwrap(), &d.to_unitary()) < 1e-10);
    }

    #[test]
    fn rotation_order_is_irrelevant() {
        let mut rng = StdRng::seed_from_u64(10);
        let d = DiagonalUnitary::from_entries(&random_diagonal(6, &mut rng));
        let p = synth_full_diagonal(&d).unwrap();
        let mut fwd = UnitaryMatrix::identity(6);
        let mut rev = UnitaryMatrix::identity(6);
        for r in &p.rotations {
            fwd = fwd.compose(&gamma_1j(r.j, r.t, 6).unwrap()).unwrap();
        }
        for r in p.rotations.iter().rev() {
            rev = rev.compose(&gamma_1j(r.j, r.t, 6).unwrap()).unwrap();
        }
        assert!(fwd.matrix().sub(rev.matrix()).unwrap().max_abs() < 1e-12);
    }
}
