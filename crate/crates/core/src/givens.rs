//! Exact unitary QR by complex Givens rotations.
//!
//! `factor` returns `U = T_1 T_2 ⋯ T_K · D` with each `T_k` a coordinate
//! two-level unitary and `D` diagonal. Columns are processed left to right;
//! inside a column the subdiagonal entries are annihilated bottom to top
//! against the pivot row. Every emitted block lies in SU(2).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{default_tol, ComplexMatrix, UnitaryMatrix, C64, ONE};
use crate::two_level::{left_apply, right_apply, block_entries, TwoLevelFactor, TwoLevelFactorJson};

/// Entries below this modulus are treated as already eliminated.
pub const SKIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub dim: usize,
    /// Leftmost factor first.
    pub factors: Vec<TwoLevelFactor>,
    pub diagonal: Vec<C64>,
}

impl Factorization {
    pub fn max_factors(n: usize) -> usize {
        n * (n - 1) / 2
    }

    pub fn to_json(&self) -> FactorizationJson {
        FactorizationJson {
            dim: self.dim,
            factors: self.factors.iter().map(TwoLevelFactor::to_json).collect(),
            diagonal: self.diagonal.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// `{"dim": N, "factors": [...], "diagonal": [[re, im], ...]}`
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FactorizationJson {
    pub dim: usize,
    pub factors: Vec<TwoLevelFactorJson>,
    pub diagonal: Vec<[f64; 2]>,
}

impl FactorizationJson {
    pub fn to_factorization(&self) -> Result<Factorization> {
        let factors = self.factors.iter().map(TwoLevelFactorJson::to_factor).collect::<Result<Vec<_>>>()?;
        if let Some(f) = factors.iter().find(|f| f.q > self.dim) {
            return Err(Error::InvalidIndex(format!("factor ({},{}) outside dimension {}", f.p, f.q, self.dim)));
        }
        if self.diagonal.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: self.diagonal.len() });
        }
        let diagonal: Vec<C64> = self.diagonal.iter().map(|&[re, im]| C64::new(re, im)).collect();
        if let Some(z) = diagonal.iter().find(|z| (z.norm() - 1.0).abs() > default_tol(self.dim)) {
            return Err(Error::InvalidInput(format!("diagonal entry {z} is not unit modulus")));
        }
        Ok(Factorization { dim: self.dim, factors, diagonal })
    }
}

/// Factors `U` into coordinate two-level unitaries and a diagonal remainder.
pub fn factor(u: &UnitaryMatrix) -> Result<Factorization> {
    let n = u.dim();
    let dev = u.matrix().unitarity_deviation();
    if dev > u.tol() {
        return Err(Error::NotUnitary(dev));
    }
    let mut work = u.matrix().clone();
    // G_M ⋯ G_1 U = R, so U = G_1† ⋯ G_M† R.
    let mut factors = Vec::new();
    for col in 0..n {
        for row in (col + 1..n).rev() {
            let b = work[(row, col)];
            if b.norm() < SKIP_TOL {
                continue;
            }
            let a = work[(col, col)];
            let rho = (a.norm_sqr() + b.norm_sqr()).sqrt();
            // G = [[a*, b*], [−b, a]]/ρ ∈ SU(2) maps (a, b) to (ρ, 0).
            let g = [a.conj() / rho, b.conj() / rho, -b / rho, a / rho];
            left_apply(&mut work, col, row, g);
            work[(row, col)] = C64::new(0.0, 0.0);
            let g_inv = [g[0].conj(), g[2].conj(), g[1].conj(), g[3].conj()];
            let block = ComplexMatrix::new(2, 2, g_inv.to_vec())?;
            factors.push(TwoLevelFactor::new(col + 1, row + 1, UnitaryMatrix::new_unchecked(block))?);
        }
    }
    // an upper-triangular unitary is diagonal; check rather than assume
    let mut off: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                off = off.max(work[(r, c)].norm());
            }
        }
    }
    let tol = 10.0 * u.tol().max(default_tol(n));
    if off > tol {
        return Err(Error::NumericalFailure(format!("triangular remainder not diagonal ({off:e})")));
    }
    let diagonal = work.diagonal();
    debug_assert!(factors.len() <= Factorization::max_factors(n));
    Ok(Factorization { dim: n, factors, diagonal })
}

/// `(∏_k φ_{p_k,q_k}(block_k)) · diag(d)`.
pub fn reconstruct(f: &Factorization) -> Result<UnitaryMatrix> {
    let n = f.dim;
    let mut m = ComplexMatrix::identity(n);
    for t in &f.factors {
        if t.q > n {
            return Err(Error::InvalidIndex(format!("factor ({},{}) outside dimension {n}", t.p, t.q)));
        }
        right_apply(&mut m, t.p - 1, t.q - 1, block_entries(&t.block));
    }
    if f.diagonal.len() != n {
        return Err(Error::DimMismatch { expected: n, found: f.diagonal.len() });
    }
    for c in 0..n {
        let d = f.diagonal[c];
        if d != ONE {
            for r in 0..n {
                m[(r, c)] *= d;
            }
        }
    }
    Ok(UnitaryMatrix::new_unchecked(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::operator_norm;
    use crate::random::{random_diagonal, random_special_unitary, random_unitary};
    use crate::two_level::embed_coordinate;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn err(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
        operator_norm(&a.matrix().sub(b.matrix()).unwrap()).unwrap()
    }

    #[test]
    fn identity_has_no_factors() {
        let f = factor(&UnitaryMatrix::identity(4)).unwrap();
        assert!(f.factors.is_empty());
        assert!(f.diagonal.iter().all(|&d| d == ONE));
    }

    #[test]
    fn diagonal_input_passes_through() {
        let mut rng = StdRng::seed_from_u64(1);
        let d = random_diagonal(5, &mut rng);
        let u = UnitaryMatrix::new(ComplexMatrix::from_diag(&d)).unwrap();
        let f = factor(&u).unwrap();
        assert!(f.factors.is_empty());
        assert_eq!(f.diagonal, d);
    }

    #[test]
    fn single_two_level_input() {
        let mut rng = StdRng::seed_from_u64(2);
        let v = random_special_unitary(2, &mut rng);
        let u = embed_coordinate(1, 2, &v, 4).unwrap();
        let f = factor(&u).unwrap();
        assert_eq!(f.factors.len(), 1);
        assert_eq!((f.factors[0].p, f.factors[0].q), (1, 2));
        assert!(f.diagonal.iter().all(|d| (d.norm() - 1.0).abs() < 1e-12));
        assert!(err(&reconstruct(&f).unwrap(), &u) < 1e-12);
    }

    #[test]
    fn single_factor_reconstructs_to_embedding() {
        let mut rng = StdRng::seed_from_u64(3);
        let v = random_unitary(2, &mut rng);
        let f = Factorization {
            dim: 3,
            factors: vec![TwoLevelFactor::new(2, 3, v.clone()).unwrap()],
            diagonal: vec![ONE; 3],
        };
        assert_eq!(reconstruct(&f).unwrap().matrix(), embed_coordinate(2, 3, &v, 3).unwrap().matrix());
        let empty = Factorization { dim: 3, factors: vec![], diagonal: vec![ONE; 3] };
        assert_eq!(reconstruct(&empty).unwrap().matrix(), &ComplexMatrix::identity(3));
    }

    #[test]
    fn random_round_trip_and_count() {
        let mut rng = StdRng::seed_from_u64(4);
        for n in [2, 3, 4, 5, 8, 16] {
            for _ in 0..10 {
                let u = random_unitary(n, &mut rng);
                let f = factor(&u).unwrap();
                assert!(f.factors.len() <= Factorization::max_factors(n));
                assert!(err(&reconstruct(&f).unwrap(), &u) <= 1e-10 * n as f64);
                for t in &f.factors {
                    let det = t.block.matrix().determinant().unwrap();
                    assert!((det - ONE).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn determinant_conserved() {
        let mut rng = StdRng::seed_from_u64(5);
        for n in [2, 4, 8] {
            let u = random_unitary(n, &mut rng);
            let f = factor(&u).unwrap();
            let mut det = f.diagonal.iter().product::<C64>();
            for t in &f.factors {
                det *= t.block.matrix().determinant().unwrap();
            }
            assert!((det - u.matrix().determinant().unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let m = ComplexMatrix::from_diag(&[C64::new(2.0, 0.0), ONE]);
        let u = UnitaryMatrix::new_unchecked(m);
        assert!(matches!(factor(&u), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn json_round_trip() {
        let mut rng = StdRng::seed_from_u64(6);
        let u = random_unitary(4, &mut rng);
        let f = factor(&u).unwrap();
        let s = serde_json::to_string(&f.to_json()).unwrap();
        let back: FactorizationJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_factorization().unwrap(), f);
    }
}
