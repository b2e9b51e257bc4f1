//! Two-level unitaries: coordinate embeddings `φ_{p,q}`, frame realizations
//! `I + F(S − I)F†` on arbitrary two-planes, and tensor placements `w_j`.
//!
//! Coordinate indices are 1-based throughout the public API.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{default_tol, ComplexMatrix, MatrixJson, UnitaryMatrix, C64, ONE, ZERO};

/// Entries outside the `{p,q}` rows/columns must match the identity this closely.
pub const TWO_LEVEL_TOL: f64 = 1e-9;

/// One coordinate two-level factor `φ_{p,q}(block)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelFactor {
    pub p: usize,
    pub q: usize,
    pub block: UnitaryMatrix,
}

impl TwoLevelFactor {
    pub fn new(p: usize, q: usize, block: UnitaryMatrix) -> Result<Self> {
        if p == 0 || p >= q {
            return Err(Error::InvalidIndex(format!("need 1 <= p < q, got ({p},{q})")));
        }
        if block.dim() != 2 {
            return Err(Error::DimMismatch { expected: 2, found: block.dim() });
        }
        Ok(Self { p, q, block })
    }

    pub fn lift(&self, n: usize) -> Result<UnitaryMatrix> {
        embed_coordinate(self.p, self.q, &self.block, n)
    }

    pub fn to_json(&self) -> TwoLevelFactorJson {
        TwoLevelFactorJson {
            p: self.p,
            q: self.q,
            block: self.block.matrix().to_json().expect("2x2"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TwoLevelFactorJson {
    pub p: usize,
    pub q: usize,
    pub block: MatrixJson,
}

impl TwoLevelFactorJson {
    pub fn to_factor(&self) -> Result<TwoLevelFactor> {
        let block = UnitaryMatrix::new(self.block.to_matrix()?)?;
        TwoLevelFactor::new(self.p, self.q, block)
    }
}

fn check_pair(p: usize, q: usize, n: usize) -> Result<()> {
    if p == 0 || p >= q || q > n {
        return Err(Error::InvalidIndex(format!("need 1 <= p < q <= {n}, got ({p},{q})")));
    }
    Ok(())
}

/// `φ_{p,q}(V)`: `V` on `span{e_p, e_q}`, identity elsewhere.
pub fn embed_coordinate(p: usize, q: usize, v: &UnitaryMatrix, n: usize) -> Result<UnitaryMatrix> {
    check_pair(p, q, n)?;
    if v.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, found: v.dim() });
    }
    let mut m = ComplexMatrix::identity(n);
    let (a, b) = (p - 1, q - 1);
    m[(a, a)] = v[(0, 0)];
    m[(a, b)] = v[(0, 1)];
    m[(b, a)] = v[(1, 0)];
    m[(b, b)] = v[(1, 1)];
    Ok(UnitaryMatrix::new_unchecked(m))
}

/// Right-multiplies `m` in place by `φ_{p,q}(block)` (0-based `a < b`). Touches two columns.
pub(crate) fn right_apply(m: &mut ComplexMatrix, a: usize, b: usize, block: [C64; 4]) {
    let [v00, v01, v10, v11] = block;
    for r in 0..m.rows() {
        let x = m[(r, a)];
        let y = m[(r, b)];
        m[(r, a)] = x * v00 + y * v10;
        m[(r, b)] = x * v01 + y * v11;
    }
}

/// Left-multiplies `m` in place by `φ_{p,q}(block)` (0-based `a < b`). Touches two rows.
pub(crate) fn left_apply(m: &mut ComplexMatrix, a: usize, b: usize, block: [C64; 4]) {
    let [v00, v01, v10, v11] = block;
    for c in 0..m.cols() {
        let x = m[(a, c)];
        let y = m[(b, c)];
        m[(a, c)] = v00 * x + v01 * y;
        m[(b, c)] = v10 * x + v11 * y;
    }
}

pub(crate) fn block_entries(v: &UnitaryMatrix) -> [C64; 4] {
    [v[(0, 0)], v[(0, 1)], v[(1, 0)], v[(1, 1)]]
}

/// Orthonormal pair of columns spanning a two-plane `W ⊂ C^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame2 {
    columns: [Vec<C64>; 2],
}

impl Frame2 {
    pub fn new(first: Vec<C64>, second: Vec<C64>) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::DimMismatch { expected: first.len(), found: second.len() });
        }
        if first.len() < 2 {
            return Err(Error::InvalidInput("a two-plane needs ambient dimension >= 2".into()));
        }
        let frame = Self { columns: [first, second] };
        let dev = frame.gram_deviation();
        if dev > default_tol(frame.ambient_dim()) {
            return Err(Error::InvalidFrame(dev));
        }
        Ok(frame)
    }

    /// The coordinate frame `[e_p | e_q]`.
    pub fn coordinate(p: usize, q: usize, n: usize) -> Result<Self> {
        check_pair(p, q, n)?;
        let mut a = vec![ZERO; n];
        let mut b = vec![ZERO; n];
        a[p - 1] = ONE;
        b[q - 1] = ONE;
        Self::new(a, b)
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns[0].len()
    }

    pub fn column(&self, j: usize) -> &[C64] {
        &self.columns[j]
    }

    fn gram_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let g: C64 = self.columns[i].iter().zip(&self.columns[j]).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { ONE } else { ZERO };
                dev = dev.max((g - target).norm());
            }
        }
        dev
    }

    /// The `N × 2` matrix `F`.
    pub fn as_matrix(&self) -> ComplexMatrix {
        let n = self.ambient_dim();
        let mut m = ComplexMatrix::zeros(n, 2);
        for r in 0..n {
            m[(r, 0)] = self.columns[0][r];
            m[(r, 1)] = self.columns[1][r];
        }
        m
    }

    /// Rank-2 projector `FF†` onto the spanned plane; frame-independent.
    pub fn projector(&self) -> ComplexMatrix {
        let f = self.as_matrix();
        &f * &f.adjoint()
    }

    /// The re-framed `F·R` for `R ∈ U(2)`; spans the same plane.
    pub fn rotated(&self, r: &UnitaryMatrix) -> Result<Self> {
        if r.dim() != 2 {
            return Err(Error::DimMismatch { expected: 2, found: r.dim() });
        }
        let fr = self.as_matrix().matmul(r.matrix())?;
        let n = self.ambient_dim();
        let a = (0..n).map(|i| fr[(i, 0)]).collect();
        let b = (0..n).map(|i| fr[(i, 1)]).collect();
        Self::new(a, b)
    }

    /// Pushes a 2×2 operator onto the plane: `F A F†` (zero on the complement).
    pub fn push_forward(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != 2 || a.cols() != 2 {
            return Err(Error::DimMismatch { expected: 2, found: a.rows() });
        }
        let f = self.as_matrix();
        f.matmul(a)?.matmul(&f.adjoint())
    }
}

/// `U_{W,F}(S) = I_N + F(S − I₂)F†`.
pub fn embed_frame(frame: &Frame2, s: &UnitaryMatrix) -> Result<UnitaryMatrix> {
    if s.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, found: s.dim() });
    }
    let n = frame.ambient_dim();
    let delta = s.matrix().sub(&ComplexMatrix::identity(2))?;
    let m = ComplexMatrix::identity(n).add(&frame.push_forward(&delta)?)?;
    UnitaryMatrix::with_tol(m, default_tol(n).max(s.tol()) * 10.0)
}

/// `w_j(V) = I^{⊗(j−1)} ⊗ V ⊗ I^{⊗(n−j)}` (qubit `j` is 1-based, most significant first).
pub fn tensor_place(j: usize, v: &UnitaryMatrix, n: usize) -> Result<UnitaryMatrix> {
    if j == 0 || j > n {
        return Err(Error::InvalidIndex(format!("qubit {j} outside 1..={n}")));
    }
    if v.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, found: v.dim() });
    }
    let left = ComplexMatrix::identity(1 << (j - 1));
    let right = ComplexMatrix::identity(1 << (n - j));
    Ok(UnitaryMatrix::new_unchecked(left.kron(v.matrix()).kron(&right)))
}

/// Recognizes a coordinate two-level unitary, returning its 1-based support
/// `(p, q)` and block. The identity has no distinguished support and yields `None`,
/// as does a phase on a single coordinate when `N > 2`.
pub fn is_two_level(u: &UnitaryMatrix) -> Option<TwoLevelFactor> {
    let m = u.matrix();
    let n = m.rows();
    let dev = |r: usize, c: usize| {
        let target = if r == c { ONE } else { ZERO };
        (m[(r, c)] - target).norm()
    };
    // indices whose row or column departs from the identity
    let mut active = Vec::new();
    for i in 0..n {
        if (0..n).any(|k| dev(i, k) > TWO_LEVEL_TOL || dev(k, i) > TWO_LEVEL_TOL) {
            active.push(i);
        }
    }
    let (a, b) = match active.as_slice() {
        [] => return None,
        [a, b] => (*a, *b),
        // in U(2) the only pair is (1,2); for N > 2 a one-coordinate phase has no unique support
        [_] if n == 2 => (0, 1),
        _ => return None,
    };
    let block = ComplexMatrix::new(2, 2, vec![m[(a, a)], m[(a, b)], m[(b, a)], m[(b, b)]]).ok()?;
    let block = UnitaryMatrix::with_tol(block, u.tol().max(default_tol(2))).ok()?;
    TwoLevelFactor::new(a + 1, b + 1, block).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{hs_norm, operator_norm, AntiHermitian, Pauli};
    use crate::random::{random_frame, random_special_unitary, random_unitary};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn sigma_x() -> UnitaryMatrix {
        UnitaryMatrix::new(Pauli::X.matrix()).unwrap()
    }

    #[test]
    fn identity_block_gives_identity() {
        let e = embed_coordinate(2, 3, &UnitaryMatrix::identity(2), 5).unwrap();
        assert_eq!(e.matrix(), &ComplexMatrix::identity(5));
    }

    #[test]
    fn sigma_x_swaps_basis_vectors() {
        let e = embed_coordinate(1, 3, &sigma_x(), 4).unwrap();
        let mut expect = ComplexMatrix::zeros(4, 4);
        for (r, c) in [(0, 2), (2, 0), (1, 1), (3, 3)] {
            expect[(r, c)] = ONE;
        }
        assert_eq!(e.matrix(), &expect);
    }

    #[test]
    fn invalid_pairs_rejected() {
        let v = UnitaryMatrix::identity(2);
        for (p, q) in [(0, 1), (2, 2), (3, 2), (1, 5)] {
            assert!(matches!(embed_coordinate(p, q, &v, 4), Err(Error::InvalidIndex(_))));
        }
        assert!(matches!(tensor_place(3, &v, 2), Err(Error::InvalidIndex(_))));
    }

    #[test]
    fn frame_matches_coordinate_embedding() {
        let mut rng = StdRng::seed_from_u64(11);
        let s = random_unitary(2, &mut rng);
        let f = Frame2::coordinate(2, 4, 5).unwrap();
        let a = embed_frame(&f, &s).unwrap();
        let b = embed_coordinate(2, 4, &s, 5).unwrap();
        assert!(a.matrix().sub(b.matrix()).unwrap().max_abs() < 1e-15);
        assert_eq!(embed_frame(&f, &UnitaryMatrix::identity(2)).unwrap().matrix(), &ComplexMatrix::identity(5));
    }

    #[test]
    fn frame_restriction_has_block_determinant() {
        let mut rng = StdRng::seed_from_u64(12);
        let s = random_unitary(2, &mut rng);
        let f = random_frame(6, &mut rng);
        let u = embed_frame(&f, &s).unwrap();
        let fm = f.as_matrix();
        let restricted = fm.adjoint().matmul(u.matrix()).unwrap().matmul(&fm).unwrap();
        let d1 = restricted.determinant().unwrap();
        let d2 = s.matrix().determinant().unwrap();
        assert!((d1 - d2).norm() < 1e-12);
    }

    #[test]
    fn non_orthonormal_frame_rejected() {
        let a = vec![ONE, ZERO, ZERO];
        let b = vec![ONE, ONE, ZERO];
        assert!(matches!(Frame2::new(a, b), Err(Error::InvalidFrame(_))));
    }

    #[test]
    fn tensor_place_examples() {
        let x = sigma_x();
        let p = tensor_place(1, &x, 2).unwrap();
        assert_eq!(p.matrix(), &Pauli::X.matrix().kron(&ComplexMatrix::identity(2)));
        assert_eq!(p.matrix()[(0, 2)], ONE);
        assert_eq!(p.matrix()[(1, 3)], ONE);
        assert_eq!(tensor_place(2, &UnitaryMatrix::identity(2), 3).unwrap().matrix(), &ComplexMatrix::identity(8));
        let mut rng = StdRng::seed_from_u64(5);
        let a = random_unitary(2, &mut rng);
        let b = random_unitary(2, &mut rng);
        let prod = tensor_place(1, &a, 2).unwrap().compose(&tensor_place(2, &b, 2).unwrap()).unwrap();
        let kron = a.matrix().kron(b.matrix());
        assert!(prod.matrix().sub(&kron).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn recognition() {
        assert!(is_two_level(&UnitaryMatrix::identity(4)).is_none());
        let mut rng = StdRng::seed_from_u64(9);
        let v = random_special_unitary(2, &mut rng);
        let u = embed_coordinate(2, 4, &v, 8).unwrap();
        let f = is_two_level(&u).unwrap();
        assert_eq!((f.p, f.q), (2, 4));
        assert!(f.block.matrix().sub(v.matrix()).unwrap().max_abs() < 1e-15);
        // σx ⊗ I acts on the two planes (1,3) and (2,4)
        let sx = tensor_place(1, &sigma_x(), 2).unwrap();
        assert!(is_two_level(&sx).is_none());
    }

    #[test]
    fn isometry_and_homomorphism() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..200 {
            let n = rng.random_range(2..=16);
            let p = rng.random_range(1..n);
            let q = rng.random_range(p + 1..=n);
            let v = random_unitary(2, &mut rng);
            let w = random_unitary(2, &mut rng);
            let ev = embed_coordinate(p, q, &v, n).unwrap();
            let ew = embed_coordinate(p, q, &w, n).unwrap();
            let lhs = operator_norm(&ev.matrix().sub(ew.matrix()).unwrap()).unwrap();
            let rhs = operator_norm(&v.matrix().sub(w.matrix()).unwrap()).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10);
            let vw = v.compose(&w).unwrap();
            let prod = ev.compose(&ew).unwrap();
            let direct = embed_coordinate(p, q, &vw, n).unwrap();
            assert!(prod.matrix().sub(direct.matrix()).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn frame_gauge_covariance() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..50 {
            let f = random_frame(5, &mut rng);
            let r = random_unitary(2, &mut rng);
            let s = random_special_unitary(2, &mut rng);
            let f2 = f.rotated(&r).unwrap();
            let lhs = embed_frame(&f2, &s).unwrap();
            let rsr = r.compose(&s).unwrap().compose(&r.adjoint()).unwrap();
            let rhs = embed_frame(&f, &rsr).unwrap();
            assert!(lhs.matrix().sub(rhs.matrix()).unwrap().max_abs() < 1e-12);
            assert!(f.projector().sub(&f2.projector()).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn generator_norm_preserved_by_frames() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..50 {
            let f = random_frame(7, &mut rng);
            let (a, b, c): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
            let gen = Pauli::X
                .matrix()
                .scale(C64::new(0.0, a))
                .add(&Pauli::Y.matrix().scale(C64::new(0.0, b)))
                .unwrap()
                .add(&Pauli::Z.matrix().scale(C64::new(0.0, c)))
                .unwrap();
            let small = AntiHermitian::new(gen.clone()).unwrap();
            let big = AntiHermitian::new(f.push_forward(&gen).unwrap()).unwrap();
            assert!((hs_norm(&small) - hs_norm(&big)).abs() < 1e-12);
        }
    }
}
