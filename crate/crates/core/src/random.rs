//! Haar-distributed samplers used by the examples, tests and acceptance suite.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::numeric::{ComplexMatrix, UnitaryMatrix, C64, ZERO};
use crate::two_level::Frame2;

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Orthonormalizes the columns of an `n × k` Ginibre sample (modified Gram-Schmidt,
/// applied twice). The implied R factor has positive diagonal, so the columns are
/// Haar-distributed on the Stiefel manifold.
fn haar_columns(n: usize, k: usize, rng: &mut impl Rng) -> Vec<Vec<C64>> {
    let mut cols: Vec<Vec<C64>> = (0..k).map(|_| (0..n).map(|_| gaussian(rng)).collect()).collect();
    for j in 0..k {
        for _pass in 0..2 {
            for i in 0..j {
                let proj: C64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let (head, tail) = cols.split_at_mut(j);
                for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                    *x -= proj * y;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    cols
}

/// Haar-random element of U(n).
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> UnitaryMatrix {
    let cols = haar_columns(n, n, rng);
    let mut m = ComplexMatrix::zeros(n, n);
    for (c, col) in cols.iter().enumerate() {
        for (r, &z) in col.iter().enumerate() {
            m[(r, c)] = z;
        }
    }
    UnitaryMatrix::new(m).expect("Gram-Schmidt output is unitary")
}

/// Haar-random element of SU(n): a Haar unitary with its determinant phase removed.
pub fn random_special_unitary(n: usize, rng: &mut impl Rng) -> UnitaryMatrix {
    let u = random_unitary(n, rng);
    let det = u.matrix().determinant().expect("square");
    let phase = C64::from_polar(1.0, -det.arg() / n as f64);
    UnitaryMatrix::new(u.matrix().scale(phase)).expect("unitary")
}

/// Random diagonal unitary with independent uniform phases.
pub fn random_diagonal(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..n)
        .map(|_| C64::from_polar(1.0, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect()
}

/// Haar-random orthonormal 2-frame in C^n.
pub fn random_frame(n: usize, rng: &mut impl Rng) -> Frame2 {
    let cols = haar_columns(n, 2, rng);
    let mut it = cols.into_iter();
    let a = it.next().unwrap_or_else(|| vec![ZERO; n]);
    let b = it.next().unwrap_or_else(|| vec![ZERO; n]);
    Frame2::new(a, b).expect("orthonormal by construction")
}
