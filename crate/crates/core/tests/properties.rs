use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twolevel::diagonal::{gamma_1j, synth_full_diagonal, DiagonalUnitary};
use twolevel::givens::{factor, reconstruct};
use twolevel::numeric::{hs_inner, mat_exp, mat_log_principal, operator_norm, AntiHermitian, ComplexMatrix, UnitaryMatrix, C64};
use twolevel::random::{random_diagonal, random_frame, random_special_unitary, random_unitary};
use twolevel::su2::{minlog_su2, split_phase_u2, Su2};
use twolevel::two_level::{embed_coordinate, embed_frame};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    operator_norm(&a.sub(b).unwrap()).unwrap()
}

fn random_matrix(n: usize, r: &mut ChaCha8Rng) -> ComplexMatrix {
    use rand::Rng;
    let data = (0..n * n).map(|_| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
    ComplexMatrix::new(n, n, data).unwrap()
}

fn random_anti_hermitian(n: usize, r: &mut ChaCha8Rng) -> AntiHermitian {
    let a = random_matrix(n, r);
    AntiHermitian::new(a.sub(&a.adjoint()).unwrap().scale(C64::new(0.5, 0.0))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_norm_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let a = random_matrix(n, &mut r);
        let u = random_unitary(n, &mut r);
        let v = random_unitary(n, &mut r);
        let uav = u.matrix().matmul(&a).unwrap().matmul(v.matrix()).unwrap();
        prop_assert!((operator_norm(&uav).unwrap() - operator_norm(&a).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn operator_norm_is_submultiplicative(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let a = random_matrix(n, &mut r);
        let b = random_matrix(n, &mut r);
        let ab = operator_norm(&a.matmul(&b).unwrap()).unwrap();
        prop_assert!(ab <= operator_norm(&a).unwrap() * operator_norm(&b).unwrap() + 1e-10);
    }

    #[test]
    fn exp_log_round_trip(seed in any::<u64>(), n in 1usize..=16) {
        let u = random_unitary(n, &mut rng(seed));
        let back = mat_exp(&mat_log_principal(&u).unwrap());
        prop_assert!(dist(back.matrix(), u.matrix()) <= 1e-9);
    }

    #[test]
    fn hs_inner_is_ad_invariant(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let x = random_anti_hermitian(n, &mut r);
        let y = random_anti_hermitian(n, &mut r);
        let w = random_unitary(n, &mut r);
        let ad = |z: &AntiHermitian| {
            let m = w.matrix().matmul(z.matrix()).unwrap().matmul(&w.matrix().adjoint()).unwrap();
            AntiHermitian::new(m).unwrap()
        };
        let lhs = hs_inner(&ad(&x), &ad(&y)).unwrap();
        prop_assert!((lhs - hs_inner(&x, &y).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn embedding_is_a_homomorphism(seed in any::<u64>(), n in 2usize..=16, pick in any::<(u16, u16)>()) {
        let mut r = rng(seed);
        let p = 1 + pick.0 as usize % (n - 1);
        let q = p + 1 + pick.1 as usize % (n - p);
        let v = random_unitary(2, &mut r);
        let w = random_unitary(2, &mut r);
        let lhs = embed_coordinate(p, q, &v.compose(&w).unwrap(), n).unwrap();
        let rhs = embed_coordinate(p, q, &v, n).unwrap().compose(&embed_coordinate(p, q, &w, n).unwrap()).unwrap();
        prop_assert!(lhs.matrix().sub(rhs.matrix()).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn frame_gauge_covariance(seed in any::<u64>(), n in 2usize..=10) {
        let mut r = rng(seed);
        let f = random_frame(n, &mut r);
        let g = random_unitary(2, &mut r);
        let s = random_special_unitary(2, &mut r);
        let lhs = embed_frame(&f.rotated(&g).unwrap(), &s).unwrap();
        let conj = g.compose(&s).unwrap().compose(&g.adjoint()).unwrap();
        let rhs = embed_frame(&f, &conj).unwrap();
        prop_assert!(lhs.matrix().sub(rhs.matrix()).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn pushed_generators_keep_hs_norm(seed in any::<u64>(), n in 2usize..=12) {
        let mut r = rng(seed);
        let f = random_frame(n, &mut r);
        let a = minlog_su2(&Su2::from_unitary(&random_special_unitary(2, &mut r)).unwrap()).generator;
        let big = AntiHermitian::new(f.push_forward(a.matrix()).unwrap()).unwrap();
        prop_assert!((twolevel::numeric::hs_norm(&big) - twolevel::numeric::hs_norm(&a)).abs() <= 1e-12);
    }

    #[test]
    fn factorization_bounds_and_determinant(seed in any::<u64>(), n in 1usize..=12) {
        let u = random_unitary(n, &mut rng(seed));
        let f = factor(&u).unwrap();
        prop_assert!(f.factors.len() <= n * (n - 1) / 2);
        prop_assert!(dist(reconstruct(&f).unwrap().matrix(), u.matrix()) <= 1e-10 * n as f64);
        let mut det: C64 = f.diagonal.iter().product();
        for t in &f.factors {
            det *= t.block.matrix().determinant().unwrap();
        }
        prop_assert!((det - u.matrix().determinant().unwrap()).norm() <= 1e-9);
    }

    #[test]
    fn special_input_leaves_special_diagonal(seed in any::<u64>(), n in 2usize..=12) {
        let u = random_special_unitary(n, &mut rng(seed));
        let f = factor(&u).unwrap();
        let prod: C64 = f.diagonal.iter().product();
        prop_assert!((prod - C64::new(1.0, 0.0)).norm() <= 1e-9);
    }

    #[test]
    fn gamma_is_one_parameter_subgroup(s in -10.0f64..10.0, t in -10.0f64..10.0, n in 2usize..=8, j in 2usize..=8) {
        prop_assume!(j <= n);
        let lhs = gamma_1j(j, s, n).unwrap().compose(&gamma_1j(j, t, n).unwrap()).unwrap();
        let rhs = gamma_1j(j, s + t, n).unwrap();
        prop_assert!(lhs.matrix().sub(rhs.matrix()).unwrap().max_abs() <= 1e-12);
        prop_assert!((gamma_1j(j, t, n).unwrap().matrix().determinant().unwrap() - C64::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn diagonal_program_reproduces_input(seed in any::<u64>(), n in 1usize..=16) {
        let d = DiagonalUnitary::from_entries(&random_diagonal(n, &mut rng(seed)));
        let p = synth_full_diagonal(&d).unwrap();
        prop_assert!(dist(p.evaluate(n).unwrap().matrix(), d.to_unitary().matrix()) <= 1e-10);
        // order of the commuting rotations is irrelevant
        let mut rev = p.clone();
        rev.rotations.reverse();
        prop_assert!(rev.evaluate(n).unwrap().matrix().sub(p.evaluate(n).unwrap().matrix()).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn su2_minlog_properties(seed in any::<u64>()) {
        let u = random_special_unitary(2, &mut rng(seed));
        let r = minlog_su2(&Su2::from_unitary(&u).unwrap());
        let x = r.generator.matrix();
        prop_assert!(x.trace().norm() <= 1e-12);
        prop_assert!(x.add(&x.adjoint()).unwrap().max_abs() <= 1e-12);
        prop_assert!(dist(mat_exp(&r.generator).matrix(), u.matrix()) <= 1e-10);
        let alpha = (u.matrix().trace().re / 2.0).clamp(-1.0, 1.0).acos();
        prop_assert!((r.hs_norm - alpha).abs() <= 1e-9);
    }

    #[test]
    fn phase_split_reassembles(seed in any::<u64>()) {
        let v = random_unitary(2, &mut rng(seed));
        let (theta, s) = split_phase_u2(&v).unwrap();
        let back = s.to_matrix().scale(C64::from_polar(1.0, theta));
        prop_assert!(back.sub(v.matrix()).unwrap().max_abs() <= 1e-14);
    }
}

#[test]
fn identity_matrix_is_fixed_by_everything() {
    let u = UnitaryMatrix::identity(5);
    assert!(factor(&u).unwrap().factors.is_empty());
    assert!(mat_log_principal(&u).unwrap().matrix().max_abs() == 0.0);
}
