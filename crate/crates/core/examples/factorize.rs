//! Exact two-level factorization of a random U(4) element.

use rand::SeedableRng;
use twolevel::givens::{factor, reconstruct};
use twolevel::numeric::operator_norm;
use twolevel::random::random_unitary;

fn main() -> twolevel::Result<()> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let u = random_unitary(4, &mut rng);
    let f = factor(&u)?;
    for t in &f.factors {
        println!("({}, {})  det = {:.3}", t.p, t.q, t.block.matrix().determinant()?);
    }
    let diag: Vec<String> = f.diagonal.iter().map(|z| format!("{:.3}", z.arg())).collect();
    println!("diagonal phases: [{}]", diag.join(", "));
    let err = operator_norm(&u.matrix().sub(reconstruct(&f)?.matrix())?)?;
    println!("{} factors, reconstruction error {err:.2e}", f.factors.len());
    Ok(())
}
