//! Two-level unitaries on a non-coordinate plane, and their frame gauge.

use rand::SeedableRng;
use twolevel::numeric::operator_norm;
use twolevel::random::{random_frame, random_special_unitary, random_unitary};
use twolevel::two_level::embed_frame;

fn main() -> twolevel::Result<()> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let f = random_frame(5, &mut rng);
    let s = random_special_unitary(2, &mut rng);
    let u = embed_frame(&f, &s)?;
    println!("unitarity deviation {:.2e}", u.matrix().unitarity_deviation());

    // F·R spans the same plane; the image of S moves to R S R†
    let r = random_unitary(2, &mut rng);
    let f2 = f.rotated(&r)?;
    let same_plane = operator_norm(&f.projector().sub(&f2.projector())?)?;
    let conj = r.adjoint().compose(&s)?.compose(&r)?;
    let gap = operator_norm(&u.matrix().sub(embed_frame(&f2, &conj)?.matrix())?)?;
    println!("projector gap {same_plane:.2e}, gauge-transformed image gap {gap:.2e}");
    Ok(())
}
