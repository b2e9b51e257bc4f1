//! A diagonal unitary as a global phase times commuting γ₁ⱼ rotations.

use twolevel::diagonal::{phase_split, synth_full_diagonal, DiagonalUnitary};

fn main() -> twolevel::Result<()> {
    let d = DiagonalUnitary::from_angles([0.3, -1.2, 2.5, 0.0, 1.0]);
    let (theta, d0) = phase_split(&d);
    println!("theta = {theta:.6}, D0 angles = {:?}", d0.angles());
    let program = synth_full_diagonal(&d)?;
    println!("{}", serde_json::to_string_pretty(&program)?);
    let back = program.evaluate_angles(d.dim())?;
    let gap = back.iter().zip(d.angles()).map(|(a, b)| twolevel::numeric::wrap_angle(a - b).abs()).fold(0.0, f64::max);
    println!("max phase error {gap:.2e}");
    Ok(())
}
