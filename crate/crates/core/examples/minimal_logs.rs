//! Minimal logarithms and geodesic energies of a few 2×2 unitaries.

use std::f64::consts::PI;
use twolevel::numeric::{ComplexMatrix, UnitaryMatrix, C64};
use twolevel::su2::{geodesic_energy, minlog_su2, minlog_u2, Su2};

fn main() -> twolevel::Result<()> {
    let minus = Su2::rotation([0.0, 0.0, 1.0], 2.0 * PI);
    let r = minlog_su2(&minus);
    println!("-I in SU(2): norm {:.6}, energy {:.6}, unique {}", r.hs_norm, r.energy(), r.unique);

    let s = UnitaryMatrix::new(ComplexMatrix::from_diag(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0)]))?;
    let r = minlog_u2(&s)?;
    println!("diag(i, 1) in U(2): norm^2 {:.6} (pi^2/8 = {:.6})", r.hs_norm.powi(2), PI * PI / 8.0);

    for angle in [0.5, 1.5, 3.0, 2.0 * PI - 0.1] {
        let v = Su2::rotation([1.0, 1.0, 0.0], angle).to_unitary();
        println!("rotation by {angle:.3}: energy {:.6}", geodesic_energy(&v, true)?);
    }
    Ok(())
}
