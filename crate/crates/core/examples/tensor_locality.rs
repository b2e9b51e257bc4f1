//! Single-qubit placements on two qubits never leave the product set.

use rand::SeedableRng;
use twolevel::numeric::{operator_norm, ComplexMatrix, C64};
use twolevel::random::random_unitary;
use twolevel::two_level::tensor_place;

fn main() -> twolevel::Result<()> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(9);
    let (z, o) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let cnot = ComplexMatrix::new(4, 4, vec![o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z])?;
    let mut closest = f64::INFINITY;
    for _ in 0..5000 {
        let a = random_unitary(2, &mut rng);
        let b = random_unitary(2, &mut rng);
        let prod = tensor_place(1, &a, 2)?.compose(&tensor_place(2, &b, 2)?)?;
        closest = closest.min(operator_norm(&cnot.sub(prod.matrix())?)?);
    }
    println!("closest product unitary to CNOT over 5000 samples: {closest:.4}");
    Ok(())
}
