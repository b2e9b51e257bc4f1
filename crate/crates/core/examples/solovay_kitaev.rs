//! Word length against accuracy for the default H/T gate set.

use rand::SeedableRng;
use twolevel::random::random_special_unitary;
use twolevel::sk::{build_net, sk_approximate, GateSet, DEFAULT_NET_MAX_LEN, DEFAULT_SK_DEPTH};
use twolevel::Su2;

fn main() -> twolevel::Result<()> {
    let g = GateSet::default_set();
    let net = build_net(&g, DEFAULT_NET_MAX_LEN)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(1);
    println!("net: {} entries, covering radius ~{:.3}", net.len(), net.measured_covering_radius(2000, &mut rng));

    let v = Su2::from_unitary(&random_special_unitary(2, &mut rng))?;
    for eps in [0.2, 0.1, 0.05, 0.02, 0.01, 1e-3] {
        let a = sk_approximate(&v, eps, &net, DEFAULT_SK_DEPTH)?;
        println!("eps {eps:<6} length {:>6}  error {:.3e}", a.word.len(), a.error);
    }
    let a = sk_approximate(&v, 0.1, &net, DEFAULT_SK_DEPTH)?;
    println!("{}", serde_json::to_string(&a.word.to_json(&g)?)?);
    Ok(())
}
