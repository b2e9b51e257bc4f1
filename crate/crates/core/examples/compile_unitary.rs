//! Compile a random U(N) into embedded gate-set letters plus a diagonal.

use rand::SeedableRng;
use twolevel::compiler::{verify, Compiler};
use twolevel::random::random_unitary;
use twolevel::sk::{build_net, GateSet, DEFAULT_NET_MAX_LEN};

fn main() -> twolevel::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let net = build_net(&GateSet::default_set(), DEFAULT_NET_MAX_LEN)?;
    let compiler = Compiler::new(&net);
    let u = random_unitary(n, &mut rand::rngs::StdRng::seed_from_u64(11));
    for eps in [0.2, 0.1, 0.01] {
        let r = compiler.compile(&u, eps)?;
        println!(
            "N={n} eps={eps}: K={} length={} certified={:.3e} achieved={:.3e}",
            r.block_count, r.word_length, r.certified_bound, r.achieved_error
        );
        assert!(verify(&u, &r, net.gate_set())? <= eps);
    }
    Ok(())
}
