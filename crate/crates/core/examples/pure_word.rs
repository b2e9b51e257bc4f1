//! Absorb the diagonal remainder so that only a global phase is left.

use twolevel::compiler::Compiler;
use twolevel::diagonal::DiagonalUnitary;
use twolevel::sk::{build_net, GateSet, DEFAULT_NET_MAX_LEN};

fn main() -> twolevel::Result<()> {
    let net = build_net(&GateSet::default_set(), DEFAULT_NET_MAX_LEN)?;
    let d = DiagonalUnitary::from_angles([0.9, 0.1, -0.4, 2.0]).to_unitary();
    let r = Compiler::new(&net).compile_pure(&d, 0.05)?;
    let pairs: std::collections::BTreeSet<_> = r.word.iter().map(|l| (l.p, l.q)).collect();
    println!("global phase {:.6}, {} letters on {:?}", r.global_phase, r.word_length, pairs);
    println!("certified {:.3e}, achieved {:.3e}", r.certified_bound, r.achieved_error);
    Ok(())
}
