//! Conjugacy classes of SU(2) embeddings in U(N).

use twolevel::strata::{enumerate_all_strata, strata_table, two_level_stratum_dim};

fn main() -> twolevel::Result<()> {
    for n in [2, 4, 6] {
        println!("N = {n}");
        print!("{}", strata_table(&enumerate_all_strata(n)?));
        if n >= 3 {
            println!("two-level stratum dimension {}", two_level_stratum_dim(n)?);
        }
        println!();
    }
    Ok(())
}
