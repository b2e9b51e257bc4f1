//! Two-level factorization of unitaries, Solovay-Kitaev compilation of the
//! resulting SU(2) blocks, and the stratification of SU(2) embeddings in U(N).

pub mod cli;
pub mod compiler;
pub mod diagonal;
pub mod error;
pub mod givens;
pub mod numeric;
pub mod random;
pub mod sk;
pub mod strata;
pub mod su2;
pub mod two_level;

pub use error::{AccuracyReport, BlockReport, Error, Result};
pub use numeric::{AntiHermitian, ComplexMatrix, UnitaryMatrix, C64};
pub use su2::Su2;
