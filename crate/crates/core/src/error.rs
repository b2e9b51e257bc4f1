use thiserror::Error;

/// Errors raised across the factorization, synthesis and compilation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("frame columns are not orthonormal (deviation {0:e})")]
    InvalidFrame(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("element is not special unitary (determinant deviation {0:e})")]
    NotSpecial(f64),
    #[error("unknown gate letter `{0}`")]
    UnknownLetter(String),
    #[error("net would exceed {cap} entries")]
    NetTooLarge { cap: usize },
    #[error("commutator target rotation angle {angle} exceeds the small-step regime")]
    OutOfRegime { angle: f64 },
    #[error("{0}")]
    AccuracyNotReached(AccuracyReport),
    #[error("no faithful SU(2) embeddings exist in U({0})")]
    NoFaithfulStrata(usize),
    #[error("invalid dimension {0}")]
    InvalidDim(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Per-block accounting attached to an unreachable accuracy target.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize)]
pub struct AccuracyReport {
    pub target: f64,
    pub achieved: f64,
    pub blocks: Vec<BlockReport>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BlockReport {
    pub p: usize,
    pub q: usize,
    pub budget: f64,
    pub achieved: f64,
}

impl std::fmt::Display for AccuracyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "accuracy {:e} not reached (achieved {:e})", self.target, self.achieved)?;
        for b in self.blocks.iter().filter(|b| b.achieved > b.budget) {
            write!(
                f,
                "; block ({},{}) achieved {:e} > budget {:e}",
                b.p, b.q, b.achieved, b.budget
            )?;
        }
        Ok(())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
