//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed plumb input, annotated with the 1-based source line.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate vertex id `{0}`")]
    DuplicateId(String),

    #[error("unknown vertex id `{0}`")]
    UnknownId(String),

    #[error("self-loop at `{0}`")]
    SelfLoop(String),

    #[error("parallel edge {0}-{1}")]
    ParallelEdge(String, String),

    #[error("edge {0}-{1} closes a cycle")]
    Cycle(String, String),

    #[error("intersection form is not negative definite")]
    NotNegativeDefinite,

    #[error("intersection form is singular")]
    SingularForm,

    #[error("vector is not characteristic for this form")]
    NotCharacteristic,

    #[error("vectors do not lie in a common characteristic coset")]
    NotSameCharCoset,

    #[error("not a Wu set: {0}")]
    NotWuSet(String),

    #[error("cannot blow down `{id}`: weight -1 vertex of degree {degree}")]
    BlowDownObstructed { id: String, degree: usize },

    #[error("framing reduction refused: {0}")]
    FramingPrecondition(String),

    #[error("graph is not rational; pass the uncertified override to force a formula value")]
    NotRational,

    #[error("iteration cap of {cap} steps exceeded (internal guard, not a verdict)")]
    IterationCap { cap: u64 },

    #[error("no full path found in class (internal error)")]
    NoFullPath,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
