use thiserror::Error;

/// Errors surfaced by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable {0} is used by the polynomial but has no assigned value")]
    MissingAssignment(String),
    #[error("angle index {0} appears both as a sine and as a cosine factor")]
    Overlap(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("scale limit exceeded: {0}")]
    Scale(String),
    #[error("sin(alpha_{slot}) vanishes; use the polynomial closed form at this point")]
    SingularAngle { slot: usize },
    #[error("unknown closed-form id `{0}`")]
    UnknownId(String),
    #[error("convergence budget exhausted: {0}")]
    Convergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
