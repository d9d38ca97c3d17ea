use thiserror::Error;

/// Errors raised by the sampled duality engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation produced NaN: {0}")]
    Domain(String),
    #[error("grid has {points} points, above the cap of {cap}")]
    GridCap { points: usize, cap: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("set invariant violated: {0}")]
    InvalidSet(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("function returned -inf; proper functions never do")]
    Improper,
    #[error("no grid point lies in the effective domain")]
    EmptyDomain,
    #[error("unknown coupling `{0}`")]
    UnknownCoupling(String),
    #[error("coupling `{name}` requires parameter `{param}`")]
    MissingParameter { name: String, param: String },
    #[error("no sampled point satisfies the constraints")]
    NoFeasiblePoint,
    #[error("point {0:?} lies outside the feasible set")]
    Infeasible(Vec<f64>),
    #[error("box of inradius {inradius} cannot host a recession rung of radius {rung}")]
    BoxTooSmall { inradius: f64, rung: f64 },
    #[error("{0}")]
    Precondition(String),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
