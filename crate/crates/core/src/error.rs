//! Crate-wide error type.

use thiserror::Error;

/// What blew up inside an integration.
#[derive(Debug, Clone, PartialEq)]
pub enum Divergence {
    /// A payoff gradient evaluated to a non-finite value.
    Gradient { player: usize, value: f64 },
    /// Some state component exceeded the divergence threshold.
    StateMagnitude { max_abs: f64 },
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Divergence::Gradient { player, value } => {
                write!(f, "non-finite gradient {value} for player {player}")
            }
            Divergence::StateMagnitude { max_abs } => {
                write!(f, "state magnitude {max_abs:.3e} exceeded threshold")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("adjacency matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("adjacency must be symmetric: entry ({i},{j}) = {upper} but ({j},{i}) = {lower}")]
    AsymmetricAdjacency {
        i: usize,
        j: usize,
        upper: f64,
        lower: f64,
    },

    #[error("self-loop at node {0}: adjacency diagonal must be zero")]
    SelfLoop(usize),

    #[error("adjacency entries must be 0 or 1, got {value} at ({i},{j})")]
    NonBinaryEntry { i: usize, j: usize, value: f64 },

    #[error("edge ({i},{j}) invalid for a graph on {n} nodes")]
    InvalidEdge { i: usize, j: usize, n: usize },

    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is numerically singular (condition estimate {condition:.3e})")]
    SingularMatrix { condition: f64 },

    #[error("negated matrix is not Hurwitz: eigenvalue real part {max_real_part:.6e} >= 0")]
    NotHurwitz { max_real_part: f64 },

    #[error("integration diverged at t = {t:.6}: {cause}")]
    Diverged { t: f64, cause: Divergence },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("rate fit window contains no samples")]
    EmptyWindow,

    #[error("rate fit requires strictly positive errors; error {value:.3e} at t = {t}")]
    NonpositiveError { t: f64, value: f64 },

    #[error("operation requires a quadratic game")]
    NotQuadratic,
}

pub type Result<T> = std::result::Result<T, Error>;
