//! Distributed Nash equilibrium seeking over an undirected communication
//! graph.
//!
//! Players adjust their own actions by gradient play on their payoffs, but
//! evaluate the gradients at locally maintained *estimates* of everyone's
//! actions; the estimates are synchronized by a leader-following consensus
//! protocol in which each player acts as the reference for its own action.
//! With the action dynamics slowed by a small time-scale factor, the coupled
//! system converges to the Nash equilibrium under checkable conditions.
//!
//! The crate is organized around that story:
//!
//! - [`graph`]: communication graphs, Laplacians, and the estimation system
//!   matrix with its connectivity/stability checks.
//! - [`games`]: the [`games::Game`] contract (payoffs plus analytical own
//!   gradients), quadratic games with their closed-form equilibrium, and the
//!   built-in example games.
//! - [`dynamics`]: the coupled seeking dynamics with a deterministic
//!   fixed-step integrator and trajectory recording.
//! - [`analysis`]: assumption checkers, sampled strong-monotonicity
//!   certificates, Lyapunov-equation machinery, and convergence-rate fits.
//!
//! Everything that stacks the n^2 per-player estimates into one vector uses
//! player-major order: index `i * n + j` is player `i`'s estimate of player
//! `j`'s action.
//!
//! All types are immutable values once built; every operation here is a pure
//! function of its inputs and safe to call from multiple threads.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod games;
pub mod graph;

pub use analysis::{
    check_assumption3, estimate_monotonicity, fit_exponential_rate, fit_rate_in_window,
    is_hurwitz, is_strictly_diag_dominant, numeric_b, solve_lyapunov, AssumptionReport,
    DomainBox, LyapunovMonitor, LyapunovTrace, MonotonicityEstimate, RateFit,
};
pub use dynamics::{integrate, rhs, SeekerParams, SeekerState, Trajectory};
pub use error::{Divergence, Error, Result};
pub use games::{grad_check, pseudogradient, Game, NashCandidate, QuadraticGame};
pub use graph::CommGraph;
