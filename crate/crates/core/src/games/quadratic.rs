//! Quadratic games and their closed-form equilibrium.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::games::Game;

/// Condition-number estimate beyond which the interaction matrix is treated
/// as numerically singular.
pub const SINGULARITY_COND_LIMIT: f64 = 1e12;

/// A game whose payoffs are quadratic forms:
/// `f_i(x) = 1/2 sum_jk h[i][(j,k)] x_j x_k + sum_j v[(i,j)] x_j + g[i]`.
///
/// Each per-player coefficient matrix `h[i]` is symmetric with a negative
/// own-action diagonal entry `h[i][(i,i)]`, so every payoff is strictly
/// concave in the player's own action.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticGame {
    n: usize,
    h: Vec<DMatrix<f64>>,
    v: DMatrix<f64>,
    g: DVector<f64>,
}

impl QuadraticGame {
    /// Validates and builds a quadratic game from per-player quadratic
    /// coefficient matrices `h`, linear coefficients `v` (row `i` holds
    /// player `i`'s linear terms), and constants `g`.
    pub fn new(h: Vec<DMatrix<f64>>, v: DMatrix<f64>, g: DVector<f64>) -> Result<Self> {
        let n = h.len();
        if n == 0 {
            return Err(Error::InvalidParams("quadratic game needs at least one player".into()));
        }
        if v.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n * n, got: v.len() });
        }
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.len() });
        }
        for (i, hi) in h.iter().enumerate() {
            if hi.shape() != (n, n) {
                return Err(Error::DimensionMismatch { expected: n * n, got: hi.len() });
            }
            if hi != &hi.transpose() {
                return Err(Error::InvalidParams(format!(
                    "quadratic coefficient matrix for player {i} is not symmetric"
                )));
            }
            if hi[(i, i)] >= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "own-action coefficient h[{i}][({i},{i})] = {} must be negative",
                    hi[(i, i)]
                )));
            }
        }
        Ok(Self { n, h, v, g })
    }

    pub fn h(&self) -> &[DMatrix<f64>] {
        &self.h
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn constants(&self) -> &DVector<f64> {
        &self.g
    }

    /// The interaction matrix `H`: row `i` is player `i`'s own-gradient
    /// coefficient row `h[i].row(i)`. Stationarity reads `H x + v_own = 0`.
    pub fn interaction_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.h[i][(i, j)])
    }

    /// The own-action linear coefficients `[v[(0,0)], ..., v[(n-1,n-1)]]`.
    pub fn own_linear(&self) -> DVector<f64> {
        DVector::from_fn(self.n, |i, _| self.v[(i, i)])
    }

    /// Closed-form Nash equilibrium `x* = -H^{-1} v_own`.
    ///
    /// Fails with [`Error::SingularMatrix`] when the condition estimate of
    /// `H` exceeds [`SINGULARITY_COND_LIMIT`], which signals that the game
    /// has no unique equilibrium to solve for.
    pub fn nash_equilibrium(&self) -> Result<DVector<f64>> {
        let h = self.interaction_matrix();
        let sv = h.clone().svd(false, false).singular_values;
        let s_max = sv.iter().copied().fold(0.0f64, f64::max);
        let s_min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
        if !condition.is_finite() || condition > SINGULARITY_COND_LIMIT {
            return Err(Error::SingularMatrix { condition });
        }
        h.lu()
            .solve(&(-self.own_linear()))
            .ok_or(Error::SingularMatrix { condition })
    }
}

impl Game for QuadraticGame {
    fn player_count(&self) -> usize {
        self.n
    }

    fn payoff(&self, player: usize, z: &DVector<f64>) -> f64 {
        0.5 * (z.transpose() * &self.h[player] * z)[(0, 0)]
            + self.v.row(player).transpose().dot(z)
            + self.g[player]
    }

    fn grad(&self, player: usize, z: &DVector<f64>) -> f64 {
        // Symmetry of h[player] folds both x_i-bearing terms into one row dot.
        self.h[player].row(player).transpose().dot(z) + self.v[(player, player)]
    }
}
