//! Numerical checkers for the conditions the convergence results lean on:
//! stationarity and own-action concavity of the candidate point, diagonal
//! dominance and Hurwitz-ness of the interaction matrix, and sampled strong
//! monotonicity of the pseudogradient. Also hosts the Lyapunov-equation
//! machinery and the empirical convergence-rate fit.

mod lyapunov;
mod rate;

pub use lyapunov::{
    solve_lyapunov, LyapunovMonitor, LyapunovSample, LyapunovTrace, DEFAULT_BURN_IN_FRACTION,
};
pub use rate::{fit_exponential_rate, fit_rate_in_window, RateFit, DEFAULT_FIT_WINDOW};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::games::{pseudogradient, Game};

/// Default central-difference step for second derivatives: a balance of
/// truncation against roundoff at desk scale.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Matrix of second partials `B[(i,j)] = d^2 f_i / (dx_i dx_j)` at `x`,
/// formed by central differences of the analytical gradients.
pub fn numeric_b(game: &dyn Game, x: &DVector<f64>, step: f64) -> DMatrix<f64> {
    assert!(step > 0.0, "finite-difference step must be positive");
    let n = game.player_count();
    let mut probe = x.clone();
    DMatrix::from_fn(n, n, |i, j| {
        let xj = x[j];
        probe[j] = xj + step;
        let plus = game.grad(i, &probe);
        probe[j] = xj - step;
        let minus = game.grad(i, &probe);
        probe[j] = xj;
        (plus - minus) / (2.0 * step)
    })
}

/// Screens a candidate point: is the pseudogradient zero (to `tol`, in the
/// max norm) and is every own-action second derivative strictly below `-tol`?
pub fn check_assumption3(game: &dyn Game, x_star: &DVector<f64>, tol: f64) -> (bool, bool) {
    assert!(tol > 0.0, "tolerance must be positive");
    let stationary = pseudogradient(game, x_star).amax() <= tol;
    let b = numeric_b(game, x_star, DEFAULT_FD_STEP);
    let own_concave = (0..game.player_count()).all(|i| b[(i, i)] < -tol);
    (stationary, own_concave)
}

/// Strict row diagonal dominance: `|m_ii| > sum_{j != i} |m_ij|` for every
/// row. Equality fails.
pub fn is_strictly_diag_dominant(m: &DMatrix<f64>) -> bool {
    assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
    (0..m.nrows()).all(|i| {
        let off: f64 = (0..m.ncols()).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
        m[(i, i)].abs() > off
    })
}

/// Largest real part over the eigenvalues of `m`.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Whether all eigenvalues of `m` have real part below `-margin`.
pub fn is_hurwitz(m: &DMatrix<f64>, margin: f64) -> bool {
    assert!(margin >= 0.0, "margin must be nonnegative");
    spectral_abscissa(m) < -margin
}

/// Everything the screening checks produce for one candidate point.
#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub stationary: bool,
    pub stationarity_residual: f64,
    pub own_hessian_negative: bool,
    /// The diagonal second derivatives `d^2 f_i / dx_i^2`.
    pub own_second_derivatives: DVector<f64>,
    pub b_matrix: DMatrix<f64>,
    pub b_diag_dominant: bool,
    pub b_hurwitz: bool,
    pub b_max_real_part: f64,
}

impl AssumptionReport {
    /// Runs the full battery at `x_star` with finite-difference step `step`
    /// and pass/fail tolerance `tol`.
    pub fn evaluate(game: &dyn Game, x_star: &DVector<f64>, step: f64, tol: f64) -> Self {
        let residual = pseudogradient(game, x_star).amax();
        let b = numeric_b(game, x_star, step);
        let own = DVector::from_fn(game.player_count(), |i, _| b[(i, i)]);
        let abscissa = spectral_abscissa(&b);
        Self {
            stationary: residual <= tol,
            stationarity_residual: residual,
            own_hessian_negative: own.iter().all(|&d| d < -tol),
            own_second_derivatives: own,
            b_diag_dominant: is_strictly_diag_dominant(&b),
            b_hurwitz: abscissa < 0.0,
            b_max_real_part: abscissa,
            b_matrix: b,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.stationary && self.own_hessian_negative && self.b_diag_dominant && self.b_hurwitz
    }
}

/// An axis-aligned box with nonempty interior, used as the sampling domain
/// for the monotonicity check.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    lo: DVector<f64>,
    hi: DVector<f64>,
}

impl DomainBox {
    pub fn new(lo: DVector<f64>, hi: DVector<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.is_empty() {
            return Err(Error::InvalidParams("domain box must have at least one dimension".into()));
        }
        if lo.iter().zip(hi.iter()).any(|(&a, &b)| !(a < b)) {
            return Err(Error::InvalidParams("domain box must satisfy lo < hi componentwise".into()));
        }
        Ok(Self { lo, hi })
    }

    /// The cube `[-half_width, half_width]^n`.
    pub fn symmetric(n: usize, half_width: f64) -> Result<Self> {
        Self::new(
            DVector::from_element(n, -half_width),
            DVector::from_element(n, half_width),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn sample(&self, rng: &mut impl Rng) -> DVector<f64> {
        DVector::from_fn(self.dim(), |i, _| rng.random_range(self.lo[i]..self.hi[i]))
    }
}

/// A sampled certificate for strong monotonicity of the negated
/// pseudogradient over a box: the largest modulus `m_hat` consistent with
/// every sampled pair, i.e.
/// `(x - z)^T (G(x) - G(z)) <= -m_hat ||x - z||^2` held on all samples.
#[derive(Debug, Clone)]
pub struct MonotonicityEstimate {
    pub m_hat: f64,
    pub violated: bool,
    /// The pair attaining `m_hat`.
    pub worst_pair: (DVector<f64>, DVector<f64>),
    pub n_samples: usize,
    pub seed: u64,
}

/// Draws `n_samples` point pairs uniformly from `domain` with a seeded
/// deterministic generator and reports the worst-case monotonicity modulus
/// `m_hat = min over pairs of -(x-z)^T (G(x)-G(z)) / ||x-z||^2`.
///
/// `violated` is set when `m_hat <= 0`, meaning some sampled pair is
/// incompatible with strong monotonicity. A passing report is a certificate
/// over the samples only, not a proof over the box.
pub fn estimate_monotonicity(
    game: &dyn Game,
    domain: &DomainBox,
    n_samples: usize,
    seed: u64,
) -> MonotonicityEstimate {
    assert!(n_samples >= 2, "need at least two sample pairs");
    assert_eq!(domain.dim(), game.player_count(), "box dimension must match player count");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m_hat = f64::INFINITY;
    let mut worst = None;
    for _ in 0..n_samples {
        let x = domain.sample(&mut rng);
        let z = domain.sample(&mut rng);
        let diff = &x - &z;
        let dist2 = diff.norm_squared();
        if dist2 == 0.0 {
            continue;
        }
        let dg = pseudogradient(game, &x) - pseudogradient(game, &z);
        let ratio = -diff.dot(&dg) / dist2;
        if ratio < m_hat {
            m_hat = ratio;
            worst = Some((x, z));
        }
    }
    let worst_pair = worst.expect("at least one pair with distinct points");
    MonotonicityEstimate {
        m_hat,
        violated: m_hat <= 0.0,
        worst_pair,
        n_samples,
        seed,
    }
}
