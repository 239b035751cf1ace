//! Game abstractions: payoffs and per-player partial gradients that can be
//! evaluated at arbitrary estimate vectors, plus the quadratic specialization
//! with its closed-form equilibrium and the built-in example games.

mod builtin;
mod quadratic;

pub use builtin::{
    example1, example1_equilibrium, example1_rejected_point, example2, example2_weighted,
    example3, example3_default, Example1, Example2, Example3Params,
};
pub use quadratic::{QuadraticGame, SINGULARITY_COND_LIMIT};

use nalgebra::DVector;

/// A non-cooperative game over scalar actions.
///
/// Payoffs are twice continuously differentiable and defined on all of R^n,
/// so both methods must accept any finite `z`. In the seeking dynamics `z` is
/// a player's *estimate* of the joint action profile, not the profile itself.
///
/// `grad(i, z)` is the partial derivative of `payoff(i, .)` with respect to
/// player `i`'s own action, evaluated at `z`. Implementations supply it
/// analytically; [`grad_check`] guards against transcription slips.
pub trait Game: Send + Sync {
    fn player_count(&self) -> usize;

    /// f_i evaluated at the joint action (or estimate) vector `z`.
    fn payoff(&self, player: usize, z: &DVector<f64>) -> f64;

    /// d f_i / d x_i evaluated at `z`.
    fn grad(&self, player: usize, z: &DVector<f64>) -> f64;
}

impl<G: Game + ?Sized> Game for &G {
    fn player_count(&self) -> usize {
        (**self).player_count()
    }
    fn payoff(&self, player: usize, z: &DVector<f64>) -> f64 {
        (**self).payoff(player, z)
    }
    fn grad(&self, player: usize, z: &DVector<f64>) -> f64 {
        (**self).grad(player, z)
    }
}

/// Stacked vector of own-action partials, component `i` being
/// `grad(i, x)`. Zero exactly at stationary points of the game.
pub fn pseudogradient(game: &dyn Game, x: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(game.player_count(), |i, _| game.grad(i, x))
}

/// Max over players of the relative disagreement between the analytical
/// gradient and a central difference of the payoff with the given step.
///
/// Relative to `max(1, |grad|)` so near-zero gradients are judged on an
/// absolute scale.
pub fn grad_check(game: &dyn Game, x: &DVector<f64>, step: f64) -> f64 {
    assert!(step > 0.0, "finite-difference step must be positive");
    let n = game.player_count();
    let mut worst = 0.0f64;
    let mut probe = x.clone();
    for i in 0..n {
        let xi = x[i];
        probe[i] = xi + step;
        let plus = game.payoff(i, &probe);
        probe[i] = xi - step;
        let minus = game.payoff(i, &probe);
        probe[i] = xi;
        let fd = (plus - minus) / (2.0 * step);
        let g = game.grad(i, x);
        let err = (g - fd).abs() / g.abs().max(1.0);
        worst = worst.max(err);
    }
    worst
}

/// Pass/fail flags for the stationarity and curvature conditions a Nash
/// candidate is screened against. `None` means the check was not run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssumptionFlags {
    pub stationary: Option<bool>,
    pub own_concave: Option<bool>,
    pub diag_dominant: Option<bool>,
    pub hurwitz: Option<bool>,
}

impl AssumptionFlags {
    /// True when every check that ran passed.
    pub fn all_pass(&self) -> bool {
        [self.stationary, self.own_concave, self.diag_dominant, self.hurwitz]
            .iter()
            .all(|f| f.unwrap_or(true))
    }
}

/// A candidate equilibrium point together with how close it is to
/// stationarity and which screening checks it passed.
#[derive(Debug, Clone)]
pub struct NashCandidate {
    pub x_star: DVector<f64>,
    pub stationarity_residual: f64,
    pub report: AssumptionFlags,
}

impl NashCandidate {
    /// Wraps a candidate point, computing the stationarity residual
    /// `max_i |grad(i, x*)|`.
    pub fn evaluate(game: &dyn Game, x_star: DVector<f64>) -> Self {
        let residual = pseudogradient(game, &x_star).amax();
        Self {
            x_star,
            stationarity_residual: residual,
            report: AssumptionFlags::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector, DMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// f1 = -x1^2 + x1 x2, f2 = -x2^2 + x1 x2.
    pub(crate) fn two_player_derived() -> QuadraticGame {
        let h1 = dmatrix![-2.0, 1.0; 1.0, 0.0];
        let h2 = dmatrix![0.0, 1.0; 1.0, -2.0];
        QuadraticGame::new(vec![h1, h2], DMatrix::zeros(2, 2), dvector![0.0, 0.0]).unwrap()
    }

    #[test]
    fn pseudogradient_example2_vanishes_at_origin() {
        let game = example2();
        let pg = pseudogradient(&game, &DVector::zeros(5));
        assert_eq!(pg, DVector::zeros(5));
    }

    #[test]
    fn pseudogradient_example1_vanishes_at_equilibrium() {
        let game = example1();
        let x = dvector![1.5, 2.25, -19.0 / 48.0, -1.0 / 6.0, 1.0 / 12.0];
        assert!(pseudogradient(&game, &x).amax() <= 1e-12);
    }

    #[test]
    fn pseudogradient_two_player_hand_value() {
        // Hand differentiation: [-2*1 + 1, -2*1 + 1] = [-1, -1].
        let game = two_player_derived();
        let pg = pseudogradient(&game, &dvector![1.0, 1.0]);
        assert_eq!(pg, dvector![-1.0, -1.0]);
    }

    #[test]
    fn grad_check_examples() {
        let e3 = example3_default().unwrap();
        assert!(grad_check(&e3, &dvector![1.0, 2.0, 3.0, 4.0, 5.0], 1e-5) <= 1e-6);

        // Single nonzero own-quadratic term: gradient is linear, so the
        // central difference is exact up to roundoff.
        let mut h1 = DMatrix::zeros(2, 2);
        h1[(0, 0)] = -2.0;
        let mut h2 = DMatrix::zeros(2, 2);
        h2[(1, 1)] = -1.0;
        let qg = QuadraticGame::new(vec![h1, h2], DMatrix::zeros(2, 2), dvector![0.0, 0.0]).unwrap();
        assert!(grad_check(&qg, &dvector![3.7, -1.2], 1e-5) <= 1e-8);

        let e1 = example1();
        assert!(grad_check(&e1, &dvector![1.0, 2.0, 0.0, 0.0, 0.0], 1e-5) <= 1e-5);
    }

    #[test]
    fn grad_check_all_builtins_random_points() {
        let games: Vec<Box<dyn Game>> = vec![
            Box::new(example1()),
            Box::new(example2()),
            Box::new(example3_default().unwrap()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for game in &games {
            for _ in 0..100 {
                let x = DVector::from_fn(game.player_count(), |_, _| rng.random_range(-10.0..10.0));
                let err = grad_check(game.as_ref(), &x, 1e-5);
                assert!(err <= 1e-4, "grad_check error {err}");
            }
        }
    }

    #[test]
    fn nash_candidate_residual_nonnegative() {
        let game = example1();
        let cand = NashCandidate::evaluate(&game, dvector![1.0, 2.0, 0.0, 0.0, 0.0]);
        assert!(cand.stationarity_residual >= 0.0);
        assert!(cand.report.all_pass()); // nothing checked yet
    }
}
