//! The built-in example games.
//!
//! All three are five-player games. Gradients are transcribed by hand from
//! the payoff definitions; `grad_check` in the test suites guards the
//! transcription.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::games::{Game, QuadraticGame};

/// Five-player game mixing a cubic payoff with shifted quadratic losses.
///
/// It has two stationary points; only one of them has negative own-action
/// curvature for every player, so only that one is a seekable equilibrium.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example1;

/// The stationary point of [`Example1`] with negative own curvature:
/// `[3/2, 9/4, -19/48, -1/6, 1/12]`.
pub fn example1_equilibrium() -> DVector<f64> {
    DVector::from_vec(vec![1.5, 2.25, -19.0 / 48.0, -1.0 / 6.0, 1.0 / 12.0])
}

/// The other stationary point of [`Example1`]; player 1's own curvature is
/// positive there, so the curvature screen must reject it.
pub fn example1_rejected_point() -> DVector<f64> {
    DVector::from_vec(vec![-1.0, 1.0, 19.0 / 72.0, 1.0 / 9.0, -1.0 / 18.0])
}

impl Game for Example1 {
    fn player_count(&self) -> usize {
        5
    }

    fn payoff(&self, player: usize, z: &DVector<f64>) -> f64 {
        let (x1, x2, x3, x4, x5) = (z[0], z[1], z[2], z[3], z[4]);
        match player {
            0 => -x1.powi(3) + 3.0 * x1 * x2,
            1 => -(-2.0 * x1 + 4.0 * x2 + 0.5 * x4 + x5).powi(2) + 48.0 * x2,
            2 => -(x1 + 4.0 * x3 - x4 - x5).powi(2),
            3 => -(2.0 * x1 + 4.0 * x3 + 8.0 * x4 - x5).powi(2),
            4 => -(x1 + 4.0 * x3 + 8.0 * x4 + 17.0 * x5).powi(2),
            _ => panic!("player index {player} out of range"),
        }
    }

    fn grad(&self, player: usize, z: &DVector<f64>) -> f64 {
        let (x1, x2, x3, x4, x5) = (z[0], z[1], z[2], z[3], z[4]);
        match player {
            0 => -3.0 * x1 * x1 + 3.0 * x2,
            1 => -8.0 * (-2.0 * x1 + 4.0 * x2 + 0.5 * x4 + x5) + 48.0,
            2 => -8.0 * (x1 + 4.0 * x3 - x4 - x5),
            3 => -16.0 * (2.0 * x1 + 4.0 * x3 + 8.0 * x4 - x5),
            4 => -34.0 * (x1 + 4.0 * x3 + 8.0 * x4 + 17.0 * x5),
            _ => panic!("player index {player} out of range"),
        }
    }
}

pub fn example1() -> Example1 {
    Example1
}

/// Weighted potential game: every payoff is `m_i * f(x) + d_i` for a shared
/// strongly concave potential `f` (quartic in the first action), so the
/// unique equilibrium sits at the potential's maximizer, the origin.
#[derive(Debug, Clone)]
pub struct Example2 {
    weights: DVector<f64>,
    offsets: DVector<f64>,
}

impl Example2 {
    pub fn new(weights: DVector<f64>, offsets: DVector<f64>) -> Result<Self> {
        if weights.len() != 5 || offsets.len() != 5 {
            return Err(Error::DimensionMismatch {
                expected: 5,
                got: if weights.len() != 5 { weights.len() } else { offsets.len() },
            });
        }
        if weights.iter().any(|&m| m <= 0.0) {
            return Err(Error::InvalidParams("payoff weights must be positive".into()));
        }
        Ok(Self { weights, offsets })
    }

    fn potential(z: &DVector<f64>) -> f64 {
        let (x1, x2, x3, x4, x5) = (z[0], z[1], z[2], z[3], z[4]);
        -(x1.powi(4) / 12.0
            + 5.0 * x1 * x1
            + 2.0 * x1 * x2
            + 5.0 * x2 * x2
            + x2 * x3
            + x2 * x5
            + 2.5 * x3 * x3
            + x3 * x4
            + 5.0 * x4 * x4
            + 2.0 * x4 * x5
            + 3.0 * x5 * x5)
    }

    fn potential_grad(player: usize, z: &DVector<f64>) -> f64 {
        let (x1, x2, x3, x4, x5) = (z[0], z[1], z[2], z[3], z[4]);
        match player {
            0 => -(x1.powi(3) / 3.0 + 10.0 * x1 + 2.0 * x2),
            1 => -(2.0 * x1 + 10.0 * x2 + x3 + x5),
            2 => -(x2 + 5.0 * x3 + x4),
            3 => -(x3 + 10.0 * x4 + 2.0 * x5),
            4 => -(x2 + 2.0 * x4 + 6.0 * x5),
            _ => panic!("player index {player} out of range"),
        }
    }
}

impl Game for Example2 {
    fn player_count(&self) -> usize {
        5
    }

    fn payoff(&self, player: usize, z: &DVector<f64>) -> f64 {
        self.weights[player] * Self::potential(z) + self.offsets[player]
    }

    fn grad(&self, player: usize, z: &DVector<f64>) -> f64 {
        self.weights[player] * Self::potential_grad(player, z)
    }
}

/// [`Example2`] with the default weights `m = [1, 5, 2, 3, 2]`, `d = 0`.
pub fn example2() -> Example2 {
    example2_weighted(
        DVector::from_vec(vec![1.0, 5.0, 2.0, 3.0, 2.0]),
        DVector::zeros(5),
    )
    .expect("default parameters are valid")
}

pub fn example2_weighted(weights: DVector<f64>, offsets: DVector<f64>) -> Result<Example2> {
    Example2::new(weights, offsets)
}

/// Parameters of the demand-tracking quadratic game
/// `f_i(x) = -rho_i (x_i - xd_i)^2 - (p0 * sum_j x_j + q0) * x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Example3Params {
    pub rho: Vec<f64>,
    pub p0: f64,
    pub q0: f64,
    pub xd: Vec<f64>,
}

impl Default for Example3Params {
    fn default() -> Self {
        Self {
            rho: vec![1.0; 5],
            p0: 0.1,
            q0: 10.0,
            xd: vec![10.0, 15.0, 20.0, 25.0, 30.0],
        }
    }
}

/// Builds the quadratic demand-tracking game from its parameters.
///
/// Expanding the payoff gives, for player i:
///   own quadratic coefficient  h[i][(i,i)] = -2 (rho_i + p0),
///   cross terms                h[i][(i,j)] = -p0 for j != i,
///   own linear coefficient     v[(i,i)]    = 2 rho_i xd_i - q0,
///   constant                   g_i         = -rho_i xd_i^2.
pub fn example3(params: &Example3Params) -> Result<QuadraticGame> {
    let n = params.rho.len();
    if n == 0 {
        return Err(Error::InvalidParams("rho must be nonempty".into()));
    }
    if params.xd.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: params.xd.len() });
    }
    if params.rho.iter().any(|&r| r <= 0.0) {
        return Err(Error::InvalidParams("every rho_i must be positive".into()));
    }
    if params.p0 <= 0.0 {
        return Err(Error::InvalidParams("p0 must be positive".into()));
    }

    let h = (0..n)
        .map(|i| {
            let mut hi = DMatrix::zeros(n, n);
            for j in 0..n {
                if j == i {
                    hi[(i, i)] = -2.0 * (params.rho[i] + params.p0);
                } else {
                    hi[(i, j)] = -params.p0;
                    hi[(j, i)] = -params.p0;
                }
            }
            hi
        })
        .collect();
    let mut v = DMatrix::zeros(n, n);
    let mut g = DVector::zeros(n);
    for i in 0..n {
        v[(i, i)] = 2.0 * params.rho[i] * params.xd[i] - params.q0;
        g[i] = -params.rho[i] * params.xd[i] * params.xd[i];
    }
    QuadraticGame::new(h, v, g)
}

/// [`example3`] with the default parameters.
pub fn example3_default() -> Result<QuadraticGame> {
    example3(&Example3Params::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::grad_check;
    use nalgebra::dvector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn example1_hand_gradient() {
        // d(-x1^3 + 3 x1 x2)/dx1 at [1,2,...] = -3 + 6 = 3.
        let g = example1();
        assert_eq!(g.grad(0, &dvector![1.0, 2.0, 0.0, 0.0, 0.0]), 3.0);
    }

    #[test]
    fn example2_payoff_zero_at_origin() {
        let g = example2();
        let origin = DVector::zeros(5);
        for i in 0..5 {
            assert_eq!(g.payoff(i, &origin), 0.0);
        }
    }

    #[test]
    fn example3_nash_matches_published_values() {
        let qg = example3_default().unwrap();
        let x = qg.nash_equilibrium().unwrap();
        let expected = dvector![2.0147, 6.7766, 11.5385, 16.3004, 21.0623];
        for i in 0..5 {
            assert!(
                (x[i] - expected[i]).abs() < 0.5e-4,
                "component {i}: {} vs {}",
                x[i],
                expected[i]
            );
        }
    }

    #[test]
    fn example3_gradient_is_the_affine_formula() {
        let params = Example3Params::default();
        let qg = example3(&params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let z = DVector::from_fn(5, |_, _| rng.random_range(-20.0..20.0));
            let total: f64 = z.sum();
            for i in 0..5 {
                let direct = -2.0 * params.rho[i] * (z[i] - params.xd[i])
                    - params.p0 * total
                    - params.p0 * z[i]
                    - params.q0;
                assert!((qg.grad(i, &z) - direct).abs() < 1e-12);
            }
            assert!(grad_check(&qg, &z, 1e-5) < 1e-6);
        }
    }

    #[test]
    fn example3_rejects_bad_parameters() {
        let mut params = Example3Params::default();
        params.p0 = 0.0;
        assert!(matches!(example3(&params), Err(Error::InvalidParams(_))));

        let mut params = Example3Params::default();
        params.rho[2] = -1.0;
        assert!(matches!(example3(&params), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn example2_rejects_bad_parameters() {
        let err = Example2::new(dvector![1.0, -1.0, 1.0, 1.0, 1.0], DVector::zeros(5));
        assert!(matches!(err, Err(Error::InvalidParams(_))));
        let err = Example2::new(DVector::zeros(4), DVector::zeros(5));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn example1_stationary_points_annihilate_pseudogradient() {
        let g = example1();
        for point in [example1_equilibrium(), example1_rejected_point()] {
            assert!(
                crate::games::pseudogradient(&g, &point).amax() <= 1e-12,
                "pseudogradient nonzero at {point:?}"
            );
        }
    }
}
