//! The seeking dynamics: gradient play on each player's own action driven by
//! that player's estimate vector, coupled with leader-following estimation
//! dynamics that pull every estimate toward its neighbors' estimates and,
//! where an edge exists, toward the true action.
//!
//! A classical fixed-step 4th-order integrator drives the coupled system.
//! Fixed stepping keeps runs bit-for-bit reproducible; the step must resolve
//! the fast estimation subsystem (dt well below the reciprocal of the largest
//! estimation-matrix eigenvalue), which the defaults do at desk scale.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};

use crate::error::{Divergence, Error, Result};
use crate::games::Game;
use crate::graph::CommGraph;

/// Any state component beyond this magnitude aborts the integration; it
/// separates "time-scale parameter too large" from quiet garbage.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Parameters of a seeking run.
///
/// `delta` is the time-scale separation: action dynamics move at
/// `delta * kbar[i]` relative to the estimation dynamics. `gains[(i,j)]` is
/// the per-estimate rate multiplier (all ones recovers the plain protocol).
#[derive(Debug, Clone, PartialEq)]
pub struct SeekerParams {
    pub delta: f64,
    pub kbar: DVector<f64>,
    pub gains: DMatrix<f64>,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
}

impl SeekerParams {
    /// Defaults for an `n`-player run: `delta = 0.05`, unit `kbar` and
    /// gains, `dt = 1e-3`, horizon 100, one recorded sample per 10 steps.
    pub fn defaults(n: usize) -> Self {
        Self {
            delta: 0.05,
            kbar: DVector::from_element(n, 1.0),
            gains: DMatrix::from_element(n, n, 1.0),
            dt: 1e-3,
            t_end: 100.0,
            record_every: 10,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.delta <= 0.0 {
            return Err(Error::InvalidParams(format!("delta = {} must be positive", self.delta)));
        }
        if self.kbar.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.kbar.len() });
        }
        if self.kbar.iter().any(|&k| k <= 0.0) {
            return Err(Error::InvalidParams("every kbar_i must be positive".into()));
        }
        if self.gains.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n * n, got: self.gains.len() });
        }
        if self.gains.iter().any(|&m| m <= 0.0) {
            return Err(Error::InvalidParams("every gain m_ij must be positive".into()));
        }
        if self.dt <= 0.0 {
            return Err(Error::InvalidParams(format!("dt = {} must be positive", self.dt)));
        }
        if self.t_end < self.dt {
            return Err(Error::InvalidParams(format!(
                "t_end = {} must be at least dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParams("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// Actions plus the full estimate matrix: row `i` of `estimates` is player
/// `i`'s estimate of everyone's action (entry `(i, j)` estimates player `j`).
#[derive(Debug, Clone, PartialEq)]
pub struct SeekerState {
    pub x: DVector<f64>,
    pub estimates: DMatrix<f64>,
}

impl SeekerState {
    pub fn new(x: DVector<f64>, estimates: DMatrix<f64>) -> Result<Self> {
        let n = x.len();
        if estimates.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n * n, got: estimates.len() });
        }
        Ok(Self { x, estimates })
    }

    /// The consensus configuration: every player's estimate row equals `x`.
    pub fn consensus(x: DVector<f64>) -> Self {
        let n = x.len();
        let estimates = DMatrix::from_fn(n, n, |_, j| x[j]);
        Self { x, estimates }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Estimates flattened player-major into a length-n^2 vector: index
    /// `i * n + j` holds player `i`'s estimate of player `j`.
    pub fn stacked_estimates(&self) -> DVector<f64> {
        let n = self.n();
        DVector::from_fn(n * n, |k, _| self.estimates[(k / n, k % n)])
    }

    /// Worst disagreement between any estimate and the true action it
    /// estimates: `max_{i,j} |estimates[(i,j)] - x[j]|`.
    pub fn consensus_residual(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.estimates[(i, j)] - self.x[j]).abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|v| v.is_finite()) && self.estimates.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        let xa = self.x.amax();
        let ya = self.estimates.amax();
        xa.max(ya)
    }
}

/// Time derivative of the coupled state.
#[derive(Debug, Clone, PartialEq)]
pub struct SeekerDerivative {
    pub dx: DVector<f64>,
    pub destimates: DMatrix<f64>,
}

/// Right-hand side of the coupled dynamics:
///
/// ```text
/// dx_i/dt   = delta * kbar_i * grad_i(y_i)
/// dy_ij/dt  = -m_ij * ( sum_k a_ik (y_ij - y_kj) + a_ij (y_ij - x_j) )
/// ```
///
/// A non-finite gradient reports [`Error::Diverged`] (with an unset time;
/// [`integrate`] stamps the actual time).
pub fn rhs(
    game: &dyn Game,
    graph: &CommGraph,
    params: &SeekerParams,
    state: &SeekerState,
) -> Result<SeekerDerivative> {
    let n = state.n();
    if game.player_count() != n || graph.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: game.player_count() });
    }
    let adj = graph.adjacency();

    let mut dx = DVector::zeros(n);
    for i in 0..n {
        let row = state.estimates.row(i).transpose();
        let g = game.grad(i, &row);
        if !g.is_finite() {
            return Err(Error::Diverged {
                t: f64::NAN,
                cause: Divergence::Gradient { player: i, value: g },
            });
        }
        dx[i] = params.delta * params.kbar[i] * g;
    }

    let y = &state.estimates;
    let mut dy = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut pull = 0.0;
            for k in 0..n {
                pull += adj[(i, k)] * (y[(i, j)] - y[(k, j)]);
            }
            pull += adj[(i, j)] * (y[(i, j)] - state.x[j]);
            dy[(i, j)] = -params.gains[(i, j)] * pull;
        }
    }

    Ok(SeekerDerivative { dx, destimates: dy })
}

/// A time-indexed record of the run, decimated to every `record_every`-th
/// integrator step. Sample times are a uniform grid and always include the
/// final state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SeekerState>,
    /// Euclidean distance from the reference equilibrium, when one is known.
    pub action_error: Option<Vec<f64>>,
    pub consensus_residual: Vec<f64>,
    /// Recorded so callers can surface a warning: the convergence theory
    /// needs a connected graph, but disconnected runs are allowed in order
    /// to observe the failure mode.
    pub graph_connected: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &SeekerState {
        self.states.last().expect("trajectory has at least the initial sample")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial sample")
    }

    /// Writes the run as CSV: `t,x_1..x_n,err,consensus_residual` plus the
    /// n^2 player-major estimate columns when `include_estimates` is set.
    /// Floats carry 17 significant digits, enough to round-trip doubles; the
    /// error column is NaN when no reference equilibrium was supplied.
    pub fn write_csv(&self, out: &mut dyn Write, include_estimates: bool) -> io::Result<()> {
        let n = self.states.first().map_or(0, SeekerState::n);
        write!(out, "t")?;
        for i in 1..=n {
            write!(out, ",x_{i}")?;
        }
        write!(out, ",err,consensus_residual")?;
        if include_estimates {
            for i in 1..=n {
                for j in 1..=n {
                    write!(out, ",y_{i}{j}")?;
                }
            }
        }
        writeln!(out)?;

        for (k, state) in self.states.iter().enumerate() {
            write!(out, "{:.16e}", self.times[k])?;
            for i in 0..n {
                write!(out, ",{:.16e}", state.x[i])?;
            }
            let err = self.action_error.as_ref().map_or(f64::NAN, |e| e[k]);
            write!(out, ",{:.16e},{:.16e}", err, self.consensus_residual[k])?;
            if include_estimates {
                for i in 0..n {
                    for j in 0..n {
                        write!(out, ",{:.16e}", state.estimates[(i, j)])?;
                    }
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn step_state(state: &SeekerState, deriv: &SeekerDerivative, scale: f64) -> SeekerState {
    SeekerState {
        x: &state.x + &deriv.dx * scale,
        estimates: &state.estimates + &deriv.destimates * scale,
    }
}

/// Integrates the coupled dynamics from `(x0, y0)` over `[0, t_end]` with the
/// classical 4th-order scheme.
///
/// `y0 = None` starts every estimate row at `x0` (each player initially
/// assumes everyone plays the profile it sees at start). When the reference
/// equilibrium `x_star` is supplied, the per-sample action error is recorded.
///
/// The step count is rounded up so the horizon is a whole number of recording
/// strides; the effective horizon is therefore `>= t_end` by less than one
/// stride. Identical inputs produce bit-identical trajectories.
pub fn integrate(
    game: &dyn Game,
    graph: &CommGraph,
    params: &SeekerParams,
    x0: &DVector<f64>,
    y0: Option<&DMatrix<f64>>,
    x_star: Option<&DVector<f64>>,
) -> Result<Trajectory> {
    let n = graph.n();
    params.validate(n)?;
    if game.player_count() != n {
        return Err(Error::DimensionMismatch { expected: n, got: game.player_count() });
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    if let Some(xs) = x_star {
        if xs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: xs.len() });
        }
    }

    let mut state = match y0 {
        Some(y) => SeekerState::new(x0.clone(), y.clone())?,
        None => SeekerState::consensus(x0.clone()),
    };

    let raw_steps = (params.t_end / params.dt).ceil() as usize;
    let steps = raw_steps.div_ceil(params.record_every) * params.record_every;

    let n_samples = steps / params.record_every + 1;
    let mut times = Vec::with_capacity(n_samples);
    let mut states = Vec::with_capacity(n_samples);
    let mut errors = x_star.map(|_| Vec::with_capacity(n_samples));
    let mut residuals = Vec::with_capacity(n_samples);

    let mut record = |t: f64, s: &SeekerState| {
        times.push(t);
        residuals.push(s.consensus_residual());
        if let (Some(errs), Some(xs)) = (errors.as_mut(), x_star) {
            errs.push((&s.x - xs).norm());
        }
        states.push(s.clone());
    };

    record(0.0, &state);

    let dt = params.dt;
    let stamp = |t: f64, e: Error| match e {
        Error::Diverged { cause, .. } => Error::Diverged { t, cause },
        other => other,
    };
    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        let k1 = rhs(game, graph, params, &state).map_err(|e| stamp(t, e))?;
        let k2 = rhs(game, graph, params, &step_state(&state, &k1, dt / 2.0))
            .map_err(|e| stamp(t, e))?;
        let k3 = rhs(game, graph, params, &step_state(&state, &k2, dt / 2.0))
            .map_err(|e| stamp(t, e))?;
        let k4 = rhs(game, graph, params, &step_state(&state, &k3, dt)).map_err(|e| stamp(t, e))?;

        state.x += (k1.dx + k2.dx * 2.0 + k3.dx * 2.0 + k4.dx) * (dt / 6.0);
        state.estimates +=
            (k1.destimates + k2.destimates * 2.0 + k3.destimates * 2.0 + k4.destimates)
                * (dt / 6.0);

        let t_next = step as f64 * dt;
        if !state.is_finite() || state.max_abs() > DIVERGENCE_THRESHOLD {
            return Err(Error::Diverged {
                t: t_next,
                cause: Divergence::StateMagnitude { max_abs: state.max_abs() },
            });
        }
        if step % params.record_every == 0 {
            record(t_next, &state);
        }
    }

    Ok(Trajectory {
        times,
        states,
        action_error: errors,
        consensus_residual: residuals,
        graph_connected: graph.is_connected(),
    })
}
