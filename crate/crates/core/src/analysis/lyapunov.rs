//! Lyapunov-equation solving and the trajectory energy monitor.

use nalgebra::{DMatrix, DVector};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::graph::CommGraph;

/// Fraction of samples skipped before judging monotone decrease, so the
/// estimation transient does not pollute the verdict.
pub const DEFAULT_BURN_IN_FRACTION: f64 = 0.05;

/// Solves `P M + M^T P = Q` for symmetric positive definite `P`, given `Q`
/// symmetric positive definite and `-M` Hurwitz.
///
/// The symmetric unknown is half-vectorized and the k(k+1)/2-dimensional
/// dense system solved directly; fine for the desk-scale matrices this crate
/// works with.
pub fn solve_lyapunov(m: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = m.nrows();
    if m.ncols() != k {
        return Err(Error::NotSquare { rows: k, cols: m.ncols() });
    }
    if q.shape() != (k, k) {
        return Err(Error::DimensionMismatch { expected: k * k, got: q.len() });
    }

    let min_re = m
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|e| e.re)
        .fold(f64::INFINITY, f64::min);
    if min_re <= 1e-12 {
        return Err(Error::NotHurwitz { max_real_part: -min_re });
    }

    // vech index of the (a, b) entry with a <= b.
    let idx = |a: usize, b: usize| a * k - a * (a + 1) / 2 + b;
    let unknowns = k * (k + 1) / 2;
    let mut sys = DMatrix::zeros(unknowns, unknowns);
    let mut rhs = DVector::zeros(unknowns);
    for i in 0..k {
        for j in i..k {
            let row = idx(i, j);
            rhs[row] = q[(i, j)];
            for s in 0..k {
                // (P M)_{ij} contributes P[i,s] M[s,j].
                let (a, b) = if i <= s { (i, s) } else { (s, i) };
                sys[(row, idx(a, b))] += m[(s, j)];
                // (M^T P)_{ij} contributes M[s,i] P[s,j].
                let (a, b) = if s <= j { (s, j) } else { (j, s) };
                sys[(row, idx(a, b))] += m[(s, i)];
            }
        }
    }

    let sol = sys
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularMatrix { condition: f64::INFINITY })?;

    let mut p = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            p[(i, j)] = sol[idx(i, j)];
            p[(j, i)] = sol[idx(i, j)];
        }
    }
    Ok(p)
}

/// One monitored sample: the candidate energy and its numerical derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSample {
    pub t: f64,
    pub v: f64,
    pub vdot: f64,
}

/// The monitored energy along a run.
#[derive(Debug, Clone)]
pub struct LyapunovTrace {
    pub samples: Vec<LyapunovSample>,
    /// Fraction of post-burn-in samples with strictly negative `vdot`.
    pub decrease_fraction: f64,
    pub burn_in_index: usize,
}

/// Evaluates the composite energy
/// `V = (c/2) (x - x*)^T kbar^{-1} (x - x*) + (1 - c) ybar^T P1 ybar`
/// along trajectories, where `ybar` is the player-major stacked estimate
/// vector minus its quasi-steady value (every row at the current actions),
/// and `P1` solves the estimation-matrix Lyapunov equation against `Q1`.
#[derive(Debug, Clone)]
pub struct LyapunovMonitor {
    c: f64,
    p1: DMatrix<f64>,
    q1: DMatrix<f64>,
    kbar_inv: DVector<f64>,
    n: usize,
}

impl LyapunovMonitor {
    /// Builds the monitor for a graph and per-player gains. `q1` defaults to
    /// the identity and `c` is the mixing constant in (0, 1); both are free
    /// parameters of the theory, so the report should state them.
    pub fn new(
        graph: &CommGraph,
        kbar: &DVector<f64>,
        c: f64,
        q1: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let n = graph.n();
        if !(0.0 < c && c < 1.0) {
            return Err(Error::InvalidParams(format!("mixing constant c = {c} must lie in (0, 1)")));
        }
        if kbar.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: kbar.len() });
        }
        if kbar.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidParams("every kbar_i must be positive".into()));
        }
        let q1 = q1.unwrap_or_else(|| DMatrix::identity(n * n, n * n));
        if q1.shape() != (n * n, n * n) {
            return Err(Error::DimensionMismatch { expected: n * n * n * n, got: q1.len() });
        }
        let m = graph.estimation_matrix();
        let p1 = solve_lyapunov(&m, &q1)?;
        let residual = (&p1 * &m + m.transpose() * &p1 - &q1).norm();
        if residual > 1e-8 {
            return Err(Error::InvalidParams(format!(
                "lyapunov equation residual {residual:.3e} exceeds 1e-8"
            )));
        }
        Ok(Self {
            c,
            p1,
            q1,
            kbar_inv: kbar.map(|v| 1.0 / v),
            n,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p1(&self) -> &DMatrix<f64> {
        &self.p1
    }

    pub fn q1(&self) -> &DMatrix<f64> {
        &self.q1
    }

    /// The energy at one state. Panics on dimension mismatch; use
    /// [`LyapunovMonitor::trace`] for checked evaluation along a run.
    pub fn value(&self, state: &crate::dynamics::SeekerState, x_star: &DVector<f64>) -> f64 {
        assert_eq!(state.n(), self.n, "state dimension mismatch");
        assert_eq!(x_star.len(), self.n, "reference dimension mismatch");
        let dx = &state.x - x_star;
        let action_term: f64 = dx.iter().zip(self.kbar_inv.iter()).map(|(d, ki)| d * d * ki).sum();

        let n = self.n;
        let stacked = state.stacked_estimates();
        let quasi = DVector::from_fn(n * n, |k, _| state.x[k % n]);
        let ybar = stacked - quasi;
        let estimate_term = (ybar.transpose() * &self.p1 * &ybar)[(0, 0)];

        0.5 * self.c * action_term + (1.0 - self.c) * estimate_term
    }

    /// Evaluates the energy along a trajectory, differentiates it centrally
    /// in time (one-sided at the ends), and reports the fraction of
    /// post-burn-in samples at which it strictly decreases.
    pub fn trace(
        &self,
        traj: &Trajectory,
        x_star: &DVector<f64>,
        burn_in_fraction: f64,
    ) -> Result<LyapunovTrace> {
        if traj.len() < 2 {
            return Err(Error::EmptyWindow);
        }
        let state_n = traj.states[0].n();
        if state_n != self.n || x_star.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: state_n });
        }
        if !(0.0..1.0).contains(&burn_in_fraction) {
            return Err(Error::InvalidParams(format!(
                "burn-in fraction {burn_in_fraction} must lie in [0, 1)"
            )));
        }

        let len = traj.len();
        let vs: Vec<f64> = traj.states.iter().map(|s| self.value(s, x_star)).collect();
        let t = &traj.times;
        let vdot = |k: usize| -> f64 {
            if k == 0 {
                (vs[1] - vs[0]) / (t[1] - t[0])
            } else if k == len - 1 {
                (vs[len - 1] - vs[len - 2]) / (t[len - 1] - t[len - 2])
            } else {
                (vs[k + 1] - vs[k - 1]) / (t[k + 1] - t[k - 1])
            }
        };
        let samples: Vec<LyapunovSample> = (0..len)
            .map(|k| LyapunovSample { t: t[k], v: vs[k], vdot: vdot(k) })
            .collect();

        let burn_in_index = ((burn_in_fraction * len as f64).ceil() as usize).min(len - 1);
        let judged = &samples[burn_in_index..];
        let decreasing = judged.iter().filter(|s| s.vdot < 0.0).count();
        Ok(LyapunovTrace {
            decrease_fraction: decreasing as f64 / judged.len() as f64,
            samples,
            burn_in_index,
        })
    }
}
