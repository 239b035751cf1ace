//! Empirical convergence-rate estimation: a least-squares line through
//! log-error versus time.

use crate::error::{Error, Result};

/// Default fit window as fractions of the horizon, chosen to skip the
/// initial transient and the late floating-point floor.
pub const DEFAULT_FIT_WINDOW: (f64, f64) = (0.2, 0.8);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Decay rate: the negated slope of the log-error fit. Positive means
    /// the error shrinks.
    pub rate: f64,
    /// Coefficient of determination of the line fit.
    pub r_squared: f64,
    pub n_points: usize,
}

/// Fits `ln(error) ~ a - rate * t` by least squares over the given samples.
///
/// Errors must be strictly positive; a zero or negative value reports
/// [`Error::NonpositiveError`] and callers should truncate the window before
/// it and refit.
pub fn fit_exponential_rate(times: &[f64], errors: &[f64]) -> Result<RateFit> {
    if times.len() != errors.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), got: errors.len() });
    }
    if times.len() < 2 {
        return Err(Error::EmptyWindow);
    }
    if let Some((&t, &e)) = times.iter().zip(errors.iter()).find(|(_, &e)| e <= 0.0) {
        return Err(Error::NonpositiveError { t, value: e });
    }

    let n = times.len() as f64;
    let logs: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let t_mean = times.iter().sum::<f64>() / n;
    let y_mean = logs.iter().sum::<f64>() / n;

    let mut s_tt = 0.0;
    let mut s_ty = 0.0;
    let mut s_yy = 0.0;
    for (&t, &y) in times.iter().zip(&logs) {
        s_tt += (t - t_mean) * (t - t_mean);
        s_ty += (t - t_mean) * (y - y_mean);
        s_yy += (y - y_mean) * (y - y_mean);
    }
    if s_tt == 0.0 {
        return Err(Error::InvalidParams("fit needs at least two distinct sample times".into()));
    }

    let slope = s_ty / s_tt;
    let ss_res: f64 = times
        .iter()
        .zip(&logs)
        .map(|(&t, &y)| {
            let fitted = y_mean + slope * (t - t_mean);
            (y - fitted) * (y - fitted)
        })
        .sum();
    // A flat log-error series is fit perfectly by the horizontal line.
    let r_squared = if s_yy <= f64::MIN_POSITIVE { 1.0 } else { 1.0 - ss_res / s_yy };

    Ok(RateFit { rate: -slope, r_squared, n_points: times.len() })
}

/// Fits on the samples whose times fall in the `[lo, hi]` fractional window
/// of the span `[t_first, t_last]`.
pub fn fit_rate_in_window(
    times: &[f64],
    errors: &[f64],
    window: (f64, f64),
) -> Result<RateFit> {
    if times.len() != errors.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), got: errors.len() });
    }
    let (lo, hi) = window;
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
        return Err(Error::InvalidParams(format!(
            "fit window ({lo}, {hi}) must satisfy 0 <= lo < hi <= 1"
        )));
    }
    let (&first, &last) = match (times.first(), times.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::EmptyWindow),
    };
    let span = last - first;
    let t_lo = first + lo * span;
    let t_hi = first + hi * span;

    let mut wt = Vec::new();
    let mut we = Vec::new();
    for (&t, &e) in times.iter().zip(errors) {
        if t >= t_lo && t <= t_hi {
            wt.push(t);
            we.push(e);
        }
    }
    if wt.len() < 2 {
        return Err(Error::EmptyWindow);
    }
    fit_exponential_rate(&wt, &we)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential_recovers_the_rate() {
        let times: Vec<f64> = (0..=50).map(|k| k as f64 * 0.1).collect();
        let errors: Vec<f64> = times.iter().map(|t| (-2.0 * t).exp()).collect();
        let fit = fit_exponential_rate(&times, &errors).unwrap();
        assert!((fit.rate - 2.0).abs() <= 1e-6, "rate {}", fit.rate);
        assert!(fit.r_squared >= 0.999999, "r^2 {}", fit.r_squared);
        assert_eq!(fit.n_points, 51);
    }

    #[test]
    fn constant_errors_fit_zero_rate() {
        let times: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let errors = vec![0.5; 10];
        let fit = fit_exponential_rate(&times, &errors).unwrap();
        assert_eq!(fit.rate, 0.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn nonpositive_error_is_reported_with_location() {
        let times = vec![0.0, 1.0, 2.0];
        let errors = vec![1.0, 0.0, 1.0];
        match fit_exponential_rate(&times, &errors) {
            Err(Error::NonpositiveError { t, value }) => {
                assert_eq!(t, 1.0);
                assert_eq!(value, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_windows_are_errors() {
        assert!(matches!(fit_exponential_rate(&[], &[]), Err(Error::EmptyWindow)));
        assert!(matches!(fit_exponential_rate(&[1.0], &[1.0]), Err(Error::EmptyWindow)));
        assert!(matches!(
            fit_exponential_rate(&[1.0, 1.0], &[1.0, 2.0]),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            fit_rate_in_window(&[0.0, 1.0], &[1.0, 1.0], (0.8, 0.2)),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn window_selects_the_middle_of_the_horizon() {
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        // Slope -1 in the middle, flat tails.
        let errors: Vec<f64> = times
            .iter()
            .map(|&t| {
                let clamped = t.clamp(2.0, 8.0);
                (-clamped).exp()
            })
            .collect();
        let fit = fit_rate_in_window(&times, &errors, DEFAULT_FIT_WINDOW).unwrap();
        assert!((fit.rate - 1.0).abs() <= 1e-9, "rate {}", fit.rate);
        assert!(fit.r_squared > 0.999999);
    }
}
