//! Continuous branch tracking for logarithms (and hence fractional powers)
//! of complex-valued functions of a real variable, anchored at `t = 0`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Maximum bisection depth when a phase step is too large.
pub const MAX_REFINEMENT_DEPTH: u32 = 24;

/// Incremental continuous logarithm along a path.
#[derive(Debug, Clone, Copy)]
pub struct BranchTracker {
    t: f64,
    value: Complex64,
    log: Complex64,
}

impl Default for BranchTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl BranchTracker {
    /// Tracker anchored at `f(0) = 1` with `log f(0) = 0`.
    pub fn new() -> Self {
        Self::anchored(0.0, Complex64::new(1.0, 0.0))
    }

    /// Tracker anchored at `(t, value)` using the principal logarithm there.
    pub fn anchored(t: f64, value: Complex64) -> Self {
        Self { t, value, log: value.ln() }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn log(&self) -> Complex64 {
        self.log
    }

    /// Phase change from the current point to `value`.
    fn step_log(&self, value: Complex64) -> Complex64 {
        (value / self.value).ln()
    }

    /// Accept `(t, value)` if its phase step from the current point is below π/2.
    pub fn try_advance(&mut self, t: f64, value: Complex64) -> Result<Complex64> {
        if value == Complex64::new(0.0, 0.0) || !value.is_finite() {
            return Err(Error::BranchTracking { t });
        }
        let delta = self.step_log(value);
        if delta.im.abs() >= FRAC_PI_2 {
            return Err(Error::BranchTracking { t });
        }
        self.t = t;
        self.value = value;
        self.log += delta;
        Ok(self.log)
    }

    /// Advance to `t`, bisecting the step with `eval` until every accepted
    /// step agrees with its own midpoint. Returns the log and whether any
    /// bisection happened.
    pub fn advance_with<F>(&mut self, t: f64, value: Complex64, eval: &F) -> Result<(Complex64, bool)>
    where
        F: Fn(f64) -> Complex64,
    {
        self.advance_rec(t, value, eval, 0)
    }

    fn advance_rec<F>(&mut self, t: f64, value: Complex64, eval: &F, depth: u32) -> Result<(Complex64, bool)>
    where
        F: Fn(f64) -> Complex64,
    {
        if !value.is_finite() || value == Complex64::new(0.0, 0.0) {
            return Err(Error::BranchTracking { t });
        }
        let mid_t = 0.5 * (self.t + t);
        let mid = eval(mid_t);
        if depth >= MAX_REFINEMENT_DEPTH {
            let log = self.try_advance(t, value)?;
            return Ok((log, depth > 0));
        }
        if self.consistent(mid, value) {
            let log = self.try_advance(t, value)?;
            return Ok((log, depth > 0));
        }
        self.advance_rec(mid_t, mid, eval, depth + 1)?;
        let (log, _) = self.advance_rec(t, value, eval, depth + 1)?;
        Ok((log, true))
    }

    /// True when the direct step to `value` is small and equals the sum of
    /// the two half steps through `mid`.
    fn consistent(&self, mid: Complex64, value: Complex64) -> bool {
        if !mid.is_finite() || mid == Complex64::new(0.0, 0.0) {
            return false;
        }
        let direct = self.step_log(value);
        let first = (mid / self.value).ln();
        let second = (value / mid).ln();
        direct.im.abs() < FRAC_PI_2
            && first.im.abs() < FRAC_PI_2
            && second.im.abs() < FRAC_PI_2
            && (first.im + second.im - direct.im).abs() < 1e-6
    }
}

/// Continuous logarithms of `values[k] = f(ts[k])` along an increasing grid,
/// tracked outward from `t = 0` in both directions. `eval` supplies extra
/// points for refinement and the anchor `f(0)` when 0 is not on the grid.
///
/// Returns the logs and whether any refinement was needed.
pub fn track_logs<F>(ts: &[f64], values: &[Complex64], eval: F) -> Result<(Vec<Complex64>, bool)>
where
    F: Fn(f64) -> Complex64,
{
    if ts.len() != values.len() {
        return Err(invalid("grid and value lengths differ"));
    }
    if ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("t grid must be strictly increasing"));
    }
    let mut logs = vec![Complex64::new(0.0, 0.0); ts.len()];
    let split = ts.partition_point(|&t| t < 0.0);
    let anchor = BranchTracker::anchored(0.0, eval(0.0));
    let mut refined = false;

    let mut forward = anchor;
    for k in split..ts.len() {
        logs[k] = if ts[k] == 0.0 {
            forward.try_advance(0.0, values[k])?
        } else {
            advance_flagged(&mut forward, ts[k], values[k], &eval, &mut refined)?
        };
    }
    let mut backward = anchor;
    for k in (0..split).rev() {
        logs[k] = advance_flagged(&mut backward, ts[k], values[k], &eval, &mut refined)?;
    }
    Ok((logs, refined))
}

fn advance_flagged<F>(
    tracker: &mut BranchTracker,
    t: f64,
    value: Complex64,
    eval: &F,
    refined: &mut bool,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let (log, bisected) = tracker.advance_with(t, value, eval)?;
    *refined |= bisected;
    Ok(log)
}

/// Continuous logarithm of `f(t)` reached from `t = 0` in `steps` uniform
/// substeps (refined where needed).
pub fn log_at<F>(eval: F, t: f64, steps: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut tracker = BranchTracker::anchored(0.0, eval(0.0));
    if t == 0.0 {
        return Ok(tracker.log());
    }
    let steps = steps.max(1);
    for k in 1..=steps {
        let s = t * k as f64 / steps as f64;
        tracker.advance_with(s, eval(s), &eval)?;
    }
    Ok(tracker.log())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_a_winding_exponential() {
        let f = |t: f64| Complex64::new(0.0, 3.0 * t).exp();
        let ts: Vec<f64> = (-50..=50).map(|k| k as f64 * 0.1).collect();
        let vals: Vec<_> = ts.iter().map(|&t| f(t)).collect();
        let (logs, refined) = track_logs(&ts, &vals, f).unwrap();
        assert!(!refined);
        for (t, l) in ts.iter().zip(&logs) {
            assert!((l.im - 3.0 * t).abs() < 1e-12);
        }
    }

    #[test]
    fn refines_coarse_grids() {
        let f = |t: f64| Complex64::new(0.0, 40.0 * t).exp();
        let ts = [0.0, 0.5, 1.0];
        let vals: Vec<_> = ts.iter().map(|&t| f(t)).collect();
        let (logs, refined) = track_logs(&ts, &vals, f).unwrap();
        assert!(refined);
        assert!((logs[2].im - 40.0).abs() < 1e-10);
        assert!((log_at(f, 1.0, 1).unwrap().im - 40.0).abs() < 1e-10);
    }

    #[test]
    fn anchors_at_zero_when_off_grid() {
        let f = |t: f64| Complex64::new(0.0, -2.0 * t).exp();
        let ts = [0.3, 0.6];
        let vals: Vec<_> = ts.iter().map(|&t| f(t)).collect();
        let (logs, _) = track_logs(&ts, &vals, f).unwrap();
        assert!((logs[1].im + 1.2).abs() < 1e-12);
    }

    #[test]
    fn zero_crossings_fail() {
        let f = |t: f64| Complex64::new(1.0 - t, 0.0);
        let err = log_at(f, 2.0, 4).unwrap_err();
        assert!(matches!(err, Error::BranchTracking { .. }));
        assert!(track_logs(&[0.0, 0.0], &[f(0.0), f(0.0)], f).is_err());
    }
}
