//! Closed-form vacuum characteristic functions `f(t) = ⟨ψ₀, e^{itH} ψ₀⟩`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::branch::track_logs;
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::fock::{check_bose_one_mode, check_n_mode};
use crate::heisenberg::{bose_omega, cos_and_sinc, nmode_block_exponential};
use crate::linalg::{re, CMatrix, I};

/// Characteristic function sampled on an increasing grid.
#[derive(Debug, Clone, Serialize)]
pub struct CfGrid {
    pub t_values: Vec<f64>,
    pub f_values: Vec<Complex64>,
    /// True when the square-root branch was followed from `f(0) = 1` with
    /// every grid step below a quarter turn, so no refinement was needed.
    pub branch_continuous: bool,
}

impl CfGrid {
    pub fn new(t_values: Vec<f64>, f_values: Vec<Complex64>, branch_continuous: bool) -> Result<Self> {
        if t_values.len() != f_values.len() {
            return Err(invalid("t and f lengths differ"));
        }
        if t_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("t grid must be strictly increasing"));
        }
        Ok(Self { t_values, f_values, branch_continuous })
    }

    pub fn len(&self) -> usize {
        self.t_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_values.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# branch_continuous={}\nt,re_f,im_f,abs_f\n", self.branch_continuous);
        for (t, f) in self.t_values.iter().zip(&self.f_values) {
            writeln!(out, "{t:.17e},{:.17e},{:.17e},{:.17e}", f.re, f.im, f.norm()).unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }

    /// Largest `|f(t)| − 1` over the grid.
    pub fn max_excess_modulus(&self) -> f64 {
        self.f_values.iter().map(|f| f.norm() - 1.0).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|f(−t) − conj f(t)|` over pairs of mirrored grid points.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &t) in self.t_values.iter().enumerate() {
            if t <= 0.0 {
                continue;
            }
            if let Some(j) = self.t_values.iter().position(|&s| s == -t) {
                worst = worst.max((self.f_values[j] - self.f_values[k].conj()).norm());
            }
        }
        worst
    }
}

/// `n` equally spaced points from `t_min` to `t_max` inclusive.
pub fn linspace(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_min],
        _ => {
            let h = (t_max - t_min) / (n - 1) as f64;
            (0..n).map(|k| if k + 1 == n { t_max } else { t_min + k as f64 * h }).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiCf {
    pub value: Complex64,
    /// Set when `α = β = 0`, where the law is the Dirac mass at 0.
    pub degenerate: bool,
}

/// `(cos ωt − (iα/ω) sin ωt) e^{iαt}` with `ω = √(α² + β²)`.
pub fn fermi_cf(alpha: f64, beta: f64, t: f64) -> FermiCf {
    let omega = alpha.hypot(beta);
    if omega == 0.0 {
        return FermiCf { value: re(1.0), degenerate: true };
    }
    let s = omega * t;
    let value = Complex64::new(s.cos(), -alpha / omega * s.sin()) * Complex64::from_polar(1.0, alpha * t);
    FermiCf { value, degenerate: false }
}

pub fn fermi_cf_grid(alpha: f64, beta: f64, ts: &[f64]) -> Result<CfGrid> {
    let values = ts.iter().map(|&t| fermi_cf(alpha, beta, t).value).collect();
    CfGrid::new(ts.to_vec(), values, true)
}

/// `D(t) = cos ωt − i(β/ω) sin ωt`, or `1 − iβt` when `ω = 0`.
pub fn bose_denominator(alpha: f64, beta: f64, t: f64) -> Complex64 {
    if beta * beta == alpha * alpha {
        return Complex64::new(1.0, -beta * t);
    }
    let (cos, sinc) = cos_and_sinc(bose_omega(alpha, beta), t);
    cos - I * beta * sinc
}

/// The equivalent form `((1 + β/ω)e^{−iωt} + (1 − β/ω)e^{iωt}) / 2` of `D(t)`.
pub fn bose_denominator_exponential_form(alpha: f64, beta: f64, t: f64) -> Complex64 {
    let w = bose_omega(alpha, beta);
    let ratio = beta / w;
    ((1.0 + ratio) * (-I * w * t).exp() + (1.0 - ratio) * (I * w * t).exp()) / 2.0
}

/// Continuous `log D(t)` obtained analytically for each regime.
fn bose_log_denominator(alpha: f64, beta: f64, t: f64) -> Complex64 {
    let d = bose_denominator(alpha, beta, t);
    let w2 = beta * beta - alpha * alpha;
    if w2 <= 0.0 {
        // Re D > 0 for all t.
        return d.ln();
    }
    // D traces an ellipse whose argument stays within a quarter turn of −sgn(β)ωt.
    let s = w2.sqrt() * t;
    let target = -beta.signum() * s;
    let principal = d.im.atan2(d.re);
    let arg = principal + 2.0 * PI * ((target - principal) / (2.0 * PI)).round();
    Complex64::new(d.norm().ln(), arg)
}

/// `f(t) = (e^{−iβt} / D(t))^{1/2}`, with the branch continued from `f(0) = 1`.
pub fn bose_cf(alpha: f64, beta: f64, t: f64) -> Result<Complex64> {
    check_bose_one_mode(alpha, beta)?;
    Ok(bose_cf_unchecked(alpha, beta, t))
}

pub(crate) fn bose_cf_unchecked(alpha: f64, beta: f64, t: f64) -> Complex64 {
    (Complex64::new(0.0, -beta * t / 2.0) - 0.5 * bose_log_denominator(alpha, beta, t)).exp()
}

/// Bose cf on a grid using numerical branch tracking of `D(t)` along the
/// grid, independent of the analytic branch rule in [`bose_cf`].
pub fn bose_cf_grid(alpha: f64, beta: f64, ts: &[f64]) -> Result<CfGrid> {
    check_bose_one_mode(alpha, beta)?;
    let eval = |t: f64| bose_denominator(alpha, beta, t);
    let values: Vec<Complex64> = ts.iter().map(|&t| eval(t)).collect();
    let (logs, refined) = track_logs(ts, &values, eval)?;
    let f = ts
        .iter()
        .zip(&logs)
        .map(|(&t, l)| (Complex64::new(0.0, -beta * t / 2.0) - 0.5 * l).exp())
        .collect();
    CfGrid::new(ts.to_vec(), f, !refined)
}

fn centered_residual<F>(ts: &[f64], f: &[Complex64], residual: F) -> f64
where
    F: Fn(f64, Complex64, Complex64) -> Complex64,
{
    (1..ts.len().saturating_sub(1))
        .map(|k| {
            let df = (f[k + 1] - f[k - 1]) / (ts[k + 1] - ts[k - 1]);
            residual(ts[k], f[k], df).norm()
        })
        .fold(0.0, f64::max)
}

/// Max centered-difference residual of
/// `(1 − (β²/ω²) sin²ωt) f′ + (β²/ω) sin ωt (cos ωt + (iα/ω) sin ωt) f = 0`.
pub fn fermi_cf_ode_residual(alpha: f64, beta: f64, ts: &[f64]) -> f64 {
    let omega = alpha.hypot(beta);
    let f: Vec<Complex64> = ts.iter().map(|&t| fermi_cf(alpha, beta, t).value).collect();
    centered_residual(ts, &f, |t, f, df| {
        let (cos, sinc) = cos_and_sinc(re(omega), t);
        let (cos, sinc) = (cos.re, sinc.re);
        (1.0 - beta * beta * sinc * sinc) * df + beta * beta * sinc * (cos + I * alpha * sinc) * f
    })
}

/// Max centered-difference residual of
/// `(1 + (α²/ω²) sin²ωt) f′ + (α²/2ω) sin ωt (cos ωt + (iβ/ω) sin ωt) f = 0`,
/// which at `ω = 0` becomes `(1 + β²t²) f′ + (β²t/2)(1 + iβt) f = 0`.
pub fn bose_cf_ode_residual(alpha: f64, beta: f64, ts: &[f64]) -> Result<f64> {
    check_bose_one_mode(alpha, beta)?;
    let f: Vec<Complex64> = ts.iter().map(|&t| bose_cf_unchecked(alpha, beta, t)).collect();
    let omega = bose_omega(alpha, beta);
    let a2 = alpha * alpha;
    Ok(centered_residual(ts, &f, |t, f, df| {
        let (cos, sinc) = cos_and_sinc(omega, t);
        (1.0 + a2 * sinc * sinc) * df + 0.5 * a2 * sinc * (cos + I * beta * sinc) * f
    }))
}

/// `det(Φ(t)) · e^{it tr C}`, the quantity whose `−½` power is the n-mode cf.
pub fn nmode_determinant(a: &CMatrix, c: &CMatrix, t: f64) -> Result<Complex64> {
    let e = nmode_block_exponential(a, c, t)?;
    Ok(e.phi.determinant() * (I * (t * c.trace().re)).exp())
}

/// `f(t) = det(Φ(t) e^{iCt})^{−1/2}`, with the power continued from `f(0) = 1`.
pub fn nmode_cf(a: &CMatrix, c: &CMatrix, ts: &[f64]) -> Result<CfGrid> {
    nmode_cf_with(a, c, ts, Execution::default())
}

pub fn nmode_cf_with(a: &CMatrix, c: &CMatrix, ts: &[f64], exec: Execution) -> Result<CfGrid> {
    check_n_mode(a, c)?;
    let values: Vec<Complex64> = exec
        .map(ts, |&t| nmode_determinant(a, c, t))
        .into_iter()
        .collect::<Result<_>>()?;
    let eval = |t: f64| nmode_determinant(a, c, t).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let (logs, refined) = track_logs(ts, &values, eval)?;
    let f = logs.iter().map(|l| (-0.5 * l).exp()).collect();
    CfGrid::new(ts.to_vec(), f, !refined)
}

/// `∏_j (e^{−iβ_j t} / (cos ω_j t − (iβ_j/ω_j) sin ω_j t))^{1/2}` for commuting modes.
pub fn commuting_cf(alphas: &[f64], betas: &[f64], t: f64) -> Result<Complex64> {
    if alphas.len() != betas.len() {
        return Err(Error::InvalidArgument(format!(
            "{} alphas but {} betas",
            alphas.len(),
            betas.len()
        )));
    }
    alphas
        .iter()
        .zip(betas)
        .try_fold(re(1.0), |acc, (&a, &b)| Ok(acc * bose_cf(a, b, t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;

    fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize + 1;
        linspace(lo, hi, n)
    }

    #[test]
    fn fermi_examples() {
        assert_eq!(fermi_cf(0.7, -0.2, 0.0).value, re(1.0));
        assert!((fermi_cf(0.0, 1.0, PI).value - re(-1.0)).norm() < 1e-15);
        let d = fermi_cf(0.0, 0.0, 3.0);
        assert!(d.degenerate);
        assert_eq!(d.value, re(1.0));
    }

    #[test]
    fn bose_examples() {
        assert_eq!(bose_cf(0.4, 1.3, 0.0).unwrap(), re(1.0));
        for &t in &[-3.0, 0.5, 10.0] {
            assert!((bose_cf(0.0, 1.7, t).unwrap() - re(1.0)).norm() < 1e-14);
        }
        let f = bose_cf(1.0, 1.0, 1.0).unwrap();
        let want = Complex64::new(0.0, -0.5).exp() / Complex64::new(1.0, -1.0).sqrt();
        assert!((f - want).norm() < 1e-15);
        assert!((f.norm() - 2f64.powf(-0.25)).abs() < 1e-15);
        assert!(bose_cf(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn lemma_six_forms_agree() {
        for &(a, b) in &[(0.5, 1.0), (1.0, 0.6), (0.3, -2.0), (2.0, 0.1)] {
            for t in grid(-5.0, 5.0, 0.05) {
                let lhs = bose_denominator(a, b, t);
                let rhs = bose_denominator_exponential_form(a, b, t);
                assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn analytic_branch_matches_tracked_branch() {
        for &(a, b) in &[(0.5, 1.0), (0.9, -1.0), (1.0, 1.0), (1.0, 0.6), (0.2, 3.0)] {
            let ts = grid(-20.0, 20.0, 0.01);
            let g = bose_cf_grid(a, b, &ts).unwrap();
            assert!(g.branch_continuous);
            for (t, f) in ts.iter().zip(&g.f_values) {
                assert!((bose_cf(a, b, *t).unwrap() - f).norm() < 1e-12, "{a} {b} {t}");
            }
            assert!(g.max_excess_modulus() <= 1e-10);
            assert!(g.hermitian_defect() <= 1e-10);
        }
    }

    #[test]
    fn coarse_grid_refines_to_the_same_branch() {
        let ts = grid(0.0, 30.0, 1.5);
        let g = bose_cf_grid(0.3, 2.0, &ts).unwrap();
        assert!(!g.branch_continuous);
        for (t, f) in ts.iter().zip(&g.f_values) {
            assert!((bose_cf(0.3, 2.0, *t).unwrap() - f).norm() < 1e-12);
        }
    }

    #[test]
    fn cf_grid_invariants_for_fermi() {
        let g = fermi_cf_grid(1.3, -0.4, &grid(-10.0, 10.0, 0.1)).unwrap();
        assert!(g.max_excess_modulus() <= 1e-10);
        assert!(g.hermitian_defect() <= 1e-10);
    }

    #[test]
    fn ode_residuals() {
        let ts = grid(0.0, 1.0, 1e-3);
        assert!(fermi_cf_ode_residual(1.0, 1.0, &ts) <= 1e-5);
        assert!(fermi_cf_ode_residual(0.0, 1.0, &ts) <= 1e-5);
        assert!(bose_cf_ode_residual(0.5, 1.0, &ts).unwrap() <= 1e-5);
        assert!(bose_cf_ode_residual(1.0, 0.5, &ts).unwrap() <= 1e-5);
        assert!(bose_cf_ode_residual(1.0, 1.0, &ts).unwrap() <= 1e-5);
    }

    #[test]
    fn half_coefficient_fails_the_fermi_ode() {
        let ts = grid(0.0, 1.0, 1e-3);
        let f: Vec<Complex64> = ts.iter().map(|&t| fermi_cf(1.0, 1.0, t).value).collect();
        let omega = 2f64.sqrt();
        let r = centered_residual(&ts, &f, |t, f, df| {
            let s = (omega * t).sin();
            (1.0 - s * s / 2.0) * df + (1.0 / (2.0 * omega)) * s * ((omega * t).cos() + I * s / omega) * f
        });
        assert!(r > 1e-2);
    }

    #[test]
    fn nmode_single_matches_bose() {
        let ts = grid(-3.0, 3.0, 0.01);
        for &(a, b) in &[(0.5, 1.0), (1.0, 0.6), (1.0, 1.0)] {
            let g = nmode_cf(&CMatrix::from_element(1, 1, re(a)), &CMatrix::from_element(1, 1, re(b)), &ts).unwrap();
            for (t, f) in ts.iter().zip(&g.f_values) {
                assert!((bose_cf(a, b, *t).unwrap() - f).norm() <= 1e-10);
            }
        }
        let g = nmode_cf(&CMatrix::from_element(1, 1, re(0.5)), &CMatrix::from_element(1, 1, re(1.0)), &[0.0]).unwrap();
        assert_eq!(g.f_values[0], re(1.0));
    }

    #[test]
    fn nmode_diagonal_matches_commuting() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![re(0.5), re(0.3)]));
        let c = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(0.8)]));
        let ts = grid(0.0, 2.0, 0.01);
        let g = nmode_cf(&a, &c, &ts).unwrap();
        for (t, f) in ts.iter().zip(&g.f_values) {
            let want = commuting_cf(&[0.5, 0.3], &[1.0, 0.8], *t).unwrap();
            assert!((want - f).norm() <= 1e-10);
        }
        let at = nmode_cf(&a, &c, &[0.0, 0.9]).unwrap().f_values[1];
        assert!((at - commuting_cf(&[0.5, 0.3], &[1.0, 0.8], 0.9).unwrap()).norm() <= 1e-10);
    }

    #[test]
    fn nmode_sequential_and_parallel_agree() {
        let a = CMatrix::from_row_slice(2, 2, &[re(0.4), re(0.1), re(0.1), re(0.2)]);
        let c = CMatrix::from_row_slice(2, 2, &[re(1.0), Complex64::new(0.1, 0.2), Complex64::new(0.1, -0.2), re(0.9)]);
        let ts = grid(-4.0, 4.0, 0.05);
        let s = nmode_cf_with(&a, &c, &ts, Execution::Sequential).unwrap();
        let p = nmode_cf_with(&a, &c, &ts, Execution::Parallel).unwrap();
        assert_eq!(s.f_values, p.f_values);
        assert!(s.max_excess_modulus() <= 1e-10);
        assert!(s.hermitian_defect() <= 1e-10);
    }

    #[test]
    fn commuting_examples() {
        assert_eq!(commuting_cf(&[0.5], &[1.0], 0.7).unwrap(), bose_cf(0.5, 1.0, 0.7).unwrap());
        assert!((commuting_cf(&[0.0, 0.0], &[1.0, 2.0], 0.7).unwrap() - re(1.0)).norm() < 1e-14);
        assert!(commuting_cf(&[0.5], &[1.0, 2.0], 0.7).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = fermi_cf_grid(1.0, 1.0, &linspace(0.0, 1.0, 11)).unwrap();
        let csv = g.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# branch_continuous=true"));
        assert_eq!(lines.next(), Some("t,re_f,im_f,abs_f"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first, vec![0.0, 1.0, 0.0, 1.0]);
        assert_eq!(csv.lines().count(), 13);
    }
}
