//! Brute-force verification: vacuum expectations from dense Hermitian
//! eigendecompositions, cf inversion to densities and atoms, and truncation
//! convergence studies.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::charfun::{bose_cf, fermi_cf, linspace, nmode_cf_with, CfGrid};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::fock::{build_bose_ops, build_fermi_ops, build_hamiltonian, QuadraticHamiltonianSpec};
use crate::linalg::{hermitian_eigen, is_hermitian, CMatrix, CVector, I};
use crate::quad::simpson_weights;

/// Hermiticity tolerance for oracle inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Errors at or below this level count as converged regardless of ordering.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Round-off level of a Bose oracle at `cutoff`: `N·‖H_N‖·ε` with
/// `‖H_N‖ ≤ (|α| + |β|)·N` and `N = cutoff + 1`, never below [`NOISE_FLOOR`].
pub fn oracle_noise_floor(alpha: f64, beta: f64, cutoff: usize) -> f64 {
    let n = (cutoff + 1) as f64;
    (n * n * (alpha.abs() + beta.abs()) * f64::EPSILON).max(NOISE_FLOOR)
}

/// Grid points per unit time in oracle comparisons.
pub const ORACLE_POINTS_PER_UNIT: usize = 100;

/// Largest Simpson step used by [`extract_atom`].
pub const ATOM_STEP: f64 = 0.02;

/// Spectral measure of `H` in the vacuum: eigenvalues and weights `|⟨v_k, ψ₀⟩|²`.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    pub eigenvalues: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SpectralMeasure {
    pub fn new(h: &CMatrix, vacuum: &CVector) -> Result<Self> {
        if h.nrows() != h.ncols() || h.nrows() != vacuum.len() {
            return Err(invalid("H must be square and match the vacuum length"));
        }
        if !is_hermitian(h, HERMITIAN_TOL) {
            return Err(invalid("H is not Hermitian to 1e-12"));
        }
        if (vacuum.norm() - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("vacuum has norm {}, expected 1", vacuum.norm())));
        }
        let eig = hermitian_eigen(h)?;
        let overlaps = eig.eigenvectors.adjoint() * vacuum;
        Ok(Self { eigenvalues: eig.eigenvalues, weights: overlaps.iter().map(|z| z.norm_sqr()).collect() })
    }

    pub fn cf(&self, t: f64) -> Complex64 {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(&l, &w)| w * (I * (t * l)).exp())
            .sum()
    }
}

/// `f(t) = Σ_k |⟨v_k, ψ₀⟩|² e^{itλ_k}` from one eigendecomposition `H = VΛV*`.
pub fn vacuum_cf_numeric(h: &CMatrix, vacuum: &CVector, ts: &[f64]) -> Result<Vec<Complex64>> {
    vacuum_cf_numeric_with(h, vacuum, ts, Execution::default())
}

pub fn vacuum_cf_numeric_with(h: &CMatrix, vacuum: &CVector, ts: &[f64], exec: Execution) -> Result<Vec<Complex64>> {
    let measure = SpectralMeasure::new(h, vacuum)?;
    Ok(exec.map(ts, |&t| measure.cf(t)))
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub t_grid: Vec<f64>,
    pub closed_form: Vec<Complex64>,
    pub brute_force: Vec<Complex64>,
    pub max_abs_error: f64,
    pub cutoff: Option<usize>,
    pub converged: Option<bool>,
}

impl OracleReport {
    pub fn new(
        t_grid: Vec<f64>,
        closed_form: Vec<Complex64>,
        brute_force: Vec<Complex64>,
        cutoff: Option<usize>,
    ) -> Result<Self> {
        if t_grid.len() != closed_form.len() || t_grid.len() != brute_force.len() {
            return Err(invalid("report columns have different lengths"));
        }
        let max_abs_error = closed_form
            .iter()
            .zip(&brute_force)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok(Self { t_grid, closed_form, brute_force, max_abs_error, cutoff, converged: None })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(c) = self.cutoff {
            writeln!(out, "# cutoff={c}").unwrap();
        }
        writeln!(out, "# max_abs_error={:.6e}", self.max_abs_error).unwrap();
        out.push_str("t,re_closed,im_closed,re_brute,im_brute,abs_err\n");
        for ((t, c), b) in self.t_grid.iter().zip(&self.closed_form).zip(&self.brute_force) {
            writeln!(out, "{t:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.6e}", c.re, c.im, b.re, b.im, (c - b).norm())
                .unwrap();
        }
        out
    }
}

/// Uniform grid on `[0, t_max]` with [`ORACLE_POINTS_PER_UNIT`] points per unit.
pub fn oracle_grid(t_max: f64) -> Vec<f64> {
    let n = ((t_max.abs() * ORACLE_POINTS_PER_UNIT as f64).ceil() as usize).max(1) + 1;
    linspace(0.0, t_max, n)
}

/// `fermi_cf` against the exact 4×4 Fock computation.
pub fn fermi_oracle(alpha: f64, beta: f64, ts: &[f64]) -> Result<OracleReport> {
    fermi_oracle_with(alpha, beta, ts, Execution::default())
}

pub fn fermi_oracle_with(alpha: f64, beta: f64, ts: &[f64], exec: Execution) -> Result<OracleReport> {
    let ops = build_fermi_ops(2)?;
    let h = build_hamiltonian(&QuadraticHamiltonianSpec::fermi_two_mode(alpha, beta)?, &ops)?;
    let brute = vacuum_cf_numeric_with(&h, &ops.vacuum(), ts, exec)?;
    let closed = ts.iter().map(|&t| fermi_cf(alpha, beta, t).value).collect();
    OracleReport::new(ts.to_vec(), closed, brute, None)
}

/// `bose_cf` against the truncated one-mode Fock computation.
pub fn bose_oracle(alpha: f64, beta: f64, cutoff: usize, ts: &[f64]) -> Result<OracleReport> {
    bose_oracle_with(alpha, beta, cutoff, ts, Execution::default())
}

pub fn bose_oracle_with(alpha: f64, beta: f64, cutoff: usize, ts: &[f64], exec: Execution) -> Result<OracleReport> {
    let spec = QuadraticHamiltonianSpec::bose_one_mode(alpha, beta)?;
    let ops = build_bose_ops(1, cutoff)?;
    let h = build_hamiltonian(&spec, &ops)?;
    let brute = vacuum_cf_numeric_with(&h, &ops.vacuum(), ts, exec)?;
    let closed = ts.iter().map(|&t| bose_cf(alpha, beta, t)).collect::<Result<_>>()?;
    OracleReport::new(ts.to_vec(), closed, brute, Some(cutoff))
}

/// `nmode_cf` against the truncated n-mode Fock computation with per-mode `cutoff`.
pub fn nmode_oracle(a: &CMatrix, c: &CMatrix, cutoff: usize, ts: &[f64]) -> Result<OracleReport> {
    nmode_oracle_with(a, c, cutoff, ts, Execution::default())
}

pub fn nmode_oracle_with(a: &CMatrix, c: &CMatrix, cutoff: usize, ts: &[f64], exec: Execution) -> Result<OracleReport> {
    let spec = QuadraticHamiltonianSpec::bose_n_mode(a.clone(), c.clone())?;
    let ops = build_bose_ops(a.nrows(), cutoff)?;
    let h = build_hamiltonian(&spec, &ops)?;
    let brute = vacuum_cf_numeric_with(&h, &ops.vacuum(), ts, exec)?;
    let closed = nmode_cf_with(a, c, ts, exec)?.f_values;
    OracleReport::new(ts.to_vec(), closed, brute, Some(cutoff))
}

/// Bose oracle reports on `[0, t_max]` for each cutoff. `converged` is set on
/// every report when the errors are non-increasing in the cutoff order given,
/// treating errors below [`oracle_noise_floor`] of the larger cutoff as equal.
pub fn convergence_study(alpha: f64, beta: f64, cutoffs: &[usize], t_max: f64) -> Result<Vec<OracleReport>> {
    if cutoffs.len() < 2 {
        return Err(invalid("convergence study needs at least 2 cutoffs"));
    }
    let ts = oracle_grid(t_max);
    let mut reports = cutoffs
        .iter()
        .map(|&c| bose_oracle(alpha, beta, c, &ts))
        .collect::<Result<Vec<_>>>()?;
    let monotone = reports.windows(2).zip(&cutoffs[1..]).all(|(w, &c)| {
        let (prev, next) = (w[0].max_abs_error, w[1].max_abs_error);
        next <= prev || next <= oracle_noise_floor(alpha, beta, c)
    });
    for r in &mut reports {
        r.converged = Some(monotone);
    }
    Ok(reports)
}

/// Treatment of `∫_T^∞` in the inversion integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailModel {
    /// Truncate at `T`; requires `|f(T)| < decay_threshold`.
    #[default]
    Truncate,
    /// Write `f(t) = e^{iκt} h(t)` with `κ` from the log-derivative at `T`
    /// and add the integration-by-parts series
    /// `−e^{iωT} Σ_k (−1)^k h^{(k)}(T)/(iω)^{k+1}`, `ω = κ − x`, for
    /// algebraically decaying cfs.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    pub tail: TailModel,
    /// Inversion is refused when `|f(T)|` is at least this (truncated tail only).
    pub decay_threshold: f64,
    /// `|ω|T` below which the asymptotic tail is marked reduced-accuracy.
    pub asymptotic_min_phase: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self { tail: TailModel::Truncate, decay_threshold: 1e-3, asymptotic_min_phase: 50.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InversionResult {
    pub x_grid: Vec<f64>,
    pub density: Vec<f64>,
    /// Richardson estimate of the Simpson error plus the tail bound, per point.
    pub error_estimate: Vec<f64>,
    /// Points where the tail correction is not trustworthy (near a support edge).
    pub reduced_accuracy: Vec<bool>,
}

fn uniform_step(ts: &[f64]) -> Result<f64> {
    if ts.len() < 5 || ts[0] != 0.0 {
        return Err(invalid("inversion needs a grid starting at t = 0 with at least 5 points"));
    }
    let h = ts[1] - ts[0];
    if ts.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(invalid("inversion needs a uniform t grid"));
    }
    if (ts.len() - 1) % 2 != 0 {
        return Err(invalid("inversion needs an even number of grid intervals"));
    }
    Ok(h)
}

/// `p(x) = (1/π) ∫₀^T Re[e^{−itx} f(t)] dt` by composite Simpson on the cf grid.
pub fn invert_cf_to_density(grid: &CfGrid, xs: &[f64]) -> Result<Vec<f64>> {
    Ok(invert_cf_with(grid, xs, InversionOptions::default(), Execution::default())?.density)
}

pub fn invert_cf_with(
    grid: &CfGrid,
    xs: &[f64],
    options: InversionOptions,
    exec: Execution,
) -> Result<InversionResult> {
    let ts = &grid.t_values;
    let f = &grid.f_values;
    let h = uniform_step(ts)?;
    let n = ts.len() - 1;
    let big_t = ts[n];
    let f_end = f[n];
    if options.tail == TailModel::Truncate && f_end.norm() >= options.decay_threshold {
        return Err(Error::NonDecaying { magnitude: f_end.norm() });
    }
    let weights = simpson_weights(n);
    let coarse_weights = (n % 4 == 0).then(|| simpson_weights(n / 2));

    // Tail model: κ and h-derivatives at T from backward differences.
    let kappa = {
        let d = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
        (d / f[n]).im
    };
    let hk: Vec<Complex64> = (0..5).map(|j| f[n - j] * (-I * (kappa * ts[n - j])).exp()).collect();
    let h1 = (3.0 * hk[0] - 4.0 * hk[1] + hk[2]) / (2.0 * h);
    let h2 = (2.0 * hk[0] - 5.0 * hk[1] + 4.0 * hk[2] - hk[3]) / (h * h);

    let per_x = |&x: &f64| -> (f64, f64, bool) {
        let integrand = |k: usize| (f[k] * (-I * (ts[k] * x)).exp()).re;
        let body: f64 = (0..=n).map(|k| weights[k] * integrand(k)).sum::<f64>() * h;
        let quad_err = coarse_weights.as_ref().map_or(0.0, |cw| {
            let coarse: f64 = (0..=n / 2).map(|k| cw[k] * integrand(2 * k)).sum::<f64>() * 2.0 * h;
            (body - coarse).abs() / 15.0
        });
        let (tail, tail_err, reduced) = match options.tail {
            TailModel::Truncate => (0.0, f_end.norm() * big_t.max(1.0), false),
            TailModel::Asymptotic => {
                let omega = kappa - x;
                let iw = I * omega;
                let phase = (iw * big_t).exp();
                let t0 = hk[0] / iw;
                let t1 = -h1 / (iw * iw);
                let t2 = h2 / (iw * iw * iw);
                let tail = (-phase * (t0 + t1 + t2)).re;
                let reduced = omega.abs() * big_t < options.asymptotic_min_phase;
                (tail, t2.norm(), reduced)
            }
        };
        ((body + tail) / PI, (quad_err + tail_err) / PI, reduced)
    };
    let rows = exec.map(xs, per_x);
    Ok(InversionResult {
        x_grid: xs.to_vec(),
        density: rows.iter().map(|r| r.0).collect(),
        error_estimate: rows.iter().map(|r| r.1).collect(),
        reduced_accuracy: rows.iter().map(|r| r.2).collect(),
    })
}

/// `(1/2T) ∫_{−T}^{T} f(t) e^{−itx₀} dt` (real part) by Simpson with step ≤ [`ATOM_STEP`].
pub fn extract_atom<F>(cf: F, x0: f64, big_t: f64) -> f64
where
    F: Fn(f64) -> Complex64,
{
    let n = ((2.0 * big_t / ATOM_STEP).ceil() as usize).max(2);
    let w = simpson_weights(n);
    let n = w.len() - 1;
    let h = 2.0 * big_t / n as f64;
    let sum: f64 = (0..=n)
        .map(|k| {
            let t = -big_t + k as f64 * h;
            w[k] * (cf(t) * (-I * (t * x0)).exp()).re
        })
        .sum();
    sum * h / (2.0 * big_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfun::bose_cf_grid;
    use crate::dist::{classify_bose, density, dist_cf, DistributionSpec};
    use crate::linalg::{identity, re};

    #[test]
    fn zero_hamiltonian_gives_one() {
        let v = CVector::from_fn(3, |i, _| if i == 0 { re(1.0) } else { re(0.0) });
        let f = vacuum_cf_numeric(&CMatrix::zeros(3, 3), &v, &[0.0, 1.0, 7.5]).unwrap();
        assert!(f.iter().all(|z| (z - re(1.0)).norm() < 1e-15));
    }

    #[test]
    fn rejects_bad_inputs() {
        let v = CVector::from_fn(2, |i, _| if i == 0 { re(1.0) } else { re(0.0) });
        let bad = CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
        assert!(matches!(vacuum_cf_numeric(&bad, &v, &[0.0]), Err(Error::InvalidArgument(_))));
        assert!(vacuum_cf_numeric(&identity(2), &(v * re(2.0)), &[0.0]).is_err());
    }

    #[test]
    fn fermi_oracle_is_exact() {
        let r = fermi_oracle(1.0, 1.0, &oracle_grid(10.0)).unwrap();
        assert!(r.max_abs_error <= 1e-12, "{}", r.max_abs_error);
    }

    #[test]
    fn bose_oracle_lemma_eight() {
        let r = bose_oracle(1.0, 1.0, 64, &oracle_grid(2.0)).unwrap();
        assert!(r.max_abs_error <= 1e-8, "{}", r.max_abs_error);
    }

    #[test]
    fn strategies_give_identical_reports() {
        let ts = oracle_grid(2.0);
        let s = bose_oracle_with(0.5, 1.0, 32, &ts, Execution::Sequential).unwrap();
        let p = bose_oracle_with(0.5, 1.0, 32, &ts, Execution::Parallel).unwrap();
        assert_eq!(s.brute_force, p.brute_force);
    }

    #[test]
    fn convergence_examples() {
        let r = convergence_study(1.0, 1.0, &[16, 32, 64], 2.0).unwrap();
        assert!(r[0].max_abs_error > r[1].max_abs_error && r[1].max_abs_error > r[2].max_abs_error);
        assert!(r.iter().all(|x| x.converged == Some(true)));
        let r = convergence_study(0.0, 1.0, &[4, 9, 30], 3.0).unwrap();
        assert!(r.iter().all(|x| x.max_abs_error <= NOISE_FLOOR));
        let r = convergence_study(0.5, 1.0, &[16, 32, 64, 128], 2.0).unwrap();
        assert!(r[3].max_abs_error <= 1e-8);
        assert!(r.iter().all(|x| x.converged == Some(true)));
        assert!(r[3].max_abs_error <= oracle_noise_floor(0.5, 1.0, 128));
        assert!(convergence_study(0.5, 1.0, &[16], 2.0).is_err());
    }

    #[test]
    fn report_serialization() {
        let r = fermi_oracle(1.0, 0.5, &[0.0, 0.5]).unwrap();
        let csv = r.to_csv();
        assert!(csv.lines().any(|l| l == "t,re_closed,im_closed,re_brute,im_brute,abs_err"));
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 3);
        let j = r.to_json();
        assert_eq!(j["t_grid"].as_array().unwrap().len(), 2);
        assert!(j["max_abs_error"].as_f64().unwrap() <= 1e-12);
    }

    #[test]
    fn gaussian_self_test() {
        let ts = linspace(0.0, 12.0, 2401);
        let f = ts.iter().map(|&t| re((-t * t / 2.0).exp())).collect();
        let g = CfGrid::new(ts, f, true).unwrap();
        let p = invert_cf_to_density(&g, &[0.0, 1.0]).unwrap();
        assert!((p[0] - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-6);
        assert!((p[1] - (-0.5f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn meixner_inversion() {
        let spec = classify_bose(1.0, 0.6).unwrap().dist;
        let g = bose_cf_grid(1.0, 0.6, &linspace(0.0, 80.0, 8001)).unwrap();
        let xs = [-1.0, 0.0, 1.0];
        let p = invert_cf_to_density(&g, &xs).unwrap();
        for (x, v) in xs.iter().zip(p) {
            assert!((v - density(&spec, *x).unwrap()).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn gamma_inversion_needs_the_tail_model() {
        let g = bose_cf_grid(1.0, 1.0, &linspace(0.0, 400.0, 40_001)).unwrap();
        assert!(matches!(invert_cf_to_density(&g, &[1.0]), Err(Error::NonDecaying { .. })));
        let opts = InversionOptions { tail: TailModel::Asymptotic, ..Default::default() };
        let spec = classify_bose(1.0, 1.0).unwrap().dist;
        let xs = [-0.2, 0.5, 1.0, 2.0, 3.0, -0.5];
        let r = invert_cf_with(&g, &xs, opts, Execution::default()).unwrap();
        for k in 0..5 {
            assert!((r.density[k] - density(&spec, xs[k]).unwrap()).abs() < 1e-6, "x={}", xs[k]);
            assert!(!r.reduced_accuracy[k]);
        }
        assert!(r.reduced_accuracy[5]);
    }

    #[test]
    fn atoms_by_time_average() {
        let two = DistributionSpec::two_atom(8.0, 0.2, -2.0, 0.8).unwrap();
        let cf = |t| dist_cf(&two, t);
        assert!((extract_atom(cf, 8.0, 200.0) - 0.2).abs() < 0.01);
        assert!(extract_atom(cf, 3.0, 200.0).abs() < 0.01);
        let nb = |t: f64| bose_cf(0.6, 1.0, t).unwrap();
        assert!((extract_atom(nb, -0.1, 500.0) - (8.0f64 / 9.0).sqrt()).abs() < 0.01);
    }
}
