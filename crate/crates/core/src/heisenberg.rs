//! Heisenberg evolution `X(t) = e^{itH} X e^{−itH}` of creators and
//! annihilators under quadratic Hamiltonians.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::fock::check_n_mode;
use crate::linalg::{exp_i_hermitian, expm, identity, is_hermitian, max_abs, re, CMatrix, I};

/// Largest mode count accepted by the block exponential.
pub const MAX_BLOCK_MODES: usize = 64;

/// `(a₁(t), a₂(t), a₁⁺(t), a₂⁺(t))ᵀ = U4(t) (a₁, a₂, a₁⁺, a₂⁺)ᵀ`.
#[derive(Debug, Clone)]
pub struct FermiEvolution {
    pub t: f64,
    pub u4: CMatrix,
}

/// The real symmetric generator `J` with `d/dt (a, a⁺)ᵀ = iJ (a, a⁺)ᵀ`.
pub fn fermi_generator(alpha: f64, beta: f64) -> CMatrix {
    let (a, b) = (alpha, beta);
    CMatrix::from_row_slice(
        4,
        4,
        &[
            re(-a), re(0.0), re(0.0), re(-b),
            re(0.0), re(-a), re(b), re(0.0),
            re(0.0), re(b), re(a), re(0.0),
            re(-b), re(0.0), re(0.0), re(a),
        ],
    )
}

/// Closed-form `exp(itJ)` using `J² = ω²·1`.
pub fn fermi_evolution(alpha: f64, beta: f64, t: f64) -> Result<FermiEvolution> {
    let omega = alpha.hypot(beta);
    if !(omega > 0.0) {
        return Err(invalid("fermionic evolution needs omega = sqrt(alpha^2 + beta^2) > 0"));
    }
    let (cos, sin) = ((omega * t).cos(), (omega * t).sin());
    let minus = Complex64::new(cos, -alpha / omega * sin);
    let plus = Complex64::new(cos, alpha / omega * sin);
    let cross = Complex64::new(0.0, beta / omega * sin);
    let z = re(0.0);
    let u4 = CMatrix::from_row_slice(
        4,
        4,
        &[
            minus, z, z, -cross,
            z, minus, cross, z,
            z, cross, plus, z,
            -cross, z, z, plus,
        ],
    );
    Ok(FermiEvolution { t, u4 })
}

/// `a(t) = c_a a + c_adag a⁺` (and the adjoint relation for `a⁺(t)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoseEvolution {
    pub t: f64,
    pub c_a: Complex64,
    pub c_adag: Complex64,
}

impl BoseEvolution {
    /// Coefficients of `a⁺(t) = conj(c_a) a⁺ + conj(c_adag) a`.
    pub fn creator_coefficients(&self) -> (Complex64, Complex64) {
        (self.c_a.conj(), self.c_adag.conj())
    }

    /// `|c_a|² − |c_adag|²`, equal to 1 for a Bogoliubov transformation.
    pub fn normalization(&self) -> f64 {
        self.c_a.norm_sqr() - self.c_adag.norm_sqr()
    }
}

/// `ω` with `ω² = β² − α²`: the positive root when `ω² > 0` and `−i|ω|`
/// when `ω² < 0`.
pub fn bose_omega(alpha: f64, beta: f64) -> Complex64 {
    let w2 = beta * beta - alpha * alpha;
    if w2 >= 0.0 {
        re(w2.sqrt())
    } else {
        Complex64::new(0.0, -(-w2).sqrt())
    }
}

/// `(cos ωt, sin(ωt)/ω)` for complex `ω`, continuous through `ω = 0`.
pub(crate) fn cos_and_sinc(omega: Complex64, t: f64) -> (Complex64, Complex64) {
    let x = omega * t;
    if x.norm() < 1e-4 {
        let x2 = x * x;
        let cos = 1.0 - x2 / 2.0 + x2 * x2 / 24.0;
        let sinc = t * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
        (cos, sinc)
    } else {
        (x.cos(), x.sin() / omega)
    }
}

pub fn bose_evolution(alpha: f64, beta: f64, t: f64) -> Result<BoseEvolution> {
    crate::fock::check_bose_one_mode(alpha, beta)?;
    let w2 = beta * beta - alpha * alpha;
    let (c_a, c_adag) = if w2 == 0.0 {
        (Complex64::new(1.0, -beta * t), Complex64::new(0.0, -alpha * t))
    } else {
        let (cos, sinc) = cos_and_sinc(bose_omega(alpha, beta), t);
        (cos - I * beta * sinc, -I * alpha * sinc)
    };
    Ok(BoseEvolution { t, c_a, c_adag })
}

/// Blocks of `[[Φ, Ψ], [Ψ̄, Φ̄]] = exp(itK)` with `K = [[−C, −A], [Ā, C̄]]`,
/// so that `(a(t), a⁺(t))ᵀ = [[Φ, Ψ], [Ψ̄, Φ̄]] (a, a⁺)ᵀ`.
#[derive(Debug, Clone)]
pub struct NModeEvolution {
    pub t: f64,
    pub phi: CMatrix,
    pub psi: CMatrix,
}

impl NModeEvolution {
    pub fn block_matrix(&self) -> CMatrix {
        let n = self.phi.nrows();
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.phi);
        m.view_mut((0, n), (n, n)).copy_from(&self.psi);
        m.view_mut((n, 0), (n, n)).copy_from(&self.psi.map(|z| z.conj()));
        m.view_mut((n, n), (n, n)).copy_from(&self.phi.map(|z| z.conj()));
        m
    }
}

/// The block generator `K = [[−C, −A], [Ā, C̄]]`.
pub fn block_generator(a: &CMatrix, c: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut k = CMatrix::zeros(2 * n, 2 * n);
    k.view_mut((0, 0), (n, n)).copy_from(&(-c));
    k.view_mut((0, n), (n, n)).copy_from(&(-a));
    k.view_mut((n, 0), (n, n)).copy_from(&a.map(|z| z.conj()));
    k.view_mut((n, n), (n, n)).copy_from(&c.map(|z| z.conj()));
    k
}

pub fn nmode_block_exponential(a: &CMatrix, c: &CMatrix, t: f64) -> Result<NModeEvolution> {
    check_n_mode(a, c)?;
    let n = a.nrows();
    if n > MAX_BLOCK_MODES {
        return Err(Error::ResourceLimit(format!(
            "{n} modes exceeds the block-exponential guard of {MAX_BLOCK_MODES}"
        )));
    }
    let k = block_generator(a, c);
    let u = if t == 0.0 {
        identity(2 * n)
    } else if is_hermitian(&k, 1e-15) {
        // A = 0 makes K Hermitian.
        exp_i_hermitian(&k, t)?
    } else {
        expm(&(&k * (I * t)))
    };
    Ok(NModeEvolution {
        t,
        phi: u.view((0, 0), (n, n)).into_owned(),
        psi: u.view((0, n), (n, n)).into_owned(),
    })
}

/// Block exponentials over a grid.
pub fn nmode_path(a: &CMatrix, c: &CMatrix, ts: &[f64], exec: Execution) -> Result<Vec<NModeEvolution>> {
    check_n_mode(a, c)?;
    exec.map(ts, |&t| nmode_block_exponential(a, c, t)).into_iter().collect()
}

/// Residuals of the second-order equation satisfied by `Φ(t)`.
#[derive(Debug, Clone, Serialize)]
pub struct OdeResidualReport {
    /// Max entrywise residual over interior grid points.
    pub max_residual: f64,
    /// 2-norm condition number of `A`.
    pub condition_number: f64,
    /// `max |Φ(0) − 1|` when the grid starts at 0.
    pub initial_value_error: Option<f64>,
    /// `max |Φ̇(0) + iC|` (second-order one-sided difference) when the grid starts at 0.
    pub initial_derivative_error: Option<f64>,
}

/// Centered-difference residual of
/// `A⁻¹Φ̈ − i(C̄A⁻¹ − A⁻¹C)Φ̇ + (C̄A⁻¹C − Ā)Φ = 0`,
/// which for real `A, C` reads `A⁻¹Φ̈ − i[C, A⁻¹]Φ̇ + (CA⁻¹C − A)Φ = 0`.
pub fn ode_residual(a: &CMatrix, c: &CMatrix, ts: &[f64], path: &[NModeEvolution]) -> Result<OdeResidualReport> {
    check_n_mode(a, c)?;
    if ts.len() < 5 || path.len() != ts.len() {
        return Err(invalid("need at least 5 grid points with one evolution per point"));
    }
    let h = ts[1] - ts[0];
    if !(h > 0.0) || ts.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(invalid("t grid must be uniform and increasing"));
    }
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition_number < 1e14) {
        return Err(Error::Singular(format!("A has condition number {condition_number:e}")));
    }
    let a_inv = a
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("A is not invertible".into()))?;
    let c_bar = c.map(|z| z.conj());
    let a_bar = a.map(|z| z.conj());
    let first = (&c_bar * &a_inv - &a_inv * c) * (-I);
    let zeroth = &c_bar * &a_inv * c - a_bar;

    let mut max_residual: f64 = 0.0;
    for k in 1..ts.len() - 1 {
        let (prev, cur, next) = (&path[k - 1].phi, &path[k].phi, &path[k + 1].phi);
        let d1 = (next - prev) * re(1.0 / (2.0 * h));
        let d2 = (next - cur * re(2.0) + prev) * re(1.0 / (h * h));
        let r = &a_inv * d2 + &first * d1 + &zeroth * cur;
        max_residual = max_residual.max(max_abs(&r));
    }

    let (initial_value_error, initial_derivative_error) = if ts[0] == 0.0 {
        let n = a.nrows();
        let p = |k: usize| &path[k].phi;
        let d0 = (p(1) * re(4.0) - p(0) * re(3.0) - p(2)) * re(1.0 / (2.0 * h));
        (
            Some(max_abs(&(p(0) - identity(n)))),
            Some(max_abs(&(d0 + c * I))),
        )
    } else {
        (None, None)
    };
    Ok(OdeResidualReport {
        max_residual,
        condition_number,
        initial_value_error,
        initial_derivative_error,
    })
}
