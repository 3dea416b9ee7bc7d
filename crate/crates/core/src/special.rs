//! Complex log-gamma via the Lanczos approximation (g = 7, 9 terms) with
//! reflection for the left half-plane.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(z). The imaginary part is determined modulo 2π; the real part,
/// ln |Γ(z)|, is unambiguous.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &p) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += p / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// ln Γ(x) for real x > 0.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// |Γ(δ + i y)|².
pub fn gamma_abs_sq(delta: f64, y: f64) -> f64 {
    (2.0 * ln_gamma(Complex64::new(delta, y)).re).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn real_axis_matches_reference() {
        for &x in &[0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 42.5, 120.0] {
            let want = statrs::function::gamma::ln_gamma(x);
            let got = ln_gamma_real(x);
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "x={x}: {got} vs {want}");
        }
        assert!((ln_gamma_real(0.5) - PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_moduli_on_vertical_lines() {
        // |Γ(1/2 + iy)|² = π / cosh(πy),  |Γ(1 + iy)|² = πy / sinh(πy)
        for k in -40..=40 {
            let y = k as f64 * 0.37;
            assert!(rel(gamma_abs_sq(0.5, y), PI / (PI * y).cosh()) < 1e-12, "y={y}");
            if y != 0.0 {
                assert!(rel(gamma_abs_sq(1.0, y), PI * y / (PI * y).sinh()) < 1e-12, "y={y}");
            }
        }
    }

    #[test]
    fn quarter_line_duplication_identity() {
        // |Γ(1/4 + iy) Γ(3/4 + iy)| relates to |Γ(1/2 + 2iy)| by the duplication formula:
        // Γ(w)Γ(w+1/2) = 2^{1−2w} √π Γ(2w)
        for k in -20..=20 {
            let y = k as f64 * 0.41;
            let w = Complex64::new(0.25, y);
            let lhs = ln_gamma(w).re + ln_gamma(w + 0.5).re;
            let rhs = (1.0 - 0.5) * 2f64.ln() + 0.5 * PI.ln() + ln_gamma(2.0 * w).re;
            assert!((lhs - rhs).abs() < 1e-12, "y={y}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn recurrence_holds_in_the_left_half_plane() {
        let z = Complex64::new(-2.3, 0.7);
        let lhs = ln_gamma(z + 1.0).re;
        let rhs = ln_gamma(z).re + z.norm().ln();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
