//! Composite Simpson quadrature with a Richardson error estimate.

/// Composite Simpson rule on `[a, b]` with `n` intervals (rounded up to even).
pub fn simpson<F>(f: F, a: f64, b: f64, n: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

/// Simpson weights for `n` intervals (rounded up to even), so callers can
/// reuse one set of nodes across many integrands.
pub fn simpson_weights(n: usize) -> Vec<f64> {
    let n = (n.max(2) + 1) & !1;
    (0..=n)
        .map(|k| match k {
            0 => 1.0,
            k if k == n => 1.0,
            k if k % 2 == 1 => 4.0,
            _ => 2.0,
        } / 3.0)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    /// Richardson-extrapolated value `(16 S_{2n} − S_n)/15`.
    pub value: f64,
    /// `|S_{2n} − S_n| / 15`.
    pub error: f64,
}

/// Simpson on `n` and `2n` intervals combined by Richardson extrapolation.
pub fn simpson_richardson<F>(f: F, a: f64, b: f64, n: usize) -> QuadratureEstimate
where
    F: Fn(f64) -> f64,
{
    let coarse = simpson(&f, a, b, n);
    let fine = simpson(&f, a, b, 2 * ((n.max(2) + 1) & !1));
    QuadratureEstimate { value: fine + (fine - coarse) / 15.0, error: (fine - coarse).abs() / 15.0 }
}
