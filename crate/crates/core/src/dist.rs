//! Meixner-type distribution families, classification of quadratic
//! Hamiltonians, inverse maps, densities, moments and sampling.
//!
//! Every family is stored together with its characteristic function under
//! the convention `φ_X(t) = E[e^{itX}]`:
//!
//! | family | `φ_X(t)` |
//! |---|---|
//! | MeixnerV | `e^{iμt} (cos(b/2) / cosh((at − ib)/2))^{2δ}` |
//! | Gamma | `e^{−iμt} (1 − iθt)^{−a}`, i.e. `X = θG − μ` with `G ~ Gamma(a, 1)` |
//! | NegativeBinomial | `p^r e^{−iμt} (1 − (1 − p)e^{−idt})^{−r}`, i.e. `X = −μ − dN` |
//! | TwoAtom | `p₁e^{itx₁} + p₂e^{itx₂}` |
//! | DiracDelta | `e^{itx₀}` |

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, Gamma as GammaSampler, Poisson};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::branch::log_at;
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::fock::check_bose_one_mode;
use crate::linalg::{re, I};
use crate::special::{ln_gamma, ln_gamma_real};

/// Tag written to and accepted from the `"convention"` JSON field.
pub const CF_CONVENTION: &str = "E[exp(itX)]";

/// Tolerance on `p₁ + p₂ = 1` for two-atom laws.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Samples drawn per independent generator stream.
pub const SAMPLE_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    MeixnerV { a: f64, b: f64, delta: f64, mu: f64 },
    Gamma { a: f64, theta: f64, mu: f64 },
    NegativeBinomial { r: f64, p: f64, mu: f64, d: f64 },
    TwoAtom { x1: f64, p1: f64, x2: f64, p2: f64 },
    DiracDelta { x0: f64 },
}

fn finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {x}")))
    }
}

impl DistributionSpec {
    pub fn meixner_v(a: f64, b: f64, delta: f64, mu: f64) -> Result<Self> {
        Self::MeixnerV { a, b, delta, mu }.validated()
    }

    pub fn gamma(a: f64, theta: f64, mu: f64) -> Result<Self> {
        Self::Gamma { a, theta, mu }.validated()
    }

    pub fn negative_binomial(r: f64, p: f64, mu: f64, d: f64) -> Result<Self> {
        Self::NegativeBinomial { r, p, mu, d }.validated()
    }

    pub fn two_atom(x1: f64, p1: f64, x2: f64, p2: f64) -> Result<Self> {
        Self::TwoAtom { x1, p1, x2, p2 }.validated()
    }

    pub fn dirac(x0: f64) -> Result<Self> {
        Self::DiracDelta { x0 }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::MeixnerV { a, b, delta, mu } => {
                finite("mu", mu)?;
                if !(a > 0.0 && a.is_finite()) {
                    return Err(invalid(format!("MeixnerV needs a > 0, got {a}")));
                }
                if !(b > -PI && b < PI) {
                    return Err(invalid(format!("MeixnerV needs b in (-pi, pi), got {b}")));
                }
                if !(delta > 0.0 && delta.is_finite()) {
                    return Err(invalid(format!("MeixnerV needs delta > 0, got {delta}")));
                }
            }
            Self::Gamma { a, theta, mu } => {
                finite("mu", mu)?;
                if !(a > 0.0 && a.is_finite()) {
                    return Err(invalid(format!("Gamma needs a > 0, got {a}")));
                }
                if !(theta != 0.0 && theta.is_finite()) {
                    return Err(invalid(format!("Gamma needs theta != 0, got {theta}")));
                }
            }
            Self::NegativeBinomial { r, p, mu, d } => {
                finite("r", r)?;
                finite("mu", mu)?;
                finite("d", d)?;
                if r == 0.0 {
                    return Err(invalid("NegativeBinomial needs r != 0"));
                }
                if !(p > 0.0 && p < 1.0) {
                    return Err(invalid(format!("NegativeBinomial needs p in (0, 1), got {p}")));
                }
                if d == 0.0 {
                    return Err(invalid("NegativeBinomial needs d != 0"));
                }
            }
            Self::TwoAtom { x1, p1, x2, p2 } => {
                finite("x1", x1)?;
                finite("x2", x2)?;
                for (name, p) in [("p1", p1), ("p2", p2)] {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(invalid(format!("TwoAtom needs {name} in [0, 1], got {p}")));
                    }
                }
                if (p1 + p2 - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(invalid(format!("TwoAtom weights sum to {}, not 1", p1 + p2)));
                }
            }
            Self::DiracDelta { x0 } => finite("x0", x0)?,
        }
        Ok(())
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            Self::MeixnerV { .. } => "MeixnerV",
            Self::Gamma { .. } => "Gamma",
            Self::NegativeBinomial { .. } => "NegativeBinomial",
            Self::TwoAtom { .. } => "TwoAtom",
            Self::DiracDelta { .. } => "DiracDelta",
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Self::NegativeBinomial { .. } | Self::TwoAtom { .. } | Self::DiracDelta { .. })
    }

    fn param_names(class: &str) -> Option<&'static [&'static str]> {
        Some(match class {
            "MeixnerV" => &["a", "b", "delta", "mu"],
            "Gamma" => &["a", "theta", "mu"],
            "NegativeBinomial" => &["r", "p", "mu", "d"],
            "TwoAtom" => &["x1", "p1", "x2", "p2"],
            "DiracDelta" => &["x0"],
            _ => return None,
        })
    }

    fn param_values(&self) -> Vec<f64> {
        match *self {
            Self::MeixnerV { a, b, delta, mu } => vec![a, b, delta, mu],
            Self::Gamma { a, theta, mu } => vec![a, theta, mu],
            Self::NegativeBinomial { r, p, mu, d } => vec![r, p, mu, d],
            Self::TwoAtom { x1, p1, x2, p2 } => vec![x1, p1, x2, p2],
            Self::DiracDelta { x0 } => vec![x0],
        }
    }

    pub fn to_json(&self) -> Value {
        let names = Self::param_names(self.class_name()).unwrap();
        let params: Map<String, Value> = names
            .iter()
            .zip(self.param_values())
            .map(|(n, v)| (n.to_string(), json!(v)))
            .collect();
        json!({"class": self.class_name(), "params": params, "convention": CF_CONVENTION})
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Schema {
            path: "$".into(),
            message: format!("malformed JSON: {e}"),
        })?;
        Self::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let schema = |path: &str, message: String| Error::Schema { path: path.into(), message };
        let obj = value
            .as_object()
            .ok_or_else(|| schema("$", "expected an object".into()))?;
        let class = obj
            .get("class")
            .ok_or_else(|| schema("$.class", "missing field".into()))?
            .as_str()
            .ok_or_else(|| schema("$.class", "expected a string".into()))?;
        let names = Self::param_names(class).ok_or_else(|| {
            schema(
                "$.class",
                format!("unknown class {class:?}; expected MeixnerV, Gamma, NegativeBinomial, TwoAtom or DiracDelta"),
            )
        })?;
        if let Some(conv) = obj.get("convention") {
            if conv.as_str() != Some(CF_CONVENTION) {
                return Err(schema("$.convention", format!("expected {CF_CONVENTION:?}, got {conv}")));
            }
        }
        let params = obj
            .get("params")
            .ok_or_else(|| schema("$.params", "missing field".into()))?
            .as_object()
            .ok_or_else(|| schema("$.params", "expected an object".into()))?;
        if let Some(extra) = params.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(schema(&format!("$.params.{extra}"), format!("unknown parameter for {class}")));
        }
        let mut v = Vec::with_capacity(names.len());
        for name in names {
            let path = format!("$.params.{name}");
            let x = params
                .get(*name)
                .ok_or_else(|| schema(&path, "missing field".into()))?
                .as_f64()
                .ok_or_else(|| schema(&path, "expected a number".into()))?;
            v.push(x);
        }
        let spec = match class {
            "MeixnerV" => Self::MeixnerV { a: v[0], b: v[1], delta: v[2], mu: v[3] },
            "Gamma" => Self::Gamma { a: v[0], theta: v[1], mu: v[2] },
            "NegativeBinomial" => Self::NegativeBinomial { r: v[0], p: v[1], mu: v[2], d: v[3] },
            "TwoAtom" => Self::TwoAtom { x1: v[0], p1: v[1], x2: v[2], p2: v[3] },
            _ => Self::DiracDelta { x0: v[0] },
        };
        spec.validate().map_err(|e| schema("$.params", e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassLabel {
    MeixnerV,
    Gamma,
    NegativeBinomial,
    Bernoulli,
    Dirac,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FermionicMeixnerClass {
    First,
    Second,
}

/// The two readings of the fermionic class naming. `by_definition` assigns
/// the second class to `α = β`; `by_limit` assigns it to `ω = 0`, where the
/// law is the Dirac mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FermiClassMetadata {
    pub by_definition: FermionicMeixnerClass,
    pub by_limit: FermionicMeixnerClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub class_label: ClassLabel,
    pub dist: DistributionSpec,
    /// `α² − β²` for both families.
    pub det_h: f64,
    pub omega: Complex64,
    pub fermi: Option<FermiClassMetadata>,
}

impl ClassificationResult {
    pub fn to_json(&self) -> Value {
        let mut v = self.dist.to_json();
        let obj = v.as_object_mut().unwrap();
        obj.insert("class_label".into(), json!(self.class_label));
        obj.insert("det_h".into(), json!(self.det_h));
        obj.insert("omega".into(), json!({"re": self.omega.re, "im": self.omega.im}));
        if let Some(f) = self.fermi {
            obj.insert(
                "fermionic_meixner_class".into(),
                json!({"by_definition": f.by_definition, "by_limit": f.by_limit}),
            );
        }
        v
    }
}

/// Classify the vacuum law of `½α(a⁺² + a²) + βa⁺a` by the sign of `α² − β²`.
pub fn classify_bose(alpha: f64, beta: f64) -> Result<ClassificationResult> {
    check_bose_one_mode(alpha, beta)?;
    let det_h = alpha * alpha - beta * beta;
    let abs_omega = det_h.abs().sqrt();
    let (class_label, dist, omega) = if alpha > beta.abs() {
        let b = 2.0 * beta.atan2(abs_omega);
        let dist = DistributionSpec::meixner_v(2.0 * abs_omega, b, 0.25, -beta / 2.0)?;
        (ClassLabel::MeixnerV, dist, Complex64::new(0.0, -abs_omega))
    } else if alpha == beta.abs() {
        let dist = DistributionSpec::gamma(0.5, beta, beta / 2.0)?;
        (ClassLabel::Gamma, dist, re(0.0))
    } else if alpha == 0.0 {
        // α = 0 gives p = 1, the Dirac mass at 0.
        (ClassLabel::Dirac, DistributionSpec::dirac(0.0)?, re(beta.abs()))
    } else {
        let w = beta.signum() * abs_omega;
        let p = 2.0 * w / (w + beta);
        let dist = DistributionSpec::negative_binomial(0.5, p, (beta - w) / 2.0, -2.0 * w)?;
        (ClassLabel::NegativeBinomial, dist, re(abs_omega))
    };
    Ok(ClassificationResult { class_label, dist, det_h, omega, fermi: None })
}

/// Classify the vacuum law of `α(n₁ + n₂) + β(a₁⁺a₂⁺ + a₂a₁)`.
pub fn classify_fermi(alpha: f64, beta: f64) -> Result<ClassificationResult> {
    finite("alpha", alpha)?;
    finite("beta", beta)?;
    let omega = alpha.hypot(beta);
    let det_h = alpha * alpha - beta * beta;
    let by_definition = if alpha == beta { FermionicMeixnerClass::Second } else { FermionicMeixnerClass::First };
    let by_limit = if omega == 0.0 { FermionicMeixnerClass::Second } else { FermionicMeixnerClass::First };
    let fermi = Some(FermiClassMetadata { by_definition, by_limit });
    let (class_label, dist) = if omega == 0.0 {
        (ClassLabel::Dirac, DistributionSpec::dirac(0.0)?)
    } else {
        let (x1, p1) = (alpha + omega, 0.5 * (1.0 - alpha / omega));
        let (x2, p2) = (alpha - omega, 0.5 * (1.0 + alpha / omega));
        if p1 == 0.0 {
            (ClassLabel::Dirac, DistributionSpec::dirac(x2)?)
        } else if p2 == 0.0 {
            (ClassLabel::Dirac, DistributionSpec::dirac(x1)?)
        } else {
            (ClassLabel::Bernoulli, DistributionSpec::two_atom(x1, p1, x2, 1.0 - p1)?)
        }
    };
    Ok(ClassificationResult { class_label, dist, det_h, omega: re(omega), fermi })
}

/// `t ↦ e^{imt} cf(kt)^q`: time shift `m`, independent copying `q` and
/// time rescaling `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimpleTransform {
    pub m: f64,
    pub q: f64,
    pub k: f64,
}

impl SimpleTransform {
    pub fn new(m: f64, q: f64, k: f64) -> Result<Self> {
        finite("m", m)?;
        if !(q > 0.0 && q.is_finite()) {
            return Err(invalid(format!("power q must be > 0, got {q}")));
        }
        if !(k != 0.0 && k.is_finite()) {
            return Err(invalid(format!("rescaling k must be nonzero, got {k}")));
        }
        Ok(Self { m, q, k })
    }

    /// Evaluate at `t`. Non-integer powers follow the continuous logarithm of
    /// `s ↦ cf(ks)` from `s = 0`.
    pub fn apply<F>(&self, cf: F, t: f64) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        let shift = (I * (self.m * t)).exp();
        let inner = |s: f64| cf(self.k * s);
        let powered = if self.q.fract() == 0.0 && self.q <= i32::MAX as f64 {
            inner(t).powi(self.q as i32)
        } else {
            let steps = (8.0 * (self.k * t).abs()).ceil().max(16.0) as usize;
            (self.q * log_at(inner, t, steps)?).exp()
        };
        Ok(shift * powered)
    }
}

/// Curried form of [`SimpleTransform::apply`].
pub fn simple_transform<F>(cf: F, m: f64, q: f64, k: f64) -> Result<impl Fn(f64) -> Result<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    let tr = SimpleTransform::new(m, q, k)?;
    Ok(move |t: f64| tr.apply(&cf, t))
}

/// A one-mode Hamiltonian together with the chain of simple transformations
/// that maps its vacuum cf to the target law's cf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HamiltonianRecipe {
    pub alpha: f64,
    pub beta: f64,
    pub steps: Vec<SimpleTransform>,
}

impl HamiltonianRecipe {
    /// Apply the steps in order to the vacuum cf of `(alpha, beta)`.
    pub fn cf(&self, t: f64) -> Result<Complex64> {
        let base = |s: f64| crate::charfun::bose_cf_unchecked(self.alpha, self.beta, s);
        match self.steps.as_slice() {
            [] => Ok(base(t)),
            [only] => only.apply(base, t),
            [first, second] => {
                let inner = |s: f64| first.apply(base, s).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                second.apply(inner, t)
            }
            _ => Err(Error::Unsupported("recipes have at most two steps".into())),
        }
    }
}

/// `α = (a/2)/cos(b/2)`, `β = (a/2) tan(b/2)`. The vacuum law of `(α, β)` is
/// `MeixnerV(a, b, 1/4, μ′)` with `μ′ = −β/2`; the recipe shifts by `−μ′`,
/// raises to the power `4δ` and shifts by `μ`.
pub fn hamiltonian_from_meixner(a: f64, b: f64, delta: f64, mu: f64) -> Result<HamiltonianRecipe> {
    DistributionSpec::meixner_v(a, b, delta, mu)?;
    let cos = (b / 2.0).cos();
    if cos.abs() < 1e-300 {
        return Err(invalid("cos(b/2) = 0"));
    }
    let alpha = (a / 2.0) / cos;
    let beta = (a / 2.0) * (b / 2.0).tan();
    let mu_vac = -beta / 2.0;
    Ok(HamiltonianRecipe {
        alpha,
        beta,
        steps: vec![SimpleTransform::new(-mu_vac, 1.0, 1.0)?, SimpleTransform::new(mu, 4.0 * delta, 1.0)?],
    })
}

/// `ω = p/(2 − p)`, `α = √(1 − ω²)`, `β = 1`. The vacuum law has
/// `μ′ = (1 − ω)/2` and `d′ = −2ω`; the recipe rescales time by `λ = d/d′`
/// (removing the shift `μ′λ`), raises to the power `2r` and shifts by `−μ`.
pub fn hamiltonian_from_negbin(p: f64, r: f64, mu: f64, d: f64) -> Result<HamiltonianRecipe> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("p must lie in (0, 1), got {p}")));
    }
    if !(r > 0.0) {
        return Err(invalid(format!("r must be > 0 for a Hamiltonian realization, got {r}")));
    }
    DistributionSpec::negative_binomial(r, p, mu, d)?;
    let omega = p / (2.0 - p);
    let alpha = (1.0 - omega * omega).sqrt();
    let (mu_vac, d_vac) = ((1.0 - omega) / 2.0, -2.0 * omega);
    let lambda = d / d_vac;
    Ok(HamiltonianRecipe {
        alpha,
        beta: 1.0,
        steps: vec![
            SimpleTransform::new(mu_vac * lambda, 1.0, lambda)?,
            SimpleTransform::new(-mu, 2.0 * r, 1.0)?,
        ],
    })
}

fn meixner_ln_norm(a: f64, b: f64, delta: f64) -> f64 {
    2.0 * delta * (2.0 * (b / 2.0).cos()).ln() - (2.0 * PI * a).ln() - ln_gamma_real(2.0 * delta)
}

/// Density of a continuous law. Atomic laws return [`Error::AtomicLaw`].
pub fn density(spec: &DistributionSpec, x: f64) -> Result<f64> {
    match *spec {
        DistributionSpec::MeixnerV { a, b, delta, mu } => {
            let y = (x - mu) / a;
            let ln = meixner_ln_norm(a, b, delta) + b * y + 2.0 * ln_gamma(Complex64::new(delta, y)).re;
            Ok(ln.exp())
        }
        DistributionSpec::Gamma { a, theta, mu } => {
            let y = (x + mu) / theta;
            if y <= 0.0 {
                return Ok(0.0);
            }
            Ok(((a - 1.0) * y.ln() - y - ln_gamma_real(a)).exp() / theta.abs())
        }
        _ => Err(Error::AtomicLaw),
    }
}

/// Lower support edge `−μ` (reached as `θ > 0`) of a Gamma law, else `None`.
pub fn support_edge(spec: &DistributionSpec) -> Option<f64> {
    match *spec {
        DistributionSpec::Gamma { mu, .. } => Some(-mu),
        _ => None,
    }
}

/// Default cumulative weight after which negative-binomial atoms stop.
pub const NB_TAIL_TOL: f64 = 1e-12;
const NB_MAX_TERMS: usize = 10_000_000;

/// The first `n` atoms `(−μ − kd, C(r,k) p^r (1 − p)^k)` with the rising-factorial `C(r,k)`.
pub fn nb_atoms(r: f64, p: f64, mu: f64, d: f64, n: usize) -> Vec<(f64, f64)> {
    let q = 1.0 - p;
    let mut w = p.powf(r);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        out.push((-mu - k as f64 * d, w));
        w *= (r + k as f64) / (k as f64 + 1.0) * q;
    }
    out
}

/// Atoms of an atomic law. Negative-binomial atoms stop once the weights sum
/// to within [`NB_TAIL_TOL`] of 1.
pub fn atoms(spec: &DistributionSpec) -> Result<Vec<(f64, f64)>> {
    match *spec {
        DistributionSpec::TwoAtom { x1, p1, x2, p2 } => Ok(vec![(x1, p1), (x2, p2)]),
        DistributionSpec::DiracDelta { x0 } => Ok(vec![(x0, 1.0)]),
        DistributionSpec::NegativeBinomial { r, p, mu, d } => {
            if r < 0.0 {
                return Err(Error::Unsupported("atoms need r > 0".into()));
            }
            let q = 1.0 - p;
            let mut w = p.powf(r);
            let mut out = Vec::new();
            let mut total = 0.0;
            for k in 0..NB_MAX_TERMS {
                out.push((-mu - k as f64 * d, w));
                total += w;
                if 1.0 - total <= NB_TAIL_TOL {
                    break;
                }
                w *= (r + k as f64) / (k as f64 + 1.0) * q;
            }
            Ok(out)
        }
        _ => Err(Error::ContinuousLaw),
    }
}

/// `φ_X(t) = E[e^{itX}]` for each family (see the module table).
pub fn dist_cf(spec: &DistributionSpec, t: f64) -> Complex64 {
    if t == 0.0 {
        return re(1.0);
    }
    match *spec {
        DistributionSpec::MeixnerV { a, b, delta, mu } => {
            let z = Complex64::new(a * t, -b) / 2.0;
            let ratio = re((b / 2.0).cos()) / z.cosh();
            (I * (mu * t)).exp() * ratio.powf(2.0 * delta)
        }
        DistributionSpec::Gamma { a, theta, mu } => {
            (I * (-mu * t)).exp() * Complex64::new(1.0, -theta * t).powf(-a)
        }
        DistributionSpec::NegativeBinomial { r, p, mu, d } => {
            let base = re(1.0) - (1.0 - p) * (I * (-d * t)).exp();
            p.powf(r) * (I * (-mu * t)).exp() * base.powf(-r)
        }
        DistributionSpec::TwoAtom { x1, p1, x2, p2 } => {
            p1 * (I * (x1 * t)).exp() + p2 * (I * (x2 * t)).exp()
        }
        DistributionSpec::DiracDelta { x0 } => (I * (x0 * t)).exp(),
    }
}

/// Cumulants `κ₁..κ₄` of the continuous and negative-binomial families.
fn cumulants(spec: &DistributionSpec) -> Option<[f64; 4]> {
    match *spec {
        DistributionSpec::MeixnerV { a, b, delta, mu } => {
            // log φ = iμt + 2δ log cos(b/2) − 2δ ln cosh(z), z = (at − ib)/2,
            // with tanh(−ib/2) = −i tan(b/2).
            let tau = Complex64::new(0.0, -(b / 2.0).tan());
            let sech2 = 1.0 - tau * tau;
            let l = [tau, sech2, -2.0 * tau * sech2, -2.0 * sech2 * (1.0 - 3.0 * tau * tau)];
            let mut k = [0.0; 4];
            let mut minus_i_pow = re(1.0);
            for (n, ln) in l.iter().enumerate() {
                minus_i_pow *= -I;
                let deriv = -2.0 * delta * (a / 2.0).powi(n as i32 + 1) * ln;
                k[n] = (minus_i_pow * deriv).re;
            }
            k[0] += mu;
            Some(k)
        }
        DistributionSpec::Gamma { a, theta, mu } => Some([
            a * theta - mu,
            a * theta.powi(2),
            2.0 * a * theta.powi(3),
            6.0 * a * theta.powi(4),
        ]),
        DistributionSpec::NegativeBinomial { r, p, mu, d } => {
            let q = 1.0 - p;
            let kn = [
                r * q / p,
                r * q / p.powi(2),
                r * q * (1.0 + q) / p.powi(3),
                r * q * (1.0 + 4.0 * q + q * q) / p.powi(4),
            ];
            Some([
                -mu - d * kn[0],
                d.powi(2) * kn[1],
                -d.powi(3) * kn[2],
                d.powi(4) * kn[3],
            ])
        }
        _ => None,
    }
}

fn raw_from_cumulants(k: [f64; 4]) -> [f64; 4] {
    let [k1, k2, k3, k4] = k;
    [
        k1,
        k2 + k1 * k1,
        k3 + 3.0 * k2 * k1 + k1.powi(3),
        k4 + 4.0 * k3 * k1 + 3.0 * k2 * k2 + 6.0 * k2 * k1 * k1 + k1.powi(4),
    ]
}

/// Raw moments `E[X], …, E[X^order]` for `order ≤ 4`.
pub fn moments(spec: &DistributionSpec, order: usize) -> Result<Vec<f64>> {
    if order > 4 {
        return Err(Error::Unsupported(format!("moments are available up to order 4, got {order}")));
    }
    let raw = match *spec {
        DistributionSpec::TwoAtom { x1, p1, x2, p2 } => {
            [1, 2, 3, 4].map(|n| p1 * x1.powi(n) + p2 * x2.powi(n))
        }
        DistributionSpec::DiracDelta { x0 } => [1, 2, 3, 4].map(|n| x0.powi(n)),
        _ => raw_from_cumulants(cumulants(spec).unwrap()),
    };
    Ok(raw[..order].to_vec())
}

/// Raw moments from sixth-order central differences of `cf` at 0 with step
/// `h`, Richardson-extrapolated between `h` and `h/2`.
pub fn finite_difference_moments<F>(cf: F, order: usize, h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Complex64,
{
    if order > 4 {
        return Err(Error::Unsupported(format!("moments are available up to order 4, got {order}")));
    }
    // Central-difference weights on offsets −4..4, sixth order in h.
    const W: [[f64; 9]; 4] = [
        [1.0 / 280.0, -4.0 / 105.0, 1.0 / 5.0, -4.0 / 5.0, 0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0],
        [-1.0 / 560.0, 8.0 / 315.0, -1.0 / 5.0, 8.0 / 5.0, -205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0],
        [-7.0 / 240.0, 3.0 / 10.0, -169.0 / 120.0, 61.0 / 30.0, 0.0, -61.0 / 30.0, 169.0 / 120.0, -3.0 / 10.0, 7.0 / 240.0],
        [7.0 / 240.0, -2.0 / 5.0, 169.0 / 60.0, -122.0 / 15.0, 91.0 / 8.0, -122.0 / 15.0, 169.0 / 60.0, -2.0 / 5.0, 7.0 / 240.0],
    ];
    let derivative = |n: usize, h: f64| -> Complex64 {
        let s: Complex64 = (0..9).map(|j| W[n - 1][j] * cf((j as f64 - 4.0) * h)).sum();
        s / h.powi(n as i32)
    };
    let mut out = Vec::with_capacity(order);
    let mut minus_i_pow = re(1.0);
    for n in 1..=order {
        minus_i_pow *= -I;
        let coarse = derivative(n, h);
        let fine = derivative(n, h / 2.0);
        let extrapolated = (64.0 * fine - coarse) / 63.0;
        out.push((minus_i_pow * extrapolated).re);
    }
    Ok(out)
}

/// `n` samples, deterministic given `seed` and independent of `exec`.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    sample_with(spec, n, seed, Execution::default())
}

pub fn sample_with(spec: &DistributionSpec, n: usize, seed: u64, exec: Execution) -> Result<Vec<f64>> {
    spec.validate()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let sampler = Sampler::new(spec)?;
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let parts = exec.map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let len = SAMPLE_CHUNK.min(n - c * SAMPLE_CHUNK);
        (0..len).map(|_| sampler.draw(&mut rng)).collect::<Vec<f64>>()
    });
    Ok(parts.concat())
}

enum Sampler {
    Const(f64),
    TwoAtom { x1: f64, p1: f64, x2: f64 },
    Gamma { g: GammaSampler<f64>, theta: f64, mu: f64 },
    NegBin { g: GammaSampler<f64>, mu: f64, d: f64 },
    MeixnerV { spec: DistributionSpec, envelope: Cauchy<f64>, loc: f64, scale: f64, bound: f64 },
}

impl Sampler {
    fn new(spec: &DistributionSpec) -> Result<Self> {
        Ok(match *spec {
            DistributionSpec::DiracDelta { x0 } => Sampler::Const(x0),
            DistributionSpec::TwoAtom { x1, p1, x2, .. } => Sampler::TwoAtom { x1, p1, x2 },
            DistributionSpec::Gamma { a, theta, mu } => Sampler::Gamma {
                g: GammaSampler::new(a, 1.0).map_err(|e| invalid(e.to_string()))?,
                theta,
                mu,
            },
            DistributionSpec::NegativeBinomial { r, p, mu, d } => {
                if r < 0.0 {
                    return Err(Error::Unsupported("sampling needs r > 0".into()));
                }
                Sampler::NegBin {
                    g: GammaSampler::new(r, (1.0 - p) / p).map_err(|e| invalid(e.to_string()))?,
                    mu,
                    d,
                }
            }
            DistributionSpec::MeixnerV { .. } => {
                let m = moments(spec, 2)?;
                let (loc, scale) = (m[0], (m[1] - m[0] * m[0]).sqrt());
                let envelope = Cauchy::new(loc, scale).map_err(|e| invalid(e.to_string()))?;
                let cauchy_pdf = |x: f64| 1.0 / (PI * scale * (1.0 + ((x - loc) / scale).powi(2)));
                let mut bound: f64 = 0.0;
                let span = 80.0 * scale;
                let steps = 40_000;
                for k in 0..=steps {
                    let x = loc - span + 2.0 * span * k as f64 / steps as f64;
                    bound = bound.max(density(spec, x)? / cauchy_pdf(x));
                }
                Sampler::MeixnerV { spec: *spec, envelope, loc, scale, bound: 1.05 * bound }
            }
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Const(x) => *x,
            Sampler::TwoAtom { x1, p1, x2 } => {
                if rng.random::<f64>() < *p1 {
                    *x1
                } else {
                    *x2
                }
            }
            Sampler::Gamma { g, theta, mu } => theta * g.sample(rng) - mu,
            Sampler::NegBin { g, mu, d } => {
                let lambda = g.sample(rng);
                let count = if lambda > 0.0 {
                    Poisson::new(lambda).map(|p| p.sample(rng)).unwrap_or(0.0)
                } else {
                    0.0
                };
                -mu - d * count
            }
            Sampler::MeixnerV { spec, envelope, loc, scale, bound } => {
                let (loc, scale) = (*loc, *scale);
                loop {
                    let x = envelope.sample(rng);
                    let g = 1.0 / (PI * scale * (1.0 + ((x - loc) / scale).powi(2)));
                    let u: f64 = rng.random();
                    if u * bound * g <= density(spec, x).unwrap_or(0.0) {
                        return x;
                    }
                }
            }
        }
    }
}
