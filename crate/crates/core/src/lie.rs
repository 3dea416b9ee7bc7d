//! Quadratic Fermi and Bose algebra generators and their commutation
//! relations, checked as matrix residuals.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fock::{Family, OperatorSet};
use crate::linalg::{commutator, max_abs, re, CMatrix};

/// Scaling of the one-mode Bose realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoseScaling {
    /// `T1 = a⁺²/2, T2 = a²/2, T3 = a⁺a + 1/2`; satisfies every relation.
    #[default]
    Normalized,
    /// `T1 = a⁺², T2 = a², T3 = 4a⁺a + 2`. Satisfies `[T2, T1] = T3` but gives
    /// `[T3, T1] = 8 T1` and `[T3, T2] = −8 T2`.
    Unnormalized,
}

/// Generators `S1, S2, S3, S0` (Fermi: `F⁺, F⁻, N_F, 1`) or `T1, T2, T3, T0`
/// (Bose), stored in that order.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub family: Family,
    pub raising: CMatrix,
    pub lowering: CMatrix,
    pub cartan: CMatrix,
    pub unit: CMatrix,
    /// `M_F = 1 − N_F` (Fermi only).
    pub m_f: Option<CMatrix>,
    /// Per-mode cutoff of the underlying Bose truncation.
    cutoff: usize,
}

pub fn fermi_generators(ops: &OperatorSet) -> Result<GeneratorSet> {
    if ops.family != Family::Fermi || ops.n_modes != 2 {
        return Err(invalid("fermi_generators needs the two-mode fermionic operators"));
    }
    let (a1, a2) = (&ops.annihilators[0], &ops.annihilators[1]);
    let (a1d, a2d) = (&ops.creators[0], &ops.creators[1]);
    let lowering = a1 * a2;
    let raising = a2d * a1d;
    let cartan = a2d * a2 + a1d * a1;
    let unit = ops.identity();
    let m_f = &unit - &cartan;
    Ok(GeneratorSet {
        family: Family::Fermi,
        raising,
        lowering,
        cartan,
        unit,
        m_f: Some(m_f),
        cutoff: 2,
    })
}

pub fn bose_generators(ops: &OperatorSet) -> Result<GeneratorSet> {
    bose_generators_with(ops, BoseScaling::Normalized)
}

pub fn bose_generators_with(ops: &OperatorSet, scaling: BoseScaling) -> Result<GeneratorSet> {
    if ops.family != Family::Bose || ops.n_modes != 1 {
        return Err(invalid("bose_generators needs one-mode bosonic operators"));
    }
    if ops.cutoff < 4 {
        return Err(invalid(format!(
            "cutoff must be at least 4 for the quadratic relations to be testable, got {}",
            ops.cutoff
        )));
    }
    let a = &ops.annihilators[0];
    let ad = &ops.creators[0];
    let unit = ops.identity();
    let number = ad * a;
    let (raising, lowering, cartan) = match scaling {
        BoseScaling::Normalized => (
            ad * ad * re(0.5),
            a * a * re(0.5),
            &number + &unit * re(0.5),
        ),
        BoseScaling::Unnormalized => (ad * ad, a * a, &number * re(4.0) + &unit * re(2.0)),
    };
    Ok(GeneratorSet {
        family: Family::Bose,
        raising,
        lowering,
        cartan,
        unit,
        m_f: None,
        cutoff: ops.cutoff,
    })
}

/// One line of a relation check.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RelationResidual {
    pub relation: String,
    pub subspace: String,
    pub max_residual: f64,
}

/// Residuals of all relations of a generator set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RelationReport {
    pub family: Family,
    pub residuals: Vec<RelationResidual>,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }

    pub fn get(&self, relation: &str) -> Option<&RelationResidual> {
        self.residuals.iter().find(|r| r.relation == relation)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.residuals).expect("report serializes")
    }
}

/// Max modulus over the columns (basis vectors) `0..=last`.
fn residual_on(m: &CMatrix, last: usize) -> f64 {
    (0..=last.min(m.ncols() - 1))
        .flat_map(|j| m.column(j).iter().map(|z| z.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

pub fn check_relations(gen: &GeneratorSet) -> RelationReport {
    let (s1, s2, s3, s0) = (&gen.raising, &gen.lowering, &gen.cartan, &gen.unit);
    let mut residuals = Vec::new();
    let mut push = |relation: &str, subspace: &str, value: f64| {
        residuals.push(RelationResidual {
            relation: relation.to_string(),
            subspace: subspace.to_string(),
            max_residual: value,
        })
    };

    match gen.family {
        Family::Fermi => {
            let m_f = gen.m_f.as_ref().expect("fermionic generators carry M_F");
            let full = "full";
            push("[F-,F+] = 1 - N_F", full, max_abs(&(commutator(s2, s1) - m_f)));
            push("[N_F,F+] = 2F+", full, max_abs(&(commutator(s3, s1) - s1 * re(2.0))));
            push("[M_F,F+] = -2F+", full, max_abs(&(commutator(m_f, s1) + s1 * re(2.0))));
            push("[N_F,F-] = -2F-", full, max_abs(&(commutator(s3, s2) + s2 * re(2.0))));
            push("[M_F,F-] = 2F-", full, max_abs(&(commutator(m_f, s2) - s2 * re(2.0))));
            push("[F+,1] = 0", full, max_abs(&commutator(s1, s0)));
            push("[F-,1] = 0", full, max_abs(&commutator(s2, s0)));
            push("[N_F,1] = 0", full, max_abs(&commutator(s3, s0)));
            push("(F+)* = F-", full, max_abs(&(s1.adjoint() - s2)));
            push("(N_F)* = N_F", full, max_abs(&(s3.adjoint() - s3)));
            push("(1)* = 1", full, max_abs(&(s0.adjoint() - s0)));
        }
        Family::Bose => {
            let last = gen.cutoff - 3;
            let sub = format!("occupation <= {last}");
            push("[T2,T1] = T3", &sub, residual_on(&(commutator(s2, s1) - s3), last));
            push("[T3,T1] = 2T1", &sub, residual_on(&(commutator(s3, s1) - s1 * re(2.0)), last));
            push("[T3,T2] = -2T2", &sub, residual_on(&(commutator(s3, s2) + s2 * re(2.0)), last));
            push("[T0,T1] = 0", &sub, residual_on(&commutator(s0, s1), last));
            push("[T0,T2] = 0", &sub, residual_on(&commutator(s0, s2), last));
            push("[T0,T3] = 0", &sub, residual_on(&commutator(s0, s3), last));
            push("(T1)* = T2", "full", max_abs(&(s1.adjoint() - s2)));
            push("(T3)* = T3", "full", max_abs(&(s3.adjoint() - s3)));
            push("(T0)* = T0", "full", max_abs(&(s0.adjoint() - s0)));
        }
    }
    RelationReport {
        family: gen.family,
        residuals,
    }
}

/// The quadratic monomials `{a⁺², a², a a⁺}` of a single fermionic mode.
/// The first two vanish, so the algebra collapses to `{0, a a⁺}`.
pub struct SingleModeFermiQuadratics {
    pub raising: CMatrix,
    pub lowering: CMatrix,
    pub projection: CMatrix,
}

pub fn single_mode_fermi_quadratics() -> SingleModeFermiQuadratics {
    let a = CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
    let ad = a.adjoint();
    SingleModeFermiQuadratics {
        raising: &ad * &ad,
        lowering: &a * &a,
        projection: &a * &ad,
    }
}
