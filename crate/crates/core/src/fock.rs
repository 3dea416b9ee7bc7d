//! Creation/annihilation operator matrices on Fock spaces.
//!
//! Basis ordering: occupation-number vectors `|n_1 … n_k⟩` enumerated
//! lexicographically with mode 1 varying slowest, i.e. the index of
//! `|n_1 … n_k⟩` is `Σ n_i · d^(k−i)` with `d` the per-mode dimension
//! (2 for fermions, the cutoff for bosons). Mode 1 is the leftmost tensor
//! factor.
//!
//! Fermions use the Jordan–Wigner realization `a_1 = a ⊗ 1`,
//! `a_2 = Z ⊗ a` with `Z = diag(1, −1)`. With this ordering
//! `a_2 a_1 |11⟩ = +|00⟩` and `⟨11| a_1^+ a_2^+ |00⟩ = +1`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, hermitian_defect, identity, kron, norm_inf, re, CMatrix, CVector};

/// Default bound on the Fock-space dimension.
pub const DEFAULT_MAX_DIM: usize = 10_000;

/// Tolerance for the symmetry/Hermiticity checks on n-mode coefficient matrices.
pub const MATRIX_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Bose,
    Fermi,
}

/// Annihilators and creators on a (possibly truncated) Fock space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub family: Family,
    pub n_modes: usize,
    /// Per-mode dimension: occupations are `0..cutoff` (2 for fermions).
    pub cutoff: usize,
    pub dim: usize,
    pub annihilators: Vec<CMatrix>,
    pub creators: Vec<CMatrix>,
}

impl OperatorSet {
    /// The vacuum `|0…0⟩`, which is the first basis vector.
    pub fn vacuum(&self) -> CVector {
        let mut v = CVector::zeros(self.dim);
        v[0] = re(1.0);
        v
    }

    /// Basis index of an occupation pattern.
    pub fn index_of(&self, occupations: &[usize]) -> usize {
        assert_eq!(occupations.len(), self.n_modes);
        occupations.iter().fold(0, |acc, &n| {
            assert!(n < self.cutoff, "occupation {n} outside 0..{}", self.cutoff);
            acc * self.cutoff + n
        })
    }

    /// Occupation pattern of a basis index.
    pub fn occupations_of(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.n_modes];
        for slot in occ.iter_mut().rev() {
            *slot = index % self.cutoff;
            index /= self.cutoff;
        }
        occ
    }

    pub fn identity(&self) -> CMatrix {
        identity(self.dim)
    }

    pub fn number(&self, mode: usize) -> CMatrix {
        &self.creators[mode] * &self.annihilators[mode]
    }
}

fn single_mode_lowering(cutoff: usize) -> CMatrix {
    CMatrix::from_fn(cutoff, cutoff, |i, j| {
        if j == i + 1 {
            re((j as f64).sqrt())
        } else {
            re(0.0)
        }
    })
}

/// Embed a one-mode operator at position `mode` of an `n_modes` tensor product.
fn embed(op: &CMatrix, left: &CMatrix, mode: usize, n_modes: usize, local_id: &CMatrix) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for k in 0..n_modes {
        let factor = match k.cmp(&mode) {
            std::cmp::Ordering::Less => left,
            std::cmp::Ordering::Equal => op,
            std::cmp::Ordering::Greater => local_id,
        };
        out = kron(&out, factor);
    }
    out
}

pub fn build_bose_ops(n_modes: usize, cutoff: usize) -> Result<OperatorSet> {
    build_bose_ops_with_limit(n_modes, cutoff, DEFAULT_MAX_DIM)
}

/// Truncated bosonic operators; per-mode occupations are `0..cutoff`.
pub fn build_bose_ops_with_limit(n_modes: usize, cutoff: usize, max_dim: usize) -> Result<OperatorSet> {
    if n_modes == 0 {
        return Err(invalid("n_modes must be at least 1"));
    }
    if cutoff < 2 {
        return Err(invalid(format!("cutoff must be at least 2, got {cutoff}")));
    }
    let dim = u32::try_from(n_modes)
        .ok()
        .and_then(|k| cutoff.checked_pow(k))
        .filter(|&d| d <= max_dim)
        .ok_or_else(|| {
            Error::ResourceLimit(format!(
                "cutoff^n_modes = {cutoff}^{n_modes} exceeds the dimension guard {max_dim}"
            ))
        })?;

    let a = single_mode_lowering(cutoff);
    let id = identity(cutoff);
    let annihilators: Vec<CMatrix> = (0..n_modes).map(|m| embed(&a, &id, m, n_modes, &id)).collect();
    let creators = annihilators.iter().map(|m| m.adjoint()).collect();
    Ok(OperatorSet {
        family: Family::Bose,
        n_modes,
        cutoff,
        dim,
        annihilators,
        creators,
    })
}

/// Exact two-mode fermionic operators (Jordan–Wigner, dimension 4).
pub fn build_fermi_ops(n_modes: usize) -> Result<OperatorSet> {
    if n_modes != 2 {
        return Err(Error::Unsupported(format!(
            "fermionic operators are built for exactly 2 modes, got {n_modes}"
        )));
    }
    let a = CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
    let z = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(-1.0)]));
    let id = identity(2);
    let annihilators: Vec<CMatrix> = (0..n_modes).map(|m| embed(&a, &z, m, n_modes, &id)).collect();
    let creators = annihilators.iter().map(|m| m.adjoint()).collect();
    Ok(OperatorSet {
        family: Family::Fermi,
        n_modes,
        cutoff: 2,
        dim: 4,
        annihilators,
        creators,
    })
}

/// Homogeneous quadratic Hamiltonian data.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadraticHamiltonianSpec {
    /// `½α(a⁺² + a²) + β a⁺a`, with `α ≥ 0` after the gauge rotation.
    BoseOneMode { alpha: f64, beta: f64 },
    /// `α(a₁⁺a₁ + a₂⁺a₂) + β(a₁⁺a₂⁺ + a₂a₁)`.
    FermiTwoMode { alpha: f64, beta: f64 },
    /// `½ Σ (A_ij a_i⁺a_j⁺ + conj(A_ij) a_i a_j) + Σ C_ij a_i⁺a_j`,
    /// normal ordered (no additive constant).
    BoseNMode { a: CMatrix, c: CMatrix },
}

impl QuadraticHamiltonianSpec {
    pub fn bose_one_mode(alpha: f64, beta: f64) -> Result<Self> {
        check_bose_one_mode(alpha, beta)?;
        Ok(Self::BoseOneMode { alpha, beta })
    }

    pub fn fermi_two_mode(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(invalid("alpha and beta must be finite"));
        }
        if alpha.hypot(beta) <= 0.0 {
            return Err(invalid("omega = sqrt(alpha^2 + beta^2) must be positive"));
        }
        Ok(Self::FermiTwoMode { alpha, beta })
    }

    pub fn bose_n_mode(a: CMatrix, c: CMatrix) -> Result<Self> {
        check_n_mode(&a, &c)?;
        Ok(Self::BoseNMode { a, c })
    }

    pub fn n_modes(&self) -> usize {
        match self {
            Self::BoseOneMode { .. } => 1,
            Self::FermiTwoMode { .. } => 2,
            Self::BoseNMode { a, .. } => a.nrows(),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Self::FermiTwoMode { .. } => Family::Fermi,
            _ => Family::Bose,
        }
    }
}

pub(crate) fn check_bose_one_mode(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(invalid("alpha and beta must be finite"));
    }
    if alpha < 0.0 {
        return Err(invalid(format!(
            "alpha must be non-negative after the gauge rotation, got {alpha}"
        )));
    }
    if alpha == 0.0 && beta == 0.0 {
        return Err(invalid("alpha^2 + beta^2 > 0 is required (the Hamiltonian vanishes)"));
    }
    Ok(())
}

/// Validates `A = Aᵀ` and `C = C*` within [`MATRIX_SYMMETRY_TOL`].
pub fn check_n_mode(a: &CMatrix, c: &CMatrix) -> Result<()> {
    let n = a.nrows();
    if !a.is_square() || c.shape() != (n, n) || n == 0 {
        return Err(invalid("A and C must be square matrices of the same positive size"));
    }
    for i in 0..n {
        for j in 0..n {
            if (a[(i, j)] - a[(j, i)]).norm() > MATRIX_SYMMETRY_TOL {
                return Err(invalid(format!("A is not symmetric: A[{i}][{j}] != A[{j}][{i}]")));
            }
            if (c[(i, j)] - c[(j, i)].conj()).norm() > MATRIX_SYMMETRY_TOL {
                return Err(invalid(format!(
                    "C is not Hermitian: C[{i}][{j}] != conj(C[{j}][{i}])"
                )));
            }
        }
    }
    Ok(())
}

/// Dense Hamiltonian matrix of `spec` on the space of `ops`.
pub fn build_hamiltonian(spec: &QuadraticHamiltonianSpec, ops: &OperatorSet) -> Result<CMatrix> {
    if spec.family() != ops.family || spec.n_modes() != ops.n_modes {
        return Err(invalid(format!(
            "Hamiltonian ({:?}, {} modes) is incompatible with operators ({:?}, {} modes)",
            spec.family(),
            spec.n_modes(),
            ops.family,
            ops.n_modes
        )));
    }
    let h = match spec {
        QuadraticHamiltonianSpec::BoseOneMode { alpha, beta } => {
            check_bose_one_mode(*alpha, *beta)?;
            let a = &ops.annihilators[0];
            let ad = &ops.creators[0];
            (ad * ad + a * a) * re(0.5 * alpha) + ad * a * re(*beta)
        }
        QuadraticHamiltonianSpec::FermiTwoMode { alpha, beta } => {
            let (a1, a2) = (&ops.annihilators[0], &ops.annihilators[1]);
            let (a1d, a2d) = (&ops.creators[0], &ops.creators[1]);
            (a1d * a1 + a2d * a2) * re(*alpha) + (a1d * a2d + a2 * a1) * re(*beta)
        }
        QuadraticHamiltonianSpec::BoseNMode { a: am, c: cm } => {
            check_n_mode(am, cm)?;
            let n = am.nrows();
            let mut h = CMatrix::zeros(ops.dim, ops.dim);
            for i in 0..n {
                for j in 0..n {
                    let aij = am[(i, j)];
                    if aij != c(0.0, 0.0) {
                        h += &ops.creators[i] * &ops.creators[j] * (aij * 0.5);
                        h += &ops.annihilators[i] * &ops.annihilators[j] * (aij.conj() * 0.5);
                    }
                    let cij = cm[(i, j)];
                    if cij != c(0.0, 0.0) {
                        h += &ops.creators[i] * &ops.annihilators[j] * cij;
                    }
                }
            }
            // Hermitian part of the assembled matrix.
            (&h + h.adjoint()) * re(0.5)
        }
    };
    debug_assert!(hermitian_defect(&h) <= 1e-13 * norm_inf(&h).max(f64::MIN_POSITIVE));
    Ok(h)
}
