//! Vacuum distributions of homogeneous quadratic Bose and Fermi Hamiltonians.
//!
//! The crate computes closed-form vacuum characteristic functions
//! `f(t) = ⟨ψ₀, e^{itH} ψ₀⟩`, classifies them into Meixner-type families
//! (Meixner V, Gamma, Negative Binomial for bosons; two-atom laws and the
//! Dirac mass for fermions), maps distributions back to Hamiltonians, and
//! checks every closed form against brute-force Fock-space computations.
//!
//! Characteristic functions follow `φ_X(t) = E[e^{itX}]` throughout.

pub mod branch;
pub mod charfun;
pub mod dist;
pub mod error;
pub mod exec;
pub mod fock;
pub mod heisenberg;
pub mod io;
pub mod lie;
pub mod linalg;
pub mod oracle;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use exec::Execution;
