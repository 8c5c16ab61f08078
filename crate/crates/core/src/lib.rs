//! Effective few-body interactions of bosons in one deep optical-lattice well.
//!
//! Virtual excitation to higher vibrational levels turns a pure two-body
//! contact interaction into an effective Hamiltonian with two- *and*
//! three-body terms for atoms in the ground level. This crate computes those
//! terms with cutoff-regularized, renormalized second-order perturbation
//! theory and follows the phase dynamics they drive in on-site coherent
//! states.
//!
//! * [`oscillator`]: harmonic-oscillator modes and overlap matrix elements.
//! * [`renorm`]: second-order channel sums, counter-term, `β`, divergence fit.
//! * [`exact_diag`]: brute-force Fock-space diagonalization used as an oracle.
//! * [`model`]: physical parameters to couplings `ξ`, `Ũ₂`, `Ũ₃`.
//! * [`dynamics`]: collapse-and-revival visibility, homogeneous and
//!   lattice-averaged.

pub mod dynamics;
pub mod exact_diag;
pub mod model;
pub mod oscillator;
pub mod renorm;
pub mod summation;

pub use dynamics::{CoherentStateSpec, LatticeEnvelope, VisibilityTrace};
pub use model::{CouplingSet, PhysicalParams};
pub use oscillator::{MatrixElementTable, Mode};
pub use renorm::PerturbationSummary;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum Error {
    #[error("cutoff {cutoff} is below the minimum of {min}")]
    InvalidCutoff { cutoff: u32, min: u32 },

    #[error("Gauss-Hermite rule needs at least 2 nodes, got {0}")]
    QuadratureNodes(usize),

    #[error("need at least {need} distinct points, got {got}")]
    TooFewPoints { got: usize, need: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Fock space dimension {dimension} exceeds the bound {bound}")]
    DimensionTooLarge { dimension: usize, bound: usize },

    #[error("effective scattering length is at a pole (1/a_eff = {inverse_length:e} 1/m)")]
    NearPole { inverse_length: f64 },

    #[error("time grid is empty")]
    EmptyGrid,

    #[error("time grid is not strictly increasing at index {index}")]
    NonMonotoneGrid { index: usize },

    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
}

pub type Result<T> = std::result::Result<T, Error>;
