//! Simulation engine for cavity-assisted discrimination of chiral molecules.
//!
//! A three-level molecule (levels |1>, |2>, |3>) couples to a quantized cavity
//! mode and two shaped classical drives. The two enantiomers differ only in
//! the sign of the 1-3 Rabi coupling, which steers the cavity into coherent
//! states with opposite displacements; a homodyne measurement of the cavity
//! quadrature then reads the handedness out with an erfc-shaped error rate.
//!
//! Module map:
//! - [`qlinalg`]: dense complex linear algebra on the molecule (x) cavity space
//! - [`model`]: pulses, Hamiltonians, systematic errors, noise, collapse ops
//! - [`analytics`]: closed-form displacement/phase/error-probability formulas
//! - [`dynamics`]: Schrödinger and Lindblad propagation with observables
//! - [`homodyne`]: quadrature statistics, discrimination rule, sampling
//!
//! Everything internal works in dimensionless units with the cavity coupling
//! g as the reference: frequencies in g, times in 1/g.

pub mod analytics;
pub mod dynamics;
pub mod homodyne;
pub mod model;
pub mod qlinalg;
pub mod quad;

use thiserror::Error;

/// Errors shared across the simulation layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Fock truncation must be at least 1 (no dynamics possible at N = 0)")]
    InvalidTruncation,

    #[error("Fock truncation too small: tail mass {tail:.3e} at N = {n_max}, need N >= {required}")]
    TruncationTooSmall { n_max: usize, required: usize, tail: f64 },

    #[error("matrix dimension {dim} is not divisible by the 3 molecule levels")]
    NotProductSpace { dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time {t} outside pulse support [0, {t_max}]")]
    TimeOutOfRange { t: f64, t_max: f64 },

    #[error("adaptive quadrature failed to converge (depth limit)")]
    QuadratureNonConvergence,

    #[error("constraint unsatisfiable: {0}")]
    ConstraintUnsatisfiable(String),

    #[error("negative decoherence rate {0}")]
    NegativeRate(f64),

    #[error("norm drift {drift:.3e} exceeds {limit:.1e}; reduce the time step")]
    NormDrift { drift: f64, limit: f64 },

    #[error("trace drift {drift:.3e} exceeds {limit:.1e}; reduce the time step")]
    TraceDrift { drift: f64, limit: f64 },

    #[error("density matrix lost positivity: min eigenvalue {min_eig:.3e}")]
    PositivityLost { min_eig: f64 },

    #[error("state is not a valid density matrix: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
