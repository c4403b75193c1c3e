use thiserror::Error;

use crate::operator::MAX_QUBITS;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("site {site} is out of range for a {n_qubits}-qubit register")]
    SiteOutOfRange { site: usize, n_qubits: usize },

    #[error("register size {0} is outside the supported range 1..={MAX_QUBITS}")]
    RegisterSize(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid duration {0}: must be finite and non-negative")]
    InvalidDuration(f64),

    #[error("invalid rotation angle {0}")]
    InvalidAngle(f64),

    #[error("schedule is empty")]
    EmptySchedule,

    #[error("principal logarithm is ambiguous: eigenphase {phase:.6} is too close to ±π")]
    LogBranch { phase: f64 },

    #[error("eigen-decomposition did not converge")]
    NoConvergence,

    #[error("segment {index} is not reachable from the physical Hamiltonian set by a global pulse")]
    Unreachable { index: usize },

    #[error("schedule is not cyclic: accumulated pulses do not return to the identity frame")]
    NotCyclic,

    #[error("pulse angle {0} is not a multiple of π/2")]
    NonCliffordPulse(f64),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid register: {0}")]
    InvalidRegister(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("trace i/o: {0}")]
    TraceIo(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
