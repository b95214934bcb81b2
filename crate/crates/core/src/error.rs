//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Basis is singular or otherwise not a full-rank lattice.
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    /// Operation requires a different dimension (e.g. adjoint needs even dim).
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Enumeration or construction size exceeds the desk-scale budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Periodic set with translations coinciding modulo the lattice.
    #[error("degenerate periodic set: {0}")]
    DegenerateSet(String),

    /// The ChrKim-style operator-norm condition failed.
    #[error("norm condition failed: |C^t B| = {norm:.6e} > {bound:.6e} (margin {margin:.6e})")]
    NormCondition { norm: f64, bound: f64, margin: f64 },

    /// Parameter outside the admissible analytic range.
    #[error("parameter out of range: {0}")]
    ParameterRange(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature budget exhausted: {0}")]
    QuadratureBudget(String),

    /// Multiplicity map is not symmetric where a real-valued kernel is required.
    #[error("asymmetric multiplicity map: {0}")]
    AsymmetricMultiplicity(String),

    /// Candidate function fails a hard Cohn-Elkies requirement.
    #[error("invalid CE function: {0}")]
    InvalidCe(String),

    /// Lattice family with mixed dimensions or covolumes.
    #[error("invalid family: {0}")]
    InvalidFamily(String),

    /// Empty or unusable search region.
    #[error("radius error: {0}")]
    Radius(String),

    /// Malformed input file or config.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown strategy: {0}")]
    UnknownStrategy(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code bucket: 2 parse, 3 precondition, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Io(_) => 2,
            Error::InvalidLattice(_)
            | Error::Dimension(_)
            | Error::Budget(_)
            | Error::DegenerateSet(_)
            | Error::NormCondition { .. }
            | Error::ParameterRange(_)
            | Error::AsymmetricMultiplicity(_)
            | Error::InvalidCe(_)
            | Error::InvalidFamily(_)
            | Error::Radius(_)
            | Error::UnknownStrategy(_) => 3,
            Error::QuadratureBudget(_) => 4,
        }
    }
}
