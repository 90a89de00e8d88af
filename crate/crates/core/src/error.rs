use thiserror::Error;

/// Errors produced by matrix and channel operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input had a shape, side, or length other than the one required.
    #[error("{context}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    /// A matrix entry was NaN or infinite.
    #[error("matrix entry ({row},{col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    /// Input failed a Hermiticity check.
    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// The Jacobi sweep cap was reached before the off-diagonal mass vanished.
    #[error("eigensolver did not converge after {sweeps} sweeps: off-diagonal residual {residual:.3e}")]
    EigDidNotConverge { sweeps: usize, residual: f64 },

    /// A matrix required to be positive semidefinite has a negative eigenvalue.
    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    /// A scalar or integer argument was outside its allowed range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input failed the density-matrix checks (Hermitian, unit trace, PSD).
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    /// A Kraus representation must contain at least one operator.
    #[error("empty Kraus operator list")]
    EmptyKrausList,

    /// Dykstra alternating projections ran out of iterations.
    #[error("CPTP projection did not converge after {iterations} iterations: min eigenvalue {min_eigenvalue:.3e}, trace-preservation defect {tp_defect:.3e}")]
    ProjectionDidNotConverge {
        iterations: usize,
        min_eigenvalue: f64,
        tp_defect: f64,
    },

    /// Random channel generation kept producing a singular partial trace.
    #[error("random channel generation failed: partial trace stayed singular after {attempts} attempts")]
    SingularPartialTrace { attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape(rows: usize, cols: usize) -> String {
    format!("{rows}x{cols}")
}
