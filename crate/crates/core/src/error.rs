use thiserror::Error;

/// Errors raised while validating or transforming two-qubit states.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |m[i][j] - conj(m[j][i])| = {defect:e}")]
    NonHermitian { defect: f64 },

    #[error("unsupported matrix dimension {0} (expected 2, 3 or 4)")]
    Dimension(usize),

    #[error("state is not normalized: trace = {trace}")]
    Normalization { trace: f64 },

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("Bloch data does not describe a positive semidefinite state (min eigenvalue {min_eigenvalue:e})")]
    UnphysicalBloch { min_eigenvalue: f64 },

    #[error("matrix is not X-structured; offending entries: {}", format_entries(.offending))]
    Structure { offending: Vec<(usize, usize, f64)> },

    #[error("Kraus set is not trace preserving: ||sum K^dag K - I|| = {defect:e}")]
    IncompleteKraus { defect: f64 },

    #[error("unsupported state subclass: {0}")]
    UnsupportedSubclass(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("self-check failed: {what} disagrees by {deviation:e}")]
    CheckFailed { what: String, deviation: f64 },
}

fn format_entries(entries: &[(usize, usize, f64)]) -> String {
    entries
        .iter()
        .map(|(i, j, m)| format!("({},{})={:e}", i + 1, j + 1, m))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
