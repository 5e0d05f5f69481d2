use alloc::string::String;

/// Recoverable failures of the library operations.
///
/// Shape and parameter problems are always reported through this type; no
/// operation aborts on bad input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{op}: incompatible shapes {left_rows}x{left_cols} and {right_rows}x{right_cols}")]
    ShapeMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("{op}: expected length {expected}, got {found}")]
    LengthMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("kernel dimension {dimension} exceeds the enumeration limit of {limit}")]
    EnumerationLimit { dimension: usize, limit: usize },

    #[error("{0} is undefined for these parameters")]
    Undefined(&'static str),

    #[error("pruning removed every row")]
    DegeneratePruning,
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
