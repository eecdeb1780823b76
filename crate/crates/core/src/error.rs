use core::fmt;

/// Errors raised by tensor operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand dimensions are incompatible with the requested operation.
    ShapeMismatch {
        op: &'static str,
        expected: (usize, usize, usize),
        found: (usize, usize, usize),
    },
    /// A dimension or block side is zero or otherwise out of range.
    InvalidDimension { op: &'static str, detail: &'static str },
    /// An index lies outside its valid range.
    IndexOutOfRange { index: usize, len: usize },
    /// Input data contains NaN or infinity.
    NonFinite { position: usize },
    /// An inverse transform produced a non-negligible imaginary part.
    SymmetryViolation { position: usize, residue: f64 },
    /// A slice SVD did not converge.
    NumericalFailure { slice: usize },
    /// The operation is undefined for a numerically zero tensor.
    ZeroTensor,
    /// Block list does not match the grid it is concatenated against.
    DescriptorMismatch { block: usize },
    /// A configuration value is outside its admissible range.
    InvalidConfig { field: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { op, expected, found } => write!(
                f,
                "{op}: shape mismatch, expected {}x{}x{}, found {}x{}x{}",
                expected.0, expected.1, expected.2, found.0, found.1, found.2
            ),
            Error::InvalidDimension { op, detail } => write!(f, "{op}: invalid dimension, {detail}"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::NonFinite { position } => write!(f, "non-finite entry at position {position}"),
            Error::SymmetryViolation { position, residue } => write!(
                f,
                "inverse transform left imaginary residue {residue:e} at position {position}"
            ),
            Error::NumericalFailure { slice } => {
                write!(f, "singular value decomposition of Fourier slice {slice} did not converge")
            }
            Error::ZeroTensor => f.write_str("tensor is numerically zero"),
            Error::DescriptorMismatch { block } => {
                write!(f, "block {block} does not match its grid descriptor")
            }
            Error::InvalidConfig { field } => write!(f, "invalid configuration value for `{field}`"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
