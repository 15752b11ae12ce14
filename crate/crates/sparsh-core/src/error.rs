use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    NotSquare {
        nrows: usize,
        ncols: usize,
    },
    /// CSR arrays violate a structural invariant.
    InvalidStructure(&'static str),
    /// An index in a triplet or aggregation is out of range.
    IndexOutOfBounds {
        index: usize,
        bound: usize,
    },
    ZeroDiagonal {
        row: usize,
    },
    InvalidParameter(&'static str),
    /// Pivot below tolerance during LU factorization.
    SingularPivot {
        row: usize,
        pivot: f64,
    },
    /// The sparsity pattern handed to a numeric refactorization differs from
    /// the one analysed symbolically.
    PatternMismatch,
    Diverged {
        iteration: usize,
        residual: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { op, expected, found } => {
                write!(f, "{op}: dimension mismatch (expected {expected}, found {found})")
            }
            Error::NotSquare { nrows, ncols } => {
                write!(f, "matrix must be square, got {nrows}x{ncols}")
            }
            Error::InvalidStructure(msg) => write!(f, "invalid CSR structure: {msg}"),
            Error::IndexOutOfBounds { index, bound } => {
                write!(f, "index {index} out of bounds (limit {bound})")
            }
            Error::ZeroDiagonal { row } => write!(f, "zero diagonal entry in row {row}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::SingularPivot { row, pivot } => {
                write!(f, "matrix is singular: pivot {pivot:e} in row {row}")
            }
            Error::PatternMismatch => {
                write!(f, "sparsity pattern differs from the symbolic analysis")
            }
            Error::Diverged { iteration, residual } => {
                write!(f, "diverged at iteration {iteration} (residual {residual:e})")
            }
        }
    }
}

impl core::error::Error for Error {}
