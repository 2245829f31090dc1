use alloc::string::String;

use num_bigint::BigUint;

use crate::label::Label;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty row or column selection")]
    EmptySelection,
    #[error("label {0} is not present in the matrix")]
    UnknownLabel(Label),
    #[error("label {0} appears more than once")]
    DuplicateLabel(Label),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: u64 },
    #[error("construction needs {cells} cells, budget is {budget}")]
    SizeOverflow { cells: u128, budget: u128 },
    #[error("reservoir alphabet does not match the matrix columns")]
    AlphabetMismatch,
    #[error("field degree {degree} exceeds the configured maximum {max}")]
    DegreeOverflow { degree: u32, max: u32 },
    #[error("every generated tuple decoded to an unused codeword")]
    EmptyReservoir,
    #[error("family has {count} members, above the enumeration cap")]
    FamilyTooLarge { count: BigUint },
    #[error("only {found} distinct column patterns survive, {required} required")]
    DensityTooLow { found: u64, required: u64 },
    #[error(
        "naive reference is limited to 4 distinct rows and 16 distinct columns (got {rows}x{cols})"
    )]
    GuardExceeded { rows: usize, cols: usize },
    #[error("malformed protocol tree at {path}: {reason}")]
    MalformedTree { path: String, reason: String },
    #[error("binding violates a side condition: {0}")]
    BindingViolation(String),
    #[error("only 4 bins are supported (got {0})")]
    BinCountUnsupported(usize),
    #[error("dimension {0} is too small for the default parameters (need a power of two >= 4)")]
    DomainTooSmall(usize),
    #[error("no column selects {0} in every slot")]
    NoSuchColumn(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
