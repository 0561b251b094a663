use thiserror::Error;

use crate::grid::Cell;
use crate::rowform::RowId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape must have at least one dimension and every extent must be positive")]
    InvalidShape,
    #[error("cell count of shape {0:?} does not fit in 64 bits")]
    ShapeOverflow(Vec<u32>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cell {0} lies outside the shape")]
    CellOutOfRange(Cell),
    #[error("cell {0} appears more than once")]
    DuplicateCell(Cell),
    #[error("row {0} has no one-cell")]
    EmptyRow(RowId),
    #[error("ones in row {0} do not form a contiguous segment")]
    NonContiguousRow(RowId),
    #[error("row {0} is missing from the interval map or listed twice")]
    BadRowSet(RowId),
    #[error("row {row} has invalid interval [{l}, {h}]")]
    BadInterval { row: RowId, l: u32, h: u32 },
    #[error("arithmetic overflow")]
    Overflow,
    #[error("shape has {cells} cells, limit is {limit}")]
    ShapeTooLarge { cells: u64, limit: u64 },
    #[error("grid already contains the forbidden pattern")]
    AlreadyContains,
    #[error("the X-set is empty")]
    EmptyXSet,
    #[error("the X-set is not empty")]
    XSetNonEmpty,
    #[error("last extent is 1; nothing left to peel")]
    BottomedOut,
    #[error("interval map does not satisfy the maximality characterization at row {0}")]
    NotCharacterized(RowId),
    #[error("grid is not a maximal antichain")]
    NotMaximal,
    #[error("row {0} is neither above nor below exactly one side of the antichain")]
    InconsistentRow(RowId),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("strategy for player {player} chose occupied cell {cell}")]
    StrategyReturnedNonZeroCell { player: usize, cell: Cell },
    #[error("strategy for player {player} chose cell {cell} outside the board")]
    StrategyReturnedOutOfRange { player: usize, cell: Cell },
}

impl Error {
    /// Stable identifier used in machine-readable diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidShape => "InvalidShape",
            Error::ShapeOverflow(_) => "ShapeOverflow",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::CellOutOfRange(_) => "CellOutOfRange",
            Error::DuplicateCell(_) => "DuplicateCell",
            Error::EmptyRow(_) => "EmptyRow",
            Error::NonContiguousRow(_) => "NonContiguousRow",
            Error::BadRowSet(_) => "BadRowSet",
            Error::BadInterval { .. } => "BadInterval",
            Error::Overflow => "Overflow",
            Error::ShapeTooLarge { .. } => "ShapeTooLarge",
            Error::AlreadyContains => "AlreadyContains",
            Error::EmptyXSet => "EmptyXSet",
            Error::XSetNonEmpty => "XSetNonEmpty",
            Error::BottomedOut => "BottomedOut",
            Error::NotCharacterized(_) => "NotCharacterized",
            Error::NotMaximal => "NotMaximal",
            Error::InconsistentRow(_) => "InconsistentRow",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::StrategyReturnedNonZeroCell { .. } => "StrategyReturnedNonZeroCell",
            Error::StrategyReturnedOutOfRange { .. } => "StrategyReturnedOutOfRange",
        }
    }
}
