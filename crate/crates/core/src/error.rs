use alloc::string::String;
use alloc::vec::Vec;

use crate::driver::Defect;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    #[error("index ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("row {0} is not alive")]
    DeadRow(usize),
    #[error("column {0} is not alive")]
    DeadCol(usize),
    #[error("invalid problem: {} defect(s), first: {}", .0.len(), .0.first().map(|d| d.message()).unwrap_or_default())]
    InvalidProblem(Vec<Defect>),
    #[error("invalid presolve configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("corrupt journal: {0}")]
    CorruptJournal(String),
    #[error("instance size {size} exceeds the oracle cap {cap}")]
    OracleSizeCap { size: usize, cap: usize },
    #[error("reference oracle failed: {0}")]
    Oracle(&'static str),
}
