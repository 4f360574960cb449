//! A solver-independent presolver for linear programs of the form
//!
//! ```text
//! minimize    cᵀx + offset
//! subject to  row_lower ≤ Ax ≤ row_upper
//!             col_lower ≤ x  ≤ col_upper
//! ```
//!
//! Presolving is a sequence of atomic reductions (fix a variable, remove a
//! constraint, add a multiple of an equality row to another row, substitute a
//! singleton variable out of an equality row, change bounds). Each reduction
//! appends a record to a [`PostsolveJournal`]; [`postsolve`] replays the journal
//! backwards to turn a primal-dual solution of the reduced problem into one of
//! the original problem.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, timers and the
//! command line live in the `pslp` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod clock;
pub mod driver;
pub mod error;
pub mod explorers;
pub mod oracle;
pub mod postsolve;
pub mod problem;
pub mod reduction;
pub mod sparse;
pub mod stats;
pub mod tolerances;

pub use clock::{Clock, NoClock};
pub use driver::{
    presolve, presolve_with, validate, Defect, ExplorerKind, PassObserver, PresolveConfig, PresolveOutput,
    PresolveReport,
};
pub use error::Error;
pub use postsolve::postsolve;
pub use problem::{
    check_kkt, objective_value, KktReport, LpProblem, PresolveStatus, PrimalDualSolution, SolutionStatus,
};
pub use reduction::{FixCause, PostsolveJournal, ReductionRecord, RemoveCause, RowSnapshot, SideOrigin};
pub use sparse::SparseDualMatrix;
pub use stats::StatsTracker;
pub use tolerances::Tolerances;
