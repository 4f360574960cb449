//! Atomic reductions and the journal they write.
//!
//! Every reduction mutates a [`Session`] and appends one [`ReductionRecord`].
//! All indices in records refer to the original problem; rows and columns are
//! never renumbered until the session is compacted.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::driver::DirtyQueues;
use crate::error::Error;
use crate::problem::LpProblem;
use crate::stats::StatsTracker;
use crate::tolerances::Tolerances;

/// A copy of one row taken when a reduction needs it for dual recovery.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSnapshot {
    pub row: usize,
    pub entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixCause {
    AtLower,
    AtUpper,
    Interior,
    /// Fixed by an equality row holding only this variable.
    SingletonRow {
        row: usize,
        coeff: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RemoveCause {
    Redundant,
    Empty,
    /// Removed row equals `scale` times the kept `row`. The flags say whether the
    /// kept row's lower/upper side was taken from the removed row when merging.
    ParallelTo {
        row: usize,
        scale: f64,
        lower_from_removed: bool,
        upper_from_removed: bool,
    },
    /// Singleton inequality row whose content moved into the variable's bounds.
    ForcedSingleton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideOrigin {
    /// A side implied by the variable bounds was dropped.
    RedundantSide,
    /// A side was made binding because every dual solution requires it.
    DualTightening,
    /// Sides intersected with those of a parallel row.
    ParallelMerge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReductionRecord {
    FixVariable {
        k: usize,
        value: f64,
        cost: f64,
        saved_column: Vec<(usize, f64)>,
        cause: FixCause,
    },
    RemoveConstraint {
        i: usize,
        saved_row: Vec<(usize, f64)>,
        lower: f64,
        upper: f64,
        cause: RemoveCause,
    },
    AddScaledEqualityRow {
        src: usize,
        dst: usize,
        lambda: f64,
    },
    SubstituteSingleton {
        k: usize,
        row: usize,
        coeff: f64,
        cost: f64,
        saved_row: Vec<(usize, f64)>,
        rhs: f64,
    },
    ChangeBounds {
        k: usize,
        old_lb: f64,
        old_ub: f64,
        new_lb: f64,
        new_ub: f64,
        inducing: Option<RowSnapshot>,
    },
    ChangeRowSides {
        i: usize,
        old_lower: f64,
        old_upper: f64,
        new_lower: f64,
        new_upper: f64,
        origin: SideOrigin,
    },
    AggregateParallelColumns {
        kept: usize,
        removed: usize,
        scale: f64,
        removed_bounds: (f64, f64),
        removed_cost: f64,
        kept_old_bounds: (f64, f64),
    },
}

impl ReductionRecord {
    pub fn name(&self) -> &'static str {
        match self {
            ReductionRecord::FixVariable { .. } => "fix_variable",
            ReductionRecord::RemoveConstraint { .. } => "remove_constraint",
            ReductionRecord::AddScaledEqualityRow { .. } => "add_scaled_equality_row",
            ReductionRecord::SubstituteSingleton { .. } => "substitute_singleton",
            ReductionRecord::ChangeBounds { .. } => "change_bounds",
            ReductionRecord::ChangeRowSides { .. } => "change_row_sides",
            ReductionRecord::AggregateParallelColumns { .. } => "aggregate_parallel_columns",
        }
    }
}

/// Everything postsolve needs: the records plus the index maps of the final compaction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PostsolveJournal {
    pub original_rows: usize,
    pub original_cols: usize,
    pub records: Vec<ReductionRecord>,
    /// Reduced row index → original row index.
    pub row_map: Vec<usize>,
    /// Reduced column index → original column index.
    pub col_map: Vec<usize>,
}

impl PostsolveJournal {
    /// Journal of a problem that was not reduced at all.
    pub fn identity(m: usize, n: usize) -> Self {
        Self {
            original_rows: m,
            original_cols: n,
            records: Vec::new(),
            row_map: (0..m).collect(),
            col_map: (0..n).collect(),
        }
    }

    /// Checks that every index lies inside the original dimensions.
    pub fn check_integrity(&self) -> Result<(), Error> {
        let (m, n) = (self.original_rows, self.original_cols);
        let bad = |what: &str, idx: usize, lim: usize| -> Result<(), Error> {
            if idx >= lim {
                Err(Error::CorruptJournal(format!("{what} index {idx} out of range (limit {lim})")))
            } else {
                Ok(())
            }
        };
        for &i in &self.row_map {
            bad("row map", i, m)?;
        }
        for &k in &self.col_map {
            bad("column map", k, n)?;
        }
        let entries = |list: &[(usize, f64)], lim: usize| -> Result<(), Error> {
            list.iter().try_for_each(|&(j, _)| bad("saved entry", j, lim))
        };
        for r in &self.records {
            match r {
                ReductionRecord::FixVariable { k, saved_column, cause, .. } => {
                    bad("column", *k, n)?;
                    entries(saved_column, m)?;
                    if let FixCause::SingletonRow { row, .. } = cause {
                        bad("row", *row, m)?;
                    }
                }
                ReductionRecord::RemoveConstraint { i, saved_row, cause, .. } => {
                    bad("row", *i, m)?;
                    entries(saved_row, n)?;
                    if let RemoveCause::ParallelTo { row, .. } = cause {
                        bad("row", *row, m)?;
                    }
                }
                ReductionRecord::AddScaledEqualityRow { src, dst, .. } => {
                    bad("row", *src, m)?;
                    bad("row", *dst, m)?;
                }
                ReductionRecord::SubstituteSingleton { k, row, saved_row, coeff, .. } => {
                    bad("column", *k, n)?;
                    bad("row", *row, m)?;
                    entries(saved_row, n)?;
                    if *coeff == 0.0 {
                        return Err(Error::CorruptJournal(String::from("substitution with zero pivot")));
                    }
                }
                ReductionRecord::ChangeBounds { k, inducing, .. } => {
                    bad("column", *k, n)?;
                    if let Some(s) = inducing {
                        bad("row", s.row, m)?;
                        entries(&s.entries, n)?;
                    }
                }
                ReductionRecord::ChangeRowSides { i, .. } => bad("row", *i, m)?,
                ReductionRecord::AggregateParallelColumns { kept, removed, scale, .. } => {
                    bad("column", *kept, n)?;
                    bad("column", *removed, n)?;
                    if *scale == 0.0 {
                        return Err(Error::CorruptJournal(String::from("aggregation with zero scale")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Terminal conclusion of presolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    InfeasiblePrimal,
    UnboundedOrInfeasibleDual,
}

pub type Step<T = ()> = Result<T, Verdict>;

/// Mutable state of one presolve run.
#[derive(Debug, Clone)]
pub struct Session {
    pub problem: LpProblem,
    pub stats: StatsTracker,
    pub journal: Vec<ReductionRecord>,
    pub tol: Tolerances,
    pub dirty: DirtyQueues,
    /// Number of reductions applied so far.
    pub applied: usize,
}

impl Session {
    pub fn new(problem: LpProblem, tol: Tolerances) -> Self {
        let stats = StatsTracker::init(&problem);
        let dirty = DirtyQueues::new(problem.num_rows, problem.num_cols);
        Self { problem, stats, journal: Vec::new(), tol, dirty, applied: 0 }
    }

    #[inline]
    pub fn bounds(&self, k: usize) -> (f64, f64) {
        (self.problem.col_lower[k], self.problem.col_upper[k])
    }

    #[inline]
    pub fn sides(&self, i: usize) -> (f64, f64) {
        (self.problem.row_lower[i], self.problem.row_upper[i])
    }

    fn push(&mut self, record: ReductionRecord) {
        log::trace!("{}: {:?}", record.name(), record);
        self.journal.push(record);
        self.applied += 1;
    }

    fn finish(&mut self) {
        self.stats.flush_refresh(&self.problem);
    }

    /// Fixes `x_k = value`, folding it into the row sides and the objective offset.
    pub fn fix_variable(&mut self, k: usize, value: f64, cause: FixCause) -> Step {
        let (l, u) = self.bounds(k);
        let feas = self.tol.feas;
        if !(value >= l - feas && value <= u + feas) {
            return Err(Verdict::InfeasiblePrimal);
        }
        let value = value.max(l).min(u);
        let saved_column = self.problem.matrix.col(k).to_vec();
        for &(i, a) in &saved_column {
            let shift = a * value;
            if self.problem.row_lower[i].is_finite() {
                self.problem.row_lower[i] -= shift;
            }
            if self.problem.row_upper[i].is_finite() {
                self.problem.row_upper[i] -= shift;
            }
            if self.problem.row_lower[i] > self.problem.row_upper[i] {
                // Shifting both sides of an equality can split them by rounding.
                self.problem.row_upper[i] = self.problem.row_lower[i];
            }
            self.dirty.mark_row(i);
        }
        self.stats.remove_col(&self.problem.matrix, k, (l, u));
        self.problem.matrix.delete_col(k).expect("fix of a dead column");
        let cost = self.problem.objective[k];
        self.problem.objective_offset += cost * value;
        self.push(ReductionRecord::FixVariable { k, value, cost, saved_column, cause });
        self.finish();
        Ok(())
    }

    pub fn remove_constraint(&mut self, i: usize, cause: RemoveCause) {
        let (lower, upper) = self.sides(i);
        let saved_row = self.problem.matrix.row(i).to_vec();
        self.stats.remove_row(&self.problem.matrix, i, (lower, upper));
        for k in self.problem.matrix.delete_row(i).expect("removal of a dead row") {
            self.dirty.mark_col(k);
        }
        self.push(ReductionRecord::RemoveConstraint { i, saved_row, lower, upper, cause });
        self.finish();
    }

    /// Row `dst` += `lambda` × equality row `src`. With `cancel`, that column's entry
    /// in `dst` is dropped exactly. Returns the number of fill-in entries.
    pub fn add_scaled_equality(&mut self, src: usize, dst: usize, lambda: f64, cancel: Option<usize>) -> usize {
        let (b, b_up) = self.sides(src);
        debug_assert!(b == b_up && b.is_finite(), "source row must be a finite equality");
        let mut changes = Vec::new();
        let fill = self
            .problem
            .matrix
            .add_scaled_row_tracked(src, dst, lambda, cancel, &mut changes)
            .expect("combination of dead rows");
        let sides = self.sides(dst);
        for c in &changes {
            let bounds = self.bounds(c.col);
            self.stats.on_entry_change(dst, c.col, c.old, c.new, bounds, sides);
            self.dirty.mark_col(c.col);
        }
        let shift = lambda * b;
        if self.problem.row_lower[dst].is_finite() {
            self.problem.row_lower[dst] += shift;
        }
        if self.problem.row_upper[dst].is_finite() {
            self.problem.row_upper[dst] += shift;
        }
        if self.problem.row_lower[dst] > self.problem.row_upper[dst] {
            self.problem.row_upper[dst] = self.problem.row_lower[dst];
        }
        self.dirty.mark_row(dst);
        self.push(ReductionRecord::AddScaledEqualityRow { src, dst, lambda });
        self.finish();
        fill
    }

    /// Substitutes the column singleton `k` out of equality row `i`, removing both.
    pub fn substitute_singleton(&mut self, k: usize, i: usize) {
        let coeff = self.problem.matrix.get(i, k);
        debug_assert!(self.problem.matrix.col_len(k) == 1 && coeff != 0.0);
        let rhs = self.problem.row_lower[i];
        let cost = self.problem.objective[k];
        let saved_row = self.problem.matrix.row(i).to_vec();
        if cost != 0.0 {
            for &(j, a) in &saved_row {
                if j != k {
                    self.problem.objective[j] -= cost * a / coeff;
                }
            }
            self.problem.objective_offset += cost * rhs / coeff;
        }
        self.stats.remove_row(&self.problem.matrix, i, self.sides(i));
        for j in self.problem.matrix.delete_row(i).expect("substitution into a dead row") {
            self.dirty.mark_col(j);
        }
        let bounds = self.bounds(k);
        self.stats.remove_col(&self.problem.matrix, k, bounds);
        self.problem.matrix.delete_col(k).expect("substitution of a dead column");
        self.push(ReductionRecord::SubstituteSingleton { k, row: i, coeff, cost, saved_row, rhs });
        self.finish();
    }

    /// Replaces the bounds of `x_k`. `inducing` names the row that implies a tightening.
    pub fn change_bounds(&mut self, k: usize, new_lb: f64, new_ub: f64, inducing: Option<usize>) -> Step {
        let (old_lb, old_ub) = self.bounds(k);
        let (mut lb, mut ub) = (new_lb, new_ub);
        if lb > ub + self.tol.feas {
            return Err(Verdict::InfeasiblePrimal);
        }
        if lb > ub {
            let mid = 0.5 * (lb + ub);
            lb = mid;
            ub = mid;
        }
        if (lb, ub) == (old_lb, old_ub) {
            return Ok(());
        }
        self.problem.col_lower[k] = lb;
        self.problem.col_upper[k] = ub;
        let mut rows = Vec::new();
        self.stats.on_bound_change(&self.problem.matrix, k, (old_lb, old_ub), (lb, ub), &mut rows);
        for i in rows {
            self.dirty.mark_row(i);
        }
        self.dirty.mark_col(k);
        let inducing = inducing.map(|row| RowSnapshot { row, entries: self.problem.matrix.row(row).to_vec() });
        self.push(ReductionRecord::ChangeBounds { k, old_lb, old_ub, new_lb: lb, new_ub: ub, inducing });
        self.finish();
        Ok(())
    }

    pub fn change_row_sides(&mut self, i: usize, new_lower: f64, new_upper: f64, origin: SideOrigin) {
        let (old_lower, old_upper) = self.sides(i);
        if (old_lower, old_upper) == (new_lower, new_upper) {
            return;
        }
        self.stats.on_row_sides_change(&self.problem.matrix, i, (old_lower, old_upper), (new_lower, new_upper));
        self.problem.row_lower[i] = new_lower;
        self.problem.row_upper[i] = new_upper;
        self.dirty.mark_row(i);
        for &k in self.problem.matrix.row(i).indices {
            self.dirty.mark_col(k);
        }
        self.push(ReductionRecord::ChangeRowSides { i, old_lower, old_upper, new_lower, new_upper, origin });
    }

    /// Merges column `removed` = `scale` × column `kept` into `kept`, which then
    /// stands for `x_kept + scale · x_removed`.
    pub fn aggregate_parallel_columns(&mut self, kept: usize, removed: usize, scale: f64) {
        let (lp, up) = self.bounds(kept);
        let (lq, uq) = self.bounds(removed);
        let (lo_q, hi_q) = if scale > 0.0 { (scale * lq, scale * uq) } else { (scale * uq, scale * lq) };
        let new_lb = lp + lo_q;
        let new_ub = up + hi_q;
        let removed_cost = self.problem.objective[removed];
        self.stats.remove_col(&self.problem.matrix, removed, (lq, uq));
        for i in self.problem.matrix.delete_col(removed).expect("aggregation of a dead column") {
            self.dirty.mark_row(i);
        }
        self.problem.col_lower[kept] = new_lb;
        self.problem.col_upper[kept] = new_ub;
        let mut rows = Vec::new();
        self.stats.on_bound_change(&self.problem.matrix, kept, (lp, up), (new_lb, new_ub), &mut rows);
        for i in rows {
            self.dirty.mark_row(i);
        }
        self.dirty.mark_col(kept);
        self.push(ReductionRecord::AggregateParallelColumns {
            kept,
            removed,
            scale,
            removed_bounds: (lq, uq),
            removed_cost,
            kept_old_bounds: (lp, up),
        });
        self.finish();
    }
}
