//! Incrementally maintained counts, locks and row activities.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::problem::LpProblem;
use crate::sparse::SparseDualMatrix;
use crate::tolerances::ACTIVITY_REFRESH_TOL;

/// Incremental updates to one row's activity before it is recomputed.
pub const ACTIVITY_REFRESH_INTERVAL: u32 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RowActivity {
    pub min_finite: f64,
    pub max_finite: f64,
    pub num_inf_min: usize,
    pub num_inf_max: usize,
}

impl RowActivity {
    pub fn min(&self) -> f64 {
        if self.num_inf_min > 0 {
            f64::NEG_INFINITY
        } else {
            self.min_finite
        }
    }

    pub fn max(&self) -> f64 {
        if self.num_inf_max > 0 {
            f64::INFINITY
        } else {
            self.max_finite
        }
    }

    /// Minimum activity with the contribution of an entry `a` on `[l, u]` taken out.
    pub fn min_without(&self, a: f64, l: f64, u: f64) -> f64 {
        match min_contribution(a, l, u) {
            None if self.num_inf_min == 1 => self.min_finite,
            None => f64::NEG_INFINITY,
            Some(_) if self.num_inf_min > 0 => f64::NEG_INFINITY,
            Some(c) => self.min_finite - c,
        }
    }

    /// Maximum activity with the contribution of an entry `a` on `[l, u]` taken out.
    pub fn max_without(&self, a: f64, l: f64, u: f64) -> f64 {
        match max_contribution(a, l, u) {
            None if self.num_inf_max == 1 => self.max_finite,
            None => f64::INFINITY,
            Some(_) if self.num_inf_max > 0 => f64::INFINITY,
            Some(c) => self.max_finite - c,
        }
    }

    fn add(&mut self, a: f64, l: f64, u: f64, sign: f64) {
        match min_contribution(a, l, u) {
            Some(c) => self.min_finite += sign * c,
            None => self.num_inf_min = bump(self.num_inf_min, sign),
        }
        match max_contribution(a, l, u) {
            Some(c) => self.max_finite += sign * c,
            None => self.num_inf_max = bump(self.num_inf_max, sign),
        }
    }
}

fn bump(count: usize, sign: f64) -> usize {
    if sign > 0.0 {
        count + 1
    } else {
        count.checked_sub(1).expect("infinite contribution counter underflow")
    }
}

/// `None` encodes a contribution of −∞.
#[inline]
pub fn min_contribution(a: f64, l: f64, u: f64) -> Option<f64> {
    let b = if a > 0.0 { l } else { u };
    if b.is_finite() {
        Some(a * b)
    } else {
        None
    }
}

/// `None` encodes a contribution of +∞.
#[inline]
pub fn max_contribution(a: f64, l: f64, u: f64) -> Option<f64> {
    let b = if a > 0.0 { u } else { l };
    if b.is_finite() {
        Some(a * b)
    } else {
        None
    }
}

/// Whether an entry `a` in a row with sides `[lo, up]` blocks its variable from increasing.
#[inline]
pub fn is_uplock(a: f64, lo: f64, up: f64) -> bool {
    (a > 0.0 && up < f64::INFINITY) || (a < 0.0 && lo > f64::NEG_INFINITY)
}

#[inline]
pub fn is_downlock(a: f64, lo: f64, up: f64) -> bool {
    (a > 0.0 && lo > f64::NEG_INFINITY) || (a < 0.0 && up < f64::INFINITY)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsTracker {
    pub row_nnz: Vec<usize>,
    pub col_nnz: Vec<usize>,
    pub uplocks: Vec<usize>,
    pub downlocks: Vec<usize>,
    pub activity: Vec<RowActivity>,
    updates: Vec<u32>,
    pending_refresh: Vec<usize>,
}

impl StatsTracker {
    pub fn init(problem: &LpProblem) -> Self {
        let (m, n) = (problem.num_rows, problem.num_cols);
        let mut s = Self {
            row_nnz: vec![0; m],
            col_nnz: vec![0; n],
            uplocks: vec![0; n],
            downlocks: vec![0; n],
            activity: vec![RowActivity::default(); m],
            updates: vec![0; m],
            pending_refresh: Vec::new(),
        };
        let a = &problem.matrix;
        for i in a.alive_rows() {
            let (lo, up) = (problem.row_lower[i], problem.row_upper[i]);
            for (k, v) in a.row(i).iter() {
                s.row_nnz[i] += 1;
                s.col_nnz[k] += 1;
                s.uplocks[k] += is_uplock(v, lo, up) as usize;
                s.downlocks[k] += is_downlock(v, lo, up) as usize;
            }
            s.activity[i] = compute_activity(problem, i);
        }
        s
    }

    fn touch(&mut self, i: usize) {
        self.updates[i] += 1;
        if self.updates[i] == ACTIVITY_REFRESH_INTERVAL {
            self.pending_refresh.push(i);
        }
    }

    /// Updates activities of the rows of column `k` after its bounds moved from
    /// `old` to `new`. Rows whose activity changed are appended to `dirty`.
    pub fn on_bound_change(
        &mut self,
        matrix: &SparseDualMatrix,
        k: usize,
        old: (f64, f64),
        new: (f64, f64),
        dirty: &mut Vec<usize>,
    ) {
        if old == new {
            return;
        }
        for (i, a) in matrix.col(k).iter() {
            let act = &mut self.activity[i];
            act.add(a, old.0, old.1, -1.0);
            act.add(a, new.0, new.1, 1.0);
            self.touch(i);
            dirty.push(i);
        }
    }

    /// Accounts for `A[i, k]` changing from `old_v` to `new_v` (zero means absent).
    pub fn on_entry_change(
        &mut self,
        i: usize,
        k: usize,
        old_v: f64,
        new_v: f64,
        bounds: (f64, f64),
        sides: (f64, f64),
    ) {
        let (l, u) = bounds;
        let (lo, up) = sides;
        if old_v != 0.0 {
            self.row_nnz[i] -= 1;
            self.col_nnz[k] -= 1;
            self.uplocks[k] -= is_uplock(old_v, lo, up) as usize;
            self.downlocks[k] -= is_downlock(old_v, lo, up) as usize;
            self.activity[i].add(old_v, l, u, -1.0);
        }
        if new_v != 0.0 {
            self.row_nnz[i] += 1;
            self.col_nnz[k] += 1;
            self.uplocks[k] += is_uplock(new_v, lo, up) as usize;
            self.downlocks[k] += is_downlock(new_v, lo, up) as usize;
            self.activity[i].add(new_v, l, u, 1.0);
        }
        if self.row_nnz[i] == 0 {
            self.activity[i] = RowActivity::default();
        }
        self.touch(i);
    }

    /// Adjusts locks after row `i`'s sides changed. Matrix entries are read from `matrix`.
    pub fn on_row_sides_change(&mut self, matrix: &SparseDualMatrix, i: usize, old: (f64, f64), new: (f64, f64)) {
        for (k, a) in matrix.row(i).iter() {
            self.uplocks[k] -= is_uplock(a, old.0, old.1) as usize;
            self.downlocks[k] -= is_downlock(a, old.0, old.1) as usize;
            self.uplocks[k] += is_uplock(a, new.0, new.1) as usize;
            self.downlocks[k] += is_downlock(a, new.0, new.1) as usize;
        }
    }

    /// Forgets row `i`. Must be called while the row's entries are still stored.
    pub fn remove_row(&mut self, matrix: &SparseDualMatrix, i: usize, sides: (f64, f64)) {
        for (k, a) in matrix.row(i).iter() {
            self.col_nnz[k] -= 1;
            self.uplocks[k] -= is_uplock(a, sides.0, sides.1) as usize;
            self.downlocks[k] -= is_downlock(a, sides.0, sides.1) as usize;
        }
        self.row_nnz[i] = 0;
        self.activity[i] = RowActivity::default();
        self.updates[i] = 0;
    }

    /// Forgets column `k`. Must be called while the column's entries are still stored.
    pub fn remove_col(&mut self, matrix: &SparseDualMatrix, k: usize, bounds: (f64, f64)) {
        for (i, a) in matrix.col(k).iter() {
            self.row_nnz[i] -= 1;
            if self.row_nnz[i] == 0 {
                self.activity[i] = RowActivity::default();
            } else {
                self.activity[i].add(a, bounds.0, bounds.1, -1.0);
            }
            self.touch(i);
        }
        self.col_nnz[k] = 0;
        self.uplocks[k] = 0;
        self.downlocks[k] = 0;
    }

    pub fn refresh_row(&mut self, problem: &LpProblem, i: usize) {
        self.activity[i] =
            if problem.matrix.is_row_alive(i) { compute_activity(problem, i) } else { RowActivity::default() };
        self.updates[i] = 0;
    }

    /// Recomputes rows whose update counters crossed the refresh interval.
    pub fn flush_refresh(&mut self, problem: &LpProblem) {
        while let Some(i) = self.pending_refresh.pop() {
            self.refresh_row(problem, i);
        }
    }

    pub fn full_refresh(&mut self, problem: &LpProblem) {
        *self = Self::init(problem);
    }

    /// Compares against a from-scratch tracker: counts exactly, activities
    /// within `ACTIVITY_REFRESH_TOL · (1 + |finite part|)`.
    pub fn diff(&self, fresh: &StatsTracker) -> Option<String> {
        if self.row_nnz != fresh.row_nnz {
            return Some(String::from("row nnz counts differ"));
        }
        if self.col_nnz != fresh.col_nnz {
            return Some(String::from("column nnz counts differ"));
        }
        if self.uplocks != fresh.uplocks || self.downlocks != fresh.downlocks {
            return Some(String::from("lock counts differ"));
        }
        for (i, (a, b)) in self.activity.iter().zip(&fresh.activity).enumerate() {
            if a.num_inf_min != b.num_inf_min || a.num_inf_max != b.num_inf_max {
                return Some(format!("row {i}: infinite counters {a:?} vs {b:?}"));
            }
            let close = |x: f64, y: f64| (x - y).abs() <= ACTIVITY_REFRESH_TOL * (1.0 + y.abs());
            if !close(a.min_finite, b.min_finite) || !close(a.max_finite, b.max_finite) {
                return Some(format!("row {i}: activity {a:?} vs {b:?}"));
            }
        }
        None
    }
}

fn compute_activity(problem: &LpProblem, i: usize) -> RowActivity {
    let mut act = RowActivity::default();
    for (k, a) in problem.matrix.row(i).iter() {
        act.add(a, problem.col_lower[k], problem.col_upper[k], 1.0);
    }
    act
}
