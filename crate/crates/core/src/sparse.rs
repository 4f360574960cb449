//! Constraint matrix stored simultaneously by rows and by columns.
//!
//! Each row (column) owns a contiguous span inside one shared array, followed
//! by a few unused slots. Spans are laid out in index order, so the slack of a
//! span is the gap up to the start of the next one. When a span runs out of
//! room it borrows slack from a nearby span by shifting the spans in between;
//! if no span within [`NEIGHBOR_SEARCH`] positions has enough room the whole
//! array is rebuilt with fresh slack.
//!
//! Entries inside a span are unordered; removal swaps with the last entry.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::tolerances::ZERO_DROP_TOL;

/// How many spans on either side are searched for slack before reallocating.
pub const NEIGHBOR_SEARCH: usize = 8;

pub const DEFAULT_SLACK_FRACTION: f64 = 0.2;

const NONE: usize = usize::MAX;

fn slack_for(len: usize, fraction: f64) -> usize {
    let extra = libm::ceil(fraction * len as f64) as usize;
    extra.max(1)
}

#[derive(Debug, Clone, PartialEq)]
struct SpanStore {
    /// `start[i]..start[i + 1]` is the capacity of span `i`; the last entry is a sentinel.
    start: Vec<usize>,
    len: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl SpanStore {
    fn from_lists(lists: &[Vec<(usize, f64)>], fraction: f64) -> Self {
        let mut start = Vec::with_capacity(lists.len() + 1);
        let mut len = Vec::with_capacity(lists.len());
        let total: usize = lists.iter().map(|l| l.len() + slack_for(l.len(), fraction)).sum();
        let mut idx = vec![0; total];
        let mut val = vec![0.0; total];
        let mut pos = 0;
        for list in lists {
            start.push(pos);
            len.push(list.len());
            for (off, &(k, v)) in list.iter().enumerate() {
                idx[pos + off] = k;
                val[pos + off] = v;
            }
            pos += list.len() + slack_for(list.len(), fraction);
        }
        start.push(pos);
        Self { start, len, idx, val }
    }

    #[inline]
    fn count(&self) -> usize {
        self.len.len()
    }

    #[inline]
    fn capacity(&self, i: usize) -> usize {
        self.start[i + 1] - self.start[i]
    }

    #[inline]
    fn slack(&self, i: usize) -> usize {
        self.capacity(i) - self.len[i]
    }

    #[inline]
    fn indices(&self, i: usize) -> &[usize] {
        let s = self.start[i];
        &self.idx[s..s + self.len[i]]
    }

    #[inline]
    fn values(&self, i: usize) -> &[f64] {
        let s = self.start[i];
        &self.val[s..s + self.len[i]]
    }

    fn position(&self, i: usize, k: usize) -> Option<usize> {
        let s = self.start[i];
        self.indices(i).iter().position(|&j| j == k).map(|p| s + p)
    }

    fn remove_at(&mut self, i: usize, pos: usize) {
        let last = self.start[i] + self.len[i] - 1;
        self.idx[pos] = self.idx[last];
        self.val[pos] = self.val[last];
        self.len[i] -= 1;
    }

    fn remove(&mut self, i: usize, k: usize) -> Option<f64> {
        let pos = self.position(i, k)?;
        let v = self.val[pos];
        self.remove_at(i, pos);
        Some(v)
    }

    fn push(&mut self, i: usize, k: usize, v: f64, fraction: f64) {
        if self.slack(i) == 0 {
            self.grow(i, 1, fraction);
        }
        let pos = self.start[i] + self.len[i];
        self.idx[pos] = k;
        self.val[pos] = v;
        self.len[i] += 1;
    }

    /// Makes room for `extra` more entries in span `i`.
    fn grow(&mut self, i: usize, extra: usize, fraction: f64) {
        let n = self.count();
        for j in (i + 1)..n.min(i + 1 + NEIGHBOR_SEARCH) {
            if self.slack(j) >= extra {
                self.shift_right(i + 1, j, extra);
                return;
            }
        }
        for j in (i.saturating_sub(NEIGHBOR_SEARCH)..i).rev() {
            if self.slack(j) >= extra {
                self.shift_left(j + 1, i, extra);
                return;
            }
        }
        self.reallocate(i, extra, fraction);
    }

    /// Moves the data of spans `from..=to` right by `by`; span `to` must have that much slack.
    fn shift_right(&mut self, from: usize, to: usize, by: usize) {
        for r in (from..=to).rev() {
            let s = self.start[r];
            let l = self.len[r];
            self.idx.copy_within(s..s + l, s + by);
            self.val.copy_within(s..s + l, s + by);
            self.start[r] = s + by;
        }
    }

    /// Moves the data of spans `from..=to` left by `by`; span `from - 1` must have that much slack.
    fn shift_left(&mut self, from: usize, to: usize, by: usize) {
        for r in from..=to {
            let s = self.start[r];
            let l = self.len[r];
            self.idx.copy_within(s..s + l, s - by);
            self.val.copy_within(s..s + l, s - by);
            self.start[r] = s - by;
        }
    }

    fn reallocate(&mut self, grow_span: usize, extra: usize, fraction: f64) {
        let n = self.count();
        let mut total = 0;
        let caps: Vec<usize> = (0..n)
            .map(|r| {
                let mut cap = self.len[r] + slack_for(self.len[r], fraction);
                if r == grow_span {
                    cap += extra.max(self.capacity(r));
                }
                total += cap;
                cap
            })
            .collect();
        let mut idx = vec![0; total];
        let mut val = vec![0.0; total];
        let mut pos = 0;
        for r in 0..n {
            let s = self.start[r];
            let l = self.len[r];
            idx[pos..pos + l].copy_from_slice(&self.idx[s..s + l]);
            val[pos..pos + l].copy_from_slice(&self.val[s..s + l]);
            self.start[r] = pos;
            pos += caps[r];
        }
        self.start[n] = pos;
        self.idx = idx;
        self.val = val;
    }
}

/// One coefficient change produced by a row combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryChange {
    pub col: usize,
    pub old: f64,
    pub new: f64,
}

/// Read-only view of one row or column span.
#[derive(Debug, Clone, Copy)]
pub struct Span<'a> {
    pub indices: &'a [usize],
    pub values: &'a [f64],
}

impl<'a> Span<'a> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn to_vec(&self) -> Vec<(usize, f64)> {
        self.iter().collect()
    }
}

/// The constraint matrix `A` in row-major and column-major form at once.
#[derive(Debug, Clone)]
pub struct SparseDualMatrix {
    rows: SpanStore,
    cols: SpanStore,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
    live_nnz: usize,
    slack_fraction: f64,
    zero_tol: f64,
    /// Per-column scratch marks used by row combination; always all `NONE` between calls.
    scratch: Vec<usize>,
}

impl SparseDualMatrix {
    /// Builds the matrix from `(row, col, value)` triplets. Duplicates are summed and
    /// entries with magnitude at most [`ZERO_DROP_TOL`] are dropped.
    pub fn build(triplets: &[(usize, usize, f64)], m: usize, n: usize, slack_fraction: f64) -> Result<Self, Error> {
        Self::build_with_tol(triplets, m, n, slack_fraction, ZERO_DROP_TOL)
    }

    pub fn build_with_tol(
        triplets: &[(usize, usize, f64)],
        m: usize,
        n: usize,
        slack_fraction: f64,
        zero_tol: f64,
    ) -> Result<Self, Error> {
        let mut row_lists: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut mark = vec![NONE; n];
        let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for &(i, k, v) in triplets {
            if i >= m || k >= n {
                return Err(Error::IndexOutOfRange { row: i, col: k, rows: m, cols: n });
            }
            by_row[i].push((k, v));
        }
        for (i, entries) in by_row.into_iter().enumerate() {
            let list = &mut row_lists[i];
            for (k, v) in entries {
                if mark[k] == NONE {
                    mark[k] = list.len();
                    list.push((k, v));
                } else {
                    list[mark[k]].1 += v;
                }
            }
            for &(k, _) in list.iter() {
                mark[k] = NONE;
            }
            list.retain(|&(_, v)| v.abs() > zero_tol || v.is_nan());
        }
        let mut col_lists: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut nnz = 0;
        for (i, list) in row_lists.iter().enumerate() {
            for &(k, v) in list {
                col_lists[k].push((i, v));
                nnz += 1;
            }
        }
        Ok(Self {
            rows: SpanStore::from_lists(&row_lists, slack_fraction),
            cols: SpanStore::from_lists(&col_lists, slack_fraction),
            row_alive: vec![true; m],
            col_alive: vec![true; n],
            live_nnz: nnz,
            slack_fraction,
            zero_tol,
            scratch: vec![NONE; n],
        })
    }

    pub fn num_rows(&self) -> usize {
        self.row_alive.len()
    }

    pub fn num_cols(&self) -> usize {
        self.col_alive.len()
    }

    pub fn live_nnz(&self) -> usize {
        self.live_nnz
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    #[inline]
    pub fn is_row_alive(&self, i: usize) -> bool {
        self.row_alive[i]
    }

    #[inline]
    pub fn is_col_alive(&self, k: usize) -> bool {
        self.col_alive[k]
    }

    pub fn alive_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_rows()).filter(|&i| self.row_alive[i])
    }

    pub fn alive_cols(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_cols()).filter(|&k| self.col_alive[k])
    }

    #[inline]
    pub fn row(&self, i: usize) -> Span<'_> {
        Span { indices: self.rows.indices(i), values: self.rows.values(i) }
    }

    #[inline]
    pub fn col(&self, k: usize) -> Span<'_> {
        Span { indices: self.cols.indices(k), values: self.cols.values(k) }
    }

    #[inline]
    pub fn row_len(&self, i: usize) -> usize {
        self.rows.len[i]
    }

    #[inline]
    pub fn col_len(&self, k: usize) -> usize {
        self.cols.len[k]
    }

    /// Stored coefficient `A[i, k]`, zero when absent.
    pub fn get(&self, i: usize, k: usize) -> f64 {
        if self.rows.len[i] <= self.cols.len[k] {
            self.rows.position(i, k).map_or(0.0, |p| self.rows.val[p])
        } else {
            self.cols.position(k, i).map_or(0.0, |p| self.cols.val[p])
        }
    }

    fn check_row(&self, i: usize) -> Result<(), Error> {
        if i >= self.num_rows() || !self.row_alive[i] {
            return Err(Error::DeadRow(i));
        }
        Ok(())
    }

    fn check_col(&self, k: usize) -> Result<(), Error> {
        if k >= self.num_cols() || !self.col_alive[k] {
            return Err(Error::DeadCol(k));
        }
        Ok(())
    }

    /// Marks row `i` dead and strips its entries from the column view.
    /// Returns the columns whose spans shrank.
    pub fn delete_row(&mut self, i: usize) -> Result<Vec<usize>, Error> {
        self.check_row(i)?;
        let touched: Vec<usize> = self.rows.indices(i).to_vec();
        for &k in &touched {
            self.cols.remove(k, i);
        }
        self.live_nnz -= touched.len();
        self.rows.len[i] = 0;
        self.row_alive[i] = false;
        Ok(touched)
    }

    /// Marks column `k` dead and strips its entries from the row view.
    /// Returns the rows whose spans shrank.
    pub fn delete_col(&mut self, k: usize) -> Result<Vec<usize>, Error> {
        self.check_col(k)?;
        let touched: Vec<usize> = self.cols.indices(k).to_vec();
        for &i in &touched {
            self.rows.remove(i, k);
        }
        self.live_nnz -= touched.len();
        self.cols.len[k] = 0;
        self.col_alive[k] = false;
        Ok(touched)
    }

    /// Sets `A[i, k] = v`, removing the entry when `|v|` is below the drop tolerance.
    /// Returns the previous value (zero when absent).
    pub fn set_value(&mut self, i: usize, k: usize, v: f64) -> Result<f64, Error> {
        self.check_row(i)?;
        self.check_col(k)?;
        let drop = v.abs() <= self.zero_tol;
        match self.rows.position(i, k) {
            Some(p) => {
                let old = self.rows.val[p];
                if drop {
                    self.rows.remove_at(i, p);
                    self.cols.remove(k, i);
                    self.live_nnz -= 1;
                } else {
                    self.rows.val[p] = v;
                    let q = self.cols.position(k, i).expect("row and column views out of sync");
                    self.cols.val[q] = v;
                }
                Ok(old)
            }
            None => {
                if !drop {
                    self.rows.push(i, k, v, self.slack_fraction);
                    self.cols.push(k, i, v, self.slack_fraction);
                    self.live_nnz += 1;
                }
                Ok(0.0)
            }
        }
    }

    /// Replaces row `dst` by `dst + lambda * src`. Returns the number of new entries.
    pub fn add_scaled_row(&mut self, src: usize, dst: usize, lambda: f64) -> Result<usize, Error> {
        let mut changes = Vec::new();
        self.add_scaled_row_tracked(src, dst, lambda, None, &mut changes)
    }

    /// Like [`add_scaled_row`](Self::add_scaled_row), but reports every coefficient
    /// change of `dst` into `changes`. When `cancel` names a column, that entry is
    /// removed from `dst` outright instead of relying on floating-point cancellation.
    pub fn add_scaled_row_tracked(
        &mut self,
        src: usize,
        dst: usize,
        lambda: f64,
        cancel: Option<usize>,
        changes: &mut Vec<EntryChange>,
    ) -> Result<usize, Error> {
        self.check_row(src)?;
        self.check_row(dst)?;
        if src == dst {
            return Err(Error::DeadRow(dst));
        }
        let src_entries = self.row(src).to_vec();
        let base = self.rows.start[dst];
        for (off, &k) in self.rows.indices(dst).iter().enumerate() {
            self.scratch[k] = base + off;
        }
        let mut removals = Vec::new();
        let mut insertions = Vec::new();
        for &(k, a) in &src_entries {
            let pos = self.scratch[k];
            if pos != NONE {
                let old = self.rows.val[pos];
                let new = if cancel == Some(k) { 0.0 } else { old + lambda * a };
                if new.abs() <= self.zero_tol {
                    removals.push(k);
                    changes.push(EntryChange { col: k, old, new: 0.0 });
                } else {
                    self.rows.val[pos] = new;
                    let q = self.cols.position(k, dst).expect("row and column views out of sync");
                    self.cols.val[q] = new;
                    changes.push(EntryChange { col: k, old, new });
                }
            } else if cancel != Some(k) {
                let new = lambda * a;
                if new.abs() > self.zero_tol {
                    insertions.push((k, new));
                }
            }
        }
        for &k in self.rows.indices(dst) {
            self.scratch[k] = NONE;
        }
        for &k in &removals {
            self.rows.remove(dst, k);
            self.cols.remove(k, dst);
            self.live_nnz -= 1;
        }
        for &(k, v) in &insertions {
            self.rows.push(dst, k, v, self.slack_fraction);
            self.cols.push(k, dst, v, self.slack_fraction);
            self.live_nnz += 1;
            changes.push(EntryChange { col: k, old: 0.0, new: v });
        }
        Ok(insertions.len())
    }

    /// Alive entries as triplets, row by row in span order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.live_nnz);
        for i in self.alive_rows() {
            for (k, v) in self.row(i).iter() {
                if self.col_alive[k] {
                    out.push((i, k, v));
                }
            }
        }
        out
    }

    /// Physically removes dead rows and columns. The maps send old indices to new ones.
    pub fn compact(&self) -> (SparseDualMatrix, Vec<Option<usize>>, Vec<Option<usize>>) {
        let mut row_map = vec![None; self.num_rows()];
        let mut col_map = vec![None; self.num_cols()];
        let mut m = 0;
        for i in self.alive_rows() {
            row_map[i] = Some(m);
            m += 1;
        }
        let mut n = 0;
        for k in self.alive_cols() {
            col_map[k] = Some(n);
            n += 1;
        }
        let triplets: Vec<(usize, usize, f64)> =
            self.triplets().into_iter().map(|(i, k, v)| (row_map[i].unwrap(), col_map[k].unwrap(), v)).collect();
        let matrix = Self::build_with_tol(&triplets, m, n, self.slack_fraction, self.zero_tol)
            .expect("compacted indices in range");
        (matrix, row_map, col_map)
    }

    /// Dense copy; dead rows and columns read as zero.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.num_cols()]; self.num_rows()];
        for (i, k, v) in self.triplets() {
            dense[i][k] = v;
        }
        dense
    }

    /// Checks that both views hold the same entry set and that counters agree.
    pub fn verify(&self) -> Result<(), String> {
        let mut count = 0;
        for i in 0..self.num_rows() {
            if !self.row_alive[i] && self.rows.len[i] != 0 {
                return Err(format!("dead row {i} still stores entries"));
            }
            let idx = self.rows.indices(i);
            for (p, (k, v)) in self.row(i).iter().enumerate() {
                if idx[..p].contains(&k) {
                    return Err(format!("row {i} stores column {k} twice"));
                }
                if !self.col_alive[k] {
                    return Err(format!("row {i} references dead column {k}"));
                }
                if v.abs() <= self.zero_tol {
                    return Err(format!("row {i} stores explicit zero at column {k}"));
                }
                match self.cols.position(k, i) {
                    Some(q) if self.cols.val[q] == v => {}
                    Some(q) => {
                        return Err(format!("entry ({i}, {k}) is {v} by row but {} by column", self.cols.val[q]))
                    }
                    None => return Err(format!("entry ({i}, {k}) missing from column view")),
                }
                count += 1;
            }
        }
        let mut col_count = 0;
        for k in 0..self.num_cols() {
            if !self.col_alive[k] && self.cols.len[k] != 0 {
                return Err(format!("dead column {k} still stores entries"));
            }
            for (i, _) in self.col(k).iter() {
                if !self.row_alive[i] {
                    return Err(format!("column {k} references dead row {i}"));
                }
                col_count += 1;
            }
        }
        if count != col_count {
            return Err(format!("row view holds {count} entries, column view {col_count}"));
        }
        if count != self.live_nnz {
            return Err(format!("live_nnz is {} but {count} entries are stored", self.live_nnz));
        }
        for store in [&self.rows, &self.cols] {
            for r in 0..store.count() {
                if store.start[r] > store.start[r + 1] || store.len[r] > store.capacity(r) {
                    return Err(format!("span {r} overflows its capacity"));
                }
            }
        }
        Ok(())
    }
}

impl PartialEq for SparseDualMatrix {
    /// Structural equality of the alive entry sets, independent of span order and slack.
    fn eq(&self, other: &Self) -> bool {
        if self.num_rows() != other.num_rows()
            || self.num_cols() != other.num_cols()
            || self.live_nnz != other.live_nnz
            || self.row_alive != other.row_alive
            || self.col_alive != other.col_alive
        {
            return false;
        }
        self.alive_rows()
            .all(|i| self.row_len(i) == other.row_len(i) && self.row(i).iter().all(|(k, v)| other.get(i, k) == v))
    }
}
