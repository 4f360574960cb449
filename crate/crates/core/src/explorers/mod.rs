//! Reduction explorers. Each one scans the dirty rows or columns of a session
//! and applies the reductions it finds through the session primitives.

use alloc::vec::Vec;

use crate::driver::ExplorerKind;
use crate::reduction::{Session, Step};

mod fast;
mod medium;

pub use fast::{
    column_singleton_equality, column_singleton_inequality, doubleton_rows, redundant_constraints, singleton_rows,
    variable_locks,
};
pub use medium::{dual_propagation, parallel_columns, parallel_rows, primal_propagation};

/// Per-pass settings handed to explorers.
#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub strong_dual: bool,
    pub round: usize,
}

impl Default for Ctx {
    fn default() -> Self {
        Self { strong_dual: true, round: 0 }
    }
}

pub fn run(kind: ExplorerKind, s: &mut Session, ctx: &Ctx) -> Step {
    match kind {
        ExplorerKind::SingletonRows => singleton_rows(s, ctx),
        ExplorerKind::RedundantConstraints => redundant_constraints(s, ctx),
        ExplorerKind::DoubletonRows => doubleton_rows(s, ctx),
        ExplorerKind::ColumnSingletonEquality => column_singleton_equality(s, ctx),
        ExplorerKind::ColumnSingletonInequality => column_singleton_inequality(s, ctx),
        ExplorerKind::VariableLocks => variable_locks(s, ctx),
        ExplorerKind::ParallelRows => parallel_rows(s, ctx),
        ExplorerKind::ParallelColumns => parallel_columns(s, ctx),
        ExplorerKind::PrimalPropagation => primal_propagation(s, ctx),
        ExplorerKind::DualPropagation => dual_propagation(s, ctx),
    }
}

/// Upper bound on follow-up sweeps over rows or columns an explorer dirtied itself.
const MAX_SWEEPS: usize = 64;

/// Applies `f` to the dirty rows, then to rows dirtied while doing so.
pub(crate) fn sweep_rows(s: &mut Session, mut f: impl FnMut(&mut Session, usize) -> Step) -> Step {
    let mut list = s.dirty.row_candidates();
    for _ in 0..MAX_SWEEPS {
        let pos = s.dirty.next_rows_len();
        for &i in &list {
            if s.problem.matrix.is_row_alive(i) {
                f(s, i)?;
            }
        }
        list = s.dirty.next_rows_since(pos);
        if list.is_empty() {
            break;
        }
        list.sort_unstable();
    }
    Ok(())
}

pub(crate) fn sweep_cols(s: &mut Session, mut f: impl FnMut(&mut Session, usize) -> Step) -> Step {
    let mut list = s.dirty.col_candidates();
    for _ in 0..MAX_SWEEPS {
        let pos = s.dirty.next_cols_len();
        for &k in &list {
            if s.problem.matrix.is_col_alive(k) {
                f(s, k)?;
            }
        }
        list = s.dirty.next_cols_since(pos);
        if list.is_empty() {
            break;
        }
        list.sort_unstable();
    }
    Ok(())
}

/// Closed interval with possibly infinite ends; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Iv {
    pub lo: f64,
    pub hi: f64,
}

impl Iv {
    pub const FREE: Iv = Iv { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn point(v: f64) -> Self {
        Iv { lo: v, hi: v }
    }

    pub fn is_free(&self) -> bool {
        self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY
    }

    pub fn is_empty(&self, tol: f64) -> bool {
        self.lo > self.hi + tol
    }

    pub fn scale(self, a: f64) -> Iv {
        let (p, q) = (mul(a, self.lo), mul(a, self.hi));
        if a >= 0.0 {
            Iv { lo: p, hi: q }
        } else {
            Iv { lo: q, hi: p }
        }
    }

    pub fn sub(self, o: Iv) -> Iv {
        Iv { lo: self.lo - o.hi, hi: self.hi - o.lo }
    }

    pub fn meet(self, o: Iv) -> Iv {
        Iv { lo: self.lo.max(o.lo), hi: self.hi.min(o.hi) }
    }
}

/// Product where `0 · ∞ = 0`.
fn mul(a: f64, v: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * v
    }
}

/// Sign range of the dual of a row with sides `(lo, up)`.
pub(crate) fn row_dual_range(lo: f64, up: f64) -> Iv {
    match (lo.is_finite(), up.is_finite()) {
        (true, true) => Iv::FREE,
        (true, false) => Iv { lo: 0.0, hi: f64::INFINITY },
        (false, true) => Iv { lo: f64::NEG_INFINITY, hi: 0.0 },
        (false, false) => Iv::point(0.0),
    }
}

/// Sign range of the reduced cost of a column with bounds `(l, u)`.
pub(crate) fn reduced_cost_range(l: f64, u: f64) -> Iv {
    row_dual_range(l, u)
}

pub(crate) fn entries(s: &Session, i: usize) -> Vec<(usize, f64)> {
    s.problem.matrix.row(i).to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_arithmetic() {
        let a = Iv { lo: 0.0, hi: f64::INFINITY };
        assert_eq!(a.scale(-2.0), Iv { lo: f64::NEG_INFINITY, hi: 0.0 });
        assert_eq!(Iv::point(1.0).sub(a), Iv { lo: f64::NEG_INFINITY, hi: 1.0 });
        assert!(Iv { lo: 1.0, hi: 0.0 }.is_empty(1e-9));
        assert_eq!(Iv { lo: -1.0, hi: 2.0 }.meet(a), Iv { lo: 0.0, hi: 2.0 });
        assert_eq!(row_dual_range(f64::NEG_INFINITY, f64::INFINITY), Iv::point(0.0));
    }
}
