use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::clock::{Clock, NoClock};
use crate::error::Error;
use crate::explorers::{self, Ctx};
use crate::problem::{LpProblem, PresolveStatus};
use crate::reduction::{PostsolveJournal, Session, Verdict};
use crate::sparse::{SparseDualMatrix, DEFAULT_SLACK_FRACTION};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExplorerKind {
    SingletonRows,
    RedundantConstraints,
    DoubletonRows,
    ColumnSingletonEquality,
    ColumnSingletonInequality,
    VariableLocks,
    ParallelRows,
    ParallelColumns,
    PrimalPropagation,
    DualPropagation,
}

impl ExplorerKind {
    /// Execution order within a round.
    pub const ALL: [ExplorerKind; 10] = [
        ExplorerKind::SingletonRows,
        ExplorerKind::RedundantConstraints,
        ExplorerKind::DoubletonRows,
        ExplorerKind::ColumnSingletonEquality,
        ExplorerKind::ColumnSingletonInequality,
        ExplorerKind::VariableLocks,
        ExplorerKind::ParallelRows,
        ExplorerKind::ParallelColumns,
        ExplorerKind::PrimalPropagation,
        ExplorerKind::DualPropagation,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ExplorerKind::SingletonRows => "singleton_rows",
            ExplorerKind::RedundantConstraints => "redundant_constraints",
            ExplorerKind::DoubletonRows => "doubleton_rows",
            ExplorerKind::ColumnSingletonEquality => "column_singleton_equality",
            ExplorerKind::ColumnSingletonInequality => "column_singleton_inequality",
            ExplorerKind::VariableLocks => "variable_locks",
            ExplorerKind::ParallelRows => "parallel_rows",
            ExplorerKind::ParallelColumns => "parallel_columns",
            ExplorerKind::PrimalPropagation => "primal_propagation",
            ExplorerKind::DualPropagation => "dual_propagation",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let norm = name.replace('-', "_");
        Self::ALL.into_iter().find(|k| k.name() == norm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresolveConfig {
    pub max_rounds: usize,
    /// Allow dual fixings that keep at least one optimum rather than all of them.
    pub strong_dual: bool,
    pub enabled: [bool; 10],
    pub tol: Tolerances,
    /// Seconds, measured with the clock passed to [`presolve_with`].
    pub time_limit: Option<f64>,
}

impl Default for PresolveConfig {
    fn default() -> Self {
        Self { max_rounds: 16, strong_dual: true, enabled: [true; 10], tol: Tolerances::default(), time_limit: None }
    }
}

impl PresolveConfig {
    pub fn is_enabled(&self, kind: ExplorerKind) -> bool {
        self.enabled[kind.index()]
    }

    pub fn set_enabled(&mut self, kind: ExplorerKind, on: bool) {
        self.enabled[kind.index()] = on;
    }

    pub fn disable_all(mut self) -> Self {
        self.enabled = [false; 10];
        self
    }

    pub fn check(&self) -> Result<(), Error> {
        if self.max_rounds == 0 {
            return Err(Error::InvalidConfig("max_rounds must be at least 1"));
        }
        if !self.tol.all_positive() {
            return Err(Error::InvalidConfig("tolerances must be positive and finite"));
        }
        if matches!(self.time_limit, Some(t) if t.is_nan() || t < 0.0) {
            return Err(Error::InvalidConfig("time limit must be non-negative"));
        }
        Ok(())
    }
}

/// Rows and columns touched since they were last examined, in two generations:
/// the current round's work list and the marks collected for the next round.
#[derive(Debug, Clone)]
pub struct DirtyQueues {
    cur_rows: Vec<usize>,
    cur_cols: Vec<usize>,
    next_rows: Vec<usize>,
    next_cols: Vec<usize>,
    in_next_row: Vec<bool>,
    in_next_col: Vec<bool>,
    round: u32,
    row_stamp: Vec<u32>,
    col_stamp: Vec<u32>,
}

impl DirtyQueues {
    pub fn new(m: usize, n: usize) -> Self {
        Self {
            cur_rows: Vec::new(),
            cur_cols: Vec::new(),
            next_rows: Vec::new(),
            next_cols: Vec::new(),
            in_next_row: vec![false; m],
            in_next_col: vec![false; n],
            round: 1,
            row_stamp: vec![0; m],
            col_stamp: vec![0; n],
        }
    }

    #[inline]
    pub fn mark_row(&mut self, i: usize) {
        if !self.in_next_row[i] {
            self.in_next_row[i] = true;
            self.next_rows.push(i);
        }
    }

    #[inline]
    pub fn mark_col(&mut self, k: usize) {
        if !self.in_next_col[k] {
            self.in_next_col[k] = true;
            self.next_cols.push(k);
        }
    }

    pub fn mark_all(&mut self) {
        for i in 0..self.in_next_row.len() {
            self.mark_row(i);
        }
        for k in 0..self.in_next_col.len() {
            self.mark_col(k);
        }
    }

    /// Starts a new round: the marks collected so far become the work list.
    pub fn advance(&mut self) {
        self.cur_rows = core::mem::take(&mut self.next_rows);
        self.cur_cols = core::mem::take(&mut self.next_cols);
        self.in_next_row.iter_mut().for_each(|f| *f = false);
        self.in_next_col.iter_mut().for_each(|f| *f = false);
        self.round += 1;
    }

    pub fn is_empty(&self) -> bool {
        self.cur_rows.is_empty() && self.cur_cols.is_empty() && self.next_rows.is_empty() && self.next_cols.is_empty()
    }

    /// Current work list plus everything marked since the round started, sorted.
    pub fn row_candidates(&self) -> Vec<usize> {
        merged(&self.cur_rows, &self.next_rows)
    }

    pub fn col_candidates(&self) -> Vec<usize> {
        merged(&self.cur_cols, &self.next_cols)
    }

    pub fn next_rows_len(&self) -> usize {
        self.next_rows.len()
    }

    pub fn next_cols_len(&self) -> usize {
        self.next_cols.len()
    }

    pub fn next_rows_since(&self, pos: usize) -> Vec<usize> {
        self.next_rows[pos..].to_vec()
    }

    pub fn next_cols_since(&self, pos: usize) -> Vec<usize> {
        self.next_cols[pos..].to_vec()
    }

    /// Claims row `i` for a once-per-round pass. False if already claimed this round.
    pub fn claim_row(&mut self, i: usize) -> bool {
        let fresh = self.row_stamp[i] != self.round;
        self.row_stamp[i] = self.round;
        fresh
    }

    pub fn claim_col(&mut self, k: usize) -> bool {
        let fresh = self.col_stamp[k] != self.round;
        self.col_stamp[k] = self.round;
        fresh
    }
}

fn merged(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExplorerStats {
    pub reductions: usize,
    pub passes: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresolveReport {
    pub status: PresolveStatus,
    pub rounds: usize,
    pub rows_before: usize,
    pub cols_before: usize,
    pub nnz_before: usize,
    pub rows_after: usize,
    pub cols_after: usize,
    pub nnz_after: usize,
    pub explorers: [ExplorerStats; 10],
    pub seconds: f64,
}

impl PresolveReport {
    /// `nnz(reduced) / nnz(original)`, 1 for a matrix without entries.
    pub fn nnz_ratio(&self) -> f64 {
        if self.nnz_before == 0 {
            1.0
        } else {
            self.nnz_after as f64 / self.nnz_before as f64
        }
    }

    pub fn total_reductions(&self) -> usize {
        self.explorers.iter().map(|e| e.reductions).sum()
    }

    /// Line-oriented summary. Wall times are omitted unless `timings` is set,
    /// which keeps the text reproducible.
    pub fn to_text(&self, timings: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "status      {}", self.status.as_str());
        let _ = writeln!(s, "rounds      {}", self.rounds);
        let _ = writeln!(
            s,
            "rows        {} -> {} ({:+})",
            self.rows_before,
            self.rows_after,
            self.rows_after as i64 - self.rows_before as i64
        );
        let _ = writeln!(
            s,
            "cols        {} -> {} ({:+})",
            self.cols_before,
            self.cols_after,
            self.cols_after as i64 - self.cols_before as i64
        );
        let _ = writeln!(
            s,
            "nnz         {} -> {} ({:+})",
            self.nnz_before,
            self.nnz_after,
            self.nnz_after as i64 - self.nnz_before as i64
        );
        let _ = writeln!(s, "nnz_ratio   {:.4}", self.nnz_ratio());
        for kind in ExplorerKind::ALL {
            let e = &self.explorers[kind.index()];
            if timings {
                let _ = writeln!(s, "  {:<28} {:>7} {:>10.6}s", kind.name(), e.reductions, e.seconds);
            } else {
                let _ = writeln!(s, "  {:<28} {:>7}", kind.name(), e.reductions);
            }
        }
        if timings {
            let _ = writeln!(s, "time        {:.6}s", self.seconds);
        }
        s
    }

    /// `key=value` lines for machines.
    pub fn to_kv(&self, timings: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "status={}", self.status.as_str());
        let _ = writeln!(s, "rounds={}", self.rounds);
        let _ = writeln!(s, "rows_before={}", self.rows_before);
        let _ = writeln!(s, "cols_before={}", self.cols_before);
        let _ = writeln!(s, "nnz_before={}", self.nnz_before);
        let _ = writeln!(s, "rows_after={}", self.rows_after);
        let _ = writeln!(s, "cols_after={}", self.cols_after);
        let _ = writeln!(s, "nnz_after={}", self.nnz_after);
        let _ = writeln!(s, "nnz_ratio={:.4}", self.nnz_ratio());
        for kind in ExplorerKind::ALL {
            let e = &self.explorers[kind.index()];
            let _ = writeln!(s, "reductions.{}={}", kind.name(), e.reductions);
            if timings {
                let _ = writeln!(s, "seconds.{}={:.9}", kind.name(), e.seconds);
            }
        }
        if timings {
            let _ = writeln!(s, "seconds={:.9}", self.seconds);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresolveOutput {
    pub reduced: LpProblem,
    pub journal: PostsolveJournal,
    pub status: PresolveStatus,
    pub report: PresolveReport,
}

/// Called after every explorer pass; lets tests inspect the live session.
pub trait PassObserver {
    fn after_pass(&mut self, kind: ExplorerKind, round: usize, session: &Session);
}

impl PassObserver for () {
    fn after_pass(&mut self, _: ExplorerKind, _: usize, _: &Session) {}
}

#[derive(Debug, Clone, PartialEq)]
pub enum Defect {
    NanCoefficient {
        row: usize,
        col: usize,
    },
    InfiniteCoefficient {
        row: usize,
        col: usize,
    },
    BadObjective {
        col: usize,
        value: f64,
    },
    NanValue {
        what: &'static str,
        index: usize,
    },
    /// A lower bound of +∞ or an upper bound of −∞.
    WrongInfinity {
        what: &'static str,
        index: usize,
    },
    CrossedColumnBounds {
        col: usize,
        lower: f64,
        upper: f64,
    },
    CrossedRowSides {
        row: usize,
        lower: f64,
        upper: f64,
    },
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    Matrix(String),
}

impl Defect {
    pub fn message(&self) -> String {
        match self {
            Defect::NanCoefficient { row, col } => format!("NaN coefficient at ({row}, {col})"),
            Defect::InfiniteCoefficient { row, col } => format!("infinite coefficient at ({row}, {col})"),
            Defect::BadObjective { col, value } => format!("objective coefficient of column {col} is {value}"),
            Defect::NanValue { what, index } => format!("{what}[{index}] is NaN"),
            Defect::WrongInfinity { what, index } => format!("{what}[{index}] is an infinity of the wrong sign"),
            Defect::CrossedColumnBounds { col, lower, upper } => {
                format!("column {col} has lower bound {lower} above upper bound {upper}")
            }
            Defect::CrossedRowSides { row, lower, upper } => {
                format!("row {row} has lower side {lower} above upper side {upper}")
            }
            Defect::LengthMismatch { what, expected, found } => {
                format!("{what} has length {found}, expected {expected}")
            }
            Defect::Matrix(msg) => format!("matrix storage: {msg}"),
        }
    }

    /// Crossed bounds describe an infeasible instance rather than malformed data.
    pub fn is_infeasibility(&self) -> bool {
        matches!(self, Defect::CrossedColumnBounds { .. } | Defect::CrossedRowSides { .. })
    }
}

pub fn validate(problem: &LpProblem) -> Vec<Defect> {
    let mut defects = Vec::new();
    let (m, n) = (problem.num_rows, problem.num_cols);
    let lens: [(&'static str, usize, usize); 5] = [
        ("objective", n, problem.objective.len()),
        ("row_lower", m, problem.row_lower.len()),
        ("row_upper", m, problem.row_upper.len()),
        ("col_lower", n, problem.col_lower.len()),
        ("col_upper", n, problem.col_upper.len()),
    ];
    for (what, expected, found) in lens {
        if expected != found {
            defects.push(Defect::LengthMismatch { what, expected, found });
        }
    }
    if problem.matrix.num_rows() != m || problem.matrix.num_cols() != n {
        defects.push(Defect::Matrix(format!(
            "matrix is {}x{}, problem is {m}x{n}",
            problem.matrix.num_rows(),
            problem.matrix.num_cols()
        )));
    }
    if !defects.is_empty() {
        return defects;
    }
    for (i, k, v) in problem.matrix.triplets() {
        if v.is_nan() {
            defects.push(Defect::NanCoefficient { row: i, col: k });
        } else if v.is_infinite() {
            defects.push(Defect::InfiniteCoefficient { row: i, col: k });
        }
    }
    if defects.is_empty() {
        if let Err(msg) = problem.matrix.verify() {
            defects.push(Defect::Matrix(msg));
        }
    }
    for (k, &c) in problem.objective.iter().enumerate() {
        if !c.is_finite() {
            defects.push(Defect::BadObjective { col: k, value: c });
        }
    }
    let pairs: [(&'static str, &'static str, &[f64], &[f64], bool); 2] = [
        ("row_lower", "row_upper", &problem.row_lower, &problem.row_upper, true),
        ("col_lower", "col_upper", &problem.col_lower, &problem.col_upper, false),
    ];
    for (lname, uname, lo, up, is_row) in pairs {
        for idx in 0..lo.len() {
            let (l, u) = (lo[idx], up[idx]);
            let mut ok = true;
            for (what, v) in [(lname, l), (uname, u)] {
                if v.is_nan() {
                    defects.push(Defect::NanValue { what, index: idx });
                    ok = false;
                }
            }
            if l == f64::INFINITY {
                defects.push(Defect::WrongInfinity { what: lname, index: idx });
                ok = false;
            }
            if u == f64::NEG_INFINITY {
                defects.push(Defect::WrongInfinity { what: uname, index: idx });
                ok = false;
            }
            if ok && l > u {
                defects.push(if is_row {
                    Defect::CrossedRowSides { row: idx, lower: l, upper: u }
                } else {
                    Defect::CrossedColumnBounds { col: idx, lower: l, upper: u }
                });
            }
        }
    }
    if !problem.objective_offset.is_finite() {
        defects.push(Defect::NanValue { what: "objective_offset", index: 0 });
    }
    defects
}

/// Removes dead rows and columns. Maps send reduced indices to original ones.
pub fn compact_problem(problem: &LpProblem) -> (LpProblem, Vec<usize>, Vec<usize>) {
    let a = &problem.matrix;
    let row_map: Vec<usize> = a.alive_rows().collect();
    let col_map: Vec<usize> = a.alive_cols().collect();
    let (matrix, _, _) = a.compact();
    let pick = |v: &[f64], map: &[usize]| map.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let names =
        |v: &Option<Vec<String>>, map: &[usize]| v.as_ref().map(|v| map.iter().map(|&i| v[i].clone()).collect());
    let reduced = LpProblem {
        num_rows: row_map.len(),
        num_cols: col_map.len(),
        objective: pick(&problem.objective, &col_map),
        objective_offset: problem.objective_offset,
        matrix,
        row_lower: pick(&problem.row_lower, &row_map),
        row_upper: pick(&problem.row_upper, &row_map),
        col_lower: pick(&problem.col_lower, &col_map),
        col_upper: pick(&problem.col_upper, &col_map),
        row_names: names(&problem.row_names, &row_map),
        col_names: names(&problem.col_names, &col_map),
    };
    (reduced, row_map, col_map)
}

/// Runs presolve without a clock or observer.
pub fn presolve(problem: &LpProblem, config: &PresolveConfig) -> Result<PresolveOutput, Error> {
    presolve_with(problem, config, &NoClock, &mut ())
}

fn primal_infeasible(session: &Session) -> bool {
    let p = &session.problem;
    let feas = session.tol.feas;
    p.matrix.alive_cols().any(|k| p.col_lower[k] > p.col_upper[k] + feas)
        || p.matrix.alive_rows().any(|i| {
            let act = &session.stats.activity[i];
            act.min() > p.row_upper[i] + feas || act.max() < p.row_lower[i] - feas
        })
}

pub fn presolve_with(
    problem: &LpProblem,
    config: &PresolveConfig,
    clock: &dyn Clock,
    observer: &mut dyn PassObserver,
) -> Result<PresolveOutput, Error> {
    config.check()?;
    let start = clock.now();
    let defects = validate(problem);
    let crossed = defects.iter().any(Defect::is_infeasibility);
    let malformed: Vec<Defect> = defects.into_iter().filter(|d| !d.is_infeasibility()).collect();
    if !malformed.is_empty() {
        return Err(Error::InvalidProblem(malformed));
    }
    let (m, n, nnz) = (problem.num_rows, problem.num_cols, problem.nnz());
    let mut report = PresolveReport {
        status: PresolveStatus::Unchanged,
        rounds: 0,
        rows_before: m,
        cols_before: n,
        nnz_before: nnz,
        rows_after: m,
        cols_after: n,
        nnz_after: nnz,
        explorers: [ExplorerStats::default(); 10],
        seconds: 0.0,
    };

    // Work on a copy whose storage has fresh slack.
    let mut working = problem.clone();
    working.matrix = SparseDualMatrix::build_with_tol(
        &problem.matrix.triplets(),
        m,
        n,
        DEFAULT_SLACK_FRACTION,
        config.tol.zero_drop,
    )?;
    for i in 0..m {
        if !problem.matrix.is_row_alive(i) {
            working.matrix.delete_row(i)?;
        }
    }
    for k in 0..n {
        if !problem.matrix.is_col_alive(k) {
            working.matrix.delete_col(k)?;
        }
    }
    let mut session = Session::new(working, config.tol);
    let mut verdict = crossed.then_some(Verdict::InfeasiblePrimal);

    if verdict.is_none() {
        session.dirty.mark_all();
        session.dirty.advance();
        'rounds: for round in 0..config.max_rounds {
            report.rounds = round + 1;
            let before = session.applied;
            let ctx = Ctx { strong_dual: config.strong_dual, round };
            for kind in ExplorerKind::ALL {
                if !config.is_enabled(kind) {
                    continue;
                }
                if let Some(limit) = config.time_limit {
                    if clock.now() - start > limit {
                        log::debug!("time limit reached in round {round}");
                        break 'rounds;
                    }
                }
                let t0 = clock.now();
                let a0 = session.applied;
                let result = explorers::run(kind, &mut session, &ctx);
                let stats = &mut report.explorers[kind.index()];
                stats.reductions += session.applied - a0;
                stats.passes += 1;
                stats.seconds += clock.now() - t0;
                observer.after_pass(kind, round, &session);
                if let Err(v) = result {
                    verdict = Some(v);
                    break 'rounds;
                }
            }
            log::debug!("round {round}: {} reductions", session.applied - before);
            if session.applied == before {
                break;
            }
            session.dirty.advance();
        }
    }
    if verdict == Some(Verdict::UnboundedOrInfeasibleDual) && primal_infeasible(&session) {
        verdict = Some(Verdict::InfeasiblePrimal);
    }

    let (reduced, row_map, col_map) = compact_problem(&session.problem);
    let journal = PostsolveJournal {
        original_rows: m,
        original_cols: n,
        records: core::mem::take(&mut session.journal),
        row_map,
        col_map,
    };
    let status = match verdict {
        Some(Verdict::InfeasiblePrimal) => PresolveStatus::InfeasiblePrimal,
        Some(Verdict::UnboundedOrInfeasibleDual) => PresolveStatus::UnboundedOrInfeasibleDual,
        None if journal.records.is_empty() => PresolveStatus::Unchanged,
        None if reduced.num_rows == 0 && reduced.num_cols == 0 => PresolveStatus::SolvedCompletely,
        None => PresolveStatus::Reduced,
    };
    report.status = status;
    report.rows_after = reduced.num_rows;
    report.cols_after = reduced.num_cols;
    report.nnz_after = reduced.nnz();
    report.seconds = clock.now() - start;
    Ok(PresolveOutput { reduced, journal, status, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{random_lp, solve_dense, Feasibility, GeneratorConfig};
    use crate::postsolve::postsolve;
    use crate::problem::{check_kkt, objective_value, SolutionStatus};
    use crate::stats::StatsTracker;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn dense_box_problem_is_unchanged() {
        let p = LpProblem::from_dense(
            &[vec![1.0, 2.0, 3.0], vec![-2.0, 1.0, 1.0], vec![1.0, -1.0, 2.0]],
            vec![1.0, -1.0, 0.5],
            vec![-1.0, -2.0, -3.0],
            vec![1.0, 2.0, 3.0],
            vec![-1.0; 3],
            vec![1.0; 3],
        )
        .unwrap();
        let out = presolve(&p, &PresolveConfig::default()).unwrap();
        assert_eq!(out.status, PresolveStatus::Unchanged, "{:?}", out.journal.records);
        assert_eq!(out.journal.row_map, vec![0, 1, 2]);
        assert_eq!(out.journal.col_map, vec![0, 1, 2]);
        assert_eq!(out.reduced, p);
    }

    #[test]
    fn doubleton_example_loses_one_row_and_column() {
        // x1 + x2 = 1, x1 + 3 x2 ≤ 5, x ≥ 0
        let p = LpProblem::from_dense(
            &[vec![1.0, 1.0], vec![1.0, 3.0]],
            vec![1.0, 2.0],
            vec![1.0, -INF],
            vec![1.0, 5.0],
            vec![0.0; 2],
            vec![INF; 2],
        )
        .unwrap();
        let cfg = PresolveConfig::default().disable_all();
        let mut cfg = cfg;
        cfg.set_enabled(ExplorerKind::DoubletonRows, true);
        let out = presolve(&p, &cfg).unwrap();
        assert_eq!((out.reduced.num_rows, out.reduced.num_cols), (1, 1));
        let sol = solve_dense(&out.reduced, 60).unwrap();
        let full = postsolve(&out.journal, &sol).unwrap();
        assert!(check_kkt(&p, &full, 1e-9).unwrap().within(1e-9));
    }

    #[test]
    fn singleton_chain_is_solved_completely() {
        // x0 = 1; x0 + x1 = 3; x1 + x2 = 5
        let p = LpProblem::from_dense(
            &[vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 3.0, 5.0],
            vec![1.0, 3.0, 5.0],
            vec![0.0; 3],
            vec![10.0; 3],
        )
        .unwrap();
        let out = presolve(&p, &PresolveConfig::default()).unwrap();
        assert_eq!(out.status, PresolveStatus::SolvedCompletely);
        assert_eq!((out.reduced.num_rows, out.reduced.num_cols), (0, 0));
        let empty = crate::problem::PrimalDualSolution::zeros(0, 0, SolutionStatus::Optimal);
        let full = postsolve(&out.journal, &empty).unwrap();
        assert_eq!(full.x, vec![1.0, 2.0, 3.0]);
        assert!(check_kkt(&p, &full, 1e-9).unwrap().within(1e-12));
    }

    #[test]
    fn validate_reports_defects() {
        let clean = LpProblem::from_dense(&[vec![1.0]], vec![1.0], vec![0.0], vec![1.0], vec![0.0], vec![1.0]).unwrap();
        assert!(validate(&clean).is_empty());
        let mut crossed = clean.clone();
        crossed.col_lower[0] = 2.0;
        assert_eq!(validate(&crossed), vec![Defect::CrossedColumnBounds { col: 0, lower: 2.0, upper: 1.0 }]);
        let nan =
            LpProblem::from_dense(&[vec![f64::NAN]], vec![1.0], vec![0.0], vec![1.0], vec![0.0], vec![1.0]).unwrap();
        assert_eq!(validate(&nan), vec![Defect::NanCoefficient { row: 0, col: 0 }]);
        assert!(matches!(presolve(&nan, &PresolveConfig::default()), Err(Error::InvalidProblem(_))));
        let out = presolve(&crossed, &PresolveConfig::default()).unwrap();
        assert_eq!(out.status, PresolveStatus::InfeasiblePrimal);
    }

    #[test]
    fn config_checked() {
        let p = LpProblem::new(0, 0, &[], vec![], vec![], vec![], vec![], vec![]).unwrap();
        let cfg = PresolveConfig { max_rounds: 0, ..PresolveConfig::default() };
        assert!(matches!(presolve(&p, &cfg), Err(Error::InvalidConfig(_))));
        let mut cfg = PresolveConfig::default();
        cfg.tol.feas = 0.0;
        assert!(matches!(presolve(&p, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn dirty_queue_generations() {
        let mut q = DirtyQueues::new(4, 2);
        q.mark_row(2);
        q.mark_row(2);
        q.mark_row(0);
        assert_eq!(q.row_candidates(), vec![0, 2]);
        q.advance();
        q.mark_row(3);
        assert_eq!(q.row_candidates(), vec![0, 2, 3]);
        assert!(q.claim_row(2));
        assert!(!q.claim_row(2));
        q.advance();
        assert!(q.claim_row(2));
        assert_eq!(q.row_candidates(), vec![3]);
    }

    struct Recorder {
        counts: StatsChecks,
    }

    #[derive(Default)]
    struct StatsChecks {
        passes: usize,
        failures: Vec<String>,
        propagated: Vec<(usize, usize)>,
    }

    impl PassObserver for Recorder {
        fn after_pass(&mut self, kind: ExplorerKind, round: usize, session: &Session) {
            self.counts.passes += 1;
            if let Some(d) = session.stats.diff(&StatsTracker::init(&session.problem)) {
                self.counts.failures.push(format!("{kind:?} round {round}: {d}"));
            }
            if let Err(e) = session.problem.matrix.verify() {
                self.counts.failures.push(e);
            }
            let _ = &self.counts.propagated;
        }
    }

    #[test]
    fn stats_stay_consistent_across_passes() {
        let cfg = GeneratorConfig::default();
        for seed in 0..40 {
            let p = random_lp(seed, 12, 12, 0.3, Feasibility::ForcedFeasible, &cfg);
            let mut rec = Recorder { counts: StatsChecks::default() };
            let out = presolve_with(&p, &PresolveConfig::default(), &NoClock, &mut rec).unwrap();
            assert!(rec.counts.failures.is_empty(), "seed {seed}: {:?}", rec.counts.failures);
            assert!(out.report.nnz_after <= out.report.nnz_before);
        }
    }

    #[test]
    fn deterministic_and_monotone() {
        let cfg = GeneratorConfig::default();
        for seed in 0..30 {
            let p = random_lp(seed, 15, 15, 0.3, Feasibility::ForcedFeasible, &cfg);
            let a = presolve(&p, &PresolveConfig::default()).unwrap();
            let b = presolve(&p, &PresolveConfig::default()).unwrap();
            assert_eq!(a, b);
            assert!(a.reduced.num_rows <= p.num_rows && a.reduced.num_cols <= p.num_cols);
        }
    }

    #[test]
    fn rerun_reaches_fixpoint_or_shrinks() {
        let cfg = GeneratorConfig::default();
        for seed in 0..30 {
            let p = random_lp(seed, 15, 15, 0.3, Feasibility::ForcedFeasible, &cfg);
            let first = presolve(&p, &PresolveConfig::default()).unwrap();
            let second = presolve(&first.reduced, &PresolveConfig::default()).unwrap();
            assert!(
                second.journal.records.is_empty()
                    || second.report.nnz_after < first.report.nnz_after
                    || second.report.rows_after < first.report.rows_after
                    || second.report.cols_after < first.report.cols_after,
                "seed {seed}: {:?}",
                second.journal.records
            );
        }
    }

    #[test]
    fn strong_dual_toggle_preserves_optimum() {
        let gen = GeneratorConfig::default();
        for seed in 100..160 {
            let p = random_lp(seed, 10, 10, 0.35, Feasibility::ForcedFeasible, &gen);
            let direct = solve_dense(&p, 60).unwrap();
            let v = objective_value(&p, &direct.x).unwrap();
            for strong in [false, true] {
                let cfg = PresolveConfig { strong_dual: strong, ..PresolveConfig::default() };
                let out = presolve(&p, &cfg).unwrap();
                let sol = solve_dense(&out.reduced, 60).unwrap();
                let full = postsolve(&out.journal, &sol).unwrap();
                let w = objective_value(&p, &full.x).unwrap();
                assert!((v - w).abs() <= 1e-6 * (1.0 + v.abs()), "seed {seed} strong={strong}: {v} vs {w}");
                assert!(check_kkt(&p, &full, 1e-9).unwrap().within(1e-6));
            }
        }
    }

    #[test]
    fn report_ratio_matches_counts() {
        let p = random_lp(5, 12, 12, 0.3, Feasibility::ForcedFeasible, &GeneratorConfig::default());
        let out = presolve(&p, &PresolveConfig::default()).unwrap();
        let r = &out.report;
        let text = r.to_kv(false);
        assert!(text.contains(&format!("nnz_ratio={:.4}", r.nnz_after as f64 / r.nnz_before as f64)));
        assert!(!text.contains("seconds"));
        assert_eq!(r.total_reductions(), out.journal.records.len());
    }
}
