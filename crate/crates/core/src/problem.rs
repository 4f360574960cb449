use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::sparse::{SparseDualMatrix, DEFAULT_SLACK_FRACTION};
use crate::tolerances::normalize_infinity;

/// `min cᵀx + offset  s.t.  row_lower ≤ Ax ≤ row_upper,  col_lower ≤ x ≤ col_upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub num_rows: usize,
    pub num_cols: usize,
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub matrix: SparseDualMatrix,
    pub row_lower: Vec<f64>,
    pub row_upper: Vec<f64>,
    pub col_lower: Vec<f64>,
    pub col_upper: Vec<f64>,
    pub row_names: Option<Vec<String>>,
    pub col_names: Option<Vec<String>>,
}

fn check_len(what: &'static str, expected: usize, v: &[f64]) -> Result<(), Error> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch { what, expected, found: v.len() });
    }
    Ok(())
}

impl LpProblem {
    /// Builds an instance from triplets. Magnitudes of at least `1e20` in
    /// sides and bounds become infinities.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        num_rows: usize,
        num_cols: usize,
        triplets: &[(usize, usize, f64)],
        objective: Vec<f64>,
        row_lower: Vec<f64>,
        row_upper: Vec<f64>,
        col_lower: Vec<f64>,
        col_upper: Vec<f64>,
    ) -> Result<Self, Error> {
        check_len("objective", num_cols, &objective)?;
        check_len("row_lower", num_rows, &row_lower)?;
        check_len("row_upper", num_rows, &row_upper)?;
        check_len("col_lower", num_cols, &col_lower)?;
        check_len("col_upper", num_cols, &col_upper)?;
        let matrix = SparseDualMatrix::build(triplets, num_rows, num_cols, DEFAULT_SLACK_FRACTION)?;
        let norm = |v: Vec<f64>| v.into_iter().map(normalize_infinity).collect::<Vec<_>>();
        Ok(Self {
            num_rows,
            num_cols,
            objective,
            objective_offset: 0.0,
            matrix,
            row_lower: norm(row_lower),
            row_upper: norm(row_upper),
            col_lower: norm(col_lower),
            col_upper: norm(col_upper),
            row_names: None,
            col_names: None,
        })
    }

    /// Convenience constructor from a dense row-major matrix.
    #[allow(clippy::too_many_arguments)]
    pub fn from_dense(
        a: &[Vec<f64>],
        objective: Vec<f64>,
        row_lower: Vec<f64>,
        row_upper: Vec<f64>,
        col_lower: Vec<f64>,
        col_upper: Vec<f64>,
    ) -> Result<Self, Error> {
        let n = objective.len();
        let mut triplets = Vec::new();
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { what: "dense row", expected: n, found: row.len() });
            }
            for (k, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, k, v));
                }
            }
        }
        Self::new(a.len(), n, &triplets, objective, row_lower, row_upper, col_lower, col_upper)
    }

    pub fn nnz(&self) -> usize {
        self.matrix.live_nnz()
    }

    pub fn is_equality(&self, i: usize) -> bool {
        self.row_lower[i] == self.row_upper[i]
    }

    /// `(Ax)_i` for every row; dead rows read as zero.
    pub fn row_activities(&self, x: &[f64]) -> Vec<f64> {
        let mut ax = vec![0.0; self.num_rows];
        for i in self.matrix.alive_rows() {
            ax[i] = self.matrix.row(i).iter().map(|(k, a)| a * x[k]).sum();
        }
        ax
    }

    /// Largest magnitude among finite data entries.
    pub fn max_abs_datum(&self) -> f64 {
        let finite_max = |v: &[f64]| v.iter().filter(|x| x.is_finite()).fold(0.0f64, |m, x| m.max(x.abs()));
        let entries = self.matrix.triplets().iter().fold(0.0f64, |m, t| m.max(t.2.abs()));
        [
            entries,
            finite_max(&self.objective),
            finite_max(&self.row_lower),
            finite_max(&self.row_upper),
            finite_max(&self.col_lower),
            finite_max(&self.col_upper),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolutionStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasibleOrUnbounded,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PresolveStatus {
    Reduced,
    Unchanged,
    InfeasiblePrimal,
    UnboundedOrInfeasibleDual,
    SolvedCompletely,
}

impl PresolveStatus {
    /// The presolve run finished without a verdict.
    pub fn is_success(&self) -> bool {
        matches!(self, PresolveStatus::Reduced | PresolveStatus::Unchanged | PresolveStatus::SolvedCompletely)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PresolveStatus::Reduced => "reduced",
            PresolveStatus::Unchanged => "unchanged",
            PresolveStatus::InfeasiblePrimal => "infeasible",
            PresolveStatus::UnboundedOrInfeasibleDual => "unbounded_or_dual_infeasible",
            PresolveStatus::SolvedCompletely => "solved",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub status: SolutionStatus,
}

impl PrimalDualSolution {
    pub fn zeros(m: usize, n: usize, status: SolutionStatus) -> Self {
        Self { x: vec![0.0; n], y: vec![0.0; m], z: vec![0.0; n], status }
    }
}

/// Largest violation of each block of the optimality system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktReport {
    /// Row side violation of `Ax`.
    pub primal_residual: f64,
    /// `‖c − Aᵀy − z‖∞`.
    pub dual_residual: f64,
    /// Products of multipliers with their slacks, plus the magnitude of any
    /// multiplier whose sign is not allowed by the bound it belongs to.
    pub complementarity_residual: f64,
    /// Variable bound violation of `x`.
    pub bound_violation: f64,
    /// `1 + max |datum|`, for relative reporting.
    pub scale: f64,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        self.primal_residual.max(self.dual_residual).max(self.complementarity_residual).max(self.bound_violation)
    }

    pub fn max_relative(&self) -> f64 {
        self.max() / self.scale
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

fn side_violation(v: f64, lo: f64, up: f64) -> f64 {
    if v < lo {
        lo - v
    } else if v > up {
        v - up
    } else {
        0.0
    }
}

/// Complementarity term of a multiplier `m` attached to a value `v` in `[lo, up]`.
/// Positive multipliers belong to the lower side, negative ones to the upper side.
fn complementarity(m: f64, v: f64, lo: f64, up: f64) -> f64 {
    if m > 0.0 {
        if lo.is_finite() {
            (m * (v - lo)).abs()
        } else {
            m
        }
    } else if m < 0.0 {
        if up.is_finite() {
            (m * (up - v)).abs()
        } else {
            -m
        }
    } else {
        0.0
    }
}

/// Evaluates the optimality conditions for `sol`. Only alive rows and columns
/// of the problem's matrix are considered. `tol` is used only to decide which
/// multipliers count as nonzero.
pub fn check_kkt(problem: &LpProblem, sol: &PrimalDualSolution, tol: f64) -> Result<KktReport, Error> {
    let (m, n) = (problem.num_rows, problem.num_cols);
    check_len("x", n, &sol.x)?;
    check_len("z", n, &sol.z)?;
    check_len("y", m, &sol.y)?;
    let zero_cut = tol.max(0.0) * 1e-3;
    let mut report = KktReport { scale: 1.0 + problem.max_abs_datum(), ..Default::default() };
    let ax = problem.row_activities(&sol.x);
    let a = &problem.matrix;
    for i in a.alive_rows() {
        let (lo, up) = (problem.row_lower[i], problem.row_upper[i]);
        report.primal_residual = report.primal_residual.max(side_violation(ax[i], lo, up));
        let y = if sol.y[i].abs() <= zero_cut { 0.0 } else { sol.y[i] };
        report.complementarity_residual = report.complementarity_residual.max(complementarity(y, ax[i], lo, up));
    }
    for k in a.alive_cols() {
        let (lo, up) = (problem.col_lower[k], problem.col_upper[k]);
        let x = sol.x[k];
        report.bound_violation = report.bound_violation.max(side_violation(x, lo, up));
        let aty: f64 = a.col(k).iter().map(|(i, v)| v * sol.y[i]).sum();
        let r = problem.objective[k] - aty - sol.z[k];
        report.dual_residual = report.dual_residual.max(r.abs());
        let z = if sol.z[k].abs() <= zero_cut { 0.0 } else { sol.z[k] };
        report.complementarity_residual = report.complementarity_residual.max(complementarity(z, x, lo, up));
    }
    for v in [&sol.x, &sol.y, &sol.z] {
        if v.iter().any(|t| t.is_nan()) {
            report.dual_residual = f64::INFINITY;
        }
    }
    Ok(report)
}

/// `cᵀx + offset`.
pub fn objective_value(problem: &LpProblem, x: &[f64]) -> Result<f64, Error> {
    check_len("x", problem.num_cols, x)?;
    let lin: f64 = problem.matrix.alive_cols().map(|k| problem.objective[k] * x[k]).sum();
    Ok(lin + problem.objective_offset)
}
