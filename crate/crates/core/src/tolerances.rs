//! Numerical thresholds shared by the presolver.

/// Any bound or side with magnitude at or above this value is infinite.
pub const INF_THRESHOLD: f64 = 1e20;

/// Stored coefficients with magnitude at or below this are dropped.
pub const ZERO_DROP_TOL: f64 = 1e-12;

/// Absolute tolerance on bound and side comparisons.
pub const FEAS_TOL: f64 = 1e-9;

/// Relative factor for the minimum accepted bound improvement.
pub const BOUND_IMPROVE_TOL: f64 = 1e-9;

/// Smallest pivot accepted when substituting a variable out of a row.
pub const PIVOT_TOL: f64 = 1e-7;

/// Relative per-coefficient tolerance for parallel rows and columns.
pub const PARALLEL_TOL: f64 = 1e-10;

/// Relative tolerance between incremental and recomputed activities.
pub const ACTIVITY_REFRESH_TOL: f64 = 1e-9;

/// Default absolute tolerance of the KKT checker.
pub const KKT_TOL: f64 = 1e-6;

/// Finite bounds derived by propagation beyond this magnitude are discarded;
/// activity sums carrying them lose all relative precision.
pub const HUGE_BOUND: f64 = 1e9;

/// Maps magnitudes at or above [`INF_THRESHOLD`] to signed infinity.
#[inline]
pub fn normalize_infinity(v: f64) -> f64 {
    if v >= INF_THRESHOLD {
        f64::INFINITY
    } else if v <= -INF_THRESHOLD {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Tolerance set carried by a presolve session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub feas: f64,
    pub pivot: f64,
    pub parallel: f64,
    pub bound_improve: f64,
    pub zero_drop: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feas: FEAS_TOL,
            pivot: PIVOT_TOL,
            parallel: PARALLEL_TOL,
            bound_improve: BOUND_IMPROVE_TOL,
            zero_drop: ZERO_DROP_TOL,
        }
    }
}

impl Tolerances {
    pub fn all_positive(&self) -> bool {
        [self.feas, self.pivot, self.parallel, self.bound_improve, self.zero_drop]
            .iter()
            .all(|&t| t > 0.0 && t.is_finite())
    }

    /// Minimum change for a bound tightening from `old` to count.
    #[inline]
    pub fn improvement_threshold(&self, old: f64) -> f64 {
        if old.is_finite() {
            self.bound_improve * (1.0 + old.abs())
        } else {
            0.0
        }
    }
}
