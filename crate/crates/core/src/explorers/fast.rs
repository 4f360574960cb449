//! Cheap local reductions: singleton and empty rows, redundancy, doubleton
//! equations, column singletons and locks.

use super::{entries, row_dual_range, sweep_cols, sweep_rows, Ctx, Iv};
use crate::reduction::{FixCause, RemoveCause, Session, SideOrigin, Step, Verdict};
use crate::tolerances::HUGE_BOUND;

const INF: f64 = f64::INFINITY;

/// Tolerance on the sign of a dual quantity before it is treated as strict.
pub(crate) const DUAL_SIGN_TOL: f64 = 1e-7;

pub fn singleton_rows(s: &mut Session, _ctx: &Ctx) -> Step {
    sweep_rows(s, singleton_row)
}

fn singleton_row(s: &mut Session, i: usize) -> Step {
    let feas = s.tol.feas;
    let (lo, up) = s.sides(i);
    match s.problem.matrix.row_len(i) {
        0 => {
            if lo > feas || up < -feas {
                return Err(Verdict::InfeasiblePrimal);
            }
            s.remove_constraint(i, RemoveCause::Empty);
            Ok(())
        }
        1 => {
            let (k, a) = s.problem.matrix.row(i).iter().next().unwrap();
            if lo == up {
                s.fix_variable(k, lo / a, FixCause::SingletonRow { row: i, coeff: a })?;
                s.remove_constraint(i, RemoveCause::Empty);
                return Ok(());
            }
            let (l, u) = s.bounds(k);
            let (il, iu) = if a > 0.0 { (lo / a, up / a) } else { (up / a, lo / a) };
            let nl = if il > l + s.tol.improvement_threshold(l) { il } else { l };
            let nu = if iu < u - s.tol.improvement_threshold(u) { iu } else { u };
            if nl > nu + feas {
                return Err(Verdict::InfeasiblePrimal);
            }
            if (nl, nu) != (l, u) {
                s.change_bounds(k, nl, nu, Some(i))?;
                s.remove_constraint(i, RemoveCause::ForcedSingleton);
            } else {
                s.remove_constraint(i, RemoveCause::Redundant);
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

pub fn redundant_constraints(s: &mut Session, _ctx: &Ctx) -> Step {
    sweep_rows(s, redundant_row)
}

fn redundant_row(s: &mut Session, i: usize) -> Step {
    let feas = s.tol.feas;
    let (lo, up) = s.sides(i);
    let act = s.stats.activity[i];
    let (min, max) = (act.min(), act.max());
    if min > up + feas || max < lo - feas {
        return Err(Verdict::InfeasiblePrimal);
    }
    let lo_implied = lo == -INF || min >= lo - feas;
    let up_implied = up == INF || max <= up + feas;
    if lo_implied && up_implied {
        s.remove_constraint(i, RemoveCause::Redundant);
    } else if lo < up {
        if lo_implied && lo != -INF {
            s.change_row_sides(i, -INF, up, SideOrigin::RedundantSide);
        } else if up_implied && up != INF {
            s.change_row_sides(i, lo, INF, SideOrigin::RedundantSide);
        }
    }
    Ok(())
}

pub fn doubleton_rows(s: &mut Session, _ctx: &Ctx) -> Step {
    sweep_rows(s, doubleton_row)
}

fn doubleton_row(s: &mut Session, i: usize) -> Step {
    let (b, b_up) = s.sides(i);
    if b != b_up || !b.is_finite() || s.problem.matrix.row_len(i) != 2 {
        return Ok(());
    }
    let e = entries(s, i);
    let (mut p, mut q) = (e[0], e[1]);
    // Eliminate the sparser column; among equals, the one with the larger pivot.
    let nnz = |k: usize| s.stats.col_nnz[k];
    let swap = match nnz(p.0).cmp(&nnz(q.0)) {
        core::cmp::Ordering::Less => true,
        core::cmp::Ordering::Greater => false,
        core::cmp::Ordering::Equal => p.1.abs() > q.1.abs() || (p.1.abs() == q.1.abs() && p.0 < q.0),
    };
    if swap {
        core::mem::swap(&mut p, &mut q);
    }
    let ((kp, ap), (kq, aq)) = (p, q);
    if aq.abs() < s.tol.pivot {
        return Ok(());
    }
    // x_p = (b − a_q x_q) / a_p over the bounds of x_q.
    let (lq, uq) = s.bounds(kq);
    let range = Iv::point(b).sub(Iv { lo: lq, hi: uq }.scale(aq)).scale(1.0 / ap);
    let (lp, up) = s.bounds(kp);
    let nl = if range.lo > lp + s.tol.improvement_threshold(lp) { range.lo } else { lp };
    let nu = if range.hi < up - s.tol.improvement_threshold(up) { range.hi } else { up };
    if (nl != lp && nl.abs() > HUGE_BOUND) || (nu != up && nu.abs() > HUGE_BOUND) {
        return Ok(());
    }
    if nl > nu + s.tol.feas {
        return Err(Verdict::InfeasiblePrimal);
    }
    s.change_bounds(kp, nl, nu, Some(i))?;
    s.change_bounds(kq, -INF, INF, None)?;
    let others: alloc::vec::Vec<(usize, f64)> = s.problem.matrix.col(kq).iter().filter(|e| e.0 != i).collect();
    for (r, arq) in others {
        s.add_scaled_equality(i, r, -arq / aq, Some(kq));
    }
    s.substitute_singleton(kq, i);
    Ok(())
}

pub fn column_singleton_equality(s: &mut Session, _ctx: &Ctx) -> Step {
    sweep_cols(s, |s, k| {
        if s.problem.matrix.col_len(k) != 1 {
            return Ok(());
        }
        let (i, a) = s.problem.matrix.col(k).iter().next().unwrap();
        let (b, b_up) = s.sides(i);
        if b != b_up || !b.is_finite() || s.problem.matrix.row_len(i) < 2 || a.abs() < s.tol.pivot {
            return Ok(());
        }
        let (l, u) = s.bounds(k);
        let act = s.stats.activity[i];
        let rest = Iv { lo: act.min_without(a, l, u), hi: act.max_without(a, l, u) };
        let implied = Iv::point(b).sub(rest).scale(1.0 / a);
        let feas = s.tol.feas;
        if implied.lo >= l - feas && implied.hi <= u + feas {
            s.substitute_singleton(k, i);
        }
        Ok(())
    })
}

pub fn column_singleton_inequality(s: &mut Session, _ctx: &Ctx) -> Step {
    sweep_cols(s, |s, k| {
        if s.problem.matrix.col_len(k) != 1 {
            return Ok(());
        }
        let (i, a) = s.problem.matrix.col(k).iter().next().unwrap();
        let (lo, up) = s.sides(i);
        if lo == up {
            return Ok(());
        }
        let (l, u) = s.bounds(k);
        let c = s.problem.objective[k];
        // z_k = c_k − a y_i with y_i restricted by the row's sidedness.
        let z = Iv::point(c).sub(row_dual_range(lo, up).scale(a));
        if z.lo > DUAL_SIGN_TOL {
            return fix_or_unbounded(s, k, l, FixCause::AtLower);
        }
        if z.hi < -DUAL_SIGN_TOL {
            return fix_or_unbounded(s, k, u, FixCause::AtUpper);
        }
        if l == -INF && u == INF && c != 0.0 {
            // z_k must vanish, which pins y_i = c / a.
            let y = c / a;
            let range = row_dual_range(lo, up);
            if y < range.lo || y > range.hi {
                return Err(Verdict::UnboundedOrInfeasibleDual);
            }
            if y > 0.0 {
                s.change_row_sides(i, lo, lo, SideOrigin::DualTightening);
            } else {
                s.change_row_sides(i, up, up, SideOrigin::DualTightening);
            }
        }
        Ok(())
    })
}

fn fix_or_unbounded(s: &mut Session, k: usize, value: f64, cause: FixCause) -> Step {
    if value.is_finite() {
        s.fix_variable(k, value, cause)
    } else {
        Err(Verdict::UnboundedOrInfeasibleDual)
    }
}

pub fn variable_locks(s: &mut Session, ctx: &Ctx) -> Step {
    sweep_cols(s, |s, k| {
        let (l, u) = s.bounds(k);
        if l == u {
            return s.fix_variable(k, l, FixCause::AtLower);
        }
        let c = s.problem.objective[k];
        let no_up = s.stats.uplocks[k] == 0;
        let no_down = s.stats.downlocks[k] == 0;
        if no_up && c < 0.0 {
            return fix_or_unbounded(s, k, u, FixCause::AtUpper);
        }
        if no_down && c > 0.0 {
            return fix_or_unbounded(s, k, l, FixCause::AtLower);
        }
        if c != 0.0 || !ctx.strong_dual {
            return Ok(());
        }
        if no_up && u.is_finite() {
            s.fix_variable(k, u, FixCause::AtUpper)
        } else if no_down && l.is_finite() {
            s.fix_variable(k, l, FixCause::AtLower)
        } else if no_up && no_down {
            s.fix_variable(k, 0.0, FixCause::Interior)
        } else {
            Ok(())
        }
    })
}
