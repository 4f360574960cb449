//! Reductions that look beyond a single row or column: parallel rows and
//! columns, and primal and dual bound propagation.

use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use rustc_hash::FxHasher;

use super::fast::DUAL_SIGN_TOL;
use super::{entries, reduced_cost_range, row_dual_range, Ctx, Iv};
use crate::reduction::{FixCause, RemoveCause, Session, SideOrigin, Step, Verdict};
use crate::sparse::Span;
use crate::tolerances::HUGE_BOUND;

const INF: f64 = f64::INFINITY;

/// Rows or columns longer than this are not used to derive dual bounds.
const DUAL_DEGREE_CAP: usize = 64;

/// A finite bound is only moved if it gains at least this fraction of the
/// current domain width; cyclic propagation otherwise creeps by ever smaller
/// steps and never settles within the round budget.
pub(crate) const MIN_DOMAIN_PROGRESS: f64 = 1e-3;

/// Mantissa bits cleared when hashing normalized coefficients.
const HASH_ROUND_BITS: u32 = 20;

fn round_bits(v: f64) -> u64 {
    let mask = (1u64 << HASH_ROUND_BITS) - 1;
    let b = v.to_bits();
    (b.wrapping_add(1 << (HASH_ROUND_BITS - 1))) & !mask
}

/// Sorted copy of a span, plus its two hash levels: pattern, then coefficients
/// normalized by the entry with the smallest index.
struct Signature {
    pattern: u64,
    values: u64,
    entries: Vec<(usize, f64)>,
}

fn signature(span: Span<'_>) -> Signature {
    let mut e = span.to_vec();
    e.sort_unstable_by_key(|x| x.0);
    let mut h = FxHasher::default();
    e.len().hash(&mut h);
    for x in &e {
        x.0.hash(&mut h);
    }
    let pattern = h.finish();
    let mut h = FxHasher::default();
    let first = e[0].1;
    for x in &e {
        round_bits(x.1 / first).hash(&mut h);
    }
    Signature { pattern, values: h.finish(), entries: e }
}

/// Returns `s` with `b = s · a` entrywise when the sorted vectors are parallel.
fn parallel_scale(a: &[(usize, f64)], b: &[(usize, f64)], tol: f64) -> Option<f64> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.0 != y.0) {
        return None;
    }
    let s = b[0].1 / a[0].1;
    a.iter().zip(b).all(|(x, y)| (y.1 - s * x.1).abs() <= tol * y.1.abs()).then_some(s)
}

type Line = Vec<(usize, f64)>;

/// Groups items with equal signatures, in index order within each group.
fn buckets(mut keyed: Vec<(u64, u64, usize, Line)>) -> Vec<Vec<(usize, Line)>> {
    keyed.sort_unstable_by_key(|a| (a.0, a.1, a.2));
    let mut out: Vec<Vec<(usize, Line)>> = Vec::new();
    let mut last = None;
    for (p, v, idx, e) in keyed {
        if last != Some((p, v)) {
            out.push(Vec::new());
            last = Some((p, v));
        }
        out.last_mut().unwrap().push((idx, e));
    }
    out.retain(|b| b.len() > 1);
    out
}

pub fn parallel_rows(s: &mut Session, _ctx: &Ctx) -> Step {
    if s.dirty.row_candidates().is_empty() {
        return Ok(());
    }
    let keyed: Vec<_> = s
        .problem
        .matrix
        .alive_rows()
        .filter(|&i| s.problem.matrix.row_len(i) >= 2)
        .map(|i| {
            let sig = signature(s.problem.matrix.row(i));
            (sig.pattern, sig.values, i, sig.entries)
        })
        .collect();
    for bucket in buckets(keyed) {
        let mut kept: Vec<usize> = Vec::new();
        for (j, ej) in &bucket {
            let mut merged = false;
            for &(i, ref ei) in bucket.iter().filter(|b| kept.contains(&b.0)) {
                if !s.problem.matrix.is_row_alive(i) {
                    continue;
                }
                if let Some(scale) = parallel_scale(ei, ej, s.tol.parallel) {
                    merge_rows(s, i, *j, scale)?;
                    merged = true;
                    break;
                }
            }
            if !merged {
                kept.push(*j);
            }
        }
    }
    Ok(())
}

/// Folds row `j = scale · row i` into row `i` and removes `j`.
fn merge_rows(s: &mut Session, i: usize, j: usize, scale: f64) -> Step {
    let (li, ui) = s.sides(i);
    let (lj, uj) = s.sides(j);
    let (rl, ru) = if scale > 0.0 { (lj / scale, uj / scale) } else { (uj / scale, lj / scale) };
    let lower_from_removed = rl > li;
    let upper_from_removed = ru < ui;
    let (mut nl, mut nu) = (li.max(rl), ui.min(ru));
    if nl > nu + s.tol.feas {
        return Err(Verdict::InfeasiblePrimal);
    }
    if nl > nu {
        let mid = 0.5 * (nl + nu);
        nl = mid;
        nu = mid;
    }
    s.change_row_sides(i, nl, nu, SideOrigin::ParallelMerge);
    s.remove_constraint(j, RemoveCause::ParallelTo { row: i, scale, lower_from_removed, upper_from_removed });
    Ok(())
}

pub fn parallel_columns(s: &mut Session, _ctx: &Ctx) -> Step {
    if s.dirty.col_candidates().is_empty() {
        return Ok(());
    }
    let keyed: Vec<_> = s
        .problem
        .matrix
        .alive_cols()
        .filter(|&k| s.problem.matrix.col_len(k) >= 1)
        .map(|k| {
            let sig = signature(s.problem.matrix.col(k));
            (sig.pattern, sig.values, k, sig.entries)
        })
        .collect();
    let tol = s.tol.parallel;
    for bucket in buckets(keyed) {
        let p = bucket[0].0;
        for (q, eq) in &bucket[1..] {
            if !s.problem.matrix.is_col_alive(p) {
                break;
            }
            let Some(scale) = parallel_scale(&bucket[0].1, eq, tol) else { continue };
            let (cp, cq) = (s.problem.objective[p], s.problem.objective[*q]);
            if (cq - scale * cp).abs() > tol * (cq.abs() + (scale * cp).abs()) {
                continue;
            }
            s.aggregate_parallel_columns(p, *q, scale);
        }
    }
    Ok(())
}

pub fn primal_propagation(s: &mut Session, _ctx: &Ctx) -> Step {
    for i in s.dirty.row_candidates() {
        if !s.problem.matrix.is_row_alive(i) || !s.dirty.claim_row(i) {
            continue;
        }
        propagate_row(s, i)?;
    }
    Ok(())
}

fn propagate_row(s: &mut Session, i: usize) -> Step {
    let (lo, up) = s.sides(i);
    if lo == -INF && up == INF {
        return Ok(());
    }
    for (k, a) in entries(s, i) {
        let (l, u) = s.bounds(k);
        let act = s.stats.activity[i];
        let (min_rest, max_rest) = (act.min_without(a, l, u), act.max_without(a, l, u));
        // a x_k ≤ up − min_rest and a x_k ≥ lo − max_rest
        let hi = if up.is_finite() && min_rest.is_finite() { up - min_rest } else { INF };
        let lo_v = if lo.is_finite() && max_rest.is_finite() { lo - max_rest } else { -INF };
        let implied = Iv { lo: lo_v, hi }.scale(1.0 / a);
        let width = u - l;
        let accept = |new: f64, old: f64, tighter: bool| {
            let gain = (new - old).abs();
            tighter
                && new.is_finite()
                && new.abs() <= HUGE_BOUND
                && gain > s.tol.improvement_threshold(old)
                && gain >= MIN_DOMAIN_PROGRESS * if width.is_finite() { width } else { 1.0 + old.abs() }
        };
        let nl = if accept(implied.lo, l, implied.lo > l) { implied.lo } else { l };
        let nu = if accept(implied.hi, u, implied.hi < u) { implied.hi } else { u };
        if (nl, nu) != (l, u) {
            s.change_bounds(k, nl, nu, Some(i))?;
        }
    }
    Ok(())
}

/// Interval that every dual-feasible `y_i` lies in, derived from the dual
/// constraints of the columns in row `i` other than `skip`.
fn derived_dual_range(s: &Session, i: usize, skip: Option<usize>) -> Iv {
    let a = &s.problem.matrix;
    if a.row_len(i) > DUAL_DEGREE_CAP {
        return Iv::FREE;
    }
    let mut d = Iv::FREE;
    for (j, aij) in a.row(i).iter() {
        if Some(j) == skip || a.col_len(j) > DUAL_DEGREE_CAP {
            continue;
        }
        // a_ij y_i = c_j − z_j − Σ_{r≠i} a_rj y_r
        let (l, u) = s.bounds(j);
        let mut rhs = Iv::point(s.problem.objective[j]).sub(reduced_cost_range(l, u));
        for (r, arj) in a.col(j).iter() {
            if r == i || rhs.is_free() {
                continue;
            }
            let (lo, up) = s.sides(r);
            rhs = rhs.sub(row_dual_range(lo, up).scale(arj));
        }
        if !rhs.is_free() {
            d = d.meet(rhs.scale(1.0 / aij));
        }
    }
    d
}

pub fn dual_propagation(s: &mut Session, _ctx: &Ctx) -> Step {
    for i in s.dirty.row_candidates() {
        if !s.problem.matrix.is_row_alive(i) || !s.dirty.claim_row(i) {
            continue;
        }
        let (lo, up) = s.sides(i);
        if lo == up {
            continue;
        }
        let d = derived_dual_range(s, i, None).meet(row_dual_range(lo, up));
        if d.is_empty(DUAL_SIGN_TOL) {
            return Err(Verdict::UnboundedOrInfeasibleDual);
        }
        if d.lo > DUAL_SIGN_TOL {
            s.change_row_sides(i, lo, lo, SideOrigin::DualTightening);
        } else if d.hi < -DUAL_SIGN_TOL {
            s.change_row_sides(i, up, up, SideOrigin::DualTightening);
        }
    }
    for k in s.dirty.col_candidates() {
        if !s.problem.matrix.is_col_alive(k) || !s.dirty.claim_col(k) || s.problem.matrix.col_len(k) > DUAL_DEGREE_CAP {
            continue;
        }
        // z_k = c_k − Σ a_ik y_i
        let mut z = Iv::point(s.problem.objective[k]);
        for (i, aik) in entries_of_col(s, k) {
            let (lo, up) = s.sides(i);
            let y = row_dual_range(lo, up).meet(derived_dual_range(s, i, Some(k)));
            if y.is_empty(DUAL_SIGN_TOL) {
                return Err(Verdict::UnboundedOrInfeasibleDual);
            }
            z = z.sub(y.scale(aik));
            if z.is_free() {
                break;
            }
        }
        let (l, u) = s.bounds(k);
        if z.lo > DUAL_SIGN_TOL {
            if l == -INF {
                return Err(Verdict::UnboundedOrInfeasibleDual);
            }
            s.fix_variable(k, l, FixCause::AtLower)?;
        } else if z.hi < -DUAL_SIGN_TOL {
            if u == INF {
                return Err(Verdict::UnboundedOrInfeasibleDual);
            }
            s.fix_variable(k, u, FixCause::AtUpper)?;
        }
    }
    Ok(())
}

fn entries_of_col(s: &Session, k: usize) -> Vec<(usize, f64)> {
    s.problem.matrix.col(k).to_vec()
}
