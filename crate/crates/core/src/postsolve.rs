//! Reverse replay of the journal.
//!
//! Each record maps an optimal primal-dual point of the problem after the
//! reduction to one of the problem before it:
//!
//! * fix `x_k = v`: `z_k = c_k − Σ a_ik y_i` over the saved column. When the
//!   fix came from a singleton equality row `a x_k = b`, that row's dual absorbs
//!   the reduced cost: `y_i += z_k / a`, `z_k = 0`.
//! * remove row `i`: `y_i = 0`, except for a parallel row whose side was the
//!   binding one on the kept row; then `y_i = y_kept / s` and `y_kept = 0`.
//! * row `dst += λ · src`: `y_src += λ · y_dst`.
//! * substitute `x_k` out of row `i`: `x_k = (b − Σ a_ij x_j) / a_ik`,
//!   `y_i = c_k / a_ik`, `z_k = 0`.
//! * bound tightening of `x_k` implied by row `i`: if `z_k` is nonzero on a
//!   tightened side, `Δ = z_k / a_ik` moves into `y_i` and `z_j −= a_ij Δ` for
//!   every entry of the row snapshot, which zeroes `z_k`.
//! * aggregation `w = x_p + s x_q`: `z_p = z_w`, `z_q = s z_w`, and `x_q` is taken
//!   at the end of its feasible range that the sign of `z_q` calls for.

use alloc::vec;

use crate::error::Error;
use crate::problem::PrimalDualSolution;
use crate::reduction::{PostsolveJournal, ReductionRecord, RemoveCause};

/// Maps a solution of the reduced problem to one of the original problem.
pub fn postsolve(journal: &PostsolveJournal, reduced: &PrimalDualSolution) -> Result<PrimalDualSolution, Error> {
    let (m, n) = (journal.row_map.len(), journal.col_map.len());
    for (what, expected, found) in [("x", n, reduced.x.len()), ("z", n, reduced.z.len()), ("y", m, reduced.y.len())] {
        if expected != found {
            return Err(Error::DimensionMismatch { what, expected, found });
        }
    }
    journal.check_integrity()?;
    let mut x = vec![0.0; journal.original_cols];
    let mut z = vec![0.0; journal.original_cols];
    let mut y = vec![0.0; journal.original_rows];
    for (r, &i) in journal.row_map.iter().enumerate() {
        y[i] = reduced.y[r];
    }
    for (c, &k) in journal.col_map.iter().enumerate() {
        x[k] = reduced.x[c];
        z[k] = reduced.z[c];
    }

    for record in journal.records.iter().rev() {
        match record {
            ReductionRecord::FixVariable { k, value, cost, saved_column, cause } => {
                x[*k] = *value;
                let aty: f64 = saved_column.iter().map(|&(i, a)| a * y[i]).sum();
                z[*k] = cost - aty;
                if let crate::reduction::FixCause::SingletonRow { row, coeff } = cause {
                    y[*row] += z[*k] / coeff;
                    z[*k] = 0.0;
                }
            }
            ReductionRecord::RemoveConstraint { i, cause, .. } => {
                y[*i] = 0.0;
                if let RemoveCause::ParallelTo { row, scale, lower_from_removed, upper_from_removed } = *cause {
                    let yk = y[row];
                    if (yk > 0.0 && lower_from_removed) || (yk < 0.0 && upper_from_removed) {
                        y[*i] = yk / scale;
                        y[row] = 0.0;
                    }
                }
            }
            ReductionRecord::AddScaledEqualityRow { src, dst, lambda } => {
                y[*src] += lambda * y[*dst];
            }
            ReductionRecord::SubstituteSingleton { k, row, coeff, cost, saved_row, rhs } => {
                let rest: f64 = saved_row.iter().filter(|e| e.0 != *k).map(|&(j, a)| a * x[j]).sum();
                x[*k] = (rhs - rest) / coeff;
                y[*row] = cost / coeff;
                z[*k] = 0.0;
            }
            ReductionRecord::ChangeBounds { k, old_lb, old_ub, new_lb, new_ub, inducing } => {
                let Some(snap) = inducing else { continue };
                let zk = z[*k];
                let fire = (zk > 0.0 && new_lb > old_lb) || (zk < 0.0 && new_ub < old_ub);
                if !fire {
                    continue;
                }
                let Some(&(_, a)) = snap.entries.iter().find(|e| e.0 == *k) else {
                    return Err(Error::CorruptJournal(alloc::format!(
                        "inducing row {} does not contain column {k}",
                        snap.row
                    )));
                };
                let delta = zk / a;
                y[snap.row] += delta;
                for &(j, aj) in &snap.entries {
                    z[j] -= aj * delta;
                }
                z[*k] = 0.0;
            }
            ReductionRecord::ChangeRowSides { .. } => {}
            ReductionRecord::AggregateParallelColumns {
                kept, removed, scale, removed_bounds, kept_old_bounds, ..
            } => {
                let (s, w, zw) = (*scale, x[*kept], z[*kept]);
                let (lq, uq) = *removed_bounds;
                let (lp, up) = *kept_old_bounds;
                let (from_p_lo, from_p_hi) =
                    if s > 0.0 { ((w - up) / s, (w - lp) / s) } else { ((w - lp) / s, (w - up) / s) };
                let lo = lq.max(from_p_lo);
                let hi = uq.min(from_p_hi);
                let zq = s * zw;
                let xq = if lo > hi {
                    if lo.is_finite() {
                        lo
                    } else {
                        hi
                    }
                } else if zq > 0.0 {
                    if lo.is_finite() {
                        lo
                    } else {
                        hi.min(0.0)
                    }
                } else if zq < 0.0 {
                    if hi.is_finite() {
                        hi
                    } else {
                        lo.max(0.0)
                    }
                } else {
                    0.0f64.max(lo).min(hi)
                };
                x[*removed] = xq;
                x[*kept] = w - s * xq;
                z[*removed] = zq;
                z[*kept] = zw;
            }
        }
    }
    Ok(PrimalDualSolution { x, y, z, status: reduced.status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{presolve, PresolveConfig};
    use crate::oracle::{random_lp, solve_dense, Feasibility, GeneratorConfig};
    use crate::problem::{check_kkt, objective_value, LpProblem, SolutionStatus};
    use crate::reduction::{FixCause, RowSnapshot};

    const INF: f64 = f64::INFINITY;

    #[test]
    fn empty_journal_is_identity() {
        let j = PostsolveJournal::identity(2, 3);
        let sol = PrimalDualSolution {
            x: vec![1.0, 2.0, 3.0],
            y: vec![-1.0, 0.5],
            z: vec![0.0, 1.0, -1.0],
            status: SolutionStatus::Optimal,
        };
        assert_eq!(postsolve(&j, &sol).unwrap(), sol);
    }

    #[test]
    fn mismatched_dims_rejected() {
        let j = PostsolveJournal::identity(1, 1);
        let sol = PrimalDualSolution::zeros(2, 1, SolutionStatus::Optimal);
        assert!(matches!(postsolve(&j, &sol), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn corrupt_record_rejected() {
        let mut j = PostsolveJournal::identity(1, 1);
        j.records.push(ReductionRecord::FixVariable {
            k: 4,
            value: 0.0,
            cost: 0.0,
            saved_column: vec![],
            cause: FixCause::AtLower,
        });
        let sol = PrimalDualSolution::zeros(1, 1, SolutionStatus::Optimal);
        assert!(matches!(postsolve(&j, &sol), Err(Error::CorruptJournal(_))));
    }

    #[test]
    fn doubleton_chain_recovers_kkt_point() {
        // min x2  s.t.  x1 + x2 = 1,  x1, x2 ≥ 0
        let p =
            LpProblem::from_dense(&[vec![1.0, 1.0]], vec![0.0, 1.0], vec![1.0], vec![1.0], vec![0.0; 2], vec![INF; 2])
                .unwrap();
        let out = presolve(&p, &PresolveConfig::default()).unwrap();
        let reduced_sol = solve_dense(&out.reduced, 60).unwrap();
        let full = postsolve(&out.journal, &reduced_sol).unwrap();
        assert_eq!(full.x, vec![1.0, 0.0]);
        let r = check_kkt(&p, &full, 1e-9).unwrap();
        assert!(r.within(1e-12), "{r:?}");
        let direct = solve_dense(&p, 60).unwrap();
        assert_eq!(objective_value(&p, &direct.x).unwrap(), objective_value(&p, &full.x).unwrap());
    }

    #[test]
    fn bound_shift_moves_reduced_cost_into_row() {
        // x0 ≤ 2 was implied by x0 + x1 ≤ 3 with x1 ≥ 1; reduced solution sits on it
        let snap = RowSnapshot { row: 0, entries: vec![(0, 1.0), (1, 1.0)] };
        let j = PostsolveJournal {
            original_rows: 1,
            original_cols: 2,
            records: vec![ReductionRecord::ChangeBounds {
                k: 0,
                old_lb: 0.0,
                old_ub: INF,
                new_lb: 0.0,
                new_ub: 2.0,
                inducing: Some(snap),
            }],
            row_map: vec![0],
            col_map: vec![0, 1],
        };
        let sol =
            PrimalDualSolution { x: vec![2.0, 1.0], y: vec![0.0], z: vec![-1.0, 0.0], status: SolutionStatus::Optimal };
        let full = postsolve(&j, &sol).unwrap();
        assert_eq!(full.y, vec![-1.0]);
        assert_eq!(full.z, vec![0.0, 1.0]);
    }

    #[test]
    fn replay_is_pure() {
        let cfg = GeneratorConfig::default();
        let p = random_lp(7, 6, 6, 0.5, Feasibility::ForcedFeasible, &cfg);
        let out = presolve(&p, &PresolveConfig::default()).unwrap();
        let sol = solve_dense(&out.reduced, 60).unwrap();
        assert_eq!(postsolve(&out.journal, &sol).unwrap(), postsolve(&out.journal, &sol).unwrap());
    }

    #[test]
    fn random_instances_postsolve_to_kkt_points() {
        let cfg = GeneratorConfig::default();
        for seed in 0..50 {
            let p = random_lp(seed, 8, 8, 0.4, Feasibility::ForcedFeasible, &cfg);
            let out = presolve(&p, &PresolveConfig::default()).unwrap();
            assert!(out.status.is_success(), "seed {seed}: {:?}", out.status);
            let sol = solve_dense(&out.reduced, 60).unwrap();
            assert_eq!(sol.status, SolutionStatus::Optimal, "seed {seed}");
            let full = postsolve(&out.journal, &sol).unwrap();
            let r = check_kkt(&p, &full, 1e-9).unwrap();
            assert!(r.within(1e-6), "seed {seed}: {r:?}");
        }
    }
}
