//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.
// Comparisons are written so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use pslp::clock::StdClock;
use pslp::codec::encode_journal;
use pslp::metrics::shifted_geometric_mean;
use pslp::mps::{read_mps, write_mps, MpsOptions};
use pslp_core::oracle::{
    random_infeasible_lp, random_lp, random_unbounded_lp, solve_dense, Feasibility, GeneratorConfig, ORACLE_SIZE_CAP,
};
use pslp_core::reduction::Session;
use pslp_core::{
    check_kkt, objective_value, postsolve, presolve, presolve_with, Clock, ExplorerKind, LpProblem, NoClock,
    PassObserver, PresolveConfig, PresolveStatus, PrimalDualSolution, ReductionRecord, RemoveCause, SolutionStatus,
    SparseDualMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INF: f64 = f64::INFINITY;
const KKT_TOL: f64 = 1e-6;
const OBJ_TOL: f64 = 1e-6;
const ACTIVITY_TOL: f64 = 1e-9;
const SGM_TOL: f64 = 1e-12;
const ROUNDTRIP_CASES: u64 = 1000;
const INFEASIBLE_CASES: u64 = 500;
const UNBOUNDED_CASES: u64 = 200;
const STATS_REDUCTIONS: usize = 10_000;
const SPARSE_OPS: usize = 100_000;
const NETLIB: [&str; 4] = ["afiro", "adlittle", "sc50a", "blend"];
const NETLIB_MEAN_RATIO: f64 = 0.9;
const NETLIB_TIME_LIMIT: f64 = 0.050;

type Outcome = Result<String, String>;

fn shape(seed: u64) -> (usize, usize, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x00ac_ce97);
    (rng.random_range(2..=25), rng.random_range(2..=25), rng.random_range(0.08..0.45))
}

fn feasible_instance(seed: u64) -> LpProblem {
    let (m, n, d) = shape(seed);
    random_lp(seed, m, n, d, Feasibility::ForcedFeasible, &GeneratorConfig::default())
}

fn summarize(failures: &[String]) -> String {
    let head: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
    format!("{} failures: {}", failures.len(), head.join("; "))
}

struct RoundtripCase {
    kkt: f64,
    direct: f64,
    postsolved: f64,
}

fn roundtrip(p: &LpProblem) -> Result<RoundtripCase, String> {
    let out = presolve(p, &PresolveConfig::default()).map_err(|e| e.to_string())?;
    if !out.status.is_success() {
        return Err(format!("verdict {:?} on a feasible instance", out.status));
    }
    let sol = solve_dense(&out.reduced, ORACLE_SIZE_CAP).map_err(|e| e.to_string())?;
    if sol.status != SolutionStatus::Optimal {
        return Err(format!("reduced problem {:?}", sol.status));
    }
    let full = postsolve(&out.journal, &sol).map_err(|e| e.to_string())?;
    let kkt = check_kkt(p, &full, 1e-9).map_err(|e| e.to_string())?.max();
    let direct_sol = solve_dense(p, ORACLE_SIZE_CAP).map_err(|e| e.to_string())?;
    if direct_sol.status != SolutionStatus::Optimal {
        return Err(format!("original problem {:?}", direct_sol.status));
    }
    Ok(RoundtripCase {
        kkt,
        direct: objective_value(p, &direct_sol.x).map_err(|e| e.to_string())?,
        postsolved: objective_value(p, &full.x).map_err(|e| e.to_string())?,
    })
}

/// Criteria 1 and 2 share one pass over the corpus.
fn roundtrip_corpus() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut kkt_fail = Vec::new();
    let mut obj_fail = Vec::new();
    let mut worst_kkt: f64 = 0.0;
    let mut worst_obj: f64 = 0.0;
    for seed in 0..ROUNDTRIP_CASES {
        match roundtrip(&feasible_instance(seed)) {
            Ok(c) => {
                worst_kkt = worst_kkt.max(c.kkt);
                if !(c.kkt <= KKT_TOL) {
                    kkt_fail.push(format!("seed {seed}: residual {:.3e}", c.kkt));
                }
                let gap = (c.direct - c.postsolved).abs() / (1.0 + c.direct.abs());
                worst_obj = worst_obj.max(gap);
                if !(gap <= OBJ_TOL) {
                    obj_fail.push(format!("seed {seed}: {} vs {}", c.direct, c.postsolved));
                }
            }
            Err(e) => {
                kkt_fail.push(format!("seed {seed}: {e}"));
                obj_fail.push(format!("seed {seed}: {e}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let one = if kkt_fail.is_empty() {
        Ok(format!("{ROUNDTRIP_CASES} cases, max KKT residual {worst_kkt:.2e}, {secs:.1}s"))
    } else {
        Err(summarize(&kkt_fail))
    };
    let two = if obj_fail.is_empty() {
        Ok(format!("{ROUNDTRIP_CASES} cases, max relative gap {worst_obj:.2e}"))
    } else {
        Err(summarize(&obj_fail))
    };
    (one, two)
}

fn verdict_soundness() -> Outcome {
    let gen = GeneratorConfig::default();
    let cfg = PresolveConfig::default();
    let mut failures = Vec::new();
    let (mut by_presolve, mut by_oracle) = (0, 0);
    let mut check = |label: &str, seed: u64, p: &LpProblem, want: PresolveStatus, want_oracle: SolutionStatus| {
        let out = match presolve(p, &cfg) {
            Ok(o) => o,
            Err(e) => return failures.push(format!("{label} {seed}: {e}")),
        };
        if out.status == want {
            by_presolve += 1;
        } else if out.status.is_success() {
            match solve_dense(&out.reduced, ORACLE_SIZE_CAP) {
                Ok(s) if s.status == want_oracle => by_oracle += 1,
                Ok(s) => failures.push(format!("{label} {seed}: reduced problem {:?}", s.status)),
                Err(e) => failures.push(format!("{label} {seed}: {e}")),
            }
        } else {
            failures.push(format!("{label} {seed}: wrong verdict {:?}", out.status));
        }
    };
    for seed in 0..INFEASIBLE_CASES {
        let (m, n, d) = shape(seed + 10_000);
        let p = random_infeasible_lp(seed, m, n, d, &gen);
        check("infeasible", seed, &p, PresolveStatus::InfeasiblePrimal, SolutionStatus::PrimalInfeasible);
    }
    for seed in 0..UNBOUNDED_CASES {
        let (m, n, d) = shape(seed + 20_000);
        let p = random_unbounded_lp(seed, m, n, d, &gen);
        check(
            "unbounded",
            seed,
            &p,
            PresolveStatus::UnboundedOrInfeasibleDual,
            SolutionStatus::DualInfeasibleOrUnbounded,
        );
    }
    let mut false_verdicts = 0;
    for seed in 0..ROUNDTRIP_CASES {
        let out = presolve(&feasible_instance(seed), &cfg).expect("valid instance");
        if !out.status.is_success() {
            false_verdicts += 1;
            failures.push(format!("feasible {seed}: false verdict {:?}", out.status));
        }
    }
    if failures.is_empty() {
        Ok(format!(
            "{} planted instances: {by_presolve} decided by presolve, {by_oracle} by the oracle; {false_verdicts} false verdicts",
            INFEASIBLE_CASES + UNBOUNDED_CASES
        ))
    } else {
        Err(summarize(&failures))
    }
}

fn only(kind: ExplorerKind) -> PresolveConfig {
    let mut cfg = PresolveConfig::default().disable_all();
    cfg.set_enabled(kind, true);
    cfg
}

fn worked_examples() -> Outcome {
    let mut failures = Vec::new();

    // x1 ≥ 1, x2 ≥ 2, x1 + 2 x2 ≥ 5: the row is implied by the bounds.
    let p =
        LpProblem::from_dense(&[vec![1.0, 2.0]], vec![1.0, 1.0], vec![5.0], vec![INF], vec![1.0, 2.0], vec![INF; 2])
            .unwrap();
    let out = presolve(&p, &only(ExplorerKind::RedundantConstraints)).unwrap();
    let removed = out
        .journal
        .records
        .iter()
        .any(|r| matches!(r, ReductionRecord::RemoveConstraint { i: 0, cause: RemoveCause::Redundant, .. }));
    if !removed || out.reduced.num_rows != 0 || out.reduced.num_cols != 2 {
        failures.push(format!("redundancy: {:?}", out.journal.records));
    }

    // x1 + x2 = 1 with x ≥ 0, alone and next to a second row.
    let alone =
        LpProblem::from_dense(&[vec![1.0, 1.0]], vec![1.0, 2.0], vec![1.0], vec![1.0], vec![0.0; 2], vec![INF; 2])
            .unwrap();
    let out = presolve(&alone, &only(ExplorerKind::DoubletonRows)).unwrap();
    if (out.reduced.num_rows, out.reduced.num_cols) != (0, 1) {
        failures.push(format!("doubleton alone: {}x{}", out.reduced.num_rows, out.reduced.num_cols));
    } else {
        // Any feasible x2 = a of the reduced problem maps back to (1 − a, a).
        let (lo, up) = (out.reduced.col_lower[0], out.reduced.col_upper[0]);
        if lo != 0.0 || up != 1.0 {
            failures.push(format!("doubleton bound transfer: [{lo}, {up}]"));
        }
        for a in [0.0, 0.25, 1.0] {
            let mut s = PrimalDualSolution::zeros(0, 1, SolutionStatus::Optimal);
            s.x[0] = a;
            let full = postsolve(&out.journal, &s).unwrap();
            let kept = out.journal.col_map[0];
            let (x1, x2) = if kept == 1 { (full.x[0], full.x[1]) } else { (full.x[1], full.x[0]) };
            if (x1 - (1.0 - a)).abs() > 1e-12 || (x2 - a).abs() > 1e-12 {
                failures.push(format!("doubleton map: a={a} gives {:?}", full.x));
            }
        }
    }
    let pair = LpProblem::from_dense(
        &[vec![1.0, 1.0], vec![1.0, 3.0]],
        vec![1.0, 2.0],
        vec![1.0, -INF],
        vec![1.0, 5.0],
        vec![0.0; 2],
        vec![INF; 2],
    )
    .unwrap();
    let out = presolve(&pair, &only(ExplorerKind::DoubletonRows)).unwrap();
    if (out.reduced.num_rows, out.reduced.num_cols) != (1, 1) {
        failures.push(format!("doubleton pair: {}x{}", out.reduced.num_rows, out.reduced.num_cols));
    }

    // c = (−1, 1); x0 has only downlocks in x0 − x1 ≥ −2 and upper bound 4.
    let lock =
        LpProblem::from_dense(&[vec![1.0, -1.0]], vec![-1.0, 1.0], vec![-2.0], vec![INF], vec![0.0; 2], vec![4.0, INF])
            .unwrap();
    let out = presolve(&lock, &only(ExplorerKind::VariableLocks)).unwrap();
    let fixed = out
        .journal
        .records
        .iter()
        .any(|r| matches!(r, ReductionRecord::FixVariable { k: 0, value, .. } if *value == 4.0));
    if !fixed {
        failures.push(format!("lock: {:?}", out.journal.records));
    }
    let unbounded =
        LpProblem::from_dense(&[vec![1.0, -1.0]], vec![-1.0, 1.0], vec![-2.0], vec![INF], vec![0.0; 2], vec![INF; 2])
            .unwrap();
    let out = presolve(&unbounded, &only(ExplorerKind::VariableLocks)).unwrap();
    if out.status != PresolveStatus::UnboundedOrInfeasibleDual {
        failures.push(format!("lock with infinite upper bound: {:?}", out.status));
    }

    if failures.is_empty() {
        Ok(String::from("redundant row removed, doubleton drops one row and one column, lock fixes at the upper bound"))
    } else {
        Err(failures.join("; "))
    }
}

/// Recomputes nnz, locks and activities from the live problem and compares.
struct StatsAudit {
    passes: usize,
    failures: Vec<String>,
}

fn audit(s: &Session) -> Option<String> {
    let p = &s.problem;
    let a = &p.matrix;
    for i in a.alive_rows() {
        if s.stats.row_nnz[i] != a.row_len(i) {
            return Some(format!("row {i} nnz {} vs {}", s.stats.row_nnz[i], a.row_len(i)));
        }
        let (mut lo, mut hi, mut inf_lo, mut inf_hi) = (0.0, 0.0, 0, 0);
        for (k, v) in a.row(i).iter() {
            let (l, u) = (p.col_lower[k], p.col_upper[k]);
            let (at_min, at_max) = if v > 0.0 { (l, u) } else { (u, l) };
            if at_min.is_finite() {
                lo += v * at_min;
            } else {
                inf_lo += 1;
            }
            if at_max.is_finite() {
                hi += v * at_max;
            } else {
                inf_hi += 1;
            }
        }
        let act = &s.stats.activity[i];
        if act.num_inf_min != inf_lo || act.num_inf_max != inf_hi {
            return Some(format!("row {i} infinite counts {act:?} vs ({inf_lo}, {inf_hi})"));
        }
        let close = |x: f64, y: f64| (x - y).abs() <= ACTIVITY_TOL * (1.0 + y.abs());
        if inf_lo == 0 && !close(act.min_finite, lo) || inf_hi == 0 && !close(act.max_finite, hi) {
            return Some(format!("row {i} activity {act:?} vs [{lo}, {hi}]"));
        }
    }
    for k in a.alive_cols() {
        if s.stats.col_nnz[k] != a.col_len(k) {
            return Some(format!("col {k} nnz {} vs {}", s.stats.col_nnz[k], a.col_len(k)));
        }
        let (mut up, mut down) = (0, 0);
        for (i, v) in a.col(k).iter() {
            let (lo, hi) = (p.row_lower[i], p.row_upper[i]);
            if (v > 0.0 && hi < INF) || (v < 0.0 && lo > -INF) {
                up += 1;
            }
            if (v > 0.0 && lo > -INF) || (v < 0.0 && hi < INF) {
                down += 1;
            }
        }
        if s.stats.uplocks[k] != up || s.stats.downlocks[k] != down {
            return Some(format!("col {k} locks ({}, {}) vs ({up}, {down})", s.stats.uplocks[k], s.stats.downlocks[k]));
        }
    }
    a.verify().err()
}

impl PassObserver for StatsAudit {
    fn after_pass(&mut self, kind: ExplorerKind, round: usize, session: &Session) {
        self.passes += 1;
        if let Some(d) = audit(session) {
            self.failures.push(format!("{} round {round}: {d}", kind.name()));
        }
    }
}

fn stats_consistency() -> Outcome {
    let gen = GeneratorConfig::default();
    let mut reductions = 0;
    let mut audit = StatsAudit { passes: 0, failures: Vec::new() };
    let mut seed = 50_000;
    while reductions < STATS_REDUCTIONS {
        let (m, n, d) = shape(seed);
        let p = random_lp(seed, m, n, d, Feasibility::ForcedFeasible, &gen);
        let before = audit.failures.len();
        let out = presolve_with(&p, &PresolveConfig::default(), &NoClock, &mut audit).map_err(|e| e.to_string())?;
        for f in &mut audit.failures[before..] {
            *f = format!("seed {seed}: {f}");
        }
        reductions += out.journal.records.len();
        seed += 1;
    }
    if audit.failures.is_empty() {
        Ok(format!("{reductions} reductions over {} instances, {} passes audited", seed - 50_000, audit.passes))
    } else {
        Err(summarize(&audit.failures))
    }
}

fn compare_with_shadow(
    a: &SparseDualMatrix,
    dense: &[Vec<f64>],
    rows_alive: &[bool],
    cols_alive: &[bool],
) -> Option<String> {
    for (i, alive) in rows_alive.iter().enumerate() {
        if *alive != a.is_row_alive(i) {
            return Some(format!("row {i} liveness"));
        }
        if !alive {
            continue;
        }
        let mut got = a.row(i).to_vec();
        got.sort_by_key(|e| e.0);
        let want: Vec<(usize, f64)> =
            (0..dense[i].len()).filter(|&k| dense[i][k] != 0.0).map(|k| (k, dense[i][k])).collect();
        if got != want {
            return Some(format!("row {i}: {got:?} vs {want:?}"));
        }
    }
    for (k, alive) in cols_alive.iter().enumerate() {
        if *alive != a.is_col_alive(k) {
            return Some(format!("col {k} liveness"));
        }
        if !alive {
            continue;
        }
        let mut got = a.col(k).to_vec();
        got.sort_by_key(|e| e.0);
        let want: Vec<(usize, f64)> =
            (0..dense.len()).filter(|&i| dense[i][k] != 0.0).map(|i| (i, dense[i][k])).collect();
        if got != want {
            return Some(format!("col {k}: {got:?} vs {want:?}"));
        }
    }
    let nnz: usize = dense.iter().map(|r| r.iter().filter(|v| **v != 0.0).count()).sum();
    if nnz != a.live_nnz() {
        return Some(format!("live nnz {} vs {nnz}", a.live_nnz()));
    }
    None
}

fn sparse_fuzz() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ba25e);
    let mut ops = 0;
    let mut matrices = 0;
    while ops < SPARSE_OPS {
        matrices += 1;
        let (m, n) = (rng.random_range(1..=30), rng.random_range(1..=30));
        let mut dense = vec![vec![0.0; n]; m];
        let mut triplets = Vec::new();
        for (i, row) in dense.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                if rng.random_bool(0.2) {
                    *v = rng.random_range(-4..=4) as f64;
                    triplets.push((i, k, *v));
                }
            }
        }
        let slack = [0.0, 0.25, 1.0][rng.random_range(0..3)];
        let mut a = SparseDualMatrix::build_with_tol(&triplets, m, n, slack, TOL).map_err(|e| e.to_string())?;
        let mut rows_alive = vec![true; m];
        let mut cols_alive = vec![true; n];
        for _ in 0..2_000 {
            ops += 1;
            let i = rng.random_range(0..m);
            let k = rng.random_range(0..n);
            match rng.random_range(0..100) {
                0..=54 => {
                    let v = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(-8..=8) as f64 * 0.5 };
                    let res = a.set_value(i, k, v);
                    if rows_alive[i] && cols_alive[k] {
                        let old = res.map_err(|e| format!("op {ops}: {e}"))?;
                        if old != dense[i][k] {
                            return Err(format!("op {ops}: set_value returned {old}, shadow {}", dense[i][k]));
                        }
                        dense[i][k] = v;
                    } else if res.is_ok() {
                        return Err(format!("op {ops}: write to a dead line accepted"));
                    }
                }
                55..=84 => {
                    let dst = rng.random_range(0..m);
                    let lambda = [1.0, -1.0, 0.5, -2.0, 3.0][rng.random_range(0..5)];
                    let res = a.add_scaled_row(i, dst, lambda);
                    if rows_alive[i] && rows_alive[dst] && i != dst {
                        res.map_err(|e| format!("op {ops}: {e}"))?;
                        for kk in 0..n {
                            if cols_alive[kk] && dense[i][kk] != 0.0 {
                                let v = dense[dst][kk] + lambda * dense[i][kk];
                                dense[dst][kk] = if v.abs() <= TOL { 0.0 } else { v };
                            }
                        }
                    } else if res.is_ok() {
                        return Err(format!("op {ops}: invalid row combination accepted"));
                    }
                }
                85..=89 if rows_alive[i] => {
                    a.delete_row(i).map_err(|e| e.to_string())?;
                    rows_alive[i] = false;
                    dense[i].iter_mut().for_each(|v| *v = 0.0);
                }
                90..=94 if cols_alive[k] => {
                    a.delete_col(k).map_err(|e| e.to_string())?;
                    cols_alive[k] = false;
                    dense.iter_mut().for_each(|r| r[k] = 0.0);
                }
                _ => {
                    let got = a.get(i, k);
                    if got != dense[i][k] {
                        return Err(format!("op {ops}: get({i},{k}) = {got}, shadow {}", dense[i][k]));
                    }
                }
            }
            if let Some(d) = compare_with_shadow(&a, &dense, &rows_alive, &cols_alive) {
                return Err(format!("op {ops}: {d}"));
            }
            if let Err(e) = a.verify() {
                return Err(format!("op {ops}: {e}"));
            }
        }
    }
    Ok(format!("{ops} operations on {matrices} matrices"))
}

fn netlib_path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/netlib").join(format!("{name}.mps"))
}

fn netlib() -> Outcome {
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    let mut notes = Vec::new();
    for name in NETLIB {
        let bytes = std::fs::read(netlib_path(name)).map_err(|e| format!("{name}: {e}"))?;
        let p = read_mps(&bytes, MpsOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        let clock = StdClock::new();
        let out = presolve_with(&p, &PresolveConfig::default(), &clock, &mut ()).map_err(|e| format!("{name}: {e}"))?;
        let secs = clock.now();
        let ratio = out.report.nnz_ratio();
        ratios.push(ratio);
        if !(ratio < 1.0) {
            failures.push(format!("{name}: ratio {ratio:.4}"));
        }
        if !(secs < NETLIB_TIME_LIMIT) {
            failures.push(format!("{name}: {:.1} ms", secs * 1e3));
        }
        let size = out.reduced.num_rows + out.reduced.num_cols;
        let mut note = format!("{name} {ratio:.3} {:.2}ms", secs * 1e3);
        if size <= ORACLE_SIZE_CAP {
            let sol = solve_dense(&out.reduced, ORACLE_SIZE_CAP).map_err(|e| format!("{name}: {e}"))?;
            let full = postsolve(&out.journal, &sol).map_err(|e| format!("{name}: {e}"))?;
            let kkt = check_kkt(&p, &full, 1e-9).map_err(|e| format!("{name}: {e}"))?.max();
            if !(kkt <= KKT_TOL) {
                failures.push(format!("{name}: KKT residual {kkt:.3e}"));
            }
            if p.num_rows + p.num_cols <= ORACLE_SIZE_CAP {
                let direct = solve_dense(&p, ORACLE_SIZE_CAP).map_err(|e| format!("{name}: {e}"))?;
                let v = objective_value(&p, &direct.x).unwrap();
                let w = objective_value(&p, &full.x).unwrap();
                if (v - w).abs() > OBJ_TOL * (1.0 + v.abs()) {
                    failures.push(format!("{name}: objective {v} vs {w}"));
                }
            }
            note.push_str(&format!(" kkt {kkt:.1e}"));
        } else {
            note.push_str(&format!(" (reduced size {size} over the oracle cap)"));
        }
        notes.push(note);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if !(mean <= NETLIB_MEAN_RATIO) {
        failures.push(format!("mean ratio {mean:.4}"));
    }
    if failures.is_empty() {
        Ok(format!("mean ratio {mean:.4}; {}", notes.join(", ")))
    } else {
        Err(failures.join("; "))
    }
}

/// Direct product form, (Π (t_i + Δ))^(1/K) − Δ.
fn sgm_reference(t: &[f64], shift: f64) -> f64 {
    let k = t.len() as f64;
    t.iter().map(|v| (v + shift).powf(1.0 / k)).product::<f64>() - shift
}

fn sgm_arithmetic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a11);
    let close = |a: f64, b: f64| (a - b).abs() <= SGM_TOL * (1.0 + b.abs());
    let mut checks = 0;
    for _ in 0..2_000 {
        let len = rng.random_range(1..=40);
        let t: Vec<f64> = (0..len).map(|_| rng.random_range(1e-3..100.0)).collect();
        for shift in [0.0, 1.0, 10.0, rng.random_range(0.0..50.0)] {
            checks += 1;
            let got = shifted_geometric_mean(&t, shift);
            let want = sgm_reference(&t, shift);
            if !close(got, want) {
                return Err(format!("{t:?} shift {shift}: {got} vs {want}"));
            }
        }
        let single = [t[0]];
        let shift = rng.random_range(0.0..50.0);
        checks += 1;
        if !close(shifted_geometric_mean(&single, shift), t[0]) {
            return Err(format!("K=1 identity fails for {} shift {shift}", t[0]));
        }
        let constant = vec![t[0]; len];
        for shift in [0.0, 1.0, 10.0, shift] {
            checks += 1;
            if !close(shifted_geometric_mean(&constant, shift), t[0]) {
                return Err(format!("constant vector {} x{len} shift {shift}", t[0]));
            }
        }
    }
    // the textbook case {1, 9} with shift 1: sqrt(2 · 10) − 1
    checks += 1;
    if !close(shifted_geometric_mean(&[1.0, 9.0], 1.0), 20f64.sqrt() - 1.0) {
        return Err(String::from("{1, 9} with shift 1"));
    }
    Ok(format!("{checks} checks"))
}

fn artifacts(p: &LpProblem) -> Result<[Vec<u8>; 4], String> {
    let out = presolve(p, &PresolveConfig::default()).map_err(|e| e.to_string())?;
    Ok([
        write_mps(&out.reduced).into_bytes(),
        encode_journal(&out.journal),
        out.report.to_text(false).into_bytes(),
        out.report.to_kv(false).into_bytes(),
    ])
}

fn determinism() -> Outcome {
    let mut problems = Vec::new();
    for name in NETLIB {
        let bytes = std::fs::read(netlib_path(name)).map_err(|e| e.to_string())?;
        problems.push((name.to_string(), read_mps(&bytes, MpsOptions::default()).map_err(|e| e.to_string())?));
    }
    for seed in 0..100 {
        problems.push((format!("seed {seed}"), feasible_instance(seed)));
    }
    for (label, p) in &problems {
        if artifacts(p)? != artifacts(p)? {
            return Err(format!("{label}: outputs differ between runs"));
        }
    }
    Ok(format!("{} instances, reduced MPS, journal and reports identical", problems.len()))
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut report = |id: usize, name: &str, outcome: Outcome| {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                all_ok = false;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {id}. {name}: {detail}");
    };
    let (c1, c2) = roundtrip_corpus();
    report(1, "roundtrip KKT residuals", c1);
    report(2, "optimal value preserved", c2);
    report(3, "infeasibility and unboundedness verdicts", verdict_soundness());
    report(4, "worked examples", worked_examples());
    report(5, "incremental statistics", stats_consistency());
    report(6, "sparse row and column views", sparse_fuzz());
    report(7, "netlib reductions", netlib());
    report(8, "shifted geometric mean", sgm_arithmetic());
    report(9, "deterministic outputs", determinism());
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
