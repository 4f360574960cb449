//! Dense reference LP solver and seeded instance generators for tests.
//!
//! The solver is a bounded-variable primal simplex over `Ax − s = 0` with
//! `x ∈ [col_lower, col_upper]` and `s ∈ [row_lower, row_upper]`. Phase one
//! drives signed artificials to zero. Bland's rule picks both the entering and
//! the leaving variable, and the basis is refactored from scratch each
//! iteration. It is slow on purpose and only meant for small instances.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::problem::{LpProblem, PrimalDualSolution, SolutionStatus};

pub const ORACLE_SIZE_CAP: usize = 60;

const DUAL_EPS: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-11;
const PHASE_ONE_TOL: f64 = 1e-7;

/// Dense LU factorization with partial pivoting, row-major.
struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<f64>, n: usize) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))?;
            if a[p * n + c].abs() < 1e-13 {
                return None;
            }
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                }
                perm.swap(p, c);
            }
            let piv = a[c * n + c];
            for r in (c + 1)..n {
                let f = a[r * n + c] / piv;
                if f != 0.0 {
                    a[r * n + c] = f;
                    for j in (c + 1)..n {
                        a[r * n + j] -= f * a[c * n + j];
                    }
                } else {
                    a[r * n + c] = 0.0;
                }
            }
        }
        Some(Self { n, a, perm })
    }

    /// Solves `A x = b`.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                x[r] -= self.a[r * n + c] * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in (r + 1)..n {
                x[r] -= self.a[r * n + c] * x[c];
            }
            x[r] /= self.a[r * n + r];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut w = b.to_vec();
        for r in 0..n {
            for c in 0..r {
                w[r] -= self.a[c * n + r] * w[c];
            }
            w[r] /= self.a[r * n + r];
        }
        for r in (0..n).rev() {
            for c in (r + 1)..n {
                w[r] -= self.a[c * n + r] * w[c];
            }
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Simplex {
    m: usize,
    cols: Vec<Vec<f64>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    value: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Simplex {
    fn factor_basis(&self) -> Result<Lu, Error> {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (c, &j) in self.basis.iter().enumerate() {
            for r in 0..m {
                b[r * m + c] = self.cols[j][r];
            }
        }
        Lu::factor(b, m).ok_or(Error::Oracle("singular basis"))
    }

    fn run(&mut self) -> Result<Outcome, Error> {
        let total = self.cols.len();
        let limit = 200 * (total + self.m) + 2000;
        for _ in 0..limit {
            let lu = self.factor_basis()?;
            let mut rhs = vec![0.0; self.m];
            for j in 0..total {
                if !self.is_basic[j] && self.value[j] != 0.0 {
                    for r in 0..self.m {
                        rhs[r] -= self.cols[j][r] * self.value[j];
                    }
                }
            }
            let xb = lu.solve(&rhs);
            for (r, &j) in self.basis.iter().enumerate() {
                self.value[j] = xb[r];
            }
            let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
            self.y = lu.solve_transpose(&cb);
            for j in 0..total {
                self.d[j] = if self.is_basic[j] {
                    0.0
                } else {
                    self.cost[j] - self.cols[j].iter().zip(&self.y).map(|(a, y)| a * y).sum::<f64>()
                };
            }
            let entering = (0..total).find(|&j| {
                !self.is_basic[j]
                    && self.lower[j] < self.upper[j]
                    && ((self.d[j] < -DUAL_EPS && self.value[j] < self.upper[j])
                        || (self.d[j] > DUAL_EPS && self.value[j] > self.lower[j]))
            });
            let Some(j) = entering else { return Ok(Outcome::Optimal) };
            let dir = if self.d[j] < 0.0 { 1.0 } else { -1.0 };
            let alpha = lu.solve(&self.cols[j]);
            let mut best_t = self.upper[j] - self.lower[j];
            let mut leave: Option<(usize, bool)> = None;
            for r in 0..self.m {
                if alpha[r].abs() <= PIVOT_EPS {
                    continue;
                }
                let b = self.basis[r];
                let rate = -dir * alpha[r];
                let (t, to_upper) = if rate < 0.0 && self.lower[b].is_finite() {
                    (((self.value[b] - self.lower[b]) / -rate).max(0.0), false)
                } else if rate > 0.0 && self.upper[b].is_finite() {
                    (((self.upper[b] - self.value[b]) / rate).max(0.0), true)
                } else {
                    continue;
                };
                let better = match leave {
                    _ if t < best_t => true,
                    Some((lr, _)) if t == best_t => b < self.basis[lr],
                    _ => false,
                };
                if better {
                    best_t = t;
                    leave = Some((r, to_upper));
                }
            }
            if best_t == f64::INFINITY {
                return Ok(Outcome::Unbounded);
            }
            match leave {
                None => {
                    self.value[j] = if dir > 0.0 { self.upper[j] } else { self.lower[j] };
                }
                Some((r, to_upper)) => {
                    let b = self.basis[r];
                    self.value[j] += dir * best_t;
                    self.value[b] = if to_upper { self.upper[b] } else { self.lower[b] };
                    self.is_basic[b] = false;
                    self.is_basic[j] = true;
                    self.basis[r] = j;
                }
            }
        }
        Err(Error::Oracle("iteration limit reached"))
    }
}

fn resting_value(l: f64, u: f64) -> f64 {
    if l.is_finite() {
        l
    } else if u.is_finite() {
        u
    } else {
        0.0
    }
}

/// Solves a compact problem (no dead rows or columns) to optimality.
pub fn solve_dense(problem: &LpProblem, cap: usize) -> Result<PrimalDualSolution, Error> {
    let (m, n) = (problem.num_rows, problem.num_cols);
    if m + n > cap {
        return Err(Error::OracleSizeCap { size: m + n, cap });
    }
    let infeasible = || PrimalDualSolution::zeros(m, n, SolutionStatus::PrimalInfeasible);
    let crossed = (0..n).any(|k| problem.col_lower[k] > problem.col_upper[k])
        || (0..m).any(|i| problem.row_lower[i] > problem.row_upper[i]);
    if crossed {
        return Ok(infeasible());
    }
    let dense = problem.matrix.to_dense();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|k| (0..m).map(|i| dense[i][k]).collect()).collect();
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = -1.0;
        cols.push(e);
    }
    let mut lower: Vec<f64> = problem.col_lower.clone();
    lower.extend_from_slice(&problem.row_lower);
    let mut upper: Vec<f64> = problem.col_upper.clone();
    upper.extend_from_slice(&problem.row_upper);
    let mut value: Vec<f64> = lower.iter().zip(&upper).map(|(&l, &u)| resting_value(l, u)).collect();
    let mut residual = vec![0.0; m];
    for (j, col) in cols.iter().enumerate() {
        for r in 0..m {
            residual[r] += col[r] * value[j];
        }
    }
    for i in 0..m {
        let sigma = if residual[i] >= 0.0 { -1.0 } else { 1.0 };
        let mut e = vec![0.0; m];
        e[i] = sigma;
        cols.push(e);
        lower.push(0.0);
        upper.push(f64::INFINITY);
        value.push(residual[i].abs());
    }
    let total = n + 2 * m;
    let mut cost = vec![0.0; total];
    for c in cost.iter_mut().skip(n + m) {
        *c = 1.0;
    }
    let mut is_basic = vec![false; total];
    for b in is_basic.iter_mut().skip(n + m) {
        *b = true;
    }
    let mut sx = Simplex {
        m,
        cols,
        lower,
        upper,
        cost,
        basis: (n + m..total).collect(),
        is_basic,
        value,
        y: vec![0.0; m],
        d: vec![0.0; total],
    };
    sx.run()?;
    let artificial: f64 = sx.value[n + m..].iter().sum();
    if artificial > PHASE_ONE_TOL {
        return Ok(infeasible());
    }
    for j in n + m..total {
        sx.upper[j] = 0.0;
        sx.cost[j] = 0.0;
        if !sx.is_basic[j] {
            sx.value[j] = 0.0;
        }
    }
    sx.cost[..n].copy_from_slice(&problem.objective);
    let status = match sx.run()? {
        Outcome::Optimal => SolutionStatus::Optimal,
        Outcome::Unbounded => SolutionStatus::DualInfeasibleOrUnbounded,
    };
    Ok(PrimalDualSolution { x: sx.value[..n].to_vec(), y: sx.y.clone(), z: sx.d[..n].to_vec(), status })
}

/// Enumerates the vertices of the feasible set by brute force. Only meant for
/// a handful of variables.
pub fn vertices(problem: &LpProblem) -> Vec<Vec<f64>> {
    let (m, n) = (problem.num_rows, problem.num_cols);
    let dense = problem.matrix.to_dense();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..m {
        for side in [problem.row_lower[i], problem.row_upper[i]] {
            if side.is_finite() {
                planes.push((dense[i].clone(), side));
            }
        }
    }
    for k in 0..n {
        for b in [problem.col_lower[k], problem.col_upper[k]] {
            if b.is_finite() {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                planes.push((e, b));
            }
        }
    }
    let feasible = |x: &[f64]| {
        let tol = 1e-9;
        (0..n).all(|k| x[k] >= problem.col_lower[k] - tol && x[k] <= problem.col_upper[k] + tol)
            && (0..m).all(|i| {
                let v: f64 = (0..n).map(|k| dense[i][k] * x[k]).sum();
                v >= problem.row_lower[i] - tol && v <= problem.row_upper[i] + tol
            })
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut pick: Vec<usize> = (0..n).collect();
    if n == 0 {
        if feasible(&[]) {
            out.push(Vec::new());
        }
        return out;
    }
    if planes.len() < n {
        return out;
    }
    loop {
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n];
        for (r, &p) in pick.iter().enumerate() {
            a[r * n..(r + 1) * n].copy_from_slice(&planes[p].0);
            b[r] = planes[p].1;
        }
        if let Some(lu) = Lu::factor(a, n) {
            let x = lu.solve(&b);
            if feasible(&x) && !out.iter().any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= 1e-9)) {
                out.push(x);
            }
        }
        // next combination in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < planes.len() - n + i {
                break;
            }
        }
        pick[i] += 1;
        for j in (i + 1)..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    /// A primal point and a dual-feasible pair are planted, so an optimum exists.
    ForcedFeasible,
    /// Sides and bounds drawn without a planted point.
    Unrestricted,
}

/// Knobs of [`random_lp`]. Fractions are probabilities per row or column.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub equality_fraction: f64,
    pub ranged_fraction: f64,
    pub free_fraction: f64,
    pub singleton_rows: usize,
    pub doubleton_rows: usize,
    pub parallel_rows: usize,
    pub parallel_cols: usize,
    pub all_finite_bounds: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            equality_fraction: 0.3,
            ranged_fraction: 0.2,
            free_fraction: 0.15,
            singleton_rows: 1,
            doubleton_rows: 1,
            parallel_rows: 1,
            parallel_cols: 1,
            all_finite_bounds: false,
        }
    }
}

const SCALES: [f64; 6] = [1.0, -1.0, 2.0, -2.0, 0.5, -0.5];

fn grid(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    libm::round(rng.random_range(lo..hi) * 8.0) / 8.0
}

fn nonzero_coeff(rng: &mut ChaCha8Rng) -> f64 {
    let v = grid(rng, -4.0, 4.0);
    if v == 0.0 {
        1.0
    } else {
        v
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Both,
    LowerOnly,
    UpperOnly,
    Free,
}

/// Random sparse matrix with planted singleton, doubleton and parallel rows
/// and parallel columns, returned densely.
fn random_matrix(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    density: f64,
    cfg: &GeneratorConfig,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut a = vec![vec![0.0; n]; m];
    let mut pair_cols = Vec::new();
    if density <= 0.0 || n == 0 {
        return (a, pair_cols);
    }
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            if rng.random_bool(density.min(1.0)) {
                *v = nonzero_coeff(rng);
            }
        }
    }
    let mut next = 0;
    for _ in 0..cfg.singleton_rows {
        if next < m {
            let k = rng.random_range(0..n);
            a[next] = vec![0.0; n];
            a[next][k] = nonzero_coeff(rng);
            next += 1;
        }
    }
    for _ in 0..cfg.doubleton_rows {
        if next < m && n >= 2 {
            let p = rng.random_range(0..n);
            let q = (p + 1 + rng.random_range(0..n - 1)) % n;
            a[next] = vec![0.0; n];
            a[next][p] = nonzero_coeff(rng);
            a[next][q] = nonzero_coeff(rng);
            next += 1;
        }
    }
    for _ in 0..cfg.parallel_rows {
        if next + 1 < m {
            let src = rng.random_range(next..m);
            let dst = if src + 1 < m { src + 1 } else { next };
            if src != dst {
                let s = SCALES[rng.random_range(0..SCALES.len())];
                a[dst] = a[src].iter().map(|v| v * s).collect();
            }
        }
    }
    for _ in 0..cfg.parallel_cols {
        if n >= 2 {
            let p = rng.random_range(0..n);
            let q = (p + 1 + rng.random_range(0..n - 1)) % n;
            let s = SCALES[rng.random_range(0..SCALES.len())];
            for row in a.iter_mut() {
                row[q] = row[p] * s;
            }
            pair_cols.push(p);
            pair_cols.push(q);
        }
    }
    (a, pair_cols)
}

fn column_kind(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Kind {
    if cfg.all_finite_bounds {
        return Kind::Both;
    }
    let r: f64 = rng.random();
    if r < cfg.free_fraction {
        Kind::Free
    } else if r < cfg.free_fraction + 0.4 {
        Kind::LowerOnly
    } else if r < cfg.free_fraction + 0.55 {
        Kind::UpperOnly
    } else {
        Kind::Both
    }
}

fn row_kind(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Option<Kind> {
    let r: f64 = rng.random();
    if r < cfg.equality_fraction {
        None
    } else if r < cfg.equality_fraction + cfg.ranged_fraction {
        Some(Kind::Both)
    } else if rng.random_bool(0.5) {
        Some(Kind::LowerOnly)
    } else {
        Some(Kind::UpperOnly)
    }
}

/// Slack drawn so that the planted point is often on the boundary.
fn gap(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.35) {
        0.0
    } else {
        grid(rng, 0.125, 3.0)
    }
}

fn interval(rng: &mut ChaCha8Rng, v: f64, kind: Kind) -> (f64, f64) {
    const INF: f64 = f64::INFINITY;
    match kind {
        Kind::Both => (v - gap(rng), v + gap(rng)),
        Kind::LowerOnly => (v - gap(rng), INF),
        Kind::UpperOnly => (-INF, v + gap(rng)),
        Kind::Free => (-INF, INF),
    }
}

fn sign_allowed(rng: &mut ChaCha8Rng, lo: f64, up: f64) -> f64 {
    let mag = if rng.random_bool(0.3) { 0.0 } else { grid(rng, 0.0, 3.0) };
    match (lo.is_finite(), up.is_finite()) {
        (true, true) => {
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        }
        (true, false) => mag,
        (false, true) => -mag,
        (false, false) => 0.0,
    }
}

fn assemble(a: &[Vec<f64>], c: Vec<f64>, rows: Vec<(f64, f64)>, cols: Vec<(f64, f64)>) -> LpProblem {
    LpProblem::from_dense(
        a,
        c,
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
        cols.iter().map(|r| r.0).collect(),
        cols.iter().map(|r| r.1).collect(),
    )
    .expect("generator produces consistent dimensions")
}

struct Planted {
    a: Vec<Vec<f64>>,
    x0: Vec<f64>,
    rows: Vec<(f64, f64)>,
    cols: Vec<(f64, f64)>,
    c: Vec<f64>,
}

fn planted(rng: &mut ChaCha8Rng, m: usize, n: usize, density: f64, cfg: &GeneratorConfig) -> Planted {
    let (a, pair_cols) = random_matrix(rng, m, n, density, cfg);
    let x0: Vec<f64> = (0..n).map(|_| grid(rng, -3.0, 3.0)).collect();
    let cols: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let kind = column_kind(rng, cfg);
            interval(rng, x0[k], kind)
        })
        .collect();
    let rows: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v: f64 = (0..n).map(|k| a[i][k] * x0[k]).sum();
            match row_kind(rng, cfg) {
                None => (v, v),
                Some(kind) => interval(rng, v, kind),
            }
        })
        .collect();
    let y0: Vec<f64> = rows.iter().map(|&(lo, up)| sign_allowed(rng, lo, up)).collect();
    let c: Vec<f64> = (0..n)
        .map(|k| {
            let z0 = if pair_cols.contains(&k) { 0.0 } else { sign_allowed(rng, cols[k].0, cols[k].1) };
            (0..m).map(|i| a[i][k] * y0[i]).sum::<f64>() + z0
        })
        .collect();
    Planted { a, x0, rows, cols, c }
}

/// Reproducible random LP with `m` rows and `n` columns.
pub fn random_lp(
    seed: u64,
    m: usize,
    n: usize,
    density: f64,
    feasibility: Feasibility,
    cfg: &GeneratorConfig,
) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match feasibility {
        Feasibility::ForcedFeasible => {
            let p = planted(&mut rng, m, n, density, cfg);
            assemble(&p.a, p.c, p.rows, p.cols)
        }
        Feasibility::Unrestricted => {
            let (a, _) = random_matrix(&mut rng, m, n, density, cfg);
            let cols = (0..n)
                .map(|_| {
                    let kind = column_kind(&mut rng, cfg);
                    let centre = grid(&mut rng, -3.0, 3.0);
                    interval(&mut rng, centre, kind)
                })
                .collect();
            let rows = (0..m)
                .map(|_| {
                    let v = grid(&mut rng, -5.0, 5.0);
                    match row_kind(&mut rng, cfg) {
                        None => (v, v),
                        Some(kind) => interval(&mut rng, v, kind),
                    }
                })
                .collect();
            let c = (0..n).map(|_| grid(&mut rng, -3.0, 3.0)).collect();
            assemble(&a, c, rows, cols)
        }
    }
}

/// A dual-feasible instance plus one extra row that contradicts a combination
/// of two equality rows. The result has `m + 1` rows and no feasible point.
pub fn random_infeasible_lp(seed: u64, m: usize, n: usize, density: f64, cfg: &GeneratorConfig) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1f2e_3d4c);
    let m = m.max(2);
    let mut p = planted(&mut rng, m, n, density.max(0.2), cfg);
    let mut eqs: Vec<usize> =
        (0..m).filter(|&i| p.rows[i].0 == p.rows[i].1 && p.a[i].iter().any(|&v| v != 0.0)).collect();
    if eqs.is_empty() {
        if let Some(i) = (0..m).find(|&i| p.a[i].iter().any(|&v| v != 0.0)) {
            let v: f64 = (0..n).map(|k| p.a[i][k] * p.x0[k]).sum();
            p.rows[i] = (v, v);
            eqs.push(i);
        }
    }
    let (g, value) = match eqs.len() {
        0 => {
            // empty matrix: contradict a fixed variable instead
            let mut g = vec![0.0; n];
            if n > 0 {
                g[0] = 1.0;
                p.cols[0] = (p.x0[0], p.x0[0]);
            }
            (g, p.x0.first().copied().unwrap_or(0.0))
        }
        len => {
            let i1 = eqs[0];
            let i2 = eqs[rng.random_range(0..len)];
            let l1 = SCALES[rng.random_range(0..SCALES.len())];
            let l2 = if i1 == i2 { 0.0 } else { SCALES[rng.random_range(0..SCALES.len())] };
            let g: Vec<f64> = (0..n).map(|k| l1 * p.a[i1][k] + l2 * p.a[i2][k]).collect();
            if g.iter().all(|&v| v == 0.0) {
                (p.a[i1].clone(), p.rows[i1].0)
            } else {
                (g, l1 * p.rows[i1].0 + l2 * p.rows[i2].0)
            }
        }
    };
    let delta = grid(&mut rng, 0.5, 2.0);
    p.a.push(g);
    p.rows.push((value + delta, f64::INFINITY));
    assemble(&p.a, p.c, p.rows, p.cols)
}

/// A primal-feasible instance with a ray of strictly decreasing cost.
pub fn random_unbounded_lp(seed: u64, m: usize, n: usize, density: f64, cfg: &GeneratorConfig) -> LpProblem {
    const INF: f64 = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a_a5a5);
    let n = n.max(1);
    let (a, _) = random_matrix(&mut rng, m, n, density, cfg);
    let x0: Vec<f64> = (0..n).map(|_| grid(&mut rng, -3.0, 3.0)).collect();
    let mut d: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { grid(&mut rng, -2.0, 2.0) } else { 0.0 }).collect();
    if d.iter().all(|&v| v == 0.0) {
        d[rng.random_range(0..n)] = 1.0;
    }
    let cols: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let kind = column_kind(&mut rng, cfg);
            let (l, u) = interval(&mut rng, x0[k], kind);
            if d[k] > 0.0 {
                (l, INF)
            } else if d[k] < 0.0 {
                (-INF, u)
            } else {
                (l, u)
            }
        })
        .collect();
    let rows: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v: f64 = (0..n).map(|k| a[i][k] * x0[k]).sum();
            let ad: f64 = (0..n).map(|k| a[i][k] * d[k]).sum();
            let (lo, up) = match row_kind(&mut rng, cfg) {
                None => (v, v),
                Some(kind) => interval(&mut rng, v, kind),
            };
            if ad > 0.0 {
                (lo.min(v), INF)
            } else if ad < 0.0 {
                (-INF, up.max(v))
            } else {
                (lo, up)
            }
        })
        .collect();
    let base: Vec<f64> = (0..n).map(|_| grid(&mut rng, -3.0, 3.0)).collect();
    let cd: f64 = base.iter().zip(&d).map(|(c, d)| c * d).sum();
    let dd: f64 = d.iter().map(|v| v * v).sum();
    let shift = (cd + 1.0) / dd;
    let c: Vec<f64> = base.iter().zip(&d).map(|(c, d)| c - shift * d).collect();
    assemble(&a, c, rows, cols)
}
