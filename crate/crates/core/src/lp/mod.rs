//! The triangle-inequality LP relaxation of correlation clustering.
//!
//! Variables `x_uv in [0, 1]` are indexed by [`pair_index`]. The objective is
//! `sum_{E+} w x + sum_{E-} w (1 - x)`, minimised subject to
//! `x_uv <= x_uw + x_vw` for every apex pair and witness.

mod rank;
mod simplex;

use std::collections::HashSet;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{pair_count, pair_index, pairs, CCInstance};
use rank::EchelonBasis;
use simplex::{DualSimplex, Settings, Status};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_SEPARATION_TOL: f64 = 1e-6;
pub const DEFAULT_TOP_K: usize = 50;
pub const RANK_PIVOT_THRESHOLD: f64 = 1e-8;

/// `x_uv <= x_uw + x_vw` with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriangleConstraint {
    pub u: usize,
    pub v: usize,
    pub w: usize,
}

impl TriangleConstraint {
    pub fn new(u: usize, v: usize, w: usize) -> Result<Self> {
        if u == v || u == w || v == w {
            return Err(Error::Parameter(format!(
                "triangle ({u}, {v}; {w}) needs three distinct vertices"
            )));
        }
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        Ok(Self { u, v, w })
    }

    /// The three orientations of the triple `{a, b, c}`.
    pub fn orientations(a: usize, b: usize, c: usize) -> [Self; 3] {
        let mut t = [a, b, c];
        t.sort_unstable();
        let [a, b, c] = t;
        [
            Self { u: a, v: b, w: c },
            Self { u: a, v: c, w: b },
            Self { u: b, v: c, w: a },
        ]
    }

    pub fn violation(&self, x: &[f64], n: usize) -> f64 {
        x[pair_index(n, self.u, self.v)] - x[pair_index(n, self.u, self.w)] - x[pair_index(n, self.v, self.w)]
    }

    fn row(&self, n: usize) -> simplex::Row {
        [
            (pair_index(n, self.u, self.v), 1.0),
            (pair_index(n, self.u, self.w), -1.0),
            (pair_index(n, self.v, self.w), -1.0),
        ]
    }
}

/// Every triangle constraint on `n` vertices.
pub fn all_triangles(n: usize) -> Vec<TriangleConstraint> {
    let mut out = Vec::with_capacity(3 * triple_count(n));
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.extend(TriangleConstraint::orientations(a, b, c));
            }
        }
    }
    out
}

pub fn triple_count(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    n: usize,
    x: Vec<f64>,
    pub objective: f64,
    pub is_vertex: bool,
    pub tolerance: f64,
}

impl LpSolution {
    /// Wraps marginals and recomputes the objective.
    pub fn from_values(inst: &CCInstance, x: Vec<f64>, tolerance: f64) -> Result<Self> {
        if x.len() != inst.num_pairs() {
            return Err(Error::LengthMismatch {
                expected: inst.num_pairs(),
                actual: x.len(),
            });
        }
        let objective = lp_objective(inst, &x);
        Ok(Self {
            n: inst.n(),
            x,
            objective,
            is_vertex: false,
            tolerance,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.x[pair_index(self.n, u, v)]
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }
}

pub fn lp_objective(inst: &CCInstance, x: &[f64]) -> f64 {
    (0..inst.num_pairs())
        .map(|i| inst.lp_coefficient(i) * x[i])
        .sum::<f64>()
        + inst.negative_weight()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CuttingPlaneTrace {
    pub iterations: usize,
    pub objective_per_iteration: Vec<f64>,
    pub working_set_size_final: usize,
    /// Working-set triangles tight at the final solution.
    pub active_triangles: usize,
    /// Rank of the tight bounds plus tight working-set triangles.
    pub active_rank: usize,
    pub total_triangles: usize,
    /// Triangles tight at the final solution over the full constraint set.
    pub tight_triangles_full: usize,
    pub tight_bounds: usize,
    pub simplex_iterations: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("simplex stopped after {iterations} iterations without reaching optimality")]
    NumericalFailure {
        iterations: usize,
        best: Box<LpSolution>,
    },
    #[error("cutting-plane loop did not converge within {rounds} rounds")]
    NonConvergence {
        rounds: usize,
        trace: Box<CuttingPlaneTrace>,
    },
}

fn iteration_cap(d: usize, r: usize) -> usize {
    50 * (d + r) + 10_000
}

fn run_simplex(inst: &CCInstance, s: &mut DualSimplex, tol: f64) -> Result<()> {
    let settings = Settings::with_tol(tol, iteration_cap(inst.num_pairs(), s.num_rows()) + s.iterations);
    match s.solve(&settings) {
        Status::Optimal => Ok(()),
        Status::IterationLimit | Status::Breakdown => {
            let best = LpSolution::from_values(inst, s.structural_values(), tol)?;
            Err(LpError::NumericalFailure {
                iterations: s.iterations,
                best: Box::new(best),
            }
            .into())
        }
    }
}

fn extract(inst: &CCInstance, s: &DualSimplex, tol: f64) -> LpSolution {
    let x = s.structural_values();
    LpSolution {
        n: inst.n(),
        objective: lp_objective(inst, &x),
        x,
        is_vertex: true,
        tolerance: tol,
    }
}

fn costs(inst: &CCInstance) -> Vec<f64> {
    (0..inst.num_pairs()).map(|i| inst.lp_coefficient(i)).collect()
}

/// Optimal vertex of the LP restricted to box bounds and `constraints`.
pub fn solve_restricted(inst: &CCInstance, constraints: &[TriangleConstraint], tol: f64) -> Result<LpSolution> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let n = inst.n();
    check_constraints(n, constraints)?;
    let mut s = DualSimplex::new(costs(inst));
    let unique: Vec<TriangleConstraint> = {
        let mut seen = HashSet::new();
        constraints.iter().copied().filter(|t| seen.insert(*t)).collect()
    };
    let rows: Vec<_> = unique.iter().map(|t| t.row(n)).collect();
    s.add_rows(&rows);
    run_simplex(inst, &mut s, tol)?;
    Ok(extract(inst, &s, tol))
}

fn check_constraints(n: usize, constraints: &[TriangleConstraint]) -> Result<()> {
    for t in constraints {
        if t.u >= t.v || t.v >= n || t.w >= n || t.w == t.u || t.w == t.v {
            return Err(Error::Parameter(format!("invalid triangle {t:?} for n={n}")));
        }
    }
    Ok(())
}

/// Violated triangles (violation above `tol`), most violated first, at most `top_k`.
pub fn separation_oracle(x: &LpSolution, tol: f64, top_k: usize) -> Result<Vec<(TriangleConstraint, f64)>> {
    if top_k == 0 {
        return Err(Error::Parameter("top_k must be at least 1".into()));
    }
    let n = x.n;
    let xs = &x.x;
    let scan = |a: usize| {
        let mut found = Vec::new();
        for b in a + 1..n {
            let xab = xs[pair_index(n, a, b)];
            for c in b + 1..n {
                let xac = xs[pair_index(n, a, c)];
                let xbc = xs[pair_index(n, b, c)];
                let [t0, t1, t2] = TriangleConstraint::orientations(a, b, c);
                for (t, v) in [(t0, xab - xac - xbc), (t1, xac - xab - xbc), (t2, xbc - xab - xac)] {
                    if v > tol {
                        found.push((t, v));
                    }
                }
            }
        }
        found
    };
    let mut all: Vec<(TriangleConstraint, f64)> = if n >= 40 {
        (0..n).into_par_iter().flat_map_iter(scan).collect()
    } else {
        (0..n).flat_map(scan).collect()
    };
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    all.truncate(top_k);
    Ok(all)
}

/// Triangles whose weight slack `w_uw + w_vw - w_uv` is at most `gamma`.
pub fn warm_start_constraints(inst: &CCInstance, gamma: f64) -> Vec<TriangleConstraint> {
    let n = inst.n();
    all_triangles(n)
        .into_iter()
        .filter(|t| inst.weight(t.u, t.w) + inst.weight(t.v, t.w) - inst.weight(t.u, t.v) <= gamma)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CuttingPlaneOptions {
    pub tol: f64,
    pub separation_tol: f64,
    pub top_k: usize,
    pub warm_start: Option<f64>,
    /// Defaults to `10 * (n choose 2)` when `None`.
    pub max_rounds: Option<usize>,
    /// Drop working-set rows that are slack at the current optimum before adding cuts.
    pub purge: bool,
}

impl Default for CuttingPlaneOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            separation_tol: DEFAULT_SEPARATION_TOL,
            top_k: DEFAULT_TOP_K,
            warm_start: None,
            max_rounds: None,
            purge: false,
        }
    }
}

/// Solves the full LP by lazily adding violated triangles.
pub fn cutting_plane_solve(inst: &CCInstance, opts: &CuttingPlaneOptions) -> Result<(LpSolution, CuttingPlaneTrace)> {
    if !(opts.tol > 0.0) || !(opts.separation_tol > 0.0) || opts.top_k == 0 {
        return Err(Error::Parameter(format!("invalid cutting-plane options {opts:?}")));
    }
    let n = inst.n();
    let max_rounds = opts.max_rounds.unwrap_or(10 * pair_count(n)).max(1);
    let mut s = DualSimplex::new(costs(inst));
    let mut working: Vec<TriangleConstraint> = Vec::new();
    let mut present: HashSet<TriangleConstraint> = HashSet::new();
    if let Some(gamma) = opts.warm_start {
        let ws = warm_start_constraints(inst, gamma);
        let rows: Vec<_> = ws.iter().map(|t| t.row(n)).collect();
        s.add_rows(&rows);
        present.extend(ws.iter().copied());
        working = ws;
    }
    let mut trace = CuttingPlaneTrace {
        total_triangles: 3 * triple_count(n),
        ..Default::default()
    };
    loop {
        run_simplex(inst, &mut s, opts.tol)?;
        let sol = extract(inst, &s, opts.tol);
        trace.iterations += 1;
        trace.objective_per_iteration.push(sol.objective);
        let violated = separation_oracle(&sol, opts.separation_tol, usize::MAX)?;
        if violated.is_empty() {
            trace.simplex_iterations = s.iterations;
            finish_trace(inst, &sol, &working, opts.separation_tol, &mut trace);
            return Ok((sol, trace));
        }
        if trace.iterations >= max_rounds {
            trace.simplex_iterations = s.iterations;
            trace.working_set_size_final = working.len();
            return Err(LpError::NonConvergence {
                rounds: trace.iterations,
                trace: Box::new(trace),
            }
            .into());
        }
        if opts.purge {
            let keep = s.purge_slack_rows(opts.separation_tol);
            let mut it = keep.iter();
            working.retain(|t| {
                let k = *it.next().unwrap();
                if !k {
                    present.remove(t);
                }
                k
            });
        }
        let fresh: Vec<TriangleConstraint> = violated
            .iter()
            .map(|(t, _)| *t)
            .filter(|t| !present.contains(t))
            .take(opts.top_k)
            .collect();
        if fresh.is_empty() {
            let best = Box::new(sol);
            return Err(LpError::NumericalFailure {
                iterations: s.iterations,
                best,
            }
            .into());
        }
        let rows: Vec<_> = fresh.iter().map(|t| t.row(n)).collect();
        s.add_rows(&rows);
        present.extend(fresh.iter().copied());
        working.extend(fresh);
    }
}

fn finish_trace(
    inst: &CCInstance,
    sol: &LpSolution,
    working: &[TriangleConstraint],
    tol: f64,
    trace: &mut CuttingPlaneTrace,
) {
    let n = inst.n();
    trace.working_set_size_final = working.len();
    let tight: Vec<&TriangleConstraint> = working
        .iter()
        .filter(|t| t.violation(&sol.x, n).abs() <= tol)
        .collect();
    trace.active_triangles = tight.len();
    let mut basis = EchelonBasis::new(inst.num_pairs(), RANK_PIVOT_THRESHOLD * 3f64.sqrt());
    let mut bounds = 0;
    for (i, &xi) in sol.x.iter().enumerate() {
        if xi <= tol || xi >= 1.0 - tol {
            bounds += 1;
            basis.insert(&[(i, 1.0)]);
        }
    }
    trace.tight_bounds = bounds;
    for t in tight {
        if basis.is_full() {
            break;
        }
        basis.insert(&t.row(n));
    }
    trace.active_rank = basis.rank();
    trace.tight_triangles_full = all_triangles(n)
        .iter()
        .filter(|t| t.violation(&sol.x, n).abs() <= tol)
        .count();
}

/// Counts tight triangles and tight bounds at `x` and the rank of those rows.
pub fn active_constraint_rank(inst: &CCInstance, x: &LpSolution, tol: f64) -> Result<(usize, usize)> {
    let n = inst.n();
    if x.n != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: x.n,
        });
    }
    if let Some(&bad) = x.x.iter().find(|&&v| v < -tol || v > 1.0 + tol) {
        return Err(Error::Precondition(format!("x = {bad} outside [0, 1]")));
    }
    if let Some((t, v)) = separation_oracle(x, tol, 1)?.first() {
        return Err(Error::Precondition(format!("triangle {t:?} violated by {v}")));
    }
    let mut basis = EchelonBasis::new(inst.num_pairs(), RANK_PIVOT_THRESHOLD * 3f64.sqrt());
    let mut count = 0;
    for (i, &xi) in x.x.iter().enumerate() {
        if xi <= tol {
            count += 1;
            basis.insert(&[(i, 1.0)]);
        }
        if xi >= 1.0 - tol {
            count += 1;
            basis.insert(&[(i, 1.0)]);
        }
    }
    for t in all_triangles(n) {
        if t.violation(&x.x, n).abs() <= tol {
            count += 1;
            if !basis.is_full() {
                basis.insert(&t.row(n));
            }
        }
    }
    Ok((count, basis.rank()))
}

/// Writes `u,v,x` lines followed by the summary trailer.
pub fn write_solution_dump<W: Write>(mut out: W, sol: &LpSolution, trace: &CuttingPlaneTrace) -> std::io::Result<()> {
    for (idx, (u, v)) in pairs(sol.n).enumerate() {
        writeln!(out, "{u},{v},{}", sol.x[idx])?;
    }
    writeln!(
        out,
        "objective={} iterations={} active={} rank={}",
        sol.objective, trace.iterations, trace.active_triangles, trace.active_rank
    )
}
