//! Bounded-variable dual simplex for the restricted correlation-clustering LP.
//!
//! Structural variables `x_j` lie in `[0, 1]`. Every constraint row has the
//! form `a·x + s = 0` with slack `s >= 0`, where `a` has one `+1` entry (the
//! apex pair) and two `-1` entries (the legs). The starting basis is made of
//! the slacks with every structural at the bound its cost prefers, which is
//! dual feasible for any row set, so no phase one is needed. Rows can be
//! appended between solves with their slack basic, which keeps the current
//! basis dual feasible and warm-starts the next solve.
//!
//! The basis inverse is stored densely (row = basis position, column =
//! constraint row) and updated in product form, with periodic
//! refactorization.

pub(crate) type Row = [(usize, f64); 3];

const NONBASIC: usize = usize::MAX;
const DEGENERATE_RUN_FOR_BLAND: usize = 50;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Settings {
    pub primal_tol: f64,
    pub dual_tol: f64,
    pub pivot_tol: f64,
    pub max_iterations: usize,
    pub refactor_every: usize,
}

impl Settings {
    pub fn with_tol(tol: f64, max_iterations: usize) -> Self {
        Self {
            primal_tol: tol,
            dual_tol: 1e-9,
            pivot_tol: 1e-9,
            max_iterations,
            refactor_every: 400,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Status {
    Optimal,
    IterationLimit,
    /// No entering candidate or singular basis even after refactorization.
    Breakdown,
}

pub(crate) struct DualSimplex {
    d: usize,
    cost: Vec<f64>,
    rows: Vec<Row>,
    col_rows: Vec<Vec<usize>>,
    basis: Vec<usize>,
    position: Vec<usize>,
    at_upper: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    /// Squared norms of the rows of the basis inverse (dual steepest edge weights).
    weights: Vec<f64>,
    reduced: Vec<f64>,
    since_refactor: usize,
    since_refresh: usize,
    pub iterations: usize,
    // scratch
    alpha: Vec<f64>,
    column: Vec<f64>,
}

impl DualSimplex {
    pub fn new(cost: Vec<f64>) -> Self {
        let d = cost.len();
        Self {
            d,
            at_upper: cost.iter().map(|&c| c < 0.0).collect(),
            reduced: cost.clone(),
            cost,
            rows: Vec::new(),
            col_rows: vec![Vec::new(); d],
            basis: Vec::new(),
            position: vec![NONBASIC; d],
            binv: Vec::new(),
            xb: Vec::new(),
            weights: Vec::new(),
            since_refactor: 0,
            since_refresh: 0,
            iterations: 0,
            alpha: vec![0.0; d],
            column: Vec::new(),
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn r(&self) -> usize {
        self.rows.len()
    }

    fn upper_bound(&self, var: usize) -> f64 {
        if var < self.d {
            1.0
        } else {
            f64::INFINITY
        }
    }

    fn coef(&self, row: usize, var: usize) -> f64 {
        self.rows[row]
            .iter()
            .filter(|(j, _)| *j == var)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn value(&self, var: usize) -> f64 {
        match self.position[var] {
            NONBASIC if var < self.d && self.at_upper[var] => 1.0,
            NONBASIC => 0.0,
            p => self.xb[p],
        }
    }

    /// Current structural values, clamped into `[0, 1]`.
    pub fn structural_values(&self) -> Vec<f64> {
        (0..self.d).map(|j| self.value(j).clamp(0.0, 1.0)).collect()
    }

    /// Appends rows with their slacks basic.
    pub fn add_rows(&mut self, new_rows: &[Row]) {
        if new_rows.is_empty() {
            return;
        }
        let r0 = self.r();
        let r1 = r0 + new_rows.len();
        let mut binv = vec![0.0; r1 * r1];
        for p in 0..r0 {
            binv[p * r1..p * r1 + r0].copy_from_slice(&self.binv[p * r0..(p + 1) * r0]);
        }
        for (t, row) in new_rows.iter().enumerate() {
            let pos = r0 + t;
            let i = r0 + t;
            let mut xs = 0.0;
            for &(j, c) in row {
                xs -= c * self.value(j);
                let q = self.position[j];
                if q != NONBASIC {
                    for col in 0..r0 {
                        binv[pos * r1 + col] -= c * self.binv[q * r0 + col];
                    }
                }
            }
            binv[pos * r1 + i] = 1.0;
            self.xb.push(xs);
            self.basis.push(self.d + i);
        }
        for pos in r0..r1 {
            self.weights.push(norm2(&binv[pos * r1..(pos + 1) * r1]));
        }
        self.binv = binv;
        for (t, row) in new_rows.iter().enumerate() {
            let i = r0 + t;
            self.rows.push(*row);
            for &(j, _) in row {
                self.col_rows[j].push(i);
            }
            self.position.push(r0 + t);
            self.reduced.push(0.0);
        }
    }

    /// Drops rows whose slack is basic and strictly positive. Returns the keep mask.
    pub fn purge_slack_rows(&mut self, tol: f64) -> Vec<bool> {
        let r = self.r();
        let keep: Vec<bool> = (0..r)
            .map(|i| {
                let p = self.position[self.d + i];
                p == NONBASIC || self.xb[p] <= tol
            })
            .collect();
        if keep.iter().all(|&k| k) {
            return keep;
        }
        let drop_pos: Vec<bool> = {
            let mut v = vec![false; r];
            for i in 0..r {
                if !keep[i] {
                    v[self.position[self.d + i]] = true;
                }
            }
            v
        };
        let mut row_map = vec![NONBASIC; r];
        let mut next = 0;
        for i in 0..r {
            if keep[i] {
                row_map[i] = next;
                next += 1;
            }
        }
        let r1 = next;
        let mut binv = Vec::with_capacity(r1 * r1);
        let mut basis = Vec::with_capacity(r1);
        let mut xb = Vec::with_capacity(r1);
        let mut weights = Vec::with_capacity(r1);
        for p in 0..r {
            if drop_pos[p] {
                continue;
            }
            binv.extend((0..r).filter(|&i| keep[i]).map(|i| self.binv[p * r + i]));
            let var = self.basis[p];
            basis.push(if var < self.d { var } else { self.d + row_map[var - self.d] });
            xb.push(self.xb[p]);
            weights.push(norm2(&binv[binv.len() - r1..]));
        }
        let rows: Vec<Row> = (0..r).filter(|&i| keep[i]).map(|i| self.rows[i]).collect();
        let mut reduced = self.reduced[..self.d].to_vec();
        reduced.extend((0..r).filter(|&i| keep[i]).map(|i| self.reduced[self.d + i]));

        self.binv = binv;
        self.basis = basis;
        self.xb = xb;
        self.weights = weights;
        self.rows = rows;
        self.reduced = reduced;
        self.position = vec![NONBASIC; self.d + r1];
        for (p, &var) in self.basis.iter().enumerate() {
            self.position[var] = p;
        }
        for c in &mut self.col_rows {
            c.clear();
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                self.col_rows[j].push(i);
            }
        }
        keep
    }

    /// `B^{-1} a_var` into `self.column`.
    fn compute_column(&mut self, var: usize) {
        let r = self.r();
        self.column.clear();
        self.column.resize(r, 0.0);
        if var < self.d {
            for &i in &self.col_rows[var] {
                let c = self.coef(i, var);
                for k in 0..r {
                    self.column[k] += c * self.binv[k * r + i];
                }
            }
        } else {
            let i = var - self.d;
            for k in 0..r {
                self.column[k] = self.binv[k * r + i];
            }
        }
    }

    /// Rebuilds the basis inverse, basic values and reduced costs from scratch.
    fn refactor(&mut self) -> bool {
        let r = self.r();
        self.since_refactor = 0;
        if r == 0 {
            return true;
        }
        // augmented [B | I], rows = constraint rows, columns = basis positions
        let w = 2 * r;
        let mut m = vec![0.0; r * w];
        for (p, &var) in self.basis.iter().enumerate() {
            if var < self.d {
                for &i in &self.col_rows[var] {
                    m[i * w + p] += self.coef(i, var);
                }
            } else {
                m[(var - self.d) * w + p] = 1.0;
            }
        }
        for i in 0..r {
            m[i * w + r + i] = 1.0;
        }
        let mut nz = Vec::with_capacity(w);
        for c in 0..r {
            let (mut best, mut best_row) = (0.0, c);
            for i in c..r {
                let a = m[i * w + c].abs();
                if a > best {
                    best = a;
                    best_row = i;
                }
            }
            if best < 1e-11 {
                return false;
            }
            if best_row != c {
                for k in 0..w {
                    m.swap(c * w + k, best_row * w + k);
                }
            }
            let inv = 1.0 / m[c * w + c];
            for k in 0..w {
                m[c * w + k] *= inv;
            }
            let (head, tail) = m.split_at_mut(c * w);
            let (pivot_row, rest) = tail.split_at_mut(w);
            nz.clear();
            nz.extend((0..w).filter(|&k| pivot_row[k] != 0.0));
            for row in head.chunks_exact_mut(w).chain(rest.chunks_exact_mut(w)) {
                let f = row[c];
                if f != 0.0 {
                    for &k in &nz {
                        row[k] -= f * pivot_row[k];
                    }
                }
            }
        }
        // after reduction, row p of the right block is row p of B^{-1}
        for p in 0..r {
            self.binv[p * r..(p + 1) * r].copy_from_slice(&m[p * w + r..(p + 1) * w]);
            self.weights[p] = norm2(&self.binv[p * r..(p + 1) * r]);
        }
        self.refresh();
        true
    }

    /// Recomputes basic values and reduced costs from the current inverse.
    fn refresh(&mut self) {
        let r = self.r();
        self.since_refresh = 0;
        // x_B = B^{-1} (-N x_N)
        let mut rhs = vec![0.0; r];
        for j in 0..self.d {
            if self.position[j] == NONBASIC && self.at_upper[j] {
                for &i in &self.col_rows[j] {
                    rhs[i] -= self.coef(i, j);
                }
            }
        }
        for p in 0..r {
            let row = &self.binv[p * r..(p + 1) * r];
            self.xb[p] = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
        }

        // y = c_B^T B^{-1}
        let mut y = vec![0.0; r];
        for (p, &var) in self.basis.iter().enumerate() {
            if var < self.d && self.cost[var] != 0.0 {
                let c = self.cost[var];
                for i in 0..r {
                    y[i] += c * self.binv[p * r + i];
                }
            }
        }
        for j in 0..self.d {
            self.reduced[j] = if self.position[j] == NONBASIC {
                self.cost[j]
                    - self.col_rows[j]
                        .iter()
                        .map(|&i| y[i] * self.coef(i, j))
                        .sum::<f64>()
            } else {
                0.0
            };
        }
        for i in 0..r {
            self.reduced[self.d + i] = if self.position[self.d + i] == NONBASIC {
                -y[i]
            } else {
                0.0
            };
        }
    }

    fn choose_leaving(&self, tol: f64, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for (p, &x) in self.xb.iter().enumerate() {
            let var = self.basis[p];
            let up = self.upper_bound(var);
            let delta = if x < -tol {
                x
            } else if x > up + tol {
                x - up
            } else {
                continue;
            };
            if bland {
                if best.is_none_or(|(bp, _)| var < self.basis[bp]) {
                    best = Some((p, delta));
                }
            } else if delta * delta / self.weights[p] > best_score {
                best_score = delta * delta / self.weights[p];
                best = Some((p, delta));
            }
        }
        best
    }

    pub fn solve(&mut self, settings: &Settings) -> Status {
        let mut degenerate_run = 0usize;
        let mut retried = false;
        loop {
            if self.since_refactor >= settings.refactor_every && !self.refactor() {
                return Status::Breakdown;
            }
            let bland = degenerate_run >= DEGENERATE_RUN_FOR_BLAND;
            let Some((p, delta)) = self.choose_leaving(settings.primal_tol, bland) else {
                if self.since_refresh > 0 {
                    self.refresh();
                    if self.choose_leaving(settings.primal_tol, false).is_some() {
                        continue;
                    }
                }
                return Status::Optimal;
            };
            if self.iterations >= settings.max_iterations {
                return Status::IterationLimit;
            }
            self.iterations += 1;
            self.since_refactor += 1;
            self.since_refresh += 1;

            let r = self.r();
            let d = self.d;
            // pivot row alpha_j = (e_p^T B^{-1}) a_j for structurals; slack j = d + i has alpha = rho_i
            self.alpha.iter_mut().for_each(|a| *a = 0.0);
            for i in 0..r {
                let rho = self.binv[p * r + i];
                if rho != 0.0 {
                    for &(j, c) in &self.rows[i] {
                        self.alpha[j] += rho * c;
                    }
                }
            }
            let alpha_of = |s: &Self, j: usize| -> f64 {
                if j < d {
                    s.alpha[j]
                } else {
                    s.binv[p * r + (j - d)]
                }
            };
            let s_dir = if delta < 0.0 { -1.0 } else { 1.0 };

            // Harris two-pass ratio test (plain min-ratio with index ties in Bland mode)
            let candidates = (0..d + r).filter(|&j| self.position[j] == NONBASIC);
            let mut theta_max = f64::INFINITY;
            let mut cand: Vec<(usize, f64, f64)> = Vec::new();
            for j in candidates {
                let a = alpha_of(self, j);
                if a.abs() <= settings.pivot_tol {
                    continue;
                }
                let dir = if j < d && self.at_upper[j] { -1.0 } else { 1.0 };
                if s_dir * dir * a <= 0.0 {
                    continue;
                }
                let dj = (dir * self.reduced[j]).max(0.0);
                cand.push((j, dj, a.abs()));
                theta_max = theta_max.min((dj + settings.dual_tol) / a.abs());
            }
            if cand.is_empty() {
                if !retried && self.refactor() {
                    retried = true;
                    continue;
                }
                return Status::Breakdown;
            }
            let q = if bland {
                let min_ratio = cand
                    .iter()
                    .map(|&(_, dj, a)| dj / a)
                    .fold(f64::INFINITY, f64::min);
                cand.iter()
                    .filter(|&&(_, dj, a)| dj / a <= min_ratio + 1e-12)
                    .map(|&(j, _, _)| j)
                    .min()
                    .unwrap()
            } else {
                cand.iter()
                    .filter(|&&(_, dj, a)| dj / a <= theta_max)
                    .max_by(|x, y| x.2.total_cmp(&y.2).then(y.0.cmp(&x.0)))
                    .map(|&(j, _, _)| j)
                    .unwrap()
            };
            drop(cand);

            let alpha_q = alpha_of(self, q);
            self.compute_column(q);
            let pivot = self.column[p];
            if (pivot - alpha_q).abs() > 1e-7 * (1.0 + alpha_q.abs()) || pivot.abs() <= settings.pivot_tol {
                // inverse has drifted; rebuild and retry this iteration
                if !self.refactor() {
                    return Status::Breakdown;
                }
                continue;
            }
            retried = false;

            // dual update
            let theta_d = self.reduced[q] / pivot;
            if theta_d.abs() <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            if theta_d != 0.0 {
                for j in 0..d + r {
                    if self.position[j] == NONBASIC {
                        let a = alpha_of(self, j);
                        if a != 0.0 {
                            self.reduced[j] -= theta_d * a;
                        }
                    }
                }
            }
            let leaving = self.basis[p];
            self.reduced[q] = 0.0;
            self.reduced[leaving] = -theta_d;

            // primal update
            let theta_p = delta / pivot;
            let xq = self.value(q) + theta_p;
            for k in 0..r {
                let c = self.column[k];
                if c != 0.0 {
                    self.xb[k] -= theta_p * c;
                }
            }
            self.xb[p] = xq;
            self.basis[p] = q;
            self.position[q] = p;
            self.position[leaving] = NONBASIC;
            if leaving < d {
                self.at_upper[leaving] = delta > 0.0;
            }

            // basis inverse update
            let inv = 1.0 / pivot;
            for i in 0..r {
                self.binv[p * r + i] *= inv;
            }
            let pivot_row: Vec<f64> = self.binv[p * r..(p + 1) * r].to_vec();
            self.weights[p] = norm2(&pivot_row);
            let nz: Vec<usize> = (0..r).filter(|&i| pivot_row[i] != 0.0).collect();
            for k in 0..r {
                let c = self.column[k];
                if k == p || c == 0.0 {
                    continue;
                }
                let row = &mut self.binv[k * r..(k + 1) * r];
                for &i in &nz {
                    row[i] -= c * pivot_row[i];
                }
                self.weights[k] = norm2(row).max(1e-12);
            }

            // boxed nonbasics whose reduced cost drifted to the wrong sign switch bounds
            for j in 0..d {
                if self.position[j] != NONBASIC {
                    continue;
                }
                let wrong = if self.at_upper[j] {
                    self.reduced[j] > settings.dual_tol
                } else {
                    self.reduced[j] < -settings.dual_tol
                };
                if wrong {
                    let step = if self.at_upper[j] { -1.0 } else { 1.0 };
                    self.at_upper[j] = !self.at_upper[j];
                    self.compute_column(j);
                    for k in 0..r {
                        self.xb[k] -= step * self.column[k];
                    }
                }
            }
        }
    }

    /// Largest violation of dual feasibility among nonbasic slacks.
    #[cfg(test)]
    pub fn dual_infeasibility(&self) -> f64 {
        (0..self.r())
            .filter(|&i| self.position[self.d + i] == NONBASIC)
            .map(|i| (-self.reduced[self.d + i]).max(0.0))
            .fold(0.0, f64::max)
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}
