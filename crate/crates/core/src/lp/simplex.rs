//! Two-phase revised simplex with an explicit dense basis inverse.
//!
//! Entering columns are chosen by Dantzig's rule; after a run of degenerate
//! pivots the solver switches to Bland's rule until the objective moves again,
//! which rules out cycling. The inverse is rebuilt from scratch periodically
//! and once more before the solution is extracted.
//!
//! A warm start installs a previous basis. Basic variables that come out
//! negative (typically the slacks of freshly added rows) are swapped for
//! artificial copies of their negated columns, and phase 1 starts from there.

use super::{BackendInfo, LpBackend, LpError, LpProblem, LpSolution, RowSense, WarmStart};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct BuiltinSimplex {
    pub max_nonzeros: usize,
    pub max_rows: usize,
    pub refactor_every: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland.
    pub degenerate_limit: usize,
}

impl Default for BuiltinSimplex {
    fn default() -> Self {
        BuiltinSimplex {
            max_nonzeros: 2_000_000,
            max_rows: 4_000,
            refactor_every: 200,
            degenerate_limit: 50,
        }
    }
}

impl<T: Scalar> LpBackend<T> for BuiltinSimplex {
    fn info(&self) -> BackendInfo {
        BackendInfo {
            warm_start: true,
            method: "builtin revised simplex",
        }
    }

    fn solve(&self, lp: &LpProblem<T>) -> Result<LpSolution<T>, LpError> {
        self.solve_warm(lp, None).map(|(s, _)| s)
    }

    fn solve_warm(
        &self,
        lp: &LpProblem<T>,
        start: Option<&WarmStart>,
    ) -> Result<(LpSolution<T>, Option<WarmStart>), LpError> {
        if lp.nnz() > self.max_nonzeros {
            return Err(LpError::TooLarge {
                backend: "builtin simplex",
                what: "nonzeros",
                size: lp.nnz(),
                limit: self.max_nonzeros,
            });
        }
        if lp.num_rows() > self.max_rows {
            return Err(LpError::TooLarge {
                backend: "builtin simplex",
                what: "rows",
                size: lp.num_rows(),
                limit: self.max_rows,
            });
        }
        if let Some(start) = start {
            let mut t = Tableau::new(lp, self);
            if t.install(start) {
                return t.run();
            }
            log::trace!("warm start rejected; solving from scratch");
        }
        Tableau::new(lp, self).run()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau<'a, T> {
    opts: &'a BuiltinSimplex,
    m: usize,
    n_struct: usize,
    /// Sparse columns in the sign-normalised row space.
    cols: Vec<Vec<(usize, T)>>,
    kinds: Vec<Kind>,
    cost: Vec<T>,
    b: Vec<T>,
    flipped: Vec<bool>,
    /// Column of each row's logical variable, if it has one.
    logical: Vec<Option<usize>>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<T>,
    x_b: Vec<T>,
    iterations: usize,
    since_refactor: usize,
}

enum Step<T> {
    Optimal,
    Pivoted { theta: T },
}

impl<'a, T: Scalar> Tableau<'a, T> {
    fn new(lp: &LpProblem<T>, opts: &'a BuiltinSimplex) -> Self {
        let m = lp.num_rows();
        let n_struct = lp.num_cols();
        let flipped: Vec<bool> = lp.rhs.iter().map(|&b| b < T::zero()).collect();
        let sign = |i: usize| if flipped[i] { -T::one() } else { T::one() };
        let mut cols: Vec<Vec<(usize, T)>> = Vec::with_capacity(n_struct + 2 * m);
        let mut kinds = Vec::with_capacity(n_struct + 2 * m);
        let mut cost = Vec::with_capacity(n_struct + 2 * m);
        for (j, col) in lp.columns.iter().enumerate() {
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(col.len());
            let mut sorted = col.clone();
            sorted.sort_by_key(|&(i, _)| i);
            for (i, v) in sorted {
                match merged.last_mut() {
                    Some((r, acc)) if *r == i => *acc = *acc + v * sign(i),
                    _ => merged.push((i, v * sign(i))),
                }
            }
            merged.retain(|&(_, v)| v != T::zero());
            cols.push(merged);
            kinds.push(Kind::Structural);
            cost.push(lp.objective[j]);
        }
        let b: Vec<T> = lp.rhs.iter().enumerate().map(|(i, &v)| v * sign(i)).collect();
        let mut basis = vec![usize::MAX; m];
        let mut logical = vec![None; m];
        for i in 0..m {
            let sense = match (lp.senses[i], flipped[i]) {
                (RowSense::Le, true) => RowSense::Ge,
                (RowSense::Ge, true) => RowSense::Le,
                (s, _) => s,
            };
            match sense {
                RowSense::Le => {
                    cols.push(vec![(i, T::one())]);
                    kinds.push(Kind::Slack);
                    cost.push(T::zero());
                    basis[i] = cols.len() - 1;
                    logical[i] = Some(cols.len() - 1);
                }
                RowSense::Ge => {
                    cols.push(vec![(i, -T::one())]);
                    kinds.push(Kind::Slack);
                    cost.push(T::zero());
                    logical[i] = Some(cols.len() - 1);
                }
                RowSense::Eq => {}
            }
        }
        for (i, slot) in basis.iter_mut().enumerate() {
            if *slot == usize::MAX {
                cols.push(vec![(i, T::one())]);
                kinds.push(Kind::Artificial);
                cost.push(T::zero());
                *slot = cols.len() - 1;
            }
        }
        let mut in_basis = vec![false; cols.len()];
        for &j in &basis {
            in_basis[j] = true;
        }
        let mut binv = vec![T::zero(); m * m];
        for i in 0..m {
            binv[i * m + i] = T::one();
        }
        Tableau {
            opts,
            m,
            n_struct,
            x_b: b.clone(),
            cols,
            kinds,
            cost,
            b,
            flipped,
            logical,
            basis,
            in_basis,
            binv,
            iterations: 0,
            since_refactor: 0,
        }
    }

    /// Replaces the slack/artificial starting basis by `start`. Returns false,
    /// leaving the tableau untouched, if `start` is not a basis of this LP.
    fn install(&mut self, start: &WarmStart) -> bool {
        let m = self.m;
        let mut basis = Vec::with_capacity(m);
        let mut used = vec![false; self.cols.len()];
        let candidates = start
            .basic_columns
            .iter()
            .map(|&j| (j < self.n_struct).then_some(j))
            .chain(start.basic_logicals.iter().map(|&i| self.logical.get(i).copied().flatten()));
        for j in candidates {
            match j {
                Some(j) if !used[j] => {
                    used[j] = true;
                    basis.push(j);
                }
                _ => return false,
            }
        }
        if basis.len() != m {
            return false;
        }
        let saved = (
            std::mem::replace(&mut self.basis, basis),
            std::mem::take(&mut self.in_basis),
            std::mem::take(&mut self.binv),
            std::mem::take(&mut self.x_b),
        );
        self.in_basis = used;
        self.binv = vec![T::zero(); m * m];
        self.x_b = vec![T::zero(); m];
        if self.refactor().is_err() {
            (self.basis, self.in_basis, self.binv, self.x_b) = saved;
            return false;
        }
        // negative basic values: swap in an artificial equal to the negated
        // column, which carries the same value with the opposite sign
        let tol = self.feas_tol();
        for r in 0..m {
            if self.x_b[r] >= -tol {
                continue;
            }
            let j = self.basis[r];
            let negated = self.cols[j].iter().map(|&(i, v)| (i, -v)).collect();
            self.cols.push(negated);
            self.kinds.push(Kind::Artificial);
            self.cost.push(T::zero());
            self.in_basis[j] = false;
            self.in_basis.push(true);
            self.basis[r] = self.cols.len() - 1;
            self.x_b[r] = -self.x_b[r];
            for v in &mut self.binv[r * m..(r + 1) * m] {
                *v = -*v;
            }
        }
        if self.x_b.iter().any(|&v| v < T::zero()) {
            // tiny negatives within tolerance
            self.x_b.iter_mut().for_each(|v| *v = v.max(T::zero()));
        }
        true
    }

    fn feas_tol(&self) -> T {
        T::of(T::FEAS_TOL)
    }

    fn pivot_tol(&self) -> T {
        T::of(T::PIVOT_TOL)
    }

    fn run(mut self) -> Result<(LpSolution<T>, Option<WarmStart>), LpError> {
        let has_artificial = self.basis.iter().any(|&j| self.kinds[j] == Kind::Artificial);
        if has_artificial {
            let phase1: Vec<T> = self
                .kinds
                .iter()
                .map(|&k| if k == Kind::Artificial { T::one() } else { T::zero() })
                .collect();
            self.optimize(&phase1, true)?;
            let infeas: T = self
                .basis
                .iter()
                .zip(&self.x_b)
                .filter(|(&j, _)| self.kinds[j] == Kind::Artificial)
                .map(|(_, &v)| v)
                .sum();
            let scale = self.b.iter().fold(T::one(), |a, &v| a.max(v.abs()));
            if infeas > self.feas_tol() * scale * T::of(10.0) {
                return Err(LpError::Infeasible);
            }
            self.drive_out_artificials();
        }
        let phase2 = self.cost.clone();
        for _ in 0..3 {
            self.optimize(&phase2, false)?;
            self.refactor()?;
            if self.dual_feasible(&phase2) {
                break;
            }
        }
        self.extract(&phase2)
    }

    fn optimize(&mut self, cost: &[T], phase1: bool) -> Result<(), LpError> {
        let limit = 50 * (self.m + self.cols.len()) + 10_000;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            if self.iterations > limit {
                return Err(LpError::Numerical(format!("iteration limit {limit} reached")));
            }
            if self.since_refactor >= self.opts.refactor_every {
                self.refactor()?;
            }
            match self.step(cost, phase1, bland)? {
                Step::Optimal => return Ok(()),
                Step::Pivoted { theta } => {
                    if theta <= self.feas_tol() {
                        degenerate_run += 1;
                        if degenerate_run >= self.opts.degenerate_limit {
                            bland = true;
                        }
                    } else {
                        degenerate_run = 0;
                        bland = false;
                    }
                }
            }
        }
    }

    fn duals_for(&self, cost: &[T]) -> Vec<T> {
        let m = self.m;
        let mut y = vec![T::zero(); m];
        for (i, &j) in self.basis.iter().enumerate() {
            let cb = cost[j];
            if cb == T::zero() {
                continue;
            }
            let row = &self.binv[i * m..(i + 1) * m];
            for (yk, &bk) in y.iter_mut().zip(row) {
                *yk = *yk + cb * bk;
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[T], y: &[T]) -> T {
        self.cols[j]
            .iter()
            .fold(cost[j], |acc, &(i, v)| acc - y[i] * v)
    }

    fn ftran(&self, j: usize) -> Vec<T> {
        let m = self.m;
        let mut alpha = vec![T::zero(); m];
        for &(k, v) in &self.cols[j] {
            for (i, a) in alpha.iter_mut().enumerate() {
                let bik = self.binv[i * m + k];
                if bik != T::zero() {
                    *a = *a + bik * v;
                }
            }
        }
        alpha
    }

    fn step(&mut self, cost: &[T], phase1: bool, bland: bool) -> Result<Step<T>, LpError> {
        let y = self.duals_for(cost);
        let tol = self.feas_tol();
        let mut entering: Option<(usize, T)> = None;
        for j in 0..self.cols.len() {
            if self.in_basis[j] || (!phase1 && self.kinds[j] == Kind::Artificial) {
                continue;
            }
            let d = self.reduced_cost(j, cost, &y);
            if d < -tol * (T::one() + cost[j].abs()) {
                if bland {
                    entering = Some((j, d));
                    break;
                }
                // scale by column norm so long columns are not favoured
                let norm = self.cols[j].iter().fold(T::one(), |a, &(_, v)| a.max(v.abs()));
                let score = d / norm;
                if entering.map_or(true, |(_, s)| score < s) {
                    entering = Some((j, score));
                }
            }
        }
        let Some((q, _)) = entering else {
            return Ok(Step::Optimal);
        };
        let alpha = self.ftran(q);
        let ptol = self.pivot_tol();
        let mut leave: Option<(usize, T)> = None;
        for i in 0..self.m {
            if alpha[i] > ptol {
                let ratio = self.x_b[i].max(T::zero()) / alpha[i];
                let better = match leave {
                    None => true,
                    Some((r, best)) => {
                        if ratio < best - tol {
                            true
                        } else if ratio <= best + tol {
                            if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                alpha[i] > alpha[r]
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, theta)) = leave else {
            if phase1 {
                return Err(LpError::Numerical("unbounded ray in phase 1".into()));
            }
            return Err(LpError::Unbounded);
        };
        self.pivot(q, r, &alpha, theta);
        Ok(Step::Pivoted { theta })
    }

    fn pivot(&mut self, q: usize, r: usize, alpha: &[T], theta: T) {
        let m = self.m;
        for i in 0..m {
            if i != r && alpha[i] != T::zero() {
                self.x_b[i] = self.x_b[i] - theta * alpha[i];
                if self.x_b[i] < T::zero() && self.x_b[i] > -self.feas_tol() {
                    self.x_b[i] = T::zero();
                }
            }
        }
        self.x_b[r] = theta;
        let piv = alpha[r];
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (row_r, after) = rest.split_at_mut(m);
        for v in row_r.iter_mut() {
            *v = *v / piv;
        }
        for (i, row) in before.chunks_mut(m).enumerate() {
            let f = alpha[i];
            if f != T::zero() {
                for (a, &b) in row.iter_mut().zip(row_r.iter()) {
                    *a = *a - f * b;
                }
            }
        }
        for (k, row) in after.chunks_mut(m).enumerate() {
            let f = alpha[r + 1 + k];
            if f != T::zero() {
                for (a, &b) in row.iter_mut().zip(row_r.iter()) {
                    *a = *a - f * b;
                }
            }
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[q] = true;
        self.basis[r] = q;
        self.iterations += 1;
        self.since_refactor += 1;
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination with partial
    /// pivoting and recomputes the basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut a = vec![T::zero(); m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for &(i, v) in &self.cols[j] {
                a[i * m + k] = v;
            }
        }
        let mut inv = vec![T::zero(); m * m];
        for i in 0..m {
            inv[i * m + i] = T::one();
        }
        for c in 0..m {
            let (p, best) = (c..m)
                .map(|i| (i, a[i * m + c].abs()))
                .fold((c, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= T::of(T::PIVOT_TOL) * T::of(1e-3) {
                return Err(LpError::Numerical("singular basis during refactorization".into()));
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let piv = a[c * m + c];
            for k in 0..m {
                a[c * m + k] = a[c * m + k] / piv;
                inv[c * m + k] = inv[c * m + k] / piv;
            }
            for i in 0..m {
                if i == c {
                    continue;
                }
                let f = a[i * m + c];
                if f == T::zero() {
                    continue;
                }
                for k in 0..m {
                    a[i * m + k] = a[i * m + k] - f * a[c * m + k];
                    inv[i * m + k] = inv[i * m + k] - f * inv[c * m + k];
                }
            }
        }
        // column k of B sits in basis slot k, so inv maps rows -> slots
        self.binv = inv;
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            let v: T = row.iter().zip(&self.b).map(|(&x, &y)| x * y).sum();
            self.x_b[i] = if v < T::zero() && v > -self.feas_tol() * T::of(10.0) {
                T::zero()
            } else {
                v
            };
        }
        self.since_refactor = 0;
        Ok(())
    }

    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            let j = self.basis[r];
            if self.kinds[j] != Kind::Artificial {
                continue;
            }
            let row = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, T)> = None;
            for q in 0..self.cols.len() {
                if self.in_basis[q] || self.kinds[q] == Kind::Artificial {
                    continue;
                }
                let v: T = self.cols[q].iter().map(|&(i, a)| row[i] * a).sum();
                if v.abs() > T::of(T::PIVOT_TOL) && best.map_or(true, |(_, b)| v.abs() > b.abs()) {
                    best = Some((q, v));
                }
            }
            if let Some((q, _)) = best {
                let alpha = self.ftran(q);
                let theta = self.x_b[r] / alpha[r];
                self.pivot(q, r, &alpha, theta);
            }
            // otherwise the row is redundant and the artificial stays basic at zero
        }
    }

    fn dual_feasible(&self, cost: &[T]) -> bool {
        let y = self.duals_for(cost);
        let tol = self.feas_tol();
        (0..self.cols.len())
            .filter(|&j| !self.in_basis[j] && self.kinds[j] != Kind::Artificial)
            .all(|j| self.reduced_cost(j, cost, &y) >= -tol * (T::one() + cost[j].abs()))
    }

    fn extract(self, cost: &[T]) -> Result<(LpSolution<T>, Option<WarmStart>), LpError> {
        let y_norm = self.duals_for(cost);
        let mut x = vec![T::zero(); self.n_struct];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n_struct {
                x[j] = self.x_b[i].max(T::zero());
            }
        }
        let duals: Vec<T> = y_norm
            .iter()
            .zip(&self.flipped)
            .map(|(&y, &f)| if f { -y } else { y })
            .collect();
        let objective: T = (0..self.n_struct).map(|j| cost[j] * x[j]).sum();
        let dual_obj: T = y_norm.iter().zip(&self.b).map(|(&y, &b)| y * b).sum();
        if (objective - dual_obj).abs() > self.feas_tol() * (T::one() + objective.abs()) {
            return Err(LpError::Numerical(format!(
                "duality gap {} after refactorization",
                (objective - dual_obj).abs()
            )));
        }
        let basic_columns: Vec<usize> = self.basis.iter().copied().filter(|&j| j < self.n_struct).collect();
        let basic_logicals: Vec<usize> = (0..self.m)
            .filter(|&i| self.logical[i].is_some_and(|j| self.in_basis[j]))
            .collect();
        // a basis that keeps an artificial cannot be described by columns and
        // logicals alone
        let complete = basic_columns.len() + basic_logicals.len() == self.m;
        let solution = LpSolution {
            objective,
            primal: x,
            duals,
            iterations: self.iterations,
        };
        Ok((
            solution,
            complete.then_some(WarmStart {
                basic_columns,
                basic_logicals,
            }),
        ))
    }
}
