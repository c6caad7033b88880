//! Sparse LP interchange structure and the backend seam.
//!
//! Problems are `min c'x` subject to `a_i'x (<=|=|>=) b_i` and `x >= 0`.
//! Row duals follow the minimisation convention: reduced costs are
//! `c_j - y'A_j >= 0` at an optimum, so `<=` rows carry `y_i <= 0` and `>=`
//! rows `y_i >= 0`.

mod clarabel_backend;
mod simplex;

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

pub use clarabel_backend::ClarabelBackend;
pub use simplex::BuiltinSimplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for RowSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpProblem<T> {
    pub objective: Vec<T>,
    /// Column-major sparse entries `(row, value)`.
    pub columns: Vec<Vec<(usize, T)>>,
    pub senses: Vec<RowSense>,
    pub rhs: Vec<T>,
}

impl<T: Scalar> LpProblem<T> {
    pub fn new() -> Self {
        LpProblem {
            objective: Vec::new(),
            columns: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn add_row(&mut self, sense: RowSense, rhs: T) -> usize {
        self.senses.push(sense);
        self.rhs.push(rhs);
        self.senses.len() - 1
    }

    pub fn add_column(&mut self, cost: T, entries: Vec<(usize, T)>) -> usize {
        debug_assert!(entries.iter().all(|&(r, _)| r < self.senses.len()));
        self.objective.push(cost);
        self.columns.push(entries);
        self.columns.len() - 1
    }

    pub fn num_rows(&self) -> usize {
        self.senses.len()
    }

    pub fn num_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    /// `(row, col, value)` triplets in column order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, v)| (i, j, v)))
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    /// `a_i'x` for every row.
    pub fn row_activity(&self, x: &[T]) -> Vec<T> {
        let mut act = vec![T::zero(); self.num_rows()];
        for (j, col) in self.columns.iter().enumerate() {
            if x[j] != T::zero() {
                for &(i, v) in col {
                    act[i] = act[i] + v * x[j];
                }
            }
        }
        act
    }

    /// Largest violation of any row or of `x >= 0`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let act = self.row_activity(x);
        let mut worst = x.iter().fold(T::zero(), |w, &v| w.max(-v));
        for ((&a, &b), s) in act.iter().zip(&self.rhs).zip(&self.senses) {
            let v = match s {
                RowSense::Le => a - b,
                RowSense::Ge => b - a,
                RowSense::Eq => (a - b).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub objective: T,
    pub primal: Vec<T>,
    pub duals: Vec<T>,
    pub iterations: usize,
}

impl<T: Scalar> LpSolution<T> {
    pub fn dual_objective(&self, lp: &LpProblem<T>) -> T {
        self.duals.iter().zip(&lp.rhs).map(|(&y, &b)| y * b).sum()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("LP is infeasible")]
    Infeasible,
    #[error("LP is unbounded")]
    Unbounded,
    #[error("LP too large for the {backend} backend ({what} {size} > limit {limit}); use an external backend")]
    TooLarge {
        backend: &'static str,
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("backend error: {0}")]
    Backend(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackendInfo {
    pub warm_start: bool,
    pub method: &'static str,
}

/// A simplex basis: the basic structural columns and the rows whose logical
/// (slack) variable is basic. Used to restart after columns or rows have been
/// appended to a previously solved problem.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WarmStart {
    pub basic_columns: Vec<usize>,
    pub basic_logicals: Vec<usize>,
}

pub trait LpBackend<T: Scalar>: Send + Sync {
    fn info(&self) -> BackendInfo;
    fn solve(&self, lp: &LpProblem<T>) -> Result<LpSolution<T>, LpError>;

    /// Like [`solve`](Self::solve), starting from `start` where the backend
    /// can; returns the final basis if it has one. An unusable start is
    /// ignored.
    fn solve_warm(
        &self,
        lp: &LpProblem<T>,
        start: Option<&WarmStart>,
    ) -> Result<(LpSolution<T>, Option<WarmStart>), LpError> {
        let _ = start;
        self.solve(lp).map(|s| (s, None))
    }
}

impl<T: Scalar, B: LpBackend<T> + ?Sized> LpBackend<T> for &B {
    fn info(&self) -> BackendInfo {
        (**self).info()
    }
    fn solve(&self, lp: &LpProblem<T>) -> Result<LpSolution<T>, LpError> {
        (**self).solve(lp)
    }
    fn solve_warm(
        &self,
        lp: &LpProblem<T>,
        start: Option<&WarmStart>,
    ) -> Result<(LpSolution<T>, Option<WarmStart>), LpError> {
        (**self).solve_warm(lp, start)
    }
}

impl<T: Scalar, B: LpBackend<T> + ?Sized> LpBackend<T> for Box<B> {
    fn info(&self) -> BackendInfo {
        (**self).info()
    }
    fn solve(&self, lp: &LpProblem<T>) -> Result<LpSolution<T>, LpError> {
        (**self).solve(lp)
    }
    fn solve_warm(
        &self,
        lp: &LpProblem<T>,
        start: Option<&WarmStart>,
    ) -> Result<(LpSolution<T>, Option<WarmStart>), LpError> {
        (**self).solve_warm(lp, start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackendChoice {
    /// Builtin simplex below the size limit, Clarabel above it.
    #[default]
    Auto,
    Builtin,
    Clarabel,
}

/// Backend picked per solve according to a [`BackendChoice`].
#[derive(Debug, Clone)]
pub struct AutoBackend {
    pub choice: BackendChoice,
    pub simplex: BuiltinSimplex,
    pub clarabel: ClarabelBackend,
    /// Demand-plus-capacity row count above which `Auto` switches to Clarabel.
    pub auto_row_limit: usize,
}

impl AutoBackend {
    pub fn new(choice: BackendChoice) -> Self {
        AutoBackend {
            choice,
            simplex: BuiltinSimplex::default(),
            clarabel: ClarabelBackend::default(),
            auto_row_limit: 1500,
        }
    }
}

impl Default for AutoBackend {
    fn default() -> Self {
        Self::new(BackendChoice::Auto)
    }
}

impl<T: Scalar> LpBackend<T> for AutoBackend {
    fn info(&self) -> BackendInfo {
        match self.choice {
            BackendChoice::Clarabel => LpBackend::<T>::info(&self.clarabel),
            _ => LpBackend::<T>::info(&self.simplex),
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
        let simplex = match self.choice {
            BackendChoice::Builtin => true,
            BackendChoice::Clarabel => false,
            BackendChoice::Auto => lp.num_rows() <= self.auto_row_limit && lp.nnz() <= self.simplex.max_nonzeros,
        };
        if simplex {
            self.simplex.solve_warm(lp, start)
        } else {
            self.clarabel.solve(lp).map(|s| (s, None))
        }
    }
}
