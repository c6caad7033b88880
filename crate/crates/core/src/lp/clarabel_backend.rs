//! Interior-point backend on top of Clarabel.
//!
//! The LP is rewritten in conic form `A x + s = b`: equality rows go to the
//! zero cone, `<=` rows and negated `>=` rows to the nonnegative cone, and the
//! bounds `x >= 0` are appended as `-x + s = 0`. Clarabel works in `f64`
//! regardless of the scalar type of the problem.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, SolverStatus, SupportedConeT, ZeroConeT,
};

use super::{BackendInfo, LpBackend, LpError, LpProblem, LpSolution, RowSense};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct ClarabelBackend {
    pub tol_gap: f64,
    pub tol_feas: f64,
    pub max_iter: u32,
}

impl Default for ClarabelBackend {
    fn default() -> Self {
        ClarabelBackend {
            tol_gap: 1e-10,
            tol_feas: 1e-10,
            max_iter: 400,
        }
    }
}

impl<T: Scalar> LpBackend<T> for ClarabelBackend {
    fn info(&self) -> BackendInfo {
        BackendInfo {
            warm_start: false,
            method: "clarabel interior point",
        }
    }

    fn solve(&self, lp: &LpProblem<T>) -> Result<LpSolution<T>, LpError> {
        let m = lp.num_rows();
        let n = lp.num_cols();
        if n == 0 {
            // only the all-zero point exists
            let zero = vec![T::zero(); 0];
            if lp.max_violation(&zero).as_f64() > 1e-9 {
                return Err(LpError::Infeasible);
            }
            return Ok(LpSolution {
                objective: T::zero(),
                primal: zero,
                duals: vec![T::zero(); m],
                iterations: 0,
            });
        }

        // conic row order: equalities first, then inequalities, then bounds
        let mut conic_row = vec![0usize; m];
        let mut sign = vec![1.0f64; m];
        let n_eq = lp.senses.iter().filter(|&&s| s == RowSense::Eq).count();
        let (mut next_eq, mut next_ineq) = (0, n_eq);
        for (i, s) in lp.senses.iter().enumerate() {
            match s {
                RowSense::Eq => {
                    conic_row[i] = next_eq;
                    next_eq += 1;
                }
                RowSense::Le | RowSense::Ge => {
                    conic_row[i] = next_ineq;
                    next_ineq += 1;
                    if *s == RowSense::Ge {
                        sign[i] = -1.0;
                    }
                }
            }
        }
        let total_rows = m + n;

        let mut colptr = Vec::with_capacity(n + 1);
        let mut rowval = Vec::with_capacity(lp.nnz() + n);
        let mut nzval = Vec::with_capacity(lp.nnz() + n);
        colptr.push(0);
        for (j, col) in lp.columns.iter().enumerate() {
            let mut entries: Vec<(usize, f64)> = col
                .iter()
                .map(|&(i, v)| (conic_row[i], sign[i] * v.as_f64()))
                .collect();
            entries.push((m + j, -1.0));
            entries.sort_by_key(|&(r, _)| r);
            let start = rowval.len();
            for (r, v) in entries {
                if rowval.len() > start && *rowval.last().unwrap() == r {
                    *nzval.last_mut().unwrap() += v;
                } else {
                    rowval.push(r);
                    nzval.push(v);
                }
            }
            colptr.push(rowval.len());
        }
        let a = CscMatrix::new(total_rows, n, colptr, rowval, nzval);
        let p = CscMatrix::zeros((n, n));
        let q: Vec<f64> = lp.objective.iter().map(|c| c.as_f64()).collect();
        let mut b = vec![0.0f64; total_rows];
        for i in 0..m {
            b[conic_row[i]] = sign[i] * lp.rhs[i].as_f64();
        }
        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        if n_eq > 0 {
            cones.push(ZeroConeT(n_eq));
        }
        cones.push(NonnegativeConeT(total_rows - n_eq));

        let settings = DefaultSettingsBuilder::default()
            .verbose(std::env::var_os("MCF_CLARABEL_VERBOSE").is_some())
            .tol_gap_abs(self.tol_gap)
            .tol_gap_rel(self.tol_gap)
            .tol_feas(self.tol_feas)
            .max_iter(self.max_iter)
            .build()
            .map_err(|e| LpError::Backend(format!("{e:?}")))?;
        let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings)
            .map_err(|e| LpError::Backend(format!("{e:?}")))?;
        solver.solve();
        let sol = &solver.solution;
        match sol.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => {}
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => return Err(LpError::Infeasible),
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => return Err(LpError::Unbounded),
            other => return Err(LpError::Numerical(format!("clarabel stopped with {other:?}"))),
        }
        let primal: Vec<T> = sol.x.iter().map(|&v| T::of(v.max(0.0))).collect();
        let duals: Vec<T> = (0..m).map(|i| T::of(-sign[i] * sol.z[conic_row[i]])).collect();
        Ok(LpSolution {
            objective: lp.objective_value(&primal),
            primal,
            duals,
            iterations: sol.iterations as usize,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::test_support::{one_var, triangle_rmp};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-6 * (1.0 + b.abs())
    }

    #[test]
    fn one_variable() {
        let s = ClarabelBackend::default().solve(&one_var()).unwrap();
        assert!(close(s.objective, 1.0));
        assert!(close(s.duals[0], 1.0));
    }

    #[test]
    fn triangle_duals_match_simplex_convention() {
        let s = ClarabelBackend::default().solve(&triangle_rmp()).unwrap();
        assert!(close(s.objective, 6.0), "{}", s.objective);
        for (got, want) in s.duals.iter().zip([3.0, 1.0, -1.0]) {
            assert!(close(*got, want), "{:?}", s.duals);
        }
    }

    #[test]
    fn ge_rows_and_infeasibility() {
        let mut lp = LpProblem::new();
        let r = lp.add_row(RowSense::Ge, 2.0);
        lp.add_column(3.0, vec![(r, 1.0)]);
        let s = ClarabelBackend::default().solve(&lp).unwrap();
        assert!(close(s.objective, 6.0));
        assert!(close(s.duals[0], 3.0));

        let mut bad = LpProblem::<f64>::new();
        let r = bad.add_row(RowSense::Eq, -1.0);
        bad.add_column(1.0, vec![(r, 1.0)]);
        assert_eq!(ClarabelBackend::default().solve(&bad), Err(LpError::Infeasible));
    }
}
