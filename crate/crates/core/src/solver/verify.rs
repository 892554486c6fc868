//! Independent solution check: residuals are recomputed directly from the
//! problem triplets, not from any solver-internal state.

use super::LpSolution;
use crate::lp::{LpProblem, Sense};

/// Worst-case violations of a claimed optimal primal/dual pair.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// max_i violation of row i beyond its sense.
    pub max_row_violation: f64,
    /// max_j violation of a variable bound.
    pub max_bound_violation: f64,
    /// max_j |c_j - y'A_j - d_j| stationarity defect, plus sign-convention
    /// violations of y and d.
    pub max_dual_infeasibility: f64,
    /// |c'x - y'b - sum of bound terms| relative complementarity defect.
    pub duality_gap: f64,
}

impl ResidualReport {
    pub fn max_primal_residual(&self) -> f64 {
        self.max_row_violation.max(self.max_bound_violation)
    }
}

pub fn verify_solution(problem: &LpProblem, solution: &LpSolution) -> ResidualReport {
    let m = problem.num_rows();
    let n = problem.num_cols();
    let x = &solution.primal;
    let y = &solution.dual;
    let d = &solution.reduced_cost;

    // Row activities.
    let mut ax = vec![0.0f64; m];
    for &(r, c, v) in &problem.triplets {
        ax[r as usize] += v * x[c as usize];
    }
    let mut max_row_violation = 0.0f64;
    for i in 0..m {
        let b = problem.rhs[i];
        let scale = 1.0 + b.abs();
        let viol = match problem.senses[i] {
            Sense::Le => (ax[i] - b).max(0.0),
            Sense::Ge => (b - ax[i]).max(0.0),
            Sense::Eq => (ax[i] - b).abs(),
        };
        max_row_violation = max_row_violation.max(viol / scale);
    }

    let mut max_bound_violation = 0.0f64;
    for j in 0..n {
        let scale = 1.0 + x[j].abs();
        let below = (problem.lower[j] - x[j]).max(0.0);
        let above = (x[j] - problem.upper[j]).max(0.0);
        max_bound_violation = max_bound_violation.max(below.max(above) / scale);
    }

    // Stationarity: d = c - A'y, and sign conventions.
    let mut yta = vec![0.0f64; n];
    for &(r, c, v) in &problem.triplets {
        yta[c as usize] += v * y[r as usize];
    }
    let mut max_dual = 0.0f64;
    for j in 0..n {
        let defect = (problem.objective[j] - yta[j] - d[j]).abs();
        let scale = 1.0 + problem.objective[j].abs();
        max_dual = max_dual.max(defect / scale);
        // A variable strictly between its bounds must have zero reduced
        // cost; at the lower bound d >= 0, at the upper bound d <= 0.
        let at_lower = x[j] <= problem.lower[j] + 1e-7 * (1.0 + problem.lower[j].abs());
        let at_upper = x[j] >= problem.upper[j] - 1e-7 * (1.0 + problem.upper[j].abs());
        let sign_viol = if at_lower && at_upper {
            0.0
        } else if at_lower {
            (-d[j]).max(0.0)
        } else if at_upper {
            d[j].max(0.0)
        } else {
            d[j].abs()
        };
        max_dual = max_dual.max(sign_viol / scale);
    }
    for i in 0..m {
        let scale = 1.0 + problem.rhs[i].abs();
        let sign_viol = match problem.senses[i] {
            Sense::Ge => (-y[i]).max(0.0),
            Sense::Le => y[i].max(0.0),
            Sense::Eq => 0.0,
        };
        max_dual = max_dual.max(sign_viol / scale);
    }

    // Strong duality: c'x = y'b + d'x for a bounded-variable LP at the
    // optimum (bound terms d_j x_j because nonzero d occurs at a bound).
    let primal_obj: f64 = (0..n).map(|j| problem.objective[j] * x[j]).sum();
    let dual_obj: f64 = (0..m).map(|i| y[i] * problem.rhs[i]).sum::<f64>()
        + (0..n).map(|j| d[j] * x[j]).sum::<f64>();
    let duality_gap = (primal_obj - dual_obj).abs() / (1.0 + primal_obj.abs());

    ResidualReport {
        max_row_violation,
        max_bound_violation,
        max_dual_infeasibility: max_dual,
        duality_gap,
    }
}
