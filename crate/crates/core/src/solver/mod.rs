//! Linear-programming solver: bounded-variable revised simplex with sparse
//! LU basis factorization, independent solution verification, and MPS
//! interchange.

mod lu;
mod mps;
mod scale;
mod simplex;
mod verify;

pub use mps::{
    check_mps_conformance, parse_mps, write_interchange, write_mps, write_name_map, MpsError,
};
pub use verify::{verify_solution, ResidualReport};

use crate::lp::LpProblem;

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Absolute feasibility tolerance on the scaled problem.
    pub feasibility_tol: f64,
    /// Reduced-cost tolerance for declaring optimality.
    pub optimality_tol: f64,
    pub iteration_limit: usize,
    /// Geometric-mean row/column scaling.
    pub scaling: bool,
    /// Fall back to Bland's rule after prolonged degeneracy.
    pub anti_cycling: bool,
    /// Basis refactorization cadence (eta-file length).
    pub refactor_interval: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feasibility_tol: 1e-8,
            optimality_tol: 1e-9,
            iteration_limit: 0, // 0: derived from problem size
            scaling: true,
            anti_cycling: true,
            refactor_interval: 64,
        }
    }
}

/// Primal/dual solution of an LP.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: SolverStatus,
    /// Value per structural column.
    pub primal: Vec<f64>,
    /// Value per row; signs follow the convention: `>=` rows nonnegative,
    /// `<=` rows nonpositive, equalities free.
    pub dual: Vec<f64>,
    /// Reduced cost per structural column.
    pub reduced_cost: Vec<f64>,
    /// Objective including the constant offset, in problem units.
    pub objective: f64,
    pub iterations: usize,
    pub max_primal_residual: f64,
    pub max_dual_residual: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("tolerances must be positive")]
    BadOptions,
}

/// Solve a canonical LP to optimality.
pub fn solve(problem: &LpProblem, options: &SolverOptions) -> Result<LpSolution, SolverError> {
    if options.feasibility_tol <= 0.0 || options.optimality_tol <= 0.0 {
        return Err(SolverError::BadOptions);
    }
    problem.check_well_formed().map_err(SolverError::Malformed)?;

    if problem.num_cols() == 0 && problem.num_rows() == 0 {
        return Ok(LpSolution {
            status: SolverStatus::Optimal,
            primal: Vec::new(),
            dual: Vec::new(),
            reduced_cost: Vec::new(),
            objective: problem.objective_offset,
            iterations: 0,
            max_primal_residual: 0.0,
            max_dual_residual: 0.0,
        });
    }

    let scaled = scale::Scaling::compute(problem, options.scaling);
    let mut solution = simplex::solve_scaled(problem, &scaled, options)?;

    if solution.status == SolverStatus::Optimal {
        let report = verify::verify_solution(problem, &solution);
        solution.max_primal_residual = report.max_primal_residual();
        solution.max_dual_residual = report.max_dual_infeasibility;
    }
    Ok(solution)
}
