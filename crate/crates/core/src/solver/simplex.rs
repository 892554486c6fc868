//! Two-phase bounded-variable revised simplex.
//!
//! The constraint system is augmented with one slack per row (bounded by
//! the row sense) and one artificial per row; phase 1 drives the
//! artificials to zero starting from an all-artificial basis, phase 2
//! minimizes the true cost. The basis is held as a sparse LU factorization
//! with a product-form eta file between refactorizations.

use super::lu::{SparseCol, SparseLu};
use super::scale::Scaling;
use super::{LpSolution, SolverError, SolverOptions, SolverStatus};
use crate::lp::{LpProblem, Sense};

const PIVOT_TOL: f64 = 1e-10;
const DEGENERATE_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Loc {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Free variable resting at zero.
    FreeZero,
}

struct Eta {
    slot: usize,
    /// Entries of the ftran'd entering column, slot space, pivot excluded.
    w: Vec<(usize, f64)>,
    w_pivot: f64,
}

struct Simplex {
    m: usize,
    n_struct: usize,
    n_total: usize,
    cols: Vec<SparseCol>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    value: Vec<f64>,
    loc: Vec<Loc>,
    basis: Vec<usize>,
    lu: SparseLu,
    etas: Vec<Eta>,
    iterations: usize,
    degenerate_streak: usize,
    use_bland: bool,
    banned: Vec<usize>,
    restarted: bool,
    opts: SolverOptions,
}

enum Step {
    Moved,
    Optimal,
    Unbounded { entering: usize, direction: f64 },
    NeedsRefactor,
    /// Numerical breakdown forced a restart from the all-artificial basis.
    Restarted,
}

pub(super) fn solve_scaled(
    problem: &LpProblem,
    scaling: &Scaling,
    options: &SolverOptions,
) -> Result<LpSolution, SolverError> {
    let m = problem.num_rows();
    let n = problem.num_cols();
    let n_total = n + 2 * m;

    // Scaled columns: A' = R A C.
    let mut cols: Vec<SparseCol> = vec![Vec::new(); n_total];
    for &(r, c, v) in &problem.triplets {
        let (r, c) = (r as usize, c as usize);
        cols[c].push((r, v * scaling.row[r] * scaling.col[c]));
    }
    for col in cols.iter_mut().take(n) {
        col.sort_unstable_by_key(|&(r, _)| r);
    }

    let mut lower = vec![0.0f64; n_total];
    let mut upper = vec![f64::INFINITY; n_total];
    let mut cost = vec![0.0f64; n_total];
    for j in 0..n {
        lower[j] = problem.lower[j] / scaling.col[j];
        upper[j] = problem.upper[j] / scaling.col[j];
        cost[j] = problem.objective[j] * scaling.col[j];
    }
    for i in 0..m {
        let sj = n + i;
        cols[sj].push((i, 1.0));
        match problem.senses[i] {
            Sense::Le => {
                lower[sj] = 0.0;
                upper[sj] = f64::INFINITY;
            }
            Sense::Ge => {
                lower[sj] = f64::NEG_INFINITY;
                upper[sj] = 0.0;
            }
            Sense::Eq => {
                lower[sj] = 0.0;
                upper[sj] = 0.0;
            }
        }
    }

    let rhs: Vec<f64> = problem
        .rhs
        .iter()
        .enumerate()
        .map(|(i, &b)| b * scaling.row[i])
        .collect();

    // Nonbasic starting point.
    let mut loc = vec![Loc::AtLower; n_total];
    let mut value = vec![0.0f64; n_total];
    for j in 0..(n + m) {
        if lower[j].is_finite() {
            loc[j] = Loc::AtLower;
            value[j] = lower[j];
        } else if upper[j].is_finite() {
            loc[j] = Loc::AtUpper;
            value[j] = upper[j];
        } else {
            loc[j] = Loc::FreeZero;
            value[j] = 0.0;
        }
    }

    // Artificial columns absorb the initial residual.
    let mut residual = rhs.clone();
    for j in 0..(n + m) {
        if value[j] != 0.0 {
            for &(r, v) in &cols[j] {
                residual[r] -= v * value[j];
            }
        }
    }
    let mut basis = Vec::with_capacity(m);
    for (i, &res) in residual.iter().enumerate() {
        let aj = n + m + i;
        cols[aj].push((i, if res >= 0.0 { 1.0 } else { -1.0 }));
        lower[aj] = 0.0;
        upper[aj] = f64::INFINITY;
        value[aj] = res.abs();
        loc[aj] = Loc::Basic(i);
        basis.push(aj);
    }

    let basis_cols: Vec<SparseCol> = basis.iter().map(|&v| cols[v].clone()).collect();
    let lu = SparseLu::factorize(&basis_cols)
        .map_err(|e| SolverError::Malformed(format!("initial basis: {e}")))?;

    let iteration_limit = if options.iteration_limit > 0 {
        options.iteration_limit
    } else {
        20_000.max(40 * (m + n))
    };

    let mut simplex = Simplex {
        m,
        n_struct: n,
        n_total,
        cols,
        lower,
        upper,
        cost,
        rhs,
        value,
        loc,
        basis,
        lu,
        etas: Vec::new(),
        iterations: 0,
        degenerate_streak: 0,
        use_bland: false,
        banned: Vec::new(),
        restarted: false,
        opts: options.clone(),
    };

    let status = simplex.run(iteration_limit)?;
    Ok(simplex.extract(problem, scaling, status))
}

impl Simplex {
    fn run(&mut self, iteration_limit: usize) -> Result<SolverStatus, SolverError> {
        let mut phase1_cost = vec![0.0f64; self.n_total];
        for j in (self.n_struct + self.m)..self.n_total {
            phase1_cost[j] = 1.0;
        }
        let cost = self.cost.clone();

        // A numerical restart (singular refactorization) rebuilds the
        // all-artificial basis and restarts the whole two-phase run.
        'outer: loop {
            // Phase 1: minimize the sum of artificial values.
            if self.phase1_objective() > self.feas_threshold() {
                loop {
                    if self.iterations >= iteration_limit {
                        return Ok(SolverStatus::IterationLimit);
                    }
                    match self.iterate(&phase1_cost, true)? {
                        Step::Moved => {
                            if self.phase1_objective() <= 0.0 {
                                break;
                            }
                        }
                        Step::Optimal => break,
                        // A phase-1 ray cannot exist: the objective is
                        // bounded below by zero. Treat as numerical trouble.
                        Step::Unbounded { .. } => {
                            return Err(SolverError::Malformed(
                                "phase-1 ratio test failed".to_string(),
                            ))
                        }
                        Step::NeedsRefactor => {
                            if self.refactor()? {
                                continue 'outer;
                            }
                        }
                        Step::Restarted => continue 'outer,
                    }
                }
                if self.refactor()? {
                    continue 'outer;
                }
                if self.phase1_objective() > self.feas_threshold() {
                    return Ok(SolverStatus::Infeasible);
                }
            }

            // Artificials are pinned at zero from here on.
            for j in (self.n_struct + self.m)..self.n_total {
                self.upper[j] = 0.0;
                if !matches!(self.loc[j], Loc::Basic(_)) {
                    self.loc[j] = Loc::AtLower;
                    self.value[j] = 0.0;
                }
            }

            // Phase 2 with a clean refactor-and-reprice pass at claimed
            // optimality to guard against eta-file drift.
            let mut clean_passes = 0;
            loop {
                if self.iterations >= iteration_limit {
                    return Ok(SolverStatus::IterationLimit);
                }
                match self.iterate(&cost, false)? {
                    Step::Moved => {}
                    Step::Optimal => {
                        if self.etas.is_empty() && clean_passes > 0 {
                            return Ok(SolverStatus::Optimal);
                        }
                        if self.refactor()? {
                            continue 'outer;
                        }
                        clean_passes += 1;
                        if clean_passes > 6 {
                            return Ok(SolverStatus::Optimal);
                        }
                    }
                    Step::Unbounded { entering, direction } => {
                        self.mark_ray(entering, direction);
                        return Ok(SolverStatus::Unbounded);
                    }
                    Step::NeedsRefactor => {
                        if self.refactor()? {
                            continue 'outer;
                        }
                    }
                    Step::Restarted => continue 'outer,
                }
            }
        }
    }

    fn feas_threshold(&self) -> f64 {
        let bnorm = self.rhs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        self.opts.feasibility_tol * (1.0 + bnorm)
    }

    fn phase1_objective(&self) -> f64 {
        (self.n_struct + self.m..self.n_total)
            .map(|j| self.value[j].max(0.0))
            .sum()
    }

    /// One pricing + ratio-test + pivot step.
    fn iterate(&mut self, cost: &[f64], phase1: bool) -> Result<Step, SolverError> {
        // Duals of the working cost vector.
        let mut y = vec![0.0f64; self.m];
        for (slot, &v) in self.basis.iter().enumerate() {
            y[slot] = cost[v];
        }
        self.btran(&mut y);

        // Pricing.
        let tol = self.opts.optimality_tol.max(1e-12);
        let mut entering = usize::MAX;
        let mut entering_dir = 0.0;
        let mut best = tol;
        for j in 0..self.n_total {
            if matches!(self.loc[j], Loc::Basic(_)) || self.lower[j] == self.upper[j] {
                continue;
            }
            if self.banned.contains(&j) {
                continue;
            }
            // In phase 1 the pinned artificial bounds are not yet applied,
            // but artificials at zero must not re-enter.
            if phase1 && j >= self.n_struct + self.m && self.value[j] <= 0.0 {
                continue;
            }
            let mut d = cost[j];
            for &(r, v) in &self.cols[j] {
                d -= y[r] * v;
            }
            let (eligible, dir) = match self.loc[j] {
                Loc::AtLower => (d < -tol, 1.0),
                Loc::AtUpper => (d > tol, -1.0),
                Loc::FreeZero => (d.abs() > tol, if d < 0.0 { 1.0 } else { -1.0 }),
                Loc::Basic(_) => unreachable!(),
            };
            if !eligible {
                continue;
            }
            if self.use_bland {
                entering = j;
                entering_dir = dir;
                break;
            }
            if d.abs() > best {
                best = d.abs();
                entering = j;
                entering_dir = dir;
            }
        }
        if entering == usize::MAX {
            self.banned.clear();
            return Ok(Step::Optimal);
        }

        // Direction through the basis.
        let mut w = vec![0.0f64; self.m];
        for &(r, v) in &self.cols[entering] {
            w[r] = v;
        }
        self.ftran(&mut w);

        // Ratio test.
        let dir = entering_dir;
        let bound_gap = if self.upper[entering].is_finite() && self.lower[entering].is_finite() {
            self.upper[entering] - self.lower[entering]
        } else {
            f64::INFINITY
        };
        let mut limit = bound_gap;
        let mut leaving_slot = usize::MAX;
        let mut leaving_pivot = 0.0f64;
        for slot in 0..self.m {
            let coeff = dir * w[slot];
            if coeff.abs() <= PIVOT_TOL {
                continue;
            }
            let var = self.basis[slot];
            let bound = if coeff > 0.0 {
                self.lower[var]
            } else {
                self.upper[var]
            };
            if !bound.is_finite() {
                continue;
            }
            let step = ((self.value[var] - bound) / coeff).max(0.0);
            let better = step < limit - 1e-12
                || (step < limit + 1e-12
                    && (leaving_slot == usize::MAX || coeff.abs() > leaving_pivot.abs()));
            if better {
                limit = step;
                leaving_slot = slot;
                leaving_pivot = w[slot];
            }
        }

        if !limit.is_finite() {
            return Ok(Step::Unbounded {
                entering,
                direction: dir,
            });
        }

        if leaving_slot == usize::MAX || bound_gap <= limit {
            // Bound flip: entering runs to its opposite bound.
            let step = bound_gap;
            for slot in 0..self.m {
                if w[slot] != 0.0 {
                    let var = self.basis[slot];
                    self.value[var] -= dir * w[slot] * step;
                }
            }
            self.loc[entering] = match self.loc[entering] {
                Loc::AtLower => Loc::AtUpper,
                Loc::AtUpper => Loc::AtLower,
                other => other,
            };
            self.value[entering] = match self.loc[entering] {
                Loc::AtLower => self.lower[entering],
                Loc::AtUpper => self.upper[entering],
                _ => self.value[entering] + dir * step,
            };
            self.after_step(step);
            return Ok(Step::Moved);
        }

        // Pivot. Guard against a tiny pivot element.
        let wmax = w.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        if leaving_pivot.abs() < 1e-7 * wmax.max(1.0) {
            if !self.etas.is_empty() {
                return Ok(Step::NeedsRefactor);
            }
            self.banned.push(entering);
            return Ok(Step::Moved);
        }

        let step = limit;
        for slot in 0..self.m {
            if w[slot] != 0.0 {
                let var = self.basis[slot];
                self.value[var] -= dir * w[slot] * step;
            }
        }
        self.value[entering] = match self.loc[entering] {
            Loc::AtLower => self.lower[entering] + step,
            Loc::AtUpper => self.upper[entering] - step,
            Loc::FreeZero => dir * step,
            Loc::Basic(_) => unreachable!(),
        };
        let leaving = self.basis[leaving_slot];
        let coeff = dir * leaving_pivot;
        self.loc[leaving] = if coeff > 0.0 { Loc::AtLower } else { Loc::AtUpper };
        self.value[leaving] = match self.loc[leaving] {
            Loc::AtLower => self.lower[leaving],
            Loc::AtUpper => self.upper[leaving],
            _ => unreachable!(),
        };
        self.basis[leaving_slot] = entering;
        self.loc[entering] = Loc::Basic(leaving_slot);

        let mut eta_w = Vec::with_capacity(16);
        for (slot, &v) in w.iter().enumerate() {
            if slot != leaving_slot && v != 0.0 {
                eta_w.push((slot, v));
            }
        }
        self.etas.push(Eta {
            slot: leaving_slot,
            w: eta_w,
            w_pivot: leaving_pivot,
        });
        self.after_step(step);
        if self.etas.len() >= self.opts.refactor_interval && self.refactor()? {
            return Ok(Step::Restarted);
        }
        Ok(Step::Moved)
    }

    fn after_step(&mut self, step: f64) {
        self.iterations += 1;
        self.banned.clear();
        if step.abs() <= DEGENERATE_STEP {
            self.degenerate_streak += 1;
            if self.opts.anti_cycling && self.degenerate_streak > 200 + self.n_total / 10 {
                self.use_bland = true;
            }
        } else {
            self.degenerate_streak = 0;
            self.use_bland = false;
        }
    }

    fn ftran(&self, x: &mut [f64]) {
        let mut scratch = vec![0.0f64; self.m];
        self.lu.solve_dense(x, &mut scratch);
        for eta in &self.etas {
            let xr = x[eta.slot] / eta.w_pivot;
            x[eta.slot] = xr;
            if xr != 0.0 {
                for &(slot, v) in &eta.w {
                    x[slot] -= v * xr;
                }
            }
        }
    }

    fn btran(&self, c: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut cr = c[eta.slot];
            for &(slot, v) in &eta.w {
                cr -= c[slot] * v;
            }
            c[eta.slot] = cr / eta.w_pivot;
        }
        let mut scratch = vec![0.0f64; self.m];
        self.lu.solve_transpose_dense(c, &mut scratch);
    }

    /// Refactorize the basis. Returns `true` if a numerical breakdown
    /// forced a restart from the all-artificial basis.
    fn refactor(&mut self) -> Result<bool, SolverError> {
        let basis_cols: Vec<SparseCol> = self.basis.iter().map(|&v| self.cols[v].clone()).collect();
        match SparseLu::factorize(&basis_cols) {
            Ok(lu) => {
                self.lu = lu;
                self.etas.clear();
                self.recompute_basics();
                Ok(false)
            }
            Err(_) if !self.restarted => {
                self.restarted = true;
                self.restart_from_artificials()?;
                Ok(true)
            }
            Err(e) => Err(SolverError::Malformed(format!("basis refactor: {e}"))),
        }
    }

    fn restart_from_artificials(&mut self) -> Result<(), SolverError> {
        let n = self.n_struct;
        let m = self.m;
        for j in 0..(n + m) {
            if self.lower[j].is_finite() {
                self.loc[j] = Loc::AtLower;
                self.value[j] = self.lower[j];
            } else if self.upper[j].is_finite() {
                self.loc[j] = Loc::AtUpper;
                self.value[j] = self.upper[j];
            } else {
                self.loc[j] = Loc::FreeZero;
                self.value[j] = 0.0;
            }
        }
        let mut residual = self.rhs.clone();
        for j in 0..(n + m) {
            if self.value[j] != 0.0 {
                for &(r, v) in &self.cols[j] {
                    residual[r] -= v * self.value[j];
                }
            }
        }
        for (i, &res) in residual.iter().enumerate() {
            let aj = n + m + i;
            let sign = if res >= 0.0 { 1.0 } else { -1.0 };
            self.cols[aj] = vec![(i, sign)];
            self.lower[aj] = 0.0;
            self.upper[aj] = f64::INFINITY;
            self.value[aj] = res.abs();
            self.loc[aj] = Loc::Basic(i);
            self.basis[i] = aj;
        }
        let basis_cols: Vec<SparseCol> = self.basis.iter().map(|&v| self.cols[v].clone()).collect();
        self.lu = SparseLu::factorize(&basis_cols)
            .map_err(|e| SolverError::Malformed(format!("restart basis: {e}")))?;
        self.etas.clear();
        Ok(())
    }

    fn recompute_basics(&mut self) {
        let mut rhs_eff = self.rhs.clone();
        for j in 0..self.n_total {
            if !matches!(self.loc[j], Loc::Basic(_)) && self.value[j] != 0.0 {
                for &(r, v) in &self.cols[j] {
                    rhs_eff[r] -= v * self.value[j];
                }
            }
        }
        self.ftran(&mut rhs_eff);
        for (slot, &var) in self.basis.iter().enumerate() {
            self.value[var] = rhs_eff[slot];
        }
    }

    /// Store an unbounded ray in the value vector (structural part) so that
    /// callers can report it.
    fn mark_ray(&mut self, entering: usize, direction: f64) {
        let mut w = vec![0.0f64; self.m];
        for &(r, v) in &self.cols[entering] {
            w[r] = v;
        }
        self.ftran(&mut w);
        let mut ray = vec![0.0f64; self.n_total];
        ray[entering] = direction;
        for (slot, &var) in self.basis.iter().enumerate() {
            ray[var] = -direction * w[slot];
        }
        self.value = ray;
    }

    fn extract(
        &mut self,
        problem: &LpProblem,
        scaling: &Scaling,
        status: SolverStatus,
    ) -> LpSolution {
        let n = self.n_struct;
        let primal: Vec<f64> = (0..n).map(|j| self.value[j] * scaling.col[j]).collect();

        // Duals from the cost vector that terminated the run.
        let mut cb = vec![0.0f64; self.m];
        let phase1 = status == SolverStatus::Infeasible;
        for (slot, &var) in self.basis.iter().enumerate() {
            cb[slot] = if phase1 {
                if var >= n + self.m {
                    1.0
                } else {
                    0.0
                }
            } else {
                self.cost[var]
            };
        }
        self.btran(&mut cb);
        let dual: Vec<f64> = (0..self.m).map(|i| cb[i] * scaling.row[i]).collect();

        let reduced_cost: Vec<f64> = (0..n)
            .map(|j| {
                let mut d = if phase1 { 0.0 } else { self.cost[j] };
                for &(r, v) in &self.cols[j] {
                    d -= cb[r] * v;
                }
                d / scaling.col[j]
            })
            .collect();

        let objective = match status {
            SolverStatus::Optimal | SolverStatus::IterationLimit => {
                problem.objective_value(&primal)
            }
            _ => f64::NAN,
        };

        LpSolution {
            status,
            primal,
            dual,
            reduced_cost,
            objective,
            iterations: self.iterations,
            max_primal_residual: f64::NAN,
            max_dual_residual: f64::NAN,
        }
    }
}
