//! Sparse canonical linear programs (`min c'x` subject to `Ax {<=,=,>=} b`,
//! `l <= x <= u`) together with a bidirectional map between model entities
//! and column/row indices.

mod build;
mod index;

pub use build::{build_lp, BuildError};
pub use index::{RowKey, VarKey, VariableIndex};

use serde::Serialize;

/// Row sense of a canonical LP constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// Problem-level metadata carried through to solutions and interchange files.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ProblemMeta {
    pub name: String,
    pub scenario_hash: String,
    pub horizon: usize,
}

/// A sparse LP in triplet form. Rows and columns are created through the
/// builder methods so that the entity index stays consistent with the
/// matrix; assembly deduplicates nothing, so each (row, col) pair must be
/// touched at most once.
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub triplets: Vec<(u32, u32, f64)>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub objective: Vec<f64>,
    /// Constant cost term (e.g. quasi-fixed O&M on initial capacity).
    pub objective_offset: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub index: VariableIndex,
    pub meta: ProblemMeta,
}

impl LpProblem {
    pub fn new(meta: ProblemMeta) -> Self {
        LpProblem {
            meta,
            ..Default::default()
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    /// Add a column and register it under `key`. Returns the column id.
    pub fn add_col(&mut self, key: VarKey, obj: f64, lower: f64, upper: f64) -> usize {
        let id = self.objective.len();
        self.objective.push(obj);
        self.lower.push(lower);
        self.upper.push(upper);
        self.index.insert_col(key, id);
        id
    }

    /// Add a row and register it under `key`. Returns the row id.
    pub fn add_row(&mut self, key: RowKey, sense: Sense, rhs: f64) -> usize {
        let id = self.rhs.len();
        self.senses.push(sense);
        self.rhs.push(rhs);
        self.index.insert_row(key, id);
        id
    }

    /// Append a matrix coefficient. Zero coefficients are dropped.
    pub fn set_coeff(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.num_rows() && col < self.num_cols());
        if value != 0.0 {
            self.triplets.push((row as u32, col as u32, value));
        }
    }

    /// Fix a column to a single value.
    pub fn fix_col(&mut self, col: usize, value: f64) {
        self.lower[col] = value;
        self.upper[col] = value;
    }

    /// Column-major copy of the constraint matrix.
    pub fn to_columns(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.num_cols()];
        for &(r, c, v) in &self.triplets {
            cols[c as usize].push((r as usize, v));
        }
        for col in &mut cols {
            col.sort_unstable_by_key(|&(r, _)| r);
        }
        cols
    }

    /// Objective value of a primal vector, including the constant offset.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_offset
            + self
                .objective
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }

    /// Structural well-formedness: finite coefficients and bounds, indices
    /// in range, no duplicate entries, consistent bound pairs.
    pub fn check_well_formed(&self) -> Result<(), String> {
        let (m, n) = (self.num_rows(), self.num_cols());
        let mut seen = std::collections::HashSet::with_capacity(self.triplets.len());
        for &(r, c, v) in &self.triplets {
            if r as usize >= m || c as usize >= n {
                return Err(format!("entry ({r},{c}) out of range {m}x{n}"));
            }
            if !v.is_finite() {
                return Err(format!("non-finite coefficient at ({r},{c})"));
            }
            if !seen.insert((r, c)) {
                return Err(format!("duplicate entry at ({r},{c})"));
            }
        }
        for (j, ((&l, &u), &c)) in self
            .lower
            .iter()
            .zip(&self.upper)
            .zip(&self.objective)
            .enumerate()
        {
            if l.is_nan() || u.is_nan() || !c.is_finite() {
                return Err(format!("bad bounds or cost on column {j}"));
            }
            if l > u {
                return Err(format!("crossed bounds on column {j}: [{l}, {u}]"));
            }
        }
        for (i, &b) in self.rhs.iter().enumerate() {
            if !b.is_finite() {
                return Err(format!("non-finite rhs on row {i}"));
            }
        }
        Ok(())
    }
}

/// Helper for tests and small hand-built problems.
impl LpProblem {
    pub fn named_col(&mut self, name: &str, obj: f64, lower: f64, upper: f64) -> usize {
        self.add_col(VarKey::Named(name.to_string()), obj, lower, upper)
    }

    pub fn named_row(&mut self, name: &str, sense: Sense, rhs: f64) -> usize {
        self.add_row(RowKey::Named(name.to_string()), sense, rhs)
    }
}
