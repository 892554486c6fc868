//! Sparse LU factorization of the simplex basis with partial pivoting
//! (left-looking Gilbert-Peierls), plus product-form eta updates for
//! column replacements between refactorizations.

/// Sparse column: (row, value) pairs, rows unordered unless noted.
pub type SparseCol = Vec<(usize, f64)>;

#[derive(Debug, thiserror::Error)]
pub enum LuError {
    #[error("basis is numerically singular at elimination step {0}")]
    Singular(usize),
}

/// LU factors of a square sparse matrix `B` with row permutation `P` and
/// column elimination order `Q`: `P * B[:, Q] = L * U`.
pub struct SparseLu {
    n: usize,
    /// Strictly-lower part of L per elimination column, rows in original
    /// indices, pivot excluded (unit diagonal implied).
    l_cols: Vec<SparseCol>,
    /// U per elimination column, row indices in *pivot-position* space,
    /// diagonal entry excluded.
    u_cols: Vec<SparseCol>,
    u_diag: Vec<f64>,
    /// Pivot position -> original row.
    pos_row: Vec<usize>,
    /// Elimination position -> basis slot (column of B).
    col_slot: Vec<usize>,
}

impl SparseLu {
    /// Factorize the matrix whose `n` columns are given as sparse vectors.
    /// Columns are eliminated in increasing-nnz order to limit fill-in.
    pub fn factorize(cols: &[SparseCol]) -> Result<SparseLu, LuError> {
        let n = cols.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&j| (cols[j].len(), j));

        const UNSET: usize = usize::MAX;
        let mut row_pos = vec![UNSET; n];
        let mut l_cols: Vec<SparseCol> = Vec::with_capacity(n);
        let mut u_cols: Vec<SparseCol> = Vec::with_capacity(n);
        let mut u_diag = Vec::with_capacity(n);
        let mut col_slot = Vec::with_capacity(n);
        // Position -> pivot original row, needed to walk L during the solve.
        let mut pos_row = vec![UNSET; n];

        // Dense scratch over original row indices.
        let mut work = vec![0.0f64; n];
        let mut pattern: Vec<usize> = Vec::with_capacity(64);
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut visited = vec![usize::MAX; n];

        for (step, &slot) in order.iter().enumerate() {
            // Symbolic: depth-first search for the reachable set of the
            // column pattern through already-eliminated columns.
            pattern.clear();
            for &(r, _) in &cols[slot] {
                if visited[r] == step {
                    continue;
                }
                // Iterative DFS from r.
                stack.clear();
                stack.push((r, 0));
                visited[r] = step;
                while let Some(top) = stack.len().checked_sub(1) {
                    let (node, next) = stack[top];
                    let k = row_pos[node];
                    let succ = if k == UNSET { &[][..] } else { &l_cols[k][..] };
                    if next < succ.len() {
                        stack[top].1 += 1;
                        let child = succ[next].0;
                        if visited[child] != step {
                            visited[child] = step;
                            stack.push((child, 0));
                        }
                    } else {
                        stack.pop();
                        pattern.push(node);
                    }
                }
            }
            // `pattern` is in reverse topological order; process from the end.
            for &(r, v) in &cols[slot] {
                work[r] += v;
            }
            for idx in (0..pattern.len()).rev() {
                let r = pattern[idx];
                let k = row_pos[r];
                if k == UNSET {
                    continue;
                }
                let xr = work[r];
                if xr != 0.0 {
                    for &(rr, lv) in &l_cols[k] {
                        work[rr] -= xr * lv;
                    }
                }
            }

            // Partial pivoting among not-yet-pivoted rows.
            let mut pivot_row = UNSET;
            let mut pivot_abs = 0.0f64;
            for &r in &pattern {
                if row_pos[r] == UNSET {
                    let a = work[r].abs();
                    if a > pivot_abs {
                        pivot_abs = a;
                        pivot_row = r;
                    }
                }
            }
            if pivot_row == UNSET || pivot_abs < 1e-12 {
                for &r in &pattern {
                    work[r] = 0.0;
                }
                return Err(LuError::Singular(step));
            }
            let pivot = work[pivot_row];

            let mut ucol: SparseCol = Vec::new();
            let mut lcol: SparseCol = Vec::new();
            for &r in &pattern {
                let v = work[r];
                work[r] = 0.0;
                if v == 0.0 || r == pivot_row {
                    continue;
                }
                match row_pos[r] {
                    UNSET => lcol.push((r, v / pivot)),
                    pos => ucol.push((pos, v)),
                }
            }
            row_pos[pivot_row] = step;
            pos_row[step] = pivot_row;
            u_diag.push(pivot);
            u_cols.push(ucol);
            l_cols.push(lcol);
            col_slot.push(slot);
        }

        Ok(SparseLu {
            n,
            l_cols,
            u_cols,
            u_diag,
            pos_row,
            col_slot,
        })
    }

    /// Solve `B x = rhs`. `rhs` is indexed by original rows; the result is
    /// indexed by basis slot. Both live in the same dense buffer.
    pub fn solve_dense(&self, buf: &mut [f64], scratch: &mut [f64]) {
        // Forward: L z = P b, z in position space.
        for pos in 0..self.n {
            let r = self.pivot_row(pos);
            let zr = buf[r];
            if zr != 0.0 {
                for &(rr, lv) in &self.l_cols[pos] {
                    buf[rr] -= zr * lv;
                }
            }
        }
        for pos in 0..self.n {
            scratch[pos] = buf[self.pivot_row(pos)];
        }
        // Backward: U w = z, w in position space.
        for pos in (0..self.n).rev() {
            let w = scratch[pos] / self.u_diag[pos];
            scratch[pos] = w;
            if w != 0.0 {
                for &(p2, uv) in &self.u_cols[pos] {
                    scratch[p2] -= w * uv;
                }
            }
        }
        // Scatter back to slot space.
        for pos in 0..self.n {
            buf[self.col_slot[pos]] = scratch[pos];
        }
    }

    /// Solve `B' y = rhs` (transpose solve). `rhs` is indexed by basis
    /// slot; the result is indexed by original rows.
    pub fn solve_transpose_dense(&self, buf: &mut [f64], scratch: &mut [f64]) {
        // U' v = Q' c, v in position space.
        for pos in 0..self.n {
            scratch[pos] = buf[self.col_slot[pos]];
        }
        for pos in 0..self.n {
            let mut v = scratch[pos];
            for &(p2, uv) in &self.u_cols[pos] {
                v -= uv * scratch[p2];
            }
            scratch[pos] = v / self.u_diag[pos];
        }
        // L' w = v; result permuted back to original rows.
        for b in buf.iter_mut() {
            *b = 0.0;
        }
        for pos in (0..self.n).rev() {
            let mut v = scratch[pos];
            for &(rr, lv) in &self.l_cols[pos] {
                v -= lv * buf[rr];
            }
            buf[self.pivot_row(pos)] = v;
        }
    }

    #[inline]
    fn pivot_row(&self, pos: usize) -> usize {
        self.pos_row[pos]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
        let mut x = b.to_vec();
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).unwrap())
                .unwrap();
            m.swap(k, piv);
            x.swap(k, piv);
            for i in (k + 1)..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                x[i] -= f * x[k];
            }
        }
        for k in (0..n).rev() {
            for j in (k + 1)..n {
                x[k] -= m[k][j] * x[j];
            }
            x[k] /= m[k][k];
        }
        x
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> (Vec<SparseCol>, Vec<Vec<f64>>) {
        // Sparse with a guaranteed diagonal so the matrix is nonsingular
        // with overwhelming probability.
        let mut cols: Vec<SparseCol> = vec![Vec::new(); n];
        let mut dense = vec![vec![0.0f64; n]; n];
        for j in 0..n {
            for i in 0..n {
                let v: f64 = if i == j {
                    rng.gen_range(2.0..5.0)
                } else if rng.gen_bool(0.3) {
                    rng.gen_range(-1.0..1.0)
                } else {
                    continue;
                };
                cols[j].push((i, v));
                dense[i][j] = v;
            }
        }
        (cols, dense)
    }

    #[test]
    fn matches_dense_solver_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 5, 12, 30] {
            for _ in 0..8 {
                let (cols, dense) = random_matrix(&mut rng, n);
                let lu = SparseLu::factorize(&cols).expect("nonsingular");
                let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let mut got = b.clone();
                let mut scratch = vec![0.0; n];
                lu.solve_dense(&mut got, &mut scratch);
                let want = dense_solve(&dense, &b);
                for (g, w) in got.iter().zip(&want) {
                    assert!((g - w).abs() < 1e-9, "n={n}: {got:?} vs {want:?}");
                }
            }
        }
    }

    #[test]
    fn transpose_solve_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n = 9;
            let (cols, dense) = random_matrix(&mut rng, n);
            let lu = SparseLu::factorize(&cols).expect("nonsingular");
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut got = c.clone();
            let mut scratch = vec![0.0; n];
            lu.solve_transpose_dense(&mut got, &mut scratch);
            // y solves B'y = c; check residual directly.
            for (j, col) in dense.iter().enumerate() {
                let _ = col;
                let mut acc = 0.0;
                for i in 0..n {
                    acc += dense[i][j] * got[i];
                }
                assert!((acc - c[j]).abs() < 1e-9, "column {j}");
            }
        }
    }

    #[test]
    fn rejects_singular_matrix() {
        // Second column is a multiple of the first.
        let cols: Vec<SparseCol> = vec![
            vec![(0, 1.0), (1, 2.0)],
            vec![(0, 2.0), (1, 4.0)],
        ];
        assert!(SparseLu::factorize(&cols).is_err());
    }

    #[test]
    fn empty_matrix_roundtrips() {
        let lu = SparseLu::factorize(&[]).unwrap();
        let mut buf: [f64; 0] = [];
        let mut scratch: [f64; 0] = [];
        lu.solve_dense(&mut buf, &mut scratch);
    }
}
