//! Geometric-mean row and column scaling. The solve runs on the scaled
//! problem; primal and dual values are reported unscaled.

use crate::lp::LpProblem;

pub struct Scaling {
    pub row: Vec<f64>,
    pub col: Vec<f64>,
}

impl Scaling {
    pub fn compute(problem: &LpProblem, enabled: bool) -> Scaling {
        let m = problem.num_rows();
        let n = problem.num_cols();
        let mut row = vec![1.0f64; m];
        let mut col = vec![1.0f64; n];
        if !enabled || problem.triplets.is_empty() {
            return Scaling { row, col };
        }

        // Two sweeps of alternating geometric-mean equilibration, rounded
        // to powers of two so scaling is exact in floating point.
        for _ in 0..2 {
            let mut lo = vec![f64::INFINITY; m];
            let mut hi = vec![0.0f64; m];
            for &(r, c, v) in &problem.triplets {
                let a = (v * row[r as usize] * col[c as usize]).abs();
                if a > 0.0 {
                    let r = r as usize;
                    lo[r] = lo[r].min(a);
                    hi[r] = hi[r].max(a);
                }
            }
            for i in 0..m {
                if hi[i] > 0.0 {
                    row[i] *= pow2_round(1.0 / (lo[i] * hi[i]).sqrt());
                }
            }
            let mut lo = vec![f64::INFINITY; n];
            let mut hi = vec![0.0f64; n];
            for &(r, c, v) in &problem.triplets {
                let a = (v * row[r as usize] * col[c as usize]).abs();
                if a > 0.0 {
                    let c = c as usize;
                    lo[c] = lo[c].min(a);
                    hi[c] = hi[c].max(a);
                }
            }
            for j in 0..n {
                if hi[j] > 0.0 {
                    col[j] *= pow2_round(1.0 / (lo[j] * hi[j]).sqrt());
                }
            }
        }
        Scaling { row, col }
    }
}

fn pow2_round(x: f64) -> f64 {
    if !x.is_finite() || x <= 0.0 {
        return 1.0;
    }
    let e = x.log2().round();
    (2.0f64).powi(e.clamp(-60.0, 60.0) as i32)
}
