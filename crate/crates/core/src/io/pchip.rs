//! Shape-preserving piecewise cubic Hermite interpolation (Fritsch–Carlson
//! slope limiting): exact at the anchors, C¹ between them, and free of
//! overshoot on monotone segments.

/// A monotone piecewise cubic Hermite interpolant over strictly increasing
/// abscissae. Evaluation outside the anchor range extrapolates flat.
#[derive(Debug, Clone)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Limited endpoint derivative per anchor.
    slopes: Vec<f64>,
}

impl Pchip {
    /// Anchors must be finite with strictly increasing `xs`; at least one
    /// point is required (a single point yields a constant).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, PchipError> {
        if xs.len() != ys.len() {
            return Err(PchipError::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if xs.is_empty() {
            return Err(PchipError::Empty);
        }
        for (&x, &y) in xs.iter().zip(&ys) {
            if !x.is_finite() || !y.is_finite() {
                return Err(PchipError::NonFinite);
            }
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PchipError::NotIncreasing);
        }
        let slopes = limited_slopes(&xs, &ys);
        Ok(Pchip { xs, ys, slopes })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 1 || x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        // Rightmost segment whose left anchor is <= x.
        let seg = match self.xs.partition_point(|&a| a <= x) {
            0 => 0,
            p => p - 1,
        };
        let h = self.xs[seg + 1] - self.xs[seg];
        let s = (x - self.xs[seg]) / h;
        let (y0, y1) = (self.ys[seg], self.ys[seg + 1]);
        let (d0, d1) = (self.slopes[seg], self.slopes[seg + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        // Cubic Hermite basis.
        y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + d0 * h * (s3 - 2.0 * s2 + s)
            + y1 * (-2.0 * s3 + 3.0 * s2)
            + d1 * h * (s3 - s2)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PchipError {
    #[error("anchor count mismatch: {xs} abscissae vs {ys} ordinates")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("no anchors given")]
    Empty,
    #[error("non-finite anchor")]
    NonFinite,
    #[error("abscissae not strictly increasing")]
    NotIncreasing,
}

/// Fritsch–Carlson limited derivatives: harmonic-mean interior slopes that
/// vanish at local extrema, with clamped one-sided endpoint slopes.
fn limited_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    if n == 1 {
        return vec![0.0];
    }
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = ys
        .windows(2)
        .zip(&h)
        .map(|(w, &hi)| (w[1] - w[0]) / hi)
        .collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = endpoint_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = endpoint_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// Three-point one-sided estimate, clamped to preserve shape near the end.
fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        s = 0.0;
    } else if d0 * d1 < 0.0 && s.abs() > 3.0 * d0.abs() {
        s = 3.0 * d0;
    }
    s
}

/// Expand monthly price anchors to an hourly series of length `hours`.
///
/// Anchor k sits at the center of the k-th of `monthly.len()` equal slices
/// of the horizon; hours outside the outermost anchors carry the boundary
/// values. A single anchor degenerates to a constant series.
pub fn resample_monthly_prices(monthly: &[f64], hours: usize) -> Result<Vec<f64>, PchipError> {
    if monthly.is_empty() {
        return Err(PchipError::Empty);
    }
    if monthly.len() == 1 {
        if !monthly[0].is_finite() {
            return Err(PchipError::NonFinite);
        }
        return Ok(vec![monthly[0]; hours]);
    }
    let slice = hours as f64 / monthly.len() as f64;
    let xs: Vec<f64> = (0..monthly.len())
        .map(|k| (k as f64 + 0.5) * slice)
        .collect();
    let curve = Pchip::new(xs, monthly.to_vec())?;
    Ok((0..hours).map(|t| curve.eval(t as f64 + 0.5)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_at_anchors() {
        let xs = vec![0.0, 1.0, 2.5, 4.0];
        let ys = vec![1.0, 3.0, 2.0, 2.0];
        let p = Pchip::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((p.eval(*x) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let p = Pchip::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 0.5, 3.0, 3.2]).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=300 {
            let v = p.eval(3.0 * i as f64 / 300.0);
            assert!(v >= prev - 1e-12, "not monotone at sample {i}");
            // No overshoot beyond the data range either.
            assert!((-1e-12..=3.2 + 1e-12).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn c1_continuity_at_anchors() {
        let p = Pchip::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 2.0, 1.0, 4.0]).unwrap();
        let eps = 1e-6;
        for &x in &[1.0, 2.0] {
            let left = (p.eval(x) - p.eval(x - eps)) / eps;
            let right = (p.eval(x + eps) - p.eval(x)) / eps;
            assert!((left - right).abs() < 1e-4, "kink at {x}");
        }
    }

    #[test]
    fn flat_extrapolation_and_single_anchor() {
        let p = Pchip::new(vec![1.0, 2.0], vec![5.0, 7.0]).unwrap();
        assert_eq!(p.eval(0.0), 5.0);
        assert_eq!(p.eval(9.0), 7.0);
        let flat = resample_monthly_prices(&[1.5], 24).unwrap();
        assert_eq!(flat, vec![1.5; 24]);
    }

    #[test]
    fn constant_months_resample_to_constant_hours() {
        let hourly = resample_monthly_prices(&[1.5; 12], 8760).unwrap();
        assert_eq!(hourly.len(), 8760);
        assert!(hourly.iter().all(|v| (v - 1.5).abs() < 1e-12));
    }

    #[test]
    fn increasing_months_stay_within_anchor_range() {
        let months = vec![10.0, 12.0, 13.0, 13.5, 16.0, 20.0];
        let hourly = resample_monthly_prices(&months, 4380).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for v in &hourly {
            assert!(*v >= prev - 1e-9);
            assert!((10.0 - 1e-9..=20.0 + 1e-9).contains(v));
            prev = *v;
        }
        // Anchor months are hit at their centers.
        let slice = 4380.0 / 6.0;
        for (k, m) in months.iter().enumerate() {
            let center = ((k as f64 + 0.5) * slice) as usize;
            assert!((hourly[center] - m).abs() < 0.05, "month {k}");
        }
    }

    #[test]
    fn rejects_bad_anchors() {
        assert_eq!(Pchip::new(vec![], vec![]).unwrap_err(), PchipError::Empty);
        assert_eq!(
            Pchip::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap_err(),
            PchipError::NotIncreasing
        );
        assert_eq!(
            Pchip::new(vec![0.0], vec![f64::NAN]).unwrap_err(),
            PchipError::NonFinite
        );
        assert_eq!(
            Pchip::new(vec![0.0, 1.0], vec![1.0]).unwrap_err(),
            PchipError::LengthMismatch { xs: 2, ys: 1 }
        );
    }
}
