//! Numerical preprocessing applied to raw series before scenario assembly:
//! rescaling capacity-factor profiles to reported annual energy and
//! reconstructing reservoir inflows from fill levels and flows.

use super::pchip::Pchip;

pub const HOURS_PER_WEEK: usize = 168;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PreprocessError {
    #[error("capacity must be positive, got {0}")]
    NonPositiveCapacity(f64),
    #[error("profile energy is zero; cannot scale to target {target}")]
    ZeroProfile { target: f64 },
    #[error("scaling factor {factor:.6} pushes profile to {max:.6} > 1 at hour {index}")]
    ExceedsUnity { factor: f64, max: f64, index: usize },
    #[error("profile values must lie in [0, 1]; got {value} at hour {index}")]
    OutOfRange { value: f64, index: usize },
    #[error("{0} hourly values do not tile whole weeks of {HOURS_PER_WEEK} h")]
    RaggedWeeks(usize),
    #[error("{fills} fill levels need {} hourly values, got {hours}", (fills - 1) * HOURS_PER_WEEK)]
    SpanMismatch { fills: usize, hours: usize },
    #[error("efficiency must lie in (0, 1], got {0}")]
    BadEfficiency(f64),
}

/// Rescale a capacity-factor profile so that `capacity · Σ profile · 1 h`
/// equals `target_energy`. Shape is preserved exactly; a factor that would
/// push any hour above 1 is rejected with the offending peak.
pub fn scale_profile(
    profile: &[f64],
    target_energy: f64,
    capacity: f64,
) -> Result<Vec<f64>, PreprocessError> {
    if capacity <= 0.0 {
        return Err(PreprocessError::NonPositiveCapacity(capacity));
    }
    for (index, &value) in profile.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(PreprocessError::OutOfRange { value, index });
        }
    }
    let sum: f64 = profile.iter().sum();
    if sum == 0.0 {
        if target_energy == 0.0 {
            return Ok(profile.to_vec());
        }
        return Err(PreprocessError::ZeroProfile {
            target: target_energy,
        });
    }
    let factor = target_energy / (capacity * sum);
    let (index, max) = profile
        .iter()
        .map(|v| v * factor)
        .enumerate()
        .fold((0, 0.0_f64), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    if max > 1.0 + 1e-12 {
        return Err(PreprocessError::ExceedsUnity { factor, max, index });
    }
    Ok(profile.iter().map(|v| v * factor).collect())
}

/// Reconstruct hourly reservoir inflows (GW) from weekly fill levels (GWh,
/// one level per week boundary) and hourly generation/pumping (GW).
///
/// Weekly inflow energy = Δfill + generation/η_out − η_in·pumping; negative
/// estimates are clamped to zero and logged. Weekly energies are spread to
/// hours with a shape-preserving cubic through the week midpoints and then
/// rescaled so every week's hourly sum reproduces its estimate exactly.
pub fn estimate_inflows(
    weekly_fill: &[f64],
    generation: &[f64],
    pumping: &[f64],
    eta_in: f64,
    eta_out: f64,
) -> Result<Vec<f64>, PreprocessError> {
    for eta in [eta_in, eta_out] {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(PreprocessError::BadEfficiency(eta));
        }
    }
    if generation.len() != pumping.len() || generation.len() % HOURS_PER_WEEK != 0 {
        return Err(PreprocessError::RaggedWeeks(generation.len().max(pumping.len())));
    }
    let weeks = generation.len() / HOURS_PER_WEEK;
    if weekly_fill.len() != weeks + 1 || weeks == 0 {
        return Err(PreprocessError::SpanMismatch {
            fills: weekly_fill.len(),
            hours: generation.len(),
        });
    }

    let mut weekly = Vec::with_capacity(weeks);
    for w in 0..weeks {
        let hours = w * HOURS_PER_WEEK..(w + 1) * HOURS_PER_WEEK;
        let out_energy: f64 = generation[hours.clone()].iter().sum();
        let in_energy: f64 = pumping[hours].iter().sum();
        let mut inflow =
            (weekly_fill[w + 1] - weekly_fill[w]) + out_energy / eta_out - eta_in * in_energy;
        if inflow < 0.0 {
            log::warn!("week {w}: negative inflow estimate {inflow:.3} GWh clamped to 0");
            inflow = 0.0;
        }
        weekly.push(inflow);
    }

    // Smooth weekly mean powers through week midpoints, then restore each
    // week's energy exactly.
    let xs: Vec<f64> = (0..weeks)
        .map(|w| (w as f64 + 0.5) * HOURS_PER_WEEK as f64)
        .collect();
    let means: Vec<f64> = weekly.iter().map(|e| e / HOURS_PER_WEEK as f64).collect();
    let curve = Pchip::new(xs, means).expect("midpoints are strictly increasing");
    let mut hourly: Vec<f64> = (0..generation.len())
        .map(|t| curve.eval(t as f64 + 0.5).max(0.0))
        .collect();
    for w in 0..weeks {
        let hours = w * HOURS_PER_WEEK..(w + 1) * HOURS_PER_WEEK;
        let sum: f64 = hourly[hours.clone()].iter().sum();
        if sum > 0.0 {
            let k = weekly[w] / sum;
            for v in &mut hourly[hours] {
                *v *= k;
            }
        } else {
            let flat = weekly[w] / HOURS_PER_WEEK as f64;
            for v in &mut hourly[hours] {
                *v = flat;
            }
        }
    }
    Ok(hourly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_when_energy_already_matches() {
        // Flat 0.5 over 10 h at 1 capacity holds 5 energy units.
        let out = scale_profile(&[0.5; 10], 5.0, 1.0).unwrap();
        assert_eq!(out, vec![0.5; 10]);
    }

    #[test]
    fn halving_target_halves_profile() {
        let out = scale_profile(&[0.5; 10], 2.5, 1.0).unwrap();
        assert_eq!(out, vec![0.25; 10]);
    }

    #[test]
    fn preserves_shape_ratio() {
        let profile = [0.1, 0.4, 0.2, 0.3];
        let out = scale_profile(&profile, 1.5, 1.0).unwrap();
        let k = out[0] / profile[0];
        for (o, p) in out.iter().zip(&profile) {
            assert!((o / p - k).abs() < 1e-12);
        }
        assert!((out.iter().sum::<f64>() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_scaling_past_one() {
        let e = scale_profile(&[0.5, 1.0, 0.5], 4.0, 1.0).unwrap_err();
        match e {
            PreprocessError::ExceedsUnity { max, index, .. } => {
                assert_eq!(index, 1);
                assert!((max - 2.0).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            scale_profile(&[0.5], 1.0, 0.0).unwrap_err(),
            PreprocessError::NonPositiveCapacity(0.0)
        );
        assert!(matches!(
            scale_profile(&[0.0; 4], 1.0, 1.0).unwrap_err(),
            PreprocessError::ZeroProfile { .. }
        ));
        assert!(matches!(
            scale_profile(&[1.2], 1.0, 1.0).unwrap_err(),
            PreprocessError::OutOfRange { index: 0, .. }
        ));
    }

    #[test]
    fn constant_fill_without_flows_means_zero_inflow() {
        let zeros = vec![0.0; 2 * HOURS_PER_WEEK];
        let inflow = estimate_inflows(&[40.0, 40.0, 40.0], &zeros, &zeros, 0.9, 0.9).unwrap();
        assert!(inflow.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rising_fill_implies_flat_one_gw() {
        let zeros = vec![0.0; HOURS_PER_WEEK];
        let inflow = estimate_inflows(&[0.0, 168.0], &zeros, &zeros, 0.9, 0.9).unwrap();
        assert_eq!(inflow.len(), HOURS_PER_WEEK);
        for v in &inflow {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn generation_at_unit_efficiency_is_replaced_by_inflow() {
        let gen = vec![100.0 / HOURS_PER_WEEK as f64; HOURS_PER_WEEK];
        let zeros = vec![0.0; HOURS_PER_WEEK];
        let inflow = estimate_inflows(&[50.0, 50.0], &gen, &zeros, 1.0, 1.0).unwrap();
        assert!((inflow.iter().sum::<f64>() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn weekly_energy_closure_holds_on_noisy_data() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let weeks = 6;
        let fills: Vec<f64> = (0..=weeks).map(|_| rng.gen_range(0.0..500.0)).collect();
        let gen: Vec<f64> = (0..weeks * HOURS_PER_WEEK)
            .map(|_| rng.gen_range(0.0..2.0))
            .collect();
        let pump: Vec<f64> = (0..weeks * HOURS_PER_WEEK)
            .map(|_| rng.gen_range(0.0..1.0))
            .collect();
        let inflow = estimate_inflows(&fills, &gen, &pump, 0.87, 0.9).unwrap();
        for w in 0..weeks {
            let hours = w * HOURS_PER_WEEK..(w + 1) * HOURS_PER_WEEK;
            let out: f64 = gen[hours.clone()].iter().sum();
            let into: f64 = pump[hours.clone()].iter().sum();
            let expect = ((fills[w + 1] - fills[w]) + out / 0.9 - 0.87 * into).max(0.0);
            let got: f64 = inflow[hours].iter().sum();
            assert!((got - expect).abs() < 1e-6, "week {w}: {got} vs {expect}");
        }
        assert!(inflow.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn rejects_span_mismatch() {
        let zeros = vec![0.0; HOURS_PER_WEEK];
        assert!(matches!(
            estimate_inflows(&[0.0, 1.0, 2.0], &zeros, &zeros, 0.9, 0.9).unwrap_err(),
            PreprocessError::SpanMismatch { .. }
        ));
        assert!(matches!(
            estimate_inflows(&[0.0, 1.0], &zeros[..100], &zeros[..100], 0.9, 0.9).unwrap_err(),
            PreprocessError::RaggedWeeks(100)
        ));
    }
}
