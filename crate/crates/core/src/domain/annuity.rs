use super::DomainError;

/// Convert an overnight investment cost (currency/MW) into an equivalent
/// annual payment (currency/MW·a) at rate `wacc` over `lifetime` years.
///
/// The zero-rate limit degrades to straight-line depreciation.
pub fn annuity(overnight_cost: f64, wacc: f64, lifetime: f64) -> Result<f64, DomainError> {
    if !overnight_cost.is_finite() || !wacc.is_finite() || !lifetime.is_finite() {
        return Err(DomainError::NonFinite("annuity"));
    }
    if overnight_cost < 0.0 {
        return Err(DomainError::InvalidParameter {
            name: "overnight_cost",
            value: overnight_cost,
        });
    }
    if lifetime < 1.0 {
        return Err(DomainError::InvalidParameter {
            name: "lifetime",
            value: lifetime,
        });
    }
    if wacc < 0.0 {
        return Err(DomainError::InvalidParameter {
            name: "wacc",
            value: wacc,
        });
    }
    if wacc == 0.0 {
        return Ok(overnight_cost / lifetime);
    }
    Ok(overnight_cost * wacc / (1.0 - (1.0 + wacc).powf(-lifetime)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wind_onshore_reference_value() {
        // 1040 EUR/kW, 5% WACC, 30 years.
        let a = annuity(1_040_000.0, 0.05, 30.0).unwrap();
        assert!((a - 67_653.5).abs() <= 1.0, "got {a}");
    }

    #[test]
    fn pv_rooftop_reference_value() {
        let a = annuity(870_000.0, 0.05, 40.0).unwrap();
        assert!((a - 50_702.0).abs() <= 1.0, "got {a}");
    }

    #[test]
    fn zero_rate_is_straight_line() {
        assert_eq!(annuity(600.0, 0.0, 20.0).unwrap(), 30.0);
    }

    #[test]
    fn rejects_non_finite_and_invalid() {
        assert!(annuity(f64::NAN, 0.05, 30.0).is_err());
        assert!(annuity(1.0, f64::INFINITY, 30.0).is_err());
        assert!(annuity(-1.0, 0.05, 30.0).is_err());
        assert!(annuity(1.0, 0.05, 0.5).is_err());
        assert!(annuity(1.0, -0.01, 30.0).is_err());
    }

    #[test]
    fn monotone_in_cost_rate_and_lifetime() {
        let base = annuity(1000.0, 0.05, 30.0).unwrap();
        assert!(annuity(1100.0, 0.05, 30.0).unwrap() > base);
        assert!(annuity(1000.0, 0.06, 30.0).unwrap() > base);
        assert!(annuity(1000.0, 0.05, 35.0).unwrap() < base);
    }
}
