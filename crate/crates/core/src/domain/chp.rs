use super::DomainError;
use serde::Serialize;

/// One corner of a co-generation feasible operating region.
///
/// Outputs are normalized to rated electric capacity. `fuel_share` is the
/// fuel intake relative to intake at rated electric output and lies in
/// [0, 1]; actual fuel input per unit of corner weight is
/// `fuel_share / eta_el`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ForCorner {
    pub el: f64,
    pub ht: f64,
    pub fuel_share: f64,
}

/// Convex corner-point polytope over (electricity, heat, fuel) combinations.
/// Operation of a co-generation unit is a convex combination of the corners
/// scaled by installed capacity.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibleOperatingRegion {
    pub corners: Vec<ForCorner>,
    /// Electrical efficiency in pure condensing mode.
    pub eta_el: f64,
    /// Electricity lost per unit of heat extracted.
    pub beta: f64,
    /// Backpressure coefficient: minimum electricity per unit of heat.
    pub sigma_bp: f64,
    /// Maximum heat extraction per unit of electric capacity.
    pub q_bar: f64,
}

impl FeasibleOperatingRegion {
    /// Fuel input per unit of corner weight, MWh fuel per MWh capacity.
    pub fn fuel_input(&self, corner: usize) -> f64 {
        self.corners[corner].fuel_share / self.eta_el
    }
}

/// Build the four-corner extraction-condensing operating region from the
/// three co-generation parameters and the maximum normalized heat
/// extraction `q_bar`.
///
/// Corners: full condensing (1, 0); maximum extraction on the upper
/// boundary (1 − beta·q̄, q̄); pure backpressure (sigma_bp·q̄, q̄); and the
/// origin. The fuel share of a corner is `el + beta·ht`; a corner whose
/// share would exceed 1 is rescaled onto the fuel limit. A degenerate
/// region (q̄ = 0) collapses to the two pure-condensing corners.
pub fn build_feasible_operating_region(
    eta_el: f64,
    beta: f64,
    sigma_bp: f64,
    q_bar: f64,
) -> Result<FeasibleOperatingRegion, DomainError> {
    for (name, v) in [
        ("eta_el", eta_el),
        ("beta", beta),
        ("sigma_bp", sigma_bp),
        ("q_bar", q_bar),
    ] {
        if !v.is_finite() {
            return Err(DomainError::NonFinite("build_feasible_operating_region"));
        }
        if v < 0.0 {
            return Err(DomainError::InvalidParameter { name, value: v });
        }
    }
    if eta_el <= 0.0 || eta_el > 1.0 {
        return Err(DomainError::InvalidParameter {
            name: "eta_el",
            value: eta_el,
        });
    }
    if beta * q_bar > 1.0 {
        // Heat extraction would drive electricity output negative.
        return Err(DomainError::InvalidParameter {
            name: "beta*q_bar",
            value: beta * q_bar,
        });
    }

    let mut corners = Vec::with_capacity(4);
    let mut push = |el: f64, ht: f64| {
        let share = el + beta * ht;
        if share > 1.0 {
            // Rescale onto the fuel limit, keeping the output ratio.
            corners.push(ForCorner {
                el: el / share,
                ht: ht / share,
                fuel_share: 1.0,
            });
        } else {
            corners.push(ForCorner {
                el,
                ht,
                fuel_share: share,
            });
        }
    };

    push(1.0, 0.0);
    if q_bar > 0.0 {
        push(1.0 - beta * q_bar, q_bar);
        push(sigma_bp * q_bar, q_bar);
    }
    push(0.0, 0.0);

    Ok(FeasibleOperatingRegion {
        corners,
        eta_el,
        beta,
        sigma_bp,
        q_bar,
    })
}
