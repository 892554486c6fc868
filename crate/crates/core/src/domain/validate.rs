use super::{Product, Scenario};
use std::fmt;

/// A single validation finding, carrying the entity path and the rule that
/// was breached.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub rule: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: [{}] {}", self.path, self.rule, self.message)
    }
}

macro_rules! violation {
    ($out:expr, $path:expr, $rule:expr, $($msg:tt)*) => {
        $out.push(Violation {
            path: $path.to_string(),
            rule: $rule,
            message: format!($($msg)*),
        })
    };
}

/// Check every type invariant and cross-reference of a scenario. Returns an
/// empty list iff the scenario is well-formed; never fails.
pub fn validate_scenario(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let horizon = s.horizon;

    let check_series = |out: &mut Vec<Violation>, path: &str, series: &[f64], nonneg: bool| {
        if series.len() != horizon {
            violation!(
                out,
                path,
                "series-length",
                "length {} does not match horizon {horizon}",
                series.len()
            );
        }
        for (t, v) in series.iter().enumerate() {
            if !v.is_finite() {
                violation!(out, path, "series-finite", "non-finite value at index {t}");
                break;
            }
            if nonneg && *v < 0.0 {
                violation!(out, path, "series-nonneg", "negative value {v} at index {t}");
                break;
            }
        }
    };

    for z in &s.zones {
        let path = format!("zone.{}", z.id);
        if z.reserve_load_factor < 0.0 {
            violation!(out, path, "reserve-load-factor", "lambda must be >= 0");
        }
        if z.reserve_intermittent_factor < 0.0 {
            violation!(out, path, "reserve-intermittent-factor", "sigma must be >= 0");
        }
        if !(z.voll > 0.0) {
            violation!(out, path, "voll-positive", "value of lost load must be > 0");
        }
        if let Some(target) = z.renewable_target {
            if target < 0.0 {
                violation!(out, path, "target-nonneg", "renewable target must be >= 0");
            }
        }
        for (other, d) in &z.distance_to {
            if *d < 0.0 {
                violation!(out, path, "distance-nonneg", "distance to {other} is negative");
            }
            match s.zone(other) {
                None => {
                    violation!(out, path, "dangling-zone", "distance partner {other} unknown")
                }
                Some(oz) => {
                    let back = oz.distance_to.get(&z.id);
                    if back != Some(d) {
                        violation!(
                            out,
                            path,
                            "distance-symmetric",
                            "distance to {other} not mirrored"
                        );
                    }
                }
            }
        }
    }

    for f in &s.fuels {
        let path = format!("fuel.{}", f.id);
        if f.co2_intensity < 0.0 {
            violation!(out, path, "co2-intensity-nonneg", "epsilon must be >= 0");
        }
        if (f.id == "biomass" || f.id == "power") && f.co2_intensity != 0.0 {
            violation!(out, path, "co2-intensity-zero", "{} must have zero CO2 intensity", f.id);
        }
        if f.air_pollution_var < 0.0 || f.air_pollution_fix < 0.0 {
            violation!(out, path, "air-pollution-nonneg", "pollution cost must be >= 0");
        }
    }

    for d in &s.dispatchables {
        let path = format!("dispatchable.{}", d.id);
        if s.zone(&d.zone).is_none() {
            violation!(out, path, "dangling-zone", "zone {} unknown", d.zone);
        }
        if d.fuels.is_empty() {
            violation!(out, path, "fuel-set-nonempty", "no admissible fuel");
        }
        for f in &d.fuels {
            if s.fuel(f).is_none() {
                violation!(out, path, "dangling-fuel", "fuel {f} unknown");
            }
        }
        if d.initial_capacity < 0.0 {
            violation!(out, path, "capacity-nonneg", "initial capacity must be >= 0");
        }
        if d.capital_cost < 0.0 || d.om_quasi_fixed < 0.0 || d.om_var < 0.0 {
            violation!(out, path, "cost-nonneg", "costs must be >= 0");
        }
        match &d.chp_region {
            None => {
                if d.efficiency.is_empty() {
                    violation!(out, path, "efficiency-missing", "no efficiency entries");
                }
                for ((m, f), eta) in &d.efficiency {
                    if !(*eta > 0.0) || *eta > 1.0 && *m != Product::Ht {
                        // Heat pumps exceed 1 on heat output; electric
                        // efficiency must stay within (0, 1].
                        violation!(
                            out,
                            path,
                            "efficiency-range",
                            "eta({},{f}) = {eta} outside (0, 1]",
                            m.as_str()
                        );
                    }
                }
            }
            Some(region) => {
                for (l, c) in region.corners.iter().enumerate() {
                    if c.el < 0.0 || c.ht < 0.0 || !(0.0..=1.0).contains(&c.fuel_share) {
                        violation!(out, path, "for-corner-range", "corner l{} out of range", l + 1);
                    }
                    if (c.el > 0.0 || c.ht > 0.0) && c.fuel_share == 0.0 {
                        violation!(
                            out,
                            path,
                            "for-output-without-fuel",
                            "corner l{} produces output without fuel input",
                            l + 1
                        );
                    }
                }
            }
        }
    }

    for r in &s.intermittents {
        let path = format!("intermittent.{}", r.id);
        if s.zone(&r.zone).is_none() {
            violation!(out, path, "dangling-zone", "zone {} unknown", r.zone);
        }
        if r.initial_capacity < 0.0 {
            violation!(out, path, "capacity-nonneg", "initial capacity must be >= 0");
        }
        if let Some(f) = &r.air_pollution_fuel {
            if s.fuel(f).is_none() {
                violation!(out, path, "dangling-fuel", "pollution fuel {f} unknown");
            }
        }
        if r.profile.len() != horizon {
            violation!(
                out,
                format!("{path}.profile"),
                "series-length",
                "length {} does not match horizon {horizon}",
                r.profile.len()
            );
        }
        for (t, phi) in r.profile.iter().enumerate() {
            if !phi.is_finite() || !(0.0..=1.0).contains(phi) {
                violation!(
                    out,
                    format!("{path}.profile"),
                    "profile-range",
                    "value {phi} at index {t} outside [0, 1]"
                );
                break;
            }
        }
    }

    for st in &s.storages {
        let path = format!("storage.{}", st.id);
        if s.zone(&st.zone).is_none() {
            violation!(out, path, "dangling-zone", "zone {} unknown", st.zone);
        }
        for (name, v) in [
            ("power_out", st.power_out),
            ("power_in", st.power_in),
            ("energy_cap", st.energy_cap),
            ("boundary_level", st.boundary_level),
        ] {
            if v < 0.0 {
                violation!(out, path, "capacity-nonneg", "{name} must be >= 0");
            }
        }
        for (name, eta) in [("eta_in", st.eta_in), ("eta_out", st.eta_out)] {
            if !(eta > 0.0) || eta > 1.0 {
                violation!(out, path, "efficiency-range", "{name} = {eta} outside (0, 1]");
            }
        }
        if st.eta_in * st.eta_out > 1.0 {
            violation!(out, path, "round-trip-efficiency", "eta_in * eta_out exceeds 1");
        }
        if st.energy_cap < st.power_in.max(st.power_out) {
            violation!(
                out,
                path,
                "energy-vs-power",
                "energy capacity below one hour of charge/discharge"
            );
        }
        if st.boundary_level > st.energy_cap && !st.expandable {
            violation!(out, path, "boundary-level", "boundary fill exceeds energy capacity");
        }
        check_series(&mut out, &format!("{path}.inflows"), &st.inflows, true);
    }

    for l in &s.links {
        let path = format!("link.{}-{}", l.zones.0, l.zones.1);
        for zid in [&l.zones.0, &l.zones.1] {
            if s.zone(zid).is_none() {
                violation!(out, path, "dangling-zone", "zone {zid} unknown");
            }
        }
        if l.ntc < 0.0 {
            violation!(out, path, "ntc-nonneg", "initial NTC must be >= 0");
        }
        if l.expandable {
            if l.expansion_limit <= 0.0 {
                violation!(out, path, "expansion-limit", "expandable link needs a positive limit");
            }
            let known = s
                .zone(&l.zones.0)
                .map(|z| z.distance_to.contains_key(&l.zones.1))
                .unwrap_or(false);
            if !known {
                violation!(out, path, "distance-missing", "no distance for expandable link");
            }
        }
    }

    for ((zone, product), series) in &s.demand {
        let path = format!("demand.{zone}.{}", product.as_str());
        if s.zone(zone).is_none() {
            violation!(out, path, "dangling-zone", "zone {zone} unknown");
        }
        check_series(&mut out, &path, series, true);
    }
    for ((zone, fuel), series) in &s.fuel_prices {
        let path = format!("fuel_price.{zone}.{fuel}");
        if s.fuel(fuel).is_none() {
            violation!(out, path, "dangling-fuel", "fuel {fuel} unknown");
        }
        check_series(&mut out, &path, series, true);
    }
    for (zone, series) in &s.co2_price {
        check_series(&mut out, &format!("co2_price.{zone}"), series, true);
    }
    for (zone, cap) in &s.wind_cap {
        if s.zone(zone).is_none() {
            violation!(out, format!("wind_cap.{zone}"), "dangling-zone", "zone unknown");
        }
        if *cap < 0.0 {
            violation!(out, format!("wind_cap.{zone}"), "cap-nonneg", "wind cap must be >= 0");
        }
    }

    // Duplicate identifiers.
    let mut seen = std::collections::BTreeSet::new();
    for id in s
        .zones
        .iter()
        .map(|z| format!("zone.{}", z.id))
        .chain(s.fuels.iter().map(|f| format!("fuel.{}", f.id)))
        .chain(s.dispatchables.iter().map(|d| format!("tech.{}", d.id)))
        .chain(s.intermittents.iter().map(|r| format!("tech.{}", r.id)))
        .chain(s.storages.iter().map(|k| format!("tech.{}", k.id)))
    {
        if !seen.insert(id.clone()) {
            violation!(out, id, "duplicate-id", "identifier used twice");
        }
    }

    out
}
