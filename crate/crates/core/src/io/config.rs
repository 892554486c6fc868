//! Scenario configuration: a sectioned key-value (TOML) file referencing
//! CSV time series. Overnight investment costs are annuitized here so the
//! rest of the pipeline only sees annual capital costs.

use crate::domain::{
    annuity, build_feasible_operating_region, DispatchableTech, Fuel, IntermittentKind,
    IntermittentTech, Product, Scenario, StorageTech, TransmissionLink, Zone,
};
use crate::io::pchip::resample_monthly_prices;
use crate::io::series::{read_series, SeriesColumn, TimeSeriesFile};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Series(#[from] crate::io::series::SeriesError),
    #[error("{path}: {context}: {source}")]
    Domain {
        path: String,
        context: String,
        source: crate::domain::DomainError,
    },
    #[error("{path}: {entity} references unknown {kind} `{target}`")]
    Dangling {
        path: String,
        entity: String,
        kind: &'static str,
        target: String,
    },
    #[error("{path}: {entity}: column `{column}` in {file} has unit `{got}`, expected `{want}`")]
    UnitMismatch {
        path: String,
        entity: String,
        file: String,
        column: String,
        got: String,
        want: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("unknown override key `{0}`")]
    UnknownOverride(String),
}

/// Scalar overrides applied on top of the config file before assembly.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// currency/tCO2, replaces every zone's CO2-price series.
    pub co2_price: Option<f64>,
    /// Overnight cost in currency/kW applied to every PV technology.
    pub pv_capital_cost: Option<f64>,
    /// GW, replaces every link's initial NTC.
    pub ntc: Option<f64>,
    /// GW, wind-onshore cap applied to every zone.
    pub wind_cap: Option<f64>,
    pub horizon: Option<usize>,
    /// Dotted keys `tech.<id>.capital_cost`: annual capital cost override.
    pub tech_capital_cost: Vec<(String, f64)>,
}

impl Overrides {
    /// Parse a `key=value` list as accepted by the command line.
    pub fn parse(pairs: &[String]) -> Result<Self, ConfigError> {
        let mut out = Overrides::default();
        for pair in pairs {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| ConfigError::UnknownOverride(pair.clone()))?;
            let parse_num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| ConfigError::UnknownOverride(pair.clone()))
            };
            match key {
                "co2_price" => out.co2_price = Some(parse_num(value)?),
                "pv_capital_cost" => out.pv_capital_cost = Some(parse_num(value)?),
                "ntc" => out.ntc = Some(parse_num(value)?),
                "wind_cap" => out.wind_cap = Some(parse_num(value)?),
                "horizon" => {
                    out.horizon = Some(
                        value
                            .parse()
                            .map_err(|_| ConfigError::UnknownOverride(pair.clone()))?,
                    )
                }
                _ => {
                    let parts: Vec<&str> = key.split('.').collect();
                    match parts.as_slice() {
                        ["tech", id, "capital_cost"] => {
                            out.tech_capital_cost.push((id.to_string(), parse_num(value)?))
                        }
                        _ => return Err(ConfigError::UnknownOverride(key.to_string())),
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Facts about the config that downstream tooling needs beyond the scenario
/// itself (for converting overnight costs supplied on sensitivity axes).
#[derive(Debug, Clone)]
pub struct ConfigMeta {
    pub wacc: f64,
    /// Lifetime in years per technology id (dispatchable and intermittent).
    pub lifetimes: BTreeMap<String, f64>,
    /// Factor applied to annual charges (horizon/8760 under proration,
    /// otherwise 1); axis values supplied as overnight costs need it too.
    pub prorate: f64,
}

// ---- raw file schema -------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    general: RawGeneral,
    #[serde(default)]
    zones: BTreeMap<String, RawZone>,
    #[serde(default)]
    fuels: BTreeMap<String, RawFuel>,
    #[serde(default)]
    technologies: BTreeMap<String, RawTech>,
    #[serde(default)]
    renewables: BTreeMap<String, RawRenewable>,
    #[serde(default)]
    storages: BTreeMap<String, RawStorage>,
    #[serde(default)]
    links: Vec<RawLink>,
    #[serde(default)]
    policy: RawPolicy,
    series: RawSeries,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeneral {
    horizon: Option<usize>,
    #[serde(default = "default_numeraire")]
    numeraire: String,
    wacc: f64,
    /// Scale annual charges (annuities, quasi-fixed O&M, fixed
    /// air-pollution rates) by horizon/8760 so sub-year runs trade capital
    /// against the energy actually dispatched.
    #[serde(default)]
    prorate_annual_costs: bool,
}

fn default_numeraire() -> String {
    "EUR".to_string()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawZone {
    voll: f64,
    #[serde(default)]
    reserve_load_factor: f64,
    #[serde(default)]
    reserve_intermittent_factor: f64,
    renewable_target: Option<f64>,
    #[serde(default)]
    distance: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFuel {
    price: Option<f64>,
    #[serde(default)]
    co2_intensity: f64,
    #[serde(default)]
    air_pollution_var: f64,
    #[serde(default)]
    air_pollution_fix: f64,
    #[serde(default)]
    renewable: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTech {
    zone: String,
    fuels: Vec<String>,
    #[serde(default)]
    eta_el: f64,
    #[serde(default)]
    eta_ht: f64,
    capacity: f64,
    #[serde(default)]
    overnight_cost: f64,
    #[serde(default = "default_lifetime")]
    lifetime: f64,
    #[serde(default)]
    om_quasi_fixed: f64,
    #[serde(default)]
    om_var: f64,
    #[serde(default)]
    expandable: bool,
    chp: Option<RawChp>,
}

fn default_lifetime() -> f64 {
    30.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChp {
    beta: f64,
    #[serde(default)]
    sigma_bp: f64,
    /// Maximum heat extraction per unit of electric capacity.
    q_bar: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRenewable {
    zone: String,
    kind: String,
    capacity: f64,
    #[serde(default)]
    overnight_cost: f64,
    #[serde(default = "default_lifetime")]
    lifetime: f64,
    #[serde(default)]
    om_quasi_fixed: f64,
    #[serde(default)]
    om_var: f64,
    profile_column: String,
    /// Annual energy (GWh over the horizon) the profile is rescaled to.
    target_energy: Option<f64>,
    air_pollution_fuel: Option<String>,
    #[serde(default)]
    expandable: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStorage {
    zone: String,
    power_out: f64,
    power_in: f64,
    energy: f64,
    eta_in: f64,
    eta_out: f64,
    #[serde(default = "default_boundary_share")]
    boundary_share: f64,
    #[serde(default)]
    overnight_cost_power: f64,
    #[serde(default)]
    overnight_cost_energy: f64,
    #[serde(default = "default_lifetime")]
    lifetime: f64,
    #[serde(default)]
    expandable: bool,
    inflow_column: Option<String>,
}

fn default_boundary_share() -> f64 {
    0.5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    from: String,
    to: String,
    ntc: f64,
    #[serde(default)]
    overnight_cost_per_mw_km: f64,
    #[serde(default = "default_lifetime")]
    lifetime: f64,
    #[serde(default)]
    expandable: bool,
    #[serde(default)]
    expansion_limit: f64,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    /// Constant CO2 price, currency/tCO2, all zones.
    co2_price: Option<f64>,
    /// Monthly CO2-price anchors resampled to hourly.
    co2_price_monthly: Option<Vec<f64>>,
    #[serde(default)]
    wind_cap: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    demand: String,
    profiles: String,
    inflows: Option<String>,
    fuel_prices: Option<String>,
    /// Monthly fuel-price anchors (per fuel) resampled to hourly; an
    /// alternative to hourly `fuel_prices` columns.
    #[serde(default)]
    fuel_prices_monthly: BTreeMap<String, Vec<f64>>,
}

// ---- loading ---------------------------------------------------------------

/// Load, override, resolve and assemble a scenario. Relative series paths
/// are taken relative to the config file's directory.
pub fn load_scenario(path: &Path, overrides: &Overrides) -> Result<(Scenario, ConfigMeta), ConfigError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: display.clone(),
        source,
    })?;
    let raw: RawConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
        path: display.clone(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    assemble(raw, base, &display, overrides)
}

fn assemble(
    mut raw: RawConfig,
    base: &Path,
    display: &str,
    ovr: &Overrides,
) -> Result<(Scenario, ConfigMeta), ConfigError> {
    let invalid = |message: String| ConfigError::Invalid {
        path: display.to_string(),
        message,
    };

    // Apply scalar overrides that act on raw (pre-annuity) values.
    if let Some(cost_per_kw) = ovr.pv_capital_cost {
        for r in raw.renewables.values_mut() {
            if r.kind == "pv" {
                r.overnight_cost = cost_per_kw * 1000.0;
            }
        }
    }
    if let Some(ntc) = ovr.ntc {
        for l in &mut raw.links {
            l.ntc = ntc;
        }
    }
    if let Some(p) = ovr.co2_price {
        raw.policy.co2_price = Some(p);
        raw.policy.co2_price_monthly = None;
    }
    if let Some(cap) = ovr.wind_cap {
        for zone in raw.zones.keys() {
            raw.policy.wind_cap.insert(zone.clone(), cap);
        }
    }

    let demand = read_series(&resolve(base, &raw.series.demand))?;
    let profiles = read_series(&resolve(base, &raw.series.profiles))?;
    let inflows = raw
        .series
        .inflows
        .as_ref()
        .map(|p| read_series(&resolve(base, p)))
        .transpose()?;
    let fuel_prices = raw
        .series
        .fuel_prices
        .as_ref()
        .map(|p| read_series(&resolve(base, p)))
        .transpose()?;

    let horizon = match ovr.horizon.or(raw.general.horizon) {
        Some(h) => h,
        None => demand.len(),
    };
    if horizon == 0 || horizon > demand.len() {
        return Err(invalid(format!(
            "horizon {horizon} exceeds demand series length {}",
            demand.len()
        )));
    }

    let wacc = raw.general.wacc;
    let prorate = if raw.general.prorate_annual_costs {
        horizon as f64 / 8760.0
    } else {
        1.0
    };
    let annualize = |overnight: f64, lifetime: f64, context: &str| {
        annuity(overnight, wacc, lifetime)
            .map(|a| a * prorate)
            .map_err(|source| ConfigError::Domain {
                path: display.to_string(),
                context: context.to_string(),
                source,
            })
    };
    let mut lifetimes = BTreeMap::new();

    let zones: Vec<Zone> = raw
        .zones
        .iter()
        .map(|(id, z)| Zone {
            id: id.clone(),
            reserve_load_factor: z.reserve_load_factor,
            reserve_intermittent_factor: z.reserve_intermittent_factor,
            voll: z.voll,
            renewable_target: z.renewable_target,
            distance_to: z.distance.clone(),
        })
        .collect();
    let zone_ids: Vec<&String> = raw.zones.keys().collect();
    let check_zone = |entity: &str, zone: &str| {
        if zone_ids.iter().any(|z| *z == zone) {
            Ok(())
        } else {
            Err(ConfigError::Dangling {
                path: display.to_string(),
                entity: entity.to_string(),
                kind: "zone",
                target: zone.to_string(),
            })
        }
    };
    for (id, z) in &raw.zones {
        for partner in z.distance.keys() {
            check_zone(&format!("zones.{id}.distance"), partner)?;
        }
    }

    let fuels: Vec<Fuel> = raw
        .fuels
        .iter()
        .map(|(id, f)| Fuel {
            id: id.clone(),
            co2_intensity: f.co2_intensity,
            air_pollution_var: f.air_pollution_var,
            air_pollution_fix: f.air_pollution_fix * prorate,
            renewable: f.renewable,
        })
        .collect();

    let mut dispatchables = Vec::new();
    for (id, t) in &raw.technologies {
        check_zone(&format!("technologies.{id}"), &t.zone)?;
        for fuel in &t.fuels {
            if !raw.fuels.contains_key(fuel) {
                return Err(ConfigError::Dangling {
                    path: display.to_string(),
                    entity: format!("technologies.{id}"),
                    kind: "fuel",
                    target: fuel.clone(),
                });
            }
        }
        let chp_region = match &t.chp {
            Some(chp) => Some(
                build_feasible_operating_region(t.eta_el, chp.beta, chp.sigma_bp, chp.q_bar)
                    .map_err(|source| ConfigError::Domain {
                        path: display.to_string(),
                        context: format!("technologies.{id}.chp"),
                        source,
                    })?,
            ),
            None => None,
        };
        let mut efficiency = BTreeMap::new();
        if chp_region.is_none() {
            for fuel in &t.fuels {
                if t.eta_el > 0.0 {
                    efficiency.insert((Product::El, fuel.clone()), t.eta_el);
                }
                if t.eta_ht > 0.0 {
                    efficiency.insert((Product::Ht, fuel.clone()), t.eta_ht);
                }
            }
            if efficiency.is_empty() {
                return Err(invalid(format!(
                    "technologies.{id}: needs eta_el or eta_ht > 0"
                )));
            }
        }
        lifetimes.insert(id.clone(), t.lifetime);
        dispatchables.push(DispatchableTech {
            id: id.clone(),
            zone: t.zone.clone(),
            fuels: t.fuels.clone(),
            efficiency,
            initial_capacity: t.capacity,
            capital_cost: annualize(t.overnight_cost, t.lifetime, &format!("technologies.{id}"))?,
            om_quasi_fixed: t.om_quasi_fixed * prorate,
            om_var: t.om_var,
            expandable: t.expandable,
            chp_region,
        });
    }

    let mut intermittents = Vec::new();
    for (id, r) in &raw.renewables {
        check_zone(&format!("renewables.{id}"), &r.zone)?;
        let kind = IntermittentKind::parse(&r.kind).ok_or_else(|| {
            invalid(format!("renewables.{id}: unknown kind `{}`", r.kind))
        })?;
        if let Some(fuel) = &r.air_pollution_fuel {
            if !raw.fuels.contains_key(fuel) {
                return Err(ConfigError::Dangling {
                    path: display.to_string(),
                    entity: format!("renewables.{id}"),
                    kind: "fuel",
                    target: fuel.clone(),
                });
            }
        }
        let column = series_column(
            &profiles,
            &r.profile_column,
            "ratio",
            &format!("renewables.{id}"),
            display,
        )?;
        let mut profile: Vec<f64> = column.values[..horizon].to_vec();
        if let Some(target) = r.target_energy {
            profile = crate::io::preprocess::scale_profile(&profile, target, r.capacity)
                .map_err(|e| invalid(format!("renewables.{id}: {e}")))?;
        }
        lifetimes.insert(id.clone(), r.lifetime);
        intermittents.push(IntermittentTech {
            id: id.clone(),
            kind,
            zone: r.zone.clone(),
            initial_capacity: r.capacity,
            capital_cost: annualize(r.overnight_cost, r.lifetime, &format!("renewables.{id}"))?,
            om_quasi_fixed: r.om_quasi_fixed * prorate,
            om_var: r.om_var,
            profile,
            expandable: r.expandable,
            air_pollution_fuel: r.air_pollution_fuel.clone(),
        });
    }

    let mut storages = Vec::new();
    for (id, s) in &raw.storages {
        check_zone(&format!("storages.{id}"), &s.zone)?;
        let inflow = match &s.inflow_column {
            Some(column) => {
                let file = inflows.as_ref().ok_or_else(|| {
                    invalid(format!(
                        "storages.{id}: inflow_column given but series.inflows missing"
                    ))
                })?;
                series_column(file, column, "GW", &format!("storages.{id}"), display)?.values
                    [..horizon]
                    .to_vec()
            }
            None => vec![0.0; horizon],
        };
        storages.push(StorageTech {
            id: id.clone(),
            zone: s.zone.clone(),
            power_out: s.power_out,
            power_in: s.power_in,
            energy_cap: s.energy,
            eta_in: s.eta_in,
            eta_out: s.eta_out,
            inflows: inflow,
            capital_cost_power: annualize(
                s.overnight_cost_power,
                s.lifetime,
                &format!("storages.{id}"),
            )?,
            capital_cost_energy: annualize(
                s.overnight_cost_energy,
                s.lifetime,
                &format!("storages.{id}"),
            )?,
            expandable: s.expandable,
            boundary_level: s.boundary_share * s.energy,
        });
    }

    let mut links = Vec::new();
    for (i, l) in raw.links.iter().enumerate() {
        check_zone(&format!("links[{i}]"), &l.from)?;
        check_zone(&format!("links[{i}]"), &l.to)?;
        links.push(TransmissionLink {
            zones: (l.from.clone(), l.to.clone()),
            ntc: l.ntc,
            capital_cost: annualize(l.overnight_cost_per_mw_km, l.lifetime, &format!("links[{i}]"))?,
            expandable: l.expandable,
            expansion_limit: l.expansion_limit,
        });
    }

    // Demand columns are `<zone>_el` / `<zone>_ht`; heat is optional.
    let mut demand_map = BTreeMap::new();
    for (id, _) in &raw.zones {
        for product in Product::ALL {
            let name = format!("{id}_{}", product.as_str());
            match demand.column(&name) {
                Some(column) => {
                    let values = in_gw(column, &name, &demand, display)?;
                    demand_map.insert((id.clone(), product), values[..horizon].to_vec());
                }
                None if product == Product::El => {
                    return Err(invalid(format!(
                        "demand file {} lacks column `{name}`",
                        demand.path.display()
                    )));
                }
                None => {}
            }
        }
    }

    // Fuel prices: hourly column, else monthly anchors, else scalar, else 0.
    let mut price_map = BTreeMap::new();
    for (fuel_id, fuel) in &raw.fuels {
        let series: Vec<f64> = if let Some(column) =
            fuel_prices.as_ref().and_then(|f| f.column(fuel_id))
        {
            expect_unit(column, "currency/MWh", fuel_prices.as_ref().unwrap(), fuel_id, display)?;
            if column.values.len() < horizon {
                return Err(invalid(format!(
                    "fuel price column `{fuel_id}` shorter than horizon"
                )));
            }
            column.values[..horizon].to_vec()
        } else if let Some(monthly) = raw.series.fuel_prices_monthly.get(fuel_id) {
            resample_monthly_prices(monthly, horizon)
                .map_err(|e| invalid(format!("fuels.{fuel_id}: {e}")))?
        } else {
            vec![fuel.price.unwrap_or(0.0); horizon]
        };
        for zone in raw.zones.keys() {
            price_map.insert((zone.clone(), fuel_id.clone()), series.clone());
        }
    }
    for fuel_id in raw.series.fuel_prices_monthly.keys() {
        if !raw.fuels.contains_key(fuel_id) {
            return Err(ConfigError::Dangling {
                path: display.to_string(),
                entity: "series.fuel_prices_monthly".to_string(),
                kind: "fuel",
                target: fuel_id.clone(),
            });
        }
    }

    let co2_series: Vec<f64> = if let Some(monthly) = &raw.policy.co2_price_monthly {
        resample_monthly_prices(monthly, horizon)
            .map_err(|e| invalid(format!("policy.co2_price_monthly: {e}")))?
    } else {
        vec![raw.policy.co2_price.unwrap_or(0.0); horizon]
    };
    let co2_price = raw
        .zones
        .keys()
        .map(|z| (z.clone(), co2_series.clone()))
        .collect();

    for zone in raw.policy.wind_cap.keys() {
        check_zone("policy.wind_cap", zone)?;
    }

    let mut scenario = Scenario {
        horizon,
        zones,
        fuels,
        dispatchables,
        intermittents,
        storages,
        links,
        demand: demand_map,
        fuel_prices: price_map,
        co2_price,
        wind_cap: raw.policy.wind_cap.clone(),
        numeraire: raw.general.numeraire.clone(),
    };

    for (id, cost) in &ovr.tech_capital_cost {
        let mut found = false;
        if let Some(t) = scenario.dispatchables.iter_mut().find(|t| &t.id == id) {
            t.capital_cost = *cost;
            found = true;
        }
        if let Some(t) = scenario.intermittents.iter_mut().find(|t| &t.id == id) {
            t.capital_cost = *cost;
            found = true;
        }
        if !found {
            return Err(ConfigError::UnknownOverride(format!("tech.{id}.capital_cost")));
        }
    }

    Ok((scenario, ConfigMeta { wacc, lifetimes, prorate }))
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn series_column<'a>(
    file: &'a TimeSeriesFile,
    name: &str,
    want_unit: &str,
    entity: &str,
    display: &str,
) -> Result<&'a SeriesColumn, ConfigError> {
    let column = file.column(name).ok_or_else(|| ConfigError::Dangling {
        path: display.to_string(),
        entity: entity.to_string(),
        kind: "series column",
        target: name.to_string(),
    })?;
    expect_unit(column, want_unit, file, entity, display)?;
    Ok(column)
}

fn expect_unit(
    column: &SeriesColumn,
    want: &str,
    file: &TimeSeriesFile,
    entity: &str,
    display: &str,
) -> Result<(), ConfigError> {
    if column.unit != want {
        return Err(ConfigError::UnitMismatch {
            path: display.to_string(),
            entity: entity.to_string(),
            file: file.path.display().to_string(),
            column: column.name.clone(),
            got: column.unit.clone(),
            want: want.to_string(),
        });
    }
    Ok(())
}

/// Demand may arrive in MW or GW; normalize to GW.
fn in_gw(
    column: &SeriesColumn,
    name: &str,
    file: &TimeSeriesFile,
    display: &str,
) -> Result<Vec<f64>, ConfigError> {
    match column.unit.as_str() {
        "GW" => Ok(column.values.clone()),
        "MW" => Ok(column.values.iter().map(|v| v / 1000.0).collect()),
        other => Err(ConfigError::UnitMismatch {
            path: display.to_string(),
            entity: "demand".to_string(),
            file: file.path.display().to_string(),
            column: name.to_string(),
            got: other.to_string(),
            want: "GW or MW".to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn stamps(n: usize) -> Vec<String> {
        let start = crate::io::series::parse_utc("2016-01-04T00:00:00Z").unwrap();
        (0..n)
            .map(|i| crate::io::series::format_utc(start + 3600 * i as i64))
            .collect()
    }

    fn series_csv(columns: &[(&str, &str, &dyn Fn(usize) -> f64)], n: usize) -> String {
        let mut out = String::from("timestamp");
        for (name, _, _) in columns {
            out.push(',');
            out.push_str(name);
        }
        out.push_str("\nunit");
        for (_, unit, _) in columns {
            out.push(',');
            out.push_str(unit);
        }
        out.push('\n');
        for (i, stamp) in stamps(n).iter().enumerate() {
            out.push_str(stamp);
            for (_, _, f) in columns {
                out.push_str(&format!(",{}", f(i)));
            }
            out.push('\n');
        }
        out
    }

    fn base_config() -> String {
        r#"
[general]
wacc = 0.05
horizon = 24

[zones.AT]
voll = 12500.0
reserve_load_factor = 0.175
reserve_intermittent_factor = 0.15
[zones.AT.distance]
DE = 350.0

[zones.DE]
voll = 12500.0
[zones.DE.distance]
AT = 350.0

[fuels.gas]
price = 13.62
co2_intensity = 0.201

[fuels.wind]
renewable = true
air_pollution_fix = 2831.0

[technologies.gas_at]
zone = "AT"
fuels = ["gas"]
eta_el = 0.55
capacity = 4.0
overnight_cost = 800000.0
lifetime = 30.0
om_quasi_fixed = 20000.0
om_var = 3.0
expandable = true

[renewables.wind_at]
zone = "AT"
kind = "wind_on"
capacity = 2.6
overnight_cost = 1040000.0
lifetime = 30.0
om_quasi_fixed = 12500.0
om_var = 1.25
profile_column = "wind_at"
air_pollution_fuel = "wind"
expandable = true

[storages.psp_at]
zone = "AT"
power_out = 4.0
power_in = 3.5
energy = 100.0
eta_in = 0.9
eta_out = 0.9

[[links]]
from = "AT"
to = "DE"
ntc = 4.9
overnight_cost_per_mw_km = 400.0
lifetime = 40.0

[policy]
co2_price = 25.0

[series]
demand = "demand.csv"
profiles = "profiles.csv"
"#
        .to_string()
    }

    fn write_base(dir: &Path) -> PathBuf {
        write(
            dir,
            "demand.csv",
            &series_csv(
                &[
                    ("AT_el", "GW", &|i| 5.0 + 0.1 * i as f64),
                    ("DE_el", "GW", &|_| 60.0),
                ],
                24,
            ),
        );
        write(
            dir,
            "profiles.csv",
            &series_csv(&[("wind_at", "ratio", &|i| 0.2 + 0.01 * (i % 7) as f64)], 24),
        );
        write(dir, "model.toml", &base_config())
    }

    #[test]
    fn loads_toy_config_and_annuitizes() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_base(dir.path());
        let (s, meta) = load_scenario(&path, &Overrides::default()).unwrap();
        assert_eq!(s.horizon, 24);
        assert_eq!(s.zones.len(), 2);
        assert!(crate::domain::validate_scenario(&s).is_empty());
        let wind = &s.intermittents[0];
        assert_eq!(wind.initial_capacity, 2.6);
        // 1040 EUR/kW over 30 a at 5%.
        assert!((wind.capital_cost - 67_653.49).abs() < 0.5);
        assert_eq!(meta.lifetimes["wind_at"], 30.0);
        assert_eq!(s.fuel_prices[&("AT".to_string(), "gas".to_string())][0], 13.62);
        assert_eq!(s.co2_price["DE"][23], 25.0);
        assert_eq!(s.demand[&("AT".to_string(), crate::domain::Product::El)][1], 5.1);
    }

    #[test]
    fn overrides_replace_scalars() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_base(dir.path());
        let ovr = Overrides::parse(&[
            "co2_price=0".to_string(),
            "ntc=10".to_string(),
            "wind_cap=1.5".to_string(),
            "horizon=12".to_string(),
            "tech.gas_at.capital_cost=55000".to_string(),
        ])
        .unwrap();
        let (s, _) = load_scenario(&path, &ovr).unwrap();
        assert_eq!(s.horizon, 12);
        assert_eq!(s.co2_price["AT"], vec![0.0; 12]);
        assert_eq!(s.links[0].ntc, 10.0);
        assert_eq!(s.wind_cap["AT"], 1.5);
        assert_eq!(s.dispatchables[0].capital_cost, 55_000.0);
        assert!(matches!(
            Overrides::parse(&["mystery=1".to_string()]).unwrap_err(),
            ConfigError::UnknownOverride(_)
        ));
    }

    #[test]
    fn dangling_fuel_names_the_technology() {
        let dir = tempfile::tempdir().unwrap();
        write_base(dir.path());
        let bad = base_config().replace("fuels = [\"gas\"]", "fuels = [\"coal\"]");
        let path = write(dir.path(), "bad.toml", &bad);
        let e = load_scenario(&path, &Overrides::default()).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("technologies.gas_at") && msg.contains("coal"), "{msg}");
    }

    #[test]
    fn unit_mismatch_is_reported_with_context() {
        let dir = tempfile::tempdir().unwrap();
        write_base(dir.path());
        write(
            dir.path(),
            "profiles.csv",
            &series_csv(&[("wind_at", "GWh", &|_| 0.3)], 24),
        );
        let path = dir.path().join("model.toml");
        let e = load_scenario(&path, &Overrides::default()).unwrap_err();
        assert!(matches!(e, ConfigError::UnitMismatch { .. }), "{e}");
    }

    #[test]
    fn missing_mandatory_key_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        write_base(dir.path());
        let bad = base_config().replace("wacc = 0.05", "");
        let path = write(dir.path(), "bad.toml", &bad);
        let e = load_scenario(&path, &Overrides::default()).unwrap_err();
        assert!(e.to_string().contains("wacc"), "{e}");
    }
}
