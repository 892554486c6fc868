//! Domain types for zones, fuels, technologies and scenario assembly,
//! plus the pure parameter transformations applied before LP construction.

mod annuity;
mod chp;
mod validate;

pub use annuity::annuity;
pub use chp::{build_feasible_operating_region, FeasibleOperatingRegion, ForCorner};
pub use validate::{validate_scenario, Violation};

use serde::Serialize;
use std::collections::BTreeMap;

/// Errors raised by pure domain computations.
#[derive(Debug, thiserror::Error)]
pub enum DomainError {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

/// Energy products cleared on zonal markets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Product {
    El,
    Ht,
}

impl Product {
    pub const ALL: [Product; 2] = [Product::El, Product::Ht];

    pub fn as_str(&self) -> &'static str {
        match self {
            Product::El => "el",
            Product::Ht => "ht",
        }
    }
}

/// Classes of intermittent generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum IntermittentKind {
    WindOn,
    WindOff,
    Pv,
    Ror,
}

impl IntermittentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            IntermittentKind::WindOn => "wind_on",
            IntermittentKind::WindOff => "wind_off",
            IntermittentKind::Pv => "pv",
            IntermittentKind::Ror => "ror",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "wind_on" => Some(IntermittentKind::WindOn),
            "wind_off" => Some(IntermittentKind::WindOff),
            "pv" => Some(IntermittentKind::Pv),
            "ror" => Some(IntermittentKind::Ror),
            _ => None,
        }
    }
}

/// A market zone: a copper-plate region with its own hourly clearing for
/// electricity and heat.
#[derive(Debug, Clone, Serialize)]
pub struct Zone {
    pub id: String,
    /// Spinning-reserve requirement as a fraction of electricity peak load.
    pub reserve_load_factor: f64,
    /// Spinning-reserve requirement as a fraction of peak intermittent
    /// generation capability.
    pub reserve_intermittent_factor: f64,
    /// Value of lost load, currency/MWh.
    pub voll: f64,
    /// Annual renewable-generation target, GWh/a.
    pub renewable_target: Option<f64>,
    /// Distance to partner zones, km, used to price transmission expansion.
    pub distance_to: BTreeMap<String, f64>,
}

/// A primary energy carrier (or the pseudo-fuel `power` consumed by
/// power-to-heat units).
#[derive(Debug, Clone, Serialize)]
pub struct Fuel {
    pub id: String,
    /// tCO2 per MWh of fuel burned.
    pub co2_intensity: f64,
    /// External air-pollution cost, currency per MWh of fuel burned.
    pub air_pollution_var: f64,
    /// External air-pollution cost, currency per MW of capacity and year.
    pub air_pollution_fix: f64,
    /// Counts toward renewable-generation accounting.
    pub renewable: bool,
}

/// A dispatchable (thermal or power-to-heat) conversion technology.
#[derive(Debug, Clone, Serialize)]
pub struct DispatchableTech {
    pub id: String,
    pub zone: String,
    /// Admissible fuels.
    pub fuels: Vec<String>,
    /// Conversion efficiency per (product, fuel). Non-CHP units only; CHP
    /// conversion is encoded in `chp_region`.
    #[serde(serialize_with = "pairs")]
    pub efficiency: BTreeMap<(Product, String), f64>,
    /// Initially installed capacity, GW.
    pub initial_capacity: f64,
    /// Annualized capital cost, currency/MW·a. Zero disables nothing by
    /// itself; expansion is gated on `expandable`.
    pub capital_cost: f64,
    /// Quasi-fixed O&M cost, currency/MW·a, avoidable by decommissioning.
    pub om_quasi_fixed: f64,
    /// Variable O&M cost, currency/MWh generated.
    pub om_var: f64,
    pub expandable: bool,
    /// Feasible operating region for co-generation units.
    pub chp_region: Option<FeasibleOperatingRegion>,
}

impl DispatchableTech {
    pub fn is_chp(&self) -> bool {
        self.chp_region.is_some()
    }

    /// Products this unit can deliver.
    pub fn products(&self) -> Vec<Product> {
        if self.is_chp() {
            vec![Product::El, Product::Ht]
        } else {
            let mut out: Vec<Product> = self
                .efficiency
                .keys()
                .map(|(m, _)| *m)
                .collect();
            out.dedup();
            out
        }
    }

    /// Whether the unit consumes electricity as its fuel (power-to-heat).
    pub fn consumes_power(&self) -> bool {
        self.fuels.iter().any(|f| f == "power")
    }
}

/// An intermittent generator with an exogenous hourly profile.
#[derive(Debug, Clone, Serialize)]
pub struct IntermittentTech {
    pub id: String,
    pub kind: IntermittentKind,
    pub zone: String,
    /// Initially installed capacity, GW.
    pub initial_capacity: f64,
    /// Annualized capital cost, currency/MW·a.
    pub capital_cost: f64,
    pub om_quasi_fixed: f64,
    pub om_var: f64,
    /// Hourly capacity factor, in [0, 1].
    pub profile: Vec<f64>,
    pub expandable: bool,
    /// Pseudo-fuel carrying the fixed air-pollution rate of this class.
    pub air_pollution_fuel: Option<String>,
}

impl IntermittentTech {
    /// Peak of the generation profile.
    pub fn peak_profile(&self) -> f64 {
        self.profile.iter().cloned().fold(0.0, f64::max)
    }
}

/// An electricity storage (reservoir, pumped hydro, battery, hydrogen chain).
#[derive(Debug, Clone, Serialize)]
pub struct StorageTech {
    pub id: String,
    pub zone: String,
    /// Discharging power, GW.
    pub power_out: f64,
    /// Charging power, GW.
    pub power_in: f64,
    /// Energy capacity, GWh.
    pub energy_cap: f64,
    pub eta_in: f64,
    pub eta_out: f64,
    /// Natural inflows, GW per hour.
    pub inflows: Vec<f64>,
    /// Annualized capital cost of power capacity, currency/MW·a.
    pub capital_cost_power: f64,
    /// Annualized capital cost of energy capacity, currency/MWh·a.
    pub capital_cost_energy: f64,
    /// Hydro storages cannot be expanded; batteries and hydrogen can.
    pub expandable: bool,
    /// Required fill at the first and last hour, GWh.
    pub boundary_level: f64,
}

/// A cross-border transmission corridor between two zones.
#[derive(Debug, Clone, Serialize)]
pub struct TransmissionLink {
    pub zones: (String, String),
    /// Initial net transfer capacity, GW.
    pub ntc: f64,
    /// Annualized capital cost, currency per (MW·km)·a.
    pub capital_cost: f64,
    pub expandable: bool,
    /// Upper bound on added capacity, GW; keeps flow bounds finite.
    pub expansion_limit: f64,
}

/// Full parameterization of one model run.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    /// Hours in the planning horizon.
    pub horizon: usize,
    pub zones: Vec<Zone>,
    pub fuels: Vec<Fuel>,
    pub dispatchables: Vec<DispatchableTech>,
    pub intermittents: Vec<IntermittentTech>,
    pub storages: Vec<StorageTech>,
    pub links: Vec<TransmissionLink>,
    /// Hourly demand, GW, keyed by (zone, product). Missing heat series are
    /// treated as zero demand.
    #[serde(serialize_with = "pairs")]
    pub demand: BTreeMap<(String, Product), Vec<f64>>,
    /// Hourly fuel prices, currency/MWh, keyed by (zone, fuel).
    #[serde(serialize_with = "pairs")]
    pub fuel_prices: BTreeMap<(String, String), Vec<f64>>,
    /// Hourly CO2 price, currency/tCO2, per zone.
    pub co2_price: BTreeMap<String, Vec<f64>>,
    /// Optional cap on wind-onshore capacity (initial + added − decommissioned),
    /// GW, per zone.
    pub wind_cap: BTreeMap<String, f64>,
    /// Reporting currency label.
    pub numeraire: String,
}

/// Serialize a tuple-keyed map as a sequence of (key, value) pairs; JSON
/// only allows string keys.
fn pairs<K: Serialize, V: Serialize, S: serde::Serializer>(
    map: &BTreeMap<K, V>,
    ser: S,
) -> Result<S::Ok, S::Error> {
    ser.collect_seq(map.iter())
}

impl Scenario {
    pub fn zone(&self, id: &str) -> Option<&Zone> {
        self.zones.iter().find(|z| z.id == id)
    }

    pub fn fuel(&self, id: &str) -> Option<&Fuel> {
        self.fuels.iter().find(|f| f.id == id)
    }

    /// Hourly demand series; zeros if the series was not provided.
    pub fn demand_series(&self, zone: &str, product: Product) -> Vec<f64> {
        self.demand
            .get(&(zone.to_string(), product))
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.horizon])
    }

    /// Peak demand, GW.
    pub fn peak_load(&self, zone: &str, product: Product) -> f64 {
        self.demand_series(zone, product)
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    pub fn fuel_price(&self, zone: &str, fuel: &str, t: usize) -> f64 {
        self.fuel_prices
            .get(&(zone.to_string(), fuel.to_string()))
            .map(|s| s[t])
            .unwrap_or(0.0)
    }

    pub fn co2_price(&self, zone: &str, t: usize) -> f64 {
        self.co2_price.get(zone).map(|s| s[t]).unwrap_or(0.0)
    }

    /// Stable content hash of the scenario, hex-encoded.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_vec(self).expect("scenario serializes");
        let digest = Sha256::digest(&json);
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}
