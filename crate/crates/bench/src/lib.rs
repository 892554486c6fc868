//! Synthetic scenario builders shared by the criterion benches.

use medea_core::domain::{
    DispatchableTech, Fuel, IntermittentKind, IntermittentTech, Product, Scenario, StorageTech,
    Zone,
};
use std::collections::BTreeMap;

/// Single-zone system with gas, wind, PV and a pumped-hydro store; demand
/// and profiles are deterministic sinusoids so timings are reproducible.
pub fn synthetic_scenario(horizon: usize) -> Scenario {
    let wave = |amp: f64, period: f64, phase: f64| -> Vec<f64> {
        (0..horizon)
            .map(|t| amp * (1.0 + 0.4 * ((t as f64 + phase) * std::f64::consts::TAU / period).sin()))
            .collect()
    };
    let mut demand = BTreeMap::new();
    demand.insert(("ZZ".to_string(), Product::El), wave(8.0, 24.0, 0.0));
    let mut fuel_prices = BTreeMap::new();
    fuel_prices.insert(("ZZ".to_string(), "gas".to_string()), vec![18.0; horizon]);
    Scenario {
        horizon,
        zones: vec![Zone {
            id: "ZZ".to_string(),
            reserve_load_factor: 0.175,
            reserve_intermittent_factor: 0.15,
            voll: 12_500.0,
            renewable_target: Some(0.3 * 8.0 * horizon as f64),
            distance_to: BTreeMap::new(),
        }],
        fuels: vec![
            Fuel {
                id: "gas".to_string(),
                co2_intensity: 0.201,
                air_pollution_var: 2.36,
                air_pollution_fix: 0.0,
                renewable: false,
            },
            Fuel {
                id: "wind_f".to_string(),
                co2_intensity: 0.0,
                air_pollution_var: 0.0,
                air_pollution_fix: 0.0,
                renewable: true,
            },
        ],
        dispatchables: vec![DispatchableTech {
            id: "gas_cc".to_string(),
            zone: "ZZ".to_string(),
            fuels: vec!["gas".to_string()],
            efficiency: BTreeMap::from([((Product::El, "gas".to_string()), 0.55)]),
            initial_capacity: 10.0,
            capital_cost: 900.0,
            om_quasi_fixed: 300.0,
            om_var: 2.0,
            expandable: true,
            chp_region: None,
        }],
        intermittents: vec![
            IntermittentTech {
                id: "wind".to_string(),
                kind: IntermittentKind::WindOn,
                zone: "ZZ".to_string(),
                initial_capacity: 3.0,
                capital_cost: 1_400.0,
                om_quasi_fixed: 120.0,
                om_var: 1.25,
                profile: wave(0.3, 163.0, 11.0),
                expandable: true,
                air_pollution_fuel: None,
            },
            IntermittentTech {
                id: "pv".to_string(),
                kind: IntermittentKind::Pv,
                zone: "ZZ".to_string(),
                initial_capacity: 2.0,
                capital_cost: 700.0,
                om_quasi_fixed: 90.0,
                om_var: 0.5,
                profile: wave(0.15, 24.0, 6.0),
                expandable: true,
                air_pollution_fuel: None,
            },
        ],
        storages: vec![StorageTech {
            id: "psp".to_string(),
            zone: "ZZ".to_string(),
            power_out: 2.0,
            power_in: 2.0,
            energy_cap: 12.0,
            eta_in: 0.9,
            eta_out: 0.9,
            inflows: vec![0.0; horizon],
            capital_cost_power: 0.0,
            capital_cost_energy: 0.0,
            expandable: false,
            boundary_level: 6.0,
        }],
        links: vec![],
        demand,
        fuel_prices,
        co2_price: BTreeMap::from([("ZZ".to_string(), vec![25.0; horizon])]),
        wind_cap: BTreeMap::new(),
        numeraire: "EUR".to_string(),
    }
}
