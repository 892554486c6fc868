//! Result writers: fixed-schema CSV files plus a JSON summary. All output
//! is deterministic — fixed column order, fixed row order, shortest
//! round-trip float formatting — so reruns are byte-identical.

use crate::engine::{GridCell, OcPoint, SweepResult, SystemOutcome};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct OutputError {
    pub path: String,
    pub source: std::io::Error,
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), OutputError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|source| OutputError {
        path: path.display().to_string(),
        source,
    })
}

/// Write cost_components.csv, capacities.csv, dispatch_monthly.csv and
/// summary.json for one finished run.
pub fn write_outcome(outcome: &SystemOutcome, dir: &Path) -> Result<(), OutputError> {
    std::fs::create_dir_all(dir).map_err(|source| OutputError {
        path: dir.display().to_string(),
        source,
    })?;

    let mut costs = String::from(
        "zone,fuel_and_co2,investment,om,nse,air_pollution,trade_balance,net_cost\n",
    );
    for z in &outcome.zones {
        // Trade in cost convention: export revenue shows up negative.
        writeln!(
            costs,
            "{},{},{},{},{},{},{},{}",
            z.zone,
            z.costs.fuel_and_co2,
            z.costs.investment,
            z.costs.om,
            z.costs.nse,
            z.air_pollution,
            -z.trade_revenue,
            z.net_cost()
        )
        .unwrap();
    }
    write_file(dir, "cost_components.csv", &costs)?;

    let mut caps = String::from("zone,id,class,initial,added,removed,net\n");
    for z in &outcome.zones {
        for c in &z.capacities {
            writeln!(
                caps,
                "{},{},{},{},{},{},{}",
                z.zone, c.id, c.class, c.initial, c.added, c.removed,
                c.net()
            )
            .unwrap();
        }
    }
    write_file(dir, "capacities.csv", &caps)?;

    let mut dispatch = String::from("zone,source,period,energy_gwh\n");
    for d in &outcome.dispatch {
        writeln!(dispatch, "{},{},{},{}", d.zone, d.source, d.period, d.energy).unwrap();
    }
    write_file(dir, "dispatch_monthly.csv", &dispatch)?;

    write_file(
        dir,
        "summary.json",
        &summary_json(outcome).expect("summary serializes"),
    )
}

#[derive(Serialize)]
struct ZoneSummary {
    zone: String,
    objective_cost: f64,
    net_cost: f64,
    emissions_t: f64,
    renewable_generation_gwh: f64,
    curtailment_gwh: f64,
    nse_gwh: f64,
    mean_price: f64,
}

#[derive(Serialize)]
struct Summary {
    scenario_hash: String,
    horizon: usize,
    objective: f64,
    net_cost: f64,
    emissions_t: f64,
    iterations: usize,
    ledger_gap: f64,
    zones: Vec<ZoneSummary>,
}

fn summary_json(outcome: &SystemOutcome) -> Result<String, serde_json::Error> {
    let summary = Summary {
        scenario_hash: outcome.scenario_hash.clone(),
        horizon: outcome.horizon,
        objective: outcome.objective,
        net_cost: outcome.net_cost(),
        emissions_t: outcome.emissions(),
        iterations: outcome.iterations,
        ledger_gap: outcome.ledger_gap,
        zones: outcome
            .zones
            .iter()
            .map(|z| ZoneSummary {
                zone: z.zone.clone(),
                objective_cost: z.costs.total(),
                net_cost: z.net_cost(),
                emissions_t: z.emissions,
                renewable_generation_gwh: z.renewable_generation,
                curtailment_gwh: z.curtailment,
                nse_gwh: z.nse_energy,
                mean_price: if z.prices.is_empty() {
                    0.0
                } else {
                    z.prices.iter().sum::<f64>() / z.prices.len() as f64
                },
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    Ok(text)
}

/// Render a sweep as CSV: one row per cap; the OC column carries the finite
/// difference over the interval ending at that row, so n rows hold n−1
/// opportunity costs.
pub fn sweep_csv(sweep: &SweepResult, oc: &[OcPoint]) -> String {
    let mut out = String::from("wind_cap_gw,status,c_net,oc_w,emissions_t\n");
    let mut oc_iter = oc.iter();
    let mut prev_ok = false;
    for p in &sweep.points {
        match &p.outcome {
            Ok(o) => {
                let oc_field = if prev_ok {
                    oc_iter.next().map_or(String::new(), |o| o.oc.to_string())
                } else {
                    String::new()
                };
                writeln!(
                    out,
                    "{},optimal,{},{},{}",
                    p.wind_cap,
                    o.net_cost(),
                    oc_field,
                    o.emissions()
                )
                .unwrap();
                prev_ok = true;
            }
            Err(status) => {
                let status = status.replace([',', '\n'], ";");
                writeln!(out, "{},{status},,,", p.wind_cap).unwrap();
                prev_ok = false;
            }
        }
    }
    out
}

pub fn write_sweep(sweep: &SweepResult, oc: &[OcPoint], dir: &Path) -> Result<(), OutputError> {
    std::fs::create_dir_all(dir).map_err(|source| OutputError {
        path: dir.display().to_string(),
        source,
    })?;
    write_file(dir, "sweep.csv", &sweep_csv(sweep, oc))
}

/// Long-format grid file: one row per (cell, sweep point), plot-ready.
pub fn grid_csv(cells: &[GridCell]) -> String {
    let mut out = String::from(
        "co2_price,pv_capital_cost,ntc,policy_binding,wind_cap_gw,status,c_net,emissions_t\n",
    );
    for cell in cells {
        let binding = match cell.policy_binding {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        match &cell.sweep {
            Ok(sweep) => {
                for p in &sweep.points {
                    match &p.outcome {
                        Ok(o) => writeln!(
                            out,
                            "{},{},{},{binding},{},optimal,{},{}",
                            cell.co2_price,
                            cell.pv_capital_cost,
                            cell.ntc,
                            p.wind_cap,
                            o.net_cost(),
                            o.emissions()
                        )
                        .unwrap(),
                        Err(status) => {
                            let status = status.replace([',', '\n'], ";");
                            writeln!(
                                out,
                                "{},{},{},{binding},{},{status},,",
                                cell.co2_price, cell.pv_capital_cost, cell.ntc, p.wind_cap
                            )
                            .unwrap()
                        }
                    }
                }
            }
            Err(status) => {
                let status = status.replace([',', '\n'], ";");
                writeln!(
                    out,
                    "{},{},{},{binding},,{status},,",
                    cell.co2_price, cell.pv_capital_cost, cell.ntc
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn write_grid(cells: &[GridCell], dir: &Path) -> Result<(), OutputError> {
    std::fs::create_dir_all(dir).map_err(|source| OutputError {
        path: dir.display().to_string(),
        source,
    })?;
    write_file(dir, "grid.csv", &grid_csv(cells))
}
