//! Solve orchestration and derived economics: per-zone cost ledgers,
//! emissions and air-pollution accounting, trade balances, wind-cap sweeps
//! with opportunity costs, and sensitivity grids.

use crate::domain::{IntermittentKind, Product, Scenario};
use crate::lp::{build_lp, BuildError, LpProblem, RowKey, VarKey};
use crate::solver::{solve, LpSolution, SolverError, SolverOptions, SolverStatus};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("scenario is infeasible; implicated constraints: {}", diagnosis.join(", "))]
    Infeasible { diagnosis: Vec<String> },
    #[error("scenario is unbounded (missing cost or cap on some activity)")]
    Unbounded,
    #[error("iteration limit reached before optimality")]
    IterationLimit,
    #[error("sweep step must be positive, got {0}")]
    BadStep(f64),
    #[error("opportunity cost undefined for zero capacity difference")]
    ZeroCapacityDelta,
}

/// Zonal annual cost ledger in kilo-currency. The four components sum to
/// the zone's contribution to the LP objective; air pollution and trade are
/// tracked outside the minimized objective.
#[derive(Debug, Clone, Copy, Default)]
pub struct CostBreakdown {
    /// Fuel purchases plus CO2-price payments on fuel burned.
    pub fuel_and_co2: f64,
    /// Annualized capital charges on added generation, storage and
    /// transmission capacity.
    pub investment: f64,
    /// Variable plus quasi-fixed operation and maintenance.
    pub om: f64,
    /// Non-served energy valued at the zone's loss-of-load cost.
    pub nse: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.fuel_and_co2 + self.investment + self.om + self.nse
    }
}

/// Post-optimization capacity of one asset, GW (GWh for storage energy).
#[derive(Debug, Clone)]
pub struct CapacityRecord {
    pub id: String,
    pub class: &'static str,
    pub initial: f64,
    pub added: f64,
    pub removed: f64,
}

impl CapacityRecord {
    pub fn net(&self) -> f64 {
        self.initial + self.added - self.removed
    }
}

/// Periodized generation for dispatch reporting, GWh. The horizon is cut
/// into twelve equal slices, which coincide with calendar months only
/// approximately on full-year runs.
#[derive(Debug, Clone)]
pub struct DispatchRecord {
    pub zone: String,
    pub source: String,
    pub period: usize,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct ZoneOutcome {
    pub zone: String,
    pub costs: CostBreakdown,
    /// tCO2 over the horizon.
    pub emissions: f64,
    /// External air-pollution cost, kilo-currency; not part of the LP
    /// objective.
    pub air_pollution: f64,
    /// Net export revenue, kilo-currency, flows valued at the importing
    /// zone's hourly price. Positive for net exporters.
    pub trade_revenue: f64,
    /// GWh: intermittent output plus renewable-fueled generation plus
    /// reservoir inflows.
    pub renewable_generation: f64,
    /// GWh of curtailed intermittent electricity.
    pub curtailment: f64,
    /// GWh of non-served electricity and heat.
    pub nse_energy: f64,
    /// Hourly electricity price: dual of the zonal clearing constraint,
    /// currency/MWh.
    pub prices: Vec<f64>,
    /// Dual of the renewable-target row, if the zone has one.
    pub policy_dual: Option<f64>,
    /// Dual of the wind-capacity cap, if active.
    pub wind_cap_dual: Option<f64>,
    pub capacities: Vec<CapacityRecord>,
}

impl ZoneOutcome {
    /// Net system cost: zonal objective cost plus air pollution minus trade
    /// revenue.
    pub fn net_cost(&self) -> f64 {
        self.costs.total() + self.air_pollution - self.trade_revenue
    }

    /// Installed wind-onshore capacity after expansion and decommissioning.
    pub fn wind_capacity(&self) -> f64 {
        self.capacities
            .iter()
            .filter(|c| c.class == "wind_on")
            .map(CapacityRecord::net)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct SystemOutcome {
    pub scenario_hash: String,
    pub horizon: usize,
    /// Minimized total system cost, kilo-currency.
    pub objective: f64,
    pub iterations: usize,
    pub zones: Vec<ZoneOutcome>,
    pub dispatch: Vec<DispatchRecord>,
    /// Relative gap between the recomputed zonal ledgers and the LP
    /// objective; must stay below 1e-6.
    pub ledger_gap: f64,
}

impl SystemOutcome {
    pub fn zone(&self, id: &str) -> Option<&ZoneOutcome> {
        self.zones.iter().find(|z| z.zone == id)
    }

    pub fn net_cost(&self) -> f64 {
        self.zones.iter().map(ZoneOutcome::net_cost).sum()
    }

    pub fn emissions(&self) -> f64 {
        self.zones.iter().map(|z| z.emissions).sum()
    }

    pub fn wind_capacity(&self) -> f64 {
        self.zones.iter().map(ZoneOutcome::wind_capacity).sum()
    }
}

/// One sweep point; failed solves are retained with their error text so a
/// sweep never silently drops capacities.
#[derive(Debug)]
pub struct SweepPoint {
    /// Total wind-onshore cap applied at this point, GW.
    pub wind_cap: f64,
    pub outcome: Result<SystemOutcome, String>,
}

#[derive(Debug)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub step: f64,
}

/// Opportunity cost over one sweep interval, currency per MW·a, attributed
/// to the interval midpoint.
#[derive(Debug, Clone, Copy)]
pub struct OcPoint {
    pub wind_cap: f64,
    pub oc: f64,
}

/// Build, solve and account one scenario.
pub fn run_scenario(
    scenario: &Scenario,
    options: &SolverOptions,
) -> Result<SystemOutcome, EngineError> {
    let problem = build_lp(scenario)?;
    let solution = solve(&problem, options)?;
    match solution.status {
        SolverStatus::Optimal => {}
        SolverStatus::Infeasible => {
            return Err(EngineError::Infeasible {
                diagnosis: diagnose_infeasibility(&problem, &solution, options),
            })
        }
        SolverStatus::Unbounded => return Err(EngineError::Unbounded),
        SolverStatus::IterationLimit => return Err(EngineError::IterationLimit),
    }
    Ok(account(scenario, &problem, &solution))
}

/// Assemble the full outcome from an optimal solution; every economic
/// quantity is recomputed from scenario data rather than read off the LP
/// cost vector, so ledger closure is a genuine cross-check.
fn account(scenario: &Scenario, problem: &LpProblem, solution: &LpSolution) -> SystemOutcome {
    let x = &solution.primal;
    let y = &solution.dual;
    let horizon = scenario.horizon;
    let col = |key: &VarKey| problem.index.col(key).map(|i| x[i]).unwrap_or(0.0);
    let row_dual = |key: &RowKey| problem.index.row(key).map(|i| y[i]);

    let mut zones = Vec::with_capacity(scenario.zones.len());
    let mut dispatch = Vec::new();
    let period_of = |t: usize| (t * 12 / horizon.max(1)).min(11);

    for zone in &scenario.zones {
        let mut costs = CostBreakdown::default();
        let mut emissions = 0.0;
        let mut air = 0.0;
        let mut renewable = 0.0;
        let mut capacities = Vec::new();
        let mut periods: std::collections::BTreeMap<(String, usize), f64> =
            std::collections::BTreeMap::new();

        for tech in scenario.dispatchables.iter().filter(|d| d.zone == zone.id) {
            let added = col(&VarKey::AddDispatch { tech: tech.id.clone() });
            let removed = col(&VarKey::DecoDispatch { tech: tech.id.clone() });
            costs.investment += tech.capital_cost * added;
            costs.om += tech.om_quasi_fixed * (tech.initial_capacity + added - removed);
            let air_fix = tech
                .fuels
                .first()
                .and_then(|f| scenario.fuel(f))
                .map_or(0.0, |f| f.air_pollution_fix);
            air += air_fix * (tech.initial_capacity + added - removed);
            capacities.push(CapacityRecord {
                id: tech.id.clone(),
                class: "dispatchable",
                initial: tech.initial_capacity,
                added,
                removed,
            });
            for t in 0..horizon {
                for fuel_id in &tech.fuels {
                    let fuel = scenario.fuel(fuel_id).expect("validated");
                    let burn = col(&VarKey::FuelBurn {
                        tech: tech.id.clone(),
                        t,
                        fuel: fuel_id.clone(),
                    });
                    costs.fuel_and_co2 += burn
                        * (scenario.fuel_price(&zone.id, fuel_id, t)
                            + scenario.co2_price(&zone.id, t) * fuel.co2_intensity);
                    // burn is GWh of fuel; intensity is t/MWh.
                    emissions += burn * 1000.0 * fuel.co2_intensity;
                    air += burn * fuel.air_pollution_var;
                    for product in tech.products() {
                        let gen = col(&VarKey::Gen {
                            tech: tech.id.clone(),
                            t,
                            product,
                            fuel: fuel_id.clone(),
                        });
                        costs.om += tech.om_var * gen;
                        if product == Product::El {
                            if fuel.renewable {
                                renewable += gen;
                            }
                            *periods.entry((tech.id.clone(), period_of(t))).or_default() += gen;
                        }
                    }
                }
            }
        }

        for tech in scenario.intermittents.iter().filter(|i| i.zone == zone.id) {
            let added = col(&VarKey::AddInterm { tech: tech.id.clone() });
            let removed = col(&VarKey::DecoInterm { tech: tech.id.clone() });
            costs.investment += tech.capital_cost * added;
            costs.om += tech.om_quasi_fixed * (tech.initial_capacity + added - removed);
            let air_fuel = tech
                .air_pollution_fuel
                .as_deref()
                .and_then(|f| scenario.fuel(f));
            air += air_fuel.map_or(0.0, |f| f.air_pollution_fix)
                * (tech.initial_capacity + added - removed);
            capacities.push(CapacityRecord {
                id: tech.id.clone(),
                class: tech.kind.as_str(),
                initial: tech.initial_capacity,
                added,
                removed,
            });
            for t in 0..horizon {
                let gen = col(&VarKey::IntermGen { tech: tech.id.clone(), t });
                costs.om += tech.om_var * gen;
                air += air_fuel.map_or(0.0, |f| f.air_pollution_var) * gen;
                renewable += gen;
                *periods.entry((tech.id.clone(), period_of(t))).or_default() += gen;
            }
        }

        for store in scenario.storages.iter().filter(|s| s.zone == zone.id) {
            let add_power = col(&VarKey::AddStorePower { tech: store.id.clone() });
            let add_energy = col(&VarKey::AddStoreEnergy { tech: store.id.clone() });
            costs.investment +=
                store.capital_cost_power * add_power + store.capital_cost_energy * add_energy;
            capacities.push(CapacityRecord {
                id: store.id.clone(),
                class: "storage_power",
                initial: store.power_out,
                added: add_power,
                removed: 0.0,
            });
            capacities.push(CapacityRecord {
                id: store.id.clone(),
                class: "storage_energy",
                initial: store.energy_cap,
                added: add_energy,
                removed: 0.0,
            });
            renewable += store.inflows[..horizon].iter().sum::<f64>();
            for t in 0..horizon {
                let net_out = col(&VarKey::StoreOut { tech: store.id.clone(), t })
                    - col(&VarKey::StoreIn { tech: store.id.clone(), t });
                *periods.entry((store.id.clone(), period_of(t))).or_default() += net_out;
            }
        }

        for link in &scenario.links {
            if link.zones.0 != zone.id && link.zones.1 != zone.id {
                continue;
            }
            let (from, to) = if link.zones.0 == zone.id {
                (&link.zones.0, &link.zones.1)
            } else {
                (&link.zones.1, &link.zones.0)
            };
            let added = col(&VarKey::AddFlow { from: from.clone(), to: to.clone() });
            let distance = zone.distance_to.get(to).copied().unwrap_or(0.0);
            costs.investment += 0.5 * link.capital_cost * distance * added;
            capacities.push(CapacityRecord {
                id: format!("{from}->{to}"),
                class: "link",
                initial: link.ntc,
                added,
                removed: 0.0,
            });
        }

        let mut nse_energy = 0.0;
        let mut curtailment = 0.0;
        for t in 0..horizon {
            for product in Product::ALL {
                let q = col(&VarKey::Nse { zone: zone.id.clone(), t, product });
                costs.nse += zone.voll * q;
                nse_energy += q;
                if q > 0.0 && product == Product::El {
                    *periods.entry(("nse".to_string(), period_of(t))).or_default() += q;
                }
            }
            let q = col(&VarKey::Curtail { zone: zone.id.clone(), t });
            curtailment += q;
            renewable -= q;
        }

        // Exports valued at the buyer's hourly price.
        let mut trade_revenue = 0.0;
        for link in &scenario.links {
            let partner = if link.zones.0 == zone.id {
                &link.zones.1
            } else if link.zones.1 == zone.id {
                &link.zones.0
            } else {
                continue;
            };
            for t in 0..horizon {
                let flow = col(&VarKey::Flow {
                    from: zone.id.clone(),
                    to: partner.clone(),
                    t,
                });
                let price = row_dual(&RowKey::ClearEl { zone: partner.clone(), t }).unwrap_or(0.0);
                trade_revenue += flow * price;
            }
        }

        let prices: Vec<f64> = (0..horizon)
            .map(|t| row_dual(&RowKey::ClearEl { zone: zone.id.clone(), t }).unwrap_or(0.0))
            .collect();

        for ((source, period), energy) in periods {
            if energy.abs() > 1e-9 {
                dispatch.push(DispatchRecord {
                    zone: zone.id.clone(),
                    source,
                    period,
                    energy,
                });
            }
        }

        zones.push(ZoneOutcome {
            zone: zone.id.clone(),
            costs,
            emissions,
            air_pollution: air,
            trade_revenue,
            renewable_generation: renewable,
            curtailment,
            nse_energy,
            prices,
            policy_dual: row_dual(&RowKey::Policy { zone: zone.id.clone() }),
            wind_cap_dual: row_dual(&RowKey::WindCap { zone: zone.id.clone() }),
            capacities,
        });
    }

    let recomputed: f64 = zones.iter().map(|z| z.costs.total()).sum();
    let ledger_gap = (recomputed - solution.objective).abs() / solution.objective.abs().max(1.0);

    SystemOutcome {
        scenario_hash: problem.meta.scenario_hash.clone(),
        horizon,
        objective: solution.objective,
        iterations: solution.iterations,
        zones,
        dispatch,
        ledger_gap,
    }
}

/// Find a small set of constraints that together exclude every solution.
/// The Farkas certificate narrows the candidates; a deletion filter then
/// shrinks them to an irreducible subset when the problem is small enough.
fn diagnose_infeasibility(
    problem: &LpProblem,
    solution: &LpSolution,
    options: &SolverOptions,
) -> Vec<String> {
    let mut support: Vec<usize> = (0..problem.num_rows())
        .filter(|&i| solution.dual[i].abs() > 1e-9)
        .collect();
    support.sort_by(|a, b| {
        solution.dual[*b]
            .abs()
            .partial_cmp(&solution.dual[*a].abs())
            .unwrap()
    });
    support.truncate(60);
    if support.is_empty() {
        support = (0..problem.num_rows().min(60)).collect();
    }

    // Deletion filter: a row whose removal keeps the subsystem infeasible
    // is not needed for the explanation.
    if support.len() <= 40 && problem.num_cols() <= 3000 {
        let mut kept = support.clone();
        let mut i = 0;
        while i < kept.len() {
            let mut trial = kept.clone();
            trial.remove(i);
            if subsystem_infeasible(problem, &trial, options) {
                kept = trial;
            } else {
                i += 1;
            }
        }
        if !kept.is_empty() {
            support = kept;
        }
    }

    support.sort_unstable();
    support
        .iter()
        .map(|&i| problem.index.row_key(i).to_string())
        .collect()
}

fn subsystem_infeasible(problem: &LpProblem, rows: &[usize], options: &SolverOptions) -> bool {
    if rows.is_empty() {
        return false;
    }
    let mut sub = LpProblem::new(problem.meta.clone());
    for c in 0..problem.num_cols() {
        sub.named_col(&format!("c{c}"), 0.0, problem.lower[c], problem.upper[c]);
    }
    let mut map = vec![usize::MAX; problem.num_rows()];
    for (k, &r) in rows.iter().enumerate() {
        map[r] = k;
        sub.named_row(&format!("r{r}"), problem.senses[r], problem.rhs[r]);
    }
    for &(r, c, v) in &problem.triplets {
        let k = map[r as usize];
        if k != usize::MAX {
            sub.set_coeff(k, c as usize, v);
        }
    }
    matches!(
        solve(&sub, options).map(|s| s.status),
        Ok(SolverStatus::Infeasible)
    )
}

/// Deterministic order-preserving parallel map over `0..n`.
fn parallel_map<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = jobs.max(1).min(n.max(1));
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let value = f(i);
                *slots[i].lock().unwrap() = Some(value);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("worker filled slot"))
        .collect()
}

/// Zones whose wind-onshore capacity the sweep restricts: those hosting at
/// least one expandable wind-onshore technology.
fn sweep_zones(scenario: &Scenario) -> Vec<String> {
    let mut out: Vec<String> = scenario
        .intermittents
        .iter()
        .filter(|i| i.kind == IntermittentKind::WindOn && i.expandable)
        .map(|i| i.zone.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Solve the unconstrained scenario, read off the optimal wind-onshore
/// capacity, then re-solve under caps shrinking by `step` until no wind
/// power can be deployed. Failed points are retained with their status.
pub fn sweep_wind_cap(
    scenario: &Scenario,
    step: f64,
    options: &SolverOptions,
    jobs: usize,
) -> Result<SweepResult, EngineError> {
    if !(step > 0.0) {
        return Err(EngineError::BadStep(step));
    }
    let free = run_scenario(scenario, options)?;
    let zones = sweep_zones(scenario);
    let optimal: Vec<(String, f64)> = zones
        .iter()
        .map(|z| (z.clone(), free.zone(z).map_or(0.0, ZoneOutcome::wind_capacity)))
        .collect();
    let w_star: f64 = optimal.iter().map(|(_, w)| w).sum();
    let mut points = vec![SweepPoint {
        wind_cap: w_star,
        outcome: Ok(free),
    }];
    if w_star <= 0.0 || optimal.is_empty() {
        return Ok(SweepResult { points, step });
    }

    let steps = (w_star / step).ceil() as usize;
    let caps: Vec<Vec<(String, f64)>> = (1..=steps)
        .map(|k| {
            optimal
                .iter()
                .map(|(z, w)| (z.clone(), (w - k as f64 * step).max(0.0)))
                .collect()
        })
        .collect();
    let solved = parallel_map(caps.len(), jobs, |i| {
        let mut capped = scenario.clone();
        for (zone, cap) in &caps[i] {
            capped.wind_cap.insert(zone.clone(), *cap);
        }
        run_scenario(&capped, options).map_err(|e| e.to_string())
    });
    for (cap_set, outcome) in caps.into_iter().zip(solved) {
        points.push(SweepPoint {
            wind_cap: cap_set.iter().map(|(_, c)| c).sum(),
            outcome,
        });
    }
    Ok(SweepResult { points, step })
}

/// Finite-difference opportunity cost of wind power along a sweep:
/// OC = Δ(net system cost)/Δ(capacity) over consecutive successful points,
/// in currency per MW·a (numerically kilo-currency per GW·a).
pub fn opportunity_cost(sweep: &SweepResult) -> Result<Vec<OcPoint>, EngineError> {
    let ok: Vec<(f64, f64)> = sweep
        .points
        .iter()
        .filter_map(|p| p.outcome.as_ref().ok().map(|o| (p.wind_cap, o.net_cost())))
        .collect();
    let mut out = Vec::new();
    for pair in ok.windows(2) {
        let (w_a, c_a) = pair[0];
        let (w_b, c_b) = pair[1];
        let dw = w_a - w_b;
        if dw <= 0.0 {
            return Err(EngineError::ZeroCapacityDelta);
        }
        out.push(OcPoint {
            wind_cap: 0.5 * (w_a + w_b),
            oc: (c_b - c_a) / dw,
        });
    }
    Ok(out)
}

/// One sensitivity-grid coordinate with its swept result.
#[derive(Debug)]
pub struct GridCell {
    /// currency/tCO2 applied uniformly.
    pub co2_price: f64,
    /// Annualized PV capital cost applied, currency/MW·a.
    pub pv_capital_cost: f64,
    /// Initial NTC applied to every link, GW.
    pub ntc: f64,
    pub sweep: Result<SweepResult, String>,
    /// Whether the renewable-target constraint still binds at the
    /// unconstrained optimum (any zone with a nonzero target dual).
    pub policy_binding: Option<bool>,
}

/// Cartesian sensitivity grid over CO2 price, PV capital cost and NTC; each
/// cell runs a full wind-cap sweep. Failures stay isolated to their cell.
pub fn sensitivity_grid(
    base: &Scenario,
    co2_prices: &[f64],
    pv_capital_costs: &[f64],
    ntcs: &[f64],
    step: f64,
    options: &SolverOptions,
    jobs: usize,
) -> Result<Vec<GridCell>, EngineError> {
    if !(step > 0.0) {
        return Err(EngineError::BadStep(step));
    }
    let mut coords = Vec::new();
    for &co2 in co2_prices {
        for &pv in pv_capital_costs {
            for &ntc in ntcs {
                coords.push((co2, pv, ntc));
            }
        }
    }
    let cells = parallel_map(coords.len(), jobs, |i| {
        let (co2, pv, ntc) = coords[i];
        let mut scenario = base.clone();
        scenario.co2_price = scenario
            .zones
            .iter()
            .map(|z| (z.id.clone(), vec![co2; scenario.horizon]))
            .collect();
        for tech in &mut scenario.intermittents {
            if tech.kind == IntermittentKind::Pv {
                tech.capital_cost = pv;
            }
        }
        for link in &mut scenario.links {
            link.ntc = ntc;
        }
        let sweep = sweep_wind_cap(&scenario, step, options, 1).map_err(|e| e.to_string());
        let policy_binding = sweep.as_ref().ok().and_then(|s| {
            s.points.first().and_then(|p| {
                p.outcome.as_ref().ok().map(|o| {
                    o.zones
                        .iter()
                        .any(|z| z.policy_dual.is_some_and(|d| d.abs() > 1e-7))
                })
            })
        });
        GridCell {
            co2_price: co2,
            pv_capital_cost: pv,
            ntc,
            sweep,
            policy_binding,
        }
    });
    Ok(cells)
}

/// Drop a zone's renewable-target row and re-solve; used to confirm that a
/// zero target dual really means the policy no longer binds.
pub fn objective_without_policy(
    scenario: &Scenario,
    zone: &str,
    options: &SolverOptions,
) -> Result<f64, EngineError> {
    let mut relaxed = scenario.clone();
    for z in &mut relaxed.zones {
        if z.id == zone {
            z.renewable_target = None;
        }
    }
    run_scenario(&relaxed, options).map(|o| o.objective)
}

#[cfg(test)]
mod tests;
