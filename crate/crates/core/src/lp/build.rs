//! Scenario → canonical LP translation.
//!
//! Costs are assembled in kilo-currency with power in GW and energy in GWh,
//! so series given in currency/MWh and capital charges in currency/MW·a
//! carry over numerically unchanged. Column and row creation follows the
//! scenario's own entity order, which makes the triplet stream a pure
//! function of the scenario.

use super::{LpProblem, ProblemMeta, RowKey, Sense, VarKey};
use crate::domain::{IntermittentKind, Product, Scenario};

const INF: f64 = f64::INFINITY;

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("{path}: references unknown entity `{target}`")]
    DanglingReference { path: String, target: String },
    #[error("{path}: series has {got} entries, horizon is {want}")]
    SeriesLength { path: String, got: usize, want: usize },
}

/// Translate a validated scenario into its LP. Call `validate_scenario`
/// first; the errors raised here cover only what a hand-assembled scenario
/// could still get wrong.
pub fn build_lp(scenario: &Scenario) -> Result<LpProblem, BuildError> {
    let t_len = scenario.horizon;
    let mut lp = LpProblem::new(ProblemMeta {
        name: "medea".to_string(),
        scenario_hash: scenario.content_hash(),
        horizon: t_len,
    });
    if t_len == 0 {
        return Ok(lp);
    }

    check_references(scenario)?;

    // --- capacity adjustment columns -----------------------------------

    for tech in &scenario.dispatchables {
        lp.objective_offset += tech.initial_capacity * tech.om_quasi_fixed;
        if tech.expandable {
            lp.add_col(
                VarKey::AddDispatch { tech: tech.id.clone() },
                tech.capital_cost + tech.om_quasi_fixed,
                0.0,
                INF,
            );
        }
        lp.add_col(
            VarKey::DecoDispatch { tech: tech.id.clone() },
            -tech.om_quasi_fixed,
            0.0,
            INF,
        );
    }
    // Air-pollution externalities are tracked by the engine but kept out
    // of the minimized objective.
    for tech in &scenario.intermittents {
        lp.objective_offset += tech.initial_capacity * tech.om_quasi_fixed;
        if tech.expandable {
            lp.add_col(
                VarKey::AddInterm { tech: tech.id.clone() },
                tech.capital_cost + tech.om_quasi_fixed,
                0.0,
                INF,
            );
        }
        lp.add_col(
            VarKey::DecoInterm { tech: tech.id.clone() },
            -tech.om_quasi_fixed,
            0.0,
            INF,
        );
    }
    for store in &scenario.storages {
        if store.expandable {
            lp.add_col(
                VarKey::AddStorePower { tech: store.id.clone() },
                store.capital_cost_power,
                0.0,
                INF,
            );
            lp.add_col(
                VarKey::AddStoreEnergy { tech: store.id.clone() },
                store.capital_cost_energy,
                0.0,
                INF,
            );
        }
    }
    for link in &scenario.links {
        if link.expandable {
            // Half the corridor cost is carried by each zone's addition
            // variable; a symmetry row ties the two together.
            for (from, to) in [
                (&link.zones.0, &link.zones.1),
                (&link.zones.1, &link.zones.0),
            ] {
                let distance = scenario
                    .zone(from)
                    .and_then(|z| z.distance_to.get(to))
                    .copied()
                    .unwrap_or(0.0);
                lp.add_col(
                    VarKey::AddFlow {
                        from: from.clone(),
                        to: to.clone(),
                    },
                    0.5 * link.capital_cost * distance,
                    0.0,
                    link.expansion_limit,
                );
            }
        }
    }

    // --- hourly columns -------------------------------------------------

    for tech in &scenario.dispatchables {
        let co2_series = scenario.co2_price.get(&tech.zone);
        for t in 0..t_len {
            let co2 = co2_series.map(|s| s[t]).unwrap_or(0.0);
            for fuel_id in &tech.fuels {
                let fuel = scenario.fuel(fuel_id).expect("checked above");
                let burn_cost =
                    scenario.fuel_price(&tech.zone, fuel_id, t) + co2 * fuel.co2_intensity;
                lp.add_col(
                    VarKey::FuelBurn {
                        tech: tech.id.clone(),
                        t,
                        fuel: fuel_id.clone(),
                    },
                    burn_cost,
                    0.0,
                    INF,
                );
                for product in tech.products() {
                    if !tech.is_chp()
                        && !tech
                            .efficiency
                            .contains_key(&(product, fuel_id.clone()))
                    {
                        continue;
                    }
                    lp.add_col(
                        VarKey::Gen {
                            tech: tech.id.clone(),
                            t,
                            product,
                            fuel: fuel_id.clone(),
                        },
                        tech.om_var,
                        0.0,
                        INF,
                    );
                }
                if let Some(region) = &tech.chp_region {
                    for (corner, c) in region.corners.iter().enumerate() {
                        let col = lp.add_col(
                            VarKey::CornerWeight {
                                tech: tech.id.clone(),
                                t,
                                corner,
                                fuel: fuel_id.clone(),
                            },
                            0.0,
                            0.0,
                            INF,
                        );
                        if c.fuel_share == 0.0 {
                            // An output-free corner is redundant under the
                            // `<=` capacity row; pin it.
                            lp.fix_col(col, 0.0);
                        }
                    }
                }
            }
        }
    }
    for tech in &scenario.intermittents {
        for t in 0..t_len {
            lp.add_col(
                VarKey::IntermGen {
                    tech: tech.id.clone(),
                    t,
                },
                tech.om_var,
                0.0,
                INF,
            );
        }
    }
    for store in &scenario.storages {
        for t in 0..t_len {
            let (out_ub, in_ub, lvl_ub) = if store.expandable {
                (INF, INF, INF)
            } else {
                (store.power_out, store.power_in, store.energy_cap)
            };
            lp.add_col(
                VarKey::StoreIn { tech: store.id.clone(), t },
                0.0,
                0.0,
                in_ub,
            );
            lp.add_col(
                VarKey::StoreOut { tech: store.id.clone(), t },
                0.0,
                0.0,
                out_ub,
            );
            lp.add_col(
                VarKey::StoreLevel { tech: store.id.clone(), t },
                0.0,
                0.0,
                lvl_ub,
            );
        }
    }
    for link in &scenario.links {
        let reach = link.ntc + if link.expandable { link.expansion_limit } else { 0.0 };
        for t in 0..t_len {
            for (from, to) in [
                (&link.zones.0, &link.zones.1),
                (&link.zones.1, &link.zones.0),
            ] {
                let col = lp.add_col(
                    VarKey::Flow {
                        from: from.clone(),
                        to: to.clone(),
                        t,
                    },
                    0.0,
                    -reach,
                    reach,
                );
                if reach == 0.0 {
                    lp.fix_col(col, 0.0);
                }
            }
        }
    }
    for zone in &scenario.zones {
        let has_curtailable = scenario
            .intermittents
            .iter()
            .any(|n| n.zone == zone.id && n.kind != IntermittentKind::Ror);
        let has_heat_demand = scenario
            .demand
            .contains_key(&(zone.id.clone(), Product::Ht));
        for t in 0..t_len {
            if has_curtailable {
                lp.add_col(
                    VarKey::Curtail { zone: zone.id.clone(), t },
                    0.0,
                    0.0,
                    INF,
                );
            }
            lp.add_col(
                VarKey::Nse {
                    zone: zone.id.clone(),
                    t,
                    product: Product::El,
                },
                zone.voll,
                0.0,
                INF,
            );
            if has_heat_demand {
                lp.add_col(
                    VarKey::Nse {
                        zone: zone.id.clone(),
                        t,
                        product: Product::Ht,
                    },
                    zone.voll,
                    0.0,
                    INF,
                );
            }
        }
    }

    // --- rows ------------------------------------------------------------

    add_market_clearing(&mut lp, scenario);
    add_generation_and_chp(&mut lp, scenario);
    add_intermittent_definitions(&mut lp, scenario);
    add_storage(&mut lp, scenario);
    add_transmission(&mut lp, scenario);
    add_reserves(&mut lp, scenario);
    add_curtailment_and_nse(&mut lp, scenario);
    add_policy_and_caps(&mut lp, scenario);

    Ok(lp)
}

fn check_references(scenario: &Scenario) -> Result<(), BuildError> {
    let t_len = scenario.horizon;
    for tech in &scenario.dispatchables {
        if scenario.zone(&tech.zone).is_none() {
            return Err(BuildError::DanglingReference {
                path: format!("dispatchables.{}", tech.id),
                target: tech.zone.clone(),
            });
        }
        for f in &tech.fuels {
            if scenario.fuel(f).is_none() {
                return Err(BuildError::DanglingReference {
                    path: format!("dispatchables.{}", tech.id),
                    target: f.clone(),
                });
            }
        }
    }
    for tech in &scenario.intermittents {
        if scenario.zone(&tech.zone).is_none() {
            return Err(BuildError::DanglingReference {
                path: format!("intermittents.{}", tech.id),
                target: tech.zone.clone(),
            });
        }
        if tech.profile.len() != t_len {
            return Err(BuildError::SeriesLength {
                path: format!("intermittents.{}.profile", tech.id),
                got: tech.profile.len(),
                want: t_len,
            });
        }
    }
    for store in &scenario.storages {
        if scenario.zone(&store.zone).is_none() {
            return Err(BuildError::DanglingReference {
                path: format!("storages.{}", store.id),
                target: store.zone.clone(),
            });
        }
        if !store.inflows.is_empty() && store.inflows.len() != t_len {
            return Err(BuildError::SeriesLength {
                path: format!("storages.{}.inflows", store.id),
                got: store.inflows.len(),
                want: t_len,
            });
        }
    }
    for link in &scenario.links {
        for z in [&link.zones.0, &link.zones.1] {
            if scenario.zone(z).is_none() {
                return Err(BuildError::DanglingReference {
                    path: format!("links.{}-{}", link.zones.0, link.zones.1),
                    target: z.clone(),
                });
            }
        }
    }
    Ok(())
}

fn zone_has_heat(scenario: &Scenario, zone: &str) -> bool {
    scenario.demand.contains_key(&(zone.to_string(), Product::Ht))
        || scenario
            .dispatchables
            .iter()
            .any(|i| i.zone == zone && i.products().contains(&Product::Ht))
}

/// Hourly equality rows; the electricity dual is the zonal power price and
/// the heat dual the zonal heat price.
fn add_market_clearing(lp: &mut LpProblem, scenario: &Scenario) {
    for zone in &scenario.zones {
        let demand_el = scenario.demand_series(&zone.id, Product::El);
        for (t, &d) in demand_el.iter().enumerate() {
            let row = lp.add_row(RowKey::ClearEl { zone: zone.id.clone(), t }, Sense::Eq, d);
            for tech in scenario.dispatchables.iter().filter(|i| i.zone == zone.id) {
                for fuel in &tech.fuels {
                    if let Some(col) = lp.index.col(&VarKey::Gen {
                        tech: tech.id.clone(),
                        t,
                        product: Product::El,
                        fuel: fuel.clone(),
                    }) {
                        lp.set_coeff(row, col, 1.0);
                    }
                    // Power-to-heat demand appears on the consumption side.
                    if fuel == "power" {
                        let col = lp
                            .index
                            .col(&VarKey::FuelBurn {
                                tech: tech.id.clone(),
                                t,
                                fuel: fuel.clone(),
                            })
                            .expect("burn column exists");
                        lp.set_coeff(row, col, -1.0);
                    }
                }
            }
            for tech in scenario.intermittents.iter().filter(|n| n.zone == zone.id) {
                let col = lp
                    .index
                    .col(&VarKey::IntermGen { tech: tech.id.clone(), t })
                    .expect("interm column exists");
                lp.set_coeff(row, col, 1.0);
            }
            for store in scenario.storages.iter().filter(|k| k.zone == zone.id) {
                let out = lp
                    .index
                    .col(&VarKey::StoreOut { tech: store.id.clone(), t })
                    .expect("storage column exists");
                let sin = lp
                    .index
                    .col(&VarKey::StoreIn { tech: store.id.clone(), t })
                    .expect("storage column exists");
                lp.set_coeff(row, out, 1.0);
                lp.set_coeff(row, sin, -1.0);
            }
            for link in &scenario.links {
                for (from, to) in [
                    (&link.zones.0, &link.zones.1),
                    (&link.zones.1, &link.zones.0),
                ] {
                    if from == &zone.id {
                        let col = lp
                            .index
                            .col(&VarKey::Flow {
                                from: from.clone(),
                                to: to.clone(),
                                t,
                            })
                            .expect("flow column exists");
                        lp.set_coeff(row, col, -1.0);
                    }
                }
            }
            if let Some(col) = lp.index.col(&VarKey::Curtail { zone: zone.id.clone(), t }) {
                lp.set_coeff(row, col, -1.0);
            }
            let nse = lp
                .index
                .col(&VarKey::Nse {
                    zone: zone.id.clone(),
                    t,
                    product: Product::El,
                })
                .expect("nse column exists");
            lp.set_coeff(row, nse, 1.0);
        }

        if !zone_has_heat(scenario, &zone.id) {
            continue;
        }
        let demand_ht = scenario.demand_series(&zone.id, Product::Ht);
        for (t, &d) in demand_ht.iter().enumerate() {
            let row = lp.add_row(RowKey::ClearHt { zone: zone.id.clone(), t }, Sense::Eq, d);
            for tech in scenario.dispatchables.iter().filter(|i| i.zone == zone.id) {
                for fuel in &tech.fuels {
                    if let Some(col) = lp.index.col(&VarKey::Gen {
                        tech: tech.id.clone(),
                        t,
                        product: Product::Ht,
                        fuel: fuel.clone(),
                    }) {
                        lp.set_coeff(row, col, 1.0);
                    }
                }
            }
            if let Some(col) = lp.index.col(&VarKey::Nse {
                zone: zone.id.clone(),
                t,
                product: Product::Ht,
            }) {
                lp.set_coeff(row, col, 1.0);
            }
        }
    }
}

fn add_generation_and_chp(lp: &mut LpProblem, scenario: &Scenario) {
    for tech in &scenario.dispatchables {
        let add = lp.index.col(&VarKey::AddDispatch { tech: tech.id.clone() });
        let deco = lp
            .index
            .col(&VarKey::DecoDispatch { tech: tech.id.clone() })
            .expect("deco column exists");
        for t in 0..scenario.horizon {
            if let Some(region) = &tech.chp_region {
                // Capacity: sum of corner weights over all corners and fuels.
                let cap = lp.add_row(
                    RowKey::ChpCap { tech: tech.id.clone(), t },
                    Sense::Le,
                    tech.initial_capacity,
                );
                for fuel in &tech.fuels {
                    for corner in 0..region.corners.len() {
                        let w = lp
                            .index
                            .col(&VarKey::CornerWeight {
                                tech: tech.id.clone(),
                                t,
                                corner,
                                fuel: fuel.clone(),
                            })
                            .expect("corner column exists");
                        lp.set_coeff(cap, w, 1.0);
                    }
                }
                if let Some(a) = add {
                    lp.set_coeff(cap, a, -1.0);
                }
                lp.set_coeff(cap, deco, 1.0);

                // Outputs and fuel intake as corner combinations.
                for fuel in &tech.fuels {
                    for product in [Product::El, Product::Ht] {
                        let g = lp
                            .index
                            .col(&VarKey::Gen {
                                tech: tech.id.clone(),
                                t,
                                product,
                                fuel: fuel.clone(),
                            })
                            .expect("gen column exists");
                        let row = lp.add_row(
                            RowKey::ChpGen {
                                tech: tech.id.clone(),
                                t,
                                product,
                                fuel: fuel.clone(),
                            },
                            Sense::Eq,
                            0.0,
                        );
                        lp.set_coeff(row, g, 1.0);
                        for (corner, c) in region.corners.iter().enumerate() {
                            let psi = match product {
                                Product::El => c.el,
                                Product::Ht => c.ht,
                            };
                            let w = lp
                                .index
                                .col(&VarKey::CornerWeight {
                                    tech: tech.id.clone(),
                                    t,
                                    corner,
                                    fuel: fuel.clone(),
                                })
                                .expect("corner column exists");
                            lp.set_coeff(row, w, -psi);
                        }
                    }
                    let b = lp
                        .index
                        .col(&VarKey::FuelBurn {
                            tech: tech.id.clone(),
                            t,
                            fuel: fuel.clone(),
                        })
                        .expect("burn column exists");
                    let row = lp.add_row(
                        RowKey::ChpFuel {
                            tech: tech.id.clone(),
                            t,
                            fuel: fuel.clone(),
                        },
                        Sense::Eq,
                        0.0,
                    );
                    lp.set_coeff(row, b, 1.0);
                    for corner in 0..region.corners.len() {
                        let chi = region.fuel_input(corner);
                        let w = lp
                            .index
                            .col(&VarKey::CornerWeight {
                                tech: tech.id.clone(),
                                t,
                                corner,
                                fuel: fuel.clone(),
                            })
                            .expect("corner column exists");
                        lp.set_coeff(row, w, -chi);
                    }
                }
            } else {
                // Capacity per delivered product and fuel-conversion links.
                for product in tech.products() {
                    let cap = lp.add_row(
                        RowKey::CapDispatch {
                            tech: tech.id.clone(),
                            t,
                            product,
                        },
                        Sense::Le,
                        tech.initial_capacity,
                    );
                    for fuel in &tech.fuels {
                        if let Some(g) = lp.index.col(&VarKey::Gen {
                            tech: tech.id.clone(),
                            t,
                            product,
                            fuel: fuel.clone(),
                        }) {
                            lp.set_coeff(cap, g, 1.0);
                        }
                    }
                    if let Some(a) = add {
                        lp.set_coeff(cap, a, -1.0);
                    }
                    lp.set_coeff(cap, deco, 1.0);
                }
                for fuel in &tech.fuels {
                    let b = lp
                        .index
                        .col(&VarKey::FuelBurn {
                            tech: tech.id.clone(),
                            t,
                            fuel: fuel.clone(),
                        })
                        .expect("burn column exists");
                    for product in tech.products() {
                        let Some(&eta) = tech.efficiency.get(&(product, fuel.clone())) else {
                            continue;
                        };
                        let g = lp
                            .index
                            .col(&VarKey::Gen {
                                tech: tech.id.clone(),
                                t,
                                product,
                                fuel: fuel.clone(),
                            })
                            .expect("gen column exists");
                        let row = lp.add_row(
                            RowKey::FuelLink {
                                tech: tech.id.clone(),
                                t,
                                product,
                                fuel: fuel.clone(),
                            },
                            Sense::Eq,
                            0.0,
                        );
                        lp.set_coeff(row, g, 1.0);
                        lp.set_coeff(row, b, -eta);
                    }
                }
            }
        }
    }
}

/// Intermittent generation is fixed by profile and capacity; curtailment is
/// netted out on the demand side of the clearing row.
fn add_intermittent_definitions(lp: &mut LpProblem, scenario: &Scenario) {
    for tech in &scenario.intermittents {
        let add = lp.index.col(&VarKey::AddInterm { tech: tech.id.clone() });
        let deco = lp
            .index
            .col(&VarKey::DecoInterm { tech: tech.id.clone() })
            .expect("deco column exists");
        for t in 0..scenario.horizon {
            let phi = tech.profile[t];
            let row = lp.add_row(
                RowKey::IntermDef { tech: tech.id.clone(), t },
                Sense::Eq,
                phi * tech.initial_capacity,
            );
            let r = lp
                .index
                .col(&VarKey::IntermGen { tech: tech.id.clone(), t })
                .expect("interm column exists");
            lp.set_coeff(row, r, 1.0);
            if let Some(a) = add {
                lp.set_coeff(row, a, -phi);
            }
            lp.set_coeff(row, deco, phi);
        }
    }
}

fn add_storage(lp: &mut LpProblem, scenario: &Scenario) {
    for store in &scenario.storages {
        let add_power = lp
            .index
            .col(&VarKey::AddStorePower { tech: store.id.clone() });
        let add_energy = lp
            .index
            .col(&VarKey::AddStoreEnergy { tech: store.id.clone() });
        for t in 0..scenario.horizon {
            let sin = lp
                .index
                .col(&VarKey::StoreIn { tech: store.id.clone(), t })
                .expect("storage column exists");
            let out = lp
                .index
                .col(&VarKey::StoreOut { tech: store.id.clone(), t })
                .expect("storage column exists");
            let lvl = lp
                .index
                .col(&VarKey::StoreLevel { tech: store.id.clone(), t })
                .expect("storage column exists");
            if let (Some(ap), Some(ae)) = (add_power, add_energy) {
                let row = lp.add_row(
                    RowKey::StoreInCap { tech: store.id.clone(), t },
                    Sense::Le,
                    store.power_in,
                );
                lp.set_coeff(row, sin, 1.0);
                lp.set_coeff(row, ap, -1.0);
                let row = lp.add_row(
                    RowKey::StoreOutCap { tech: store.id.clone(), t },
                    Sense::Le,
                    store.power_out,
                );
                lp.set_coeff(row, out, 1.0);
                lp.set_coeff(row, ap, -1.0);
                let row = lp.add_row(
                    RowKey::StoreLevelCap { tech: store.id.clone(), t },
                    Sense::Le,
                    store.energy_cap,
                );
                lp.set_coeff(row, lvl, 1.0);
                lp.set_coeff(row, ae, -1.0);
            }
            if t > 0 {
                let inflow = store.inflows.get(t).copied().unwrap_or(0.0);
                let row = lp.add_row(
                    RowKey::StoreBalance { tech: store.id.clone(), t },
                    Sense::Eq,
                    inflow,
                );
                lp.set_coeff(row, lvl, 1.0);
                let prev = lp
                    .index
                    .col(&VarKey::StoreLevel {
                        tech: store.id.clone(),
                        t: t - 1,
                    })
                    .expect("storage column exists");
                lp.set_coeff(row, prev, -1.0);
                lp.set_coeff(row, sin, -store.eta_in);
                lp.set_coeff(row, out, 1.0 / store.eta_out);
            }
        }
        // Added energy must cover at least one hour at added power.
        if let (Some(ap), Some(ae)) = (add_power, add_energy) {
            let row = lp.add_row(
                RowKey::StoreEnergyPower { tech: store.id.clone() },
                Sense::Ge,
                0.0,
            );
            lp.set_coeff(row, ae, 1.0);
            lp.set_coeff(row, ap, -1.0);
        }
        // First- and last-hour fill requirements suppress end effects.
        let first = lp
            .index
            .col(&VarKey::StoreLevel { tech: store.id.clone(), t: 0 })
            .expect("storage column exists");
        let last = lp
            .index
            .col(&VarKey::StoreLevel {
                tech: store.id.clone(),
                t: scenario.horizon - 1,
            })
            .expect("storage column exists");
        let row = lp.add_row(
            RowKey::StoreBoundStart { tech: store.id.clone() },
            Sense::Ge,
            store.boundary_level,
        );
        lp.set_coeff(row, first, 1.0);
        let row = lp.add_row(
            RowKey::StoreBoundEnd { tech: store.id.clone() },
            Sense::Ge,
            store.boundary_level,
        );
        lp.set_coeff(row, last, 1.0);
    }
}

fn add_transmission(lp: &mut LpProblem, scenario: &Scenario) {
    for link in &scenario.links {
        for t in 0..scenario.horizon {
            let fwd = lp
                .index
                .col(&VarKey::Flow {
                    from: link.zones.0.clone(),
                    to: link.zones.1.clone(),
                    t,
                })
                .expect("flow column exists");
            let bwd = lp
                .index
                .col(&VarKey::Flow {
                    from: link.zones.1.clone(),
                    to: link.zones.0.clone(),
                    t,
                })
                .expect("flow column exists");
            let row = lp.add_row(
                RowKey::FlowAnti {
                    from: link.zones.0.clone(),
                    to: link.zones.1.clone(),
                    t,
                },
                Sense::Eq,
                0.0,
            );
            lp.set_coeff(row, fwd, 1.0);
            lp.set_coeff(row, bwd, 1.0);
            if link.expandable {
                // Antisymmetry makes a lower-bound row redundant: the
                // opposite direction carries its own upper bound.
                for (col, from, to) in [
                    (fwd, &link.zones.0, &link.zones.1),
                    (bwd, &link.zones.1, &link.zones.0),
                ] {
                    let add = lp
                        .index
                        .col(&VarKey::AddFlow {
                            from: from.clone(),
                            to: to.clone(),
                        })
                        .expect("expansion column exists");
                    let row = lp.add_row(
                        RowKey::FlowUpper {
                            from: from.clone(),
                            to: to.clone(),
                            t,
                        },
                        Sense::Le,
                        link.ntc,
                    );
                    lp.set_coeff(row, col, 1.0);
                    lp.set_coeff(row, add, -1.0);
                }
            }
        }
        if link.expandable {
            let f = lp
                .index
                .col(&VarKey::AddFlow {
                    from: link.zones.0.clone(),
                    to: link.zones.1.clone(),
                })
                .expect("expansion column exists");
            let b = lp
                .index
                .col(&VarKey::AddFlow {
                    from: link.zones.1.clone(),
                    to: link.zones.0.clone(),
                })
                .expect("expansion column exists");
            let row = lp.add_row(
                RowKey::FlowExpandSym {
                    from: link.zones.0.clone(),
                    to: link.zones.1.clone(),
                },
                Sense::Eq,
                0.0,
            );
            lp.set_coeff(row, f, 1.0);
            lp.set_coeff(row, b, -1.0);
        }
    }
}

/// Hourly spinning-reserve requirement: dispatchable electricity output,
/// run-of-river generation and storage activity must cover a load share
/// plus a share of peak intermittent capability.
fn add_reserves(lp: &mut LpProblem, scenario: &Scenario) {
    for zone in &scenario.zones {
        if zone.reserve_load_factor == 0.0 && zone.reserve_intermittent_factor == 0.0 {
            continue;
        }
        let peak = scenario.peak_load(&zone.id, Product::El);
        let base = zone.reserve_load_factor * peak;
        let sigma = zone.reserve_intermittent_factor;
        for t in 0..scenario.horizon {
            let mut rhs = base;
            let row = lp.add_row(RowKey::Reserve { zone: zone.id.clone(), t }, Sense::Ge, 0.0);
            for tech in scenario.dispatchables.iter().filter(|i| i.zone == zone.id) {
                for fuel in &tech.fuels {
                    if let Some(g) = lp.index.col(&VarKey::Gen {
                        tech: tech.id.clone(),
                        t,
                        product: Product::El,
                        fuel: fuel.clone(),
                    }) {
                        lp.set_coeff(row, g, 1.0);
                    }
                }
            }
            for tech in scenario.intermittents.iter().filter(|n| n.zone == zone.id) {
                let phi_hat = tech.peak_profile();
                if tech.kind == IntermittentKind::Ror {
                    let r = lp
                        .index
                        .col(&VarKey::IntermGen { tech: tech.id.clone(), t })
                        .expect("interm column exists");
                    lp.set_coeff(row, r, 1.0);
                } else {
                    rhs += sigma * phi_hat * tech.initial_capacity;
                    if let Some(a) = lp.index.col(&VarKey::AddInterm { tech: tech.id.clone() }) {
                        lp.set_coeff(row, a, -sigma * phi_hat);
                    }
                }
            }
            for store in scenario.storages.iter().filter(|k| k.zone == zone.id) {
                let out = lp
                    .index
                    .col(&VarKey::StoreOut { tech: store.id.clone(), t })
                    .expect("storage column exists");
                let sin = lp
                    .index
                    .col(&VarKey::StoreIn { tech: store.id.clone(), t })
                    .expect("storage column exists");
                lp.set_coeff(row, out, 1.0);
                lp.set_coeff(row, sin, 1.0);
            }
            lp.rhs[row] = rhs;
        }
    }
}

fn add_curtailment_and_nse(lp: &mut LpProblem, scenario: &Scenario) {
    for zone in &scenario.zones {
        for t in 0..scenario.horizon {
            let Some(q) = lp.index.col(&VarKey::Curtail { zone: zone.id.clone(), t }) else {
                continue;
            };
            let row = lp.add_row(
                RowKey::CurtailCap { zone: zone.id.clone(), t },
                Sense::Le,
                0.0,
            );
            lp.set_coeff(row, q, 1.0);
            for tech in scenario
                .intermittents
                .iter()
                .filter(|n| n.zone == zone.id && n.kind != IntermittentKind::Ror)
            {
                let r = lp
                    .index
                    .col(&VarKey::IntermGen { tech: tech.id.clone(), t })
                    .expect("interm column exists");
                lp.set_coeff(row, r, -1.0);
            }
        }
    }
    for tech in &scenario.dispatchables {
        let deco = lp
            .index
            .col(&VarKey::DecoDispatch { tech: tech.id.clone() })
            .expect("deco column exists");
        let row = lp.add_row(
            RowKey::DecoDispatchCap { tech: tech.id.clone() },
            Sense::Le,
            tech.initial_capacity,
        );
        lp.set_coeff(row, deco, 1.0);
        if let Some(a) = lp.index.col(&VarKey::AddDispatch { tech: tech.id.clone() }) {
            lp.set_coeff(row, a, -1.0);
        }
    }
    for tech in &scenario.intermittents {
        let deco = lp
            .index
            .col(&VarKey::DecoInterm { tech: tech.id.clone() })
            .expect("deco column exists");
        let row = lp.add_row(
            RowKey::DecoIntermCap { tech: tech.id.clone() },
            Sense::Le,
            tech.initial_capacity,
        );
        lp.set_coeff(row, deco, 1.0);
        if let Some(a) = lp.index.col(&VarKey::AddInterm { tech: tech.id.clone() }) {
            lp.set_coeff(row, a, -1.0);
        }
    }
}

/// Annual renewable-generation floor and the wind-capacity cap.
///
/// Intermittent generation enters gross (curtailment is netted out in the
/// clearing rows, not here), so curtailed renewable electricity counts
/// toward the target; natural inflows are credited as a constant on the
/// right-hand side.
fn add_policy_and_caps(lp: &mut LpProblem, scenario: &Scenario) {
    for zone in &scenario.zones {
        if let Some(target) = zone.renewable_target {
            let inflow_credit: f64 = scenario
                .storages
                .iter()
                .filter(|k| k.zone == zone.id)
                .map(|k| k.inflows.iter().sum::<f64>())
                .sum();
            let row = lp.add_row(
                RowKey::Policy { zone: zone.id.clone() },
                Sense::Ge,
                target - inflow_credit,
            );
            for t in 0..scenario.horizon {
                for tech in scenario.intermittents.iter().filter(|n| n.zone == zone.id) {
                    let r = lp
                        .index
                        .col(&VarKey::IntermGen { tech: tech.id.clone(), t })
                        .expect("interm column exists");
                    lp.set_coeff(row, r, 1.0);
                }
                for tech in scenario.dispatchables.iter().filter(|i| i.zone == zone.id) {
                    for fuel in &tech.fuels {
                        if !scenario.fuel(fuel).map(|f| f.renewable).unwrap_or(false) {
                            continue;
                        }
                        if let Some(g) = lp.index.col(&VarKey::Gen {
                            tech: tech.id.clone(),
                            t,
                            product: Product::El,
                            fuel: fuel.clone(),
                        }) {
                            lp.set_coeff(row, g, 1.0);
                        }
                    }
                }
            }
        }

        if let Some(&cap) = scenario.wind_cap.get(&zone.id) {
            let initial: f64 = scenario
                .intermittents
                .iter()
                .filter(|n| n.zone == zone.id && n.kind == IntermittentKind::WindOn)
                .map(|n| n.initial_capacity)
                .sum();
            let row = lp.add_row(
                RowKey::WindCap { zone: zone.id.clone() },
                Sense::Le,
                cap - initial,
            );
            for tech in scenario
                .intermittents
                .iter()
                .filter(|n| n.zone == zone.id && n.kind == IntermittentKind::WindOn)
            {
                if let Some(a) = lp.index.col(&VarKey::AddInterm { tech: tech.id.clone() }) {
                    lp.set_coeff(row, a, 1.0);
                }
                let deco = lp
                    .index
                    .col(&VarKey::DecoInterm { tech: tech.id.clone() })
                    .expect("deco column exists");
                lp.set_coeff(row, deco, -1.0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{
        build_feasible_operating_region, DispatchableTech, Fuel, IntermittentTech, StorageTech,
        TransmissionLink, Zone,
    };
    use crate::lp::RowKey;
    use crate::solver::{solve, SolverOptions, SolverStatus};
    use std::collections::BTreeMap;

    fn zone(id: &str) -> Zone {
        Zone {
            id: id.to_string(),
            reserve_load_factor: 0.0,
            reserve_intermittent_factor: 0.0,
            voll: 12_500.0,
            renewable_target: None,
            distance_to: BTreeMap::new(),
        }
    }

    fn gas() -> Fuel {
        Fuel {
            id: "gas".to_string(),
            co2_intensity: 0.201,
            air_pollution_var: 0.0,
            air_pollution_fix: 0.0,
            renewable: false,
        }
    }

    fn plant(id: &str, zone: &str, fuel: &str, eta: f64, cap: f64) -> DispatchableTech {
        let mut efficiency = BTreeMap::new();
        efficiency.insert((Product::El, fuel.to_string()), eta);
        DispatchableTech {
            id: id.to_string(),
            zone: zone.to_string(),
            fuels: vec![fuel.to_string()],
            efficiency,
            initial_capacity: cap,
            capital_cost: 0.0,
            om_quasi_fixed: 0.0,
            om_var: 0.0,
            expandable: false,
            chp_region: None,
        }
    }

    fn base_scenario(horizon: usize) -> Scenario {
        Scenario {
            horizon,
            zones: vec![zone("AA")],
            fuels: vec![gas()],
            dispatchables: Vec::new(),
            intermittents: Vec::new(),
            storages: Vec::new(),
            links: Vec::new(),
            demand: BTreeMap::new(),
            fuel_prices: BTreeMap::new(),
            co2_price: BTreeMap::new(),
            wind_cap: BTreeMap::new(),
            numeraire: "EUR".to_string(),
        }
    }

    fn set_el_demand(s: &mut Scenario, zone: &str, series: Vec<f64>) {
        s.demand.insert((zone.to_string(), Product::El), series);
    }

    fn set_fuel_price(s: &mut Scenario, zone: &str, fuel: &str, price: f64) {
        let series = vec![price; s.horizon];
        s.fuel_prices
            .insert((zone.to_string(), fuel.to_string()), series);
    }

    fn wind(id: &str, zone: &str, profile: Vec<f64>, cap: f64) -> IntermittentTech {
        IntermittentTech {
            id: id.to_string(),
            kind: IntermittentKind::WindOn,
            zone: zone.to_string(),
            initial_capacity: cap,
            capital_cost: 0.0,
            om_quasi_fixed: 0.0,
            om_var: 0.0,
            profile,
            expandable: false,
            air_pollution_fuel: None,
        }
    }

    fn solve_scenario(s: &Scenario) -> (LpProblem, crate::solver::LpSolution) {
        let lp = build_lp(s).expect("builds");
        lp.check_well_formed().expect("well-formed");
        let sol = solve(&lp, &SolverOptions::default()).expect("solves");
        (lp, sol)
    }

    #[test]
    fn zero_horizon_is_empty() {
        let s = base_scenario(0);
        let lp = build_lp(&s).unwrap();
        assert_eq!(lp.num_rows(), 0);
        assert_eq!(lp.num_cols(), 0);
        assert_eq!(lp.objective_offset, 0.0);
    }

    #[test]
    fn miniature_structure_matches_hand_enumeration() {
        let mut s = base_scenario(1);
        s.dispatchables.push(plant("gt", "AA", "gas", 0.4, 2.0));
        set_el_demand(&mut s, "AA", vec![1.0]);
        set_fuel_price(&mut s, "AA", "gas", 13.62);
        let lp = build_lp(&s).unwrap();
        // Columns: deco_g, b, g_el, q_nse_el.
        assert_eq!(lp.num_cols(), 4);
        // Rows: clear_el, cap_g, fuel_link, deco cap.
        assert_eq!(lp.num_rows(), 4);
        assert!(lp.index.row(&RowKey::ClearEl { zone: "AA".into(), t: 0 }).is_some());
        assert!(lp
            .index
            .row(&RowKey::CapDispatch {
                tech: "gt".into(),
                t: 0,
                product: Product::El,
            })
            .is_some());
    }

    #[test]
    fn doubling_horizon_doubles_time_indexed_rows() {
        fn row_counts(t: usize) -> (usize, usize) {
            let mut s = base_scenario(t);
            s.zones.push(zone("BB"));
            s.dispatchables.push(plant("gt", "AA", "gas", 0.4, 2.0));
            s.intermittents.push(wind("w1", "AA", vec![0.3; t], 1.0));
            s.storages.push(StorageTech {
                id: "st".to_string(),
                zone: "AA".to_string(),
                power_out: 1.0,
                power_in: 1.0,
                energy_cap: 4.0,
                eta_in: 0.9,
                eta_out: 0.9,
                inflows: Vec::new(),
                capital_cost_power: 0.0,
                capital_cost_energy: 0.0,
                expandable: false,
                boundary_level: 2.0,
            });
            s.links.push(TransmissionLink {
                zones: ("AA".to_string(), "BB".to_string()),
                ntc: 1.0,
                capital_cost: 0.0,
                expandable: false,
                expansion_limit: 0.0,
            });
            set_el_demand(&mut s, "AA", vec![1.0; t]);
            set_el_demand(&mut s, "BB", vec![0.5; t]);
            set_fuel_price(&mut s, "AA", "gas", 13.62);
            let lp = build_lp(&s).unwrap();
            let timed = lp
                .index
                .row_keys()
                .iter()
                .filter(|k| {
                    use RowKey::*;
                    matches!(
                        k,
                        ClearEl { .. }
                            | ClearHt { .. }
                            | CapDispatch { .. }
                            | FuelLink { .. }
                            | ChpCap { .. }
                            | ChpGen { .. }
                            | ChpFuel { .. }
                            | IntermDef { .. }
                            | StoreOutCap { .. }
                            | StoreInCap { .. }
                            | StoreLevelCap { .. }
                            | StoreBalance { .. }
                            | FlowUpper { .. }
                            | FlowLower { .. }
                            | FlowAnti { .. }
                            | Reserve { .. }
                            | CurtailCap { .. }
                    )
                })
                .count();
            (timed, lp.num_rows())
        }
        let (timed24, total24) = row_counts(24);
        let (timed48, total48) = row_counts(48);
        // The storage balance misses its t = 0 row (one storage), so the
        // timed count is a*T - 1 and doubles exactly after that correction.
        assert_eq!(timed48 + 1, 2 * (timed24 + 1));
        // Non-time-indexed rows do not depend on the horizon.
        assert_eq!(total48 - timed48, total24 - timed24);
    }

    #[test]
    fn identical_scenarios_build_identical_triplets() {
        let mut s = base_scenario(6);
        s.dispatchables.push(plant("gt", "AA", "gas", 0.4, 2.0));
        s.intermittents.push(wind("w1", "AA", vec![0.5; 6], 1.0));
        set_el_demand(&mut s, "AA", vec![1.0; 6]);
        set_fuel_price(&mut s, "AA", "gas", 13.62);
        let a = build_lp(&s).unwrap();
        let b = build_lp(&s).unwrap();
        assert_eq!(a.triplets, b.triplets);
        assert_eq!(a.rhs, b.rhs);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.meta.scenario_hash, b.meta.scenario_hash);
    }

    #[test]
    fn merit_order_dispatch_and_prices() {
        // Cheap 1.5 GW + expensive 1 GW; demand 1 then 2 GW.
        let mut s = base_scenario(2);
        s.fuels.push(Fuel {
            id: "coal".to_string(),
            co2_intensity: 0.337,
            air_pollution_var: 0.0,
            air_pollution_fix: 0.0,
            renewable: false,
        });
        s.dispatchables.push(plant("cheap", "AA", "coal", 0.45, 1.5));
        s.dispatchables.push(plant("dear", "AA", "gas", 0.40, 1.0));
        set_el_demand(&mut s, "AA", vec![1.0, 2.0]);
        set_fuel_price(&mut s, "AA", "coal", 9.0); // 20 /MWh_el
        set_fuel_price(&mut s, "AA", "gas", 20.0); // 50 /MWh_el
        let (lp, sol) = solve_scenario(&s);
        assert_eq!(sol.status, SolverStatus::Optimal);
        let g = |tech: &str, t: usize| {
            let fuel = if tech == "cheap" { "coal" } else { "gas" };
            sol.primal[lp
                .index
                .col(&VarKey::Gen {
                    tech: tech.into(),
                    t,
                    product: Product::El,
                    fuel: fuel.into(),
                })
                .unwrap()]
        };
        assert!((g("cheap", 0) - 1.0).abs() < 1e-7);
        assert!(g("dear", 0).abs() < 1e-7);
        assert!((g("cheap", 1) - 1.5).abs() < 1e-7);
        assert!((g("dear", 1) - 0.5).abs() < 1e-7);
        // Price = marginal cost of the marginal unit.
        let price = |t: usize| {
            sol.dual[lp.index.row(&RowKey::ClearEl { zone: "AA".into(), t }).unwrap()]
        };
        assert!((price(0) - 20.0).abs() < 1e-6, "{}", price(0));
        assert!((price(1) - 50.0).abs() < 1e-6, "{}", price(1));
        // Reconstruction: fuel cost equals the objective.
        let fuel_cost = 1.0 / 0.45 * 9.0 + (1.5 / 0.45 * 9.0 + 0.5 / 0.4 * 20.0);
        assert!((sol.objective - fuel_cost).abs() < 1e-6 * fuel_cost);
    }

    #[test]
    fn chp_backpressure_corner_under_heat_demand() {
        let region = build_feasible_operating_region(0.4, 0.15, 0.0, 1.0).unwrap();
        let mut s = base_scenario(1);
        let mut chp = plant("chp", "AA", "gas", 0.4, 1.0);
        chp.efficiency.clear();
        chp.chp_region = Some(region);
        s.dispatchables.push(chp);
        set_el_demand(&mut s, "AA", vec![0.0]);
        s.demand.insert(("AA".to_string(), Product::Ht), vec![1.0]);
        set_fuel_price(&mut s, "AA", "gas", 13.62);
        let (lp, sol) = solve_scenario(&s);
        assert_eq!(sol.status, SolverStatus::Optimal);
        let burn = sol.primal[lp
            .index
            .col(&VarKey::FuelBurn {
                tech: "chp".into(),
                t: 0,
                fuel: "gas".into(),
            })
            .unwrap()];
        // Heat-only corner: fuel share beta*q_bar at eta_el 0.4.
        assert!((burn - 0.15 / 0.4).abs() < 1e-7, "burn {burn}");
        let g_ht = sol.primal[lp
            .index
            .col(&VarKey::Gen {
                tech: "chp".into(),
                t: 0,
                product: Product::Ht,
                fuel: "gas".into(),
            })
            .unwrap()];
        assert!((g_ht - 1.0).abs() < 1e-7);
        assert!((sol.objective - 0.375 * 13.62).abs() < 1e-6);
    }

    #[test]
    fn storage_round_trip_efficiency() {
        // Demand in hour 1 is served from a full reservoir that must be
        // refilled from free wind in hour 2; round trip costs 19% of the
        // cycled energy.
        let mut s = base_scenario(4);
        s.intermittents.push(wind("w1", "AA", vec![0.0, 0.0, 1.0, 0.0], 10.0));
        s.storages.push(StorageTech {
            id: "st".to_string(),
            zone: "AA".to_string(),
            power_out: 1.0,
            power_in: 1.0,
            energy_cap: 1.0,
            eta_in: 0.9,
            eta_out: 0.9,
            inflows: Vec::new(),
            capital_cost_power: 0.0,
            capital_cost_energy: 0.0,
            expandable: false,
            boundary_level: 1.0,
        });
        set_el_demand(&mut s, "AA", vec![0.0, 0.405, 0.0, 0.0]);
        let (lp, sol) = solve_scenario(&s);
        assert_eq!(sol.status, SolverStatus::Optimal);
        let nse: f64 = (0..4)
            .map(|t| {
                sol.primal[lp
                    .index
                    .col(&VarKey::Nse {
                        zone: "AA".into(),
                        t,
                        product: Product::El,
                    })
                    .unwrap()]
            })
            .sum();
        assert!(nse < 1e-7, "lost load {nse}");
        let s_in = sol.primal[lp
            .index
            .col(&VarKey::StoreIn { tech: "st".into(), t: 2 })
            .unwrap()];
        assert!((s_in - 0.5).abs() < 1e-6, "charge {s_in}");
    }

    #[test]
    fn transmission_antisymmetry_and_flow_limit() {
        let mut s = base_scenario(1);
        s.zones.push(zone("BB"));
        s.dispatchables.push(plant("gt", "AA", "gas", 0.5, 10.0));
        s.links.push(TransmissionLink {
            zones: ("AA".to_string(), "BB".to_string()),
            ntc: 1.0,
            capital_cost: 0.0,
            expandable: false,
            expansion_limit: 0.0,
        });
        set_el_demand(&mut s, "BB", vec![2.0]);
        set_el_demand(&mut s, "AA", vec![0.0]);
        set_fuel_price(&mut s, "AA", "gas", 10.0);
        let (lp, sol) = solve_scenario(&s);
        let fwd = sol.primal[lp
            .index
            .col(&VarKey::Flow { from: "AA".into(), to: "BB".into(), t: 0 })
            .unwrap()];
        let bwd = sol.primal[lp
            .index
            .col(&VarKey::Flow { from: "BB".into(), to: "AA".into(), t: 0 })
            .unwrap()];
        assert!((fwd - 1.0).abs() < 1e-7, "flow {fwd}");
        assert!((fwd + bwd).abs() < 1e-9);
        // The congested importer pays lost-load prices for the rest.
        let nse = sol.primal[lp
            .index
            .col(&VarKey::Nse { zone: "BB".into(), t: 0, product: Product::El })
            .unwrap()];
        assert!((nse - 1.0).abs() < 1e-7);
        let p_bb = sol.dual[lp.index.row(&RowKey::ClearEl { zone: "BB".into(), t: 0 }).unwrap()];
        assert!((p_bb - 12_500.0).abs() < 1e-5, "price {p_bb}");
    }

    #[test]
    fn curtailment_is_free_disposal() {
        let mut s = base_scenario(1);
        s.intermittents.push(wind("w1", "AA", vec![1.0], 10.0));
        set_el_demand(&mut s, "AA", vec![1.0]);
        let (lp, sol) = solve_scenario(&s);
        // Costless disposal is degenerate with costless decommissioning;
        // together they must absorb the 9 GW surplus.
        let q = sol.primal[lp
            .index
            .col(&VarKey::Curtail { zone: "AA".into(), t: 0 })
            .unwrap()];
        let deco = sol.primal[lp
            .index
            .col(&VarKey::DecoInterm { tech: "w1".into() })
            .unwrap()];
        assert!((q + deco - 9.0).abs() < 1e-7, "q {q} deco {deco}");
        let r = sol.primal[lp
            .index
            .col(&VarKey::IntermGen { tech: "w1".into(), t: 0 })
            .unwrap()];
        assert!((r - q - 1.0).abs() < 1e-7, "consumed {}", r - q);
        // Surplus hours clear at a zero price.
        let price = sol.dual[lp.index.row(&RowKey::ClearEl { zone: "AA".into(), t: 0 }).unwrap()];
        assert!(price.abs() < 1e-7, "price {price}");
    }

    #[test]
    fn quasi_fixed_om_rewards_decommissioning() {
        let mut s = base_scenario(1);
        let mut p = plant("gt", "AA", "gas", 0.5, 4.0);
        // Cheaper to keep 1 GW running than to pay for lost load, but
        // cheaper to scrap the idle 3 GW than to keep them around.
        p.om_quasi_fixed = 8_000.0;
        s.dispatchables.push(p);
        set_el_demand(&mut s, "AA", vec![1.0]);
        set_fuel_price(&mut s, "AA", "gas", 10.0);
        let (lp, sol) = solve_scenario(&s);
        let deco = sol.primal[lp
            .index
            .col(&VarKey::DecoDispatch { tech: "gt".into() })
            .unwrap()];
        assert!((deco - 3.0).abs() < 1e-6, "deco {deco}");
        let expected = 4.0 * 8_000.0 - 3.0 * 8_000.0 + 1.0 / 0.5 * 10.0;
        assert!((sol.objective - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn wind_cap_limits_expansion() {
        let mut s = base_scenario(2);
        let mut w = wind("w1", "AA", vec![1.0, 1.0], 1.0);
        w.expandable = true;
        w.capital_cost = 1.0; // nominal, far below the fuel it displaces
        s.intermittents.push(w);
        s.dispatchables.push(plant("gt", "AA", "gas", 0.5, 10.0));
        set_el_demand(&mut s, "AA", vec![5.0, 5.0]);
        set_fuel_price(&mut s, "AA", "gas", 20.0);
        s.wind_cap.insert("AA".to_string(), 3.0);
        let (lp, sol) = solve_scenario(&s);
        let add = sol.primal[lp
            .index
            .col(&VarKey::AddInterm { tech: "w1".into() })
            .unwrap()];
        assert!((add - 2.0).abs() < 1e-6, "added {add}");
        let dual = sol.dual[lp.index.row(&RowKey::WindCap { zone: "AA".into() }).unwrap()];
        assert!(dual < -1e-6, "cap should bind, dual {dual}");
    }

    #[test]
    fn renewable_policy_row_binds() {
        let mut s = base_scenario(2);
        let mut w = wind("w1", "AA", vec![1.0, 1.0], 0.0);
        w.expandable = true;
        w.capital_cost = 100_000.0; // dearer than gas: only policy forces it
        s.intermittents.push(w);
        s.dispatchables.push(plant("gt", "AA", "gas", 0.5, 10.0));
        set_el_demand(&mut s, "AA", vec![4.0, 4.0]);
        set_fuel_price(&mut s, "AA", "gas", 20.0);
        s.zones[0].renewable_target = Some(4.0); // GWh over the horizon
        let (lp, sol) = solve_scenario(&s);
        let add = sol.primal[lp
            .index
            .col(&VarKey::AddInterm { tech: "w1".into() })
            .unwrap()];
        assert!((add - 2.0).abs() < 1e-6, "added {add}");
        let dual = sol.dual[lp.index.row(&RowKey::Policy { zone: "AA".into() }).unwrap()];
        assert!(dual > 1e-6, "target should bind, dual {dual}");
    }

    #[test]
    fn reserve_requirement_forces_spinning_generation() {
        let mut s = base_scenario(1);
        s.zones[0].reserve_load_factor = 0.2;
        s.dispatchables.push(plant("gt", "AA", "gas", 0.5, 10.0));
        s.intermittents.push(wind("w1", "AA", vec![1.0], 10.0));
        set_el_demand(&mut s, "AA", vec![5.0]);
        set_fuel_price(&mut s, "AA", "gas", 20.0);
        let (lp, sol) = solve_scenario(&s);
        // Wind alone could serve demand, but 1 GW (20% of peak) must come
        // from dispatchable units.
        let g = sol.primal[lp
            .index
            .col(&VarKey::Gen {
                tech: "gt".into(),
                t: 0,
                product: Product::El,
                fuel: "gas".into(),
            })
            .unwrap()];
        assert!((g - 1.0).abs() < 1e-6, "spinning {g}");
    }
}
