//! `medea` — validate, solve and sweep capacity-expansion scenarios.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or I/O error,
//! 3 solver failure.

use clap::{Args, Parser, Subcommand};
use medea_core::domain::{validate_scenario, IntermittentKind, Scenario};
use medea_core::engine::{
    opportunity_cost, run_scenario, sensitivity_grid, sweep_wind_cap, EngineError,
};
use medea_core::io::config::{load_scenario, ConfigMeta, Overrides};
use medea_core::io::output::{write_grid, write_outcome, write_sweep};
use medea_core::lp::build_lp;
use medea_core::solver::{write_interchange, SolverOptions};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "medea", version, about = "Capacity-expansion and dispatch optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario configuration and print any violations.
    Validate {
        config: PathBuf,
    },
    /// Solve one scenario and write outcome files.
    Solve {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the wind-capacity cap, optionally over a sensitivity grid.
    Sweep {
        config: PathBuf,
        /// Cap decrement per sweep point, GW.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Semicolon-separated axes, e.g. `co2=0,25,50;pv=625,380;ntc=4.9,10`.
        /// PV values are overnight costs in currency/kW.
        #[arg(long)]
        grid: Option<String>,
        /// Worker threads for independent solves.
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Scalar overrides `key=value`: co2_price, pv_capital_cost (currency/kW),
    /// ntc, wind_cap, horizon, tech.<id>.capital_cost.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config: String,
    overrides: Vec<String>,
    scenario_hash: String,
    tool_version: &'static str,
    wall_clock_ms: u128,
    solver: SolverStats,
}

#[derive(Serialize, Default)]
struct SolverStats {
    mode: String,
    status: String,
    iterations: usize,
    objective: Option<f64>,
    points: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => cmd_validate(&config),
        Command::Solve { config, common } => cmd_solve(&config, &common),
        Command::Sweep {
            config,
            step,
            grid,
            jobs,
            common,
        } => cmd_sweep(&config, step, grid.as_deref(), jobs, &common),
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn load(
    config: &Path,
    set: &[String],
) -> Result<(Scenario, ConfigMeta, Overrides), (u8, String)> {
    let overrides =
        Overrides::parse(set).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let (scenario, meta) =
        load_scenario(config, &overrides).map_err(|e| (EXIT_USAGE, e.to_string()))?;
    let violations = validate_scenario(&scenario);
    if !violations.is_empty() {
        let text = violations
            .iter()
            .map(|v| format!("{}: {}: {}", v.path, v.rule, v.message))
            .collect::<Vec<_>>()
            .join("\n");
        return Err((EXIT_VALIDATION, text));
    }
    Ok((scenario, meta, overrides))
}

fn cmd_validate(config: &Path) -> ExitCode {
    let overrides = Overrides::default();
    let (scenario, _) = match load_scenario(config, &overrides) {
        Ok(v) => v,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let violations = validate_scenario(&scenario);
    if violations.is_empty() {
        println!("ok: scenario {} is valid", scenario.content_hash());
        ExitCode::SUCCESS
    } else {
        for v in &violations {
            println!("{}: {}: {}", v.path, v.rule, v.message);
        }
        ExitCode::from(EXIT_VALIDATION)
    }
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn interchange_requested() -> bool {
    match std::env::var("MEDEA_SOLVER") {
        Ok(v) => v == "interchange",
        Err(_) => false,
    }
}

fn cmd_solve(config: &Path, common: &Common) -> ExitCode {
    let started = Instant::now();
    let (scenario, _meta, _) = match load(config, &common.set) {
        Ok(v) => v,
        Err((code, message)) => return fail(code, message),
    };
    let mut manifest = RunManifest {
        command: "solve".to_string(),
        config: config.display().to_string(),
        overrides: common.set.clone(),
        scenario_hash: scenario.content_hash(),
        tool_version: env!("CARGO_PKG_VERSION"),
        wall_clock_ms: 0,
        solver: SolverStats::default(),
    };

    if interchange_requested() {
        // Export the model for an external MPS-conformant solver instead
        // of running the bundled simplex.
        let problem = match build_lp(&scenario) {
            Ok(p) => p,
            Err(e) => return fail(EXIT_USAGE, e),
        };
        if let Err(e) = std::fs::create_dir_all(&common.out) {
            return fail(EXIT_USAGE, format!("{}: {e}", common.out.display()));
        }
        let (mps, names) = match write_interchange(&problem, &common.out, "model") {
            Ok(v) => v,
            Err(e) => return fail(EXIT_USAGE, e),
        };
        manifest.solver.mode = "interchange".to_string();
        manifest.solver.status = "exported".to_string();
        manifest.wall_clock_ms = started.elapsed().as_millis();
        if let Err(e) = write_manifest(&common.out, &manifest) {
            return fail(EXIT_USAGE, e);
        }
        println!("exported {} and {}", mps.display(), names.display());
        return ExitCode::SUCCESS;
    }

    manifest.solver.mode = "internal".to_string();
    match run_scenario(&scenario, &SolverOptions::default()) {
        Ok(outcome) => {
            manifest.solver.status = "optimal".to_string();
            manifest.solver.iterations = outcome.iterations;
            manifest.solver.objective = Some(outcome.objective);
            manifest.wall_clock_ms = started.elapsed().as_millis();
            if let Err(e) = write_outcome(&outcome, &common.out) {
                return fail(EXIT_USAGE, e);
            }
            if let Err(e) = write_manifest(&common.out, &manifest) {
                return fail(EXIT_USAGE, e);
            }
            let wind_added: f64 = outcome
                .zones
                .iter()
                .flat_map(|z| &z.capacities)
                .filter(|c| c.class == "wind_on")
                .map(|c| c.added)
                .sum();
            let trade: f64 = outcome.zones.iter().map(|z| z.trade_revenue.abs()).sum::<f64>() / 2.0;
            println!(
                "objective={:.3} k{} wind_added={:.3} GW emissions={:.1} t trade={:.3} k{}",
                outcome.objective,
                scenario.numeraire,
                wind_added,
                outcome.emissions(),
                trade,
                scenario.numeraire
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            manifest.solver.status = match &err {
                EngineError::Infeasible { .. } => "infeasible".to_string(),
                EngineError::Unbounded => "unbounded".to_string(),
                other => other.to_string(),
            };
            manifest.wall_clock_ms = started.elapsed().as_millis();
            let _ = write_manifest(&common.out, &manifest);
            fail(EXIT_SOLVER, err)
        }
    }
}

/// `co2=0,25;pv=625,380;ntc=4.9,10` → per-axis value lists.
fn parse_grid(spec: &str) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), String> {
    let (mut co2, mut pv, mut ntc) = (Vec::new(), Vec::new(), Vec::new());
    for part in spec.split(';').filter(|p| !p.trim().is_empty()) {
        let (key, values) = part
            .split_once('=')
            .ok_or_else(|| format!("grid axis `{part}` is not key=v1,v2,..."))?;
        let parsed: Result<Vec<f64>, _> = values
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect();
        let parsed = parsed.map_err(|_| format!("grid axis `{part}` has a bad number"))?;
        match key.trim() {
            "co2" => co2 = parsed,
            "pv" => pv = parsed,
            "ntc" => ntc = parsed,
            other => return Err(format!("unknown grid axis `{other}`")),
        }
    }
    Ok((co2, pv, ntc))
}

fn cmd_sweep(
    config: &Path,
    step: f64,
    grid: Option<&str>,
    jobs: Option<usize>,
    common: &Common,
) -> ExitCode {
    let started = Instant::now();
    if interchange_requested() {
        return fail(
            EXIT_USAGE,
            "MEDEA_SOLVER=interchange exports single solves only; use `medea solve`",
        );
    }
    let (scenario, meta, _) = match load(config, &common.set) {
        Ok(v) => v,
        Err((code, message)) => return fail(code, message),
    };
    let jobs = jobs.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    let options = SolverOptions::default();
    let mut manifest = RunManifest {
        command: "sweep".to_string(),
        config: config.display().to_string(),
        overrides: common.set.clone(),
        scenario_hash: scenario.content_hash(),
        tool_version: env!("CARGO_PKG_VERSION"),
        wall_clock_ms: 0,
        solver: SolverStats {
            mode: "internal".to_string(),
            ..SolverStats::default()
        },
    };

    if let Some(spec) = grid {
        let (co2, pv_overnight, ntc) = match parse_grid(spec) {
            Ok(v) => v,
            Err(e) => return fail(EXIT_USAGE, e),
        };
        // Degenerate axes fall back to the configured values.
        let co2 = if co2.is_empty() {
            vec![scenario.co2_price.values().next().map_or(0.0, |s| s[0])]
        } else {
            co2
        };
        let pv_annual: Vec<f64> = match pv_values(&scenario, &meta, &pv_overnight) {
            Ok(v) => v,
            Err(e) => return fail(EXIT_USAGE, e),
        };
        let ntc = if ntc.is_empty() {
            vec![scenario.links.first().map_or(0.0, |l| l.ntc)]
        } else {
            ntc
        };
        match sensitivity_grid(&scenario, &co2, &pv_annual, &ntc, step, &options, jobs) {
            Ok(cells) => {
                let succeeded = cells.iter().filter(|c| c.sweep.is_ok()).count();
                manifest.solver.status = format!("{succeeded}/{} cells", cells.len());
                manifest.solver.points = Some(cells.len());
                manifest.wall_clock_ms = started.elapsed().as_millis();
                if let Err(e) = write_grid(&cells, &common.out) {
                    return fail(EXIT_USAGE, e);
                }
                for (i, cell) in cells.iter().enumerate() {
                    if let Ok(sweep) = &cell.sweep {
                        let oc = opportunity_cost(sweep).unwrap_or_default();
                        let sub = common.out.join(format!(
                            "cell_{i:03}_co2_{}_pv_{}_ntc_{}",
                            cell.co2_price, cell.pv_capital_cost, cell.ntc
                        ));
                        if let Err(e) = write_sweep(sweep, &oc, &sub) {
                            return fail(EXIT_USAGE, e);
                        }
                    }
                }
                if let Err(e) = write_manifest(&common.out, &manifest) {
                    return fail(EXIT_USAGE, e);
                }
                println!("grid: {succeeded}/{} cells solved", cells.len());
                if succeeded == 0 {
                    return ExitCode::from(EXIT_SOLVER);
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(EXIT_SOLVER, e),
        }
    } else {
        match sweep_wind_cap(&scenario, step, &options, jobs) {
            Ok(sweep) => {
                let oc = opportunity_cost(&sweep).unwrap_or_default();
                let succeeded = sweep.points.iter().filter(|p| p.outcome.is_ok()).count();
                manifest.solver.status = format!("{succeeded}/{} points", sweep.points.len());
                manifest.solver.points = Some(sweep.points.len());
                manifest.wall_clock_ms = started.elapsed().as_millis();
                if let Err(e) = write_sweep(&sweep, &oc, &common.out) {
                    return fail(EXIT_USAGE, e);
                }
                if let Err(e) = write_manifest(&common.out, &manifest) {
                    return fail(EXIT_USAGE, e);
                }
                println!("sweep: {succeeded}/{} points solved", sweep.points.len());
                if succeeded == 0 {
                    return ExitCode::from(EXIT_SOLVER);
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(EXIT_SOLVER, e),
        }
    }
}

/// Convert overnight PV costs (currency/kW) from a grid axis into the
/// annualized currency/MW·a figures the engine applies, using the config's
/// discount rate and the PV technology's lifetime.
fn pv_values(
    scenario: &Scenario,
    meta: &ConfigMeta,
    overnight_per_kw: &[f64],
) -> Result<Vec<f64>, String> {
    let pv = scenario
        .intermittents
        .iter()
        .find(|t| t.kind == IntermittentKind::Pv);
    if overnight_per_kw.is_empty() {
        return Ok(vec![pv.map_or(0.0, |t| t.capital_cost)]);
    }
    let pv = pv.ok_or("grid has a pv axis but the scenario has no PV technology")?;
    let lifetime = meta.lifetimes.get(&pv.id).copied().unwrap_or(30.0);
    overnight_per_kw
        .iter()
        .map(|v| {
            medea_core::annuity(v * 1000.0, meta.wacc, lifetime)
                .map(|a| a * meta.prorate)
                .map_err(|e| e.to_string())
        })
        .collect()
}
