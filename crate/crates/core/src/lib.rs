//! Capacity-expansion and hourly-dispatch optimization for coupled
//! electricity and district-heat market zones.
//!
//! The crate is organized along the pipeline a model run goes through:
//!
//! * [`domain`] — zones, fuels, technologies, time series, and scenario
//!   assembly, plus pure parameter transformations (annuities, co-generation
//!   feasible operating regions, validation).
//! * [`lp`] — translation of a validated scenario into a sparse canonical
//!   linear program.
//! * [`solver`] — a bounded-variable revised simplex solver with primal and
//!   dual values, independent solution verification, and MPS interchange.
//! * [`io`] — configuration loading, time-series preprocessing (profile
//!   scaling, reservoir-inflow estimation, shape-preserving price
//!   resampling), and result writers.
//! * [`engine`] — solve orchestration, derived economics (cost breakdown,
//!   emissions, air-pollution cost, trade balance), wind-cap sweeps and
//!   sensitivity grids.
//!
//! All internal quantities are kept in GW, GWh and kilo-currency so that LP
//! coefficients stay within a few orders of magnitude of one another.
//! Specific values quoted per MW or per MWh are numerically identical to
//! their kilo-currency-per-GW(h) counterparts, so parameter files use the
//! familiar per-MW(h) units throughout.

pub mod domain;
pub mod engine;
pub mod io;
pub mod lp;
pub mod solver;

pub use domain::{
    annuity, build_feasible_operating_region, validate_scenario, DispatchableTech,
    FeasibleOperatingRegion, Fuel, IntermittentKind, IntermittentTech, Product, Scenario,
    StorageTech, TransmissionLink, Zone,
};
pub use engine::{SweepResult, SystemOutcome};
pub use lp::{LpProblem, VariableIndex};
pub use solver::{LpSolution, SolverOptions, SolverStatus};
