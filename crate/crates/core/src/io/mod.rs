//! Disk interfaces: scenario configuration, time-series ingestion with the
//! numerical preprocessing the input data needs (profile rescaling,
//! reservoir-inflow estimation, monthly-to-hourly price resampling), and
//! deterministic result writers.

pub mod config;
pub mod output;
pub mod pchip;
pub mod preprocess;
pub mod series;

pub use config::{load_scenario, ConfigError, ConfigMeta, Overrides};
pub use output::{write_grid, write_outcome, write_sweep, OutputError};
pub use pchip::{resample_monthly_prices, Pchip};
pub use preprocess::{estimate_inflows, scale_profile, PreprocessError};
pub use series::{read_series, TimeSeriesFile};
