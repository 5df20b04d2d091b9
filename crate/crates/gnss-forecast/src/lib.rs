//! Extrapolation benchmark for horizontal GNSS station position time
//! series.
//!
//! Permanent GNSS stations publish daily Cartesian position estimates. This
//! crate ingests such series (or synthesizes realistic ones), normalizes
//! the time axis of a training window onto [0, 1], fits seven classical
//! regressors - MLP, BNN, GP, KNN, GRNN, CART and SVR - on each horizontal
//! component, predicts past the training window, and scores the forecasts
//! with RMSE, MAE and MASE per station plus unweighted cross-station
//! averages.
//!
//! The `examples/` directory is the guided tour: one runnable example per
//! capability, from parsing a station file to running the full benchmark.
//! A thin `gnss-forecast` binary wraps the same library entry points with
//! `fetch`, `synth`, `run` and `report` subcommands.
//!
//! ```
//! use gnss_forecast::{models, series, synth};
//! use gnss_forecast::numerics::RngStream;
//!
//! let spec = synth::SynthSpec {
//!     station_id: "DEMO".into(),
//!     start_epoch: 2015.0,
//!     cadence_days: 1.0,
//!     length: 300,
//!     intercept_m: 4.0e6,
//!     trend_m_per_yr: 0.005,
//!     annual_amplitude_m: 0.003,
//!     annual_phase_rad: 0.0,
//!     noise_sigma_m: 0.002,
//!     seed: 7,
//! };
//! let station = synth::generate(&spec).unwrap();
//! let split = series::split_series(&station, series::Component::First, 250, 50).unwrap();
//! let model = models::fit(
//!     models::MethodKind::Gp,
//!     &models::Hyperparameters::default(),
//!     &split.train_times,
//!     &split.train_values,
//!     RngStream::new(7, 0),
//! )
//! .unwrap();
//! let forecast = model.predict(&split.holdout_times);
//! assert_eq!(forecast.len(), 50);
//! ```

pub mod cli;
pub mod harness;
pub mod ingest;
pub mod metrics;
pub mod models;
pub mod numerics;
pub mod series;
pub mod synth;

pub use harness::{run_experiment, BenchmarkReport, ExperimentConfig};
pub use ingest::{StationId, StationSeries};
pub use metrics::{AveragedMetrics, MetricsRecord};
pub use models::{ForecastModel, Hyperparameters, MethodKind};
pub use series::{Component, NormalizedSplit, TimeMap};
pub use synth::SynthSpec;
