//! Experiment orchestration: per-station, per-component, per-method
//! fitting, metric computation, cross-station averaging and table output.

mod report;

pub use report::{
    emit_figure_tables, rank_methods, write_report_files, BenchmarkReport, FailedFit, Provenance,
    RankMetric,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

use crate::ingest::{
    fetch_station, load_manifest, parse_cartesian_file, ColumnMapping, FetchConfig, IngestError,
    StationSeries,
};
use crate::metrics::{self, MetricsError, MetricsRecord};
use crate::models::{self, Hyperparameters, MethodKind};
use crate::numerics::RngStream;
use crate::series::{split_series, Component, SeriesError};
use crate::synth::{self, SynthError, SynthSpec};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("station(s) too short for m + horizon = {needed}: {}",
        .stations.iter().map(|(id, len)| format!("{id} ({len} samples)")).collect::<Vec<_>>().join(", "))]
    StationTooShort {
        needed: usize,
        stations: Vec<(String, usize)>,
    },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("no averages available for the requested component")]
    Empty,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Where the station roster comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationSource {
    /// Synthetic stations generated in memory.
    Synth(Vec<SynthSpec>),
    /// A manifest of real stations; files come from explicit local paths or
    /// from the fetch cache. Running an experiment never touches the
    /// network - populate the cache with the `fetch` subcommand first.
    Manifest {
        path: PathBuf,
        cache_dir: PathBuf,
        #[serde(default = "default_suffix")]
        suffix: String,
        #[serde(default)]
        mapping: ColumnMapping,
    },
}

fn default_suffix() -> String {
    ".txt".to_owned()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub stations: StationSource,
    /// Training count m.
    pub m: usize,
    /// Holdout length after the training window.
    pub horizon: usize,
    /// Methods to benchmark, default all seven.
    #[serde(default = "all_methods")]
    pub methods: Vec<MethodKind>,
    #[serde(default)]
    pub hyperparameters: Hyperparameters,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Fit (station, component, method) tasks on a thread pool. Results are
    /// bit-identical either way; per-task random streams are derived from
    /// task identity, not execution order.
    #[serde(default = "default_true")]
    pub parallel: bool,
}

fn all_methods() -> Vec<MethodKind> {
    MethodKind::ALL.to_vec()
}

fn default_seed() -> u64 {
    42
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.methods.is_empty() {
            return Err(HarnessError::Config("methods must be non-empty".into()));
        }
        let mut seen = Vec::new();
        for &m in &self.methods {
            if seen.contains(&m) {
                return Err(HarnessError::Config(format!("method {m} listed twice")));
            }
            seen.push(m);
        }
        if self.m < 2 {
            return Err(HarnessError::Config("m must be at least 2".into()));
        }
        if self.horizon < 1 {
            return Err(HarnessError::Config("horizon must be at least 1".into()));
        }
        Ok(())
    }
}

/// Loads the configured roster, in configuration order.
pub fn load_stations(config: &ExperimentConfig) -> Result<Vec<StationSeries>, HarnessError> {
    match &config.stations {
        StationSource::Synth(specs) => {
            if specs.is_empty() {
                return Err(HarnessError::Config("no synth stations configured".into()));
            }
            let mut ids = Vec::new();
            for spec in specs {
                if ids.contains(&spec.station_id) {
                    return Err(HarnessError::Config(format!(
                        "synth station {} listed twice",
                        spec.station_id
                    )));
                }
                ids.push(spec.station_id.clone());
            }
            specs.iter().map(|s| Ok(synth::generate(s)?)).collect()
        }
        StationSource::Manifest {
            path,
            cache_dir,
            suffix,
            mapping,
        } => {
            let entries = load_manifest(path)?;
            let fetch_config = FetchConfig {
                base_url: String::new(),
                suffix: suffix.clone(),
                cache_dir: cache_dir.clone(),
                offline: true,
            };
            entries
                .iter()
                .map(|entry| {
                    let content = match &entry.local_path {
                        Some(p) => std::fs::read_to_string(p)?,
                        None => fetch_station(&entry.station_id, &fetch_config)?,
                    };
                    let (series, _) = parse_cartesian_file(&content, mapping)?;
                    if series.station_id() != &entry.station_id {
                        return Err(HarnessError::Config(format!(
                            "manifest lists {} but its file contains {}",
                            entry.station_id,
                            series.station_id()
                        )));
                    }
                    Ok(series)
                })
                .collect()
        }
    }
}

struct Task<'a> {
    series: &'a StationSeries,
    component: Component,
    method: MethodKind,
}

enum TaskOutcome {
    Record(MetricsRecord),
    Failed(FailedFit),
}

/// Runs the full experiment described by `config`.
///
/// Every (station, component, method) cell is fitted on the first `m`
/// samples and scored on the next `horizon` in raw meters. Numerical
/// failures in one cell are recorded and excluded from that method's
/// averages; they never abort the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<BenchmarkReport, HarnessError> {
    config.validate()?;
    let stations = load_stations(config)?;

    let needed = config.m + config.horizon;
    let short: Vec<(String, usize)> = stations
        .iter()
        .filter(|s| s.len() < needed)
        .map(|s| (s.station_id().to_string(), s.len()))
        .collect();
    if !short.is_empty() {
        return Err(HarnessError::StationTooShort {
            needed,
            stations: short,
        });
    }

    let tasks: Vec<Task> = stations
        .iter()
        .flat_map(|series| {
            Component::BOTH.iter().flat_map(move |&component| {
                config.methods.iter().map(move |&method| Task {
                    series,
                    component,
                    method,
                })
            })
        })
        .collect();

    let run_one = |task: &Task| run_task(task, config);
    let outcomes: Vec<TaskOutcome> = if config.parallel {
        tasks.par_iter().map(run_one).collect()
    } else {
        tasks.iter().map(run_one).collect()
    };

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            TaskOutcome::Record(r) => records.push(r),
            TaskOutcome::Failed(f) => failures.push(f),
        }
    }
    records.sort_by(|a, b| {
        a.station_id
            .cmp(&b.station_id)
            .then(a.component.label().cmp(b.component.label()))
            .then(a.method.listing_index().cmp(&b.method.listing_index()))
    });
    failures.sort_by(|a, b| {
        a.station_id
            .cmp(&b.station_id)
            .then(a.component.label().cmp(b.component.label()))
            .then(a.method.listing_index().cmp(&b.method.listing_index()))
    });

    let mut averages = Vec::new();
    for component in Component::BOTH {
        for method in MethodKind::ALL {
            if !config.methods.contains(&method) {
                continue;
            }
            let cell: Vec<MetricsRecord> = records
                .iter()
                .filter(|r| r.component == component && r.method == method)
                .cloned()
                .collect();
            if cell.is_empty() {
                continue;
            }
            averages.push(metrics::average_over_stations(&cell, component, method)?);
        }
    }

    Ok(BenchmarkReport {
        records,
        averages,
        failures,
        provenance: Provenance::capture(config),
    })
}

fn run_task(task: &Task, config: &ExperimentConfig) -> TaskOutcome {
    let station_id = task.series.station_id().to_string();
    let fail = |message: String| {
        TaskOutcome::Failed(FailedFit {
            station_id: station_id.clone(),
            component: task.component,
            method: task.method,
            message,
        })
    };

    let split = match split_series(task.series, task.component, config.m, config.horizon) {
        Ok(s) => s,
        Err(e) => return fail(e.to_string()),
    };
    let rng = task_stream(
        config.master_seed,
        &station_id,
        task.component,
        task.method,
    );
    let model = match models::fit(
        task.method,
        &config.hyperparameters,
        &split.train_times,
        &split.train_values,
        rng,
    ) {
        Ok(m) => m,
        Err(e) => return fail(e.to_string()),
    };
    let predicted = model.predict(&split.holdout_times);

    let rmse_m = match metrics::rmse(&predicted, &split.holdout_values) {
        Ok(v) => v,
        Err(e) => return fail(e.to_string()),
    };
    let mae_m = metrics::mae(&predicted, &split.holdout_values).expect("lengths match");
    let mase = match metrics::mase(&predicted, &split.holdout_values, &split.train_values) {
        Ok(v) => Some(v),
        Err(MetricsError::ZeroDenominator) => None,
        Err(e) => return fail(e.to_string()),
    };
    if !rmse_m.is_finite() || !mae_m.is_finite() {
        return fail("non-finite forecast metrics".into());
    }

    TaskOutcome::Record(MetricsRecord {
        station_id,
        component: task.component,
        method: task.method,
        rmse_m,
        mae_m,
        mase,
    })
}

/// Stream for one task, derived from task identity alone so execution
/// order, parallelism, and roster permutations cannot change any result.
fn task_stream(
    master_seed: u64,
    station_id: &str,
    component: Component,
    method: MethodKind,
) -> RngStream {
    RngStream::labeled(
        master_seed,
        &format!("{station_id}/{}/{method}", component.label()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth_specs(count: usize, noise: f64) -> Vec<SynthSpec> {
        (0..count)
            .map(|k| SynthSpec {
                station_id: format!("SY{k:02}"),
                start_epoch: 2015.0,
                cadence_days: 1.0,
                length: 80,
                intercept_m: 4.0e6,
                trend_m_per_yr: 0.004 + 0.001 * k as f64,
                annual_amplitude_m: 0.003,
                annual_phase_rad: 0.3 * k as f64,
                noise_sigma_m: noise,
                seed: 11,
            })
            .collect()
    }

    fn quick_config(methods: Vec<MethodKind>) -> ExperimentConfig {
        ExperimentConfig {
            stations: StationSource::Synth(synth_specs(3, 0.002)),
            m: 60,
            horizon: 10,
            methods,
            hyperparameters: Hyperparameters::default(),
            master_seed: 7,
            output_dir: PathBuf::from("unused"),
            parallel: false,
        }
    }

    #[test]
    fn record_and_average_counts_match_the_grid() {
        let config = quick_config(vec![MethodKind::Knn, MethodKind::Cart]);
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.records.len(), 3 * 2 * 2);
        assert_eq!(report.averages.len(), 2 * 2);
        assert!(report.failures.is_empty());
    }

    #[test]
    fn constant_station_flags_mase_and_scores_zero_rmse() {
        let mut specs = synth_specs(1, 0.0);
        specs[0].trend_m_per_yr = 0.0;
        specs[0].annual_amplitude_m = 0.0;
        let config = ExperimentConfig {
            stations: StationSource::Synth(specs),
            methods: vec![MethodKind::Knn],
            ..quick_config(vec![MethodKind::Knn])
        };
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.records.len(), 2);
        for r in &report.records {
            assert_eq!(r.rmse_m, 0.0);
            assert_eq!(r.mase, None);
        }
        for avg in &report.averages {
            assert_eq!(avg.rmse_bar, 0.0);
            assert_eq!(avg.mase_bar, None);
            assert_eq!(avg.mase_excluded, 1);
        }
    }

    #[test]
    fn serial_and_parallel_runs_are_identical() {
        let serial = quick_config(vec![MethodKind::Gp, MethodKind::Knn, MethodKind::Mlp]);
        let parallel = ExperimentConfig {
            parallel: true,
            ..serial.clone()
        };
        let a = run_experiment(&serial).unwrap();
        let b = run_experiment(&parallel).unwrap();
        assert_eq!(a.payload_json().unwrap(), b.payload_json().unwrap());
    }

    #[test]
    fn station_permutation_changes_no_numeric_value() {
        let config = quick_config(vec![MethodKind::Knn, MethodKind::Grnn]);
        let StationSource::Synth(mut specs) = config.stations.clone() else {
            unreachable!()
        };
        specs.reverse();
        let permuted = ExperimentConfig {
            stations: StationSource::Synth(specs),
            methods: vec![MethodKind::Grnn, MethodKind::Knn],
            ..config.clone()
        };
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&permuted).unwrap();
        assert_eq!(a.records, b.records);
        // Averages differ only in listing order of methods, which is fixed.
        assert_eq!(a.averages, b.averages);
    }

    #[test]
    fn numerical_failures_are_flagged_not_fatal() {
        // A one-pass SMO budget with a tight tube cannot converge on noisy
        // data; the cell must be flagged while the rest of the run and the
        // other method's averages survive.
        let mut config = quick_config(vec![MethodKind::Svr, MethodKind::Knn]);
        config.hyperparameters.svr.max_passes = 1;
        config.hyperparameters.svr.epsilon = 1e-9;
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.failures.len(), 6, "SVR fails on all 3 stations x 2 components");
        assert!(report
            .failures
            .iter()
            .all(|f| f.method == MethodKind::Svr && f.message.contains("did not converge")));
        assert_eq!(report.records.len(), 6, "KNN records survive");
        assert_eq!(report.averages.len(), 2);
        assert!(report.averages.iter().all(|a| a.method == MethodKind::Knn));
    }

    #[test]
    fn averages_match_reaggregated_records() {
        let config = quick_config(vec![MethodKind::Knn, MethodKind::Grnn, MethodKind::Cart]);
        let report = run_experiment(&config).unwrap();
        for avg in &report.averages {
            let cell: Vec<crate::metrics::MetricsRecord> = report
                .records
                .iter()
                .filter(|r| r.component == avg.component && r.method == avg.method)
                .cloned()
                .collect();
            let again =
                metrics::average_over_stations(&cell, avg.component, avg.method).unwrap();
            assert!((again.rmse_bar - avg.rmse_bar).abs() < 1e-12);
            assert!((again.mae_bar - avg.mae_bar).abs() < 1e-12);
            assert_eq!(again.station_count, avg.station_count);
        }
    }

    #[test]
    fn too_short_station_is_reported_by_name() {
        let mut config = quick_config(vec![MethodKind::Knn]);
        config.m = 200;
        match run_experiment(&config) {
            Err(HarnessError::StationTooShort { needed, stations }) => {
                assert_eq!(needed, 210);
                assert_eq!(stations.len(), 3);
                assert_eq!(stations[0].0, "SY00");
            }
            other => panic!("expected StationTooShort, got {other:?}"),
        }
    }

    #[test]
    fn rerun_is_byte_identical_modulo_timestamp() {
        let config = quick_config(vec![MethodKind::Svr, MethodKind::Bnn]);
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.payload_json().unwrap(), b.payload_json().unwrap());
    }
}
