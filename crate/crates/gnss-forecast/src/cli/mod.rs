//! Command implementations behind the thin `gnss-forecast` binary.
//!
//! Exit-code discipline: 0 on success, 1 on runtime failure, 2 on usage
//! errors (bad flags, empty rosters).

mod config;

pub use config::{
    build_experiment_config, parse_methods, FileConfig, RunOverrides, CACHE_DIR_ENV,
};

use std::path::{Path, PathBuf};

use crate::harness::{
    emit_figure_tables, rank_methods, run_experiment, write_report_files, BenchmarkReport,
    RankMetric,
};
use crate::ingest::{fetch_station, format_station_file, load_manifest, FetchConfig};
use crate::models::MethodKind;
use crate::series::Component;
use crate::synth;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub struct CliError {
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            exit_code: EXIT_USAGE,
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            exit_code: EXIT_RUNTIME,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.exit_code
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn finish(result: Result<(), CliError>) -> i32 {
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Caches every manifest station; prints one line per station and fails if
/// any station could not be made available.
pub fn cmd_fetch(
    manifest: &Path,
    base_url: &str,
    suffix: &str,
    cache_dir: &Path,
    offline: bool,
) -> i32 {
    finish(fetch_inner(manifest, base_url, suffix, cache_dir, offline))
}

fn fetch_inner(
    manifest: &Path,
    base_url: &str,
    suffix: &str,
    cache_dir: &Path,
    offline: bool,
) -> Result<(), CliError> {
    let entries = load_manifest(manifest).map_err(|e| CliError::usage(e.to_string()))?;
    let fetch_config = FetchConfig {
        base_url: base_url.to_owned(),
        suffix: suffix.to_owned(),
        cache_dir: cache_dir.to_owned(),
        offline,
    };
    let mut failed = 0usize;
    for entry in &entries {
        if let Some(path) = &entry.local_path {
            if path.exists() {
                println!("{}: local file {}", entry.station_id, path.display());
            } else {
                eprintln!(
                    "{}: missing local file {}",
                    entry.station_id,
                    path.display()
                );
                failed += 1;
            }
            continue;
        }
        match fetch_station(&entry.station_id, &fetch_config) {
            Ok(content) => println!("{}: cached ({} bytes)", entry.station_id, content.len()),
            Err(e) => {
                eprintln!("{}: {e}", entry.station_id);
                failed += 1;
            }
        }
    }
    if failed > 0 {
        return Err(CliError::runtime(format!(
            "{failed} of {} station(s) unavailable",
            entries.len()
        )));
    }
    Ok(())
}

/// Generates one station file per synth spec of the config into `out_dir`.
pub fn cmd_synth(config_path: &Path, out_dir: &Path) -> i32 {
    finish(synth_inner(config_path, out_dir))
}

fn synth_inner(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let file = FileConfig::load(config_path)?;
    let specs = &file.stations.synth;
    if specs.is_empty() {
        return Err(CliError::usage(format!(
            "config {} declares no [[stations.synth]] entries",
            config_path.display()
        )));
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    for spec in specs {
        let series = synth::generate(spec).map_err(|e| CliError::runtime(e.to_string()))?;
        let path = out_dir.join(format!("{}.txt", series.station_id()));
        std::fs::write(&path, format_station_file(&series))
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        println!("{}: {} samples -> {}", series.station_id(), series.len(), path.display());
    }
    Ok(())
}

/// Runs the experiment, writes the report and the six averaged tables, and
/// prints the RMSE ranking for both components.
pub fn cmd_run(config_path: &Path, overrides: &RunOverrides) -> i32 {
    finish(run_inner(config_path, overrides))
}

fn run_inner(config_path: &Path, overrides: &RunOverrides) -> Result<(), CliError> {
    let file = FileConfig::load(config_path)?;
    let config = build_experiment_config(&file, overrides)?;
    let report = run_experiment(&config).map_err(|e| CliError::runtime(e.to_string()))?;

    let out_dir = config.output_dir.clone();
    write_report_files(&report, &out_dir).map_err(|e| CliError::runtime(e.to_string()))?;
    emit_figure_tables(&report, &out_dir).map_err(|e| CliError::runtime(e.to_string()))?;

    println!(
        "{} records, {} averaged rows, {} failure(s); output in {}",
        report.records.len(),
        report.averages.len(),
        report.failures.len(),
        out_dir.display()
    );
    print_ranking(&report)?;
    Ok(())
}

/// Re-prints the ranking of an existing report and optionally re-emits its
/// tables into a new directory.
pub fn cmd_report(report_path: &Path, out_dir: Option<&PathBuf>) -> i32 {
    finish(report_inner(report_path, out_dir))
}

fn report_inner(report_path: &Path, out_dir: Option<&PathBuf>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(report_path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", report_path.display())))?;
    let report = BenchmarkReport::from_json(&text)
        .map_err(|e| CliError::runtime(format!("{}: {e}", report_path.display())))?;
    if let Some(dir) = out_dir {
        let paths = emit_figure_tables(&report, dir).map_err(|e| CliError::runtime(e.to_string()))?;
        println!("re-emitted {} tables into {}", paths.len(), dir.display());
    }
    print_ranking(&report)?;
    Ok(())
}

fn print_ranking(report: &BenchmarkReport) -> Result<(), CliError> {
    for component in Component::BOTH {
        let ranked = rank_methods(report, RankMetric::Rmse, component)
            .map_err(|e| CliError::runtime(e.to_string()))?;
        let line = ranked
            .iter()
            .map(|m: &MethodKind| m.label())
            .collect::<Vec<_>>()
            .join(" < ");
        println!("rmse ranking, {component} component: {line}");
    }
    Ok(())
}
