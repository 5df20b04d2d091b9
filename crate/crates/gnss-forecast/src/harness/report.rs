//! Benchmark report: the machine-readable result file, the per-method
//! record dumps, and the six averaged tables (one per metric and
//! component).

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{ExperimentConfig, HarnessError};
use crate::metrics::{AveragedMetrics, MetricsRecord};
use crate::models::MethodKind;
use crate::series::Component;

/// A fit that failed numerically; excluded from averages, never fatal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedFit {
    pub station_id: String,
    pub component: Component,
    pub method: MethodKind,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub config: ExperimentConfig,
    pub code_version: String,
    /// Seconds since the Unix epoch; `None` inside the canonical payload.
    pub unix_timestamp: Option<u64>,
}

impl Provenance {
    pub(super) fn capture(config: &ExperimentConfig) -> Self {
        let unix_timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        Provenance {
            config: config.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_owned(),
            unix_timestamp,
        }
    }
}

// ExperimentConfig embeds no Eq-unfriendly state, but it holds a PathBuf,
// so the report compares through its serialized payload instead of PartialEq.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub records: Vec<MetricsRecord>,
    pub averages: Vec<AveragedMetrics>,
    pub failures: Vec<FailedFit>,
    pub provenance: Provenance,
}

impl BenchmarkReport {
    /// Full report as pretty JSON, timestamp included.
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// Deterministic payload: reruns of the same experiment produce
    /// byte-identical output. The timestamp and the parallel/serial flag
    /// describe how the run was executed, not what was computed, so both
    /// are normalized away.
    pub fn payload_json(&self) -> serde_json::Result<String> {
        let mut canonical = self.clone();
        canonical.provenance.unix_timestamp = None;
        canonical.provenance.config.parallel = true;
        serde_json::to_string_pretty(&canonical)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    fn average_for(&self, component: Component, method: MethodKind) -> Option<&AveragedMetrics> {
        self.averages
            .iter()
            .find(|a| a.component == component && a.method == method)
    }
}

/// Which averaged index to emit or rank by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMetric {
    Mase,
    Mae,
    Rmse,
}

impl RankMetric {
    pub const ALL: [RankMetric; 3] = [RankMetric::Mase, RankMetric::Mae, RankMetric::Rmse];

    fn label(self) -> &'static str {
        match self {
            RankMetric::Mase => "mase",
            RankMetric::Mae => "mae",
            RankMetric::Rmse => "rmse",
        }
    }

    fn value(self, avg: &AveragedMetrics) -> Option<f64> {
        match self {
            RankMetric::Mase => avg.mase_bar,
            RankMetric::Mae => Some(avg.mae_bar),
            RankMetric::Rmse => Some(avg.rmse_bar),
        }
    }

    /// MASE is dimensionless and printed with 4 decimals; the meter-valued
    /// metrics get 6.
    fn format(self, value: f64) -> String {
        match self {
            RankMetric::Mase => format!("{value:.4}"),
            RankMetric::Mae | RankMetric::Rmse => format!("{value:.6}"),
        }
    }

    fn column(self) -> &'static str {
        match self {
            RankMetric::Mase => "mase_bar",
            RankMetric::Mae => "mae_bar_m",
            RankMetric::Rmse => "rmse_bar_m",
        }
    }
}

/// Writes the six averaged tables - {MASE, MAE, RMSE} x {first, second} -
/// one data row per method in listing order. Returns the paths written.
pub fn emit_figure_tables(
    report: &BenchmarkReport,
    dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(6);
    for component in Component::BOTH {
        for metric in RankMetric::ALL {
            let mut table = format!("method,{}\n", metric.column());
            for method in MethodKind::ALL {
                let Some(avg) = report.average_for(component, method) else {
                    continue;
                };
                let cell = match metric.value(avg) {
                    Some(v) => metric.format(v),
                    None => String::new(),
                };
                let _ = writeln!(table, "{},{}", method.label(), cell);
            }
            let path = dir.join(format!("{}_{}.csv", metric.label(), component.label()));
            std::fs::write(&path, table)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Writes `report.json` plus one per-record table per method present.
pub fn write_report_files(
    report: &BenchmarkReport,
    dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let json_path = dir.join("report.json");
    std::fs::write(
        &json_path,
        report.to_json().expect("report serialization cannot fail"),
    )?;
    written.push(json_path);

    for method in MethodKind::ALL {
        let rows: Vec<&MetricsRecord> =
            report.records.iter().filter(|r| r.method == method).collect();
        if rows.is_empty() {
            continue;
        }
        let mut table = String::from("station,component,rmse_m,mae_m,mase\n");
        for r in rows {
            let mase_cell = r.mase.map(|v| format!("{v:.4}")).unwrap_or_default();
            let _ = writeln!(
                table,
                "{},{},{:.6},{:.6},{}",
                r.station_id,
                r.component.label(),
                r.rmse_m,
                r.mae_m,
                mase_cell
            );
        }
        let path = dir.join(format!("records_{}.csv", method.label()));
        std::fs::write(&path, table)?;
        written.push(path);
    }
    Ok(written)
}

/// Methods sorted ascending by the chosen averaged metric; ties (and
/// methods whose average is flagged) fall back to listing order.
pub fn rank_methods(
    report: &BenchmarkReport,
    metric: RankMetric,
    component: Component,
) -> Result<Vec<MethodKind>, HarnessError> {
    let mut scored: Vec<(MethodKind, Option<f64>)> = report
        .averages
        .iter()
        .filter(|a| a.component == component)
        .map(|a| (a.method, metric.value(a)))
        .collect();
    if scored.is_empty() {
        return Err(HarnessError::Empty);
    }
    scored.sort_by(|(ma, va), (mb, vb)| match (va, vb) {
        (Some(x), Some(y)) => x
            .total_cmp(y)
            .then(ma.listing_index().cmp(&mb.listing_index())),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => ma.listing_index().cmp(&mb.listing_index()),
    });
    Ok(scored.into_iter().map(|(m, _)| m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::StationSource;
    use std::path::PathBuf;

    fn report_with(averages: Vec<AveragedMetrics>) -> BenchmarkReport {
        let config = ExperimentConfig {
            stations: StationSource::Synth(vec![]),
            m: 10,
            horizon: 2,
            methods: MethodKind::ALL.to_vec(),
            hyperparameters: Default::default(),
            master_seed: 1,
            output_dir: PathBuf::from("out"),
            parallel: false,
        };
        BenchmarkReport {
            records: vec![],
            averages,
            failures: vec![],
            provenance: Provenance::capture(&config),
        }
    }

    fn avg(method: MethodKind, component: Component, rmse: f64) -> AveragedMetrics {
        AveragedMetrics {
            component,
            method,
            mase_bar: Some(rmse * 10.0),
            mae_bar: rmse * 0.8,
            rmse_bar: rmse,
            station_count: 3,
            mase_excluded: 0,
        }
    }

    #[test]
    fn ranking_sorts_ascending_with_gp_first_when_smallest() {
        let report = report_with(vec![
            avg(MethodKind::Knn, Component::First, 2.0),
            avg(MethodKind::Gp, Component::First, 1.0),
            avg(MethodKind::Cart, Component::First, 3.0),
        ]);
        let ranked = rank_methods(&report, RankMetric::Rmse, Component::First).unwrap();
        assert_eq!(ranked, vec![MethodKind::Gp, MethodKind::Knn, MethodKind::Cart]);
    }

    #[test]
    fn ranking_tie_breaks_in_listing_order() {
        let report = report_with(vec![
            avg(MethodKind::Svr, Component::First, 1.0),
            avg(MethodKind::Mlp, Component::First, 1.0),
            avg(MethodKind::Gp, Component::First, 1.0),
        ]);
        let ranked = rank_methods(&report, RankMetric::Rmse, Component::First).unwrap();
        assert_eq!(ranked, vec![MethodKind::Mlp, MethodKind::Gp, MethodKind::Svr]);
    }

    #[test]
    fn ranking_two_methods() {
        let report = report_with(vec![
            avg(MethodKind::Gp, Component::Second, 1.0),
            avg(MethodKind::Knn, Component::Second, 2.0),
        ]);
        let ranked = rank_methods(&report, RankMetric::Rmse, Component::Second).unwrap();
        assert_eq!(ranked, vec![MethodKind::Gp, MethodKind::Knn]);
    }

    #[test]
    fn ranking_empty_component_errors() {
        let report = report_with(vec![avg(MethodKind::Gp, Component::First, 1.0)]);
        assert!(matches!(
            rank_methods(&report, RankMetric::Rmse, Component::Second),
            Err(HarnessError::Empty)
        ));
    }

    #[test]
    fn figure_tables_have_one_row_per_method_present() {
        let averages: Vec<AveragedMetrics> = Component::BOTH
            .iter()
            .flat_map(|&c| {
                MethodKind::ALL
                    .iter()
                    .map(move |&m| avg(m, c, 0.01 * (m.listing_index() + 1) as f64))
            })
            .collect();
        let report = report_with(averages);
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_figure_tables(&report, dir.path()).unwrap();
        assert_eq!(paths.len(), 6);
        for path in &paths {
            let text = std::fs::read_to_string(path).unwrap();
            let data_rows = text.lines().count() - 1;
            assert_eq!(data_rows, 7, "{}", path.display());
        }
        // Header plus ordering spot-check on one table.
        let rmse_first = std::fs::read_to_string(dir.path().join("rmse_first.csv")).unwrap();
        let mut lines = rmse_first.lines();
        assert_eq!(lines.next(), Some("method,rmse_bar_m"));
        assert_eq!(lines.next(), Some("MLP,0.010000"));
    }

    #[test]
    fn single_method_report_emits_single_row_tables() {
        let report = report_with(vec![
            avg(MethodKind::Gp, Component::First, 0.02),
            avg(MethodKind::Gp, Component::Second, 0.03),
        ]);
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_figure_tables(&report, dir.path()).unwrap();
        for path in paths {
            let text = std::fs::read_to_string(&path).unwrap();
            assert_eq!(text.lines().count(), 2, "{}", path.display());
        }
    }

    #[test]
    fn table_formats_are_fixed_decimal() {
        let report = report_with(vec![avg(MethodKind::Gp, Component::First, 0.0951234567)]);
        let dir = tempfile::tempdir().unwrap();
        emit_figure_tables(&report, dir.path()).unwrap();
        let rmse = std::fs::read_to_string(dir.path().join("rmse_first.csv")).unwrap();
        assert!(rmse.contains("GP,0.095123"), "{rmse}");
        let mase = std::fs::read_to_string(dir.path().join("mase_first.csv")).unwrap();
        assert!(mase.contains("GP,0.9512"), "{mase}");
    }

    #[test]
    fn report_json_round_trips() {
        let report = report_with(vec![avg(MethodKind::Gp, Component::First, 1.0)]);
        let text = report.to_json().unwrap();
        let back = BenchmarkReport::from_json(&text).unwrap();
        assert_eq!(back.averages, report.averages);
    }
}
