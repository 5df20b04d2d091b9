//! The full benchmark at desk scale: a synthetic roster, all seven
//! methods on both horizontal components, per-station metrics, averages,
//! the six summary tables, and the method ranking.
//!
//! ```bash
//! cargo run --example run_benchmark
//! ```

use gnss_forecast::harness::{
    emit_figure_tables, rank_methods, run_experiment, write_report_files, ExperimentConfig,
    RankMetric, StationSource,
};
use gnss_forecast::models::{Hyperparameters, MethodKind};
use gnss_forecast::series::Component;
use gnss_forecast::synth::SynthSpec;

fn main() {
    let specs: Vec<SynthSpec> = (0..6)
        .map(|k| SynthSpec {
            station_id: format!("EU{k:02}"),
            start_epoch: 2016.0,
            cadence_days: 1.0,
            length: 300,
            intercept_m: 4.2e6,
            trend_m_per_yr: 0.003 + 0.001 * k as f64,
            annual_amplitude_m: 0.002 + 0.0004 * k as f64,
            annual_phase_rad: 0.9 * k as f64,
            noise_sigma_m: 0.004,
            seed: 8,
        })
        .collect();

    let config = ExperimentConfig {
        stations: StationSource::Synth(specs),
        m: 250,
        horizon: 50,
        methods: MethodKind::ALL.to_vec(),
        hyperparameters: Hyperparameters::default(),
        master_seed: 42,
        output_dir: std::env::temp_dir().join("gnss-forecast-example-benchmark"),
        parallel: true,
    };

    let report = run_experiment(&config).expect("benchmark run");
    println!(
        "{} per-station records, {} averaged rows, {} failures",
        report.records.len(),
        report.averages.len(),
        report.failures.len()
    );

    write_report_files(&report, &config.output_dir).expect("write report");
    let tables = emit_figure_tables(&report, &config.output_dir).expect("emit tables");
    println!("report + {} tables in {}", tables.len(), config.output_dir.display());

    println!();
    println!("  averaged RMSE [mm] per method");
    println!("  method   first    second");
    for method in MethodKind::ALL {
        let value = |component| {
            report
                .averages
                .iter()
                .find(|a| a.method == method && a.component == component)
                .map(|a| a.rmse_bar * 1000.0)
                .unwrap_or(f64::NAN)
        };
        println!(
            "  {:<6}  {:>7.3}  {:>7.3}",
            method.label(),
            value(Component::First),
            value(Component::Second)
        );
    }

    println!();
    for component in Component::BOTH {
        let ranked = rank_methods(&report, RankMetric::Rmse, component).expect("ranking");
        let labels: Vec<&str> = ranked.iter().map(|m| m.label()).collect();
        println!("rmse ranking, {component} component: {}", labels.join(" < "));
    }
}
