//! Generate a synthetic station roster and write it in the ingest file
//! format, together with a manifest pointing at the files.
//!
//! ```bash
//! cargo run --example synthesize_stations
//! ```

use std::fmt::Write as _;

use gnss_forecast::ingest::{format_station_file, parse_cartesian_file, ColumnMapping};
use gnss_forecast::synth::{generate, SynthSpec};

fn main() {
    let out_dir = std::env::temp_dir().join("gnss-forecast-example-stations");
    std::fs::create_dir_all(&out_dir).expect("create output dir");

    let mut manifest = String::new();
    for k in 0..5u32 {
        let spec = SynthSpec {
            station_id: format!("SY{k:02}"),
            start_epoch: 2015.0,
            cadence_days: 1.0,
            length: 365,
            intercept_m: 4.2e6,
            trend_m_per_yr: 0.004 + 0.001 * k as f64,
            annual_amplitude_m: 0.003,
            annual_phase_rad: 0.5 * k as f64,
            noise_sigma_m: 0.004,
            seed: 2024,
        };
        let series = generate(&spec).expect("valid spec");
        let path = out_dir.join(format!("{}.txt", series.station_id()));
        std::fs::write(&path, format_station_file(&series)).expect("write station file");
        let _ = writeln!(manifest, "{} {}", series.station_id(), path.display());
        println!("wrote {} ({} samples)", path.display(), series.len());
    }
    let manifest_path = out_dir.join("stations.txt");
    std::fs::write(&manifest_path, &manifest).expect("write manifest");
    println!("manifest: {}", manifest_path.display());

    // The written format round-trips through the parser.
    let text = std::fs::read_to_string(out_dir.join("SY00.txt")).unwrap();
    let (series, diagnostics) = parse_cartesian_file(&text, &ColumnMapping::default()).unwrap();
    println!(
        "re-parsed SY00: {} samples, {} skipped rows",
        series.len(),
        diagnostics.skipped
    );
}
