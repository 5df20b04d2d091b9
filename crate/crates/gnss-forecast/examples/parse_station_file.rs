//! Parse a whitespace-delimited station position file.
//!
//! ```bash
//! cargo run --example parse_station_file
//! ```

use gnss_forecast::ingest::{parse_cartesian_file, ColumnMapping};

fn main() {
    // Column layout: station, sample index, decimal year, X, Y, Z.
    // Header lines, comments, a NaN row and a duplicated epoch are all
    // handled without aborting the parse.
    let content = "\
# daily Cartesian positions, IGS-style frame
site idx year x y z
WTZR 0 2015.000000 4075580.10000 931853.70000 4801568.10000
WTZR 1 2015.002738 4075580.10120 931853.70080 4801568.10110
WTZR 2 2015.005476 4075580.10240 NaN 4801568.10230
WTZR 3 2015.008214 4075580.10310 931853.70240 4801568.10320
WTZR 3b 2015.008214 4075580.10360 931853.70260 4801568.10340
WTZR 4 2015.010952 4075580.10480 931853.70320 4801568.10450
";

    let mapping = ColumnMapping::default();
    let (series, diagnostics) = parse_cartesian_file(content, &mapping).expect("parseable file");

    println!("station:        {}", series.station_id());
    println!("samples:        {}", series.len());
    println!("epoch range:    {:.6} .. {:.6}", series.epochs()[0], series.epochs()[series.len() - 1]);
    println!("rows skipped:   {} (headers {}, non-finite {})",
        diagnostics.skipped, diagnostics.header_rows, diagnostics.non_finite_rows);
    println!("epoch repeats:  {} (last occurrence kept)", diagnostics.duplicate_epochs);
    println!();
    println!("  epoch          X [m]            Y [m]");
    for k in 0..series.len() {
        println!(
            "  {:<12.6}  {:<15.5}  {:<15.5}",
            series.epochs()[k],
            series.first_component()[k],
            series.second_component()[k]
        );
    }
}
