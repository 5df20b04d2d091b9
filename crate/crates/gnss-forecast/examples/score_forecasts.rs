//! The three forecast-accuracy indices and cross-station averaging.
//!
//! ```bash
//! cargo run --example score_forecasts
//! ```

use gnss_forecast::metrics::{average_over_stations, mae, mase, rmse, MetricsRecord};
use gnss_forecast::models::MethodKind;
use gnss_forecast::series::Component;

fn main() {
    let train = [10.0, 10.2, 10.1, 10.5, 10.4, 10.8];
    let actual = [11.0, 11.1, 11.3];
    let forecast = [10.9, 11.25, 11.2];

    let r = rmse(&forecast, &actual).unwrap();
    let m = mae(&forecast, &actual).unwrap();
    let s = mase(&forecast, &actual, &train).unwrap();
    println!("rmse {r:.4} m, mae {m:.4} m, mase {s:.4}");
    println!("(mase 1.0 would equal the in-sample one-step naive forecast)");

    // Cross-station averaging is unweighted and permutation-invariant.
    let records: Vec<MetricsRecord> = [("AAAA", 0.011), ("BBBB", 0.015), ("CCCC", 0.007)]
        .into_iter()
        .map(|(id, r)| MetricsRecord {
            station_id: id.to_owned(),
            component: Component::First,
            method: MethodKind::Gp,
            rmse_m: r,
            mae_m: r * 0.8,
            mase: Some(r * 100.0),
        })
        .collect();
    let avg = average_over_stations(&records, Component::First, MethodKind::Gp).unwrap();
    println!();
    println!(
        "{} stations -> rmse_bar {:.4} m, mae_bar {:.4} m, mase_bar {:.4}",
        avg.station_count,
        avg.rmse_bar,
        avg.mae_bar,
        avg.mase_bar.unwrap()
    );

    // A constant training window has no naive-forecast scale; the MASE is
    // flagged instead of becoming infinite.
    match mase(&forecast, &actual, &[5.0, 5.0, 5.0]) {
        Err(e) => println!("flagged: {e}"),
        Ok(v) => println!("unexpected mase {v}"),
    }
}
