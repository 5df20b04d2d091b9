//! Time normalization and train/holdout splitting.
//!
//! The training window maps onto [0, 1]; every forecast epoch lands
//! strictly beyond 1, making extrapolation explicit in the representation.
//!
//! ```bash
//! cargo run --example normalize_and_split
//! ```

use gnss_forecast::series::{split_series, Component};
use gnss_forecast::synth::{generate, SynthSpec};

fn main() {
    let spec = SynthSpec {
        station_id: "DEMO".into(),
        start_epoch: 2015.0,
        cadence_days: 1.0,
        length: 12,
        intercept_m: 4.0e6,
        trend_m_per_yr: 0.005,
        annual_amplitude_m: 0.0,
        annual_phase_rad: 0.0,
        noise_sigma_m: 0.0,
        seed: 1,
    };
    let series = generate(&spec).expect("valid spec");

    let (m, horizon) = (8, 4);
    let split = split_series(&series, Component::First, m, horizon).expect("long enough");

    println!("training window: {m} samples, holdout: {horizon}");
    println!("time map: t1 = {:.6}, tm = {:.6}", split.time_map.t_first(), split.time_map.t_last_train());
    println!();
    println!("  epoch [yr]    normalized");
    for (epoch, t) in series.epochs()[..m].iter().zip(&split.train_times) {
        println!("  {epoch:<12.6}  {t:.6}   (train)");
    }
    for (epoch, t) in series.epochs()[m..m + horizon].iter().zip(&split.holdout_times) {
        println!("  {epoch:<12.6}  {t:.6}   (holdout, beyond 1)");
    }
    println!();
    println!(
        "endpoints are exact: first = {:?}, last = {:?}",
        split.train_times[0],
        split.train_times[m - 1]
    );
    let recovered = split.time_map.denormalize(split.holdout_times[0]);
    println!(
        "denormalizing the first holdout time recovers its epoch: {recovered:.9} vs {:.9}",
        series.epochs()[m]
    );
}
