//! Fit all seven regressors on one station component and compare their
//! holdout forecasts.
//!
//! ```bash
//! cargo run --example compare_methods
//! ```

use gnss_forecast::metrics::{mae, mase, rmse};
use gnss_forecast::models::{fit, Hyperparameters, MethodKind};
use gnss_forecast::numerics::RngStream;
use gnss_forecast::series::{split_series, Component};
use gnss_forecast::synth::{generate, SynthSpec};

fn main() {
    let spec = SynthSpec {
        station_id: "DEMO".into(),
        start_epoch: 2014.0,
        cadence_days: 1.0,
        length: 700,
        intercept_m: 4.2e6,
        trend_m_per_yr: 0.006,
        annual_amplitude_m: 0.003,
        annual_phase_rad: 1.3,
        noise_sigma_m: 0.003,
        seed: 5,
    };
    let series = generate(&spec).expect("valid spec");
    let split = split_series(&series, Component::First, 600, 100).expect("long enough");
    let hp = Hyperparameters::default();

    println!("{} training samples, {}-day holdout", split.train_count(), split.holdout_times.len());
    println!();
    println!("  method  train rmse [mm]  holdout rmse [mm]  holdout mae [mm]  mase");
    for (index, kind) in MethodKind::ALL.into_iter().enumerate() {
        let model = fit(
            kind,
            &hp,
            &split.train_times,
            &split.train_values,
            RngStream::new(5, index as u64),
        )
        .expect("fit");
        let forecast = model.predict(&split.holdout_times);
        let r = rmse(&forecast, &split.holdout_values).unwrap();
        let m = mae(&forecast, &split.holdout_values).unwrap();
        let s = mase(&forecast, &split.holdout_values, &split.train_values).unwrap();
        println!(
            "  {:<6}  {:>15.3}  {:>17.3}  {:>16.3}  {:>5.3}",
            kind.label(),
            model.training_rmse() * 1000.0,
            r * 1000.0,
            m * 1000.0,
            s
        );
    }
    println!();
    println!("note: KNN, GRNN and CART are locally constant beyond the training window,");
    println!("so their forecasts anchor at the window end by construction.");
}
