//! Synthetic GNSS-like series: linear trend, annual sinusoid, white noise.
//!
//! Real permanent-station coordinate series are dominated by exactly this
//! structure at the centimeter scale, which makes the generator both the
//! test oracle for the pipeline and a stand-in roster when no real stations
//! are configured.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

use crate::ingest::{StationId, StationSeries};
use crate::numerics::RngStream;

/// Days per decimal year used to place epochs from a daily-style cadence.
pub const DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid station id: {0}")]
    BadStationId(#[from] crate::ingest::IngestError),
    #[error("cadence must be positive, got {0}")]
    BadCadence(f64),
    #[error("length must be at least 2, got {0}")]
    BadLength(usize),
    #[error("noise sigma must be non-negative, got {0}")]
    BadNoise(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub station_id: String,
    /// Decimal year of the first sample.
    pub start_epoch: f64,
    /// Sample spacing in days.
    pub cadence_days: f64,
    pub length: usize,
    /// Meters; defaults to a plausible geocentric magnitude.
    #[serde(default = "default_intercept")]
    pub intercept_m: f64,
    /// Meters per year.
    #[serde(default)]
    pub trend_m_per_yr: f64,
    #[serde(default)]
    pub annual_amplitude_m: f64,
    /// Radians.
    #[serde(default)]
    pub annual_phase_rad: f64,
    #[serde(default)]
    pub noise_sigma_m: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_intercept() -> f64 {
    4.0e6
}

impl SynthSpec {
    fn validate(&self) -> Result<StationId, SynthError> {
        let id: StationId = self.station_id.parse()?;
        let cadence_ok = self.cadence_days.is_finite() && self.cadence_days > 0.0;
        if !cadence_ok {
            return Err(SynthError::BadCadence(self.cadence_days));
        }
        if self.length < 2 {
            return Err(SynthError::BadLength(self.length));
        }
        if self.noise_sigma_m < 0.0 {
            return Err(SynthError::BadNoise(self.noise_sigma_m));
        }
        Ok(id)
    }

    /// Noise-free signal value at elapsed time `dt` years after the start.
    pub fn clean_value(&self, dt_years: f64) -> f64 {
        self.intercept_m
            + self.trend_m_per_yr * dt_years
            + self.annual_amplitude_m * (TAU * dt_years + self.annual_phase_rad).sin()
    }
}

/// Generates the two-component series for a spec.
///
/// Both components share the deterministic signal; their noise comes from
/// independent substreams keyed by the station id, so generation order
/// across stations cannot change any station's values.
pub fn generate(spec: &SynthSpec) -> Result<StationSeries, SynthError> {
    let station_id = spec.validate()?;
    let station_stream = RngStream::labeled(spec.seed, station_id.as_str());

    let dt_years: Vec<f64> = (0..spec.length)
        .map(|k| k as f64 * spec.cadence_days / DAYS_PER_YEAR)
        .collect();
    let epochs: Vec<f64> = dt_years.iter().map(|dt| spec.start_epoch + dt).collect();

    let component = |index: u64| -> Vec<f64> {
        let mut noise_stream = station_stream.substream(index);
        dt_years
            .iter()
            .map(|&dt| spec.clean_value(dt) + spec.noise_sigma_m * noise_stream.next_normal())
            .collect()
    };
    let first = component(0);
    let second = component(1);

    Ok(StationSeries::new(station_id, epochs, first, second)
        .expect("generated series satisfies the ingestion invariants"))
}
