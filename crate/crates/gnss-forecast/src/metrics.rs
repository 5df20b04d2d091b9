//! Forecast-accuracy indices: RMSE, MAE, MASE, and their cross-station
//! averages.
//!
//! All three are computed in raw meters (MASE is dimensionless by
//! construction). MASE scales the forecast MAE by the in-sample mean
//! absolute one-step naive-forecast error of the training window.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::MethodKind;
use crate::series::Component;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("length mismatch: {predicted} predicted vs {actual} actual values")]
    LengthMismatch { predicted: usize, actual: usize },
    #[error("empty input")]
    Empty,
    #[error("training window needs at least 2 values for the naive baseline, got {got}")]
    TrainTooShort { got: usize },
    #[error("constant training window: the naive-forecast denominator is zero")]
    ZeroDenominator,
    #[error("no records to average")]
    NoRecords,
    #[error("record for station {station} has ({component}, {method}), expected ({expected_component}, {expected_method})")]
    MixedKeys {
        station: String,
        component: Component,
        method: MethodKind,
        expected_component: Component,
        expected_method: MethodKind,
    },
}

fn check_pair(predicted: &[f64], actual: &[f64]) -> Result<(), MetricsError> {
    if predicted.len() != actual.len() {
        return Err(MetricsError::LengthMismatch {
            predicted: predicted.len(),
            actual: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

/// Root of mean squared errors, meters.
pub fn rmse(predicted: &[f64], actual: &[f64]) -> Result<f64, MetricsError> {
    check_pair(predicted, actual)?;
    let sum_sq: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok((sum_sq / predicted.len() as f64).sqrt())
}

/// Mean of absolute errors, meters.
pub fn mae(predicted: &[f64], actual: &[f64]) -> Result<f64, MetricsError> {
    check_pair(predicted, actual)?;
    let sum_abs: f64 = predicted.iter().zip(actual).map(|(p, a)| (p - a).abs()).sum();
    Ok(sum_abs / predicted.len() as f64)
}

/// Mean absolute scaled error.
///
/// A constant training window makes the denominator zero; that case is the
/// distinguished [`MetricsError::ZeroDenominator`] so callers can flag the
/// record instead of propagating an infinity into the averages.
pub fn mase(predicted: &[f64], actual: &[f64], train_values: &[f64]) -> Result<f64, MetricsError> {
    if train_values.len() < 2 {
        return Err(MetricsError::TrainTooShort {
            got: train_values.len(),
        });
    }
    let naive_mae: f64 = train_values
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .sum::<f64>()
        / (train_values.len() - 1) as f64;
    let forecast_mae = mae(predicted, actual)?;
    if naive_mae <= 0.0 {
        return Err(MetricsError::ZeroDenominator);
    }
    Ok(forecast_mae / naive_mae)
}

/// The three indices for one (station, component, method) cell.
///
/// `mase` is `None` when the training window was constant (zero naive
/// denominator); such records are excluded from the MASE average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub station_id: String,
    pub component: Component,
    pub method: MethodKind,
    pub rmse_m: f64,
    pub mae_m: f64,
    pub mase: Option<f64>,
}

/// Unweighted arithmetic means over stations for one (component, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedMetrics {
    pub component: Component,
    pub method: MethodKind,
    /// `None` when every contributing record had a zero-denominator MASE.
    pub mase_bar: Option<f64>,
    pub mae_bar: f64,
    pub rmse_bar: f64,
    pub station_count: usize,
    /// Records whose MASE was flagged and left out of `mase_bar`.
    pub mase_excluded: usize,
}

/// Averages records for one (component, method) across stations.
///
/// Records are summed in station-id order, so any permutation of the input
/// produces bit-identical averages.
pub fn average_over_stations(
    records: &[MetricsRecord],
    component: Component,
    method: MethodKind,
) -> Result<AveragedMetrics, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::NoRecords);
    }
    for r in records {
        if r.component != component || r.method != method {
            return Err(MetricsError::MixedKeys {
                station: r.station_id.clone(),
                component: r.component,
                method: r.method,
                expected_component: component,
                expected_method: method,
            });
        }
    }
    let mut ordered: Vec<&MetricsRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.station_id.cmp(&b.station_id));

    let n = ordered.len() as f64;
    let rmse_bar = ordered.iter().map(|r| r.rmse_m).sum::<f64>() / n;
    let mae_bar = ordered.iter().map(|r| r.mae_m).sum::<f64>() / n;
    let mase_values: Vec<f64> = ordered.iter().filter_map(|r| r.mase).collect();
    let mase_excluded = ordered.len() - mase_values.len();
    let mase_bar = if mase_values.is_empty() {
        None
    } else {
        Some(mase_values.iter().sum::<f64>() / mase_values.len() as f64)
    };
    Ok(AveragedMetrics {
        component,
        method,
        mase_bar,
        mae_bar,
        rmse_bar,
        station_count: ordered.len(),
        mase_excluded,
    })
}
