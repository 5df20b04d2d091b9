//! Time-series core: time normalization, train/holdout splitting, and
//! value standardization.
//!
//! Epochs are mapped onto a dimensionless axis where the first training
//! epoch sits at 0 and the last at 1; forecast epochs land strictly beyond
//! 1, which makes the extrapolation explicit in the representation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::StationSeries;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("degenerate time range: first and last training epochs coincide ({t:?})")]
    DegenerateRange { t: f64 },
    #[error(
        "insufficient data: need m + horizon = {needed} samples, series has {available}"
    )]
    InsufficientData { needed: usize, available: usize },
    #[error("training count m must be at least 2, got {m}")]
    TrainTooShort { m: usize },
    #[error("horizon must be at least 1")]
    EmptyHorizon,
}

/// Which coordinate of a station series to model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    First,
    Second,
}

impl Component {
    pub const BOTH: [Component; 2] = [Component::First, Component::Second];

    pub fn label(self) -> &'static str {
        match self {
            Component::First => "first",
            Component::Second => "second",
        }
    }
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "first" | "x" | "1" => Ok(Component::First),
            "second" | "y" | "2" => Ok(Component::Second),
            other => Err(format!("unknown component {other:?} (expected first|second)")),
        }
    }
}

/// Affine map from decimal years onto the normalized time axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMap {
    t_first: f64,
    t_last_train: f64,
}

impl TimeMap {
    pub fn new(t_first: f64, t_last_train: f64) -> Result<Self, SeriesError> {
        let ordered = t_last_train > t_first;
        if !ordered {
            return Err(SeriesError::DegenerateRange { t: t_first });
        }
        Ok(TimeMap { t_first, t_last_train })
    }

    pub fn t_first(&self) -> f64 {
        self.t_first
    }

    pub fn t_last_train(&self) -> f64 {
        self.t_last_train
    }

    /// (t - t1) / (tm - t1). Exactly 0 at t1 and exactly 1 at tm.
    pub fn normalize(&self, t: f64) -> f64 {
        (t - self.t_first) / (self.t_last_train - self.t_first)
    }

    pub fn denormalize(&self, u: f64) -> f64 {
        self.t_first + u * (self.t_last_train - self.t_first)
    }
}

/// Applies `map` to every epoch. Strictly increasing input stays strictly
/// increasing.
pub fn normalize_times(times: &[f64], map: &TimeMap) -> Vec<f64> {
    times.iter().map(|&t| map.normalize(t)).collect()
}

/// A training window and its forecast holdout on the normalized axis.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSplit {
    pub train_times: Vec<f64>,
    pub train_values: Vec<f64>,
    pub holdout_times: Vec<f64>,
    pub holdout_values: Vec<f64>,
    pub time_map: TimeMap,
}

impl NormalizedSplit {
    /// The training count m.
    pub fn train_count(&self) -> usize {
        self.train_times.len()
    }
}

/// Takes the first `m` samples as the training window and the following
/// `horizon` samples as the holdout, both on the normalized time axis of
/// the training window.
pub fn split_series(
    series: &StationSeries,
    component: Component,
    m: usize,
    horizon: usize,
) -> Result<NormalizedSplit, SeriesError> {
    if m < 2 {
        return Err(SeriesError::TrainTooShort { m });
    }
    if horizon == 0 {
        return Err(SeriesError::EmptyHorizon);
    }
    let needed = m + horizon;
    if needed > series.len() {
        return Err(SeriesError::InsufficientData {
            needed,
            available: series.len(),
        });
    }
    let epochs = series.epochs();
    let values = series.component(component);
    let time_map = TimeMap::new(epochs[0], epochs[m - 1])?;
    Ok(NormalizedSplit {
        train_times: normalize_times(&epochs[..m], &time_map),
        train_values: values[..m].to_vec(),
        holdout_times: normalize_times(&epochs[m..needed], &time_map),
        holdout_values: values[m..needed].to_vec(),
        time_map,
    })
}

/// Affine rescaling of values to zero mean and unit spread.
///
/// Raw geocentric coordinates sit near 4e6 m with sub-meter signals;
/// models always fit on this standardized scale and invert on prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub center: f64,
    pub scale: f64,
}

impl Standardization {
    /// Center = mean, scale = population standard deviation, with a scale
    /// of 1 when the values are (numerically) constant.
    pub fn fit(values: &[f64]) -> Self {
        if values.is_empty() {
            return Standardization { center: 0.0, scale: 1.0 };
        }
        let n = values.len() as f64;
        let center = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - center) * (v - center)).sum::<f64>() / n;
        let std = var.sqrt();
        let scale = if std < 1e-12 { 1.0 } else { std };
        Standardization { center, scale }
    }

    pub fn apply(&self, value: f64) -> f64 {
        (value - self.center) / self.scale
    }

    pub fn invert(&self, value: f64) -> f64 {
        value * self.scale + self.center
    }

    pub fn apply_slice(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.apply(v)).collect()
    }

    pub fn invert_slice(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&v| self.invert(v)).collect()
    }
}

/// Returns `(standardized values, center, scale)`.
pub fn standardize_values(values: &[f64]) -> (Vec<f64>, f64, f64) {
    let st = Standardization::fit(values);
    (st.apply_slice(values), st.center, st.scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{StationId, StationSeries};
    use proptest::prelude::*;

    fn series_of(epochs: Vec<f64>, first: Vec<f64>, second: Vec<f64>) -> StationSeries {
        StationSeries::new("TEST".parse::<StationId>().unwrap(), epochs, first, second)
            .unwrap()
    }

    #[test]
    fn normalize_affine_endpoints() {
        let map = TimeMap::new(10.0, 30.0).unwrap();
        assert_eq!(normalize_times(&[10.0, 20.0, 30.0], &map), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn normalize_is_zero_at_first_epoch() {
        let map = TimeMap::new(10.0, 30.0).unwrap();
        assert_eq!(map.normalize(10.0), 0.0);
    }

    #[test]
    fn normalize_extends_beyond_training_range() {
        let map = TimeMap::new(10.0, 30.0).unwrap();
        assert_eq!(map.normalize(40.0), 1.5);
    }

    #[test]
    fn degenerate_range_is_rejected() {
        assert!(matches!(
            TimeMap::new(5.0, 5.0),
            Err(SeriesError::DegenerateRange { .. })
        ));
    }

    #[test]
    fn split_has_exact_endpoints_and_holdout_beyond_one() {
        let epochs: Vec<f64> = (0..10).map(|k| 2015.0 + k as f64 * 0.01).collect();
        let vals: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let s = series_of(epochs, vals.clone(), vals);
        let split = split_series(&s, Component::First, 8, 2).unwrap();
        assert_eq!(split.train_count(), 8);
        assert_eq!(split.train_times[0], 0.0);
        assert_eq!(split.train_times[7], 1.0);
        assert_eq!(split.holdout_times.len(), 2);
        assert!(split.holdout_times.iter().all(|&t| t > 1.0));
    }

    #[test]
    fn minimal_split_m2_h1() {
        let s = series_of(
            vec![2015.0, 2015.1, 2015.2],
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
        );
        let split = split_series(&s, Component::First, 2, 1).unwrap();
        assert_eq!(split.train_times, vec![0.0, 1.0]);
        assert_eq!(split.holdout_times.len(), 1);
    }

    #[test]
    fn split_second_component_selects_y() {
        let s = series_of(
            vec![2015.0, 2015.1, 2015.2],
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
        );
        let split = split_series(&s, Component::Second, 2, 1).unwrap();
        assert_eq!(split.train_values, vec![4.0, 5.0]);
        assert_eq!(split.holdout_values, vec![6.0]);
    }

    #[test]
    fn oversized_request_is_insufficient_data() {
        let s = series_of(
            vec![2015.0, 2015.1, 2015.2],
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
        );
        assert!(matches!(
            split_series(&s, Component::First, 3, 1),
            Err(SeriesError::InsufficientData { needed: 4, available: 3 })
        ));
    }

    #[test]
    fn standardize_constant_series_falls_back_to_unit_scale() {
        let (std_vals, center, scale) = standardize_values(&[5.0, 5.0, 5.0]);
        assert_eq!(std_vals, vec![0.0, 0.0, 0.0]);
        assert_eq!(center, 5.0);
        assert_eq!(scale, 1.0);
    }

    #[test]
    fn standardize_two_point_symmetry() {
        let (std_vals, center, scale) = standardize_values(&[0.0, 2.0]);
        assert_eq!(std_vals, vec![-1.0, 1.0]);
        assert_eq!(center, 1.0);
        assert_eq!(scale, 1.0);
    }

    proptest! {
        #[test]
        fn standardize_round_trips(values in proptest::collection::vec(-1e7f64..1e7, 2..64)) {
            let st = Standardization::fit(&values);
            let back = st.invert_slice(&st.apply_slice(&values));
            for (orig, rec) in values.iter().zip(&back) {
                prop_assert!((orig - rec).abs() <= 1e-9 * st.scale.max(1.0));
            }
        }

        #[test]
        fn normalization_preserves_affine_ratios(
            u in -1e3f64..1e3,
            dv in 1e-6f64..1e3,
            dw in 1e-6f64..1e3,
            span in 1e-3f64..1e3,
        ) {
            let (v, w) = (u + dv, u + dv + dw);
            let map = TimeMap::new(u, u + span).unwrap();
            let (nu, nv, nw) = (map.normalize(u), map.normalize(v), map.normalize(w));
            let got = (nv - nu) / (nw - nu);
            let want = (v - u) / (w - u);
            prop_assert!((got - want).abs() < 1e-12);
        }

        #[test]
        fn split_round_trips_holdout_epochs(m in 2usize..20, horizon in 1usize..10) {
            let n = m + horizon;
            let epochs: Vec<f64> = (0..n).map(|k| 2000.0 + k as f64 * 0.0027).collect();
            let vals: Vec<f64> = (0..n).map(|k| k as f64 * 0.5).collect();
            let s = series_of(epochs.clone(), vals.clone(), vals);
            let split = split_series(&s, Component::First, m, horizon).unwrap();
            for (k, &u) in split.holdout_times.iter().enumerate() {
                let back = split.time_map.denormalize(u);
                prop_assert!((back - epochs[m + k]).abs() < 1e-9);
            }
        }
    }
}
