//! Generalized regression neural network: the classical Nadaraya-Watson
//! estimator with a Gaussian kernel on the single normalized-time input.

use super::GrnnParams;

#[derive(Debug, Clone)]
pub(crate) struct GrnnModel {
    train_times: Vec<f64>,
    train_values: Vec<f64>,
    bandwidth: f64,
}

/// Picks the bandwidth from the grid by in-sample RMSE (first grid entry
/// wins ties).
pub(crate) fn fit(params: &GrnnParams, train_times: &[f64], values_std: &[f64]) -> GrnnModel {
    let mut best: Option<(f64, f64)> = None;
    for &bandwidth in &params.bandwidth_grid {
        let candidate = GrnnModel {
            train_times: train_times.to_vec(),
            train_values: values_std.to_vec(),
            bandwidth,
        };
        let pred = candidate.predict(train_times);
        let score = crate::metrics::rmse(&pred, values_std).expect("same lengths");
        if best.is_none_or(|(s, _)| score < s) {
            best = Some((score, bandwidth));
        }
    }
    let (_, bandwidth) = best.expect("bandwidth grid is validated non-empty");
    GrnnModel {
        train_times: train_times.to_vec(),
        train_values: values_std.to_vec(),
        bandwidth,
    }
}

impl GrnnModel {
    #[cfg(test)]
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn predict(&self, times: &[f64]) -> Vec<f64> {
        times.iter().map(|&t| self.predict_one(t)).collect()
    }

    fn predict_one(&self, t: f64) -> f64 {
        // Shift exponents by their maximum so the nearest point always has
        // weight 1; naive exp(-d^2/2s^2) underflows to 0/0 for small
        // bandwidths at extrapolated times.
        let exponents: Vec<f64> = self
            .train_times
            .iter()
            .map(|&ti| {
                let d = (ti - t) / self.bandwidth;
                -0.5 * d * d
            })
            .collect();
        let max_exp = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut num = 0.0;
        let mut den = 0.0;
        for (&e, &y) in exponents.iter().zip(&self.train_values) {
            let w = (e - max_exp).exp();
            num += w * y;
            den += w;
        }
        num / den
    }
}
