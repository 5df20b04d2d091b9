//! K-nearest-neighbor regression in normalized time.
//!
//! Distance ties break toward the earlier index. Beyond the training range
//! the nearest neighbors stop changing, so the prediction is locally
//! constant - documented behavior for an extrapolating benchmark, not a
//! defect.

use super::{KnnParams, KnnWeighting};

#[derive(Debug, Clone)]
pub(crate) struct KnnModel {
    train_times: Vec<f64>,
    train_values: Vec<f64>,
    k: usize,
    weighting: KnnWeighting,
}

/// `k` is clamped to the training size so `k = n` (and beyond) means
/// "average everything".
pub(crate) fn fit(params: &KnnParams, train_times: &[f64], values_std: &[f64]) -> KnnModel {
    KnnModel {
        train_times: train_times.to_vec(),
        train_values: values_std.to_vec(),
        k: params.k.min(train_times.len()),
        weighting: params.weighting,
    }
}

impl KnnModel {
    pub fn predict(&self, times: &[f64]) -> Vec<f64> {
        times.iter().map(|&t| self.predict_one(t)).collect()
    }

    fn predict_one(&self, t: f64) -> f64 {
        let mut order: Vec<usize> = (0..self.train_times.len()).collect();
        order.sort_by(|&i, &j| {
            (self.train_times[i] - t)
                .abs()
                .total_cmp(&(self.train_times[j] - t).abs())
                .then(i.cmp(&j))
        });
        let neighbors = &order[..self.k];
        match self.weighting {
            KnnWeighting::Uniform => {
                neighbors.iter().map(|&i| self.train_values[i]).sum::<f64>() / self.k as f64
            }
            KnnWeighting::InverseDistance => {
                // An exact hit dominates every finite weight; the earliest
                // such index wins by the sort order above.
                let nearest = neighbors[0];
                if self.train_times[nearest] == t {
                    return self.train_values[nearest];
                }
                let mut num = 0.0;
                let mut den = 0.0;
                for &i in neighbors {
                    let w = 1.0 / (self.train_times[i] - t).abs();
                    num += w * self.train_values[i];
                    den += w;
                }
                num / den
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(k: usize, weighting: KnnWeighting) -> KnnModel {
        fit(
            &KnnParams { k, weighting },
            &[0.0, 0.25, 0.5, 0.75, 1.0],
            &[1.0, 2.0, 4.0, 8.0, 16.0],
        )
    }

    #[test]
    fn k_equals_n_uniform_predicts_training_mean_anywhere() {
        let m = model(5, KnnWeighting::Uniform);
        let mean = (1.0 + 2.0 + 4.0 + 8.0 + 16.0) / 5.0;
        for t in [-3.0, 0.1, 1.0, 1.5, 40.0] {
            assert_eq!(m.predict(&[t])[0], mean);
        }
    }

    #[test]
    fn inverse_distance_is_exact_at_training_points() {
        let m = model(3, KnnWeighting::InverseDistance);
        assert_eq!(m.predict(&[0.5])[0], 4.0);
        assert_eq!(m.predict(&[0.0])[0], 1.0);
    }

    #[test]
    fn k1_is_nearest_neighbor() {
        let m = model(1, KnnWeighting::Uniform);
        assert_eq!(m.predict(&[0.3])[0], 2.0); // 0.25 is nearest
        assert_eq!(m.predict(&[9.0])[0], 16.0); // beyond range: last point
    }

    #[test]
    fn distance_tie_breaks_to_earlier_index() {
        // 0.375 is equidistant from 0.25 and 0.5.
        let m = model(1, KnnWeighting::Uniform);
        assert_eq!(m.predict(&[0.375])[0], 2.0);
    }

    #[test]
    fn oversized_k_is_clamped() {
        let m = model(99, KnnWeighting::Uniform);
        let mean = (1.0 + 2.0 + 4.0 + 8.0 + 16.0) / 5.0;
        assert_eq!(m.predict(&[0.6])[0], mean);
    }

    #[test]
    fn extrapolation_is_locally_constant() {
        let m = model(2, KnnWeighting::InverseDistance);
        // Far beyond t = 1 both neighbor sets and weight ratios stabilize.
        let far = m.predict(&[5.0, 50.0, 500.0]);
        let last_two_mean_ish = far[2];
        assert!((last_two_mean_ish - 12.0).abs() < 0.1, "got {last_two_mean_ish}");
    }
}
