//! Approximate Bayesian neural network as an anchored ensemble of MLPs.
//!
//! Each member starts from its own initialization, is regularized toward an
//! independent draw from the weight prior, and the predictive mean is the
//! ensemble average. The anchor pull strength follows the MAP reading of
//! anchored ensembling: noise_variance / (n * prior_variance) per squared
//! weight deviation, with the prior variance of each weight being
//! (prior_stddev^2 / width), matching the initialization scale.
//!
//! The observation-noise variance is not a configuration knob; it is
//! estimated from the training values by the first-difference estimator
//! Var(dy)/2. A noise-free series therefore gets a vanishing pull and the
//! ensemble degenerates to plain MLPs, and prior_stddev -> infinity
//! recovers a single MLP exactly.

use super::mlp::{self, AnchorPull, MlpModel};
use super::BnnParams;
use crate::numerics::RngStream;

#[derive(Debug, Clone)]
pub(crate) struct BnnModel {
    members: Vec<MlpModel>,
}

/// First-difference noise estimate: Var of successive differences halves to
/// the white-noise variance for a slowly varying signal.
fn estimate_noise_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let sum_sq: f64 = values.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    sum_sq / (2.0 * (values.len() - 1) as f64)
}

pub(crate) fn fit(
    params: &BnnParams,
    train_times: &[f64],
    values_std: &[f64],
    rng: RngStream,
) -> BnnModel {
    let width = params.member.hidden_width;
    let n = train_times.len() as f64;
    let noise_var = estimate_noise_variance(values_std);
    let prior_var_per_weight = params.prior_stddev * params.prior_stddev / width as f64;
    let coefficient = noise_var / (n * prior_var_per_weight);

    let members = (0..params.ensemble_size)
        .map(|i| {
            let mut member_rng = rng.substream(i as u64);
            let mut model = MlpModel::init(width, &mut member_rng);
            // Anchor drawn after the init from the same member stream, at
            // the prior scale.
            let anchor_scale = params.prior_stddev * (1.0 / width as f64).sqrt();
            let anchor = MlpModel {
                w1: (0..width).map(|_| anchor_scale * member_rng.next_normal()).collect(),
                b1: (0..width).map(|_| anchor_scale * member_rng.next_normal()).collect(),
                w2: (0..width).map(|_| anchor_scale * member_rng.next_normal()).collect(),
                b2: anchor_scale * member_rng.next_normal(),
                activation: model.activation,
            };
            let pull = AnchorPull {
                anchor: &anchor,
                coefficient,
            };
            mlp::train(
                &mut model,
                train_times,
                values_std,
                params.member.epochs,
                params.member.learning_rate,
                Some(&pull),
            );
            model
        })
        .collect();
    BnnModel { members }
}

impl BnnModel {
    pub fn predict(&self, times: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0f64; times.len()];
        for member in &self.members {
            for (slot, value) in acc.iter_mut().zip(member.predict(times)) {
                *slot += value;
            }
        }
        let count = self.members.len() as f64;
        acc.iter_mut().for_each(|v| *v /= count);
        acc
    }
}
