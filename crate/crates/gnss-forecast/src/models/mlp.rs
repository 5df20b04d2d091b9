//! Single-hidden-layer perceptron: tanh hidden units, linear output,
//! full-batch gradient descent with a fixed step and epoch count.

use super::MlpParams;
use crate::numerics::RngStream;
use crate::series::Standardization;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Activation {
    Tanh,
    /// Test-only path: a single identity unit has a closed-form
    /// least-squares gradient to check backprop against.
    #[cfg_attr(not(test), allow(dead_code))]
    Identity,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation value h = act(x).
    fn derivative_from_output(self, h: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - h * h,
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct MlpModel {
    pub(crate) w1: Vec<f64>,
    pub(crate) b1: Vec<f64>,
    pub(crate) w2: Vec<f64>,
    pub(crate) b2: f64,
    pub(crate) activation: Activation,
}

impl MlpModel {
    /// Weights drawn from N(0, 1/width), biases zero. Draw order is part of
    /// the determinism contract: first all of w1, then all of w2.
    pub(crate) fn init(width: usize, rng: &mut RngStream) -> Self {
        let stddev = (1.0 / width as f64).sqrt();
        let w1: Vec<f64> = (0..width).map(|_| stddev * rng.next_normal()).collect();
        let w2: Vec<f64> = (0..width).map(|_| stddev * rng.next_normal()).collect();
        MlpModel {
            w1,
            b1: vec![0.0; width],
            w2,
            b2: 0.0,
            activation: Activation::Tanh,
        }
    }

    fn width(&self) -> usize {
        self.w1.len()
    }

    fn forward_one(&self, t: f64) -> f64 {
        let mut out = self.b2;
        for j in 0..self.width() {
            out += self.w2[j] * self.activation.apply(self.w1[j] * t + self.b1[j]);
        }
        out
    }

    pub(crate) fn predict(&self, times: &[f64]) -> Vec<f64> {
        times.iter().map(|&t| self.forward_one(t)).collect()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Gradients {
    pub(crate) w1: Vec<f64>,
    pub(crate) b1: Vec<f64>,
    pub(crate) w2: Vec<f64>,
    pub(crate) b2: f64,
}

/// Mean squared error of the network on (times, targets).
pub(crate) fn mse_loss(model: &MlpModel, times: &[f64], targets: &[f64]) -> f64 {
    let n = times.len() as f64;
    times
        .iter()
        .zip(targets)
        .map(|(&t, &y)| {
            let e = model.forward_one(t) - y;
            e * e
        })
        .sum::<f64>()
        / n
}

/// Gradient of [`mse_loss`] with respect to every parameter.
#[allow(clippy::needless_range_loop)] // four parallel arrays; indices read best
pub(crate) fn backprop(model: &MlpModel, times: &[f64], targets: &[f64]) -> Gradients {
    let width = model.width();
    let n = times.len() as f64;
    let mut g = Gradients {
        w1: vec![0.0; width],
        b1: vec![0.0; width],
        w2: vec![0.0; width],
        b2: 0.0,
    };
    let scale = 2.0 / n;
    for (&t, &y) in times.iter().zip(targets) {
        let mut hidden = vec![0.0; width];
        let mut out = model.b2;
        for j in 0..width {
            let h = model.activation.apply(model.w1[j] * t + model.b1[j]);
            hidden[j] = h;
            out += model.w2[j] * h;
        }
        let err = scale * (out - y);
        g.b2 += err;
        for j in 0..width {
            let h = hidden[j];
            g.w2[j] += err * h;
            let dpre = err * model.w2[j] * model.activation.derivative_from_output(h);
            g.w1[j] += dpre * t;
            g.b1[j] += dpre;
        }
    }
    g
}

/// Anchor regularization: pulls parameters toward a fixed draw with
/// strength `coefficient`, adding `2 c (theta - anchor)` to the gradient.
pub(crate) struct AnchorPull<'a> {
    pub(crate) anchor: &'a MlpModel,
    pub(crate) coefficient: f64,
}

pub(crate) fn train(
    model: &mut MlpModel,
    times: &[f64],
    targets: &[f64],
    epochs: usize,
    learning_rate: f64,
    anchor: Option<&AnchorPull<'_>>,
) {
    let width = model.width();
    for _ in 0..epochs {
        let mut g = backprop(model, times, targets);
        if let Some(pull) = anchor {
            let c2 = 2.0 * pull.coefficient;
            for j in 0..width {
                g.w1[j] += c2 * (model.w1[j] - pull.anchor.w1[j]);
                g.b1[j] += c2 * (model.b1[j] - pull.anchor.b1[j]);
                g.w2[j] += c2 * (model.w2[j] - pull.anchor.w2[j]);
            }
            g.b2 += c2 * (model.b2 - pull.anchor.b2);
        }
        for j in 0..width {
            model.w1[j] -= learning_rate * g.w1[j];
            model.b1[j] -= learning_rate * g.b1[j];
            model.w2[j] -= learning_rate * g.w2[j];
        }
        model.b2 -= learning_rate * g.b2;
    }
}

pub(crate) fn fit(
    params: &MlpParams,
    train_times: &[f64],
    values_std: &[f64],
    mut rng: RngStream,
) -> MlpModel {
    let mut model = MlpModel::init(params.hidden_width, &mut rng);
    train(
        &mut model,
        train_times,
        values_std,
        params.epochs,
        params.learning_rate,
        None,
    );
    model
}

/// Finite-difference step on the standardized scale.
const FD_STEP: f64 = 1e-6;

/// Compares the backpropagated MSE gradient against central finite
/// differences at a freshly initialized network and returns the maximum
/// relative error over all parameters.
pub fn mlp_fit_gradient_check(
    params: &MlpParams,
    train_times: &[f64],
    train_values: &[f64],
    mut rng: RngStream,
) -> f64 {
    let standardization = Standardization::fit(train_values);
    let targets = standardization.apply_slice(train_values);
    let model = MlpModel::init(params.hidden_width, &mut rng);
    max_relative_gradient_error(&model, train_times, &targets)
}

pub(crate) fn max_relative_gradient_error(
    model: &MlpModel,
    times: &[f64],
    targets: &[f64],
) -> f64 {
    let analytic = backprop(model, times, targets);
    let width = model.width();
    let mut worst = 0.0f64;
    for slot in 0..(3 * width + 1) {
        let numeric = {
            let mut plus = model.clone();
            let mut minus = model.clone();
            *param_mut(&mut plus, slot) += FD_STEP;
            *param_mut(&mut minus, slot) -= FD_STEP;
            (mse_loss(&plus, times, targets) - mse_loss(&minus, times, targets)) / (2.0 * FD_STEP)
        };
        let reference = match slot_group(slot, width) {
            (0, j) => analytic.w1[j],
            (1, j) => analytic.b1[j],
            (2, j) => analytic.w2[j],
            _ => analytic.b2,
        };
        let rel = (numeric - reference).abs() / (numeric.abs() + reference.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    worst
}

fn slot_group(slot: usize, width: usize) -> (usize, usize) {
    (slot / width, slot % width)
}

fn param_mut(model: &mut MlpModel, slot: usize) -> &mut f64 {
    let width = model.w1.len();
    match slot_group(slot, width) {
        (0, j) => &mut model.w1[j],
        (1, j) => &mut model.b1[j],
        (2, j) => &mut model.w2[j],
        _ => &mut model.b2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_problem(n: usize) -> (Vec<f64>, Vec<f64>) {
        let times: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let targets: Vec<f64> = times.iter().map(|t| (3.0 * t).sin() * 0.7 + 0.1).collect();
        (times, targets)
    }

    #[test]
    fn gradient_check_passes_on_width8_network() {
        let (times, targets) = sample_problem(32);
        let params = MlpParams {
            hidden_width: 8,
            ..MlpParams::default()
        };
        let err = mlp_fit_gradient_check(&params, &times, &targets, RngStream::new(17, 0));
        assert!(err < 1e-4, "max relative gradient error {err}");
    }

    #[test]
    fn zero_network_on_zero_targets_is_stationary() {
        let model = MlpModel {
            w1: vec![0.0; 4],
            b1: vec![0.0; 4],
            w2: vec![0.0; 4],
            b2: 0.0,
            activation: Activation::Tanh,
        };
        let (times, _) = sample_problem(16);
        let targets = vec![0.0; 16];
        let g = backprop(&model, &times, &targets);
        let max = g
            .w1
            .iter()
            .chain(&g.b1)
            .chain(&g.w2)
            .chain(std::iter::once(&g.b2))
            .map(|v| v.abs())
            .fold(0.0f64, f64::max);
        assert!(max < 1e-10, "gradient at stationary point: {max}");
    }

    #[test]
    fn single_identity_unit_matches_least_squares_gradient() {
        // out = w2 * (w1 t + b1) + b2; check against the closed-form
        // gradient of mean squared error for the composed linear map.
        let model = MlpModel {
            w1: vec![0.7],
            b1: vec![-0.2],
            w2: vec![1.3],
            b2: 0.4,
            activation: Activation::Identity,
        };
        let (times, targets) = sample_problem(16);
        let g = backprop(&model, &times, &targets);
        let n = times.len() as f64;
        let residuals: Vec<f64> = times
            .iter()
            .zip(&targets)
            .map(|(&t, &y)| model.w2[0] * (model.w1[0] * t + model.b1[0]) + model.b2 - y)
            .collect();
        let d_b2: f64 = residuals.iter().map(|e| 2.0 * e / n).sum();
        let d_w2: f64 = residuals
            .iter()
            .zip(&times)
            .map(|(e, &t)| 2.0 * e * (model.w1[0] * t + model.b1[0]) / n)
            .sum();
        let d_w1: f64 = residuals
            .iter()
            .zip(&times)
            .map(|(e, &t)| 2.0 * e * model.w2[0] * t / n)
            .sum();
        let d_b1: f64 = residuals.iter().map(|e| 2.0 * e * model.w2[0] / n).sum();
        assert!((g.b2 - d_b2).abs() < 1e-8);
        assert!((g.w2[0] - d_w2).abs() < 1e-8);
        assert!((g.w1[0] - d_w1).abs() < 1e-8);
        assert!((g.b1[0] - d_b1).abs() < 1e-8);
    }

    #[test]
    fn training_reduces_loss() {
        // Standardized targets, as the fit entry point always provides.
        let (times, raw) = sample_problem(64);
        let targets = Standardization::fit(&raw).apply_slice(&raw);
        let params = MlpParams::default();
        let mut rng = RngStream::new(4, 2);
        let mut model = MlpModel::init(params.hidden_width, &mut rng);
        let before = mse_loss(&model, &times, &targets);
        train(&mut model, &times, &targets, params.epochs, params.learning_rate, None);
        let after = mse_loss(&model, &times, &targets);
        assert!(after < before * 0.05, "loss {before} -> {after}");
    }

    #[test]
    fn init_is_deterministic_per_stream() {
        let a = MlpModel::init(16, &mut RngStream::new(1, 2));
        let b = MlpModel::init(16, &mut RngStream::new(1, 2));
        assert_eq!(a.w1, b.w1);
        assert_eq!(a.w2, b.w2);
    }
}
