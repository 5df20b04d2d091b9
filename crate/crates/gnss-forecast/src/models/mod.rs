//! The seven forecasters behind a single fit/predict contract.
//!
//! Every method regresses a station component on normalized time: fitting
//! standardizes the raw meter values internally, trains on the standardized
//! scale, and predictions are mapped back to meters. Queries beyond t = 1
//! are the whole point - the holdout lives there.

mod bnn;
mod cart;
mod gp;
mod grnn;
mod knn;
mod mlp;
mod svr;

pub use gp::gp_posterior_mean;
pub use mlp::mlp_fit_gradient_check;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::RngStream;
use crate::series::Standardization;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("bad hyperparameters: {0}")]
    BadHyperparameters(String),
    #[error("invalid training input: {0}")]
    InvalidTraining(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

/// The method roster, in listing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MethodKind {
    #[serde(rename = "MLP")]
    Mlp,
    #[serde(rename = "BNN")]
    Bnn,
    #[serde(rename = "GP")]
    Gp,
    #[serde(rename = "KNN")]
    Knn,
    #[serde(rename = "GRNN")]
    Grnn,
    #[serde(rename = "CART")]
    Cart,
    #[serde(rename = "SVR")]
    Svr,
}

impl MethodKind {
    /// All seven methods in their canonical listing order, which is also
    /// the tie-break order for rankings and the row order of the emitted
    /// tables.
    pub const ALL: [MethodKind; 7] = [
        MethodKind::Mlp,
        MethodKind::Bnn,
        MethodKind::Gp,
        MethodKind::Knn,
        MethodKind::Grnn,
        MethodKind::Cart,
        MethodKind::Svr,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MethodKind::Mlp => "MLP",
            MethodKind::Bnn => "BNN",
            MethodKind::Gp => "GP",
            MethodKind::Knn => "KNN",
            MethodKind::Grnn => "GRNN",
            MethodKind::Cart => "CART",
            MethodKind::Svr => "SVR",
        }
    }

    /// Position in the canonical listing order.
    pub fn listing_index(self) -> usize {
        MethodKind::ALL.iter().position(|&m| m == self).expect("member of ALL")
    }
}

impl std::fmt::Display for MethodKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MethodKind::ALL
            .iter()
            .find(|m| m.label().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| format!("unknown method {s:?} (expected one of MLP, BNN, GP, KNN, GRNN, CART, SVR)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpParams {
    /// Squared-exponential lengthscales on the normalized time axis.
    pub lengthscale_grid: Vec<f64>,
    pub signal_variance: f64,
    /// Observation-noise variances, standardized units.
    pub noise_grid: Vec<f64>,
}

impl Default for GpParams {
    fn default() -> Self {
        GpParams {
            lengthscale_grid: vec![0.03, 0.1, 0.3, 1.0],
            signal_variance: 1.0,
            noise_grid: vec![1e-6, 1e-4, 1e-2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnnWeighting {
    Uniform,
    InverseDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
    pub weighting: KnnWeighting,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            k: 5,
            weighting: KnnWeighting::InverseDistance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrnnParams {
    /// Gaussian kernel bandwidths on the normalized time axis.
    pub bandwidth_grid: Vec<f64>,
}

impl Default for GrnnParams {
    fn default() -> Self {
        GrnnParams {
            bandwidth_grid: vec![0.01, 0.03, 0.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CartParams {
    /// Maximum number of split levels below the root.
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            max_depth: 8,
            min_leaf: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SvrKernel {
    Linear,
    Rbf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub kernel: SvrKernel,
    pub gamma: f64,
    pub max_passes: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: 10.0,
            epsilon: 0.01,
            kernel: SvrKernel::Rbf,
            gamma: 10.0,
            max_passes: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden_width: usize,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden_width: 16,
            epochs: 2000,
            learning_rate: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BnnParams {
    pub ensemble_size: usize,
    pub prior_stddev: f64,
    /// Settings of each ensemble member.
    pub member: MlpParams,
}

impl Default for BnnParams {
    fn default() -> Self {
        BnnParams {
            ensemble_size: 5,
            prior_stddev: 1.0,
            member: MlpParams::default(),
        }
    }
}

/// Per-method hyperparameter bag; every field has a sensible default and is
/// overridable from the experiment config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparameters {
    pub mlp: MlpParams,
    pub bnn: BnnParams,
    pub gp: GpParams,
    pub knn: KnnParams,
    pub grnn: GrnnParams,
    pub cart: CartParams,
    pub svr: SvrParams,
}

/// Finite and strictly positive; rejects NaN, which plain `<=` would let
/// through a validation.
pub(crate) fn positive(value: f64) -> bool {
    value.is_finite() && value > 0.0
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::BadHyperparameters(msg));
        let positive_grid = |name: &str, grid: &[f64]| {
            if grid.is_empty() {
                return Err(ModelError::BadHyperparameters(format!("{name} is empty")));
            }
            if !grid.iter().all(|&v| positive(v)) {
                return Err(ModelError::BadHyperparameters(format!(
                    "{name} must contain only positive finite values"
                )));
            }
            Ok(())
        };
        positive_grid("gp.lengthscale_grid", &self.gp.lengthscale_grid)?;
        if !positive(self.gp.signal_variance) {
            return bad("gp.signal_variance must be positive".into());
        }
        if self.gp.noise_grid.is_empty()
            || self.gp.noise_grid.iter().any(|&v| v < 0.0 || !v.is_finite())
        {
            return bad("gp.noise_grid must be non-empty and non-negative".into());
        }
        if self.knn.k < 1 {
            return bad("knn.k must be at least 1".into());
        }
        positive_grid("grnn.bandwidth_grid", &self.grnn.bandwidth_grid)?;
        if self.cart.max_depth < 1 {
            return bad("cart.max_depth must be at least 1".into());
        }
        if self.cart.min_leaf < 1 {
            return bad("cart.min_leaf must be at least 1".into());
        }
        if !positive(self.svr.c) {
            return bad("svr.c must be positive".into());
        }
        if self.svr.epsilon < 0.0 {
            return bad("svr.epsilon must be non-negative".into());
        }
        if !positive(self.svr.gamma) {
            return bad("svr.gamma must be positive".into());
        }
        if self.svr.max_passes < 1 {
            return bad("svr.max_passes must be at least 1".into());
        }
        for (label, m) in [("mlp", &self.mlp), ("bnn.member", &self.bnn.member)] {
            if m.hidden_width < 1 {
                return bad(format!("{label}.hidden_width must be at least 1"));
            }
            if m.epochs < 1 {
                return bad(format!("{label}.epochs must be at least 1"));
            }
            if !positive(m.learning_rate) {
                return bad(format!("{label}.learning_rate must be positive"));
            }
        }
        if self.bnn.ensemble_size < 1 {
            return bad("bnn.ensemble_size must be at least 1".into());
        }
        if !positive(self.bnn.prior_stddev) {
            return bad("bnn.prior_stddev must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum FittedState {
    Mlp(mlp::MlpModel),
    Bnn(bnn::BnnModel),
    Gp(gp::GpModel),
    Knn(knn::KnnModel),
    Grnn(grnn::GrnnModel),
    Cart(cart::CartModel),
    Svr(svr::SvrModel),
}

impl FittedState {
    fn predict_std(&self, times: &[f64]) -> Vec<f64> {
        match self {
            FittedState::Mlp(m) => m.predict(times),
            FittedState::Bnn(m) => m.predict(times),
            FittedState::Gp(m) => m.predict(times),
            FittedState::Knn(m) => m.predict(times),
            FittedState::Grnn(m) => m.predict(times),
            FittedState::Cart(m) => m.predict(times),
            FittedState::Svr(m) => m.predict(times),
        }
    }
}

/// A fitted forecaster; prediction is deterministic and returns raw meters.
#[derive(Debug, Clone)]
pub struct ForecastModel {
    kind: MethodKind,
    standardization: Standardization,
    training_rmse: f64,
    state: FittedState,
}

impl ForecastModel {
    pub fn kind(&self) -> MethodKind {
        self.kind
    }

    /// RMSE of the in-sample predictions against the training values, raw
    /// meters.
    pub fn training_rmse(&self) -> f64 {
        self.training_rmse
    }

    pub fn standardization(&self) -> Standardization {
        self.standardization
    }

    /// Evaluates the model at the given normalized times; values beyond 1
    /// are the extrapolation regime and entirely legal.
    pub fn predict(&self, times: &[f64]) -> Vec<f64> {
        assert!(
            times.iter().all(|t| t.is_finite()),
            "query times must be finite"
        );
        self.standardization
            .invert_slice(&self.state.predict_std(times))
    }
}

/// Fits one method on a normalized training window.
///
/// Where a hyperparameter grid is given the grid point minimizing in-sample
/// RMSE wins, except for the GP whose in-sample RMSE is monotone in
/// noise -> 0; its grid is scored by holding out the last tenth of the
/// training window instead.
pub fn fit(
    kind: MethodKind,
    hp: &Hyperparameters,
    train_times: &[f64],
    train_values: &[f64],
    rng: RngStream,
) -> Result<ForecastModel, ModelError> {
    hp.validate()?;
    validate_training_inputs(train_times, train_values)?;

    let standardization = Standardization::fit(train_values);
    let values_std = standardization.apply_slice(train_values);

    let state = match kind {
        MethodKind::Mlp => FittedState::Mlp(mlp::fit(&hp.mlp, train_times, &values_std, rng)),
        MethodKind::Bnn => FittedState::Bnn(bnn::fit(&hp.bnn, train_times, &values_std, rng)),
        MethodKind::Gp => FittedState::Gp(gp::fit(&hp.gp, train_times, &values_std)?),
        MethodKind::Knn => FittedState::Knn(knn::fit(&hp.knn, train_times, &values_std)),
        MethodKind::Grnn => FittedState::Grnn(grnn::fit(&hp.grnn, train_times, &values_std)),
        MethodKind::Cart => FittedState::Cart(cart::fit(&hp.cart, train_times, &values_std)),
        MethodKind::Svr => FittedState::Svr(svr::fit(&hp.svr, train_times, &values_std)?),
    };

    let in_sample = standardization.invert_slice(&state.predict_std(train_times));
    let training_rmse = crate::metrics::rmse(&in_sample, train_values)
        .expect("in-sample prediction has training length");
    if !training_rmse.is_finite() {
        return Err(ModelError::NumericalFailure(format!(
            "{kind}: non-finite training RMSE"
        )));
    }

    Ok(ForecastModel {
        kind,
        standardization,
        training_rmse,
        state,
    })
}

/// Free-function form of [`ForecastModel::predict`].
pub fn predict(model: &ForecastModel, times: &[f64]) -> Vec<f64> {
    model.predict(times)
}

fn validate_training_inputs(times: &[f64], values: &[f64]) -> Result<(), ModelError> {
    if times.len() != values.len() {
        return Err(ModelError::InvalidTraining(format!(
            "{} times vs {} values",
            times.len(),
            values.len()
        )));
    }
    if times.len() < 2 {
        return Err(ModelError::InvalidTraining(format!(
            "need at least 2 training samples, got {}",
            times.len()
        )));
    }
    if times.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::InvalidTraining("non-finite training input".into()));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ModelError::InvalidTraining(
            "training times must be strictly increasing".into(),
        ));
    }
    if times[0] < 0.0 || *times.last().expect("nonempty") > 1.0 {
        return Err(ModelError::InvalidTraining(
            "training times must lie in [0, 1]".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_series(n: usize) -> (Vec<f64>, Vec<f64>) {
        let times: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| 4.0e6 + 0.05 * t).collect();
        (times, values)
    }

    #[test]
    fn method_roster_is_closed_and_ordered() {
        assert_eq!(MethodKind::ALL.len(), 7);
        let labels: Vec<&str> = MethodKind::ALL.iter().map(|m| m.label()).collect();
        assert_eq!(labels, ["MLP", "BNN", "GP", "KNN", "GRNN", "CART", "SVR"]);
    }

    #[test]
    fn method_parsing_is_case_insensitive() {
        assert_eq!("grnn".parse::<MethodKind>().unwrap(), MethodKind::Grnn);
        assert_eq!("Gp".parse::<MethodKind>().unwrap(), MethodKind::Gp);
        assert!("RBF".parse::<MethodKind>().is_err());
    }

    #[test]
    fn knn_k1_memorizes_training_set() {
        let (times, values) = linear_series(20);
        let hp = Hyperparameters {
            knn: KnnParams {
                k: 1,
                ..KnnParams::default()
            },
            ..Hyperparameters::default()
        };
        let model = fit(MethodKind::Knn, &hp, &times, &values, RngStream::new(0, 0)).unwrap();
        assert_eq!(model.training_rmse(), 0.0);
    }

    #[test]
    fn cart_unbounded_depth_memorizes_distinct_times() {
        let (times, values) = linear_series(20);
        let hp = Hyperparameters {
            cart: CartParams {
                max_depth: 64,
                min_leaf: 1,
            },
            ..Hyperparameters::default()
        };
        let model = fit(MethodKind::Cart, &hp, &times, &values, RngStream::new(0, 0)).unwrap();
        assert!(model.training_rmse() < 1e-12, "rmse {}", model.training_rmse());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let hp = Hyperparameters::default();
        let rng = RngStream::new(0, 0);
        // unequal lengths
        assert!(fit(MethodKind::Knn, &hp, &[0.0, 1.0], &[1.0], rng.clone()).is_err());
        // non-increasing times
        assert!(fit(MethodKind::Knn, &hp, &[0.5, 0.5], &[1.0, 2.0], rng.clone()).is_err());
        // out of the normalized range
        assert!(fit(MethodKind::Knn, &hp, &[0.0, 1.5], &[1.0, 2.0], rng).is_err());
    }

    #[test]
    fn bad_hyperparameters_are_rejected() {
        let mut hp = Hyperparameters::default();
        hp.knn.k = 0;
        match fit(
            MethodKind::Knn,
            &hp,
            &[0.0, 1.0],
            &[1.0, 2.0],
            RngStream::new(0, 0),
        ) {
            Err(ModelError::BadHyperparameters(_)) => {}
            other => panic!("expected BadHyperparameters, got {other:?}"),
        }
    }

    #[test]
    fn fit_predict_is_deterministic() {
        let (times, values) = linear_series(40);
        let hp = Hyperparameters::default();
        let query = [1.02, 1.1, 1.5];
        for kind in MethodKind::ALL {
            let a = fit(kind, &hp, &times, &values, RngStream::new(9, 1)).unwrap();
            let b = fit(kind, &hp, &times, &values, RngStream::new(9, 1)).unwrap();
            let pa = a.predict(&query);
            let pb = b.predict(&query);
            assert_eq!(pa, pb, "{kind} predictions must be bit-identical");
        }
    }

    #[test]
    fn constant_series_law_holds_for_all_methods() {
        let n = 40;
        let constant = 4.2e6;
        let times: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let values = vec![constant; n];
        let hp = Hyperparameters::default();
        let query = [1.01, 1.2, 2.0];
        for kind in MethodKind::ALL {
            let model = fit(kind, &hp, &times, &values, RngStream::new(3, 7)).unwrap();
            for p in model.predict(&query) {
                assert!(
                    (p - constant).abs() <= 1e-6 * constant.abs(),
                    "{kind} predicted {p} for constant {constant}"
                );
            }
        }
    }

    #[test]
    fn shift_equivariance_via_standardization() {
        let (times, values) = linear_series(40);
        let offset = 123.456;
        let shifted: Vec<f64> = values.iter().map(|v| v + offset).collect();
        let hp = Hyperparameters::default();
        let query = [1.05, 1.3];
        for kind in MethodKind::ALL {
            let base = fit(kind, &hp, &times, &values, RngStream::new(5, 5)).unwrap();
            let moved = fit(kind, &hp, &times, &shifted, RngStream::new(5, 5)).unwrap();
            for (a, b) in base.predict(&query).iter().zip(moved.predict(&query)) {
                assert!(
                    ((b - a) - offset).abs() <= 1e-6 * offset.abs(),
                    "{kind}: shift not preserved ({a} -> {b})"
                );
            }
        }
    }
}
