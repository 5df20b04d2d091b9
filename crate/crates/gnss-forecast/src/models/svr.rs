//! Epsilon-insensitive support vector regression trained by sequential
//! minimal optimization.
//!
//! The dual is kept in the difference variables `beta_i = alpha_i -
//! alpha*_i` in [-C, C]:
//!
//!   maximize  W(beta) = -1/2 beta' K beta + y' beta - eps * ||beta||_1
//!   subject to  sum(beta) = 0
//!
//! Each step picks the maximal violating pair of the KKT conditions and
//! solves the two-variable subproblem exactly: along the feasible line the
//! objective is a concave piecewise quadratic, so the optimum is at a
//! stationary point of one of the sign regions, at a sign breakpoint, or at
//! the box edge - a finite candidate set.

use super::{ModelError, SvrKernel, SvrParams};

#[derive(Debug, Clone)]
pub(crate) struct SvrModel {
    train_times: Vec<f64>,
    beta: Vec<f64>,
    bias: f64,
    kernel: SvrKernel,
    gamma: f64,
}

fn kernel_eval(kernel: SvrKernel, gamma: f64, a: f64, b: f64) -> f64 {
    match kernel {
        SvrKernel::Rbf => {
            let d = a - b;
            (-gamma * d * d).exp()
        }
        SvrKernel::Linear => a * b,
    }
}

/// KKT gap below which the solver declares optimality.
const KKT_TOL: f64 = 1e-6;
/// Full recomputations of the cached K*beta guard against drift.
const REFRESH_INTERVAL: usize = 4096;

pub(crate) fn fit(
    params: &SvrParams,
    train_times: &[f64],
    values_std: &[f64],
) -> Result<SvrModel, ModelError> {
    let n = train_times.len();
    let c = params.c;
    let eps = params.epsilon;

    let gram: Vec<f64> = {
        let mut g = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..=i {
                let k = kernel_eval(params.kernel, params.gamma, train_times[i], train_times[j]);
                g[i * n + j] = k;
                g[j * n + i] = k;
            }
        }
        g
    };

    let mut beta = vec![0.0f64; n];
    // f_i = (K beta)_i, maintained incrementally.
    let mut f = vec![0.0f64; n];
    let mut bias = None;
    let mut stalled_once = false;

    // One "pass" is n pair updates.
    let max_updates = params.max_passes.saturating_mul(n);
    for update in 0..max_updates {
        if update > 0 && update % REFRESH_INTERVAL == 0 {
            refresh(&gram, &beta, &mut f);
        }

        // Maximal violating pair: the largest lower bound on the bias vs
        // the smallest upper bound.
        let mut i_up = usize::MAX;
        let mut v_up = f64::NEG_INFINITY;
        let mut i_dn = usize::MAX;
        let mut v_dn = f64::INFINITY;
        for i in 0..n {
            let g = values_std[i] - f[i];
            if beta[i] < c {
                let val = if beta[i] >= 0.0 { g - eps } else { g + eps };
                if val > v_up {
                    v_up = val;
                    i_up = i;
                }
            }
            if beta[i] > -c {
                let val = if beta[i] <= 0.0 { g + eps } else { g - eps };
                if val < v_dn {
                    v_dn = val;
                    i_dn = i;
                }
            }
        }
        if v_up - v_dn <= KKT_TOL {
            bias = Some((v_up + v_dn) / 2.0);
            break;
        }

        let (i, j) = (i_up, i_dn);
        let eta = gram[i * n + i] + gram[j * n + j] - 2.0 * gram[i * n + j];
        let t_max = (c - beta[i]).min(beta[j] + c);
        let g_i = values_std[i] - f[i];
        let g_j = values_std[j] - f[j];

        let step = best_step(beta[i], beta[j], g_i, g_j, eta, eps, t_max);
        match step {
            Some(t) => {
                stalled_once = false;
                beta[i] += t;
                beta[j] -= t;
                for k in 0..n {
                    f[k] += t * (gram[i * n + k] - gram[j * n + k]);
                }
            }
            None => {
                // A violating pair always admits an ascent step in exact
                // arithmetic; a stall is rounding in the cached f. Rebuild
                // it once, then give up.
                if stalled_once {
                    break;
                }
                stalled_once = true;
                refresh(&gram, &beta, &mut f);
            }
        }
    }

    let Some(bias) = bias else {
        return Err(ModelError::NumericalFailure(format!(
            "SVR SMO did not converge within {} passes (KKT tolerance {KKT_TOL:e})",
            params.max_passes
        )));
    };

    Ok(SvrModel {
        train_times: train_times.to_vec(),
        beta,
        bias,
        kernel: params.kernel,
        gamma: params.gamma,
    })
}

fn refresh(gram: &[f64], beta: &[f64], f: &mut [f64]) {
    let n = beta.len();
    for k in 0..n {
        f[k] = (0..n).map(|j| gram[k * n + j] * beta[j]).sum();
    }
}

/// Maximizes `dW(t) = t (g_i - g_j) - eta t^2 / 2 - eps (|b_i + t| - |b_i|)
/// - eps (|b_j - t| - |b_j|)` over `t` in `(0, t_max]`.
///
/// Returns `None` when no candidate improves the objective.
fn best_step(
    beta_i: f64,
    beta_j: f64,
    g_i: f64,
    g_j: f64,
    eta: f64,
    eps: f64,
    t_max: f64,
) -> Option<f64> {
    let step_viable = t_max > 0.0 && eta > 0.0;
    if !step_viable {
        return None;
    }
    let delta_w = |t: f64| -> f64 {
        t * (g_i - g_j) - 0.5 * eta * t * t
            - eps * ((beta_i + t).abs() - beta_i.abs())
            - eps * ((beta_j - t).abs() - beta_j.abs())
    };

    let mut candidates = [0.0f64; 7];
    let mut count = 0;
    let mut push = |t: f64| {
        if t > 0.0 && t <= t_max {
            candidates[count] = t;
            count += 1;
        }
    };
    push(t_max);
    push(-beta_i); // beta_i + t crosses zero
    push(beta_j); // beta_j - t crosses zero
    for (s_i, s_j) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        push((g_i - g_j - eps * (s_i - s_j)) / eta);
    }

    let mut best: Option<(f64, f64)> = None;
    for &t in &candidates[..count] {
        let gain = delta_w(t);
        if best.is_none_or(|(g, _)| gain > g) {
            best = Some((gain, t));
        }
    }
    match best {
        Some((gain, t)) if gain > 0.0 => Some(t),
        _ => None,
    }
}

impl SvrModel {
    #[cfg(test)]
    pub fn bias(&self) -> f64 {
        self.bias
    }

    #[cfg(test)]
    pub fn support_vector_count(&self) -> usize {
        self.beta.iter().filter(|&&b| b != 0.0).count()
    }

    pub fn predict(&self, times: &[f64]) -> Vec<f64> {
        times
            .iter()
            .map(|&t| {
                self.bias
                    + self
                        .train_times
                        .iter()
                        .zip(&self.beta)
                        .filter(|(_, &b)| b != 0.0)
                        .map(|(&ti, &b)| b * kernel_eval(self.kernel, self.gamma, t, ti))
                        .sum::<f64>()
            })
            .collect()
    }
}
