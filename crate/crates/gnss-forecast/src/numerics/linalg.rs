//! Dense symmetric positive-definite linear algebra.
//!
//! Only what the Gaussian-process solve needs: packed symmetric storage,
//! Cholesky factorization with jitter escalation, and triangular solves.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix of order {order} is not positive definite (last jitter tried: {jitter:e})")]
    NotPositiveDefinite { order: usize, jitter: f64 },
    #[error("dimension mismatch: factor order {expected}, vector length {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Symmetric matrix stored as the row-major lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    lower: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            lower: vec![0.0; order * (order + 1) / 2],
        }
    }

    /// Builds from a function of (row, col); only the lower triangle
    /// (row >= col) is evaluated.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(order);
        for i in 0..order {
            for j in 0..=i {
                m.lower[idx(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= j {
            self.lower[idx(i, j)]
        } else {
            self.lower[idx(j, i)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        if i >= j {
            self.lower[idx(i, j)] = value;
        } else {
            self.lower[idx(j, i)] = value;
        }
    }

    /// Mean of the absolute diagonal; the reference scale for jitter.
    pub fn mean_abs_diagonal(&self) -> f64 {
        if self.order == 0 {
            return 0.0;
        }
        (0..self.order).map(|i| self.lower[idx(i, i)].abs()).sum::<f64>() / self.order as f64
    }
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    debug_assert!(i >= j);
    i * (i + 1) / 2 + j
}

/// Lower-triangular Cholesky factor of `A + jitter * I`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    order: usize,
    lower: Vec<f64>,
    /// Jitter that was actually added to the diagonal (after escalation).
    applied_jitter: f64,
}

impl CholeskyFactor {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn applied_jitter(&self) -> f64 {
        self.applied_jitter
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= j {
            self.lower[idx(i, j)]
        } else {
            0.0
        }
    }

    /// L * L^T, for residual checks.
    pub fn reconstruct(&self) -> SymMatrix {
        SymMatrix::from_fn(self.order, |i, j| {
            (0..=j.min(i)).map(|k| self.get(i, k) * self.get(j, k)).sum()
        })
    }
}

/// Relative scale of the escalation ladder used when the caller passed no
/// jitter: the first retry adds `1e-10 * mean |diag|`, and each further
/// retry multiplies by 10, ending at `1e-7 * mean |diag|`.
const ESCALATION_BASE_REL: f64 = 1e-10;
const ESCALATION_STEPS: usize = 3;

/// Factors `A + jitter * I` into `L * L^T`.
///
/// If the factorization breaks down, the jitter is escalated by factors of
/// ten up to [`ESCALATION_STEPS`] times before giving up; a zero initial
/// jitter is first bumped onto the relative ladder. The jitter actually
/// applied is reported on the returned factor.
pub fn cholesky(a: &SymMatrix, jitter: f64) -> Result<CholeskyFactor, NumericsError> {
    assert!(jitter >= 0.0, "jitter must be non-negative");
    let base = {
        let scale = a.mean_abs_diagonal();
        let floor = if scale > 0.0 { ESCALATION_BASE_REL * scale } else { ESCALATION_BASE_REL };
        if jitter > 0.0 {
            jitter
        } else {
            floor
        }
    };

    let mut attempt_jitter = jitter;
    let mut last = jitter;
    for step in 0..=(ESCALATION_STEPS + 1) {
        if step == 1 {
            attempt_jitter = base;
            if jitter > 0.0 {
                attempt_jitter = base * 10.0;
            }
        } else if step > 1 {
            attempt_jitter *= 10.0;
        }
        last = attempt_jitter;
        if let Some(factor) = try_factor(a, attempt_jitter) {
            return Ok(factor);
        }
    }
    Err(NumericsError::NotPositiveDefinite {
        order: a.order(),
        jitter: last,
    })
}

fn try_factor(a: &SymMatrix, jitter: f64) -> Option<CholeskyFactor> {
    let n = a.order();
    let mut l = vec![0.0f64; n * (n + 1) / 2];
    for i in 0..n {
        for j in 0..=i {
            // Rows of L are contiguous in packed storage, so the partial
            // dot product below walks two adjacent slices.
            let dot: f64 = {
                let (ri, rj) = (&l[idx(i, 0)..idx(i, j)], &l[idx(j, 0)..idx(j, j)]);
                ri.iter().zip(rj).map(|(x, y)| x * y).sum()
            };
            if i == j {
                let pivot = a.get(i, i) + jitter - dot;
                let pivot_ok = pivot.is_finite() && pivot > 0.0;
                if !pivot_ok {
                    return None;
                }
                l[idx(i, i)] = pivot.sqrt();
            } else {
                l[idx(i, j)] = (a.get(i, j) - dot) / l[idx(j, j)];
            }
        }
    }
    Some(CholeskyFactor {
        order: n,
        lower: l,
        applied_jitter: jitter,
    })
}

/// Solves `(L * L^T) x = b` by forward and backward substitution.
pub fn solve_spd(factor: &CholeskyFactor, b: &[f64]) -> Result<Vec<f64>, NumericsError> {
    let n = factor.order();
    if b.len() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let l = &factor.lower;
    // L y = b
    let mut y = vec![0.0f64; n];
    for i in 0..n {
        let dot: f64 = l[idx(i, 0)..idx(i, i)]
            .iter()
            .zip(&y[..i])
            .map(|(a, b)| a * b)
            .sum();
        y[i] = (b[i] - dot) / l[idx(i, i)];
    }
    // L^T x = y
    let mut x = vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut dot = 0.0;
        for k in (i + 1)..n {
            dot += l[idx(k, i)] * x[k];
        }
        x[i] = (y[i] - dot) / l[idx(i, i)];
    }
    Ok(x)
}
