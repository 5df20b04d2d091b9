//! Numerical primitives: packed SPD linear algebra and deterministic,
//! splittable random streams.

mod linalg;
mod rng;

pub use linalg::{cholesky, solve_spd, CholeskyFactor, NumericsError, SymMatrix};
pub use rng::{fnv1a64, rng_normal, RngStream};
