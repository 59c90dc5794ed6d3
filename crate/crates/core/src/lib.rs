//! Greedy approximation toolkit for finite-dimensional quasi-normed sequence
//! spaces: `ℓ_p` for `0 < p ≤ ∞`, block `ℓ_p(ℓ_2)` and weighted Lorentz spaces.
//!
//! The core is generic over [`Scalar`] (`f32`, `f64`, exact [`Rational`]);
//! estimators that sample or enumerate work in `f64`.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bases;
pub mod bootstrap;
pub mod democracy;
pub mod embeddings;
pub mod error;
pub mod estimate;
pub mod greedy;
pub mod linalg;
pub mod lorentz;
pub mod numeric;
pub mod sa;
mod sampling;
pub mod scalar;
pub mod spaces;
pub mod subsets;

use std::str::FromStr;

pub use bases::{Basis, ZooSpec};
pub use error::{Error, Result};
pub use estimate::{BoundEstimate, Witness};
pub use linalg::Matrix;
pub use lorentz::{PrimitiveWeight, Weight};
pub use scalar::{Rational, Scalar};
pub use spaces::AmbientSpace;

pub type Basis64 = Basis<f64>;
pub type Basis32 = Basis<f32>;
pub type ExactBasis = Basis<Rational>;
pub type Matrix64 = Matrix<f64>;
pub type ExactMatrix = Matrix<Rational>;

/// Exhaustive enumeration or seeded sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[default]
    Random,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "random" => Ok(Mode::Random),
            other => Err(Error::InvalidInput(format!("unknown mode '{other}' (expected exact or random)"))),
        }
    }
}
