//! Two-sided bounds for sup-type (and inf-type) constants.

use serde::{Serialize, Serializer};

/// A reproducible certificate for one side of a [`BoundEstimate`].
///
/// Sets and coordinates are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Ratio `‖S_γ f‖ / ‖f‖` for an ambient vector `f`.
    Multiplier { gamma: Vec<f64>, f: Vec<f64> },
    /// Ratio of a greedy-type operator at `m` applied to `Σ a_n x_n`.
    Greedy { coefficients: Vec<f64>, m: usize },
    /// Gauge of `Σ_{n∈set} x_n`.
    Set { set: Vec<usize> },
    /// Ratio `‖Σ_{A} θ_n x_n‖ / ‖Σ_{B} ε_n x_n‖`.
    SignedSets {
        numerator: Vec<usize>,
        numerator_signs: Vec<f64>,
        denominator: Vec<usize>,
        denominator_signs: Vec<f64>,
    },
    /// Ratio involving a coefficient sequence (embedding constants).
    Sequence { coefficients: Vec<f64> },
}

/// Which side of a [`BoundEstimate`] the witness reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Sup-type: the witness attains `lower`.
    Sup,
    /// Inf-type: the witness attains `upper`.
    Inf,
}

/// Relative gap tolerated between a floating-point witness value and a
/// certified bound it may not cross.
pub const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEstimate {
    pub side: Side,
    pub lower: f64,
    #[serde(serialize_with = "serialize_bound")]
    pub upper: f64,
    pub witness: Option<Witness>,
    /// Both sides certified and equal (up to rounding).
    pub exact: bool,
    /// At least one side comes from a budgeted search rather than a certificate.
    pub heuristic: bool,
    pub evaluations: u64,
}

fn serialize_bound<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

impl BoundEstimate {
    /// Sup-type constant: `lower` is witnessed, `upper` is certified (or `∞`).
    /// A witnessed value above a finite certified bound by at most
    /// [`ROUNDING_SLACK`] (relative) is rounding noise and is clamped.
    pub fn sup(mut lower: f64, witness: Option<Witness>, upper: f64, evaluations: u64) -> Self {
        if upper.is_finite() && lower > upper && lower <= upper + ROUNDING_SLACK * upper.abs() {
            lower = upper;
        }
        let exact = upper.is_finite() && lower >= upper - 1e-9 * upper.abs().max(1.0);
        BoundEstimate { side: Side::Sup, lower, upper, witness, exact, heuristic: !exact, evaluations }
    }

    /// Value obtained by exhaustive evaluation.
    pub fn exact(value: f64, witness: Option<Witness>, evaluations: u64) -> Self {
        BoundEstimate {
            side: Side::Sup,
            lower: value,
            upper: value,
            witness,
            exact: true,
            heuristic: false,
            evaluations,
        }
    }

    /// Inf-type constant: `upper` is witnessed, `lower` is certified.
    pub fn inf(upper: f64, witness: Option<Witness>, lower: f64, evaluations: u64) -> Self {
        let exact = lower >= upper - 1e-9 * upper.abs().max(1.0);
        BoundEstimate { side: Side::Inf, lower, upper, witness, exact, heuristic: !exact, evaluations }
    }

    /// The value the witness reproduces.
    pub fn witnessed(&self) -> f64 {
        match self.side {
            Side::Sup => self.lower,
            Side::Inf => self.upper,
        }
    }

    /// Exact value for an inf-type quantity.
    pub fn exact_inf(value: f64, witness: Option<Witness>, evaluations: u64) -> Self {
        BoundEstimate { side: Side::Inf, ..Self::exact(value, witness, evaluations) }
    }
}
