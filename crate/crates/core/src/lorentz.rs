//! Weights, primitive weights and weighted Lorentz gauges `‖·‖_{q,w}`.

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::scalar::Scalar;
use crate::spaces::{check_exponent, check_finite, nonincreasing_rearrangement};

/// A finite prefix of a positive weight sequence `(w_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight(Vec<f64>);

/// Partial sums `s_n = Σ_{k≤n} w_k` of a weight (or any positive sequence
/// playing that role).
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveWeight(Vec<f64>);

impl Weight {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidWeight("weight must have at least one entry".into()));
        }
        if let Some(n) = values.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidWeight(format!("w[{n}] = {} is not positive", values[n])));
        }
        Ok(Weight(values))
    }

    pub fn ones(len: usize) -> Result<Self> {
        Weight::new(vec![1.0; len])
    }

    /// `Δs_α` with `s_α(n) = n^α`, for `α > 0`.
    pub fn power(alpha: f64, len: usize) -> Result<Self> {
        difference_weight(&PrimitiveWeight::power(alpha, len)?)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl PrimitiveWeight {
    /// Wraps an arbitrary positive sequence; monotonicity is only required by
    /// [`difference_weight`].
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(n) = values.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidWeight(format!("s[{n}] = {} is not positive", values[n])));
        }
        Ok(PrimitiveWeight(values))
    }

    /// `s_n = n^α`.
    pub fn power(alpha: f64, len: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidWeight(format!("power weight needs alpha > 0, got {alpha}")));
        }
        PrimitiveWeight::new((1..=len).map(|n| (n as f64).powf(alpha)).collect())
    }

    /// `s_m = m^{1/p} / (1 + log m)^q`. Increasing only for `m` large enough.
    pub fn log_damped(p: f64, q: f64, len: usize) -> Result<Self> {
        PrimitiveWeight::new((1..=len).map(|m| (m as f64).powf(1.0 / p) / (1.0 + (m as f64).ln()).powf(q)).collect())
    }

    /// `s_n = n / √H_n`.
    pub fn harmonic_damped(len: usize) -> Result<Self> {
        let mut h = NeumaierSum::default();
        PrimitiveWeight::new(
            (1..=len)
                .map(|n| {
                    h.add(1.0 / n as f64);
                    n as f64 / h.value().sqrt()
                })
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[1] > w[0])
    }
}

/// Compensated partial sums of the first `m` weights.
pub fn primitive_weight(w: &Weight, m: usize) -> Result<PrimitiveWeight> {
    if m > w.len() {
        return Err(Error::InvalidWeight(format!("requested {m} terms of a weight of length {}", w.len())));
    }
    let mut acc = NeumaierSum::default();
    Ok(PrimitiveWeight(
        w.0[..m]
            .iter()
            .map(|&x| {
                acc.add(x);
                acc.value()
            })
            .collect(),
    ))
}

/// `Δs = (s_n − s_{n−1})` with `s_0 = 0`.
pub fn difference_weight(s: &PrimitiveWeight) -> Result<Weight> {
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(s.len());
    for (n, &x) in s.0.iter().enumerate() {
        if x <= prev {
            return Err(Error::InvalidWeight(format!(
                "primitive weight not strictly increasing at n={n}: {x} <= {prev}"
            )));
        }
        out.push(x - prev);
        prev = x;
    }
    Weight::new(out)
}

/// `‖f‖_{q,w} = (Σ (a_n*)^q s_n^{q−1} w_n)^{1/q}`, or `sup_n s_n a_n*` for `q = ∞`.
///
/// Only the first `f.len()` weights are used.
pub fn lorentz_gauge<T: Scalar>(f: &[T], q: f64, w: &Weight) -> Result<T> {
    check_exponent(q, "q")?;
    check_finite(f)?;
    if w.len() < f.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), found: w.len() });
    }
    let s = primitive_weight(w, f.len())?;
    let a = nonincreasing_rearrangement(f);
    let conv = |x: f64| T::from_f64(x).ok_or(Error::InvalidWeight(format!("weight {x} not representable")));
    if q.is_infinite() {
        let mut sup = T::zero();
        for (an, &sn) in a.iter().zip(s.values()) {
            sup = sup.max_of(conv(sn)? * *an);
        }
        return Ok(sup);
    }
    let mut total = T::zero();
    for ((an, &sn), &wn) in a.iter().zip(s.values()).zip(w.values()) {
        if an.is_zero() {
            // rearrangement is non-increasing, so the tail vanishes
            break;
        }
        let factor = conv(sn)?.abs_powf(q - 1.0).ok_or(Error::Inexact("s_n^(q-1)"))? * conv(wn)?;
        total = total + an.abs_powf(q).ok_or(Error::Inexact("(a_n*)^q"))? * factor;
    }
    total.abs_powf(1.0 / q).ok_or(Error::Inexact("(sum)^(1/q)"))
}

/// `sup_n s_n a_n*` from the primitive weight directly; `s` need not be
/// increasing.
pub fn weak_lorentz_gauge(f: &[f64], s: &PrimitiveWeight) -> Result<f64> {
    check_finite(f)?;
    if s.len() < f.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), found: s.len() });
    }
    let a = nonincreasing_rearrangement(f);
    Ok(a.iter().zip(s.values()).map(|(x, s)| s * x).fold(0.0, f64::max))
}
