//! Quasi-norm gauges on finite coordinate arrays.
//!
//! Exponents are plain `f64` values in `(0, ∞]`; `f64::INFINITY` selects the
//! sup-norm branch wherever an exponent is accepted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{self, Weight};
use crate::scalar::Scalar;

/// How the length of an ambient coordinate array is measured.
#[derive(Debug, Clone, PartialEq)]
pub enum AmbientSpace {
    Lp {
        p: f64,
        dim: usize,
    },
    /// `(⊕_b ℓ_2^{n_b})_{ℓ_p}`: ℓ_2 inside each block, ℓ_p across blocks.
    BlockLpL2 {
        p: f64,
        blocks: Vec<usize>,
    },
    Lorentz {
        q: f64,
        weight: Weight,
    },
}

impl AmbientSpace {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        check_exponent(p, "p")?;
        Ok(AmbientSpace::Lp { p, dim })
    }

    pub fn block_lp_l2(p: f64, blocks: Vec<usize>) -> Result<Self> {
        check_exponent(p, "p")?;
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidInput("blocks must be nonempty with positive sizes".into()));
        }
        Ok(AmbientSpace::BlockLpL2 { p, blocks })
    }

    pub fn lorentz(q: f64, weight: Weight) -> Result<Self> {
        check_exponent(q, "q")?;
        Ok(AmbientSpace::Lorentz { q, weight })
    }

    pub fn dim(&self) -> usize {
        match self {
            AmbientSpace::Lp { dim, .. } => *dim,
            AmbientSpace::BlockLpL2 { blocks, .. } => blocks.iter().sum(),
            AmbientSpace::Lorentz { weight, .. } => weight.len(),
        }
    }

    /// The outer exponent `p` (or `q` for Lorentz spaces).
    pub fn exponent(&self) -> f64 {
        match self {
            AmbientSpace::Lp { p, .. } | AmbientSpace::BlockLpL2 { p, .. } => *p,
            AmbientSpace::Lorentz { q, .. } => *q,
        }
    }

    /// Exponent `r ≤ 1` for which the gauge satisfies `‖f+g‖^r ≤ ‖f‖^r + ‖g‖^r`,
    /// when one is known.
    pub fn convexity_exponent(&self) -> Option<f64> {
        match self {
            AmbientSpace::Lp { p, .. } | AmbientSpace::BlockLpL2 { p, .. } => Some(p.min(1.0)),
            AmbientSpace::Lorentz { .. } => None,
        }
    }

    /// Norm of a linear functional given by its coordinate array, when the
    /// dual gauge has a closed form (ℓ_p and block spaces).
    pub fn dual_gauge(&self, functional: &[f64]) -> Option<f64> {
        match self {
            AmbientSpace::Lp { p, .. } => Some(lp_norm_f64(functional, conjugate_exponent(*p))),
            AmbientSpace::BlockLpL2 { p, blocks } => {
                let norms: Vec<f64> = block_slices(functional, blocks).map(|b| lp_norm_f64(b, 2.0)).collect();
                Some(lp_norm_f64(&norms, conjugate_exponent(*p)))
            }
            AmbientSpace::Lorentz { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            AmbientSpace::Lp { p, dim } => format!("lp(p={p},dim={dim})"),
            AmbientSpace::BlockLpL2 { p, blocks } => format!("block_lp_l2(p={p},blocks={blocks:?})"),
            AmbientSpace::Lorentz { q, weight } => format!("lorentz(q={q},dim={})", weight.len()),
        }
    }
}

/// Dual exponent on the sup side: `∞` for `p ≤ 1`, `p/(p-1)` otherwise.
fn conjugate_exponent(p: f64) -> f64 {
    if p <= 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub(crate) fn check_exponent(p: f64, name: &str) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidInput(format!("{name} must lie in (0, inf], got {p}")));
    }
    Ok(())
}

pub(crate) fn check_finite<T: Scalar>(f: &[T]) -> Result<()> {
    match f.iter().position(|x| !x.is_finite_value()) {
        Some(j) => Err(Error::InvalidInput(format!("non-finite entry at coordinate {j}"))),
        None => Ok(()),
    }
}

fn block_slices<'a, T>(f: &'a [T], blocks: &'a [usize]) -> impl Iterator<Item = &'a [T]> + 'a {
    let mut start = 0;
    blocks.iter().map(move |&len| {
        let s = &f[start..start + len];
        start += len;
        s
    })
}

/// `(Σ|f_j|^p)^{1/p}`, or `max|f_j|` when `p = ∞`.
pub fn lp_gauge<T: Scalar>(f: &[T], p: f64) -> Result<T> {
    check_exponent(p, "p")?;
    check_finite(f)?;
    lp_unchecked(f, p)
}

fn lp_unchecked<T: Scalar>(f: &[T], p: f64) -> Result<T> {
    if p.is_infinite() {
        return Ok(f.iter().fold(T::zero(), |m, x| m.max_of(x.abs())));
    }
    let mut sum = T::zero();
    for &x in f {
        sum = sum + x.abs_powf(p).ok_or(Error::Inexact("|f_j|^p"))?;
    }
    sum.abs_powf(1.0 / p).ok_or(Error::Inexact("(sum)^(1/p)"))
}

/// Fast `f64` path without validation, used by search loops.
pub(crate) fn lp_norm_f64(f: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        f.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    } else if p == 1.0 {
        f.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        f.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else if p == 0.5 {
        let s: f64 = f.iter().map(|x| x.abs().sqrt()).sum();
        s * s
    } else {
        f.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Gauge of `f` in the given ambient space.
pub fn ambient_gauge<T: Scalar>(space: &AmbientSpace, f: &[T]) -> Result<T> {
    let dim = space.dim();
    if f.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: f.len() });
    }
    check_finite(f)?;
    match space {
        AmbientSpace::Lp { p, .. } => lp_unchecked(f, *p),
        AmbientSpace::BlockLpL2 { p, blocks } => {
            let norms = block_slices(f, blocks).map(|b| lp_unchecked(b, 2.0)).collect::<Result<Vec<T>>>()?;
            lp_unchecked(&norms, *p)
        }
        AmbientSpace::Lorentz { q, weight } => lorentz::lorentz_gauge(f, *q, weight),
    }
}

/// `f64` gauge without validation; callers guarantee matching dimension.
pub(crate) fn gauge_f64(space: &AmbientSpace, f: &[f64]) -> f64 {
    match space {
        AmbientSpace::Lp { p, .. } => lp_norm_f64(f, *p),
        AmbientSpace::BlockLpL2 { p, blocks } => {
            let norms: Vec<f64> = block_slices(f, blocks).map(|b| lp_norm_f64(b, 2.0)).collect();
            lp_norm_f64(&norms, *p)
        }
        AmbientSpace::Lorentz { q, weight } => lorentz::lorentz_gauge(f, *q, weight).unwrap_or(f64::NAN),
    }
}

/// `(a_n*)`: the moduli of `f` sorted non-increasingly.
pub fn nonincreasing_rearrangement<T: Scalar>(f: &[T]) -> Vec<T> {
    let mut out: Vec<T> = f.iter().map(|x| x.abs()).collect();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// `‖f+g‖_p^p − ‖f‖_p^p − ‖g‖_p^p`; non-positive for `0 < p ≤ 1`.
pub fn p_triangle_defect<T: Scalar>(f: &[T], g: &[T], p: f64) -> Result<T> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidInput(format!("p-triangle defect needs 0 < p <= 1, got {p}")));
    }
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), found: g.len() });
    }
    let pow_sum = |v: &[T]| -> Result<T> {
        v.iter().try_fold(T::zero(), |acc, x| Ok(acc + x.abs_powf(p).ok_or(Error::Inexact("|f_j|^p"))?))
    };
    let sum: Vec<T> = f.iter().zip(g).map(|(a, b)| *a + *b).collect();
    Ok(pow_sum(&sum)? - pow_sum(f)? - pow_sum(g)?)
}

/// Serialized exponent: a number, or the string `"inf"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum ExponentRepr {
    Number(f64),
    Text(String),
}

impl ExponentRepr {
    pub(crate) fn from_value(p: f64) -> ExponentRepr {
        if p.is_infinite() {
            ExponentRepr::Text("inf".into())
        } else {
            ExponentRepr::Number(p)
        }
    }

    pub(crate) fn value(&self) -> Result<f64> {
        match self {
            ExponentRepr::Number(p) => Ok(*p),
            ExponentRepr::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            ExponentRepr::Text(s) => Err(Error::Schema(format!("bad exponent {s:?}"))),
        }
    }
}
