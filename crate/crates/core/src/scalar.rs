//! Scalar abstraction shared by every gauge and linear operator.
//!
//! Linear machinery (coefficient transforms, projections, matrix inversion)
//! needs only field arithmetic, so it is written once over [`Scalar`] and runs
//! on `f32`, `f64` and exact rationals alike. Gauges additionally need
//! fractional powers; [`Scalar::abs_powf`] returns `None` when a power has no
//! exact representation in the scalar type, which is how the rational route
//! reports that a quantity is not exactly computable.

use std::fmt::Debug;

use num_integer::Roots;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

pub trait Scalar: Num + Signed + Copy + PartialOrd + Debug + ToPrimitive + Send + Sync + 'static {
    /// Nearest representable value; `None` for non-finite input.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_finite_value(self) -> bool;

    /// `|self|^e`, or `None` when the result is not representable exactly.
    fn abs_powf(self, e: f64) -> Option<Self>;

    /// Sign with the convention `sgn(0) = 1`.
    fn sgn(self) -> Self {
        if self < Self::zero() {
            -Self::one()
        } else {
            Self::one()
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_f64(x: f64) -> Option<Self> {
                if x.is_finite() {
                    Some(x as $t)
                } else {
                    None
                }
            }

            fn is_finite_value(self) -> bool {
                self.is_finite()
            }

            fn abs_powf(self, e: f64) -> Option<Self> {
                let a = self.abs();
                if e == 1.0 {
                    Some(a)
                } else if e == 2.0 {
                    Some(a * a)
                } else if e == 0.5 {
                    Some(a.sqrt())
                } else {
                    Some(a.powf(e as $t))
                }
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

/// Exact rational scalar used for certificate checks.
pub type Rational = Ratio<i64>;

fn exact_root(x: i64, k: u32) -> Option<i64> {
    let r = x.nth_root(k);
    if r.checked_pow(k) == Some(x) {
        Some(r)
    } else {
        None
    }
}

fn small_integer(e: f64) -> Option<u32> {
    if e > 0.0 && e.fract() == 0.0 && e <= 64.0 {
        Some(e as u32)
    } else {
        None
    }
}

impl Scalar for Rational {
    fn from_f64(x: f64) -> Option<Self> {
        <Ratio<i64> as FromPrimitive>::from_f64(x)
    }

    fn is_finite_value(self) -> bool {
        true
    }

    fn abs_powf(self, e: f64) -> Option<Self> {
        let a = self.abs();
        if e == 0.0 {
            return Some(Self::from_integer(1));
        }
        if a.is_zero() {
            return (e > 0.0).then_some(a);
        }
        if let Some(k) = small_integer(e) {
            let n = a.numer().checked_pow(k)?;
            let d = a.denom().checked_pow(k)?;
            return Some(Ratio::new(n, d));
        }
        // reciprocal integer exponent: exact k-th root when both parts are perfect powers
        let k = small_integer((1.0 / e).round()).filter(|k| (1.0 / *k as f64) == e)?;
        Some(Ratio::new(exact_root(*a.numer(), k)?, exact_root(*a.denom(), k)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roots_are_exact_or_absent() {
        let nine = Rational::from_integer(9);
        assert_eq!(nine.abs_powf(0.5), Some(Rational::from_integer(3)));
        assert_eq!(Rational::new(4, 9).abs_powf(0.5), Some(Rational::new(2, 3)));
        assert_eq!(Rational::from_integer(2).abs_powf(0.5), None);
        assert_eq!(Rational::from_integer(-3).abs_powf(2.0), Some(Rational::from_integer(9)));
        assert_eq!(Rational::from_integer(8).abs_powf(1.0 / 3.0), Some(Rational::from_integer(2)));
        assert_eq!(Rational::from_integer(2).abs_powf(0.3), None);
    }

    #[test]
    fn sign_of_zero_is_one() {
        assert_eq!(0.0f64.sgn(), 1.0);
        assert_eq!((-2.5f32).sgn(), -1.0);
        assert_eq!(Rational::from_integer(0).sgn(), Rational::from_integer(1));
    }
}
