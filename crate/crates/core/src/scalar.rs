//! Scalar abstraction shared by score tables, estimators and metrics.
//!
//! Everything numeric in the crate is written against [`Scalar`], so the
//! same code runs on `f32`, `f64` or exact rationals. The rational backends
//! are what the brute-force oracles use when a test needs equality rather
//! than a tolerance. `Ratio<i64>` is fast but its denominators overflow once
//! squared losses over a few dozen positions are summed; `BigRational` has
//! no such limit.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Numeric type usable for scores, losses and normalized metrics.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// `num / den`, rounded to the nearest representable value for floats.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Best approximation of a float. `None` for NaN or infinities.
    fn from_f64_approx(value: f64) -> Option<Self>;

    fn to_f64_lossy(&self) -> f64;

    /// Largest integer not greater than `self`, saturating at the `i64` range.
    fn floor_i64(&self) -> i64;

    /// Smallest integer not less than `self`, saturating at the `i64` range.
    fn ceil_i64(&self) -> i64;

    fn is_finite_value(&self) -> bool;
}

macro_rules! impl_float_scalar {
    ($($ty:ty),*) => {$(
        impl Scalar for $ty {
            #[inline]
            fn from_ratio(num: i64, den: i64) -> Self {
                (num as f64 / den as f64) as $ty
            }

            fn from_f64_approx(value: f64) -> Option<Self> {
                let v = value as $ty;
                v.is_finite().then_some(v)
            }

            #[inline]
            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }

            #[inline]
            fn floor_i64(&self) -> i64 {
                self.floor() as i64
            }

            #[inline]
            fn ceil_i64(&self) -> i64 {
                self.ceil() as i64
            }

            #[inline]
            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }
        }
    )*};
}

impl_float_scalar!(f32, f64);

impl Scalar for Ratio<i64> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn from_f64_approx(value: f64) -> Option<Self> {
        if !value.is_finite() {
            return None;
        }
        <Ratio<i64> as FromPrimitive>::from_f64(value)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn floor_i64(&self) -> i64 {
        self.floor().to_integer()
    }

    fn ceil_i64(&self) -> i64 {
        self.ceil().to_integer()
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

fn saturate(value: &BigInt) -> i64 {
    value.to_i64().unwrap_or(if value.is_negative() {
        i64::MIN
    } else {
        i64::MAX
    })
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }

    fn from_f64_approx(value: f64) -> Option<Self> {
        BigRational::from_float(value)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn floor_i64(&self) -> i64 {
        saturate(&self.floor().to_integer())
    }

    fn ceil_i64(&self) -> i64 {
        saturate(&self.ceil().to_integer())
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}
