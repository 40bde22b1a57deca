//! Coefficient scalars for cyclotomic numbers and q-series.
//!
//! Everything above this module is generic over [`Scalar`]. Exact work uses
//! [`BigRational`]; the fixed-width rationals and floats are there for quick
//! approximate screening and for cross-checking the generic code paths.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Num;

use crate::hpreal::HpReal;

/// A field element usable as a coefficient.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Whether `==` is exact field equality (false for floats).
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn to_hp(&self, bits: u32) -> HpReal;

    fn to_f64(&self) -> f64;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_hp(&self, bits: u32) -> HpReal {
        HpReal::from_rational(self, bits)
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

macro_rules! fixed_ratio_scalar {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            const EXACT: bool = true;

            fn from_i64(v: i64) -> Self {
                Ratio::from_integer(v as $int)
            }

            fn to_hp(&self, bits: u32) -> HpReal {
                let r = BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()));
                HpReal::from_rational(&r, bits)
            }

            fn to_f64(&self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }
        }
    };
}

fixed_ratio_scalar!(i64);
fixed_ratio_scalar!(i128);

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_hp(&self, bits: u32) -> HpReal {
        HpReal::from_f64(*self, bits)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f32
    }

    fn to_hp(&self, bits: u32) -> HpReal {
        HpReal::from_f64(*self as f64, bits)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}
