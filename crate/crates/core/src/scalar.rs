//! Scalar abstraction shared by the exact and the floating-point code paths.
//!
//! Everything that has to decide a sign (orientations, kernels, ranks) is
//! written against [`Scalar`], so the same routine runs over exact rationals
//! in production and over `f64` when a cheap cross-check is wanted.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// A field element usable by the generic linear algebra.
pub trait Scalar: Clone + fmt::Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// Whether elimination should treat this value as zero.
    ///
    /// Exact types answer `is_zero()`; floating-point types use an absolute
    /// threshold tuned to their precision.
    fn is_negligible(&self) -> bool;

    /// Exact for rationals, rounded for floats.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64_lossy(&self) -> f64;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }
}

macro_rules! impl_float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            fn is_negligible(&self) -> bool {
                self.abs() <= $tol
            }

            fn from_ratio(num: i64, den: i64) -> Self {
                (num as f64 / den as f64) as $t
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }
    };
}

impl_float_scalar!(f32, 1e-4);
impl_float_scalar!(f64, 1e-10);

impl Scalar for Ratio<i64> {
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigRational {
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}
