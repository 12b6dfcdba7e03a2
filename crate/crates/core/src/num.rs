//! Scalar abstraction for the numeric kernels.
//!
//! Domain data is stored as `f64`; the kernels that turn that data into
//! transition times, descriptors and metric values are written against
//! [`Scalar`] so they can also be run in exact rational arithmetic.

use num_rational::Rational64;
use num_traits::{Num, Signed, ToPrimitive};
use std::fmt::Debug;

pub trait Scalar: Num + Signed + Copy + PartialOrd + Debug + Send + Sync + 'static {
    fn from_int(v: i64) -> Self;
    /// Lossy for rationals whose value has no short continued fraction.
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn floor(self) -> Self;
    fn ceil(self) -> Self;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn floor_i64(self) -> i64 {
        self.floor().to_f64() as i64
    }

    fn ceil_i64(self) -> i64 {
        self.ceil().to_f64() as i64
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_int(v: i64) -> Self {
                v as $t
            }
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn floor(self) -> Self {
                <$t>::floor(self)
            }
            fn ceil(self) -> Self {
                <$t>::ceil(self)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for Rational64 {
    fn from_int(v: i64) -> Self {
        Rational64::from_integer(v)
    }
    fn from_f64(v: f64) -> Self {
        Rational64::approximate_float(v).unwrap_or_else(|| Rational64::from_integer(v as i64))
    }
    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
    fn floor(self) -> Self {
        Rational64::floor(&self)
    }
    fn ceil(self) -> Self {
        Rational64::ceil(&self)
    }
    fn floor_i64(self) -> i64 {
        Rational64::floor(&self).to_integer()
    }
    fn ceil_i64(self) -> i64 {
        Rational64::ceil(&self).to_integer()
    }
}
