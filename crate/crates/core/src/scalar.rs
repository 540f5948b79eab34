//! Scalars the size and entropy formulas are evaluated over.
//!
//! Floats give the usual approximate answers; `Ratio<i64>` gives exact ones
//! wherever the result is representable (logs of powers of two, integer
//! powers of two) and refuses otherwise.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Float, Num, One, Signed, Zero};

pub trait Scalar: Clone + PartialOrd + Num + Signed + Debug + Display {
    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Base-2 logarithm; `None` for non-positive input or when the result
    /// is not representable in `Self`.
    fn log2_checked(&self) -> Option<Self>;

    /// `2^self`; `None` when not representable.
    fn exp2_checked(&self) -> Option<Self>;

    fn to_f64(&self) -> f64;
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_ratio(numer: i64, denom: i64) -> Self {
                numer as $t / denom as $t
            }

            fn log2_checked(&self) -> Option<Self> {
                (*self > 0.0).then(|| Float::log2(*self))
            }

            fn exp2_checked(&self) -> Option<Self> {
                Some(Float::exp2(*self)).filter(|v| v.is_finite())
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

fn power_of_two_exponent(v: i64) -> Option<i64> {
    (v > 0 && v & (v - 1) == 0).then(|| i64::from(v.trailing_zeros()))
}

impl Scalar for Ratio<i64> {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }

    fn log2_checked(&self) -> Option<Self> {
        if *self <= Ratio::zero() {
            return None;
        }
        let up = power_of_two_exponent(*self.numer())?;
        let down = power_of_two_exponent(*self.denom())?;
        Some(Ratio::from_integer(up - down))
    }

    fn exp2_checked(&self) -> Option<Self> {
        if !self.is_integer() {
            return None;
        }
        let k = self.to_integer();
        if k.abs() > 62 {
            return None;
        }
        let p = Ratio::from_integer(1i64 << k.abs());
        Some(if k >= 0 { p } else { Ratio::one() / p })
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_logs() {
        let r = |n, d| Ratio::<i64>::new(n, d);
        assert_eq!(r(8, 1).log2_checked(), Some(r(3, 1)));
        assert_eq!(r(1, 2).log2_checked(), Some(r(-1, 1)));
        assert_eq!(r(3, 1).log2_checked(), None);
        assert_eq!(r(0, 1).log2_checked(), None);
        assert_eq!(r(-2, 1).exp2_checked(), Some(r(1, 4)));
        assert_eq!(r(1, 2).exp2_checked(), None);
    }

    #[test]
    fn float_logs() {
        assert_eq!(8.0f64.log2_checked(), Some(3.0));
        assert_eq!(0.0f32.log2_checked(), None);
        assert_eq!((-1.0f64).exp2_checked(), Some(0.5));
    }
}
