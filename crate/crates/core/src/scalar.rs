//! Numeric backends for probability computations.
//!
//! Every algorithm in this crate is generic over [`Scalar`]. Two backends are
//! provided: `f64` for everyday use and [`Exact`] (arbitrary-precision
//! rationals) for gold-standard checks on small instances.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary-precision rational probability.
pub type Exact = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// `true` for backends without rounding error.
    const IS_EXACT: bool;

    fn from_u64(v: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Text form used in CSV output: shortest round-trip decimal for
    /// floats, `num/den` for rationals.
    fn to_text(&self) -> String;

    /// `num / den`, computed in the backend's own arithmetic.
    fn ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num) / Self::from_u64(den)
    }
}

impl Scalar for f64 {
    const IS_EXACT: bool = false;

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for BigRational {
    const IS_EXACT: bool = true;

    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_text(&self) -> String {
        self.to_string()
    }
}
