//! Exact numbers with denominator 1 or 2.

use std::fmt;
use std::ops::{Add, Mul, Neg};

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// A rational number whose denominator divides 2, stored as twice its value.
///
/// Serialized as a plain JSON number (`1`, `-0.5`). Every such value is exactly
/// representable as an `f64`, so the text form is lossless.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(i32);

impl Half {
    pub const ZERO: Half = Half(0);
    pub const ONE: Half = Half(2);

    pub const fn from_int(n: i32) -> Self {
        Half(2 * n)
    }

    /// `n / 2`.
    pub const fn halves(n: i32) -> Self {
        Half(n)
    }

    pub const fn doubled(self) -> i32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Product of two values, or `None` if the result needs a denominator of 4.
    pub fn checked_mul(self, rhs: Half) -> Option<Half> {
        let q = self.0 * rhs.0;
        (q % 2 == 0).then_some(Half(q / 2))
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn from_f64(x: f64) -> Option<Self> {
        let d = x * 2.0;
        (d.is_finite() && d.fract() == 0.0 && d.abs() <= f64::from(i32::MAX)).then_some(Half(d as i32))
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

/// Panics if the product is not a half-integer; use [`Half::checked_mul`] when
/// that can happen.
impl Mul for Half {
    type Output = Half;
    fn mul(self, rhs: Half) -> Half {
        self.checked_mul(rhs).expect("product leaves the half-integers")
    }
}

impl From<i32> for Half {
    fn from(n: i32) -> Self {
        Half::from_int(n)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            let sign = if self.0 < 0 { "-" } else { "" };
            write!(f, "{sign}{}.5", self.0.abs() / 2)
        }
    }
}

impl Serialize for Half {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_integer() {
            serializer.serialize_i64(i64::from(self.0 / 2))
        } else {
            serializer.serialize_f64(self.to_f64())
        }
    }
}

impl<'de> Deserialize<'de> for Half {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let x = f64::deserialize(deserializer)?;
        Half::from_f64(x).ok_or_else(|| de::Error::custom(format!("{x} is not a multiple of 1/2")))
    }
}
