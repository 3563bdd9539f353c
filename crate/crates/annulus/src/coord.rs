//! Dual-representation scalar: plain `f64` by default, exact `BigRational`
//! on demand.
//!
//! Counting identities in this crate are exact and their oracles run on
//! rationals; everything grid- or bisection-shaped runs on floats. Mixed
//! arithmetic demotes to float, so exactness survives only along pure
//! rational paths (the model lift, shifted lifts, translation snapping).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Clone, Debug)]
pub enum Coord {
    Float(f64),
    Exact(BigRational),
}

impl Coord {
    pub fn float(v: f64) -> Self {
        Coord::Float(v)
    }

    /// Exact rational `num/den`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Coord::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn integer(v: i64) -> Self {
        Coord::Exact(BigRational::from(BigInt::from(v)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coord::Float(v) => *v,
            Coord::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coord::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Coord::Exact(r) => Some(r),
            Coord::Float(_) => None,
        }
    }

    /// Reduction mod 1 into `[0, 1)`.
    pub fn mod1(&self) -> Coord {
        match self {
            Coord::Float(v) => {
                let mut r = v.rem_euclid(1.0);
                // rem_euclid of a tiny negative can round up to exactly 1.0
                if r >= 1.0 {
                    r -= 1.0;
                }
                Coord::Float(r)
            }
            Coord::Exact(r) => Coord::Exact(r - r.floor()),
        }
    }

    pub fn floor_i64(&self) -> i64 {
        match self {
            Coord::Float(v) => v.floor() as i64,
            Coord::Exact(r) => r.floor().to_integer().to_i64().expect("floor overflow"),
        }
    }

    pub fn add(&self, other: &Coord) -> Coord {
        match (self, other) {
            (Coord::Exact(a), Coord::Exact(b)) => Coord::Exact(a + b),
            _ => Coord::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Coord) -> Coord {
        match (self, other) {
            (Coord::Exact(a), Coord::Exact(b)) => Coord::Exact(a - b),
            _ => Coord::Float(self.to_f64() - other.to_f64()),
        }
    }

    pub fn add_i64(&self, k: i64) -> Coord {
        match self {
            Coord::Float(v) => Coord::Float(v + k as f64),
            Coord::Exact(r) => Coord::Exact(r + BigRational::from(BigInt::from(k))),
        }
    }

    pub fn mul_i64(&self, k: i64) -> Coord {
        match self {
            Coord::Float(v) => Coord::Float(v * k as f64),
            Coord::Exact(r) => Coord::Exact(r * BigRational::from(BigInt::from(k))),
        }
    }

    /// Exact equality where both sides are exact, float equality otherwise.
    pub fn same_value(&self, other: &Coord) -> bool {
        match (self, other) {
            (Coord::Exact(a), Coord::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }

    /// Distance to the nearest integer, together with that integer.
    pub fn nearest_integer(&self) -> (i64, f64) {
        match self {
            Coord::Float(v) => {
                let k = v.round();
                (k as i64, (v - k).abs())
            }
            Coord::Exact(r) => {
                let k = (r + BigRational::new(BigInt::from(1), BigInt::from(2))).floor();
                let k = k.to_integer().to_i64().expect("translation overflow");
                let diff = r - BigRational::from(BigInt::from(k));
                (k, diff.abs().to_f64().unwrap_or(f64::NAN))
            }
        }
    }
}

impl From<f64> for Coord {
    fn from(v: f64) -> Self {
        Coord::Float(v)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Float(v) => write!(f, "{v}"),
            Coord::Exact(r) => {
                if r.denom().is_zero() {
                    write!(f, "invalid")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(Coord::Float(f64::deserialize(deserializer)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod1_reduces_negatives() {
        assert_eq!(Coord::float(-0.5).mod1().to_f64(), 0.5);
        assert_eq!(Coord::float(2.25).mod1().to_f64(), 0.25);
        assert_eq!(Coord::float(3.0).mod1().to_f64(), 0.0);
        let r = Coord::ratio(-7, 3).mod1();
        assert_eq!(r.as_exact().unwrap(), &BigRational::new(2.into(), 3.into()));
    }

    #[test]
    fn mod1_handles_tiny_negative_floats() {
        let r = Coord::float(-1e-18).mod1().to_f64();
        assert!((0.0..1.0).contains(&r));
    }

    #[test]
    fn exact_arithmetic_stays_exact() {
        let third = Coord::ratio(1, 3);
        let x = third.mul_i64(4).sub(&third);
        assert_eq!(x.as_exact().unwrap(), &BigRational::from(BigInt::from(1)));
        let (k, res) = x.nearest_integer();
        assert_eq!(k, 1);
        assert_eq!(res, 0.0);
    }

    #[test]
    fn mixed_arithmetic_demotes_to_float() {
        let x = Coord::ratio(1, 3).add(&Coord::float(0.5));
        assert!(!x.is_exact());
        assert!((x.to_f64() - (1.0 / 3.0 + 0.5)).abs() < 1e-15);
    }
}
