//! Universal-cover arithmetic for the open annulus `A = S^1 x (0,1)`.
//!
//! The cover is `R x (0,1)` with projection `pi(x, y) = (x mod 1, y)`. A
//! lift `F` of a degree-`d` map satisfies the deck relation
//! `F(x + 1, y) = F(x, y) + (d, 0)`; lifts of the same map differ by the
//! integer translations `F_k = F + (k, 0)`. Iterating a shifted lift obeys
//! `F_k^m(z) = F^m(z) + k (1 - d^m) / (1 - d)` in the first coordinate,
//! which is the identity the tests here pin down.

use crate::coord::Coord;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Default tolerance for the deck-translation (equivariance) check.
pub const EQUIVARIANCE_TOL: f64 = 1e-10;

/// Orbits whose fiber coordinate leaves `[FIBER_MIN, FIBER_MAX]` are treated
/// as having escaped towards an end of the annulus.
pub const FIBER_MIN: f64 = 1e-12;
pub const FIBER_MAX: f64 = 1.0 - 1e-12;

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("|degree| must be at least 2, got {0}")]
    DegreeTooSmall(i64),
    #[error("fiber coordinate {y} left the annulus at iterate {step}")]
    FiberEscape { step: u32, y: f64 },
    #[error("point lies outside the open annulus: y = {0}")]
    OutsideAnnulus(f64),
}

/// Covering degree `d`, with `|d| >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degree(i64);

impl Degree {
    pub fn new(d: i64) -> Result<Self, CoverError> {
        if d.abs() < 2 {
            return Err(CoverError::DegreeTooSmall(d));
        }
        Ok(Degree(d))
    }

    pub fn get(self) -> i64 {
        self.0
    }

    /// `d^n` as `i128`; n is small everywhere in this crate.
    pub fn pow(self, n: u32) -> i128 {
        (self.0 as i128).pow(n)
    }

    /// `d^n - 1`, the signed denominator of rational rotation values.
    pub fn lift_span(self, n: u32) -> i128 {
        self.pow(n) - 1
    }

    /// `|d^n - 1|`, the Nielsen-class modulus at period `n`.
    pub fn class_modulus(self, n: u32) -> i128 {
        self.lift_span(n).abs()
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Angle on the circle stored in turns, normalized to `[0, 1)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CirclePoint {
    theta: Coord,
}

impl CirclePoint {
    pub fn new(theta: Coord) -> Self {
        CirclePoint { theta: theta.mod1() }
    }

    pub fn from_f64(theta: f64) -> Self {
        Self::new(Coord::Float(theta))
    }

    pub fn theta(&self) -> &Coord {
        &self.theta
    }

    pub fn to_f64(&self) -> f64 {
        self.theta.to_f64()
    }

    /// Shorter of the two arcs between `self` and `other`.
    pub fn circle_dist(&self, other: &CirclePoint) -> f64 {
        circle_dist_f64(self.to_f64(), other.to_f64())
    }
}

pub fn circle_dist_f64(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnnulusPoint {
    pub theta: CirclePoint,
    pub y: Coord,
}

impl AnnulusPoint {
    pub fn new(theta: CirclePoint, y: Coord) -> Self {
        AnnulusPoint { theta, y }
    }

    pub fn from_f64(theta: f64, y: f64) -> Self {
        AnnulusPoint {
            theta: CirclePoint::from_f64(theta),
            y: Coord::Float(y),
        }
    }
}

/// Point on the universal cover `R x (0,1)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftPoint {
    pub x: Coord,
    pub y: Coord,
}

impl LiftPoint {
    pub fn new(x: Coord, y: Coord) -> Self {
        LiftPoint { x, y }
    }

    pub fn from_f64(x: f64, y: f64) -> Self {
        LiftPoint {
            x: Coord::Float(x),
            y: Coord::Float(y),
        }
    }

    /// Deck translation `z + (k, 0)`.
    pub fn translate(&self, k: i64) -> LiftPoint {
        LiftPoint {
            x: self.x.add_i64(k),
            y: self.y.clone(),
        }
    }
}

/// Covering projection `pi(x, y) = (x mod 1, y)`.
pub fn project(z: &LiftPoint) -> AnnulusPoint {
    AnnulusPoint {
        theta: CirclePoint::new(z.x.clone()),
        y: z.y.clone(),
    }
}

/// Inverse branch of `pi` on the given sheet: `(theta + sheet, y)`.
pub fn lift_point(p: &AnnulusPoint, sheet: i64) -> LiftPoint {
    LiftPoint {
        x: p.theta.theta().add_i64(sheet),
        y: p.y.clone(),
    }
}

type LiftEval = Arc<dyn Fn(&LiftPoint) -> LiftPoint + Send + Sync>;

/// A lift of a degree-`d` annulus map, together with its integer shift
/// relative to the base lift it was derived from.
///
/// Shifted lifts share the underlying evaluator, so `F_k(z) = F_0(z) + (k, 0)`
/// holds exactly by construction.
#[derive(Clone)]
pub struct LiftedMap {
    degree: Degree,
    shift: i64,
    label: String,
    base_eval: LiftEval,
}

impl LiftedMap {
    pub fn new<F>(degree: Degree, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&LiftPoint) -> LiftPoint + Send + Sync + 'static,
    {
        LiftedMap {
            degree,
            shift: 0,
            label: label.into(),
            base_eval: Arc::new(eval),
        }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, z: &LiftPoint) -> LiftPoint {
        let w = (self.base_eval)(z);
        if self.shift == 0 {
            w
        } else {
            w.translate(self.shift)
        }
    }

    /// One-step deviation from the degree action, `F(z).x - d * z.x`.
    pub fn deviation(&self, z: &LiftPoint) -> f64 {
        self.eval(z).x.to_f64() - self.degree.get() as f64 * z.x.to_f64()
    }

    /// Max equivariance defect `|F(z + 1).x - F(z).x - d|` over random points.
    pub fn equivariance_defect(&self, samples: u32, seed: u64) -> f64 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let z = LiftPoint::from_f64(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..0.95));
            let a = self.eval(&z.translate(1));
            let b = self.eval(&z);
            let dx = (a.x.to_f64() - b.x.to_f64() - self.degree.get() as f64).abs();
            let dy = (a.y.to_f64() - b.y.to_f64()).abs();
            worst = worst.max(dx).max(dy);
        }
        worst
    }
}

impl fmt::Debug for LiftedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LiftedMap")
            .field("degree", &self.degree)
            .field("shift", &self.shift)
            .field("label", &self.label)
            .finish()
    }
}

/// The lift `F_k = F + (k, 0)`.
pub fn shifted_lift(map: &LiftedMap, k: i64) -> LiftedMap {
    let mut out = map.clone();
    out.shift += k;
    out
}

/// `F^m(z)` by composition, watching the fiber coordinate.
pub fn iterate_lift(map: &LiftedMap, z: &LiftPoint, m: u32) -> Result<LiftPoint, CoverError> {
    let y0 = z.y.to_f64();
    if !(0.0..=1.0).contains(&y0) || y0 <= 0.0 || y0 >= 1.0 {
        return Err(CoverError::OutsideAnnulus(y0));
    }
    let mut w = z.clone();
    for step in 1..=m {
        w = map.eval(&w);
        let y = w.y.to_f64();
        if !(FIBER_MIN..=FIBER_MAX).contains(&y) {
            return Err(CoverError::FiberEscape { step, y });
        }
    }
    Ok(w)
}

/// Closed form `k (1 - d^m) / (1 - d)` for the drift a shift `k` accumulates
/// over `m` iterates.
pub fn shift_drift(degree: Degree, k: i64, m: u32) -> f64 {
    let d = degree.get() as f64;
    k as f64 * (1.0 - d.powi(m as i32)) / (1.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn doubling() -> LiftedMap {
        LiftedMap::new(Degree::new(2).unwrap(), "doubling", |z| {
            LiftPoint::new(z.x.mul_i64(2), z.y.clone())
        })
    }

    #[test]
    fn project_reduces_mod_one() {
        let p = project(&LiftPoint::from_f64(2.25, 0.5));
        assert_eq!(p.theta.to_f64(), 0.25);
        assert_eq!(p.y.to_f64(), 0.5);

        let p = project(&LiftPoint::from_f64(-0.5, 0.3));
        assert_eq!(p.theta.to_f64(), 0.5);

        let p = project(&LiftPoint::from_f64(3.0, 0.9));
        assert_eq!(p.theta.to_f64(), 0.0);
    }

    #[test]
    fn lift_point_inverts_projection() {
        let p = AnnulusPoint::from_f64(0.25, 0.5);
        let z = lift_point(&p, 2);
        assert_eq!(z.x.to_f64(), 2.25);

        let z = lift_point(&AnnulusPoint::from_f64(0.0, 0.1), 0);
        assert_eq!(z.x.to_f64(), 0.0);

        let z = lift_point(&AnnulusPoint::from_f64(0.75, 0.4), -1);
        assert_eq!(z.x.to_f64(), -0.25);
    }

    proptest! {
        #[test]
        fn project_lift_roundtrip(theta in 0.0f64..1.0, y in 0.001f64..0.999, sheet in -5i64..5) {
            // bit-exact when theta + sheet is representable, which it is at
            // these magnitudes
            let p = AnnulusPoint::from_f64(theta, y);
            let z = lift_point(&p, sheet);
            let q = project(&z);
            prop_assert_eq!(q.theta.to_f64(), p.theta.to_f64());
            prop_assert_eq!(z.x.floor_i64(), sheet + theta.floor() as i64);
        }
    }

    #[test]
    fn shifted_lift_adds_deck_translation() {
        let f = doubling();
        let f1 = shifted_lift(&f, 1);
        let z = LiftPoint::from_f64(0.0, 0.5);
        assert_eq!(f1.eval(&z).x.to_f64(), 1.0);
        assert_eq!(f1.shift(), 1);

        let f0 = shifted_lift(&f, 0);
        assert_eq!(f0.eval(&z).x.to_f64(), f.eval(&z).x.to_f64());
    }

    #[test]
    fn shifted_iterate_matches_geometric_sum() {
        // third iterate of F_1 for F(x) = 2x at x = 0 lands on 1 + 2 + 4
        let f1 = shifted_lift(&doubling(), 1);
        let z = LiftPoint::from_f64(0.0, 0.5);
        let w = iterate_lift(&f1, &z, 3).unwrap();
        assert_eq!(w.x.to_f64(), 7.0);

        // fourth iterate of F_2: 2 * (2^4 - 1) / (2 - 1) = 30
        let f2 = shifted_lift(&doubling(), 2);
        let w = iterate_lift(&f2, &z, 4).unwrap();
        assert_eq!(w.x.to_f64(), 30.0);
        assert_abs_diff_eq!(
            w.x.to_f64(),
            shift_drift(Degree::new(2).unwrap(), 2, 4),
            epsilon = 1e-12
        );
    }

    #[test]
    fn iterate_doubles_angle() {
        let f = doubling();
        let z = LiftPoint::from_f64(0.1, 0.5);
        let w = iterate_lift(&f, &z, 3).unwrap();
        assert_abs_diff_eq!(w.x.to_f64(), 0.8, epsilon = 1e-15);

        let w1 = iterate_lift(&f, &z, 1).unwrap();
        assert_eq!(w1.x.to_f64(), f.eval(&z).x.to_f64());
    }

    #[test]
    fn iterate_is_additive() {
        let f = shifted_lift(&doubling(), 1);
        let z = LiftPoint::from_f64(0.37, 0.42);
        let whole = iterate_lift(&f, &z, 5).unwrap();
        let first = iterate_lift(&f, &z, 2).unwrap();
        let rest = iterate_lift(&f, &first, 3).unwrap();
        let scale = whole.x.to_f64().abs().max(1.0);
        assert!((whole.x.to_f64() - rest.x.to_f64()).abs() <= 1e-9 * scale);
    }

    #[test]
    fn fiber_escape_is_reported() {
        let f = LiftedMap::new(Degree::new(2).unwrap(), "escaping", |z| {
            LiftPoint::new(z.x.mul_i64(2), Coord::Float(z.y.to_f64() * 2.0))
        });
        let z = LiftPoint::from_f64(0.0, 0.4);
        let err = iterate_lift(&f, &z, 5).unwrap_err();
        match err {
            CoverError::FiberEscape { step, .. } => assert_eq!(step, 2),
            other => panic!("expected FiberEscape, got {other:?}"),
        }
    }

    #[test]
    fn exact_iteration_stays_rational() {
        let f = doubling();
        let z = LiftPoint::new(Coord::ratio(1, 3), Coord::float(0.5));
        let w = iterate_lift(&f, &z, 2).unwrap();
        let (k, res) = w.x.sub(&z.x).nearest_integer();
        assert_eq!(k, 1);
        assert_eq!(res, 0.0);
    }

    #[test]
    fn degree_rejects_small_values() {
        assert!(Degree::new(1).is_err());
        assert!(Degree::new(0).is_err());
        assert!(Degree::new(-1).is_err());
        assert!(Degree::new(-2).is_ok());
    }
}
