//! The map gallery: the model covering `m_d`, skew products over it, the
//! Denjoy-based constructions, an expanding-Cantor-set example, a
//! degree(-2) covering with a missing Nielsen class, the interval map
//! `z^2 - 2` demo, and a rationally-independent translation family.
//!
//! Every circle covering stores its lift in reduced form `G(x) =
//! G0(frac x) + d * floor(x)`, so the deck relation `G(x+1) = G(x) + d`
//! holds exactly and equivariance defects are zero by construction.

pub mod denjoy;
pub mod planar;
pub mod referee;

use crate::coord::Coord;
use crate::cover::{AnnulusPoint, CirclePoint, CoverError, Degree, LiftPoint, LiftedMap};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapsError {
    #[error("unknown gallery map '{0}'")]
    UnknownName(String),
    #[error("invalid gallery parameters: {0}")]
    InvalidParams(String),
    #[error("lift of '{label}' is not strictly monotone near x = {x}")]
    Monotonicity { label: String, x: f64 },
    #[error("lift of '{label}' rises by {observed} over one period, expected {expected}")]
    DisplacementMismatch {
        label: String,
        observed: f64,
        expected: f64,
    },
    #[error("inserted interval budget {0} exceeds the circle length")]
    BudgetError(f64),
    #[error("translation table capped at period 8, requested {0}")]
    CapacityError(u32),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

type CoordFn = Arc<dyn Fn(&Coord) -> Coord + Send + Sync>;
type FiberFn = Arc<dyn Fn(&CirclePoint, f64) -> f64 + Send + Sync>;

/// A covering map of the circle given by its lift on one fundamental
/// domain. The full lift is reconstructed from the deck relation.
#[derive(Clone)]
pub struct CircleCoveringMap {
    degree: Degree,
    label: String,
    lift0: CoordFn,
}

impl CircleCoveringMap {
    pub fn new<F>(degree: Degree, label: impl Into<String>, lift0: F) -> Self
    where
        F: Fn(&Coord) -> Coord + Send + Sync + 'static,
    {
        CircleCoveringMap {
            degree,
            label: label.into(),
            lift0: Arc::new(lift0),
        }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The lift `G(x)`, exact when the fundamental-domain lift is exact.
    pub fn lift_eval(&self, x: &Coord) -> Coord {
        let frac = x.mod1();
        let sheets = x.floor_i64();
        (self.lift0)(&frac).add_i64(self.degree.get() * sheets)
    }

    pub fn lift_f64(&self, x: f64) -> f64 {
        self.lift_eval(&Coord::Float(x)).to_f64()
    }

    /// `G^n(x)` in floats.
    pub fn lift_iter_f64(&self, x: f64, n: u32) -> f64 {
        let mut v = x;
        for _ in 0..n {
            v = self.lift_f64(v);
        }
        v
    }

    pub fn eval_circle(&self, t: &CirclePoint) -> CirclePoint {
        CirclePoint::new((self.lift0)(t.theta()))
    }

    /// Strict monotonicity and total displacement, sampled on a grid.
    pub fn validate(&self, samples: u32) -> Result<(), MapsError> {
        let d = self.degree.get() as f64;
        let rise = self.lift_f64(1.0) - self.lift_f64(0.0);
        if (rise - d).abs() > 1e-10 {
            return Err(MapsError::DisplacementMismatch {
                label: self.label.clone(),
                observed: rise,
                expected: d,
            });
        }
        let mut prev = self.lift_f64(0.0);
        for i in 1..=samples {
            let x = i as f64 / samples as f64;
            let v = self.lift_f64(x);
            let ok = if d > 0.0 { v > prev } else { v < prev };
            if !ok {
                return Err(MapsError::Monotonicity {
                    label: self.label.clone(),
                    x,
                });
            }
            prev = v;
        }
        Ok(())
    }

    /// View the circle map as an annulus lift with identity fiber.
    pub fn as_lifted(&self) -> LiftedMap {
        let this = self.clone();
        LiftedMap::new(self.degree, self.label.clone(), move |z| {
            LiftPoint::new(this.lift_eval(&z.x), z.y.clone())
        })
    }
}

impl std::fmt::Debug for CircleCoveringMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircleCoveringMap")
            .field("degree", &self.degree)
            .field("label", &self.label)
            .finish()
    }
}

/// Skew product `f(theta, y) = (g(theta), phi(theta, y))` over a circle
/// covering. Gallery fibers are strictly increasing in `y`, which the
/// search module relies on for its no-root certificates.
#[derive(Clone)]
pub struct SkewProduct {
    pub base: CircleCoveringMap,
    fiber: FiberFn,
    label: String,
    fiber_monotone: bool,
}

impl SkewProduct {
    pub fn new<F>(
        base: CircleCoveringMap,
        label: impl Into<String>,
        fiber_monotone: bool,
        fiber: F,
    ) -> Self
    where
        F: Fn(&CirclePoint, f64) -> f64 + Send + Sync + 'static,
    {
        SkewProduct {
            base,
            fiber: Arc::new(fiber),
            label: label.into(),
            fiber_monotone,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degree(&self) -> Degree {
        self.base.degree()
    }

    pub fn fiber_monotone(&self) -> bool {
        self.fiber_monotone
    }

    pub fn fiber_eval(&self, theta: &CirclePoint, y: f64) -> f64 {
        (self.fiber)(theta, y)
    }

    pub fn eval(&self, p: &AnnulusPoint) -> AnnulusPoint {
        AnnulusPoint::new(
            self.base.eval_circle(&p.theta),
            Coord::Float((self.fiber)(&p.theta, p.y.to_f64())),
        )
    }

    pub fn to_lifted(&self) -> LiftedMap {
        let base = self.base.clone();
        let fiber = self.fiber.clone();
        LiftedMap::new(self.degree(), self.label.clone(), move |z| {
            let x2 = base.lift_eval(&z.x);
            let theta = CirclePoint::new(z.x.clone());
            let y2 = (fiber)(&theta, z.y.to_f64());
            LiftPoint::new(x2, Coord::Float(y2))
        })
    }

    /// Sanity probe: the fiber stays in (0,1) and is monotone when declared
    /// so, on a coarse grid.
    pub fn validate(&self, theta_samples: u32, y_samples: u32) -> Result<(), MapsError> {
        for i in 0..theta_samples {
            let theta = CirclePoint::from_f64(i as f64 / theta_samples as f64);
            let mut prev = None;
            for j in 1..y_samples {
                let y = j as f64 / y_samples as f64;
                let v = (self.fiber)(&theta, y);
                if !(0.0 < v && v < 1.0) {
                    return Err(MapsError::InvalidParams(format!(
                        "fiber of '{}' leaves (0,1) at theta={}, y={y}: {v}",
                        self.label,
                        theta.to_f64()
                    )));
                }
                if self.fiber_monotone {
                    if let Some(p) = prev {
                        if v <= p {
                            return Err(MapsError::Monotonicity {
                                label: format!("{} fiber at theta={}", self.label, theta.to_f64()),
                                x: y,
                            });
                        }
                    }
                }
                prev = Some(v);
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for SkewProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SkewProduct")
            .field("base", &self.base)
            .field("label", &self.label)
            .finish()
    }
}

/// A declared invariant set: a finite sampling plus its advertised flags.
#[derive(Clone, Debug)]
pub struct DeclaredSet {
    pub label: String,
    pub samples: Vec<AnnulusPoint>,
    pub essential: bool,
    pub totally_invariant: bool,
}

#[derive(Clone, Debug)]
pub enum MapKind {
    Circle(CircleCoveringMap),
    Skew(SkewProduct),
    Planar(planar::PlanarDemo),
}

/// A gallery entry: a concrete map plus declared metadata the tests and the
/// CLI verify against.
#[derive(Clone, Debug)]
pub struct MapDescriptor {
    pub name: String,
    pub kind: MapKind,
    pub invariant_sets: Vec<DeclaredSet>,
    pub known_periodic: Vec<(AnnulusPoint, u32)>,
    pub periodic_free: bool,
    pub notes: String,
    pub denjoy: Option<Arc<denjoy::DenjoyData>>,
}

impl MapDescriptor {
    pub fn degree(&self) -> Degree {
        match &self.kind {
            MapKind::Circle(c) => c.degree(),
            MapKind::Skew(s) => s.degree(),
            MapKind::Planar(p) => p.angle_doubling.degree(),
        }
    }

    pub fn skew(&self) -> Option<&SkewProduct> {
        match &self.kind {
            MapKind::Skew(s) => Some(s),
            _ => None,
        }
    }

    pub fn base(&self) -> Option<&CircleCoveringMap> {
        match &self.kind {
            MapKind::Circle(c) => Some(c),
            MapKind::Skew(s) => Some(&s.base),
            MapKind::Planar(_) => None,
        }
    }

    /// Base lift of the descriptor as an annulus lift (identity fiber for
    /// circle maps). `None` for planar demos.
    pub fn lifted(&self) -> Option<LiftedMap> {
        match &self.kind {
            MapKind::Circle(c) => Some(c.as_lifted()),
            MapKind::Skew(s) => Some(s.to_lifted()),
            MapKind::Planar(_) => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            MapKind::Circle(_) => "circle",
            MapKind::Skew(_) => "skew",
            MapKind::Planar(_) => "planar",
        }
    }

    pub fn find_set(&self, label: &str) -> Option<&DeclaredSet> {
        self.invariant_sets.iter().find(|s| s.label == label)
    }

    /// JSON summary; sample lists are truncated to `sample_cap` points.
    pub fn to_json(&self, sample_cap: usize) -> serde_json::Value {
        let sets: Vec<_> = self
            .invariant_sets
            .iter()
            .map(|s| {
                let pts: Vec<_> = s
                    .samples
                    .iter()
                    .take(sample_cap)
                    .map(|p| serde_json::json!([p.theta.to_f64(), p.y.to_f64()]))
                    .collect();
                serde_json::json!({
                    "label": s.label,
                    "essential": s.essential,
                    "totally_invariant": s.totally_invariant,
                    "sample_count": s.samples.len(),
                    "samples": pts,
                })
            })
            .collect();
        let known: Vec<_> = self
            .known_periodic
            .iter()
            .map(|(p, n)| serde_json::json!({"theta": p.theta.to_f64(), "y": p.y.to_f64(), "period": n}))
            .collect();
        serde_json::json!({
            "name": self.name,
            "kind": self.kind_name(),
            "degree": self.degree().get(),
            "periodic_free": self.periodic_free,
            "notes": self.notes,
            "invariant_sets": sets,
            "known_periodic": known,
        })
    }
}

/// Parameters accepted by [`gallery`]. Unknown keys are rejected when these
/// arrive from config files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GalleryParams {
    /// Covering degree for the model map.
    pub degree: i64,
    /// Fiber family for the model map: "attract" or "bands".
    pub fiber: String,
    /// Rational rotation approximant used by the Denjoy construction.
    pub convergent: (u64, u64),
    /// Total inserted interval length for the Denjoy construction.
    pub budget: f64,
    /// Relative width of the sub-interval the doubling wraps around the circle.
    pub inner_fraction: f64,
    /// Horizon of the exact translation table.
    pub max_period: u32,
}

impl Default for GalleryParams {
    fn default() -> Self {
        GalleryParams {
            degree: 2,
            fiber: "attract".to_string(),
            convergent: (6765, 10946),
            budget: 1.0,
            inner_fraction: 1.0 / 3.0,
            max_period: 6,
        }
    }
}

pub fn gallery_names() -> &'static [&'static str] {
    &[
        "model",
        "e2_ray_ns",
        "e3_two_rays",
        "e4_denjoy",
        "e5_cantor",
        "chebyshev",
        "referee",
        "incomplete_deg_minus2",
        "punctured_disc",
    ]
}

/// The model circle covering with lift `G(x) = d x`; exact on rationals.
pub fn model_map(d: Degree) -> CircleCoveringMap {
    let k = d.get();
    CircleCoveringMap::new(d, format!("model_d{k}"), move |x| x.mul_i64(k))
}

/// Fiber with a single attracting interior fixed level at `y = 1/2`.
pub fn attracting_fiber(y: f64) -> f64 {
    y + 0.3 * y * (1.0 - y) * (0.5 - y)
}

/// Fiber with attracting levels 0.3 and 0.7 separated by a repelling level
/// at 1/2; its invariant band has a bounded complementary gap.
pub fn band_fiber(y: f64) -> f64 {
    y - 0.4 * (y - 0.3) * (y - 0.5) * (y - 0.7)
}

/// Fixed-point-free fiber pushing every orbit towards the upper end.
pub fn escaping_fiber(y: f64) -> f64 {
    y.sqrt()
}

/// Smooth bump, 1 at u = 0 and 0 for |u| >= 1.
fn bump01(u: f64) -> f64 {
    let u = u.abs();
    if u >= 1.0 {
        0.0
    } else {
        let v = 1.0 - u * u;
        v * v
    }
}

fn ray_samples(theta: f64, count: usize) -> Vec<AnnulusPoint> {
    (1..count)
        .map(|i| AnnulusPoint::from_f64(theta, i as f64 / count as f64))
        .collect()
}

fn circle_samples(y: f64, count: usize) -> Vec<AnnulusPoint> {
    (0..count)
        .map(|i| AnnulusPoint::from_f64(i as f64 / count as f64, y))
        .collect()
}

fn model_descriptor(params: &GalleryParams) -> Result<MapDescriptor, MapsError> {
    let d = Degree::new(params.degree)?;
    let base = model_map(d);
    let (skew, sets, known, notes) = match params.fiber.as_str() {
        "attract" => {
            let skew = SkewProduct::new(
                base,
                format!("model_d{}_attract", d.get()),
                true,
                |_t, y| attracting_fiber(y),
            );
            let sets = vec![DeclaredSet {
                label: "core_circle".into(),
                samples: circle_samples(0.5, 2000),
                essential: true,
                totally_invariant: true,
            }];
            let mut known = vec![(AnnulusPoint::from_f64(0.0, 0.5), 1)];
            if d.get() == 2 {
                known.push((AnnulusPoint::from_f64(1.0 / 3.0, 0.5), 2));
                known.push((AnnulusPoint::from_f64(2.0 / 3.0, 0.5), 2));
            }
            let notes = "model base with fiber y + 0.3 y (1-y) (1/2 - y); the circle y = 1/2 \
                         is an essential totally invariant attractor and every base periodic \
                         orbit carries exactly one annulus orbit"
                .to_string();
            (skew, sets, known, notes)
        }
        "bands" => {
            let skew = SkewProduct::new(
                base,
                format!("model_d{}_bands", d.get()),
                true,
                |_t, y| band_fiber(y),
            );
            let band: Vec<AnnulusPoint> = (0..200)
                .flat_map(|i| {
                    let theta = i as f64 / 200.0;
                    (0..=30)
                        .map(move |j| AnnulusPoint::from_f64(theta, 0.3 + 0.005 * j as f64))
                        .chain((0..=30).map(move |j| {
                            AnnulusPoint::from_f64(theta, 0.55 + 0.005 * j as f64)
                        }))
                })
                .collect();
            let sets = vec![DeclaredSet {
                label: "split_band".into(),
                samples: band,
                essential: true,
                totally_invariant: false,
            }];
            let known = vec![
                (AnnulusPoint::from_f64(0.0, 0.3), 1),
                (AnnulusPoint::from_f64(0.0, 0.5), 1),
                (AnnulusPoint::from_f64(0.0, 0.7), 1),
            ];
            let notes = "model base with fiber y - 0.4 (y-0.3)(y-0.5)(y-0.7); the invariant \
                         set is the pair of bands [0.3,0.45] and [0.55,0.7], whose complement \
                         has a bounded middle gap holding the repelling fixed circle y = 1/2"
                .to_string();
            (skew, sets, known, notes)
        }
        other => {
            return Err(MapsError::InvalidParams(format!(
                "unknown model fiber '{other}' (expected 'attract' or 'bands')"
            )))
        }
    };
    skew.validate(32, 64)?;
    Ok(MapDescriptor {
        name: "model".into(),
        kind: MapKind::Skew(skew),
        invariant_sets: sets,
        known_periodic: known,
        periodic_free: false,
        notes,
        denjoy: None,
    })
}

fn e2_descriptor() -> Result<MapDescriptor, MapsError> {
    let base = model_map(Degree::new(2).unwrap());
    let skew = SkewProduct::new(base, "ray_north_south", true, |_t, y| escaping_fiber(y));
    skew.validate(16, 64)?;
    Ok(MapDescriptor {
        name: "e2_ray_ns".into(),
        kind: MapKind::Skew(skew),
        invariant_sets: vec![DeclaredSet {
            label: "ray0".into(),
            samples: ray_samples(0.0, 256),
            essential: false,
            totally_invariant: false,
        }],
        known_periodic: vec![],
        periodic_free: true,
        notes: "doubling base with fiber sqrt(y); the ray theta = 0 is invariant with \
                north-south dynamics towards the upper end, so the map is fixed point \
                free although the rotation value on the ray is 0"
            .into(),
        denjoy: None,
    })
}

fn e3_descriptor() -> Result<MapDescriptor, MapsError> {
    let base = model_map(Degree::new(3).unwrap());
    let skew = SkewProduct::new(base, "two_rays", true, |t, y| {
        let w = bump01(crate::cover::circle_dist_f64(t.to_f64(), 0.5) / 0.2);
        let interior = y + 0.2 * y * (1.0 - y) * (0.5 - y);
        let free = y.powf(0.8);
        (1.0 - w) * interior + w * free
    });
    skew.validate(64, 64)?;
    Ok(MapDescriptor {
        name: "e3_two_rays".into(),
        kind: MapKind::Skew(skew),
        invariant_sets: vec![
            DeclaredSet {
                label: "ray0".into(),
                samples: ray_samples(0.0, 256),
                essential: false,
                totally_invariant: false,
            },
            DeclaredSet {
                label: "ray_half".into(),
                samples: ray_samples(0.5, 256),
                essential: false,
                totally_invariant: false,
            },
        ],
        known_periodic: vec![(AnnulusPoint::from_f64(0.0, 0.5), 1)],
        periodic_free: false,
        notes: "tripling base; the fiber over theta = 0 has an interior fixed level 1/2, \
                the fiber over theta = 1/2 is y^0.8 with no interior fixed point, blended \
                by a bump of half-width 0.2 around theta = 1/2. One lift has a fixed \
                point, the lift fixing the other ray has none"
            .into(),
        denjoy: None,
    })
}

fn punctured_disc_descriptor() -> Result<MapDescriptor, MapsError> {
    let base = model_map(Degree::new(2).unwrap());
    let skew = SkewProduct::new(base, "punctured_disc", true, |_t, y| 2.0 * y / (1.0 + y));
    skew.validate(16, 64)?;
    Ok(MapDescriptor {
        name: "punctured_disc".into(),
        kind: MapKind::Skew(skew),
        invariant_sets: vec![],
        known_periodic: vec![],
        periodic_free: true,
        notes: "the radial doubling of the punctured disc in normalized coordinates: \
                base 2 theta, fiber 2y/(1+y); every orbit drifts towards the upper end \
                and there are no periodic points in the open annulus"
            .into(),
        denjoy: None,
    })
}

/// Piecewise-linear interpolation through strictly monotone knots.
#[derive(Clone, Debug)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert_eq!(xs.len(), ys.len());
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        PiecewiseLinear { xs, ys }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }
}

/// Knot data for the degree(-2) covering with two fixed points and a single
/// 2-cycle. The base fixes 0, 1/3 and 2/3 and swaps 1/18 with 13/14; the
/// extra knots at 1/36 and 27/28 keep the second iterate's displacement from
/// degenerating on the swapped pair.
pub fn incomplete_base() -> CircleCoveringMap {
    let pl = PiecewiseLinear::new(
        vec![
            0.0,
            1.0 / 36.0,
            1.0 / 18.0,
            1.0 / 3.0,
            2.0 / 3.0,
            13.0 / 14.0,
            27.0 / 28.0,
            1.0,
        ],
        vec![
            0.0,
            -0.030,
            -1.0 / 14.0,
            -2.0 / 3.0,
            -4.0 / 3.0,
            -35.0 / 18.0,
            -1.978,
            -2.0,
        ],
    );
    CircleCoveringMap::new(Degree::new(-2).unwrap(), "incomplete_deg_minus2_base", move |x| {
        Coord::Float(pl.eval(x.to_f64()))
    })
}

fn incomplete_descriptor() -> Result<MapDescriptor, MapsError> {
    let base = incomplete_base();
    base.validate(1000)?;
    let skew = SkewProduct::new(base, "incomplete_deg_minus2", true, |t, y| {
        let w = bump01(crate::cover::circle_dist_f64(t.to_f64(), 0.0) / 0.03);
        (1.0 - w) * attracting_fiber(y) + w * escaping_fiber(y)
    });
    skew.validate(64, 64)?;
    Ok(MapDescriptor {
        name: "incomplete_deg_minus2".into(),
        kind: MapKind::Skew(skew),
        invariant_sets: vec![],
        known_periodic: vec![
            (AnnulusPoint::from_f64(1.0 / 3.0, 0.5), 1),
            (AnnulusPoint::from_f64(2.0 / 3.0, 0.5), 1),
            (AnnulusPoint::from_f64(1.0 / 18.0, 0.5), 2),
            (AnnulusPoint::from_f64(13.0 / 14.0, 0.5), 2),
        ],
        periodic_free: false,
        notes: "degree -2 base fixing 0, 1/3, 2/3 and swapping the rays 1/18 and 13/14; \
                the fiber escapes over theta = 0 and attracts to y = 1/2 elsewhere, so \
                only two of the three fixed-point classes are realized while the swapped \
                rays carry one 2-cycle"
            .into(),
        denjoy: None,
    })
}

/// Build a gallery entry by name.
pub fn gallery(name: &str, params: &GalleryParams) -> Result<MapDescriptor, MapsError> {
    match name {
        "model" => model_descriptor(params),
        "e2_ray_ns" => e2_descriptor(),
        "e3_two_rays" => e3_descriptor(),
        "e4_denjoy" => denjoy::e4_descriptor(params),
        "e5_cantor" => denjoy::e5_descriptor(),
        "chebyshev" => planar::chebyshev_descriptor(params),
        "referee" => referee::referee_descriptor(params),
        "incomplete_deg_minus2" => incomplete_descriptor(),
        "punctured_disc" => punctured_disc_descriptor(),
        other => Err(MapsError::UnknownName(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn model_lift_examples() {
        let m2 = model_map(Degree::new(2).unwrap());
        assert_abs_diff_eq!(m2.lift_f64(0.3), 0.6, epsilon = 1e-15);
        let mneg = model_map(Degree::new(-2).unwrap());
        assert_abs_diff_eq!(mneg.lift_f64(0.25), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn model_fixed_points_by_enumeration() {
        // brute force: fixed angles of the tripling map solve (d-1) theta = k
        let m3 = model_map(Degree::new(3).unwrap());
        let mut found = Vec::new();
        let n = 10_000;
        for i in 0..n {
            let theta = i as f64 / n as f64;
            let img = m3.eval_circle(&CirclePoint::from_f64(theta));
            if img.circle_dist(&CirclePoint::from_f64(theta)) < 0.5 / n as f64 {
                found.push(theta);
            }
        }
        assert_eq!(found.len(), 2);
        assert_abs_diff_eq!(found[0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(found[1], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn model_lift_is_exact_on_rationals() {
        let m2 = model_map(Degree::new(2).unwrap());
        let v = m2.lift_eval(&Coord::ratio(1, 3));
        assert!(v.is_exact());
        assert!(v.same_value(&Coord::ratio(2, 3)));
        // across a sheet: G(4/3) = 8/3
        let v = m2.lift_eval(&Coord::ratio(4, 3));
        assert!(v.same_value(&Coord::ratio(8, 3)));
    }

    #[test]
    fn gallery_maps_have_monotone_lifts_with_exact_deck_relation() {
        let params = GalleryParams::default();
        for name in gallery_names() {
            let desc = gallery(name, &params).unwrap();
            if let Some(base) = desc.base() {
                base.validate(1000).unwrap();
                let lifted = desc.lifted().unwrap();
                assert!(
                    lifted.equivariance_defect(1000, 7) <= 1e-10,
                    "equivariance failed for {name}"
                );
            }
        }
    }

    #[test]
    fn gallery_rejects_unknown_names() {
        assert!(matches!(
            gallery("nope", &GalleryParams::default()),
            Err(MapsError::UnknownName(_))
        ));
    }

    #[test]
    fn e3_has_declared_fixed_point_and_degree() {
        let desc = gallery("e3_two_rays", &GalleryParams::default()).unwrap();
        assert_eq!(desc.degree().get(), 3);
        let (p, n) = &desc.known_periodic[0];
        assert_eq!(*n, 1);
        let skew = desc.skew().unwrap();
        let img = skew.eval(p);
        assert!(img.theta.circle_dist(&p.theta) < 1e-12);
        assert_abs_diff_eq!(img.y.to_f64(), p.y.to_f64(), epsilon = 1e-12);
    }

    #[test]
    fn e2_ray_is_invariant_and_fixed_point_free_on_it() {
        let desc = gallery("e2_ray_ns", &GalleryParams::default()).unwrap();
        let skew = desc.skew().unwrap();
        for y in [0.1, 0.3, 0.5, 0.9] {
            let img = skew.eval(&AnnulusPoint::from_f64(0.0, y));
            assert_eq!(img.theta.to_f64(), 0.0);
            assert!(img.y.to_f64() > y, "north-south push upward");
        }
        assert!(desc.periodic_free);
    }

    #[test]
    fn punctured_disc_declares_no_periodic_points() {
        let desc = gallery("punctured_disc", &GalleryParams::default()).unwrap();
        assert!(desc.periodic_free);
        assert!(desc.known_periodic.is_empty());
    }

    #[test]
    fn incomplete_base_swaps_designated_rays() {
        let base = incomplete_base();
        let s1 = 1.0 / 18.0;
        let s2 = 13.0 / 14.0;
        let img1 = base.eval_circle(&CirclePoint::from_f64(s1));
        let img2 = base.eval_circle(&CirclePoint::from_f64(s2));
        assert!(img1.circle_dist(&CirclePoint::from_f64(s2)) < 1e-12);
        assert!(img2.circle_dist(&CirclePoint::from_f64(s1)) < 1e-12);
        // and fixes 0, 1/3, 2/3
        for t in [0.0, 1.0 / 3.0, 2.0 / 3.0] {
            let img = base.eval_circle(&CirclePoint::from_f64(t));
            assert!(img.circle_dist(&CirclePoint::from_f64(t)) < 1e-12);
        }
    }

    #[test]
    fn model_rejects_bad_fiber_param() {
        let mut params = GalleryParams::default();
        params.fiber = "wobble".into();
        assert!(matches!(
            gallery("model", &params),
            Err(MapsError::InvalidParams(_))
        ));
    }

    #[test]
    fn band_fiber_keeps_split_band_invariant() {
        for y in [0.3, 0.35, 0.45, 0.55, 0.6, 0.7] {
            let v = band_fiber(y);
            let in_bands = (0.3..=0.45).contains(&v) || (0.55..=0.7).contains(&v);
            assert!(in_bands, "band fiber left the bands at y={y}: {v}");
        }
        // middle gap is backward invariant: images near 1/2 spread outward
        assert!(band_fiber(0.46) < 0.46 && band_fiber(0.54) > 0.54);
    }
}
