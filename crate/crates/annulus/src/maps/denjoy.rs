//! Blown-up rotations with a wandering interval, their degree-2 doubling,
//! and the expanding-Cantor-set circle map.
//!
//! The construction replaces the orbit `{n alpha}` of a rigid rotation by
//! intervals `I_n` whose lengths follow a summable law, giving a circle
//! homeomorphism `g1` that maps `I_n` affinely onto `I_{n+1}`. With the
//! rotation realized by a continued-fraction convergent `p/q`, the model is
//! finite: `q` intervals cycle with period `q`, so the index-0 interval
//! wanders for `q - 1` steps, far beyond any search horizon used here.
//! Wrapping a middle piece of `I_0` once around the circle turns `g1` into
//! a degree-2 covering whose minimal set approximation `K1` is the set of
//! interval endpoints.

use super::{CircleCoveringMap, DeclaredSet, GalleryParams, MapDescriptor, MapKind, MapsError, SkewProduct};
use crate::coord::Coord;
use crate::cover::{AnnulusPoint, Degree};
use crate::numeric::invert_monotone;
use std::sync::{Arc, OnceLock};

/// Normalizer of the default length law `n -> c / (n^2 + 1)`, i.e. the
/// reciprocal of the two-sided series sum. Computed numerically with a
/// midpoint-rule tail so the value is accurate to machine precision.
pub fn law_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let n = 100_000u64;
        let mut s = 1.0;
        for k in 1..=n {
            let kf = k as f64;
            s += 2.0 / (kf * kf + 1.0);
        }
        s += 2.0 * (std::f64::consts::FRAC_PI_2 - (n as f64 + 0.5).atan());
        1.0 / s
    })
}

/// Blown-up rotation data: interval positions on the new circle, the orbit
/// indexing, and what is left of the original circle between them.
#[derive(Debug)]
pub struct DenjoyData {
    pub convergent: (u64, u64),
    pub budget: f64,
    /// Interval starts in circle order; `starts[0] = 0`.
    starts: Vec<f64>,
    lens: Vec<f64>,
    /// Base-circle anchor of each slot, ascending.
    anchors: Vec<f64>,
    /// Orbit index of each slot.
    orbits: Vec<u32>,
    orbit_to_slot: Vec<u32>,
    /// Lebesgue mass per unit of base angle in the gaps, `1 - budget`.
    gap_slope: f64,
    /// Rotation step `p/q` on the base circle.
    step: f64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// Build the blow-up of the rotation by `convergent = (p, q)` inserting a
/// total interval length of `budget`.
pub fn denjoy_build(convergent: (u64, u64), budget: f64) -> Result<DenjoyData, MapsError> {
    let (p, q) = convergent;
    if q < 3 || p == 0 || p >= q || gcd(p, q) != 1 {
        return Err(MapsError::InvalidParams(format!(
            "rotation approximant {p}/{q} must be a reduced fraction in (0,1) with q >= 3"
        )));
    }
    if !(budget > 0.0 && budget <= 1.0) {
        return Err(MapsError::BudgetError(budget));
    }
    let q = q as usize;

    // orbit n sits at base angle (n p mod q)/q with the signed index law weight
    let mut slots: Vec<(f64, u32, f64)> = (0..q)
        .map(|n| {
            let anchor = ((n as u64 * p) % q as u64) as f64 / q as f64;
            let signed = if n <= q / 2 { n as i64 } else { n as i64 - q as i64 };
            let weight = 1.0 / ((signed * signed) as f64 + 1.0);
            (anchor, n as u32, weight)
        })
        .collect();
    slots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total_weight: f64 = slots.iter().map(|s| s.2).sum();

    let gap_slope = 1.0 - budget;
    let mut starts = Vec::with_capacity(q);
    let mut lens = Vec::with_capacity(q);
    let mut anchors = Vec::with_capacity(q);
    let mut orbits = Vec::with_capacity(q);
    let mut cum = 0.0;
    for (anchor, orbit, weight) in &slots {
        starts.push(gap_slope * anchor + budget * cum / total_weight);
        lens.push(budget * weight / total_weight);
        anchors.push(*anchor);
        orbits.push(*orbit);
        cum += weight;
    }
    // exact tiling when budget = 1: lengths from consecutive starts
    if gap_slope == 0.0 {
        for i in 0..q {
            let next = if i + 1 < q { starts[i + 1] } else { 1.0 };
            lens[i] = next - starts[i];
        }
    }
    let mut orbit_to_slot = vec![0u32; q];
    for (slot, orbit) in orbits.iter().enumerate() {
        orbit_to_slot[*orbit as usize] = slot as u32;
    }
    Ok(DenjoyData {
        convergent,
        budget,
        starts,
        lens,
        anchors,
        orbits,
        orbit_to_slot,
        gap_slope,
        step: p as f64 / q as f64,
    })
}

enum Loc {
    /// slot, offset into the interval
    Inside(usize, f64),
    /// slot whose trailing gap contains the point, base angle there
    Gap(usize, f64),
}

impl DenjoyData {
    pub fn q(&self) -> usize {
        self.starts.len()
    }

    /// Number of forward steps the index-0 interval provably wanders.
    pub fn wandering_horizon(&self) -> u32 {
        (self.q() - 1) as u32
    }

    pub fn interval_by_orbit(&self, orbit: usize) -> (f64, f64) {
        let slot = self.orbit_to_slot[orbit % self.q()] as usize;
        (self.starts[slot], self.lens[slot])
    }

    /// The wandering interval `I = I_0`.
    pub fn wandering_interval(&self) -> (f64, f64) {
        self.interval_by_orbit(0)
    }

    /// Ordered `(anchor, length)` pairs, the complement's gap structure.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.anchors.iter().copied().zip(self.lens.iter().copied())
    }

    pub fn total_inserted(&self) -> f64 {
        self.lens.iter().sum()
    }

    fn locate(&self, x: f64) -> Loc {
        let x = x.rem_euclid(1.0);
        let slot = match self
            .starts
            .binary_search_by(|s| s.partial_cmp(&x).unwrap())
        {
            Ok(i) => i,
            Err(0) => self.q() - 1, // cannot happen for x >= 0 since starts[0] = 0
            Err(i) => i - 1,
        };
        let offset = x - self.starts[slot];
        if offset < self.lens[slot] || self.gap_slope == 0.0 {
            Loc::Inside(slot, offset.min(self.lens[slot]))
        } else {
            let theta = self.anchors[slot] + (offset - self.lens[slot]) / self.gap_slope;
            Loc::Gap(slot, theta)
        }
    }

    fn position_of_base(&self, theta: f64) -> f64 {
        let theta = theta.rem_euclid(1.0);
        match self
            .anchors
            .binary_search_by(|a| a.partial_cmp(&theta).unwrap())
        {
            Ok(i) => self.starts[i],
            // Err(0) cannot occur: anchors[0] = 0 <= theta
            Err(i) => {
                let i = i.saturating_sub(1);
                self.starts[i] + self.lens[i] + self.gap_slope * (theta - self.anchors[i])
            }
        }
        .rem_euclid(1.0)
    }

    /// The blown-up homeomorphism `g1` as a circle map.
    pub fn g1_eval(&self, x: f64) -> f64 {
        match self.locate(x) {
            Loc::Inside(slot, offset) => {
                let t = offset / self.lens[slot];
                let next =
                    self.orbit_to_slot[(self.orbits[slot] as usize + 1) % self.q()] as usize;
                (self.starts[next] + t * self.lens[next]).rem_euclid(1.0)
            }
            Loc::Gap(_, theta) => self.position_of_base(theta + self.step),
        }
    }

    /// Increasing lift of `g1` on the fundamental domain.
    pub fn g1_lift0(&self, x: f64) -> f64 {
        let v0 = self.g1_eval(0.0);
        let v = self.g1_eval(x);
        if v < v0 {
            v + 1.0
        } else {
            v
        }
    }

    /// Distance to the endpoint/gap approximation of the minimal Cantor set.
    pub fn dist_to_cantor(&self, theta: f64) -> f64 {
        match self.locate(theta) {
            Loc::Inside(slot, offset) => offset.min(self.lens[slot] - offset).max(0.0),
            Loc::Gap(..) => 0.0,
        }
    }

    /// Sorted endpoint samples of the Cantor approximation.
    pub fn cantor_endpoints(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(2 * self.q());
        for i in 0..self.q() {
            pts.push(self.starts[i]);
            pts.push((self.starts[i] + self.lens[i]).rem_euclid(1.0));
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        pts
    }
}

/// Wrap the middle `inner_fraction` of the wandering interval once around
/// the circle, producing a degree-2 covering equal to `g1` off `I_0`.
pub fn denjoy_double(dj: &Arc<DenjoyData>, inner_fraction: f64) -> Result<CircleCoveringMap, MapsError> {
    if !(0.0 < inner_fraction && inner_fraction < 1.0) {
        return Err(MapsError::InvalidParams(format!(
            "inner_fraction must lie in (0,1), got {inner_fraction}"
        )));
    }
    let (s, l) = dj.wandering_interval();
    let mid = s + 0.5 * l;
    let half = 0.5 * inner_fraction * l;
    let (lo, hi) = (mid - half, mid + half);
    let dj = dj.clone();
    let map = CircleCoveringMap::new(
        Degree::new(2).unwrap(),
        format!("denjoy_double_q{}", dj.q()),
        move |x: &Coord| {
            let xf = x.to_f64();
            let ramp = if xf <= lo {
                0.0
            } else if xf >= hi {
                1.0
            } else {
                (xf - lo) / (hi - lo)
            };
            Coord::Float(dj.g1_lift0(xf) + ramp)
        },
    );
    map.validate(1000)?;
    Ok(map)
}

fn default_denjoy(params: &GalleryParams) -> Result<Arc<DenjoyData>, MapsError> {
    Ok(Arc::new(denjoy_build(params.convergent, params.budget)?))
}

/// Fiber profile with a quadratic tangency from above at the fixed level
/// `y = 1/2`: displacement `2 (y - 1/2)^2 y (1 - y)` vanishes only there.
pub fn tangent_fiber_profile(y: f64) -> f64 {
    y + 2.0 * (y - 0.5) * (y - 0.5) * y * (1.0 - y)
}

/// Skew product over the doubled blow-up whose fiber maps fix `y = 1/2`
/// exactly over the Cantor set and push upward elsewhere.
pub fn e4_descriptor(params: &GalleryParams) -> Result<MapDescriptor, MapsError> {
    let dj = default_denjoy(params)?;
    let base = denjoy_double(&dj, params.inner_fraction)?;
    let dj_fiber = dj.clone();
    let skew = SkewProduct::new(base, "denjoy_skew", true, move |t, y| {
        let psi = dj_fiber.dist_to_cantor(t.to_f64());
        tangent_fiber_profile(y) + y * (1.0 - y) * psi
    });
    skew.validate(64, 64)?;
    let samples: Vec<AnnulusPoint> = dj
        .cantor_endpoints()
        .iter()
        .map(|&theta| AnnulusPoint::from_f64(theta, 0.5))
        .collect();
    Ok(MapDescriptor {
        name: "e4_denjoy".into(),
        kind: MapKind::Skew(skew),
        invariant_sets: vec![DeclaredSet {
            label: "cantor_level".into(),
            samples,
            essential: false,
            totally_invariant: false,
        }],
        known_periodic: vec![],
        periodic_free: true,
        notes: format!(
            "degree-2 doubling of a blown-up rotation ({}/{}) with inserted budget {}; \
             fiber y + 2(y-1/2)^2 y(1-y) + y(1-y) dist(theta, K1). The level set \
             K1 x {{1/2}} is compact and forward invariant, every fiber off K1 is \
             fixed point free, and the map has no periodic points although its \
             nonwandering set is nonempty. Tangency order at the fixed level is \
             quadratic; the drawn profile fixes only the tangency from above.",
            params.convergent.0, params.convergent.1, params.budget
        ),
        denjoy: Some(dj),
    })
}

/// Circle map with an attracting fixed point at 0 and an expanding,
/// totally invariant Cantor set: lift `2x - (3/4 pi) sin(2 pi x)`.
pub fn cantor_base() -> CircleCoveringMap {
    let lambda = 1.5;
    CircleCoveringMap::new(Degree::new(2).unwrap(), "cantor_base", move |x: &Coord| {
        let xf = x.to_f64();
        Coord::Float(2.0 * xf - lambda / (2.0 * std::f64::consts::PI) * (2.0 * std::f64::consts::PI * xf).sin())
    })
}

/// Positive fixed point of the cantor base, the boundary of the basin of 0.
pub fn cantor_basin_edge() -> f64 {
    let g = cantor_base();
    invert_monotone(|x| g.lift_f64(x) - x, 0.0, 0.02, 0.49, 1e-13)
        .expect("basin edge root must bracket")
}

const SURVIVOR_WIDTH: f64 = 4e-7;
const SURVIVOR_CAP: usize = 600_000;

/// Endpoints of an adaptive cover of the expanding survivor set
/// `{x : g^n(x) stays outside the basin of 0 for all n}`.
///
/// Intervals are refined through the two inverse branches until narrower
/// than `SURVIVOR_WIDTH`; all emitted endpoints lie on the survivor set up
/// to bisection precision, and the cover's mesh bounds the defect of both
/// invariance probes.
pub fn cantor_survivor_endpoints() -> &'static [f64] {
    static PTS: OnceLock<Vec<f64>> = OnceLock::new();
    PTS.get_or_init(|| {
        let g = cantor_base();
        let edge = cantor_basin_edge();
        let (lo, hi) = (edge, 1.0 - edge);
        let lift = |x: f64| g.lift_f64(x);
        let branch = |j: f64, t: f64| invert_monotone(lift, t + j, 0.0, 1.0, 1e-12);

        let mut out: Vec<f64> = Vec::new();
        let mut stack = vec![(lo, hi)];
        while let Some((a, b)) = stack.pop() {
            if b - a < SURVIVOR_WIDTH || out.len() > SURVIVOR_CAP {
                out.push(a);
                out.push(b);
                continue;
            }
            for j in [0.0, 1.0] {
                match (branch(j, a), branch(j, b)) {
                    (Some(ca), Some(cb)) if cb > ca => stack.push((ca, cb)),
                    _ => {}
                }
            }
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
        out
    })
}

/// Skew product `(g(theta), phi(y))` whose Cantor-set level `K1 x {1/2}`
/// is totally invariant.
pub fn e5_descriptor() -> Result<MapDescriptor, MapsError> {
    let base = cantor_base();
    base.validate(1000)?;
    let skew = SkewProduct::new(base, "cantor_skew", true, |_t, y| {
        super::attracting_fiber(y)
    });
    skew.validate(16, 64)?;
    let endpoints = cantor_survivor_endpoints();
    // expansion on the declared set, asserted post-construction
    for &x in endpoints.iter().step_by(97) {
        let d = (2.0 - 1.5 * (2.0 * std::f64::consts::PI * x).cos()).abs();
        if d <= 1.0 {
            return Err(MapsError::InvalidParams(format!(
                "cantor base fails |g'| > 1 on the survivor set at x = {x}"
            )));
        }
    }
    let samples: Vec<AnnulusPoint> = endpoints
        .iter()
        .map(|&theta| AnnulusPoint::from_f64(theta, 0.5))
        .collect();
    Ok(MapDescriptor {
        name: "e5_cantor".into(),
        kind: MapKind::Skew(skew),
        invariant_sets: vec![DeclaredSet {
            label: "cantor_level".into(),
            samples,
            essential: false,
            totally_invariant: true,
        }],
        known_periodic: vec![(AnnulusPoint::from_f64(0.0, 0.5), 1)],
        periodic_free: false,
        notes: "lift 2x - (1.5/2pi) sin(2pi x): theta = 0 attracts, the survivor set of \
                the basin complement is an expanding Cantor set equal to its own full \
                preimage; the fiber fixes y = 1/2 with the level set totally invariant. \
                The concrete bump is one of many admissible choices."
            .into(),
        denjoy: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_dj() -> Arc<DenjoyData> {
        Arc::new(denjoy_build((233, 377), 1.0).unwrap())
    }

    #[test]
    fn law_constant_matches_independent_series_sum() {
        // independent oracle: coarser direct sum with interval tail bounds
        let mut s_lo = 1.0;
        let n = 20_000u64;
        for k in 1..=n {
            let kf = k as f64;
            s_lo += 2.0 / (kf * kf + 1.0);
        }
        let s_hi = s_lo + 2.0 / n as f64; // integral bound on the tail
        let c = law_constant();
        assert!(c <= 1.0 / s_lo && c >= 1.0 / s_hi);
        assert_abs_diff_eq!(c, 0.31712, epsilon = 1e-5);
    }

    #[test]
    fn inserted_lengths_exhaust_the_budget() {
        let dj = small_dj();
        assert_abs_diff_eq!(dj.total_inserted(), 1.0, epsilon = 1e-12);
        let dj = Arc::new(denjoy_build((233, 377), 0.5).unwrap());
        assert_abs_diff_eq!(dj.total_inserted(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn interval_interiors_are_disjoint_and_ordered() {
        let dj = Arc::new(denjoy_build((233, 377), 0.7).unwrap());
        for i in 0..dj.q() - 1 {
            assert!(dj.starts[i] + dj.lens[i] <= dj.starts[i + 1] + 1e-15);
        }
        assert!(dj.starts[dj.q() - 1] + dj.lens[dj.q() - 1] <= 1.0 + 1e-15);
    }

    #[test]
    fn lengths_follow_the_summable_law() {
        let dj = small_dj();
        let (_, l0) = dj.interval_by_orbit(0);
        let (_, l5) = dj.interval_by_orbit(5);
        assert_abs_diff_eq!(l5 / l0, 1.0 / 26.0, epsilon = 1e-12);
    }

    #[test]
    fn g1_maps_interval_n_affinely_onto_next() {
        let dj = small_dj();
        let (s5, l5) = dj.interval_by_orbit(5);
        let (s6, l6) = dj.interval_by_orbit(6);
        for t in [0.0, 0.25, 0.5, 0.9] {
            let img = dj.g1_eval(s5 + t * l5);
            assert_abs_diff_eq!(img, (s6 + t * l6).rem_euclid(1.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn wandering_interval_stays_disjoint_for_the_horizon() {
        let dj = small_dj();
        let (s0, l0) = dj.wandering_interval();
        let mut x = s0 + 0.5 * l0;
        for step in 1..=200u32 {
            x = dj.g1_eval(x);
            let (a, b) = (s0, s0 + l0);
            assert!(
                !(a..b).contains(&x),
                "midpoint re-entered the wandering interval at step {step}"
            );
        }
        assert!(dj.wandering_horizon() >= 200);
    }

    #[test]
    fn budget_over_one_is_rejected() {
        assert!(matches!(
            denjoy_build((233, 377), 1.2),
            Err(MapsError::BudgetError(_))
        ));
    }

    #[test]
    fn doubling_has_degree_two_and_agrees_off_the_wandering_interval() {
        let dj = small_dj();
        let g = denjoy_double(&dj, 1.0 / 3.0).unwrap();
        assert_eq!(g.degree().get(), 2);
        let (s0, l0) = dj.wandering_interval();
        for x in [s0 + l0 + 1e-6, 0.3, 0.5, 0.77, 0.99] {
            if x > s0 && x < s0 + l0 {
                continue;
            }
            let via_double = g.lift_f64(x).rem_euclid(1.0);
            let via_g1 = dj.g1_eval(x);
            assert_abs_diff_eq!(via_double, via_g1, epsilon = 1e-12);
        }
    }

    #[test]
    fn doubling_adds_one_turn_across_the_wandering_interval() {
        let dj = small_dj();
        let g = denjoy_double(&dj, 1.0 / 3.0).unwrap();
        let (s0, l0) = dj.wandering_interval();
        let doubled_rise = g.lift_f64(s0 + l0) - g.lift_f64(s0);
        let g1_rise = dj.g1_lift0(s0 + l0) - dj.g1_lift0(s0);
        assert_abs_diff_eq!(doubled_rise, 1.0 + g1_rise, epsilon = 1e-12);
    }

    #[test]
    fn cantor_endpoints_are_g_invariant_under_the_doubling() {
        let dj = small_dj();
        let g = denjoy_double(&dj, 1.0 / 3.0).unwrap();
        let endpoints = dj.cantor_endpoints();
        for &e in endpoints.iter().step_by(13) {
            let img = g.lift_f64(e).rem_euclid(1.0);
            let dist = endpoints
                .iter()
                .map(|&p| crate::cover::circle_dist_f64(img, p))
                .fold(f64::INFINITY, f64::min);
            assert!(dist < 1e-10, "image of endpoint {e} strayed by {dist}");
        }
    }

    #[test]
    fn survivor_set_is_expanding_and_two_sided_invariant() {
        let g = cantor_base();
        let pts = cantor_survivor_endpoints();
        assert!(pts.len() > 1000);
        let edge = cantor_basin_edge();
        assert_abs_diff_eq!(g.lift_f64(edge), edge, epsilon = 1e-10);
        for &x in pts.iter().step_by(971) {
            let img = g.lift_f64(x).rem_euclid(1.0);
            let dist = pts
                .iter()
                .map(|&p| crate::cover::circle_dist_f64(img, p))
                .fold(f64::INFINITY, f64::min);
            assert!(dist < 2.0 * SURVIVOR_WIDTH, "forward defect {dist} at {x}");
        }
    }
}
