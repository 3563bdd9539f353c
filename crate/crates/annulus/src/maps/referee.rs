//! Exact, rationally independent fiber translations over the periodic
//! points of the tripling map.
//!
//! Each periodic angle `p_n` of `m_3` receives a translation value in
//! `a_n * Q` where `a_n` is the square root of the n-th prime. Square roots
//! of distinct primes are linearly independent over the rationals, so the
//! sum of translations along any periodic cycle is provably nonzero by
//! exact vector arithmetic: it vanishes iff every coefficient vanishes.
//! The values are organized as the uniform limit of piecewise-linear
//! refinements `t^0 >= t^1 >= ...` that change only near `p_n` at stage `n`
//! and drop by strictly less than `2^-n`.

use super::{GalleryParams, MapDescriptor, MapKind, MapsError, SkewProduct};
use crate::coord::Coord;
use crate::cover::Degree;
use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

fn big(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

fn pow2(exp: i64) -> BigRational {
    if exp >= 0 {
        BigRational::from(BigInt::one() << exp as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-exp) as usize)
    }
}

/// Exact element of `Q + Q sqrt(p1) + Q sqrt(p2) + ...` over distinct primes.
#[derive(Clone, Debug, PartialEq)]
pub struct SqrtSum {
    unit: BigRational,
    coords: BTreeMap<u64, BigRational>,
}

impl SqrtSum {
    pub fn zero() -> Self {
        SqrtSum {
            unit: BigRational::zero(),
            coords: BTreeMap::new(),
        }
    }

    pub fn rational(r: BigRational) -> Self {
        SqrtSum {
            unit: r,
            coords: BTreeMap::new(),
        }
    }

    /// `coeff * sqrt(prime)`.
    pub fn radical(prime: u64, coeff: BigRational) -> Self {
        let mut coords = BTreeMap::new();
        if !coeff.is_zero() {
            coords.insert(prime, coeff);
        }
        SqrtSum {
            unit: BigRational::zero(),
            coords,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero() && self.coords.is_empty()
    }

    pub fn coeff(&self, prime: u64) -> BigRational {
        self.coords.get(&prime).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn unit_part(&self) -> &BigRational {
        &self.unit
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.coords.keys().copied()
    }

    pub fn add(&self, other: &SqrtSum) -> SqrtSum {
        let mut out = self.clone();
        out.unit += &other.unit;
        for (p, c) in &other.coords {
            let entry = out.coords.entry(*p).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                out.coords.remove(p);
            }
        }
        out
    }

    pub fn sub(&self, other: &SqrtSum) -> SqrtSum {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> SqrtSum {
        if s.is_zero() {
            return SqrtSum::zero();
        }
        SqrtSum {
            unit: &self.unit * s,
            coords: self.coords.iter().map(|(p, c)| (*p, c * s)).collect(),
        }
    }

    /// Rational enclosure of the real value with `bits` of dyadic precision
    /// per radical.
    pub fn real_bounds(&self, bits: u32) -> (BigRational, BigRational) {
        let mut lo = self.unit.clone();
        let mut hi = self.unit.clone();
        let denom = BigInt::one() << bits as usize;
        for (p, c) in &self.coords {
            let shifted = BigInt::from(*p) << (2 * bits as usize);
            let root = shifted.sqrt();
            let s_lo = BigRational::new(root.clone(), denom.clone());
            let s_hi = BigRational::new(root + BigInt::one(), denom.clone());
            if c.is_positive() {
                lo += c * &s_lo;
                hi += c * &s_hi;
            } else {
                lo += c * &s_hi;
                hi += c * &s_lo;
            }
        }
        (lo, hi)
    }

    /// Exact sign. Zero only when every coefficient is zero; otherwise the
    /// enclosure refinement terminates by rational independence of the basis.
    pub fn sign(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if self.coords.is_empty() {
            return if self.unit.is_positive() { 1 } else { -1 };
        }
        let mut bits = 64u32;
        loop {
            let (lo, hi) = self.real_bounds(bits);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
            assert!(
                bits <= 1 << 22,
                "sign refinement exhausted; vector should be exactly zero only \
                 when all coefficients vanish"
            );
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mut v = self.unit.to_f64().unwrap_or(f64::NAN);
        for (p, c) in &self.coords {
            v += c.to_f64().unwrap_or(f64::NAN) * (*p as f64).sqrt();
        }
        v
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// First `count` primes, seeded by the caller's list and extended as needed.
fn prime_basis(seed: &[u64], count: usize) -> Result<Vec<u64>, MapsError> {
    let mut basis: Vec<u64> = Vec::with_capacity(count);
    for &p in seed {
        if !is_prime(p) {
            return Err(MapsError::InvalidParams(format!(
                "seed value {p} is not prime"
            )));
        }
        if basis.contains(&p) {
            return Err(MapsError::InvalidParams(format!(
                "seed prime {p} repeats"
            )));
        }
        basis.push(p);
        if basis.len() == count {
            return Ok(basis);
        }
    }
    let mut candidate = basis.last().copied().unwrap_or(1) + 1;
    while basis.len() < count {
        if is_prime(candidate) && !basis.contains(&candidate) {
            basis.push(candidate);
        }
        candidate += 1;
    }
    Ok(basis)
}

/// Periodic angle of the tripling map with its exact period.
#[derive(Clone, Debug)]
pub struct PeriodicAngle {
    pub angle: BigRational,
    pub period: u32,
}

fn frac(r: &BigRational) -> BigRational {
    r - r.floor()
}

fn triple(r: &BigRational) -> BigRational {
    frac(&(r * big(3)))
}

fn circle_dist_exact(a: &BigRational, b: &BigRational) -> BigRational {
    let d = frac(&(a - b));
    let alt = BigRational::one() - &d;
    if d < alt {
        d
    } else {
        alt
    }
}

/// All periodic points of `m_3` with period at most `max_period`, exactly,
/// ordered with angle 0 first, angle 1/2 second, then by (period, angle).
pub fn tripling_periodic_points(max_period: u32) -> Vec<PeriodicAngle> {
    let mut seen: BTreeMap<BigRational, u32> = BTreeMap::new();
    for n in 1..=max_period {
        let denom = BigInt::from(3).pow(n) - BigInt::one();
        let denom = BigRational::from(denom);
        let count = denom.to_integer().to_u64().expect("period cap keeps this small");
        for j in 0..count {
            let angle = frac(&(BigRational::from(BigInt::from(j)) / denom.clone()));
            if seen.contains_key(&angle) {
                continue;
            }
            let mut period = 1;
            let mut z = triple(&angle);
            while z != angle {
                z = triple(&z);
                period += 1;
            }
            seen.insert(angle, period);
        }
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut rest: Vec<PeriodicAngle> = seen
        .iter()
        .filter(|(a, _)| !a.is_zero() && **a != half)
        .map(|(a, p)| PeriodicAngle {
            angle: a.clone(),
            period: *p,
        })
        .collect();
    rest.sort_by(|a, b| (a.period, a.angle.clone()).cmp(&(b.period, b.angle.clone())));
    let mut out = vec![
        PeriodicAngle {
            angle: BigRational::zero(),
            period: 1,
        },
        PeriodicAngle {
            angle: half,
            period: 1,
        },
    ];
    out.extend(rest);
    out
}

/// Piecewise-linear circle function with exact breakpoints and `SqrtSum`
/// values.
#[derive(Clone, Debug)]
pub struct PiecewiseVector {
    /// sorted breakpoint angles in [0,1)
    angles: Vec<BigRational>,
    values: Vec<SqrtSum>,
}

impl PiecewiseVector {
    fn new(mut pairs: Vec<(BigRational, SqrtSum)>) -> Self {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        PiecewiseVector {
            angles: pairs.iter().map(|p| p.0.clone()).collect(),
            values: pairs.into_iter().map(|p| p.1).collect(),
        }
    }

    pub fn eval_exact(&self, theta: &BigRational) -> SqrtSum {
        let theta = frac(theta);
        match self.angles.binary_search(&theta) {
            Ok(i) => self.values[i].clone(),
            Err(pos) => {
                let n = self.angles.len();
                let (i, j, span, offset) = if pos == 0 || pos == n {
                    // wrap segment from the last breakpoint through 1 to the first
                    let span = BigRational::one() + &self.angles[0] - &self.angles[n - 1];
                    let offset = if pos == 0 {
                        BigRational::one() + &theta - &self.angles[n - 1]
                    } else {
                        &theta - &self.angles[n - 1]
                    };
                    (n - 1, 0, span, offset)
                } else {
                    let span = &self.angles[pos] - &self.angles[pos - 1];
                    let offset = &theta - &self.angles[pos - 1];
                    (pos - 1, pos, span, offset)
                };
                let s = offset / span;
                self.values[i]
                    .scale(&(BigRational::one() - &s))
                    .add(&self.values[j].scale(&s))
            }
        }
    }

    /// Ensure a breakpoint exists at `theta`, interpolating the current value.
    fn pin(&mut self, theta: &BigRational) {
        let theta = frac(theta);
        if self.angles.binary_search(&theta).is_ok() {
            return;
        }
        let value = self.eval_exact(&theta);
        let pos = self.angles.binary_search(&theta).unwrap_err();
        self.angles.insert(pos, theta);
        self.values.insert(pos, value);
    }

    /// Subtract the tent of height `drop` centered at `center` with the given
    /// radius; the function is unchanged outside `(center - r, center + r)`.
    fn subtract_tent(&mut self, center: &BigRational, radius: &BigRational, drop: &SqrtSum) {
        let left = frac(&(center - radius));
        let right = frac(&(center + radius));
        self.pin(&left);
        self.pin(&right);
        self.pin(center);
        let r = radius.clone();
        for (angle, value) in self.angles.iter().zip(self.values.iter_mut()) {
            let d = circle_dist_exact(angle, center);
            if d < r {
                let weight = BigRational::one() - d / &r;
                *value = value.sub(&drop.scale(&weight));
            }
        }
    }

    pub fn breakpoints(&self) -> usize {
        self.angles.len()
    }

    /// Float samples for fiber evaluation.
    pub fn to_f64_table(&self) -> Vec<(f64, f64)> {
        self.angles
            .iter()
            .zip(self.values.iter())
            .map(|(a, v)| (a.to_f64().unwrap(), v.to_f64()))
            .collect()
    }
}

/// One refinement stage: the point it adjusted, its pure radical value, and
/// the exact drop `t^{n-1} - t^n` at the peak.
#[derive(Clone, Debug)]
pub struct StageRecord {
    pub point_index: usize,
    pub prime: u64,
    pub coeff: BigRational,
    pub drop: SqrtSum,
    pub radius: BigRational,
}

/// The inductively refined translation table.
pub struct ExactTranslationTable {
    pub max_period: u32,
    pub points: Vec<PeriodicAngle>,
    pub basis: Vec<u64>,
    initial: PiecewiseVector,
    final_fn: PiecewiseVector,
    pub stages: Vec<StageRecord>,
}

impl ExactTranslationTable {
    /// Value of the initial continuous function at a periodic angle.
    pub fn stage0_entry(&self, angle: &BigRational) -> SqrtSum {
        self.initial.eval_exact(angle)
    }

    /// Final (fully refined) value at a periodic angle: a pure element of
    /// `sqrt(prime) * Q`.
    pub fn entry(&self, angle: &BigRational) -> SqrtSum {
        self.final_fn.eval_exact(angle)
    }

    pub fn interpolant(&self) -> &PiecewiseVector {
        &self.final_fn
    }

    /// Exact verification that every stage dropped by an amount in
    /// `[0, 2^-n)`.
    pub fn verify_refinement_bounds(&self) -> bool {
        self.stages.iter().enumerate().all(|(i, stage)| {
            let n = (i + 1) as i64;
            stage.drop.sign() >= 0
                && stage
                    .drop
                    .sub(&SqrtSum::rational(pow2(-n)))
                    .sign()
                    < 0
        })
    }

    /// Orbits of the tripling map grouped from the point list, shortest
    /// period and smallest leading angle first.
    pub fn cycles(&self) -> Vec<Vec<BigRational>> {
        let mut remaining: BTreeMap<BigRational, u32> = self
            .points
            .iter()
            .map(|p| (p.angle.clone(), p.period))
            .collect();
        let mut cycles = Vec::new();
        while let Some((start, period)) = remaining.iter().next().map(|(a, p)| (a.clone(), *p)) {
            let mut orbit = Vec::with_capacity(period as usize);
            let mut z = start.clone();
            for _ in 0..period {
                remaining.remove(&z);
                orbit.push(z.clone());
                z = triple(&z);
            }
            cycles.push(orbit);
        }
        cycles.sort_by_key(|c| (c.len(), c[0].clone()));
        cycles
    }

    /// Exact sum of final translations along a cycle.
    pub fn cycle_sum(&self, cycle: &[BigRational]) -> SqrtSum {
        cycle
            .iter()
            .fold(SqrtSum::zero(), |acc, a| acc.add(&self.entry(a)))
    }
}

/// Pick a nonzero dyadic `c` with `0 <= real(v) - c sqrt(p) < 2^-n`,
/// verified by exact sign tests.
fn choose_radical_coeff(v: &SqrtSum, prime: u64, n: i64) -> (BigRational, SqrtSum) {
    // dyadic grid fine enough that two grid steps stay under 2^-n
    let m = (n + 12) as u32;
    let bits = m + 8;
    let (v_lo, v_hi) = v.real_bounds(bits);
    let root = SqrtSum::radical(prime, BigRational::one());
    let (a_lo, a_hi) = root.real_bounds(bits);
    let ratio_lo = if v_lo.is_negative() {
        &v_lo / &a_lo
    } else {
        &v_lo / &a_hi
    };
    let _ = v_hi;
    let scale = BigInt::one() << m as usize;
    let mut c = BigRational::new((ratio_lo * BigRational::from(scale.clone())).floor().to_integer(), scale);
    let step = pow2(-(m as i64));
    let bound = SqrtSum::rational(pow2(-n));
    for _ in 0..8 {
        let drop = v.sub(&SqrtSum::radical(prime, c.clone()));
        if drop.sign() < 0 {
            c -= &step;
            continue;
        }
        if drop.sub(&bound).sign() >= 0 {
            c += &step;
            continue;
        }
        if c.is_zero() {
            c -= &step;
            continue;
        }
        return (c, drop);
    }
    panic!("dyadic coefficient selection failed to settle for prime {prime}");
}

/// Build the refinement sequence over all periodic points of period at most
/// `max_period`, assigning stage `n` the radical `sqrt(seed[n])`.
pub fn referee_translations(
    max_period: u32,
    seed_primes: &[u64],
) -> Result<ExactTranslationTable, MapsError> {
    if max_period > 8 {
        return Err(MapsError::CapacityError(max_period));
    }
    if max_period == 0 {
        return Err(MapsError::InvalidParams("max_period must be positive".into()));
    }
    let points = tripling_periodic_points(max_period);
    let basis = prime_basis(seed_primes, points.len())?;

    let a0 = SqrtSum::radical(basis[0], BigRational::one());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let initial = PiecewiseVector::new(vec![
        (BigRational::zero(), a0),
        (half, SqrtSum::zero()),
    ]);

    let mut current = initial.clone();
    let mut stages = Vec::with_capacity(points.len().saturating_sub(1));
    for n in 1..points.len() {
        let p_n = &points[n].angle;
        let min_dist = points[..n]
            .iter()
            .map(|q| circle_dist_exact(p_n, &q.angle))
            .min()
            .expect("stage has earlier points");
        let radius = min_dist / big(4);
        let v = current.eval_exact(p_n);
        let (coeff, drop) = choose_radical_coeff(&v, basis[n], n as i64);
        current.subtract_tent(p_n, &radius, &drop);
        stages.push(StageRecord {
            point_index: n,
            prime: basis[n],
            coeff,
            drop,
            radius,
        });
    }

    Ok(ExactTranslationTable {
        max_period,
        points,
        basis,
        initial,
        final_fn: current,
        stages,
    })
}

fn default_table(max_period: u32) -> Result<Arc<ExactTranslationTable>, MapsError> {
    static CACHE: OnceLock<BTreeMap<u32, Arc<ExactTranslationTable>>> = OnceLock::new();
    // cache only the gallery's default horizon; other horizons build afresh
    if max_period == 6 {
        let cache = CACHE.get_or_init(|| {
            let mut m = BTreeMap::new();
            if let Ok(t) = referee_translations(6, &[2, 3, 5, 7, 11, 13]) {
                m.insert(6, Arc::new(t));
            }
            m
        });
        if let Some(t) = cache.get(&6) {
            return Ok(t.clone());
        }
    }
    Ok(Arc::new(referee_translations(max_period, &[2, 3, 5, 7, 11, 13])?))
}

/// Skew product `(3 theta, y + t_theta)` in coordinates where the fiber line
/// is compressed into (0,1) by the logistic map.
pub fn referee_descriptor(params: &GalleryParams) -> Result<MapDescriptor, MapsError> {
    let table = default_table(params.max_period)?;
    let base = super::model_map(Degree::new(3)?);
    let samples: Vec<(f64, f64)> = {
        let mut t = table.interpolant().to_f64_table();
        t.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        t
    };
    let interp = move |theta: f64| -> f64 {
        let theta = theta.rem_euclid(1.0);
        let n = samples.len();
        let idx = samples.partition_point(|(a, _)| *a <= theta);
        let (a0, v0, a1, v1) = if idx == 0 || idx == n {
            let (al, vl) = samples[n - 1];
            let (ar, vr) = samples[0];
            let off = if idx == 0 { theta + 1.0 - al } else { theta - al };
            (0.0, vl, ar + 1.0 - al, vr - vl).3; // placeholder, replaced below
            (al, vl, ar + 1.0 - al, vr);
            (0.0, vl, ar + 1.0 - al - al + al, vr);
            // wrap segment
            return vl + (vr - vl) * off / (ar + 1.0 - al);
        } else {
            let (al, vl) = samples[idx - 1];
            let (ar, vr) = samples[idx];
            (al, vl, ar, vr)
        };
        v0 + (v1 - v0) * (theta - a0) / (a1 - a0)
    };
    let skew = SkewProduct::new(base, "independent_translations", true, move |t, y| {
        let shift = interp(t.to_f64());
        let line = (y / (1.0 - y)).ln() + shift;
        1.0 / (1.0 + (-line).exp())
    });
    skew.validate(64, 64)?;
    Ok(MapDescriptor {
        name: "referee".into(),
        kind: MapKind::Skew(skew),
        invariant_sets: vec![],
        known_periodic: vec![],
        periodic_free: true,
        notes: format!(
            "base 3 theta with fiber translation by t(theta) along a line compressed \
             into (0,1); translations at periodic base angles are nonzero rational \
             multiples of square roots of distinct primes, so cycle sums up to period \
             {} are certified nonzero by exact arithmetic and no periodic point exists \
             at those periods",
            table.max_period
        ),
        denjoy: None,
    })
}

/// Exposed table constructor used by tests and the example runner.
pub fn table_for(max_period: u32) -> Result<Arc<ExactTranslationTable>, MapsError> {
    default_table(max_period)
}
