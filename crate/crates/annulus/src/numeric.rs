//! Small shared numeric helpers: bisection for monotone and bracketed
//! root problems, and a seeded RNG constructor used wherever sampling
//! must be reproducible.

use rand_chacha::ChaCha8Rng;

/// Refine a sign-change bracket `[a, b]` of a continuous `f` by bisection
/// until the bracket is narrower than `tol`. Returns the midpoint.
///
/// `fa` is `f(a)`; callers that scanned a grid already have it.
pub fn bisect_bracket(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64, tol: f64) -> f64 {
    let mut sa = fa.signum();
    if sa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == sa {
            a = mid;
            sa = fm.signum();
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Solve `g(x) = target` for strictly monotone `g` on `[lo, hi]`.
/// Returns `None` when the target is outside `[g(lo), g(hi)]` (up to sign).
pub fn invert_monotone(
    g: impl Fn(f64) -> f64,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Option<f64> {
    let glo = g(lo);
    let ghi = g(hi);
    let increasing = ghi >= glo;
    let (mut a, mut b) = (lo, hi);
    let inside = if increasing {
        (glo..=ghi).contains(&target)
    } else {
        (ghi..=glo).contains(&target)
    };
    if !inside {
        return None;
    }
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let gm = g(mid);
        let below = if increasing { gm < target } else { gm > target };
        if below {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_simple_roots() {
        let f = |x: f64| x * x - 2.0;
        let r = bisect_bracket(f, 1.0, 2.0, f(1.0), 1e-12);
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn monotone_inverse_respects_range() {
        let g = |x: f64| 3.0 * x;
        assert!((invert_monotone(g, 1.0, 0.0, 1.0, 1e-13).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(invert_monotone(g, 4.0, 0.0, 1.0, 1e-13).is_none());
        let dec = |x: f64| -2.0 * x;
        assert!((invert_monotone(dec, -1.0, 0.0, 1.0, 1e-13).unwrap() - 0.5).abs() < 1e-12);
    }
}
