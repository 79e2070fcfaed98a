//! One-dimensional searches along the cash line shared by the acceptance
//! and construction modules.

/// Bracket policy: start at width `initial`, double until `cap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketPolicy {
    pub initial: f64,
    pub cap: f64,
    /// Stop bisecting once the bracket is narrower than this.
    pub tol: f64,
}

impl Default for BracketPolicy {
    fn default() -> Self {
        Self {
            initial: 1.0,
            cap: 1e12,
            tol: 1e-10,
        }
    }
}

/// Why a threshold search gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchFailure {
    /// The predicate stayed false up to `+cap`.
    NeverTrue,
    /// The predicate stayed true down to `−cap`.
    AlwaysTrue,
}

/// Smallest `s` (to within `policy.tol`) at which a monotone predicate
/// (false below some threshold, true above it) turns true. The returned
/// point always satisfies the predicate.
pub fn threshold<E>(
    policy: &BracketPolicy,
    mut pred: impl FnMut(f64) -> Result<bool, E>,
) -> Result<Result<f64, SearchFailure>, E> {
    let (mut lo, mut hi);
    let mut step = policy.initial;
    if pred(0.0)? {
        hi = 0.0;
        loop {
            if step > policy.cap {
                return Ok(Err(SearchFailure::AlwaysTrue));
            }
            let s = -step;
            if pred(s)? {
                hi = s;
                step *= 2.0;
            } else {
                lo = s;
                break;
            }
        }
    } else {
        lo = 0.0;
        loop {
            if step > policy.cap {
                return Ok(Err(SearchFailure::NeverTrue));
            }
            let s = step;
            if pred(s)? {
                hi = s;
                break;
            } else {
                lo = s;
                step *= 2.0;
            }
        }
    }
    while hi - lo > policy.tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Ok(hi))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of `f` on `[lo, hi]`; returns the best
/// point seen and its value.
pub fn golden_section(lo: f64, hi: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            if !(c > a && c < b) {
                break;
            }
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            if !(d > a && d < b) {
                break;
            }
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    best
}
