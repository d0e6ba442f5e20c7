//! One-dimensional root finding and minimization.

/// Golden ratio conjugate, (√5 − 1)/2.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `tol` or after `max_iter`
/// iterations. The returned point is the best one evaluated.
pub fn golden_section<F>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a).abs() > tol && iterations < max_iter {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    if fc < fd {
        Minimum { x: c, value: fc, iterations }
    } else {
        Minimum { x: d, value: fd, iterations }
    }
}

/// Bisection for a sign change of `f` with `f(lo) < 0 <= f(hi)`.
///
/// With `geometric` the midpoint is `√(lo·hi)`, which suits brackets that
/// span many decades (both ends must then be positive). Iterates until
/// `hi/lo − 1 <= rel_tol` (or `hi − lo <= rel_tol·|hi|`) and returns the
/// smallest point known to satisfy `f >= 0`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, geometric: bool, rel_tol: f64, max_iter: usize) -> f64
where
    F: FnMut(f64) -> f64,
{
    for _ in 0..max_iter {
        if (hi - lo) <= rel_tol * hi.abs() {
            break;
        }
        let mid = if geometric { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
