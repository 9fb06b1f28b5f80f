//! One-dimensional derivative-free solvers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a bracketed minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `rel_tol * max(|x|, abs_floor)`.
/// Both end points are also evaluated so that a minimum on the boundary is
/// returned exactly.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64, abs_floor: f64) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut evaluations = 0;
    let mut eval = |x: f64, n: &mut usize| {
        *n += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let f_lo = eval(a, &mut evaluations);
    let f_hi = eval(b, &mut evaluations);

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut evaluations);
    let mut fd = eval(d, &mut evaluations);

    // 200 steps shrink any finite bracket below double resolution.
    for _ in 0..200 {
        let scale = 0.5 * (a + b);
        if (b - a) <= rel_tol * scale.abs().max(abs_floor) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut evaluations);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut evaluations);
        }
    }

    let mut best = if fc <= fd {
        Minimum {
            x: c,
            value: fc,
            evaluations,
        }
    } else {
        Minimum {
            x: d,
            value: fd,
            evaluations,
        }
    };
    if f_lo < best.value {
        best.x = lo.min(hi);
        best.value = f_lo;
    }
    if f_hi < best.value {
        best.x = lo.max(hi);
        best.value = f_hi;
    }
    best.evaluations = evaluations;
    best
}

/// Outcome of a bracketed root search for a decreasing function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Root {
    /// A sign change was found and refined to the requested tolerance.
    Interior(f64),
    /// `f(lo) <= 0`: the root lies at or below the lower end.
    BelowLower(f64),
    /// `f(hi) > 0`: the root lies above the upper end.
    AboveUpper(f64),
}

impl Root {
    pub fn value(self) -> f64 {
        match self {
            Root::Interior(x) | Root::BelowLower(x) | Root::AboveUpper(x) => x,
        }
    }

    pub fn is_interior(self) -> bool {
        matches!(self, Root::Interior(_))
    }
}

/// Bisection for the root of a nonincreasing function on `[lo, hi]`,
/// refined until the bracket is narrower than `tol`.
pub fn bisect_decreasing<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Root
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    if f_lo <= 0.0 {
        return Root::BelowLower(lo);
    }
    if f(hi) > 0.0 {
        return Root::AboveUpper(hi);
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if f(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Root::Interior(0.5 * (a + b))
}
