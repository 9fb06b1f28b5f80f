//! Adaptive Gauss-Kronrod quadrature and the distribution oracles built on
//! it. Independent of the continued-fraction and lgamma code paths.

use std::f64::consts::FRAC_PI_2;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let (val, err) = gk15(f, a, b);
    if err <= tol.max(1e-14 * val.abs()) || depth == 0 {
        return val;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, tol * 0.5, depth - 1) + adapt(f, m, b, tol * 0.5, depth - 1)
}

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|k| {
            let lo = a + h * k as f64;
            let hi = if k + 1 == PANELS { b } else { lo + h };
            adapt(&f, lo, hi, tol / PANELS as f64, 30)
        })
        .sum()
}

/// `int_0^x t^(a-1) (1-t)^(b-1) dt` scaled by `exp(-shift)`. The range is
/// split at 1/2; a power substitution removes an endpoint singularity when
/// the matching exponent is below one.
fn partial_beta(a: f64, b: f64, x: f64, shift: f64) -> f64 {
    let density = |t: f64| ((a - 1.0) * t.ln() + (b - 1.0) * (-t).ln_1p() - shift).exp();
    let left_end = x.min(0.5);
    let left = if a < 1.0 {
        // t = u^(1/a)
        integrate(
            |u: f64| ((b - 1.0) * (-u.powf(1.0 / a)).ln_1p() - shift).exp(),
            0.0,
            left_end.powf(a),
            1e-16,
        ) / a
    } else {
        integrate(density, 0.0, left_end, 1e-16)
    };
    if x <= 0.5 {
        return left;
    }
    let right = if b < 1.0 {
        // 1 - t = v^(1/b)
        integrate(
            |v: f64| ((a - 1.0) * (-v.powf(1.0 / b)).ln_1p() - shift).exp(),
            (1.0 - x).powf(b),
            0.5f64.powf(b),
            1e-16,
        ) / b
    } else {
        integrate(density, 0.5, x, 1e-16)
    };
    left + right
}

/// Quadrature oracle for the regularized incomplete beta.
pub fn inc_beta_oracle(a: f64, b: f64, x: f64) -> f64 {
    let shift = if a > 1.0 && b > 1.0 {
        let mode = (a - 1.0) / (a + b - 2.0);
        (a - 1.0) * mode.ln() + (b - 1.0) * (1.0 - mode).ln()
    } else {
        0.0
    };
    partial_beta(a, b, x, shift) / partial_beta(a, b, 1.0, shift)
}

/// Quadrature oracle for the upper tail of Student's t (`nu >= 1`), via
/// `x = sqrt(nu) tan(theta)`.
pub fn t_sf_oracle(t: f64, nu: f64) -> f64 {
    let g = |th: f64| th.cos().powf(nu - 1.0);
    let total = integrate(g, 0.0, FRAC_PI_2, 1e-16);
    let theta = (t.abs() / nu.sqrt()).atan();
    let upper = integrate(g, theta, FRAC_PI_2, 1e-16) / (2.0 * total);
    if t >= 0.0 {
        upper
    } else {
        1.0 - upper
    }
}

/// Quadrature oracle for the upper tail of F(d1, d2), through the beta
/// representation of its distribution function.
pub fn f_sf_oracle(x: f64, d1: f64, d2: f64) -> f64 {
    inc_beta_oracle(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))
}
