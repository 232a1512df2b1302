//! Shared numerical machinery: quadrature, bracketed root finding and
//! derivative-free minimization.

use libm::{cosh, sinh};

const PI_HALF: f64 = core::f64::consts::FRAC_PI_2;

/// Integrates `f` over the open unit interval with tanh-sinh quadrature.
///
/// The double-exponential substitution concentrates nodes at both endpoints,
/// so integrable endpoint singularities (quantile blow-ups, vanishing tails)
/// converge as fast as smooth integrands. Levels are doubled until two
/// successive estimates agree within `tol` (absolute) or the node budget is
/// exhausted.
/// Tanh-sinh quadrature of `f(u, 1-u)` over the open unit interval.
///
/// The integrand receives both the node and its complement at full accuracy:
/// nodes are placed through `exp(-2s)` so the distance to either endpoint
/// stays meaningful down to the underflow threshold, which is what quantile
/// blow-ups at `u -> 1` need.
pub fn integrate_unit_parts(mut f: impl FnMut(f64, f64) -> f64, tol: f64) -> f64 {
    let t_max = 6.0;
    let mut h = 1.0;
    let mut sum = PI_HALF * f(0.5, 0.5); // center node, weight pi/2
    let mut prev = f64::INFINITY;
    let mut level = 0u32;
    loop {
        let k_step = if level == 0 { 1 } else { 2 };
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            let s = PI_HALF * sinh(t);
            let cosh_s = cosh(s);
            let w = PI_HALF * cosh(t) / (cosh_s * cosh_s);
            let e2s = libm::exp(-2.0 * s);
            let near = e2s / (1.0 + e2s); // distance to the closer endpoint
            let far = 1.0 / (1.0 + e2s);
            if w.is_finite() && w > 0.0 && near > 0.0 {
                sum += w * (f(near, far) + f(far, near));
            }
            k += k_step;
        }
        let estimate = 0.5 * sum * h;
        if level >= 3 && (estimate - prev).abs() <= tol {
            return estimate;
        }
        if level >= 12 {
            return estimate;
        }
        prev = estimate;
        h *= 0.5;
        level += 1;
    }
}

/// Tanh-sinh quadrature of `f(u)` over the open unit interval.
pub fn integrate_unit(mut f: impl FnMut(f64) -> f64, tol: f64) -> f64 {
    integrate_unit_parts(|u, _| f(u), tol)
}

/// Integrates `exp`-weighted tails and similar maps over `(0, 1)` where the
/// integrand may be `+inf` at isolated evaluation points; such points are
/// treated as divergence and reported as `+inf`.
pub fn integrate_unit_checked(mut f: impl FnMut(f64, f64) -> f64, tol: f64) -> f64 {
    let mut diverged = false;
    let v = integrate_unit_parts(
        |u, cu| {
            let y = f(u, cu);
            if y.is_infinite() || y.is_nan() {
                diverged = true;
                0.0
            } else {
                y
            }
        },
        tol,
    );
    if diverged {
        f64::INFINITY
    } else {
        v
    }
}

/// Bisection for a strictly decreasing function `f` with `f(lo) > 0`.
///
/// Expands `hi` by doubling until `f(hi) <= 0`, then bisects to floating
/// point resolution. Returns `None` if no sign change is found within the
/// expansion budget.
pub fn bisect_decreasing(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut f_hi = f(hi);
    let mut expand = 0;
    while f_hi > 0.0 {
        lo = hi;
        hi *= 2.0;
        f_hi = f(hi);
        expand += 1;
        if expand > 1024 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating point resolution
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
///
/// Returns the abscissa of the minimum located to absolute tolerance `tol`.
pub fn golden_min(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// Central difference with one Richardson extrapolation step.
pub fn derivative(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |f: &mut dyn FnMut(f64) -> f64, h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d_h = d(&mut f, h);
    let d_h2 = d(&mut f, h * 0.5);
    (4.0 * d_h2 - d_h) / 3.0
}

/// Mean and standard error of a sample.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

/// Binomial standard error of a proportion estimated from `n` trials.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    libm::sqrt(p * (1.0 - p) / n as f64)
}
