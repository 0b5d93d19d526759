//! One-dimensional quadrature and Gauss-Legendre rules.
//!
//! Adaptive Simpson with Richardson extrapolation is the workhorse for all
//! `d = 1` integrals (default absolute tolerance 1e-8). Integrands with
//! known kinks are split at those points first; unknown jump discontinuities
//! (decision boundaries of trained classifiers, margin-mass indicators) are
//! localized by the adaptive bisection itself. tanh-sinh handles the few
//! integrals with endpoint singularities, where Simpson stalls.

use crate::error::{Error, Result};

/// Default absolute tolerance for risk and mass integrals.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Recursion floor: intervals are never split below width ~1e-15, and a
/// depth cap bounds work on hostile integrands.
const MAX_DEPTH: u32 = 52;

#[derive(Clone, Copy, Debug)]
pub struct Quad {
    pub value: f64,
    /// Accumulated Richardson error estimate.
    pub error: f64,
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

struct Acc {
    err: f64,
}

#[allow(clippy::too_many_arguments)]
fn rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    acc: &mut Acc,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    let splittable = depth > 0 && lm > a && rm > m;
    if delta.abs() <= 15.0 * tol || !splittable {
        acc.err += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc)
        + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Non-convergence (error estimate above `tol` after exhausting the depth
/// budget, e.g. for non-integrable singularities) is reported together with
/// the achieved estimate rather than silently returned.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Quad> {
    assert!(tol > 0.0, "tolerance must be positive");
    if a == b {
        return Ok(Quad {
            value: 0.0,
            error: 0.0,
        });
    }
    assert!(a < b, "integration bounds must be ordered");
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let mut acc = Acc { err: 0.0 };
    let value = rec(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut acc);
    if acc.err.is_finite() && acc.err <= tol {
        Ok(Quad {
            value,
            error: acc.err,
        })
    } else {
        Err(Error::QuadratureNonConvergence {
            value,
            achieved: acc.err,
            requested: tol,
        })
    }
}

/// Integrates over `[a, b]` split at the interior `breakpoints` (kinks or
/// jumps known in advance). Points outside `(a, b)` are ignored; the
/// tolerance is divided across segments proportionally to length.
pub fn adaptive_simpson_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<Quad> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&c| c > a && c < b)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);
    let total = b - a;
    let mut value = 0.0;
    let mut error = 0.0;
    for w in edges.windows(2) {
        let seg_tol = tol * ((w[1] - w[0]) / total).max(1e-3);
        let q = adaptive_simpson(&f, w[0], w[1], seg_tol)?;
        value += q.value;
        error += q.error;
    }
    Ok(Quad { value, error })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence. Results are cached per order.
pub fn gauss_legendre(order: usize) -> std::sync::Arc<(Vec<f64>, Vec<f64>)> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&order) {
        return Arc::clone(hit);
    }
    let computed = Arc::new(compute_gauss_legendre(order));
    cache
        .lock()
        .unwrap()
        .entry(order)
        .or_insert(computed)
        .clone()
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (_, d2) = legendre_with_deriv(n, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// tanh-sinh (double-exponential) quadrature on `[a, b]`.
///
/// Robust to an integrable singularity at the LEFT endpoint: the integrand
/// receives the offset `x - a`, computed without cancellation, so factors
/// like `(x - a)^{-0.8}` are evaluated at exact tiny abscissas instead of
/// rounded ones. Integrals singular at `b` should be reflected by the
/// caller. Used for the weak-norm diagnostics.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Quad> {
    assert!(a < b);
    let s = 0.5 * (b - a);
    // Wide enough that the double-exponential tail is below 1e-13 even for
    // endpoint singularities as strong as x^{-0.9}.
    let t_max = 6.0f64;
    let half_pi = 0.5 * std::f64::consts::PI;
    // Node at parameter t > 0: u = tanh(v), v = (pi/2) sinh t. The stable
    // quantities are 1 - u = 2 e^{-2v} / (1 + e^{-2v}) and
    // sech^2 v = 4 e^{-2v} / (1 + e^{-2v})^2.
    //
    // Right-side nodes closer to b than roundoff in the caller's `a + off`
    // (or `b - off`) arithmetic fold onto the endpoint itself, where the
    // integrand may jump; the right end is regular by contract, so those
    // nodes are dropped instead. Left offsets stay exact and are kept all
    // the way down, which is what resolves the endpoint singularity.
    let right_cutoff = a.abs().max(b.abs()) * 1e-15;
    let eval_level = |h: f64, only_odd: bool| -> f64 {
        let mut sum = 0.0;
        let steps = (t_max / h).floor() as i64;
        let mut k = if only_odd { 1 } else { 0 };
        if k == 0 {
            sum += half_pi * f(s);
            k = 1;
        }
        while k <= steps {
            if only_odd && k % 2 == 0 {
                k += 1;
                continue;
            }
            let t = k as f64 * h;
            let v = half_pi * t.sinh();
            let e = (-2.0 * v).exp();
            let one_minus_u = 2.0 * e / (1.0 + e);
            let w = half_pi * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
            if w > 1e-300 && one_minus_u > 0.0 {
                let d_left = s * one_minus_u;
                let d_right = s * (2.0 - one_minus_u);
                let fl = f(d_left);
                if fl.is_finite() {
                    sum += w * fl;
                }
                if d_left > right_cutoff {
                    let fr = f(d_right);
                    if fr.is_finite() {
                        sum += w * fr;
                    }
                }
            }
            k += 1;
        }
        sum
    };
    let mut h = 0.5;
    let mut sum = eval_level(h, false);
    let mut prev_value = s * h * sum;
    let mut achieved = f64::INFINITY;
    for _ in 0..10 {
        h *= 0.5;
        // Old abscissas sit at even multiples of the new h; only odd ones are new.
        sum += eval_level(h, true);
        let v = s * h * sum;
        achieved = (v - prev_value).abs();
        // Absolute tolerance for order-one values, relative above; a truly
        // divergent integrand stalls at ~1e-4 relative and still errors out.
        if achieved <= tol * v.abs().max(1.0) {
            return Ok(Quad {
                value: v,
                error: achieved,
            });
        }
        prev_value = v;
    }
    Err(Error::QuadratureNonConvergence {
        value: prev_value,
        achieved,
        requested: tol,
    })
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!(n > 1);
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_is_near_exact() {
        let q = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-10).unwrap();
        // Antiderivative x^4/4 - x^2 + x: F(2) - F(-1) = 2 - 0.25 + 3 - 3 = 1.75... computed below.
        let exact = (16.0 / 4.0 - 4.0 + 2.0) - (0.25 - 1.0 - 1.0);
        assert!((q.value - exact).abs() < 1e-12);
    }

    #[test]
    fn simpson_handles_oscillation() {
        let q = adaptive_simpson(|x| (10.0 * x).sin(), 0.0, 1.0, 1e-10).unwrap();
        let exact = (1.0 - (10.0f64).cos()) / 10.0;
        assert!((q.value - exact).abs() < 1e-9);
    }

    #[test]
    fn simpson_localizes_a_jump() {
        // Step function with the jump at an awkward irrational point.
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let q = adaptive_simpson(|x| if x < c { 1.0 } else { 3.0 }, 0.0, 1.0, 1e-8).unwrap();
        let exact = c + 3.0 * (1.0 - c);
        assert!((q.value - exact).abs() < 1e-8, "err={}", (q.value - exact).abs());
    }

    #[test]
    fn simpson_reports_hard_singularity() {
        // 1/x is not integrable on (0, 1]; must error, not return garbage.
        let r = adaptive_simpson(|x| if x > 0.0 { 1.0 / x } else { 0.0 }, 0.0, 1.0, 1e-8);
        assert!(r.is_err());
    }

    #[test]
    fn split_matches_plain_on_smooth() {
        let f = |x: f64| (x * x).exp();
        let a = adaptive_simpson(f, -1.0, 1.0, 1e-10).unwrap();
        let b = adaptive_simpson_split(f, -1.0, 1.0, &[0.0, 0.5], 1e-10).unwrap();
        assert!((a.value - b.value).abs() < 1e-10);
    }

    #[test]
    fn gauss_legendre_integrates_high_degree() {
        // Order-n GL is exact for degree 2n-1.
        let gl = gauss_legendre(8);
        let (nodes, weights) = (&gl.0, &gl.1);
        let val: f64 = nodes
            .iter()
            .zip(weights)
            .map(|(&x, &w)| w * x.powi(14))
            .sum();
        assert!((val - 2.0 / 15.0).abs() < 1e-13);
        let sym: f64 = nodes.iter().sum();
        assert!(sym.abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for order in [2, 5, 24, 96, 384] {
            let gl = gauss_legendre(order);
            let s: f64 = gl.1.iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "order {order}: {s}");
        }
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2 (x here is the offset from the left end)
        let q = tanh_sinh(|x| x.powf(-0.5), 0.0, 1.0, 1e-10).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9, "got {}", q.value);
        // int_0^1 x^{-0.8} dx = 5
        let q = tanh_sinh(|x| x.powf(-0.8), 0.0, 1.0, 1e-10).unwrap();
        assert!((q.value - 5.0).abs() < 1e-9, "got {}", q.value);
        // Smooth integrand, shifted interval: int_1^3 e^x dx.
        let q = tanh_sinh(|d| (1.0 + d).exp(), 1.0, 3.0, 1e-10).unwrap();
        assert!((q.value - (3f64.exp() - 1f64.exp())).abs() < 1e-8);
    }

    #[test]
    fn mean_and_se_basics() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        let sd: f64 = (5.0f64 / 3.0).sqrt();
        assert!((se - sd / 2.0).abs() < 1e-15);
    }
}
