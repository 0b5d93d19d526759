//! The constructive smoothing operator applied to the extended target.
//!
//! For a distribution with an analytic class partition, the target
//! `f'(y) = sign(2 eta_hat(y) - 1)` is extended to the dilated domain
//! `3X` by the radial rule `eta_hat(y) = eta(y / |y|)` for `|y| > 1`, and
//!
//! ```text
//! (V g)(x) = (2 sigma^2 / pi)^{d/2} * integral_{3X} exp(-2 sigma^2 |x-y|^2) f'(y) dy
//! ```
//!
//! is evaluated by tensor-grid Gauss-Legendre quadrature. `V g` takes values
//! in `[-1, 1]` and approaches `f'` pointwise as `sigma` grows, which makes
//! `lambda * |g|_{L2}^2 + excess hinge risk of V g` an upper bound for the
//! regularized approximation error.

use crate::distributions::SyntheticDistribution;
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Point};
use crate::quad;

/// Successive tensor-grid refinements must agree to this tolerance before
/// the quadrature order is frozen.
pub const REFINE_TOL: f64 = 1e-5;

/// Per-axis Gauss-Legendre orders tried in turn during refinement.
const ORDERS: [usize; 12] = [8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384];

/// Per-axis integration window half-width: beyond `|y_i - x_i| = r_cut` the
/// Gaussian factor is below 1e-24, so each dropped tail perturbs the value
/// by less than 1e-24 per axis.
fn window_half_width(sigma: f64) -> f64 {
    (24.0 * std::f64::consts::LN_10 / 2.0).sqrt() / sigma
}

#[derive(Clone, Debug)]
pub struct ApproxWitness {
    dist: SyntheticDistribution,
    sigma: f64,
    g_norm_sq: f64,
    order: usize,
    refine_gap: f64,
}

impl ApproxWitness {
    /// Builds the witness and freezes a quadrature order: orders are raised
    /// until two consecutive levels agree within [`REFINE_TOL`] on a fixed
    /// probe grid. Errors with the achieved gap when the schedule runs out.
    pub fn new(dist: &SyntheticDistribution, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("witness width parameter must be positive and finite, got {sigma}"),
            });
        }
        let d = dist.dim();
        // |g|^2 with g = (sigma^2/pi)^{d/4} f' and |f'| = 1 a.e. on 3X:
        // (sigma^2/pi)^{d/2} * vol(3X), exact for every built-in family.
        let g_norm_sq = (sigma * sigma / std::f64::consts::PI).powf(d as f64 / 2.0)
            * 3f64.powi(d as i32)
            * unit_ball_volume(d);
        let mut w = ApproxWitness {
            dist: dist.clone(),
            sigma,
            g_norm_sq,
            order: ORDERS[0],
            refine_gap: f64::INFINITY,
        };
        let probes = probe_points(d);
        let mut prev: Vec<f64> = probes.iter().map(|p| w.eval_at_order(p, ORDERS[0])).collect();
        for &order in &ORDERS[1..] {
            let cur: Vec<f64> = probes.iter().map(|p| w.eval_at_order(p, order)).collect();
            let gap = prev
                .iter()
                .zip(&cur)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            w.order = order;
            w.refine_gap = gap;
            if gap < REFINE_TOL {
                return Ok(w);
            }
            prev = cur;
        }
        Err(Error::QuadratureNonConvergence {
            value: prev[prev.len() / 2],
            achieved: w.refine_gap,
            requested: REFINE_TOL,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dist(&self) -> &SyntheticDistribution {
        &self.dist
    }

    /// Exact squared L2 norm of the scaled target `g`.
    pub fn g_norm_sq(&self) -> f64 {
        self.g_norm_sq
    }

    /// Frozen per-axis quadrature order.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Largest probe disagreement between the last two refinement levels.
    pub fn refine_gap(&self) -> f64 {
        self.refine_gap
    }

    /// The extended target `f'(y) in {-1, 0, +1}` at arbitrary `y` in `3X`.
    pub fn target_sign(&self, coords: &[f64]) -> f64 {
        let m = self.dist.margin_hat(coords);
        if m > 0.0 {
            1.0
        } else if m < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// `(V g)(x)` at the frozen order.
    pub fn eval(&self, x: &Point) -> f64 {
        self.eval_at_order(x, self.order)
    }

    pub fn as_fn(&self) -> impl Fn(&Point) -> f64 + '_ {
        move |x| self.eval(x)
    }

    fn eval_at_order(&self, x: &Point, order: usize) -> f64 {
        let d = self.dist.dim();
        debug_assert_eq!(x.dim(), d);
        let mut y = Vec::with_capacity(d);
        let raw = self.axis_integral(&x.0, &mut y, 0, 0.0, order);
        (2.0 * self.sigma * self.sigma / std::f64::consts::PI).powf(d as f64 / 2.0) * raw
    }

    /// Integrates axis `axis` over the slice of `3X` at the prefix `y`,
    /// restricted to the window where the Gaussian factor is non-negligible,
    /// with cuts at the target's sign-change planes.
    fn axis_integral(
        &self,
        x: &[f64],
        y: &mut Vec<f64>,
        axis: usize,
        prefix_sq: f64,
        order: usize,
    ) -> f64 {
        let d = x.len();
        let radius_sq = 9.0 - prefix_sq;
        if radius_sq <= 0.0 {
            return 0.0;
        }
        let radius = radius_sq.sqrt();
        let r_cut = window_half_width(self.sigma);
        let lo = (x[axis] - r_cut).max(-radius);
        let hi = (x[axis] + r_cut).min(radius);
        if lo >= hi {
            return 0.0;
        }
        let mut cuts = vec![lo];
        for b in self.dist.witness_axis_breaks(axis) {
            if b > lo && b < hi {
                cuts.push(b);
            }
        }
        cuts.push(hi);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let rule = quad::gauss_legendre(order);
        let (nodes, weights) = (&rule.0, &rule.1);
        let s2 = 2.0 * self.sigma * self.sigma;
        let mut acc = 0.0;
        for seg in cuts.windows(2) {
            let mid = 0.5 * (seg[0] + seg[1]);
            let half = 0.5 * (seg[1] - seg[0]);
            for (&t, &wt) in nodes.iter().zip(weights) {
                let yj = mid + half * t;
                let gauss = (-s2 * (x[axis] - yj) * (x[axis] - yj)).exp();
                let inner = if axis + 1 == d {
                    y.push(yj);
                    let v = self.target_sign(y);
                    y.pop();
                    v
                } else {
                    y.push(yj);
                    let v = self.axis_integral(x, y, axis + 1, prefix_sq + yj * yj, order);
                    y.pop();
                    v
                };
                acc += half * wt * gauss * inner;
            }
        }
        acc
    }
}

fn probe_points(d: usize) -> Vec<Point> {
    if d == 1 {
        return (0..=40)
            .map(|i| Point(vec![-1.0 + i as f64 / 20.0]))
            .collect();
    }
    // Points along the splitting axis plus a golden-angle spiral in the
    // first two coordinates; covers the sign change and the ball edge.
    let mut pts = Vec::new();
    for i in 0..=20 {
        let mut c = vec![0.0; d];
        c[0] = -1.0 + i as f64 / 10.0;
        pts.push(Point(c));
    }
    for k in 1..=20 {
        let r = k as f64 / 20.0;
        let th = 2.399_963_229_728_653 * k as f64;
        let mut c = vec![0.0; d];
        c[0] = r * th.cos();
        c[1] = r * th.sin();
        pts.push(Point(c));
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_power_margin, make_separated, make_weighted_power_margin};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::function::erf::erf;

    /// Closed form for any d = 1 built-in family: the target is sign(y), so
    /// Vg(x) = (erf(s(3-x)) + 2 erf(s x) - erf(s(3+x))) / 2 with s = sqrt(2) sigma.
    fn erf_oracle(sigma: f64, x: f64) -> f64 {
        let s = std::f64::consts::SQRT_2 * sigma;
        0.5 * (erf(s * (3.0 - x)) + 2.0 * erf(s * x) - erf(s * (3.0 + x)))
    }

    #[test]
    fn matches_erf_closed_form_d1() {
        for dist in [
            make_power_margin(1.0).unwrap(),
            make_separated(0.5, 1).unwrap(),
            make_weighted_power_margin(2.0, 1.0).unwrap(),
        ] {
            for sigma in [1.0, 4.0, 16.0] {
                let w = ApproxWitness::new(&dist, sigma).unwrap();
                for i in 0..=40 {
                    let x = -1.0 + i as f64 / 20.0;
                    let got = w.eval(&Point(vec![x]));
                    let want = erf_oracle(sigma, x);
                    assert!(
                        (got - want).abs() < 2.0 * REFINE_TOL,
                        "sigma={sigma} x={x}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn values_stay_in_unit_interval() {
        for (dist, sigma) in [
            (make_power_margin(1.0).unwrap(), 2.0),
            (make_power_margin(0.5).unwrap(), 8.0),
            (make_separated(0.5, 1).unwrap(), 16.0),
            (make_separated(0.5, 2).unwrap(), 6.0),
        ] {
            let w = ApproxWitness::new(&dist, sigma).unwrap();
            for p in probe_points(dist.dim()) {
                assert!(w.eval(&p).abs() <= 1.0 + 1e-6);
            }
        }
    }

    #[test]
    fn gaussian_tail_lower_bound_on_positive_class() {
        // On the positive class, Vg(x) >= 1 - 8 exp(-sigma^2 tau^2 / (2d)).
        for (dist, sigma) in [
            (make_power_margin(1.0).unwrap(), 4.0),
            (make_power_margin(1.0).unwrap(), 8.0),
            (make_separated(0.5, 1).unwrap(), 8.0),
            (make_separated(0.5, 2).unwrap(), 6.0),
        ] {
            let d = dist.dim() as f64;
            let w = ApproxWitness::new(&dist, sigma).unwrap();
            for i in 1..=10 {
                let mut c = vec![0.0; dist.dim()];
                c[0] = i as f64 / 10.0;
                let x = Point(c);
                if dist.marginal_density(&x) == 0.0 {
                    continue;
                }
                let tau = dist.tau(&x);
                let bound = 1.0 - 8.0 * (-sigma * sigma * tau * tau / (2.0 * d)).exp();
                assert!(
                    w.eval(&x) >= bound - 1e-4,
                    "sigma={sigma} x1={}: {} < {bound}",
                    c_first(&x),
                    w.eval(&x)
                );
            }
        }
    }

    fn c_first(x: &Point) -> f64 {
        x.0[0]
    }

    #[test]
    fn separated_approaches_target_monotonically() {
        let dist = make_separated(0.5, 1).unwrap();
        for x in [Point(vec![0.3]), Point(vec![0.7]), Point(vec![-0.5])] {
            let target = w_sign(dist.margin(&x));
            let mut prev_gap = f64::INFINITY;
            for sigma in [4.0, 8.0, 16.0] {
                let w = ApproxWitness::new(&dist, sigma).unwrap();
                let gap = (w.eval(&x) - target).abs();
                assert!(gap < prev_gap + REFINE_TOL, "sigma={sigma}");
                prev_gap = gap;
            }
            assert!(prev_gap < 1e-6);
        }
    }

    fn w_sign(m: f64) -> f64 {
        if m > 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    #[test]
    fn g_norm_exact_values_and_envelope_bound() {
        let w1 = ApproxWitness::new(&make_power_margin(1.0).unwrap(), 3.0).unwrap();
        let want1 = (9.0 / std::f64::consts::PI).sqrt() * 6.0;
        assert!((w1.g_norm_sq() - want1).abs() < 1e-12);

        let w2 = ApproxWitness::new(&make_separated(0.5, 2).unwrap(), 3.0).unwrap();
        let want2 = (9.0 / std::f64::consts::PI) * 9.0 * std::f64::consts::PI;
        assert!((w2.g_norm_sq() - want2).abs() < 1e-9);

        // |g|^2 <= (81 sigma^2/pi)^{d/2} theta(d)^2 with theta the unit ball volume.
        for (d, w) in [(1usize, &w1), (2, &w2)] {
            let theta = unit_ball_volume(d);
            let cap = (81.0 * 9.0 / std::f64::consts::PI).powf(d as f64 / 2.0) * theta * theta;
            assert!(w.g_norm_sq() <= cap);
        }
    }

    #[test]
    fn balls_of_radius_tau_keep_the_class_sign() {
        // Around any x of the positive class, the extension stays above 1/2
        // on the whole ball of radius tau(x).
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for dist in [
            make_power_margin(1.0).unwrap(),
            make_separated(0.5, 1).unwrap(),
        ] {
            let mut found = 0;
            while found < 1000 {
                let x = dist.sample_marginal(&mut rng);
                if dist.margin(&x) <= 0.0 {
                    continue;
                }
                found += 1;
                let tau = dist.tau(&x);
                for _ in 0..100 {
                    let u: f64 = rng.gen_range(-1.0..1.0);
                    let y = [x.0[0] + tau * u];
                    assert!(dist.eta_hat(&y) > 0.5, "x={} y={}", x.0[0], y[0]);
                }
            }
        }
    }

    #[test]
    fn antisymmetric_in_the_split_axis() {
        let dist = make_power_margin(2.0).unwrap();
        let w = ApproxWitness::new(&dist, 5.0).unwrap();
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let s = w.eval(&Point(vec![x])) + w.eval(&Point(vec![-x]));
            assert!(s.abs() < 1e-12, "x={x}: {s}");
        }
    }

    #[test]
    fn rejects_bad_sigma() {
        let dist = make_power_margin(1.0).unwrap();
        assert!(ApproxWitness::new(&dist, 0.0).is_err());
        assert!(ApproxWitness::new(&dist, f64::NAN).is_err());
    }
}
