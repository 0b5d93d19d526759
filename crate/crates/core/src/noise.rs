//! Noise functionals of a synthetic distribution and exponent fits.
//!
//! Three ways of quantifying label noise near the decision boundary are
//! computed here: the margin mass `P_X(|2 eta - 1| <= t)` with its power-law
//! exponent `q`, the Gaussian-weighted boundary integral
//! `E |2 eta - 1| exp(-tau^2 / t)` with its exponent `alpha` (power `alpha
//! d / 2` in `t`), and the envelope order `gamma` of the pointwise bound
//! `|2 eta - 1| <= c tau^gamma`. An envelope of order `gamma` combined with
//! margin exponent `q >= 1` predicts `alpha = (q + 1) gamma / d`; for
//! `q < 1` only exponents strictly below that value are guaranteed, which
//! the prediction flags as an open range.

use crate::distributions::{
    self, Estimate, Family, RiskConfig, SyntheticDistribution,
};
use crate::error::{Error, Result};
use crate::fitting::{self, LogLogFit};
use crate::geometry::Point;
use crate::quad;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fitted geometric slopes at or above this value are reported as infinity
/// (super-polynomial decay, e.g. strictly separated classes).
pub const ALPHA_INF_THRESHOLD: f64 = 25.0;

/// Points with `tau` below this radius are excluded from envelope ratios
/// (the ratio is 0/0 on the boundary itself).
pub const ENVELOPE_EXCLUSION_RADIUS: f64 = 1e-4;

/// Seed for the `d >= 2` envelope/fit evaluation grids.
const GRID_SEED: u64 = 0x454E_5630;

/// Default grid for margin-mass fits: 8 points log-spaced on [0.01, 0.3].
pub fn default_mass_grid() -> Vec<f64> {
    log_grid(0.01, 0.3, 8)
}

/// Default grid for geometric-integral fits: 8 points on [1e-3, 0.1].
pub fn default_geometric_grid() -> Vec<f64> {
    log_grid(1e-3, 0.1, 8)
}

pub fn log_grid(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && len >= 2);
    let ratio = (hi / lo).ln();
    (0..len)
        .map(|i| lo * (ratio * i as f64 / (len - 1) as f64).exp())
        .collect()
}

/// `P_X(|2 eta - 1| <= t)`.
pub fn margin_mass(dist: &SyntheticDistribution, t: f64, cfg: &RiskConfig) -> Result<Estimate> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("margin level must be positive, got {t}"),
        });
    }
    let indicator = |x: &Point| {
        if dist.margin(x).abs() <= t {
            1.0
        } else {
            0.0
        }
    };
    let est = if dist.dim() == 1 {
        let q = distributions::integrate_marginal_extra(
            dist,
            |v| indicator(&Point(vec![v])),
            &mass_jumps(dist, t),
            cfg.quad_tol,
        )?;
        Estimate {
            value: q.value,
            error: q.error,
        }
    } else {
        distributions::mc_expect(dist, indicator, cfg)
    };
    Ok(Estimate {
        value: est.value.clamp(0.0, 1.0),
        error: est.error,
    })
}

/// Interior points where the mass indicator at level `t` jumps.
fn mass_jumps(dist: &SyntheticDistribution, t: f64) -> Vec<f64> {
    match *dist.family() {
        Family::PowerMargin { gamma } | Family::WeightedPowerMargin { gamma, .. } => {
            let r = t.powf(1.0 / gamma);
            if r < 1.0 {
                vec![-r, r]
            } else {
                vec![]
            }
        }
        Family::Separated { .. } => vec![],
    }
}

#[derive(Clone, Debug)]
pub struct TsybakovFit {
    /// Fitted margin exponent; infinite when every grid mass vanishes.
    pub q_hat: f64,
    /// Fitted constant of the power law `mass = C t^q`.
    pub c_hat: f64,
    /// Log-log diagnostics; `None` in the all-zero (infinite) case.
    pub fit: Option<LogLogFit>,
}

/// Least-squares power-law fit of the margin mass over `t_grid`.
pub fn fit_tsybakov(
    dist: &SyntheticDistribution,
    t_grid: &[f64],
    cfg: &RiskConfig,
) -> Result<TsybakovFit> {
    if t_grid.len() < 5 {
        return Err(Error::TooFewFitPoints {
            needed: 5,
            got: t_grid.len(),
        });
    }
    for w in t_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter {
                name: "t_grid",
                reason: "mass grid must be strictly increasing".into(),
            });
        }
    }
    if !(t_grid[0] > 0.0 && t_grid[t_grid.len() - 1] < 1.0) {
        return Err(Error::InvalidParameter {
            name: "t_grid",
            reason: "mass grid must lie inside (0, 1)".into(),
        });
    }
    let masses: Vec<f64> = t_grid
        .iter()
        .map(|&t| margin_mass(dist, t, cfg).map(|e| e.value))
        .collect::<Result<_>>()?;
    if masses.iter().all(|&m| m <= 0.0) {
        return Ok(TsybakovFit {
            q_hat: f64::INFINITY,
            c_hat: 0.0,
            fit: None,
        });
    }
    let fit = fitting::ols_loglog(t_grid, &masses)?;
    Ok(TsybakovFit {
        q_hat: fit.slope,
        c_hat: fit.intercept.exp(),
        fit: Some(fit),
    })
}

/// `E |2 eta - 1| exp(-tau^2 / t)`.
pub fn geometric_integral(
    dist: &SyntheticDistribution,
    t: f64,
    cfg: &RiskConfig,
) -> Result<Estimate> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("scale must be positive, got {t}"),
        });
    }
    let weight = |x: &Point| {
        let tau = dist.tau(x);
        dist.margin(x).abs() * (-tau * tau / t).exp()
    };
    if dist.dim() == 1 {
        // The integrand is a spike of width ~sqrt(t) at the origin; small t
        // hides it from the initial subdivision unless nodes are forced in.
        let mut cuts = Vec::new();
        for k in [1.0, 3.0, 9.0] {
            let b = k * t.sqrt();
            if b < 1.0 {
                cuts.push(b);
                cuts.push(-b);
            }
        }
        let q = distributions::integrate_marginal_extra(
            dist,
            |v| weight(&Point(vec![v])),
            &cuts,
            cfg.quad_tol,
        )?;
        Ok(Estimate {
            value: q.value,
            error: q.error,
        })
    } else {
        Ok(distributions::mc_expect(dist, weight, cfg))
    }
}

#[derive(Clone, Debug)]
pub struct GeometricFit {
    /// `2 slope / d`; infinite when the local slope keeps growing as
    /// `t -> 0` (super-polynomial decay) or exceeds [`ALPHA_INF_THRESHOLD`].
    pub alpha_hat: f64,
    pub slope: f64,
    pub fit: LogLogFit,
}

/// Power-law fit of the boundary integral; `t_grid` should stay small
/// (default caps at 0.1) so the asymptotic regime dominates.
///
/// A genuine geometric exponent makes the log-log slope stabilize as
/// `t -> 0`. Classes with a margin gap decay like `exp(-c/t)` instead, so
/// the small-`t` half of the grid fits a much steeper slope than the
/// large-`t` half; that divergence is reported as `alpha_hat = inf`.
pub fn fit_geometric(
    dist: &SyntheticDistribution,
    t_grid: &[f64],
    cfg: &RiskConfig,
) -> Result<GeometricFit> {
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "t_grid",
            reason: "scales must be positive".into(),
        });
    }
    let values: Vec<f64> = t_grid
        .iter()
        .map(|&t| geometric_integral(dist, t, cfg).map(|e| e.value))
        .collect::<Result<_>>()?;
    // Non-positive integrals drop out inside the log-log fit.
    let fit = fitting::ols_loglog(t_grid, &values)?;
    let alpha = 2.0 * fit.slope / dist.dim() as f64;
    let mut growing = false;
    let half = t_grid.len() / 2;
    if half >= 3 && t_grid.len() - half >= 3 {
        let lo = fitting::ols_loglog(&t_grid[..half], &values[..half]);
        let hi = fitting::ols_loglog(&t_grid[half..], &values[half..]);
        if let (Ok(lo), Ok(hi)) = (lo, hi) {
            growing = lo.slope > 2.0 * hi.slope + 1.0;
        }
    }
    Ok(GeometricFit {
        alpha_hat: if growing || alpha >= ALPHA_INF_THRESHOLD {
            f64::INFINITY
        } else {
            alpha
        },
        slope: fit.slope,
        fit,
    })
}

/// Support points used by the envelope estimates: a dense axis grid for
/// `d = 1`, seeded marginal draws otherwise; boundary-adjacent and
/// zero-density points are excluded.
fn envelope_grid(dist: &SyntheticDistribution) -> Vec<Point> {
    let mut pts = Vec::new();
    if dist.dim() == 1 {
        let m = 8192;
        for i in 0..=m {
            let x = Point(vec![-1.0 + 2.0 * i as f64 / m as f64]);
            if dist.tau(&x) >= ENVELOPE_EXCLUSION_RADIUS && dist.marginal_density(&x) > 0.0 {
                pts.push(x);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(GRID_SEED);
        while pts.len() < 8192 {
            let x = dist.sample_marginal(&mut rng);
            if dist.tau(&x) >= ENVELOPE_EXCLUSION_RADIUS {
                pts.push(x);
            }
        }
    }
    pts
}

/// Smallest constant making `|2 eta - 1| <= c tau^gamma` hold on the
/// evaluation grid.
pub fn envelope_constant(dist: &SyntheticDistribution, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("envelope order must be positive, got {gamma}"),
        });
    }
    Ok(envelope_grid(dist)
        .iter()
        .map(|x| dist.margin(x).abs() / dist.tau(x).powf(gamma))
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug)]
pub struct EnvelopeFit {
    pub gamma_hat: f64,
    /// Envelope constant at the fitted order.
    pub c_hat: f64,
    pub fit: LogLogFit,
}

/// Fits `log |2 eta - 1| ~ gamma log tau` over the support grid.
pub fn fit_envelope(dist: &SyntheticDistribution) -> Result<EnvelopeFit> {
    let pts = envelope_grid(dist);
    let taus: Vec<f64> = pts.iter().map(|x| dist.tau(x)).collect();
    let margins: Vec<f64> = pts.iter().map(|x| dist.margin(x).abs()).collect();
    let fit = fitting::ols_loglog(&taus, &margins)?;
    let gamma_hat = fit.slope.max(0.0);
    let c_hat = if gamma_hat > 0.0 {
        envelope_constant(dist, gamma_hat)?
    } else {
        margins.iter().copied().fold(0.0, f64::max)
    };
    Ok(EnvelopeFit {
        gamma_hat,
        c_hat,
        fit,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredictedAlpha {
    pub alpha: f64,
    /// For `q < 1` only exponents strictly below `alpha` are guaranteed.
    pub open_range: bool,
}

/// Geometric exponent `(q + 1) gamma / d` implied by an envelope of order
/// `gamma` together with margin exponent `q`.
pub fn predicted_alpha_from_envelope(q: f64, gamma: f64, d: usize) -> Result<PredictedAlpha> {
    if !(gamma > 0.0) || q < 0.0 || q.is_nan() || d == 0 {
        return Err(Error::InvalidParameter {
            name: "q/gamma/d",
            reason: format!("need gamma > 0, q >= 0, d >= 1; got q={q}, gamma={gamma}, d={d}"),
        });
    }
    Ok(PredictedAlpha {
        alpha: (q + 1.0) * gamma / d as f64,
        open_range: q < 1.0,
    })
}

/// `(integral tau^{-p} |2 eta - 1| dP_X)^{1/p}`, the weak-norm diagnostic
/// whose finiteness certifies geometric exponent `p / d`. Divergent
/// integrals surface as quadrature non-convergence.
pub fn tau_inverse_lebesgue_norm(
    dist: &SyntheticDistribution,
    p: f64,
    cfg: &RiskConfig,
) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("norm exponent must be positive, got {p}"),
        });
    }
    let h = |x: &Point| {
        dist.margin(x).abs() * dist.marginal_density(x) * dist.tau(x).powf(-p)
    };
    if dist.dim() == 1 {
        // tau vanishes only at segment endpoints, so integrate each segment
        // with the double-exponential rule, reflected when the smaller tau
        // sits at the right end.
        let mut cuts = vec![-1.0];
        cuts.extend(dist.quad_breakpoints());
        cuts.push(1.0);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let mut total = 0.0;
        for seg in cuts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if a >= b {
                continue;
            }
            let tau_a = dist.tau(&Point(vec![a]));
            let tau_b = dist.tau(&Point(vec![b]));
            let q = if tau_a <= tau_b {
                quad::tanh_sinh(|off| h(&Point(vec![a + off])), a, b, cfg.quad_tol)?
            } else {
                quad::tanh_sinh(|off| h(&Point(vec![b - off])), a, b, cfg.quad_tol)?
            };
            total += q.value;
        }
        Ok(total.max(0.0).powf(1.0 / p))
    } else {
        // Bounded away from the boundary for the only d >= 2 family, so a
        // plain Monte Carlo mean of tau^{-p} |2 eta - 1| suffices.
        let est = distributions::mc_expect(
            dist,
            |x| dist.margin(x).abs() * dist.tau(x).powf(-p),
            cfg,
        );
        Ok(est.value.max(0.0).powf(1.0 / p))
    }
}

/// All fitted exponents for one distribution, with fit diagnostics.
#[derive(Clone, Debug)]
pub struct NoiseReport {
    pub family: String,
    pub d: usize,
    pub q_hat: f64,
    pub c_hat: f64,
    pub q_r2: Option<f64>,
    pub alpha_hat: f64,
    pub alpha_slope: f64,
    pub alpha_r2: f64,
    pub gamma_hat: f64,
    pub c_gamma_hat: f64,
    pub gamma_r2: f64,
    pub mass_grid: (f64, f64, usize),
    pub geo_grid: (f64, f64, usize),
}

pub fn noise_report(
    dist: &SyntheticDistribution,
    mass_grid: &[f64],
    geo_grid: &[f64],
    cfg: &RiskConfig,
) -> Result<NoiseReport> {
    let ts = fit_tsybakov(dist, mass_grid, cfg)?;
    let geo = fit_geometric(dist, geo_grid, cfg)?;
    let env = fit_envelope(dist)?;
    Ok(NoiseReport {
        family: dist.family().to_string(),
        d: dist.dim(),
        q_hat: ts.q_hat,
        c_hat: ts.c_hat,
        q_r2: ts.fit.map(|f| f.r2),
        alpha_hat: geo.alpha_hat,
        alpha_slope: geo.slope,
        alpha_r2: geo.fit.r2,
        gamma_hat: env.gamma_hat,
        c_gamma_hat: env.c_hat,
        gamma_r2: env.fit.r2,
        mass_grid: (mass_grid[0], mass_grid[mass_grid.len() - 1], mass_grid.len()),
        geo_grid: (geo_grid[0], geo_grid[geo_grid.len() - 1], geo_grid.len()),
    })
}

impl NoiseReport {
    /// Key = value lines; floats print in shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("family = {}\n", self.family));
        s.push_str(&format!("d = {}\n", self.d));
        s.push_str(&format!("q_hat = {}\n", self.q_hat));
        s.push_str(&format!("c_hat = {}\n", self.c_hat));
        match self.q_r2 {
            Some(r2) => s.push_str(&format!("q_r2 = {r2}\n")),
            None => s.push_str("q_r2 = none\n"),
        }
        s.push_str(&format!("alpha_hat = {}\n", self.alpha_hat));
        s.push_str(&format!("alpha_slope = {}\n", self.alpha_slope));
        s.push_str(&format!("alpha_r2 = {}\n", self.alpha_r2));
        s.push_str(&format!("gamma_hat = {}\n", self.gamma_hat));
        s.push_str(&format!("c_gamma_hat = {}\n", self.c_gamma_hat));
        s.push_str(&format!("gamma_r2 = {}\n", self.gamma_r2));
        s.push_str(&format!(
            "mass_grid = {}..{} ({} points)\n",
            self.mass_grid.0, self.mass_grid.1, self.mass_grid.2
        ));
        s.push_str(&format!(
            "geo_grid = {}..{} ({} points)\n",
            self.geo_grid.0, self.geo_grid.1, self.geo_grid.2
        ));
        s
    }

    pub fn summary_header() -> &'static str {
        "family,d,q_hat,c_hat,alpha_hat,gamma_hat,c_gamma_hat"
    }

    pub fn summary_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.family, self.d, self.q_hat, self.c_hat, self.alpha_hat, self.gamma_hat,
            self.c_gamma_hat
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_power_margin, make_separated, make_weighted_power_margin};

    fn cfg() -> RiskConfig {
        RiskConfig::default()
    }

    #[test]
    fn margin_mass_closed_forms() {
        let d = make_power_margin(1.0).unwrap();
        let m = margin_mass(&d, 0.3, &cfg()).unwrap();
        assert!((m.value - 0.3).abs() < 1e-7, "{}", m.value);
        let m = margin_mass(&d, 1.0, &cfg()).unwrap();
        assert!((m.value - 1.0).abs() < 1e-9);

        let w = make_weighted_power_margin(1.0, 2.0).unwrap();
        let m = margin_mass(&w, 0.2, &cfg()).unwrap();
        assert!((m.value - 0.04).abs() < 1e-7, "{}", m.value);

        let s = make_separated(0.5, 1).unwrap();
        let m = margin_mass(&s, 0.5, &cfg()).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn margin_mass_monotone_and_bounded() {
        let d = make_power_margin(2.0).unwrap();
        let mut prev = 0.0;
        for t in log_grid(0.01, 0.99, 10) {
            let m = margin_mass(&d, t, &cfg()).unwrap().value;
            assert!(m >= prev - 1e-9);
            assert!(m <= 1.0);
            prev = m;
        }
    }

    #[test]
    fn tsybakov_fits_recover_exponents() {
        for gamma in [0.5, 1.0, 2.0] {
            let d = make_power_margin(gamma).unwrap();
            let fit = fit_tsybakov(&d, &default_mass_grid(), &cfg()).unwrap();
            assert!(
                (fit.q_hat - 1.0 / gamma).abs() <= 0.1,
                "gamma={gamma}: q_hat={}",
                fit.q_hat
            );
            assert!(fit.fit.unwrap().r2 > 0.999);
        }
        let w = make_weighted_power_margin(1.0, 2.0).unwrap();
        let fit = fit_tsybakov(&w, &default_mass_grid(), &cfg()).unwrap();
        assert!((fit.q_hat - 2.0).abs() <= 0.1);

        let s = make_separated(0.5, 1).unwrap();
        let fit = fit_tsybakov(&s, &default_mass_grid(), &cfg()).unwrap();
        assert!(fit.q_hat.is_infinite());
        assert!(fit.fit.is_none());
    }

    #[test]
    fn degenerate_mass_grids_rejected() {
        let d = make_power_margin(1.0).unwrap();
        assert!(fit_tsybakov(&d, &[0.1, 0.2, 0.3], &cfg()).is_err());
        assert!(fit_tsybakov(&d, &[0.1, 0.1, 0.2, 0.3, 0.4], &cfg()).is_err());
        assert!(fit_tsybakov(&d, &[0.1, 0.2, 0.3, 0.4, 1.5], &cfg()).is_err());
    }

    #[test]
    fn geometric_integral_limits() {
        let d = make_power_margin(1.0).unwrap();
        // Large t: the weight approaches 1 and the integral approaches
        // E|2 eta - 1| = E|x| = 1/2.
        let v = geometric_integral(&d, 1e6, &cfg()).unwrap().value;
        assert!((v - 0.5).abs() < 1e-5, "{v}");
        let lo = geometric_integral(&d, 0.01, &cfg()).unwrap().value;
        let hi = geometric_integral(&d, 0.1, &cfg()).unwrap().value;
        assert!(lo < hi);

        let s = make_separated(0.5, 1).unwrap();
        let v = geometric_integral(&s, 0.01, &cfg()).unwrap().value;
        assert!(v <= (-0.25f64 * 0.25 / 0.01).exp());
    }

    #[test]
    fn geometric_fits_recover_exponents() {
        let cases: [(SyntheticDistribution, f64, f64); 4] = [
            (make_power_margin(1.0).unwrap(), 2.0, 0.15),
            (make_power_margin(2.0).unwrap(), 3.0, 0.15),
            (make_weighted_power_margin(1.0, 2.0).unwrap(), 3.0, 0.15),
            (make_weighted_power_margin(2.0, 1.0).unwrap(), 4.0, 0.2),
        ];
        for (dist, want, tol) in cases {
            let fit = fit_geometric(&dist, &default_geometric_grid(), &cfg()).unwrap();
            assert!(
                (fit.alpha_hat - want).abs() <= tol,
                "{}: alpha_hat={}",
                dist.family(),
                fit.alpha_hat
            );
        }
        let s = make_separated(0.5, 1).unwrap();
        let fit = fit_geometric(&s, &default_geometric_grid(), &cfg()).unwrap();
        assert!(fit.alpha_hat.is_infinite(), "slope {}", fit.slope);
    }

    #[test]
    fn envelope_constants_and_orders() {
        for gamma in [0.5, 1.0, 2.0] {
            let d = make_power_margin(gamma).unwrap();
            let c = envelope_constant(&d, gamma).unwrap();
            assert!((c - 1.0).abs() <= 1e-3, "gamma={gamma}: c={c}");
            let fit = fit_envelope(&d).unwrap();
            assert!((fit.gamma_hat - gamma).abs() < 0.01);
        }
        // Order above the true one: the ratio blows up near the boundary.
        // The grid resolves tau down to 2/8192, capping the ratio at 4096.
        let d = make_power_margin(1.0).unwrap();
        let c = envelope_constant(&d, 2.0).unwrap();
        assert!(c >= 4000.0, "c={c}");
    }

    #[test]
    fn predicted_alpha_formula() {
        let p = predicted_alpha_from_envelope(1.0, 1.0, 1).unwrap();
        assert_eq!(p.alpha, 2.0);
        assert!(!p.open_range);
        let p = predicted_alpha_from_envelope(0.5, 2.0, 1).unwrap();
        assert_eq!(p.alpha, 3.0);
        assert!(p.open_range);
        let p = predicted_alpha_from_envelope(f64::INFINITY, 1.0, 2).unwrap();
        assert!(p.alpha.is_infinite());
        assert!(predicted_alpha_from_envelope(1.0, 0.0, 1).is_err());
    }

    #[test]
    fn envelope_q_prediction_matches_geometric_fit() {
        // (gamma, q) pairs and the predicted alpha = (q+1) gamma at d = 1.
        for (dist, q, gamma, tol) in [
            (make_power_margin(1.0).unwrap(), 1.0, 1.0, 0.2),
            (make_weighted_power_margin(1.0, 2.0).unwrap(), 2.0, 1.0, 0.2),
            (make_weighted_power_margin(2.0, 1.0).unwrap(), 1.0, 2.0, 0.2),
        ] {
            let pred = predicted_alpha_from_envelope(q, gamma, 1).unwrap();
            let fit = fit_geometric(&dist, &default_geometric_grid(), &cfg()).unwrap();
            assert!(
                (fit.alpha_hat - pred.alpha).abs() <= tol,
                "{}: {} vs {}",
                dist.family(),
                fit.alpha_hat,
                pred.alpha
            );
        }
    }

    #[test]
    fn weak_norm_finite_iff_below_threshold() {
        let d = make_power_margin(1.0).unwrap();
        // p = 1.5: integrand x^{-0.5}/2 per side, total 2^{2/3} after the root.
        let norm = tau_inverse_lebesgue_norm(&d, 1.5, &cfg()).unwrap();
        assert!((norm - 2.0f64.powf(2.0 / 3.0)).abs() < 1e-6, "{norm}");
        // Borderline p = alpha d = 2 diverges.
        assert!(tau_inverse_lebesgue_norm(&d, 2.0, &cfg()).is_err());

        // Finiteness at p below alpha d certifies the fitted exponent.
        let p = 1.7;
        assert!(tau_inverse_lebesgue_norm(&d, p, &cfg()).is_ok());
        let fit = fit_geometric(&d, &default_geometric_grid(), &cfg()).unwrap();
        assert!(fit.alpha_hat >= p - 0.2);

        // Separated classes: finite for huge p, consistent with alpha = inf.
        let s = make_separated(0.5, 1).unwrap();
        let norm = tau_inverse_lebesgue_norm(&s, 20.0, &cfg()).unwrap();
        assert!(norm.is_finite());
    }

    #[test]
    fn report_serializes_every_estimate() {
        let d = make_weighted_power_margin(1.0, 2.0).unwrap();
        let r = noise_report(&d, &default_mass_grid(), &default_geometric_grid(), &cfg()).unwrap();
        let text = r.to_text();
        for key in [
            "family", "q_hat", "c_hat", "q_r2", "alpha_hat", "alpha_r2", "gamma_hat",
            "c_gamma_hat", "gamma_r2", "mass_grid", "geo_grid",
        ] {
            assert!(text.contains(key), "missing {key} in:\n{text}");
        }
        assert!(r.summary_row().split(',').count() == NoiseReport::summary_header().split(',').count());
        assert!((r.q_hat - 2.0).abs() < 0.1);
        assert!((r.alpha_hat - 3.0).abs() < 0.2);
        assert!((r.gamma_hat - 1.0).abs() < 0.05);
    }
}
