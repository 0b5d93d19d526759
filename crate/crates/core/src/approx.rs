//! The approximation error function `a_sigma(lambda)`: the infimum of
//! `lambda ||f||_H^2` plus excess hinge risk over the Gaussian RKHS of
//! width `1/sigma`. Two independent upper-bound routes are computed (a
//! constructive smoothed-target witness and a dense-sample solve) and
//! compared against the envelope `sigma^d lambda + C (2d)^{alpha d/2}
//! sigma^{-alpha d}` whose unknown dimensional constant is estimated by a
//! ratio scan.

use rayon::prelude::*;

use crate::distributions::{self, RiskConfig, SyntheticDistribution};
use crate::error::{Error, Result};
use crate::fitting::{self, LogLogFit};
use crate::kernel::GaussianKernel;
use crate::seed;
use crate::solver::{self, SvmProblem};
use crate::witness::ApproxWitness;

/// `lambda ||g||^2 + excess hinge risk of Vg` for a prebuilt witness.
///
/// `Vg` lies in the RKHS with norm at most `||g||_2`, so this is an upper
/// bound on `a_sigma(lambda)`; it is at least `lambda ||g||^2` up to the
/// risk quadrature tolerance because the excess term is nonnegative.
pub fn witness_value_at(witness: &ApproxWitness, lambda: f64, cfg: &RiskConfig) -> Result<f64> {
    check_lambda(lambda)?;
    let excess = distributions::excess_hinge_direct(witness.dist(), witness.as_fn(), cfg)?;
    Ok(lambda * witness.g_norm_sq() + excess.value.max(0.0))
}

/// Constructive upper bound on `a_sigma(lambda)`; builds the witness fresh.
/// Grid scans should build one [`ApproxWitness`] per sigma and use
/// [`witness_value_at`].
pub fn approx_error_witness(
    dist: &SyntheticDistribution,
    sigma: f64,
    lambda: f64,
    cfg: &RiskConfig,
) -> Result<f64> {
    let w = ApproxWitness::new(dist, sigma)?;
    witness_value_at(&w, lambda, cfg)
}

/// Excess hinge risk of the zero function, `E |2 eta - 1|`. The zero
/// function is always feasible, so this caps `a_sigma(lambda)` at one.
pub fn zero_route_value(dist: &SyntheticDistribution, cfg: &RiskConfig) -> Result<f64> {
    Ok(1.0 - distributions::hinge_risk_min(dist, cfg)?.value)
}

/// Dense-sample route, one value per seed plus the aggregate.
#[derive(Clone, Debug)]
pub struct EmpiricalApprox {
    /// Mean of the per-seed upper bounds.
    pub value: f64,
    /// Max minus min across seeds; the sampling-error scale.
    pub spread: f64,
    pub per_seed: Vec<f64>,
}

const EMPIRICAL_SEEDS: u64 = 3;

/// Trains the no-offset SVM on dense samples and evaluates
/// `lambda ||f||_H^2` plus the population excess hinge risk by quadrature.
/// Every trained `f` is in the RKHS, so each per-seed value upper-bounds
/// `a_sigma(lambda)` up to solver and quadrature tolerance.
pub fn approx_error_empirical(
    dist: &SyntheticDistribution,
    sigma: f64,
    lambda: f64,
    n_dense: usize,
    base_seed: u64,
    cfg: &RiskConfig,
) -> Result<EmpiricalApprox> {
    check_lambda(lambda)?;
    if n_dense < 1000 {
        return Err(Error::InvalidParameter {
            name: "n_dense",
            reason: format!("dense route needs at least 1000 samples, got {n_dense}"),
        });
    }
    let kernel = GaussianKernel::new(sigma)?;
    let per_seed = (0..EMPIRICAL_SEEDS)
        .map(|k| {
            let ts = dist.sample(n_dense, seed::derive(base_seed, &[0x6170_7072, k]))?;
            let problem = SvmProblem::new(ts, lambda, kernel.clone(), false)?;
            let tol = problem.default_tol();
            let sol = solver::train(&problem, tol)?;
            let excess =
                distributions::excess_hinge_direct(dist, sol.expansion.as_fn(), cfg)?;
            Ok(lambda * sol.expansion.rkhs_norm_sq() + excess.value.max(0.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let value = per_seed.iter().sum::<f64>() / per_seed.len() as f64;
    let spread = per_seed.iter().cloned().fold(f64::MIN, f64::max)
        - per_seed.iter().cloned().fold(f64::MAX, f64::min);
    Ok(EmpiricalApprox {
        value,
        spread,
        per_seed,
    })
}

/// The width that balances the two envelope terms: `lambda^{-1/((alpha+1)d)}`.
/// With `alpha = inf` the coupling degenerates; any fixed width beyond
/// `2 sqrt(d)` works there, and `2 sqrt(d) + 1` is returned.
pub fn optimal_sigma(lambda: f64, alpha: f64, d: usize) -> Result<f64> {
    check_lambda(lambda)?;
    check_alpha(alpha)?;
    check_dim(d)?;
    if alpha.is_infinite() {
        return Ok(2.0 * (d as f64).sqrt() + 1.0);
    }
    Ok(lambda.powf(-1.0 / ((alpha + 1.0) * d as f64)))
}

/// OLS slope of `log` witness value against `log lambda` with the width
/// coupled to lambda. Finite alpha uses [`optimal_sigma`]; `alpha = inf`
/// holds sigma fixed at `fixed_sigma` (default `2 sqrt(d) + 1`), where the
/// value decays linearly in lambda once the risk term is negligible.
pub fn decay_slope(
    dist: &SyntheticDistribution,
    lambda_grid: &[f64],
    alpha: f64,
    d: usize,
    fixed_sigma: Option<f64>,
    cfg: &RiskConfig,
) -> Result<LogLogFit> {
    check_alpha(alpha)?;
    check_dim(d)?;
    check_grid("lambda_grid", lambda_grid, 4)?;
    let values = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let sigma = if alpha.is_infinite() {
                let s = fixed_sigma.unwrap_or(2.0 * (d as f64).sqrt() + 1.0);
                if s <= 2.0 * (d as f64).sqrt() {
                    return Err(Error::InvalidParameter {
                        name: "fixed_sigma",
                        reason: format!("separable regime needs sigma > 2 sqrt(d), got {s}"),
                    });
                }
                s
            } else {
                optimal_sigma(lambda, alpha, d)?
            };
            approx_error_witness(dist, sigma, lambda, cfg)
        })
        .collect::<Result<Vec<f64>>>()?;
    let fit = fitting::ols_loglog(lambda_grid, &values)?;
    // Positive slope convention: the value decays as lambda -> 0.
    Ok(fit)
}

/// Envelope right-hand side without its dimensional constant:
/// `sigma^d lambda + c_geo (2d)^{alpha d / 2} sigma^{-alpha d}`.
/// Requires finite alpha; `c_geo` comes from `fit_geometric`'s constant or
/// the family's analytic value.
pub fn approx_bound_rhs(sigma: f64, lambda: f64, alpha: f64, c_geo: f64, d: usize) -> f64 {
    assert!(alpha.is_finite() && alpha > 0.0, "finite positive alpha");
    assert!(sigma > 0.0 && lambda > 0.0 && c_geo > 0.0 && d >= 1);
    let df = d as f64;
    sigma.powi(d as i32) * lambda + c_geo * (2.0 * df).powf(alpha * df / 2.0) * sigma.powf(-alpha * df)
}

/// One grid cell of the scan table.
#[derive(Clone, Copy, Debug)]
pub struct ApproxErrorPoint {
    pub lambda: f64,
    pub sigma: f64,
    /// Best constructive bound: witness route min'd with the zero
    /// function's excess, so it never exceeds one.
    pub a_upper_witness: f64,
    /// Dense-sample route mean; absent when the scan skips training.
    pub a_upper_empirical: Option<f64>,
    pub bound_rhs: f64,
}

impl ApproxErrorPoint {
    /// Constructive bound over envelope; the scan's max stands in for the
    /// unknown dimensional constant.
    pub fn ratio(&self) -> f64 {
        self.a_upper_witness / self.bound_rhs
    }

    pub fn csv_header() -> &'static str {
        "sigma,lambda,a_upper_witness,a_upper_empirical,bound_rhs,ratio"
    }

    pub fn csv_row(&self) -> String {
        let emp = match self.a_upper_empirical {
            Some(v) => format!("{v}"),
            None => String::new(),
        };
        format!(
            "{},{},{},{},{},{}",
            self.sigma,
            self.lambda,
            self.a_upper_witness,
            emp,
            self.bound_rhs,
            self.ratio()
        )
    }
}

/// Dense-route settings for [`grid_scan`]: sample size and base seed.
#[derive(Clone, Copy, Debug)]
pub struct EmpiricalSettings {
    pub n_dense: usize,
    pub base_seed: u64,
}

/// Full scan over a `(sigma, lambda)` grid. One witness per sigma; rows
/// come out in grid order (sigma-major) regardless of parallel execution.
pub fn grid_scan(
    dist: &SyntheticDistribution,
    sigma_grid: &[f64],
    lambda_grid: &[f64],
    alpha: f64,
    c_geo: f64,
    empirical: Option<EmpiricalSettings>,
    cfg: &RiskConfig,
) -> Result<Vec<ApproxErrorPoint>> {
    check_grid("sigma_grid", sigma_grid, 1)?;
    check_grid("lambda_grid", lambda_grid, 1)?;
    let zero_route = zero_route_value(dist, cfg)?;
    let rows = sigma_grid
        .par_iter()
        .map(|&sigma| {
            let w = ApproxWitness::new(dist, sigma)?;
            let excess = distributions::excess_hinge_direct(dist, w.as_fn(), cfg)?;
            let excess = excess.value.max(0.0);
            lambda_grid
                .iter()
                .map(|&lambda| {
                    let witness = (lambda * w.g_norm_sq() + excess).min(zero_route);
                    let emp = match empirical {
                        Some(e) => Some(
                            approx_error_empirical(
                                dist,
                                sigma,
                                lambda,
                                e.n_dense,
                                seed::derive(
                                    e.base_seed,
                                    &[sigma.to_bits(), lambda.to_bits()],
                                ),
                                cfg,
                            )?
                            .value,
                        ),
                        None => None,
                    };
                    Ok(ApproxErrorPoint {
                        lambda,
                        sigma,
                        a_upper_witness: witness,
                        a_upper_empirical: emp,
                        bound_rhs: approx_bound_rhs(sigma, lambda, alpha, c_geo, d_of(dist)),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn max_ratio(points: &[ApproxErrorPoint]) -> f64 {
    points.iter().map(|p| p.ratio()).fold(0.0, f64::max)
}

/// Max witness/envelope ratio over the grid; finite when the envelope
/// holds with some constant, and stable under grid refinement.
pub fn bound_ratio_scan(
    dist: &SyntheticDistribution,
    sigma_grid: &[f64],
    lambda_grid: &[f64],
    alpha: f64,
    c_geo: f64,
    cfg: &RiskConfig,
) -> Result<f64> {
    let pts = grid_scan(dist, sigma_grid, lambda_grid, alpha, c_geo, None, cfg)?;
    Ok(max_ratio(&pts))
}

/// Inserts the geometric midpoint between consecutive grid points; keeps
/// the original points, so a max over the refined grid can only grow.
pub fn refine_log_grid(grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for w in grid.windows(2) {
        out.push(w[0]);
        out.push((w[0] * w[1]).sqrt());
    }
    if let Some(&last) = grid.last() {
        out.push(last);
    }
    out
}

fn d_of(dist: &SyntheticDistribution) -> usize {
    dist.dim()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("must be positive and finite, got {lambda}"),
        });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("must be positive, got {alpha}"),
        });
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: "dimension must be at least 1".into(),
        });
    }
    Ok(())
}

fn check_grid(name: &'static str, grid: &[f64], min_len: usize) -> Result<()> {
    let ok = grid.len() >= min_len
        && grid.iter().all(|&g| g > 0.0 && g.is_finite())
        && grid.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("need at least {min_len} positive increasing values"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_power_margin, make_separated};
    use crate::noise;

    fn cfg() -> RiskConfig {
        // The witness is only refined to ~1e-5 pointwise; a tighter risk
        // quadrature would chase that noise.
        RiskConfig {
            quad_tol: 1e-6,
            ..RiskConfig::default()
        }
    }

    #[test]
    fn optimal_sigma_formula() {
        let s = optimal_sigma(1e-4, 1.0, 1).unwrap();
        assert!((s - 100.0).abs() < 1e-9, "{s}");
        let s = optimal_sigma(1e-3, f64::INFINITY, 4).unwrap();
        assert_eq!(s, 5.0);
        assert!(optimal_sigma(0.0, 1.0, 1).is_err());
        assert!(optimal_sigma(1e-3, -1.0, 1).is_err());
        assert!(optimal_sigma(1e-3, 1.0, 0).is_err());
    }

    #[test]
    fn rhs_formula_and_coupled_slope() {
        assert!(approx_bound_rhs(1.0, 1.0, 2.0, 1.0, 1) >= 1.0);
        // With sigma coupled to lambda the envelope is a pure power law of
        // exponent alpha/(alpha+1).
        let lambdas: Vec<f64> = (0..6).map(|j| 10f64.powi(-(j as i32) - 1)).collect();
        let mut lambdas = lambdas;
        lambdas.reverse();
        for (alpha, d, c) in [(1.0, 1, 0.5), (2.0, 1, 2.0), (5.0, 2, 1.0)] {
            let vals: Vec<f64> = lambdas
                .iter()
                .map(|&l| approx_bound_rhs(optimal_sigma(l, alpha, d).unwrap(), l, alpha, c, d))
                .collect();
            let fit = fitting::ols_loglog(&lambdas, &vals).unwrap();
            let want = alpha / (alpha + 1.0);
            assert!((fit.slope - want).abs() < 1e-6, "alpha={alpha}: {}", fit.slope);
        }
    }

    #[test]
    fn witness_route_bounds() {
        // Separated classes, narrow kernel: the risk term is dominated by
        // the smoothing tail and the value is essentially lambda ||g||^2.
        let s = make_separated(0.5, 1).unwrap();
        let w = ApproxWitness::new(&s, 16.0).unwrap();
        let lambda = 1e-6;
        let v = witness_value_at(&w, lambda, &cfg()).unwrap();
        assert!(v <= lambda * w.g_norm_sq() + 1e-3, "{v}");
        assert!(v >= lambda * w.g_norm_sq() - 1e-5);

        // Trivial cap for any distribution and width.
        let d = make_power_margin(1.0).unwrap();
        for sigma in [2.0, 8.0] {
            let w = ApproxWitness::new(&d, sigma).unwrap();
            let v = witness_value_at(&w, 0.5, &cfg()).unwrap();
            assert!(v <= 0.5 * w.g_norm_sq() + 1.0 + 1e-9);
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn witness_sigma_tradeoff_has_interior_minimum() {
        let d = make_power_margin(1.0).unwrap();
        let lambda = 1e-3;
        let sigmas = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
        let vals: Vec<f64> = sigmas
            .iter()
            .map(|&s| approx_error_witness(&d, s, lambda, &cfg()).unwrap())
            .collect();
        let argmin = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(argmin > 0 && argmin < sigmas.len() - 1, "{vals:?}");
        for i in 0..argmin {
            assert!(vals[i] > vals[i + 1], "{vals:?}");
        }
        for i in argmin..sigmas.len() - 1 {
            assert!(vals[i] < vals[i + 1], "{vals:?}");
        }
    }

    #[test]
    fn witness_monotone_in_lambda() {
        let d = make_power_margin(1.0).unwrap();
        let w = ApproxWitness::new(&d, 8.0).unwrap();
        let mut prev = -1.0;
        for j in (1..=4).rev() {
            let v = witness_value_at(&w, 10f64.powi(-j), &cfg()).unwrap();
            assert!(v >= prev, "lambda=1e-{j}");
            prev = v;
        }
    }

    #[test]
    fn empirical_route_examples() {
        let d = make_power_margin(1.0).unwrap();
        let sigma = 8.0;

        // Large lambda: the solve collapses toward zero, whose excess is
        // E|2 eta - 1| = 1/2 here.
        let big = approx_error_empirical(&d, sigma, 2.0, 1000, 7, &cfg()).unwrap();
        assert!(big.value <= 0.5 + 0.02, "{}", big.value);

        // The empirical infimum can't lose badly to one explicit candidate.
        let wit = approx_error_witness(&d, sigma, 1e-3, &cfg()).unwrap();
        let emp = approx_error_empirical(&d, sigma, 1e-3, 1000, 7, &cfg()).unwrap();
        assert!(emp.value <= wit + 0.05, "{} vs {wit}", emp.value);
        assert!(emp.value >= 0.0 && emp.spread >= 0.0 && emp.per_seed.len() == 3);

        // Nondecreasing in lambda up to sampling error.
        let lo = approx_error_empirical(&d, sigma, 1e-3, 1000, 11, &cfg()).unwrap();
        let hi = approx_error_empirical(&d, sigma, 1e-2, 1000, 11, &cfg()).unwrap();
        assert!(hi.value >= lo.value - 0.01, "{} vs {}", hi.value, lo.value);

        assert!(approx_error_empirical(&d, sigma, 1e-3, 999, 7, &cfg()).is_err());
    }

    #[test]
    fn decay_slope_matches_exponent() {
        // alpha = 2 for the linear power margin: slope approaches 2/3.
        let d = make_power_margin(1.0).unwrap();
        let grid = noise::log_grid(1e-4, 1e-1, 4);
        let fit = decay_slope(&d, &grid, 2.0, 1, None, &cfg()).unwrap();
        assert!(fit.slope >= 2.0 / 3.0 - 0.1, "slope {}", fit.slope);
        assert!(fit.slope <= 1.0, "slope {}", fit.slope);

        // Separable case at fixed width: linear decay once the smoothing
        // tail is negligible against lambda ||g||^2.
        let s = make_separated(0.5, 1).unwrap();
        let fit = decay_slope(&s, &grid, f64::INFINITY, 1, Some(16.0), &cfg()).unwrap();
        assert!(fit.slope >= 0.9, "slope {}", fit.slope);
        assert!(
            decay_slope(&s, &grid, f64::INFINITY, 1, Some(1.0), &cfg()).is_err()
        );
    }

    #[test]
    fn ratio_scan_is_stable_under_refinement() {
        let d = make_power_margin(1.0).unwrap();
        let geo = noise::fit_geometric(&d, &noise::default_geometric_grid(), &cfg()).unwrap();
        let c_geo = geo.fit.intercept.exp();
        let sigmas = [2.0, 4.0, 8.0, 16.0, 32.0];
        let lambdas: Vec<f64> = (1..=5).rev().map(|j| 10f64.powi(-j)).collect();
        let r1 = bound_ratio_scan(&d, &sigmas, &lambdas, 2.0, c_geo, &cfg()).unwrap();
        assert!(r1.is_finite() && r1 > 0.0);
        let r2 = bound_ratio_scan(
            &d,
            &refine_log_grid(&sigmas),
            &refine_log_grid(&lambdas),
            2.0,
            c_geo,
            &cfg(),
        )
        .unwrap();
        assert!(r2 >= r1 - 1e-12, "refinement kept the old points");
        assert!((r2 - r1).abs() <= 0.2 * r1, "r1={r1} r2={r2}");
    }

    #[test]
    fn grid_scan_rows_and_invariants() {
        let d = make_power_margin(1.0).unwrap();
        let pts = grid_scan(
            &d,
            &[2.0, 8.0],
            &[1e-3, 1e-2],
            2.0,
            0.5,
            Some(EmpiricalSettings {
                n_dense: 1000,
                base_seed: 3,
            }),
            &cfg(),
        )
        .unwrap();
        assert_eq!(pts.len(), 4);
        for p in &pts {
            assert!(p.a_upper_witness >= 0.0 && p.a_upper_witness <= 1.0 + 1e-9);
            assert!(p.bound_rhs > 0.0);
            assert!(p.ratio().is_finite());
            let e = p.a_upper_empirical.unwrap();
            assert!(e >= 0.0 && e <= 1.0 + 0.05);
            assert_eq!(
                p.csv_row().split(',').count(),
                ApproxErrorPoint::csv_header().split(',').count()
            );
        }
        // Monotone in lambda at fixed sigma, both routes.
        assert!(pts[1].a_upper_witness >= pts[0].a_upper_witness - 1e-9);
        assert!(pts[3].a_upper_witness >= pts[2].a_upper_witness - 1e-9);
        assert!(
            pts[1].a_upper_empirical.unwrap() >= pts[0].a_upper_empirical.unwrap() - 0.01
        );
    }
}
