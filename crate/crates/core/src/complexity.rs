//! Covering-number bounds for empirical Gaussian-RKHS balls and Rademacher
//! averages.
//!
//! The evaluation image of the unit RKHS ball in empirical L2 over points
//! `x_1..x_n` is the ellipsoid `{K^{1/2} u : ||u|| <= 1} / sqrt(n)`, so its
//! metric entropy reduces to the Gram matrix's eigenvalues. Only bound
//! pairs are reported, never a point estimate: exact covering numbers are
//! intractable and the interesting content is how the bounds scale with
//! the width and the resolution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::SyntheticDistribution;
use crate::error::{Error, Result};
use crate::fitting;
use crate::geometry::Point;
use crate::kernel::GaussianKernel;
use crate::quad::mean_and_se;

/// Eigenvalues below `-EIG_TOL * n` are a hard error (a broken Gram
/// computation); small negatives are eigensolver roundoff and clamp to 0.
pub const EIG_TOL: f64 = 1e-8;

/// Semi-axes of the empirical-L2 image of the unit RKHS ball.
#[derive(Clone, Debug)]
pub struct CoverProfile {
    /// `sqrt(mu_i / n)`, nonincreasing; all in `[0, 1]` since the kernel is
    /// bounded by one.
    pub semi_axes: Vec<f64>,
    pub n: usize,
    pub sigma: f64,
}

pub fn cover_profile(points: &[Point], sigma: f64) -> Result<CoverProfile> {
    if points.is_empty() {
        return Err(Error::Empty("cover profile points"));
    }
    let n = points.len();
    let kernel = GaussianKernel::new(sigma)?;
    let gram = kernel.gram(points);
    let eig = gram.symmetric_eigen();
    let mut mu: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    for m in &mut mu {
        if *m < -EIG_TOL * n as f64 {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: *m });
        }
        // Unit diagonal bounds the spectrum by n; anything past that is
        // roundoff too.
        *m = m.clamp(0.0, n as f64);
    }
    mu.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let semi_axes = mu.iter().map(|m| (m / n as f64).sqrt()).collect();
    Ok(CoverProfile {
        semi_axes,
        n,
        sigma,
    })
}

/// Volumetric bounds on the log covering number of the ellipsoid at
/// resolution `epsilon`.
///
/// lower: volume comparison restricted to the axes longer than epsilon.
/// upper: per-coordinate grid cover of the bounding box over the axes
/// longer than epsilon/2; the residual axes are absorbed into the slack.
pub fn log_cover_bounds(profile: &CoverProfile, epsilon: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("resolution must lie in (0, 1], got {epsilon}"),
        });
    }
    let lower: f64 = profile
        .semi_axes
        .iter()
        .filter(|&&a| a > epsilon)
        .map(|&a| (a / epsilon).ln())
        .sum();
    let upper: f64 = profile
        .semi_axes
        .iter()
        .filter(|&&a| a > epsilon / 2.0)
        .map(|&a| (1.0 + 4.0 * a / epsilon).ln())
        .sum();
    Ok((lower, upper))
}

/// Scaling scan over a `(sigma, epsilon)` grid at fixed sample size.
#[derive(Clone, Debug)]
pub struct ScalingReport {
    pub sigma_grid: Vec<f64>,
    pub epsilon_grid: Vec<f64>,
    pub n: usize,
    pub seed: u64,
    /// `lower[i][j]`, `upper[i][j]` at `(sigma_grid[i], epsilon_grid[j])`.
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
    /// Per sigma: OLS slope of log upper vs log(1/epsilon); the empirical
    /// counterpart of the resolution exponent.
    pub eps_slopes: Vec<f64>,
    /// Per epsilon: OLS slope of log upper vs log sigma.
    pub sigma_slopes: Vec<f64>,
    /// Local (resolution exponent, width exponent) finite-difference pairs,
    /// one per interior grid cell.
    pub slope_pairs: Vec<(f64, f64)>,
    /// Spearman rank correlation of the local pairs; the exponent
    /// trade-off makes it negative.
    pub rank_correlation: f64,
}

pub fn cover_scaling_scan(
    dist: &SyntheticDistribution,
    sigma_grid: &[f64],
    epsilon_grid: &[f64],
    n: usize,
    seed: u64,
) -> Result<ScalingReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point> = (0..n).map(|_| dist.sample_marginal(&mut rng)).collect();
    cover_scaling_scan_points(&points, sigma_grid, epsilon_grid, seed)
}

/// The scan on caller-supplied points.
pub fn cover_scaling_scan_points(
    points: &[Point],
    sigma_grid: &[f64],
    epsilon_grid: &[f64],
    seed: u64,
) -> Result<ScalingReport> {
    check_scan_grid("sigma_grid", sigma_grid)?;
    check_scan_grid("epsilon_grid", epsilon_grid)?;
    if epsilon_grid.iter().any(|&e| e > 1.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon_grid",
            reason: "resolutions must lie in (0, 1]".into(),
        });
    }
    let bounds: Vec<(Vec<f64>, Vec<f64>)> = sigma_grid
        .par_iter()
        .map(|&sigma| {
            let profile = cover_profile(points, sigma)?;
            let mut lo = Vec::with_capacity(epsilon_grid.len());
            let mut up = Vec::with_capacity(epsilon_grid.len());
            for &eps in epsilon_grid {
                let (l, u) = log_cover_bounds(&profile, eps)?;
                lo.push(l);
                up.push(u);
            }
            Ok((lo, up))
        })
        .collect::<Result<_>>()?;
    let lower: Vec<Vec<f64>> = bounds.iter().map(|b| b.0.clone()).collect();
    let upper: Vec<Vec<f64>> = bounds.iter().map(|b| b.1.clone()).collect();

    let inv_eps: Vec<f64> = epsilon_grid.iter().map(|&e| 1.0 / e).collect();
    let eps_slopes = upper
        .iter()
        .map(|row| fitting::ols_loglog(&inv_eps, row).map(|f| f.slope))
        .collect::<Result<Vec<f64>>>()?;
    let sigma_slopes = (0..epsilon_grid.len())
        .map(|j| {
            let col: Vec<f64> = upper.iter().map(|row| row[j]).collect();
            fitting::ols_loglog(sigma_grid, &col).map(|f| f.slope)
        })
        .collect::<Result<Vec<f64>>>()?;

    // Local exponents by forward differences; each interior cell pairs a
    // resolution exponent with a width exponent.
    let mut slope_pairs = Vec::new();
    for i in 0..sigma_grid.len() - 1 {
        for j in 0..epsilon_grid.len() - 1 {
            let u = upper[i][j];
            let u_eps = upper[i][j + 1];
            let u_sig = upper[i + 1][j];
            if u <= 0.0 || u_eps <= 0.0 || u_sig <= 0.0 {
                continue;
            }
            let p_local = ((u_eps / u).ln()) / ((inv_eps[j + 1] / inv_eps[j]).ln());
            let s_local = ((u_sig / u).ln()) / ((sigma_grid[i + 1] / sigma_grid[i]).ln());
            slope_pairs.push((p_local, s_local));
        }
    }
    let (ps, ss): (Vec<f64>, Vec<f64>) = slope_pairs.iter().cloned().unzip();
    let rank_correlation = fitting::spearman(&ps, &ss)?;

    Ok(ScalingReport {
        sigma_grid: sigma_grid.to_vec(),
        epsilon_grid: epsilon_grid.to_vec(),
        n: points.len(),
        seed,
        lower,
        upper,
        eps_slopes,
        sigma_slopes,
        slope_pairs,
        rank_correlation,
    })
}

impl ScalingReport {
    pub fn csv_header() -> &'static str {
        "sigma,epsilon,n,log_cover_lower,log_cover_upper"
    }

    pub fn csv_rows(&self) -> Vec<String> {
        let mut rows = Vec::new();
        for (i, &sigma) in self.sigma_grid.iter().enumerate() {
            for (j, &eps) in self.epsilon_grid.iter().enumerate() {
                rows.push(format!(
                    "{},{},{},{},{}",
                    sigma, eps, self.n, self.lower[i][j], self.upper[i][j]
                ));
            }
        }
        rows
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for (i, &sigma) in self.sigma_grid.iter().enumerate() {
            s.push_str(&format!(
                "eps_slope sigma={} slope={}\n",
                sigma, self.eps_slopes[i]
            ));
        }
        for (j, &eps) in self.epsilon_grid.iter().enumerate() {
            s.push_str(&format!(
                "sigma_slope epsilon={} slope={}\n",
                eps, self.sigma_slopes[j]
            ));
        }
        s.push_str(&format!("rank_correlation={}\n", self.rank_correlation));
        s
    }
}

/// `sup_{||f||_H <= 1} |(1/n) sum_i s_i f(x_i)| = (1/n) sqrt(s^T K s)`;
/// at most one because the Gram entries are bounded by one.
pub fn rademacher_exact(points: &[Point], sigma: f64, signs: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Empty("rademacher points"));
    }
    if signs.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            got: signs.len(),
        });
    }
    if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(Error::InvalidParameter {
            name: "signs",
            reason: "entries must be +1 or -1".into(),
        });
    }
    let kernel = GaussianKernel::new(sigma)?;
    let n = points.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += signs[i] * signs[j] * kernel.eval(&points[i], &points[j]);
        }
    }
    Ok(quad.max(0.0).sqrt() / n as f64)
}

/// Monte Carlo Rademacher average: mean and standard error of the exact
/// supremum over independent uniform sign draws.
pub fn rademacher_average(
    points: &[Point],
    sigma: f64,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials < 2 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: format!("need at least 2 sign draws for an error bar, got {trials}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(trials);
    for _ in 0..trials {
        let signs: Vec<f64> = (0..points.len())
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        values.push(rademacher_exact(points, sigma, &signs)?);
    }
    Ok(mean_and_se(&values))
}

/// Greedy cover count of the ellipsoid with the given semi-axes on a
/// direct grid of the stated step, Euclidean balls of radius `epsilon`.
/// Exponential in the axis count; refuses more than 3 axes.
///
/// Centers are chosen from the grid and are pairwise more than `epsilon`
/// apart, so the count is sandwiched between packing and covering numbers
/// of the discretized body.
pub fn greedy_cover_count(semi_axes: &[f64], epsilon: f64, grid_step: f64) -> Result<usize> {
    if semi_axes.is_empty() || semi_axes.len() > 3 {
        return Err(Error::InvalidParameter {
            name: "semi_axes",
            reason: "direct cover oracle handles 1 to 3 axes".into(),
        });
    }
    if !(epsilon > 0.0) || !(grid_step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "resolution and grid step must be positive".into(),
        });
    }
    let steps: Vec<i64> = semi_axes
        .iter()
        .map(|&a| (a / grid_step).floor() as i64)
        .collect();
    if steps.iter().map(|&s| 2 * s + 1).product::<i64>() > 20_000_000 {
        return Err(Error::InvalidParameter {
            name: "grid_step",
            reason: "grid too fine: more than 2e7 candidate points".into(),
        });
    }
    let mut pts: Vec<[f64; 3]> = Vec::new();
    let range = |k: usize| -> std::ops::RangeInclusive<i64> {
        if k < steps.len() {
            -steps[k]..=steps[k]
        } else {
            0..=0
        }
    };
    for ix in range(0) {
        for iy in range(1) {
            for iz in range(2) {
                let p = [
                    ix as f64 * grid_step,
                    iy as f64 * grid_step,
                    iz as f64 * grid_step,
                ];
                let mut inside = 0.0;
                for (k, &a) in semi_axes.iter().enumerate() {
                    if a == 0.0 {
                        if p[k] != 0.0 {
                            inside = 2.0;
                        }
                    } else {
                        inside += (p[k] / a) * (p[k] / a);
                    }
                }
                if inside <= 1.0 {
                    pts.push(p);
                }
            }
        }
    }
    let mut covered = vec![false; pts.len()];
    let eps_sq = epsilon * epsilon;
    let mut count = 0;
    for i in 0..pts.len() {
        if covered[i] {
            continue;
        }
        count += 1;
        let c = pts[i];
        for (j, p) in pts.iter().enumerate() {
            if !covered[j] {
                let d2 = (p[0] - c[0]) * (p[0] - c[0])
                    + (p[1] - c[1]) * (p[1] - c[1])
                    + (p[2] - c[2]) * (p[2] - c[2]);
                if d2 <= eps_sq {
                    covered[j] = true;
                }
            }
        }
    }
    Ok(count)
}

fn check_scan_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    let ok = grid.len() >= 4
        && grid.iter().all(|&g| g > 0.0 && g.is_finite())
        && grid.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(Error::InvalidParameter {
            name,
            reason: "need at least 4 positive strictly increasing values".into(),
        });
    }
    Ok(())
}
