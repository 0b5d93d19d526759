//! Regularization schedules `n -> (lambda_n, sigma_n)` driven by the noise
//! exponents `(q, alpha)`, seeded learning-rate experiments with a
//! median-based rate fit, and the hinge-loss variance bounds that control
//! the localization step behind those rates.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::{self, Family, RiskConfig, SyntheticDistribution};
use crate::error::{Error, Result};
use crate::fitting::{self, LogLogFit};
use crate::geometry::Point;
use crate::kernel::{GaussianKernel, KernelExpansion};
use crate::noise;
use crate::seed;
use crate::solver::{self, SvmProblem};

/// Rate exponent casework: `alpha/(2 alpha + 1)` when
/// `alpha <= (q+2)/(2q)`, else `2 alpha (q+1) / (2 alpha (q+2) + 3q + 4)`.
/// Infinite `q` or `alpha` enter through the ratio-of-leading-coefficients
/// convention, so the threshold becomes `1/2` at `q = inf` (and is vacuous
/// at `q = 0`), the second branch becomes `2 alpha/(2 alpha + 3)` at
/// `q = inf` and `(q+1)/(q+2)` at `alpha = inf`, and both infinite gives 1.
pub fn beta(q: f64, alpha: f64) -> Result<f64> {
    if q.is_nan() || q < 0.0 {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("margin-noise exponent must lie in [0, inf], got {q}"),
        });
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("geometric exponent must lie in (0, inf], got {alpha}"),
        });
    }
    let threshold = if q == 0.0 {
        f64::INFINITY
    } else if q.is_infinite() {
        0.5
    } else {
        (q + 2.0) / (2.0 * q)
    };
    let b = if alpha <= threshold {
        if alpha.is_infinite() {
            0.5
        } else {
            alpha / (2.0 * alpha + 1.0)
        }
    } else {
        match (q.is_infinite(), alpha.is_infinite()) {
            (true, true) => 1.0,
            (true, false) => 2.0 * alpha / (2.0 * alpha + 3.0),
            (false, true) => (q + 1.0) / (q + 2.0),
            (false, false) => {
                2.0 * alpha * (q + 1.0) / (2.0 * alpha * (q + 2.0) + 3.0 * q + 4.0)
            }
        }
    };
    debug_assert!(b > 0.0 && b <= 1.0);
    Ok(b)
}

/// Sequences `lambda_n = n^{-beta (alpha+1)/alpha}` and
/// `sigma_n = n^{beta/(alpha d)}`; the width stays coupled to lambda via
/// `sigma_n = lambda_n^{-1/((alpha+1) d)}`. With `alpha = inf` the width is
/// a constant beyond `2 sqrt(d)` instead and `lambda_n = n^{-beta}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSchedule {
    q: f64,
    alpha: f64,
    d: usize,
    beta: f64,
    fixed_sigma: Option<f64>,
}

impl RateSchedule {
    /// Coupled-width mode; `alpha` must be finite.
    pub fn coupled(q: f64, alpha: f64, d: usize) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "coupled schedule needs finite alpha; use fixed_width".into(),
            });
        }
        check_dim(d)?;
        Ok(RateSchedule {
            q,
            alpha,
            d,
            beta: beta(q, alpha)?,
            fixed_sigma: None,
        })
    }

    /// Constant-width mode for `alpha = inf`; requires `sigma > 2 sqrt(d)`.
    pub fn fixed_width(q: f64, d: usize, sigma: f64) -> Result<Self> {
        check_dim(d)?;
        let floor = 2.0 * (d as f64).sqrt();
        if !(sigma > floor && sigma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("fixed width must exceed 2 sqrt(d) = {floor}, got {sigma}"),
            });
        }
        Ok(RateSchedule {
            q,
            alpha: f64::INFINITY,
            d,
            beta: beta(q, f64::INFINITY)?,
            fixed_sigma: Some(sigma),
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn beta_value(&self) -> f64 {
        self.beta
    }

    pub fn fixed_sigma(&self) -> Option<f64> {
        self.fixed_sigma
    }

    pub fn lambda_of_n(&self, n: usize) -> f64 {
        assert!(n >= 1);
        let ratio = if self.alpha.is_finite() {
            (self.alpha + 1.0) / self.alpha
        } else {
            1.0
        };
        (n as f64).powf(-self.beta * ratio)
    }

    pub fn sigma_of_n(&self, n: usize) -> f64 {
        assert!(n >= 1);
        if let Some(s) = self.fixed_sigma {
            return s;
        }
        (n as f64).powf(self.beta / (self.alpha * self.d as f64))
    }
}

/// `(lambda_n, sigma_n)` for finite alpha, with the coupling identity
/// `sigma_n = lambda_n^{-1/((alpha+1) d)}` asserted.
pub fn schedule(n: usize, q: f64, alpha: f64, d: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "sample size must be at least 1".into(),
        });
    }
    let s = RateSchedule::coupled(q, alpha, d)?;
    let lambda = s.lambda_of_n(n);
    let sigma = s.sigma_of_n(n);
    let coupled = lambda.powf(-1.0 / ((alpha + 1.0) * d as f64));
    assert!(
        (sigma - coupled).abs() <= 1e-9 * sigma.max(1.0),
        "width decoupled from lambda: {sigma} vs {coupled}"
    );
    Ok((lambda, sigma))
}

/// One trained-and-evaluated `(n, trial)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    /// Excess classification risk by quadrature, with its error estimate.
    pub excess_risk: f64,
    pub excess_risk_error: f64,
    pub excess_hinge: f64,
    pub rkhs_norm: f64,
    pub lambda: f64,
    pub sigma: f64,
    /// Duality gap at termination; at most `1e-8 n` for completed rows.
    pub certificate: f64,
    /// Wall-clock seconds. Kept in memory only: data files must be
    /// byte-identical across reruns of the same config.
    pub wall_seconds: f64,
}

/// Diagnostic for a row whose solve failed; the run itself continues.
#[derive(Clone, Debug)]
pub struct RowFailure {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub family: String,
    pub d: usize,
    pub base_seed: u64,
    pub trials: usize,
    pub n_grid: Vec<usize>,
    pub with_offset: bool,
    /// In `(n, trial)` order; failed rows are absent here.
    pub rows: Vec<ExperimentRow>,
    pub failures: Vec<RowFailure>,
}

impl ExperimentRow {
    pub fn csv_header() -> &'static str {
        "n,trial,seed,excess_risk,excess_risk_err,excess_hinge,rkhs_norm,lambda,sigma,certificate"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.trial,
            self.seed,
            self.excess_risk,
            self.excess_risk_error,
            self.excess_hinge,
            self.rkhs_norm,
            self.lambda,
            self.sigma,
            self.certificate
        )
    }
}

impl ExperimentReport {
    /// Median excess classification risk per grid `n`, over completed rows.
    pub fn median_excess(&self) -> Vec<(usize, f64)> {
        self.n_grid
            .iter()
            .filter_map(|&n| {
                let v: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.n == n)
                    .map(|r| r.excess_risk)
                    .collect();
                if v.is_empty() {
                    None
                } else {
                    Some((n, fitting::median(&v)))
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(ExperimentRow::csv_header());
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

/// No-offset learning-rate experiment over `n_grid x trials`.
pub fn run_experiment(
    dist: &SyntheticDistribution,
    schedule: &RateSchedule,
    n_grid: &[usize],
    trials: usize,
    base_seed: u64,
    cfg: &RiskConfig,
) -> Result<ExperimentReport> {
    run_experiment_full(dist, schedule, n_grid, trials, base_seed, false, cfg)
}

/// [`run_experiment`] with the offset variant selectable; an offset run is
/// a parallel report over the same seeds.
pub fn run_experiment_full(
    dist: &SyntheticDistribution,
    schedule: &RateSchedule,
    n_grid: &[usize],
    trials: usize,
    base_seed: u64,
    with_offset: bool,
    cfg: &RiskConfig,
) -> Result<ExperimentReport> {
    if trials < 5 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: format!("medians need at least 5 trials, got {trials}"),
        });
    }
    if n_grid.is_empty() {
        return Err(Error::Empty("sample-size grid"));
    }
    if n_grid[0] == 0 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter {
            name: "n_grid",
            reason: "sample sizes must be positive and strictly increasing".into(),
        });
    }
    if schedule.dim() != dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: dist.dim(),
            got: schedule.dim(),
        });
    }
    let cells: Vec<(usize, usize)> = n_grid
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();
    let outcomes: Vec<std::result::Result<ExperimentRow, RowFailure>> = cells
        .par_iter()
        .map(|&(n, trial)| {
            let row_seed = seed::derive(base_seed, &[n as u64, trial as u64]);
            run_row(dist, schedule, n, trial, row_seed, with_offset, cfg).map_err(|e| {
                RowFailure {
                    n,
                    trial,
                    seed: row_seed,
                    message: e.to_string(),
                }
            })
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(f) => failures.push(f),
        }
    }
    Ok(ExperimentReport {
        family: dist.family().to_string(),
        d: dist.dim(),
        base_seed,
        trials,
        n_grid: n_grid.to_vec(),
        with_offset,
        rows,
        failures,
    })
}

fn run_row(
    dist: &SyntheticDistribution,
    schedule: &RateSchedule,
    n: usize,
    trial: usize,
    row_seed: u64,
    with_offset: bool,
    cfg: &RiskConfig,
) -> Result<ExperimentRow> {
    let start = Instant::now();
    let lambda = schedule.lambda_of_n(n);
    let sigma = schedule.sigma_of_n(n);
    let ts = dist.sample(n, row_seed)?;
    let problem = SvmProblem::new(ts, lambda, GaussianKernel::new(sigma)?, with_offset)?;
    let tol = problem.default_tol();
    let sol = solver::train(&problem, tol)?;
    let excess = distributions::excess_risk(dist, sol.expansion.as_fn(), cfg)?;
    let hinge = distributions::excess_hinge_direct(dist, sol.expansion.as_fn(), cfg)?;
    Ok(ExperimentRow {
        n,
        trial,
        seed: row_seed,
        excess_risk: excess.value,
        excess_risk_error: excess.error,
        excess_hinge: hinge.value,
        rkhs_norm: sol.expansion.rkhs_norm(),
        lambda,
        sigma,
        certificate: sol.certificate,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

pub const BOOTSTRAP_REPLICATES: usize = 200;

/// Fitted empirical rate, or the degenerate separable outcome where every
/// median excess is zero and no slope exists.
#[derive(Clone, Debug)]
pub enum RateFit {
    PowerLaw {
        /// Negated OLS slope of log median excess against log n.
        beta_hat: f64,
        /// Bootstrap percentile interval (2.5%, 97.5%) over trials.
        ci: (f64, f64),
        fit: LogLogFit,
    },
    ExactLearning,
}

/// Needs at least 4 distinct `n` with positive median excess; a report
/// whose medians are all zero is exact learning, not an error.
pub fn fit_rate(report: &ExperimentReport) -> Result<RateFit> {
    let medians = report.median_excess();
    if medians.is_empty() {
        return Err(Error::Empty("experiment report"));
    }
    let positive: Vec<(usize, f64)> = medians
        .iter()
        .copied()
        .filter(|&(_, m)| m > 0.0)
        .collect();
    if positive.is_empty() {
        return Ok(RateFit::ExactLearning);
    }
    if positive.len() < 4 {
        return Err(Error::TooFewFitPoints {
            needed: 4,
            got: positive.len(),
        });
    }
    let xs: Vec<f64> = positive.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = positive.iter().map(|&(_, m)| m).collect();
    let fit = fitting::ols_loglog(&xs, &ys)?;
    let beta_hat = -fit.slope;

    // Percentile bootstrap, resampling trials independently within each n.
    let mut betas = Vec::with_capacity(BOOTSTRAP_REPLICATES);
    for b in 0..BOOTSTRAP_REPLICATES {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed::derive(report.base_seed, &[0x626f_6f74, b as u64]));
        let mut xs_b = Vec::new();
        let mut ys_b = Vec::new();
        for &n in &report.n_grid {
            let pool: Vec<f64> = report
                .rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.excess_risk)
                .collect();
            if pool.is_empty() {
                continue;
            }
            let resample: Vec<f64> = (0..pool.len())
                .map(|_| pool[rng.gen_range(0..pool.len())])
                .collect();
            let m = fitting::median(&resample);
            if m > 0.0 {
                xs_b.push(n as f64);
                ys_b.push(m);
            }
        }
        if xs_b.len() >= 4 {
            if let Ok(f) = fitting::ols_loglog(&xs_b, &ys_b) {
                betas.push(-f.slope);
            }
        }
    }
    let ci = if betas.is_empty() {
        (beta_hat, beta_hat)
    } else {
        betas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let at = |p: f64| betas[((betas.len() - 1) as f64 * p).round() as usize];
        (at(0.025), at(0.975))
    };
    Ok(RateFit::PowerLaw { beta_hat, ci, fit })
}

fn hinge(y: f64, t: f64) -> f64 {
    (1.0 - y * t).max(0.0)
}

/// Conditional mean and second moment of `l(y, t) - l(y, s)` under
/// `P(y = 1) = p`, where `s = sign(2p - 1)` is the pointwise hinge
/// minimizer (`+1` on the tie `p = 1/2`).
fn loss_diff_moments(p: f64, t: f64) -> (f64, f64) {
    let s = if 2.0 * p - 1.0 >= 0.0 { 1.0 } else { -1.0 };
    let d_plus = hinge(1.0, t) - hinge(1.0, s);
    let d_minus = hinge(-1.0, t) - hinge(-1.0, s);
    let mean = p * d_plus + (1.0 - p) * d_minus;
    let second = p * d_plus * d_plus + (1.0 - p) * d_minus * d_minus;
    (mean, second)
}

/// Slack of the pointwise variance inequality
/// `v(p,t) <= (|t| + 2/|2p-1|) m(p,t)`, where `m` and `v` are the
/// conditional mean and second moment of the hinge-loss difference to the
/// pointwise minimizer `sign(2p-1)`. Nonnegative for all valid inputs.
pub fn pointwise_hinge_variance_slack(p: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("conditional probability must lie in [0, 1], got {p}"),
        });
    }
    if p == 0.5 {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: "the inequality degenerates at p = 1/2".into(),
        });
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("evaluation point must be finite, got {t}"),
        });
    }
    let (mean, second) = loss_diff_moments(p, t);
    Ok((t.abs() + 2.0 / (2.0 * p - 1.0).abs()) * mean - second)
}

/// Weak-`L_q` quasi-norm `sup_t t P_X(|2 eta - 1| <= 1/t)^{1/q}` of the
/// inverse margin, `q > 0`. Closed forms: exactly 1 for every built-in
/// family at its own margin exponent (the mass there is exactly `s^q`, or
/// jumps 0 to 1 at level 1 for separated classes). Below that exponent a
/// grid sup over levels backs the quadrature route; above it the norm is
/// infinite and an error is returned.
pub fn lorentz_weak_norm(dist: &SyntheticDistribution, q: f64, cfg: &RiskConfig) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("weak norm needs q > 0, got {q}"),
        });
    }
    let q0 = dist.known_exponents().q;
    if q > q0 * (1.0 + 1e-12) {
        return Err(Error::Divergent(
            "inverse-margin weak norm is infinite beyond the family's margin exponent",
        ));
    }
    match *dist.family() {
        Family::Separated { .. } => return Ok(1.0),
        Family::PowerMargin { gamma } if (q * gamma - 1.0).abs() <= 1e-12 => return Ok(1.0),
        Family::WeightedPowerMargin { q: qf, .. } if (q - qf).abs() <= 1e-12 => return Ok(1.0),
        _ => {}
    }
    let mut best: f64 = 0.0;
    for &t in &noise::log_grid(1.0, 1e4, 33) {
        let mass = noise::margin_mass(dist, 1.0 / t, cfg)?.value;
        best = best.max(t * mass.powf(1.0 / q));
    }
    Ok(best)
}

/// `(q+2)/(q+1)` and `q/(q+1)` with their `q = inf` limits.
fn variance_exponents(q: f64) -> (f64, f64) {
    if q.is_infinite() {
        (1.0, 1.0)
    } else {
        ((q + 2.0) / (q + 1.0), q / (q + 1.0))
    }
}

/// Constant of the hinge variance bound: the inverse-margin weak norm plus
/// 2 for `q > 0`, and 1 at `q = 0`.
pub fn hinge_variance_constant(
    dist: &SyntheticDistribution,
    q: f64,
    cfg: &RiskConfig,
) -> Result<f64> {
    if q == 0.0 {
        return Ok(1.0);
    }
    Ok(lorentz_weak_norm(dist, q, cfg)? + 2.0)
}

/// Margin of the hinge variance bound for a bounded `f`:
/// `C (||f||_inf + 1)^{(q+2)/(q+1)} (E g)^{q/(q+1)} - E g^2` where
/// `g = l o f - l o f*` against the pointwise minimizer. `f_inf` is the
/// caller's sup norm for `f` (for clipped functions, a dense grid max).
pub fn variance_bound_check<F: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    f: F,
    f_inf: f64,
    q: f64,
    cfg: &RiskConfig,
) -> Result<f64> {
    if q.is_nan() || q < 0.0 {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("margin-noise exponent must lie in [0, inf], got {q}"),
        });
    }
    if !(f_inf >= 0.0 && f_inf.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "f_inf",
            reason: format!("sup norm must be finite and nonnegative, got {f_inf}"),
        });
    }
    let lhs = distributions::expect(dist, |x| loss_diff_moments(dist.eta(x), f(x)).1, cfg)?
        .value
        .max(0.0);
    let eg = distributions::expect(dist, |x| loss_diff_moments(dist.eta(x), f(x)).0, cfg)?
        .value
        .max(0.0);
    let c = hinge_variance_constant(dist, q, cfg)?;
    let (e1, e2) = variance_exponents(q);
    let rhs = c * (f_inf + 1.0).powf(e1) * eg.powf(e2);
    Ok(rhs - lhs)
}

/// Constant of the regularized variance bound:
/// `16 + 8 ||(2 eta - 1)^{-1}||_{q,inf}` for `q > 0` and 8 at `q = 0`.
pub fn svm_variance_constant(
    dist: &SyntheticDistribution,
    q: f64,
    cfg: &RiskConfig,
) -> Result<f64> {
    if q == 0.0 {
        return Ok(8.0);
    }
    Ok(16.0 + 8.0 * lorentz_weak_norm(dist, q, cfg)?)
}

/// Margin of the regularized variance bound over the ball of radius
/// `gamma <= lambda^{-1/2}`: with `L o f = lambda ||f||^2 + l o f` and a
/// `reference` standing in for the population minimizer,
/// `E (L o f - L o ref)^2` is checked against
/// `C (gamma+1)^{(q+2)/(q+1)} [ (E (L o f - L o ref))^{q/(q+1)} + 2 a_lambda^{q/(q+1)} ]`
/// where `a_lambda` is a witness upper bound on the approximation error.
/// Both expectations are clamped below at zero before the fractional power.
pub fn svm_variance_margin(
    dist: &SyntheticDistribution,
    f: &KernelExpansion,
    reference: &KernelExpansion,
    lambda: f64,
    gamma: f64,
    q: f64,
    a_lambda: f64,
    cfg: &RiskConfig,
) -> Result<f64> {
    if f.kernel.sigma() != reference.kernel.sigma() {
        return Err(Error::KernelMismatch {
            expansion: f.kernel.sigma(),
            problem: reference.kernel.sigma(),
        });
    }
    if f.offset != 0.0 {
        return Err(Error::OffsetNotAllowed { offset: f.offset });
    }
    if reference.offset != 0.0 {
        return Err(Error::OffsetNotAllowed {
            offset: reference.offset,
        });
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("regularization weight must be positive and finite, got {lambda}"),
        });
    }
    let cap = lambda.powf(-0.5) * (1.0 + 1e-9);
    if !(gamma > 0.0 && gamma <= cap) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("ball radius must lie in (0, lambda^(-1/2)], got {gamma}"),
        });
    }
    let slack = 1.0 + 1e-9;
    if f.rkhs_norm() > gamma * slack || reference.rkhs_norm() > gamma * slack {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "both expansions must lie in the gamma-ball".into(),
        });
    }
    if !(a_lambda >= 0.0 && a_lambda.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "a_lambda",
            reason: format!("approximation term must be finite and nonnegative, got {a_lambda}"),
        });
    }
    let delta = lambda * (f.rkhs_norm_sq() - reference.rkhs_norm_sq());
    let moments = |x: &Point| {
        let eta = dist.eta(x);
        let tf = f.eval(x);
        let tr = reference.eval(x);
        let d_plus = delta + hinge(1.0, tf) - hinge(1.0, tr);
        let d_minus = delta + hinge(-1.0, tf) - hinge(-1.0, tr);
        (
            eta * d_plus + (1.0 - eta) * d_minus,
            eta * d_plus * d_plus + (1.0 - eta) * d_minus * d_minus,
        )
    };
    let mean = distributions::expect(dist, |x| moments(x).0, cfg)?.value.max(0.0);
    let second = distributions::expect(dist, |x| moments(x).1, cfg)?.value.max(0.0);
    let c = svm_variance_constant(dist, q, cfg)?;
    let (e1, e2) = variance_exponents(q);
    let chat = (gamma + 1.0).powf(e1);
    let rhs = c * chat * mean.powf(e2) + 2.0 * c * chat * a_lambda.powf(e2);
    Ok(rhs - second)
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
