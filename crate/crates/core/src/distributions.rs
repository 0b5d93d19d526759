//! Synthetic binary-classification distributions with analytically known
//! noise geometry.
//!
//! Each family fixes a marginal `P_X` on the input domain and a regression
//! function `eta(x) = P(Y = +1 | x)`, chosen so that the margin-noise and
//! boundary-geometry exponents are known in closed form:
//!
//! * `power_margin(gamma)`: uniform on `[-1, 1]`,
//!   `eta(x) = (1 + sign(x) |x|^gamma) / 2`. Margin exponent `1/gamma`,
//!   envelope order `gamma`, geometric exponent `1 + gamma`.
//! * `weighted_power_margin(gamma, q)`: same `eta`, marginal density
//!   `(gamma q / 2) |x|^{gamma q - 1}`. Margin exponent exactly `q`,
//!   geometric exponent `(q + 1) gamma`.
//! * `separated(delta, d)`: noise-free classes supported at mutual distance
//!   `delta` inside the unit ball, split by the hyperplane `x_1 = 0`. Margin
//!   mass vanishes below `t = 1`; both exponents are infinite.
//!
//! Risks are evaluated by adaptive quadrature when `d = 1` and by seeded
//! Monte Carlo with a standard-error field when `d >= 2`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{check_in_domain, sign_pm, unit_ball_volume, Point};
use crate::quad::{self, adaptive_simpson, adaptive_simpson_split};

/// Tolerance on `sup |f| - 1` above which the margin-identity risk path is
/// refused: the identity only holds for functions into `[-1, 1]`.
pub const RANGE_TOL: f64 = 1e-9;

/// How risks are evaluated and how accurately.
#[derive(Clone, Copy, Debug)]
pub struct RiskConfig {
    /// Absolute tolerance for `d = 1` adaptive quadrature.
    pub quad_tol: f64,
    /// Sample count for `d >= 2` Monte Carlo.
    pub mc_samples: usize,
    /// Seed for the Monte Carlo draw; fixed so estimates reproduce exactly.
    pub mc_seed: u64,
}

impl Default for RiskConfig {
    fn default() -> Self {
        RiskConfig {
            quad_tol: quad::DEFAULT_TOL,
            mc_samples: 100_000,
            mc_seed: 0x5249_534B,
        }
    }
}

/// A value together with its accuracy: the quadrature error estimate for
/// `d = 1`, the Monte Carlo standard error for `d >= 2`.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    PowerMargin { gamma: f64 },
    WeightedPowerMargin { gamma: f64, q: f64 },
    Separated { delta: f64 },
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::PowerMargin { gamma } => write!(f, "power_margin(gamma={gamma})"),
            // No spaces (training-set headers tokenize on whitespace) and no
            // commas (the label lands in csv summary rows).
            Family::WeightedPowerMargin { gamma, q } => {
                write!(f, "weighted_power_margin(gamma={gamma};q={q})")
            }
            Family::Separated { delta } => write!(f, "separated(delta={delta})"),
        }
    }
}

/// Exponents the family is constructed to have. `f64::INFINITY` encodes the
/// degenerate noise-free cases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnownExponents {
    /// Margin-noise exponent: `P_X(|2 eta - 1| <= t) <= C t^q`.
    pub q: f64,
    /// The constant `C` above (tight for the built-in families).
    pub q_constant: f64,
    /// Envelope `(order, constant)`: `|2 eta - 1| <= c tau^order` a.e.
    /// `None` when every order works (noise-free separated classes).
    pub envelope: Option<(f64, f64)>,
    /// Geometric decay exponent of `int |2 eta - 1| exp(-tau^2/t) dP_X`.
    pub alpha: f64,
}

#[derive(Clone, Debug)]
pub struct SyntheticDistribution {
    d: usize,
    family: Family,
    known: KnownExponents,
    /// Lebesgue volume of the marginal's support (normalization constant).
    support_volume: f64,
}

/// Uniform marginal on `[-1, 1]` with `eta(x) = (1 + sign(x)|x|^gamma)/2`.
pub fn make_power_margin(gamma: f64) -> Result<SyntheticDistribution> {
    check_positive_finite("gamma", gamma)?;
    Ok(SyntheticDistribution {
        d: 1,
        family: Family::PowerMargin { gamma },
        known: KnownExponents {
            q: 1.0 / gamma,
            q_constant: 1.0,
            envelope: Some((gamma, 1.0)),
            alpha: 1.0 + gamma,
        },
        support_volume: 2.0,
    })
}

/// Same regression function as `power_margin`, with the marginal reweighted
/// to density `(gamma q / 2) |x|^{gamma q - 1}` so the margin exponent is
/// exactly `q`.
pub fn make_weighted_power_margin(gamma: f64, q: f64) -> Result<SyntheticDistribution> {
    check_positive_finite("gamma", gamma)?;
    check_positive_finite("q", q)?;
    Ok(SyntheticDistribution {
        d: 1,
        family: Family::WeightedPowerMargin { gamma, q },
        known: KnownExponents {
            q,
            q_constant: 1.0,
            envelope: Some((gamma, 1.0)),
            alpha: (q + 1.0) * gamma,
        },
        support_volume: 2.0,
    })
}

/// Noise-free classes at mutual distance `delta`, uniform on the part of
/// the unit ball with `|x_1| >= delta / 2`.
pub fn make_separated(delta: f64, d: usize) -> Result<SyntheticDistribution> {
    check_positive_finite("delta", delta)?;
    if delta >= 2.0 {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("class separation {delta} leaves no support in the unit ball"),
        });
    }
    if d == 0 {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: "dimension must be at least 1".into(),
        });
    }
    // Volume of { x in B^d : |x_1| >= delta/2 }; the slab cross-section at
    // x_1 = t is a (d-1)-ball of radius sqrt(1 - t^2). d = 1 gives 2 - delta.
    let slab = if d == 1 {
        delta
    } else {
        let vd1 = unit_ball_volume(d - 1);
        adaptive_simpson(
            |t: f64| vd1 * (1.0 - t * t).powf((d as f64 - 1.0) / 2.0),
            -delta / 2.0,
            delta / 2.0,
            1e-12,
        )?
        .value
    };
    Ok(SyntheticDistribution {
        d,
        family: Family::Separated { delta },
        known: KnownExponents {
            q: f64::INFINITY,
            q_constant: 1.0,
            envelope: None,
            alpha: f64::INFINITY,
        },
        support_volume: unit_ball_volume(d) - slab,
    })
}

fn check_positive_finite(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {v}"),
        })
    }
}

impl SyntheticDistribution {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn known_exponents(&self) -> &KnownExponents {
        &self.known
    }

    pub fn support_volume(&self) -> f64 {
        self.support_volume
    }

    /// `P(Y = +1 | x)`.
    pub fn eta(&self, x: &Point) -> f64 {
        debug_assert_eq!(x.dim(), self.d);
        match self.family {
            Family::PowerMargin { gamma } | Family::WeightedPowerMargin { gamma, .. } => {
                let v = x.0[0];
                0.5 * (1.0 + sign_pm(v) * v.abs().powf(gamma))
            }
            Family::Separated { .. } => {
                if x.0[0] >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `2 eta(x) - 1` in closed form. Reconstructing this from `eta` loses
    /// everything below machine epsilon to cancellation, which silently
    /// deletes the singular mass near the decision boundary; the noise
    /// functionals and margin-identity risks must use this form.
    pub fn margin(&self, x: &Point) -> f64 {
        debug_assert_eq!(x.dim(), self.d);
        match self.family {
            Family::PowerMargin { gamma } | Family::WeightedPowerMargin { gamma, .. } => {
                let v = x.0[0];
                sign_pm(v) * v.abs().powf(gamma)
            }
            Family::Separated { .. } => {
                if x.0[0] >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Radial extension of [`Self::margin`] to the enlarged ball `3X`.
    pub fn margin_hat(&self, coords: &[f64]) -> f64 {
        debug_assert_eq!(coords.len(), self.d);
        let r2: f64 = coords.iter().map(|v| v * v).sum();
        if r2 <= 1.0 {
            self.margin(&Point(coords.to_vec()))
        } else {
            let r = r2.sqrt();
            let scaled: Vec<f64> = coords.iter().map(|v| v / r).collect();
            self.margin(&Point(scaled))
        }
    }

    /// Radial extension of `eta` to the enlarged ball `3X`: unchanged on the
    /// domain, `eta(x / |x|)` for `1 < |x| <= 3`.
    pub fn eta_hat(&self, coords: &[f64]) -> f64 {
        debug_assert_eq!(coords.len(), self.d);
        let r2: f64 = coords.iter().map(|v| v * v).sum();
        if r2 <= 1.0 {
            self.eta(&Point(coords.to_vec()))
        } else {
            let r = r2.sqrt();
            let scaled: Vec<f64> = coords.iter().map(|v| v / r).collect();
            self.eta(&Point(scaled))
        }
    }

    /// Distance to the decision boundary (equivalently, to the union of the
    /// opposite class and the neutral set). For every built-in family the
    /// boundary is the hyperplane `x_1 = 0`.
    pub fn tau(&self, x: &Point) -> f64 {
        debug_assert_eq!(x.dim(), self.d);
        x.0[0].abs()
    }

    /// Marginal density with respect to Lebesgue measure. At the (measure
    /// zero) singular point of the weighted family the reported value is 0
    /// so quadrature endpoints never see a non-finite integrand.
    pub fn marginal_density(&self, x: &Point) -> f64 {
        debug_assert_eq!(x.dim(), self.d);
        match self.family {
            Family::PowerMargin { .. } => 0.5,
            Family::WeightedPowerMargin { gamma, q } => {
                let p = gamma * q;
                let v = x.0[0].abs();
                if v == 0.0 && p < 1.0 {
                    0.0
                } else {
                    0.5 * p * v.powf(p - 1.0)
                }
            }
            Family::Separated { delta } => {
                if x.0[0].abs() >= delta / 2.0 && x.norm_sq() <= 1.0 {
                    1.0 / self.support_volume
                } else {
                    0.0
                }
            }
        }
    }

    /// Interior points where `d = 1` risk integrands may kink or jump.
    pub fn quad_breakpoints(&self) -> Vec<f64> {
        match self.family {
            Family::PowerMargin { .. } | Family::WeightedPowerMargin { .. } => vec![0.0],
            Family::Separated { delta } => vec![-delta / 2.0, 0.0, delta / 2.0],
        }
    }

    /// Coordinates along `axis` where the extended Bayes decision changes
    /// sign; quadrature cells for the smoothed witness split there.
    pub fn witness_axis_breaks(&self, axis: usize) -> Vec<f64> {
        if axis == 0 {
            vec![0.0]
        } else {
            vec![]
        }
    }

    /// One marginal draw. The draw order per sample is part of the artifact
    /// contract (reruns must be byte-identical), so it never changes:
    /// magnitude/position uniforms first, then the label uniform.
    pub(crate) fn sample_marginal<R: Rng>(&self, rng: &mut R) -> Point {
        match self.family {
            Family::PowerMargin { .. } => {
                let u: f64 = rng.gen();
                Point(vec![2.0 * u - 1.0])
            }
            Family::WeightedPowerMargin { gamma, q } => {
                let u: f64 = rng.gen();
                let s: f64 = rng.gen();
                let mag = u.powf(1.0 / (gamma * q));
                Point(vec![if s < 0.5 { -mag } else { mag }])
            }
            Family::Separated { delta } => {
                if self.d == 1 {
                    let u: f64 = rng.gen();
                    let s = u * (2.0 - delta);
                    let x = if s < 1.0 - delta / 2.0 {
                        -1.0 + s
                    } else {
                        s + delta - 1.0
                    };
                    Point(vec![x])
                } else {
                    loop {
                        let p = uniform_ball(rng, self.d);
                        if p.0[0].abs() >= delta / 2.0 {
                            return p;
                        }
                    }
                }
            }
        }
    }

    /// Draws `n` labeled samples; labels are `+1` with probability `eta(x)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<TrainingSet> {
        if n == 0 {
            return Err(Error::Empty("sample size must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            let x = self.sample_marginal(&mut rng);
            let u: f64 = rng.gen();
            let y = if u < self.eta(&x) { 1 } else { -1 };
            samples.push(LabeledSample { x, y });
        }
        Ok(TrainingSet {
            d: self.d,
            samples,
            seed,
        })
    }
}

/// Uniform draw from the unit ball: normalized Gaussian direction scaled by
/// `U^{1/d}`.
fn uniform_ball<R: Rng>(rng: &mut R, d: usize) -> Point {
    loop {
        let g: Vec<f64> = (0..d)
            .map(|_| {
                // Box-Muller on two uniforms; only the cosine branch is used
                // so the stream advances by a fixed amount per coordinate.
                let u1: f64 = rng.gen::<f64>().max(1e-300);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let norm_sq: f64 = g.iter().map(|v| v * v).sum();
        if norm_sq > 0.0 {
            let r: f64 = rng.gen::<f64>().powf(1.0 / d as f64);
            let norm = norm_sq.sqrt();
            return Point(g.into_iter().map(|v| v * r / norm).collect());
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub x: Point,
    /// Label in `{-1, +1}`.
    pub y: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    pub d: usize,
    pub samples: Vec<LabeledSample>,
    pub seed: u64,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Builds a set from raw parts, enforcing the domain and label alphabet.
    pub fn new(d: usize, samples: Vec<LabeledSample>, seed: u64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("training set"));
        }
        for s in &samples {
            if s.x.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: s.x.dim(),
                });
            }
            check_in_domain(&s.x)?;
            if s.y != 1 && s.y != -1 {
                return Err(Error::InvalidParameter {
                    name: "label",
                    reason: format!("labels must be +1 or -1, got {}", s.y),
                });
            }
        }
        Ok(TrainingSet { d, samples, seed })
    }

    /// `Some(label)` when every sample carries the same label.
    pub fn uniform_label(&self) -> Option<i8> {
        let first = self.samples.first()?.y;
        self.samples
            .iter()
            .all(|s| s.y == first)
            .then_some(first)
    }

    /// Columnar text form: a header recording `d`, `n`, `seed` and the
    /// family parameters, then one line per sample (coordinates, label).
    /// Floats print in shortest round-trip form, so parsing is bit-exact.
    pub fn to_text(&self, family_echo: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# d={} n={} seed={} family={}\n",
            self.d,
            self.samples.len(),
            self.seed,
            family_echo
        ));
        for s in &self.samples {
            for c in &s.x.0 {
                out.push_str(&format!("{c} "));
            }
            out.push_str(&format!("{}\n", s.y));
        }
        out
    }

    /// Parses the columnar form; returns the set and the family echo string.
    pub fn from_text(text: &str) -> Result<(Self, String)> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Empty("training-set file"))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse {
                line: 1,
                reason: "missing '#' header".into(),
            })?
            .trim();
        let mut d = None;
        let mut n = None;
        let mut seed = None;
        let mut family = String::new();
        for tok in header.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse {
                line: 1,
                reason: format!("malformed header token '{tok}'"),
            })?;
            match k {
                "d" => d = v.parse::<usize>().ok(),
                "n" => n = v.parse::<usize>().ok(),
                "seed" => seed = v.parse::<u64>().ok(),
                "family" => family = v.to_string(),
                _ => {
                    return Err(Error::Parse {
                        line: 1,
                        reason: format!("unknown header key '{k}'"),
                    })
                }
            }
        }
        let (d, n, seed) = match (d, n, seed) {
            (Some(d), Some(n), Some(s)) => (d, n, s),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    reason: "header must define d, n, seed".into(),
                })
            }
        };
        let mut samples = Vec::with_capacity(n);
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != d + 1 {
                return Err(Error::Parse {
                    line: i + 1,
                    reason: format!("expected {} fields, got {}", d + 1, fields.len()),
                });
            }
            let coords: std::result::Result<Vec<f64>, _> =
                fields[..d].iter().map(|f| f.parse::<f64>()).collect();
            let coords = coords.map_err(|e| Error::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?;
            let y: i8 = fields[d].parse().map_err(|_| Error::Parse {
                line: i + 1,
                reason: format!("bad label '{}'", fields[d]),
            })?;
            samples.push(LabeledSample {
                x: Point(coords),
                y,
            });
        }
        if samples.len() != n {
            return Err(Error::Parse {
                line: 1,
                reason: format!("header says n={n} but file has {} rows", samples.len()),
            });
        }
        let set = TrainingSet::new(d, samples, seed)?;
        Ok((set, family))
    }
}

/// Integrates `g` against the marginal (`d = 1` only), splitting at the
/// family's own breakpoints plus caller-supplied extras (jumps the
/// integrand introduces, e.g. decision boundaries).
pub(crate) fn integrate_marginal_extra<G: Fn(f64) -> f64>(
    dist: &SyntheticDistribution,
    g: G,
    extra: &[f64],
    tol: f64,
) -> Result<quad::Quad> {
    debug_assert_eq!(dist.d, 1);
    let mut breaks = dist.quad_breakpoints();
    breaks.extend_from_slice(extra);
    adaptive_simpson_split(
        |x| {
            let p = Point(vec![x]);
            let w = dist.marginal_density(&p);
            if w == 0.0 {
                0.0
            } else {
                w * g(x)
            }
        },
        -1.0,
        1.0,
        &breaks,
        tol,
    )
}

/// Monte Carlo mean of `g` under the marginal (`d >= 2` path).
pub(crate) fn mc_expect<G: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    g: G,
    cfg: &RiskConfig,
) -> Estimate {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.mc_seed);
    let vals: Vec<f64> = (0..cfg.mc_samples)
        .map(|_| g(&dist.sample_marginal(&mut rng)))
        .collect();
    let (value, error) = quad::mean_and_se(&vals);
    Estimate { value, error }
}

pub(crate) fn expect<G: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    g: G,
    cfg: &RiskConfig,
) -> Result<Estimate> {
    expect_extra(dist, g, &[], cfg)
}

/// [`expect`] with extra `d = 1` quadrature breakpoints; the Monte Carlo
/// path ignores them.
pub(crate) fn expect_extra<G: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    g: G,
    extra: &[f64],
    cfg: &RiskConfig,
) -> Result<Estimate> {
    if dist.d == 1 {
        let q = integrate_marginal_extra(dist, |x| g(&Point(vec![x])), extra, cfg.quad_tol)?;
        Ok(Estimate {
            value: q.value,
            error: q.error,
        })
    } else {
        Ok(mc_expect(dist, g, cfg))
    }
}

/// Sign-change scan resolution for decision-boundary localization: cells
/// this fine bracket every misclassification interval wider than ~2e-3,
/// and bisection then sharpens each bracket to roundoff.
const SIGN_SCAN_CELLS: usize = 1024;

/// Zero crossings of `sign(f)` (with `sign(0) = +1`) along `[-1, 1]`.
/// The 0-1 regret integrand is supported exactly between these crossings
/// and the Bayes boundary and vanishes at the latter, so without them the
/// coarse quadrature probes can all land on zeros and miss the entire
/// misclassified region.
fn decision_breaks<F: Fn(&Point) -> f64>(f: &F) -> Vec<f64> {
    let eval = |x: f64| sign_pm(f(&Point(vec![x])));
    let mut breaks = Vec::new();
    let mut prev_x = -1.0;
    let mut prev_s = eval(prev_x);
    for i in 1..=SIGN_SCAN_CELLS {
        let x = -1.0 + 2.0 * i as f64 / SIGN_SCAN_CELLS as f64;
        let s = eval(x);
        if s != prev_s {
            // Left edge of the bracket keeps its sign throughout.
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if eval(mid) == prev_s {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            breaks.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_s = s;
    }
    breaks
}

/// Misclassification probability of `sign(f)` (with `sign(0) = +1`).
pub fn classification_risk<F: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    f: F,
    cfg: &RiskConfig,
) -> Result<Estimate> {
    let breaks = if dist.d == 1 {
        decision_breaks(&f)
    } else {
        Vec::new()
    };
    expect_extra(
        dist,
        |x| {
            let eta = dist.eta(x);
            if sign_pm(f(x)) > 0.0 {
                1.0 - eta
            } else {
                eta
            }
        },
        &breaks,
        cfg,
    )
}

/// Risk of the Bayes classifier: `E min(eta, 1 - eta)`.
pub fn bayes_risk(dist: &SyntheticDistribution, cfg: &RiskConfig) -> Result<Estimate> {
    expect(
        dist,
        |x| {
            let eta = dist.eta(x);
            eta.min(1.0 - eta)
        },
        cfg,
    )
}

/// `R(f) - R(Bayes)`, integrated as one expectation of the pointwise
/// (nonnegative) regret so cancellation cannot produce spurious negatives;
/// the value is still clamped below at the evaluation tolerance.
pub fn excess_risk<F: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    f: F,
    cfg: &RiskConfig,
) -> Result<Estimate> {
    let breaks = if dist.d == 1 {
        decision_breaks(&f)
    } else {
        Vec::new()
    };
    let est = expect_extra(
        dist,
        |x| {
            let eta = dist.eta(x);
            let c = if sign_pm(f(x)) > 0.0 { 1.0 - eta } else { eta };
            c - eta.min(1.0 - eta)
        },
        &breaks,
        cfg,
    )?;
    let floor = if dist.d == 1 { cfg.quad_tol } else { 2.0 * est.error };
    Ok(Estimate {
        value: est.value.max(-floor),
        error: est.error,
    })
}

fn hinge(y: f64, t: f64) -> f64 {
    (1.0 - y * t).max(0.0)
}

/// Expected hinge loss `E [ eta (1-f)_+ + (1-eta) (1+f)_+ ]`.
pub fn hinge_risk<F: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    f: F,
    cfg: &RiskConfig,
) -> Result<Estimate> {
    expect(
        dist,
        |x| {
            let eta = dist.eta(x);
            let v = f(x);
            eta * hinge(1.0, v) + (1.0 - eta) * hinge(-1.0, v)
        },
        cfg,
    )
}

/// Minimal hinge risk `1 - E |2 eta - 1|`.
pub fn hinge_risk_min(dist: &SyntheticDistribution, cfg: &RiskConfig) -> Result<Estimate> {
    let e = expect(dist, |x| dist.margin(x).abs(), cfg)?;
    Ok(Estimate {
        value: 1.0 - e.value,
        error: e.error,
    })
}

/// Both evaluations of the excess hinge risk.
#[derive(Clone, Copy, Debug)]
pub struct ExcessHingeRisk {
    /// Direct route: one expectation of the pointwise excess conditional
    /// hinge risk (valid for any measurable `f`).
    pub direct: Estimate,
    /// Margin-identity route `E |2 eta - 1| |f - f_bayes|`; only defined for
    /// `f` mapping into `[-1, 1]`, `None` when the range check failed.
    pub identity: Option<Estimate>,
    /// Grid estimate of `sup |f|` used by the range check.
    pub sup_abs_f: f64,
}

/// Pointwise excess conditional hinge risk; the conditional minimum is
/// `1 - |2 eta - 1|`, so the integrand is nonnegative.
fn hinge_regret(dist: &SyntheticDistribution, x: &Point, v: f64) -> f64 {
    let m = dist.margin(x);
    let eta = 0.5 * (1.0 + m);
    eta * hinge(1.0, v) + (1.0 - eta) * hinge(-1.0, v) - (1.0 - m.abs())
}

fn sup_abs_on_grid<F: Fn(&Point) -> f64>(dist: &SyntheticDistribution, f: &F, cfg: &RiskConfig) -> f64 {
    if dist.d == 1 {
        let m = 4096;
        (0..=m)
            .map(|i| f(&Point(vec![-1.0 + 2.0 * i as f64 / m as f64])).abs())
            .fold(0.0, f64::max)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.mc_seed ^ 0x5355_5045);
        (0..8192)
            .map(|_| f(&dist.sample_marginal(&mut rng)).abs())
            .fold(0.0, f64::max)
    }
}

/// Direct-route excess hinge risk alone; valid for unbounded `f`.
pub fn excess_hinge_direct<F: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    f: F,
    cfg: &RiskConfig,
) -> Result<Estimate> {
    expect(dist, |x| hinge_regret(dist, x, f(x)), cfg)
}

/// Excess hinge risk by the direct route, plus the margin-identity route
/// when `f` maps into `[-1, 1]` (within `RANGE_TOL`).
pub fn excess_hinge_risk<F: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    f: F,
    cfg: &RiskConfig,
) -> Result<ExcessHingeRisk> {
    let direct = expect(dist, |x| hinge_regret(dist, x, f(x)), cfg)?;
    let sup_abs_f = sup_abs_on_grid(dist, &f, cfg);
    let identity = if sup_abs_f <= 1.0 + RANGE_TOL {
        Some(identity_route(dist, &f, cfg)?)
    } else {
        None
    };
    Ok(ExcessHingeRisk {
        direct,
        identity,
        sup_abs_f,
    })
}

fn identity_route<F: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    f: &F,
    cfg: &RiskConfig,
) -> Result<Estimate> {
    expect(
        dist,
        |x| {
            let m = dist.margin(x);
            m.abs() * (f(x) - sign_pm(m)).abs()
        },
        cfg,
    )
}

/// The margin-identity route alone; errors when `sup |f| > 1 + RANGE_TOL`.
pub fn excess_hinge_identity<F: Fn(&Point) -> f64>(
    dist: &SyntheticDistribution,
    f: F,
    cfg: &RiskConfig,
) -> Result<Estimate> {
    let sup = sup_abs_on_grid(dist, &f, cfg);
    if sup > 1.0 + RANGE_TOL {
        return Err(Error::RangeViolation {
            sup,
            tol: RANGE_TOL,
        });
    }
    identity_route(dist, &f, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: RiskConfig = RiskConfig {
        quad_tol: 1e-10,
        mc_samples: 50_000,
        mc_seed: 7,
    };

    #[test]
    fn eta_and_tau_closed_forms() {
        let d = make_power_margin(2.0).unwrap();
        let x = Point(vec![0.5]);
        assert!((d.eta(&x) - 0.625).abs() < 1e-15);
        assert!((d.tau(&x) - 0.5).abs() < 1e-15);
        assert!((d.eta(&Point(vec![0.0])) - 0.5).abs() < 1e-15);
        assert!((d.eta(&Point(vec![-0.5])) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn radial_extension_freezes_boundary_values() {
        let d = make_power_margin(1.0).unwrap();
        assert_eq!(d.eta_hat(&[2.5]), 1.0);
        assert_eq!(d.eta_hat(&[-1.5]), 0.0);
        assert!((d.eta_hat(&[0.25]) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn bayes_risk_power_margin_closed_form() {
        // E min(eta, 1-eta) = (1/2) int_0^1 (1 - x^g) dx = g / (2 (g+1)).
        for gamma in [0.5, 1.0, 2.0] {
            let d = make_power_margin(gamma).unwrap();
            let b = bayes_risk(&d, &CFG).unwrap();
            let exact = gamma / (2.0 * (gamma + 1.0));
            assert!((b.value - exact).abs() < 1e-9, "gamma={gamma}: {}", b.value);
        }
    }

    #[test]
    fn hinge_risk_min_power_margin_closed_form() {
        let d = make_power_margin(1.0).unwrap();
        let h = hinge_risk_min(&d, &CFG).unwrap();
        assert!((h.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn constant_classifier_risks() {
        let d = make_power_margin(1.0).unwrap();
        let r = classification_risk(&d, |_| 1.0, &CFG).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
        let h = hinge_risk(&d, |_| 0.0, &CFG).unwrap();
        assert!((h.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn densities_normalize_d1() {
        for dist in [
            make_power_margin(0.7).unwrap(),
            make_weighted_power_margin(1.0, 2.0).unwrap(),
            make_weighted_power_margin(2.0, 1.0).unwrap(),
            make_separated(0.5, 1).unwrap(),
        ] {
            let q = integrate_marginal_extra(&dist, |_| 1.0, &[], 1e-10).unwrap();
            assert!((q.value - 1.0).abs() < 1e-8, "{:?}: {}", dist.family, q.value);
        }
    }

    #[test]
    fn density_normalizes_d2_by_monte_carlo() {
        // E_{uniform ball}[density] * vol(ball) = 1.
        let dist = make_separated(0.5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let vals: Vec<f64> = (0..n)
            .map(|_| dist.marginal_density(&uniform_ball(&mut rng, 2)))
            .collect();
        let (mean, se) = quad::mean_and_se(&vals);
        let total = mean * unit_ball_volume(2);
        assert!(
            (total - 1.0).abs() < 4.0 * se * unit_ball_volume(2) + 1e-3,
            "total={total} se={se}"
        );
    }

    #[test]
    fn weighted_family_reduces_to_uniform_at_gamma_q_one() {
        let w = make_weighted_power_margin(1.0, 1.0).unwrap();
        assert!((w.marginal_density(&Point(vec![0.3])) - 0.5).abs() < 1e-15);
        assert!((w.marginal_density(&Point(vec![-0.9])) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn separated_support_and_tau() {
        let dist = make_separated(0.5, 1).unwrap();
        let ts = dist.sample(500, 3).unwrap();
        for s in &ts.samples {
            assert!(dist.tau(&s.x) >= 0.25);
            let lab = if s.x.0[0] >= 0.0 { 1 } else { -1 };
            assert_eq!(s.y, lab);
        }
        let d2 = make_separated(0.5, 2).unwrap();
        let ts2 = d2.sample(500, 3).unwrap();
        for s in &ts2.samples {
            assert!(d2.tau(&s.x) >= 0.25);
            assert!(s.x.norm_sq() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn sampling_is_bit_reproducible() {
        let dist = make_weighted_power_margin(1.0, 2.0).unwrap();
        let a = dist.sample(64, 99).unwrap();
        let b = dist.sample(64, 99).unwrap();
        for (s, t) in a.samples.iter().zip(&b.samples) {
            assert_eq!(s.x.0[0].to_bits(), t.x.0[0].to_bits());
            assert_eq!(s.y, t.y);
        }
        let c = dist.sample(64, 100).unwrap();
        assert!(a.samples.iter().zip(&c.samples).any(|(s, t)| s.x != t.x));
    }

    #[test]
    fn sample_labels_follow_eta() {
        let dist = make_power_margin(1.0).unwrap();
        let ts = dist.sample(40_000, 5).unwrap();
        // Empirical P(Y=+1 | x > 0.5) should be near E[eta | x > 0.5] = 0.875.
        let (mut pos, mut tot) = (0.0f64, 0.0f64);
        for s in &ts.samples {
            if s.x.0[0] > 0.5 {
                tot += 1.0;
                if s.y == 1 {
                    pos += 1.0;
                }
            }
        }
        assert!((pos / tot - 0.875).abs() < 0.02, "{}", pos / tot);
    }

    #[test]
    fn training_set_round_trips_bit_exactly() {
        let dist = make_separated(0.5, 2).unwrap();
        let ts = dist.sample(33, 12345).unwrap();
        let text = ts.to_text(&format!("{}", dist.family));
        let (back, fam) = TrainingSet::from_text(&text).unwrap();
        assert_eq!(fam, "separated(delta=0.5)");
        assert_eq!(back.seed, ts.seed);
        assert_eq!(back.d, ts.d);
        for (a, b) in ts.samples.iter().zip(&back.samples) {
            assert_eq!(a.y, b.y);
            for (u, v) in a.x.0.iter().zip(&b.x.0) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }

    #[test]
    fn excess_hinge_routes_agree_for_clipped_function() {
        let dist = make_power_margin(1.0).unwrap();
        let f = |x: &Point| (3.0 * x.0[0]).clamp(-1.0, 1.0);
        let r = excess_hinge_risk(&dist, f, &CFG).unwrap();
        let z = r.identity.expect("clipped function is in range");
        assert!((r.direct.value - z.value).abs() < 1e-6);
        // By symmetry the identity value is int_0^{1/3} x (1 - 3x) dx = 1/54.
        let exact = 1.0 / 54.0;
        assert!((r.direct.value - exact).abs() < 1e-8, "{}", r.direct.value);
    }

    #[test]
    fn identity_route_rejects_out_of_range() {
        let dist = make_power_margin(1.0).unwrap();
        let err = excess_hinge_identity(&dist, |x: &Point| 3.0 * x.0[0], &CFG);
        assert!(matches!(err, Err(Error::RangeViolation { .. })));
        let both = excess_hinge_risk(&dist, |x: &Point| 3.0 * x.0[0], &CFG).unwrap();
        assert!(both.identity.is_none());
        assert!(both.sup_abs_f > 2.9);
    }

    #[test]
    fn excess_risk_of_bayes_is_zero() {
        let dist = make_power_margin(2.0).unwrap();
        let e = excess_risk(&dist, |x: &Point| sign_pm(dist.margin(x)), &CFG).unwrap();
        assert!(e.value.abs() < 1e-9);
        assert!(e.value >= -CFG.quad_tol);
    }

    #[test]
    fn parameter_validation() {
        assert!(make_power_margin(0.0).is_err());
        assert!(make_power_margin(f64::NAN).is_err());
        assert!(make_weighted_power_margin(1.0, 0.0).is_err());
        assert!(make_separated(2.0, 1).is_err());
        assert!(make_separated(0.5, 0).is_err());
        let dist = make_power_margin(1.0).unwrap();
        assert!(dist.sample(0, 1).is_err());
    }
}
