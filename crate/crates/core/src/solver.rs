//! Certified solvers for the regularized empirical hinge-loss problems,
//! without offset and with offset.
//!
//! Dividing the objective `lambda ||f||^2 + (1/n) sum hinge` by `2 lambda`
//! turns it into the standard soft-margin problem with cost parameter
//! `C = 1/(2 lambda n)`, whose box-constrained quadratic dual is solved by
//! coordinate ascent (offset-free) or pairwise updates on the
//! equality-constrained dual (with offset). The duality gap mapped back to
//! the original scale is the optimality certificate; exceeding the pass
//! budget is a reported error carrying the best certificate achieved.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distributions::TrainingSet;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::kernel::{GaussianKernel, KernelExpansion};

/// Coordinate passes (n updates each) before the solver gives up.
pub const DEFAULT_PASS_BUDGET: u64 = 1_000_000;

/// Slack tolerance for the norm and offset bound checks.
pub const BOUND_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SvmProblem {
    pub training_set: TrainingSet,
    pub lambda: f64,
    pub kernel: GaussianKernel,
    pub with_offset: bool,
}

impl SvmProblem {
    pub fn new(
        training_set: TrainingSet,
        lambda: f64,
        kernel: GaussianKernel,
        with_offset: bool,
    ) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("regularization weight must be positive and finite, got {lambda}"),
            });
        }
        if training_set.is_empty() {
            return Err(Error::Empty("training set"));
        }
        Ok(SvmProblem {
            training_set,
            lambda,
            kernel,
            with_offset,
        })
    }

    pub fn n(&self) -> usize {
        self.training_set.len()
    }

    /// Default duality-gap stopping tolerance, `1e-8 * n`.
    pub fn default_tol(&self) -> f64 {
        1e-8 * self.n() as f64
    }

    /// Cost parameter of the equivalent standard soft-margin problem.
    pub fn cost(&self) -> f64 {
        1.0 / (2.0 * self.lambda * self.n() as f64)
    }
}

#[derive(Clone, Debug)]
pub struct SvmSolution {
    pub expansion: KernelExpansion,
    pub objective: f64,
    /// Duality gap on the original objective scale at termination.
    pub certificate: f64,
    /// Coordinate passes consumed.
    pub iterations: u64,
    pub lambda: f64,
}

fn hinge(y: f64, t: f64) -> f64 {
    (1.0 - y * t).max(0.0)
}

/// `lambda * c'Kc + (1/n) sum hinge(y_i, f(x_i) + b)`. The offset must be
/// zero for offset-free problems.
pub fn objective(problem: &SvmProblem, expansion: &KernelExpansion) -> Result<f64> {
    if expansion.kernel.sigma() != problem.kernel.sigma() {
        return Err(Error::KernelMismatch {
            expansion: expansion.kernel.sigma(),
            problem: problem.kernel.sigma(),
        });
    }
    if !problem.with_offset && expansion.offset != 0.0 {
        return Err(Error::OffsetNotAllowed {
            offset: expansion.offset,
        });
    }
    let n = problem.n() as f64;
    let risk: f64 = problem
        .training_set
        .samples
        .iter()
        .map(|s| hinge(s.y as f64, expansion.eval(&s.x)))
        .sum::<f64>()
        / n;
    Ok(problem.lambda * expansion.rkhs_norm_sq() + risk)
}

/// Minimizer of `b -> sum_i hinge(y_i, u_i + b)`; when a whole interval
/// minimizes, the point of smallest magnitude is returned.
fn optimal_offset(u: &[f64], y: &[f64]) -> f64 {
    let mut breaks: Vec<f64> = u
        .iter()
        .zip(y)
        .map(|(&ui, &yi)| if yi > 0.0 { 1.0 - ui } else { -1.0 - ui })
        .collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p = y.iter().filter(|&&v| v > 0.0).count();
    let n = y.len();
    // The subgradient after passing k breakpoints is k - p, so the
    // minimizing interval sits between breakpoints p-1 and p.
    if p == 0 {
        breaks[0].min(0.0)
    } else if p == n {
        breaks[n - 1].max(0.0)
    } else {
        0.0f64.clamp(breaks[p - 1], breaks[p])
    }
}

struct DualState<'a> {
    k: &'a DMatrix<f64>,
    y: &'a [f64],
    cost: f64,
    alpha: Vec<f64>,
    /// `u_i = f(x_i)`, maintained incrementally.
    u: Vec<f64>,
}

impl DualState<'_> {
    fn refresh_u(&mut self) {
        let n = self.y.len();
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += self.alpha[j] * self.y[j] * self.k[(i, j)];
            }
            self.u[i] = s;
        }
    }

    /// One cyclic coordinate-ascent sweep (offset-free dual).
    fn cd_pass(&mut self, order: &[usize]) {
        let n = self.y.len();
        for &i in order {
            let next = (self.alpha[i] + 1.0 - self.y[i] * self.u[i]).clamp(0.0, self.cost);
            let delta = next - self.alpha[i];
            if delta != 0.0 {
                self.alpha[i] = next;
                let dy = delta * self.y[i];
                for j in 0..n {
                    self.u[j] += dy * self.k[(i, j)];
                }
            }
        }
    }

    /// `n` most-violating-pair updates on the equality-constrained dual.
    fn smo_pass(&mut self) {
        let n = self.y.len();
        for _ in 0..n {
            // F_i = y_i - u_i; optimality means max over the raisable set
            // is at most the min over the lowerable set.
            let mut best_i: Option<(usize, f64)> = None;
            let mut best_j: Option<(usize, f64)> = None;
            for t in 0..n {
                let f = self.y[t] - self.u[t];
                let raisable = if self.y[t] > 0.0 {
                    self.alpha[t] < self.cost
                } else {
                    self.alpha[t] > 0.0
                };
                let lowerable = if self.y[t] > 0.0 {
                    self.alpha[t] > 0.0
                } else {
                    self.alpha[t] < self.cost
                };
                if raisable && best_i.map_or(true, |(_, bf)| f > bf) {
                    best_i = Some((t, f));
                }
                if lowerable && best_j.map_or(true, |(_, bf)| f < bf) {
                    best_j = Some((t, f));
                }
            }
            let ((i, fi), (j, fj)) = match (best_i, best_j) {
                (Some(a), Some(b)) => (a, b),
                _ => return,
            };
            if i == j || fi - fj <= 1e-14 {
                return;
            }
            let mut t_max = if self.y[i] > 0.0 {
                self.cost - self.alpha[i]
            } else {
                self.alpha[i]
            };
            t_max = t_max.min(if self.y[j] > 0.0 {
                self.alpha[j]
            } else {
                self.cost - self.alpha[j]
            });
            let curv = 2.0 - 2.0 * self.k[(i, j)];
            let step = if curv > 1e-14 {
                ((fi - fj) / curv).min(t_max)
            } else {
                t_max
            };
            if step <= 0.0 {
                return;
            }
            self.alpha[i] += self.y[i] * step;
            self.alpha[j] -= self.y[j] * step;
            for t in 0..n {
                self.u[t] += step * (self.k[(i, t)] - self.k[(j, t)]);
            }
        }
    }

    /// Original-scale duality gap, objective and offset at the current state.
    fn gap(&self, lambda: f64, with_offset: bool) -> (f64, f64, f64) {
        let n = self.y.len();
        let w2: f64 = (0..n).map(|i| self.alpha[i] * self.y[i] * self.u[i]).sum();
        let w2 = w2.max(0.0);
        let b = if with_offset {
            optimal_offset(&self.u, self.y)
        } else {
            0.0
        };
        let risk: f64 = (0..n).map(|i| hinge(self.y[i], self.u[i] + b)).sum();
        let primal = 0.5 * w2 + self.cost * risk;
        let dual = self.alpha.iter().sum::<f64>() - 0.5 * w2;
        let gap = 2.0 * lambda * (primal - dual);
        (gap.max(0.0), 2.0 * lambda * primal, b)
    }
}

/// Solves to a certified duality gap of at most `tol_opt` (original scale).
pub fn train(problem: &SvmProblem, tol_opt: f64) -> Result<SvmSolution> {
    train_full(problem, tol_opt, None, DEFAULT_PASS_BUDGET)
}

/// [`train`] with an explicit coordinate order seed (offset-free variant
/// only; the pairwise solver selects its own order) and pass budget. The
/// default natural order is used when `order_seed` is `None`.
pub fn train_full(
    problem: &SvmProblem,
    tol_opt: f64,
    order_seed: Option<u64>,
    budget: u64,
) -> Result<SvmSolution> {
    if !(tol_opt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol_opt",
            reason: format!("stopping tolerance must be positive, got {tol_opt}"),
        });
    }
    let n = problem.n();
    let xs: Vec<Point> = problem
        .training_set
        .samples
        .iter()
        .map(|s| s.x.clone())
        .collect();
    let y: Vec<f64> = problem
        .training_set
        .samples
        .iter()
        .map(|s| s.y as f64)
        .collect();

    if problem.with_offset {
        if let Some(label) = problem.training_set.uniform_label() {
            // All labels equal: f = 0 with b set to the common label.
            let expansion = KernelExpansion::new(
                problem.kernel,
                vec![xs[0].clone()],
                vec![0.0],
                label as f64,
            )?;
            return Ok(SvmSolution {
                expansion,
                objective: 0.0,
                certificate: 0.0,
                iterations: 0,
                lambda: problem.lambda,
            });
        }
    }

    let k = problem.kernel.gram(&xs);
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(seed) = order_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut state = DualState {
        k: &k,
        y: &y,
        cost: problem.cost(),
        alpha: vec![0.0; n],
        u: vec![0.0; n],
    };

    let mut passes = 0u64;
    let mut best_gap = f64::INFINITY;
    loop {
        if passes >= budget {
            return Err(Error::SolverBudget {
                passes,
                gap: best_gap,
                tol: tol_opt,
            });
        }
        if problem.with_offset {
            state.smo_pass();
        } else {
            state.cd_pass(&order);
        }
        passes += 1;
        let (gap, _, _) = state.gap(problem.lambda, problem.with_offset);
        best_gap = best_gap.min(gap);
        if gap <= tol_opt {
            // Certify against freshly recomputed responses so incremental
            // drift cannot fake convergence.
            state.refresh_u();
            let (gap, objective, b) = state.gap(problem.lambda, problem.with_offset);
            best_gap = best_gap.min(gap);
            if gap <= tol_opt {
                let coeffs: Vec<f64> = (0..n).map(|i| state.alpha[i] * y[i]).collect();
                let expansion = KernelExpansion::new(problem.kernel, xs, coeffs, b)?;
                return Ok(SvmSolution {
                    expansion,
                    objective,
                    certificate: gap,
                    iterations: passes,
                    lambda: problem.lambda,
                });
            }
        }
    }
}

/// Slack of the bound `||f|| <= lambda^{-1/2}`; nonnegative up to solver
/// tolerance on every trained solution.
pub fn norm_bound_slack(solution: &SvmSolution) -> f64 {
    solution.lambda.powf(-0.5) - solution.expansion.rkhs_norm()
}

pub fn norm_bound_check(solution: &SvmSolution) -> bool {
    norm_bound_slack(solution) >= -BOUND_TOL
}

/// Slack of `|b| <= sup |f| + 1` with the sup estimated over the expansion
/// centers (the optimal offset always lies in their breakpoint hull).
pub fn offset_bound_slack(solution: &SvmSolution) -> f64 {
    let sup = solution
        .expansion
        .centers
        .iter()
        .map(|c| {
            (solution.expansion.eval(c) - solution.expansion.offset).abs()
        })
        .fold(0.0, f64::max);
    sup + 1.0 - solution.expansion.offset.abs()
}

pub fn offset_bound_check(solution: &SvmSolution) -> bool {
    offset_bound_slack(solution) >= -BOUND_TOL
}

/// Expansion text plus a footer line with the solve metadata; the result
/// still parses as a plain expansion.
pub fn solution_to_text(solution: &SvmSolution) -> String {
    let mut out = solution.expansion.to_text();
    out.push_str(&format!(
        "# objective={} certificate={} lambda={} iterations={}\n",
        solution.objective, solution.certificate, solution.lambda, solution.iterations
    ));
    out
}

pub fn solution_from_text(text: &str) -> Result<SvmSolution> {
    let expansion = KernelExpansion::from_text(text)?;
    let footer = text
        .lines()
        .rev()
        .find(|l| l.starts_with("# objective="))
        .ok_or_else(|| Error::Parse {
            line: text.lines().count(),
            reason: "missing solution footer".into(),
        })?;
    let (mut objective, mut certificate, mut lambda, mut iterations) = (None, None, None, None);
    for tok in footer.trim_start_matches('#').split_whitespace() {
        if let Some((k, v)) = tok.split_once('=') {
            match k {
                "objective" => objective = v.parse::<f64>().ok(),
                "certificate" => certificate = v.parse::<f64>().ok(),
                "lambda" => lambda = v.parse::<f64>().ok(),
                "iterations" => iterations = v.parse::<u64>().ok(),
                _ => {}
            }
        }
    }
    match (objective, certificate, lambda, iterations) {
        (Some(objective), Some(certificate), Some(lambda), Some(iterations)) => Ok(SvmSolution {
            expansion,
            objective,
            certificate,
            lambda,
            iterations,
        }),
        _ => Err(Error::Parse {
            line: 0,
            reason: "footer must define objective, certificate, lambda, iterations".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_power_margin, LabeledSample};
    use rand::Rng;

    fn single_point_problem(lambda: f64, with_offset: bool) -> SvmProblem {
        let samples = vec![LabeledSample {
            x: Point(vec![0.0]),
            y: 1,
        }];
        let ts = TrainingSet::new(1, samples, 0).unwrap();
        SvmProblem::new(ts, lambda, GaussianKernel::new(1.0).unwrap(), with_offset).unwrap()
    }

    fn sampled_problem(
        n: usize,
        seed: u64,
        lambda: f64,
        sigma: f64,
        with_offset: bool,
    ) -> SvmProblem {
        let dist = make_power_margin(1.0).unwrap();
        let ts = dist.sample(n, seed).unwrap();
        SvmProblem::new(ts, lambda, GaussianKernel::new(sigma).unwrap(), with_offset).unwrap()
    }

    #[test]
    fn single_point_closed_forms() {
        let p = single_point_problem(0.5, false);
        let s = train(&p, p.default_tol()).unwrap();
        assert!((s.expansion.coefficients[0] - 1.0).abs() < 1e-6);
        assert!((s.objective - 0.5).abs() < 1e-9);

        let p = single_point_problem(2.0, false);
        let s = train(&p, p.default_tol()).unwrap();
        assert!((s.expansion.coefficients[0] - 0.25).abs() < 1e-6);
        assert!((s.objective - 0.875).abs() < 1e-9);
    }

    #[test]
    fn objective_closed_forms() {
        let p = single_point_problem(0.5, false);
        let k = p.kernel;
        let zero =
            KernelExpansion::new(k, vec![Point(vec![0.0])], vec![0.0], 0.0).unwrap();
        assert!((objective(&p, &zero).unwrap() - 1.0).abs() < 1e-15);
        let one = KernelExpansion::new(k, vec![Point(vec![0.0])], vec![1.0], 0.0).unwrap();
        assert!((objective(&p, &one).unwrap() - 0.5).abs() < 1e-15);

        let p2 = single_point_problem(2.0, false);
        let quarter =
            KernelExpansion::new(k, vec![Point(vec![0.0])], vec![0.25], 0.0).unwrap();
        assert!((objective(&p2, &quarter).unwrap() - 0.875).abs() < 1e-15);
    }

    #[test]
    fn objective_rejects_mismatches() {
        let p = single_point_problem(0.5, false);
        let other = KernelExpansion::new(
            GaussianKernel::new(3.0).unwrap(),
            vec![Point(vec![0.0])],
            vec![1.0],
            0.0,
        )
        .unwrap();
        assert!(matches!(
            objective(&p, &other),
            Err(Error::KernelMismatch { .. })
        ));
        let with_b =
            KernelExpansion::new(p.kernel, vec![Point(vec![0.0])], vec![1.0], 0.5).unwrap();
        assert!(matches!(
            objective(&p, &with_b),
            Err(Error::OffsetNotAllowed { .. })
        ));
    }

    #[test]
    fn degenerate_uniform_labels_with_offset() {
        let samples: Vec<LabeledSample> = (0..5)
            .map(|i| LabeledSample {
                x: Point(vec![i as f64 / 10.0]),
                y: 1,
            })
            .collect();
        let ts = TrainingSet::new(1, samples, 0).unwrap();
        let p = SvmProblem::new(ts, 0.1, GaussianKernel::new(1.0).unwrap(), true).unwrap();
        let s = train(&p, p.default_tol()).unwrap();
        assert_eq!(s.expansion.offset, 1.0);
        assert_eq!(s.expansion.rkhs_norm(), 0.0);
        assert_eq!(s.objective, 0.0);
        assert!(offset_bound_slack(&s).abs() < 1e-12);
    }

    #[test]
    fn opposite_labels_at_same_point_with_offset() {
        let samples = vec![
            LabeledSample {
                x: Point(vec![0.2]),
                y: 1,
            },
            LabeledSample {
                x: Point(vec![0.2]),
                y: -1,
            },
        ];
        let ts = TrainingSet::new(1, samples, 0).unwrap();
        let p = SvmProblem::new(ts, 0.5, GaussianKernel::new(1.0).unwrap(), true).unwrap();
        let s = train(&p, p.default_tol()).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-8);
        assert!(s.expansion.offset.abs() < 1e-12, "tie should break at 0");
        assert!(s.certificate <= p.default_tol());
    }

    #[test]
    fn seeded_problems_are_certified_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..12u64 {
            let n = 20 + 10 * (trial as usize % 5);
            let lambda = [1e-3, 1e-2, 0.1][trial as usize % 3];
            let sigma = [1.0, 4.0][trial as usize % 2];
            let with_offset = trial % 2 == 1;
            let p = sampled_problem(n, 1000 + trial, lambda, sigma, with_offset);
            let tol = p.default_tol();
            let s = train(&p, tol).unwrap();
            assert!(s.certificate <= tol);
            assert!(s.objective >= 0.0);
            assert!(norm_bound_check(&s), "norm slack {}", norm_bound_slack(&s));
            assert!(offset_bound_check(&s));
            // Random-probe soundness: no feasible expansion beats the
            // certified objective by more than the gap.
            for _ in 0..200 {
                let coeffs: Vec<f64> = (0..n)
                    .map(|_| rng.gen_range(-2.0 * p.cost()..2.0 * p.cost()))
                    .collect();
                let centers: Vec<Point> = p
                    .training_set
                    .samples
                    .iter()
                    .map(|smp| smp.x.clone())
                    .collect();
                let b = if with_offset {
                    rng.gen_range(-1.0..1.0)
                } else {
                    0.0
                };
                let probe = KernelExpansion::new(p.kernel, centers, coeffs, b).unwrap();
                assert!(objective(&p, &probe).unwrap() >= s.objective - tol);
            }
        }
    }

    #[test]
    fn coordinate_order_does_not_change_f() {
        // f is unique, so runs under different orders must agree once each
        // is close enough: a gap of g puts f within sqrt(g / lambda) of the
        // optimum in H-norm, so certifying lambda * (5 tol)^2 per run pins
        // the empirical L2 difference below 10 tol.
        let p = sampled_problem(80, 7, 0.01, 2.0, false);
        let tol = p.default_tol();
        let tight = p.lambda * (5.0 * tol).powi(2);
        let a = train_full(&p, tight, None, DEFAULT_PASS_BUDGET).unwrap();
        let b = train_full(&p, tight, Some(123), DEFAULT_PASS_BUDGET).unwrap();
        let n = p.n() as f64;
        let l2: f64 = (p.training_set.samples.iter())
            .map(|s| (a.expansion.eval(&s.x) - b.expansion.eval(&s.x)).powi(2))
            .sum::<f64>()
            / n;
        assert!(l2.sqrt() <= 10.0 * tol, "L2 diff {}", l2.sqrt());
    }

    #[test]
    fn agrees_with_projected_gradient_oracle() {
        // Independent route to the standard soft-margin dual with
        // C = 1/(2 lambda n); validates the scaling equivalence.
        let p = sampled_problem(40, 3, 0.05, 2.0, false);
        let s = train(&p, 1e-10 * p.n() as f64).unwrap();

        let xs: Vec<Point> = p.training_set.samples.iter().map(|s| s.x.clone()).collect();
        let y: Vec<f64> = p.training_set.samples.iter().map(|s| s.y as f64).collect();
        let k = p.kernel.gram(&xs);
        let n = xs.len();
        let c = p.cost();
        let mut alpha = vec![0.0; n];
        let step = 1.0 / n as f64;
        for _ in 0..200_000 {
            let mut grad = vec![0.0; n];
            for i in 0..n {
                let mut qa = 0.0;
                for j in 0..n {
                    qa += y[i] * y[j] * k[(i, j)] * alpha[j];
                }
                grad[i] = 1.0 - qa;
            }
            for i in 0..n {
                alpha[i] = (alpha[i] + step * grad[i]).clamp(0.0, c);
            }
        }
        let coeffs: Vec<f64> = (0..n).map(|i| alpha[i] * y[i]).collect();
        let pg = KernelExpansion::new(p.kernel, xs.clone(), coeffs, 0.0).unwrap();
        let j_pg = objective(&p, &pg).unwrap();
        assert!((j_pg - s.objective).abs() < 1e-6, "{j_pg} vs {}", s.objective);
        for x in &xs {
            assert!((pg.eval(x) - s.expansion.eval(x)).abs() < 1e-4);
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let p = sampled_problem(30, 11, 1e-3, 2.0, false);
        match train_full(&p, 1e-300, None, 3) {
            Err(Error::SolverBudget { passes, gap, .. }) => {
                assert_eq!(passes, 3);
                assert!(gap.is_finite());
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn norm_shrinks_as_lambda_grows() {
        let mut prev = f64::INFINITY;
        for lambda in [1.0, 10.0, 100.0] {
            let p = sampled_problem(60, 21, lambda, 2.0, false);
            let s = train(&p, p.default_tol()).unwrap();
            let norm = s.expansion.rkhs_norm();
            assert!(norm <= prev + 1e-12);
            prev = norm;
        }
    }

    #[test]
    fn solution_text_round_trips() {
        let p = sampled_problem(15, 2, 0.05, 2.0, true);
        let s = train(&p, p.default_tol()).unwrap();
        let text = solution_to_text(&s);
        let back = solution_from_text(&text).unwrap();
        assert_eq!(back.objective.to_bits(), s.objective.to_bits());
        assert_eq!(back.certificate.to_bits(), s.certificate.to_bits());
        assert_eq!(back.lambda.to_bits(), s.lambda.to_bits());
        assert_eq!(back.iterations, s.iterations);
        assert_eq!(back.expansion.offset.to_bits(), s.expansion.offset.to_bits());
        assert_eq!(back.expansion.centers.len(), s.expansion.centers.len());
    }

    #[test]
    fn optimal_offset_cases() {
        // Balanced labels at u=0: every b in [-1, 1] minimizes, tie at 0.
        let b = optimal_offset(&[0.0, 0.0], &[1.0, -1.0]);
        assert_eq!(b, 0.0);
        // Two +1 against one -1 at u=0: unique minimizer b = 1.
        let b = optimal_offset(&[0.0, 0.0, 0.0], &[1.0, 1.0, -1.0]);
        assert_eq!(b, 1.0);
        // All +1 at u=0: minimizers are [1, inf).
        let b = optimal_offset(&[0.0, 0.0], &[1.0, 1.0]);
        assert_eq!(b, 1.0);
        // All -1 at u=0: minimizers are (-inf, -1].
        let b = optimal_offset(&[0.0], &[-1.0]);
        assert_eq!(b, -1.0);
    }
}
