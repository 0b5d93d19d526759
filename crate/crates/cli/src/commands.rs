//! Subcommand implementations. Every run derives one file stem from the
//! config hash and writes all artifacts under it; data files start with
//! the artifact header and are byte-identical across reruns.

use std::fmt::Write as _;
use std::io::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gaussvm::distributions::{self, SyntheticDistribution, TrainingSet};
use gaussvm::geometry::Point;
use gaussvm::kernel::{self, GaussianKernel, KernelExpansion};
use gaussvm::rates::{self, RateFit, RateSchedule};
use gaussvm::solver::{self, SvmProblem};
use gaussvm::{approx, complexity, noise, seed};

use crate::config::{CliResult, RunConfig};
use crate::output::{self, Series};

fn core_err(e: gaussvm::Error) -> String {
    e.to_string()
}

pub fn run_gen(cfg: &RunConfig) -> CliResult<()> {
    let dist = cfg.distribution()?;
    let n = cfg.get_usize("n")?;
    let ts = dist.sample(n, cfg.seed()?).map_err(core_err)?;
    let balance =
        ts.samples.iter().filter(|s| s.y > 0).count() as f64 / ts.samples.len() as f64;

    let stem = cfg.file_stem();
    let dir = cfg.out_dir();
    // The sample file keeps the native round-trip format (its own header
    // must be the first line); provenance lives in the summary file.
    output::write_file(&dir, &format!("{stem}.txt"), &ts.to_text(&dist.family().to_string()))?;
    let mut summary = cfg.header();
    let _ = writeln!(summary, "data_file = {stem}.txt");
    let _ = writeln!(summary, "n = {}", ts.len());
    let _ = writeln!(summary, "d = {}", ts.d);
    let _ = writeln!(summary, "positive_label_fraction = {balance}");
    output::write_file(&dir, &format!("{stem}_summary.txt"), &summary)?;
    Ok(())
}

pub fn run_train(cfg: &RunConfig) -> CliResult<()> {
    let dist = cfg.distribution()?;
    let risk_cfg = cfg.risk_config()?;
    let n = cfg.get_usize("n")?;
    let lambda = cfg.get_positive("lambda")?;
    let sigma = cfg.get_positive("sigma")?;
    let with_offset = cfg.get_bool("with_offset")?;

    let ts = dist.sample(n, cfg.seed()?).map_err(core_err)?;
    let kernel = GaussianKernel::new(sigma).map_err(core_err)?;
    let problem = SvmProblem::new(ts, lambda, kernel, with_offset).map_err(core_err)?;
    let tol = problem.default_tol();
    let sol = solver::train(&problem, tol).map_err(core_err)?;

    let excess = distributions::excess_risk(&dist, sol.expansion.as_fn(), &risk_cfg)
        .map_err(core_err)?;
    let hinge = distributions::excess_hinge_direct(&dist, sol.expansion.as_fn(), &risk_cfg)
        .map_err(core_err)?;

    let stem = cfg.file_stem();
    let dir = cfg.out_dir();
    output::write_file(&dir, &format!("{stem}_model.txt"), &solver::solution_to_text(&sol))?;
    let mut summary = cfg.header();
    let _ = writeln!(summary, "model_file = {stem}_model.txt");
    let _ = writeln!(summary, "objective = {}", sol.objective);
    let _ = writeln!(summary, "duality_gap = {}", sol.certificate);
    let _ = writeln!(summary, "gap_tolerance = {tol}");
    let _ = writeln!(summary, "rkhs_norm = {}", sol.expansion.rkhs_norm());
    let _ = writeln!(summary, "norm_bound_slack = {}", solver::norm_bound_slack(&sol));
    if with_offset {
        let _ = writeln!(summary, "offset = {}", sol.expansion.offset);
        let _ = writeln!(summary, "offset_bound_slack = {}", solver::offset_bound_slack(&sol));
    }
    let _ = writeln!(summary, "excess_risk = {}", excess.value);
    let _ = writeln!(summary, "excess_risk_err = {}", excess.error);
    let _ = writeln!(summary, "excess_hinge = {}", hinge.value);
    output::write_file(&dir, &format!("{stem}_summary.txt"), &summary)?;
    println!(
        "trained n={} lambda={} sigma={} gap={:.3e} excess_risk={:.6}",
        n, lambda, sigma, sol.certificate, excess.value
    );
    Ok(())
}

pub fn run_noise(cfg: &RunConfig) -> CliResult<()> {
    let dist = cfg.distribution()?;
    let risk_cfg = cfg.risk_config()?;
    let mass_grid = cfg.get_grid("mass_grid")?;
    let geo_grid = cfg.get_grid("geo_grid")?;
    let report =
        noise::noise_report(&dist, &mass_grid, &geo_grid, &risk_cfg).map_err(core_err)?;

    let stem = cfg.file_stem();
    let dir = cfg.out_dir();
    let mut text = cfg.header();
    text.push_str(&report.to_text());
    output::write_file(&dir, &format!("{stem}.txt"), &text)?;

    let mut csv = cfg.header();
    csv.push_str(gaussvm::noise::NoiseReport::summary_header());
    csv.push('\n');
    csv.push_str(&report.summary_row());
    csv.push('\n');
    output::write_file(&dir, &format!("{stem}_summary.csv"), &csv)?;

    if cfg.plot()? {
        let mass: Vec<(f64, f64)> = mass_grid
            .iter()
            .map(|&t| {
                noise::margin_mass(&dist, t, &risk_cfg)
                    .map(|e| (t, e.value))
                    .map_err(core_err)
            })
            .collect::<CliResult<_>>()?;
        let geo: Vec<(f64, f64)> = geo_grid
            .iter()
            .map(|&t| {
                noise::geometric_integral(&dist, t, &risk_cfg)
                    .map(|e| (t, e.value))
                    .map_err(core_err)
            })
            .collect::<CliResult<_>>()?;
        let svg = output::svg_loglog(
            "margin mass and geometric decay",
            "t",
            "value",
            &[
                Series { label: "P(|2eta-1| <= t)".into(), points: mass },
                Series { label: "geometric integral".into(), points: geo },
            ],
            Some(&format!("q_hat={:.4} alpha_hat={:.4}", report.q_hat, report.alpha_hat)),
        );
        output::write_file(&dir, &format!("{stem}.svg"), &svg)?;
    }
    println!(
        "noise fits: q_hat={:.4} alpha_hat={:.4} gamma_hat={:.4}",
        report.q_hat, report.alpha_hat, report.gamma_hat
    );
    Ok(())
}

pub fn run_approx(cfg: &RunConfig) -> CliResult<()> {
    let dist = cfg.distribution()?;
    let risk_cfg = cfg.risk_config()?;
    let sigma_grid = cfg.get_grid("sigma_grid")?;
    let lambda_grid = cfg.get_grid("lambda_grid")?;
    let alpha = cfg.exponent("alpha", &dist)?;
    let c_geo = cfg.get_positive("c_geo")?;
    let n_dense = cfg.get_usize("n_dense")?;
    let empirical = (n_dense > 0).then(|| approx::EmpiricalSettings {
        n_dense,
        base_seed: cfg.seed().unwrap_or(0),
    });

    let points = approx::grid_scan(
        &dist,
        &sigma_grid,
        &lambda_grid,
        alpha,
        c_geo,
        empirical,
        &risk_cfg,
    )
    .map_err(core_err)?;

    let stem = cfg.file_stem();
    let dir = cfg.out_dir();
    let mut csv = cfg.header();
    csv.push_str(approx::ApproxErrorPoint::csv_header());
    csv.push('\n');
    for p in &points {
        csv.push_str(&p.csv_row());
        csv.push('\n');
    }
    output::write_file(&dir, &format!("{stem}.csv"), &csv)?;

    let max_ratio = approx::max_ratio(&points);
    let mut summary = cfg.header();
    let _ = writeln!(summary, "max_witness_over_bound_ratio = {max_ratio}");
    // Decay of the witness value along the width-optimized schedule; the
    // slope only makes sense with enough lambda points.
    if lambda_grid.len() >= 4 && alpha.is_finite() {
        let fit = approx::decay_slope(&dist, &lambda_grid, alpha, dist.dim(), None, &risk_cfg)
            .map_err(core_err)?;
        let _ = writeln!(summary, "decay_slope = {}", fit.slope);
        let _ = writeln!(summary, "decay_r2 = {}", fit.r2);
        let _ = writeln!(summary, "decay_slope_predicted = {}", alpha / (alpha + 1.0));
    }
    output::write_file(&dir, &format!("{stem}_summary.txt"), &summary)?;

    if cfg.plot()? {
        let series: Vec<Series> = sigma_grid
            .iter()
            .map(|&s| Series {
                label: format!("sigma={s}"),
                points: points
                    .iter()
                    .filter(|p| p.sigma == s)
                    .map(|p| (p.lambda, p.a_upper_witness))
                    .collect(),
            })
            .collect();
        let svg = output::svg_loglog(
            "approximation error witness",
            "lambda",
            "a(lambda) upper bound",
            &series,
            Some(&format!("max ratio={max_ratio:.3}")),
        );
        output::write_file(&dir, &format!("{stem}.svg"), &svg)?;
    }
    println!("approx scan: {} cells, max ratio {max_ratio:.4}", points.len());
    Ok(())
}

pub fn run_cover(cfg: &RunConfig) -> CliResult<()> {
    let dist = cfg.distribution()?;
    let sigma_grid = cfg.get_grid("sigma_grid")?;
    let epsilon_grid = cfg.get_grid("epsilon_grid")?;
    let n = cfg.get_usize("n")?;
    let report = complexity::cover_scaling_scan(&dist, &sigma_grid, &epsilon_grid, n, cfg.seed()?)
        .map_err(core_err)?;

    let stem = cfg.file_stem();
    let dir = cfg.out_dir();
    let mut csv = cfg.header();
    csv.push_str(complexity::ScalingReport::csv_header());
    csv.push('\n');
    for row in report.csv_rows() {
        csv.push_str(&row);
        csv.push('\n');
    }
    output::write_file(&dir, &format!("{stem}.csv"), &csv)?;

    let mut summary = cfg.header();
    summary.push_str(&report.summary());
    output::write_file(&dir, &format!("{stem}_summary.txt"), &summary)?;

    if cfg.plot()? {
        let series: Vec<Series> = report
            .sigma_grid
            .iter()
            .enumerate()
            .map(|(i, &s)| Series {
                label: format!("sigma={s}"),
                points: report
                    .epsilon_grid
                    .iter()
                    .enumerate()
                    .map(|(j, &eps)| (1.0 / eps, report.upper[i][j]))
                    .collect(),
            })
            .collect();
        let svg = output::svg_loglog(
            "covering number bounds",
            "1/epsilon",
            "log cover upper bound",
            &series,
            Some(&format!("rank_corr={:.3}", report.rank_correlation)),
        );
        output::write_file(&dir, &format!("{stem}.svg"), &svg)?;
    }
    println!(
        "cover scan: {}x{} grid, rank correlation {:.4}",
        report.sigma_grid.len(),
        report.epsilon_grid.len(),
        report.rank_correlation
    );
    Ok(())
}

pub fn run_rates(cfg: &RunConfig) -> CliResult<()> {
    let dist = cfg.distribution()?;
    let risk_cfg = cfg.risk_config()?;
    let q = cfg.exponent("q", &dist)?;
    let alpha = cfg.exponent("alpha", &dist)?;
    let n_grid = cfg.get_usize_list("n_grid")?;
    let trials = cfg.get_usize("trials")?;
    let with_offset = cfg.get_bool("with_offset")?;
    let d = dist.dim();

    let schedule = if alpha.is_infinite() {
        // Fixed-width regime; `sigma = auto` takes the first unit step
        // above the 2 sqrt(d) admissibility threshold.
        let sigma = if cfg.get_str("sigma")? == "auto" {
            2.0 * (d as f64).sqrt() + 1.0
        } else {
            cfg.get_positive("sigma")?
        };
        RateSchedule::fixed_width(q, d, sigma).map_err(core_err)?
    } else {
        RateSchedule::coupled(q, alpha, d).map_err(core_err)?
    };

    let report = rates::run_experiment_full(
        &dist,
        &schedule,
        &n_grid,
        trials,
        cfg.seed()?,
        with_offset,
        &risk_cfg,
    )
    .map_err(core_err)?;

    let stem = cfg.file_stem();
    let dir = cfg.out_dir();
    let mut csv = cfg.header();
    csv.push_str(&report.to_csv());
    output::write_file(&dir, &format!("{stem}.csv"), &csv)?;

    let beta_exact = schedule.beta_value();
    // The fit is a diagnostic on top of the data; too few usable points
    // degrades the summary, not the run.
    let fit = rates::fit_rate(&report).map_err(core_err);
    let mut summary = cfg.header();
    let _ = writeln!(summary, "beta_exact = {beta_exact}");
    let mut slope_note = format!("beta_exact={beta_exact:.4}");
    match &fit {
        Ok(RateFit::PowerLaw { beta_hat, ci, fit }) => {
            let _ = writeln!(summary, "beta_hat = {beta_hat}");
            let _ = writeln!(summary, "beta_ci_low = {}", ci.0);
            let _ = writeln!(summary, "beta_ci_high = {}", ci.1);
            let _ = writeln!(summary, "fit_r2 = {}", fit.r2);
            let _ = writeln!(summary, "fit_points = {}", fit.n_used);
            let _ = write!(slope_note, " beta_hat={beta_hat:.4}");
        }
        Ok(RateFit::ExactLearning) => {
            let _ = writeln!(summary, "beta_hat = exact_learning");
            let _ = write!(slope_note, " exact learning");
        }
        Err(e) => {
            let _ = writeln!(summary, "beta_hat = unavailable ({e})");
        }
    }
    for (n, m) in report.median_excess() {
        let _ = writeln!(summary, "median_excess n={n} = {m}");
    }
    let _ = writeln!(summary, "completed_rows = {}", report.rows.len());
    let _ = writeln!(summary, "failed_rows = {}", report.failures.len());
    for f in &report.failures {
        let _ = writeln!(summary, "failure n={} trial={}: {}", f.n, f.trial, f.message);
    }
    output::write_file(&dir, &format!("{stem}_summary.txt"), &summary)?;

    if cfg.plot()? {
        let medians = report.median_excess();
        let svg = output::svg_loglog(
            "excess risk against sample size",
            "n",
            "median excess risk",
            &[Series {
                label: "median over trials".into(),
                points: medians.iter().map(|&(n, m)| (n as f64, m)).collect(),
            }],
            Some(&slope_note),
        );
        output::write_file(&dir, &format!("{stem}.svg"), &svg)?;
    }

    match &fit {
        Ok(RateFit::PowerLaw { beta_hat, ci, .. }) => println!(
            "rate fit: beta_hat={beta_hat:.4} ci=[{:.4},{:.4}] against beta={beta_exact:.4}",
            ci.0, ci.1
        ),
        Ok(RateFit::ExactLearning) => {
            println!("rate fit: exact learning (all medians zero), beta={beta_exact:.4}")
        }
        Err(e) => println!("rate fit unavailable: {e}"),
    }
    Ok(())
}

/// One property suite: name plus pass/detail. Failures inside a suite are
/// reported, not propagated, so later suites still run.
struct Suite {
    name: &'static str,
    run: fn(&RunConfig) -> CliResult<(bool, String)>,
}

pub fn run_check(cfg: &RunConfig) -> CliResult<i32> {
    let suites = [
        Suite { name: "hinge_variance_pointwise", run: check_ineq_grid },
        Suite { name: "rate_exponent_arithmetic", run: check_beta },
        Suite { name: "excess_hinge_identity", run: check_zhang },
        Suite { name: "solver_bounds", run: check_solver },
        Suite { name: "offset_bound", run: check_offset },
        Suite { name: "variance_bound_sweep", run: check_variance },
    ];

    let dir = cfg.out_dir();
    std::fs::create_dir_all(&dir)
        .map_err(|e| format!("cannot create output dir {}: {e}", dir.display()))?;
    let path = dir.join(format!("{}.txt", cfg.file_stem()));
    let mut file = std::fs::File::create(&path)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    file.write_all(cfg.header().as_bytes()).map_err(|e| e.to_string())?;

    let mut failed = 0;
    for suite in &suites {
        // Flush per line so an aborted run still leaves partial results.
        let line = match (suite.run)(cfg) {
            Ok((true, detail)) => format!("ok {} {detail}", suite.name),
            Ok((false, detail)) => {
                failed += 1;
                format!("FAIL {} {detail}", suite.name)
            }
            Err(e) => {
                failed += 1;
                format!("FAIL {} error: {e}", suite.name)
            }
        };
        println!("{line}");
        file.write_all(line.as_bytes()).map_err(|e| e.to_string())?;
        file.write_all(b"\n").map_err(|e| e.to_string())?;
        file.flush().map_err(|e| e.to_string())?;
    }
    println!("wrote {}", path.display());
    if failed > 0 {
        println!("check: {failed} of {} suites failed", suites.len());
        return Ok(1);
    }
    println!("check: all {} suites passed", suites.len());
    Ok(0)
}

fn check_ineq_grid(_cfg: &RunConfig) -> CliResult<(bool, String)> {
    let mut ps = vec![0.0, 1.0];
    for i in 1..100 {
        let off = 0.005 * i as f64;
        ps.push(0.5 + off);
        ps.push(0.5 - off);
    }
    let mut min_slack = f64::INFINITY;
    for &p in &ps {
        for i in -30..=30 {
            let t = 0.1 * i as f64;
            let s = rates::pointwise_hinge_variance_slack(p, t).map_err(core_err)?;
            min_slack = min_slack.min(s);
        }
    }
    Ok((min_slack >= -1e-12, format!("min_slack={min_slack:.3e}")))
}

fn check_beta(_cfg: &RunConfig) -> CliResult<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();

    let b = rates::beta(1.0, 2.0).map_err(core_err)?;
    if b != 8.0 / 19.0 {
        ok = false;
        notes.push(format!("beta(1,2)={b} wanted 8/19"));
    }
    for q in [1.0f64, 2.0, 4.0] {
        let boundary = (q + 2.0) / (2.0 * q);
        let lo = rates::beta(q, boundary * (1.0 - 1e-13)).map_err(core_err)?;
        let hi = rates::beta(q, boundary * (1.0 + 1e-13)).map_err(core_err)?;
        if (lo - hi).abs() > 1e-12 {
            ok = false;
            notes.push(format!("discontinuous at q={q}"));
        }
    }
    let b = rates::beta(f64::INFINITY, 2.0).map_err(core_err)?;
    if (b - 4.0 / 7.0).abs() > 1e-15 {
        ok = false;
        notes.push("q=inf limit".into());
    }
    let b = rates::beta(1.0, f64::INFINITY).map_err(core_err)?;
    if (b - 2.0 / 3.0).abs() > 1e-15 {
        ok = false;
        notes.push("alpha=inf limit".into());
    }
    if rates::beta(f64::INFINITY, f64::INFINITY).map_err(core_err)? != 1.0 {
        ok = false;
        notes.push("double limit".into());
    }
    for q in [0.5f64, 1.0, 2.0, 4.0] {
        let crit = (3.0 * q + 4.0) / (2.0 * q);
        let above = rates::beta(q, crit * 1.01).map_err(core_err)?;
        let below = rates::beta(q, crit * 0.99).map_err(core_err)?;
        if !(above > 0.5 && below < 0.5) {
            ok = false;
            notes.push(format!("fast-rate threshold at q={q}"));
        }
    }
    let detail = if notes.is_empty() {
        "casework, limits, continuity, fast-rate threshold".to_string()
    } else {
        notes.join("; ")
    };
    Ok((ok, detail))
}

/// Random RKHS expansion with centers sampled from the marginal, scaled to
/// a target norm. Deterministic in `seed_val`.
fn random_expansion(
    dist: &SyntheticDistribution,
    sigma: f64,
    centers: usize,
    norm_target: f64,
    seed_val: u64,
) -> CliResult<KernelExpansion> {
    let ts = dist.sample(centers, seed_val).map_err(core_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed_val, &[0x636f_6566]));
    let coeffs: Vec<f64> = (0..centers).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let kernel = GaussianKernel::new(sigma).map_err(core_err)?;
    let mut exp = KernelExpansion {
        kernel,
        centers: ts.samples.into_iter().map(|s| s.x).collect(),
        coefficients: coeffs,
        offset: 0.0,
    };
    let norm = exp.rkhs_norm();
    if norm > 0.0 {
        for c in &mut exp.coefficients {
            *c *= norm_target / norm;
        }
    }
    Ok(exp)
}

fn check_zhang(cfg: &RunConfig) -> CliResult<(bool, String)> {
    let base = cfg.seed()?;
    let mut risk_cfg = cfg.risk_config()?;
    risk_cfg.quad_tol = risk_cfg.quad_tol.min(1e-7);
    let mut worst = 0.0f64;
    for (gi, gamma) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let dist = distributions::make_power_margin(gamma).map_err(core_err)?;
        for rep in 0..20u64 {
            let exp = random_expansion(
                &dist,
                2.0,
                6,
                1.5,
                seed::derive(base, &[3, gi as u64, rep]),
            )?;
            let f = kernel::clip(exp.as_fn());
            let r = distributions::excess_hinge_risk(&dist, f, &risk_cfg).map_err(core_err)?;
            let identity = r
                .identity
                .ok_or_else(|| format!("clipped f escaped [-1,1]: sup={}", r.sup_abs_f))?;
            worst = worst.max((r.direct.value - identity.value).abs());
        }
    }
    Ok((worst <= 1e-4, format!("max |direct - identity| = {worst:.3e} over 60 functions")))
}

fn check_solver(cfg: &RunConfig) -> CliResult<(bool, String)> {
    let base = cfg.seed()?;
    let mut ok = true;
    let mut notes = Vec::new();

    // Single training point at the origin: the objective minimum is known
    // in closed form for each cost regime.
    for (lambda, want) in [(0.5, 0.5), (2.0, 7.0 / 8.0)] {
        let ts = TrainingSet {
            d: 1,
            samples: vec![distributions::LabeledSample { x: Point(vec![0.0]), y: 1 }],
            seed: 0,
        };
        let problem =
            SvmProblem::new(ts, lambda, GaussianKernel::new(1.0).map_err(core_err)?, false)
                .map_err(core_err)?;
        let sol = solver::train(&problem, 1e-10).map_err(core_err)?;
        if (sol.objective - want).abs() > 1e-6 {
            ok = false;
            notes.push(format!("single-point objective at lambda={lambda}: {}", sol.objective));
        }
    }

    let dist = distributions::make_power_margin(1.0).map_err(core_err)?;
    let mut worst_rel_gap = 0.0f64;
    let mut worst_norm_slack = f64::INFINITY;
    let mut idx = 0u64;
    for n in [40usize, 80, 120] {
        for lambda in [0.002, 0.05, 0.5] {
            for sigma in [1.0, 4.0] {
                let ts = dist.sample(n, seed::derive(base, &[7, idx])).map_err(core_err)?;
                idx += 1;
                let with_offset = idx % 2 == 0;
                let problem = SvmProblem::new(
                    ts,
                    lambda,
                    GaussianKernel::new(sigma).map_err(core_err)?,
                    with_offset,
                )
                .map_err(core_err)?;
                let tol = problem.default_tol();
                let sol = solver::train(&problem, tol).map_err(core_err)?;
                worst_rel_gap = worst_rel_gap.max(sol.certificate / tol);
                worst_norm_slack = worst_norm_slack.min(solver::norm_bound_slack(&sol));
            }
        }
    }
    if worst_rel_gap > 1.0 {
        ok = false;
        notes.push(format!("duality gap exceeded tolerance by {worst_rel_gap:.3}x"));
    }
    if worst_norm_slack < -1e-6 {
        ok = false;
        notes.push(format!("norm bound violated: slack {worst_norm_slack:.3e}"));
    }
    let detail = if notes.is_empty() {
        format!(
            "18 problems: gap <= tol (worst {worst_rel_gap:.3}x), \
             norm slack >= {worst_norm_slack:.3e}; closed forms match"
        )
    } else {
        notes.join("; ")
    };
    Ok((ok, detail))
}

fn check_offset(cfg: &RunConfig) -> CliResult<(bool, String)> {
    let base = cfg.seed()?;
    let power = distributions::make_power_margin(1.0).map_err(core_err)?;
    let separated = distributions::make_separated(0.5, 1).map_err(core_err)?;
    let mut worst = f64::INFINITY;
    for (di, dist) in [power, separated].iter().enumerate() {
        for (li, lambda) in [0.005, 0.1, 1.0].into_iter().enumerate() {
            let ts = dist
                .sample(90, seed::derive(base, &[11, di as u64, li as u64]))
                .map_err(core_err)?;
            let problem =
                SvmProblem::new(ts, lambda, GaussianKernel::new(2.0).map_err(core_err)?, true)
                    .map_err(core_err)?;
            let sol = solver::train(&problem, problem.default_tol()).map_err(core_err)?;
            worst = worst.min(solver::offset_bound_slack(&sol));
        }
    }
    Ok((
        worst >= -1e-6,
        format!("6 offset problems: min (sup|f| + 1 - |b|) slack = {worst:.3e}"),
    ))
}

fn check_variance(cfg: &RunConfig) -> CliResult<(bool, String)> {
    let base = cfg.seed()?;
    let mut risk_cfg = cfg.risk_config()?;
    risk_cfg.quad_tol = risk_cfg.quad_tol.min(1e-7);
    let dist = distributions::make_power_margin(1.0).map_err(core_err)?;
    let mut worst = f64::INFINITY;
    for rep in 0..25u64 {
        let exp = random_expansion(&dist, 2.0, 5, 3.0, seed::derive(base, &[13, rep]))?;
        let f = kernel::clip(exp.as_fn());
        for q in [1.0, 0.0] {
            // Clipping caps sup |f| at one.
            let margin =
                rates::variance_bound_check(&dist, &f, 1.0, q, &risk_cfg).map_err(core_err)?;
            worst = worst.min(margin);
        }
    }
    Ok((
        worst >= -1e-6,
        format!("25 clipped functions, q in {{1, 0}}: min margin = {worst:.3e}"),
    ))
}
