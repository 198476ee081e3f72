//! Experiment execution: each kind runs deterministically from its config
//! and writes CSV/JSON artifacts plus a manifest into the output directory.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::activators::{
    activator_sweep, cascade_loss_scan, ActivatorParams, ActivatorSpeed, CascadeMode,
    CascadeVerdict, ConstantSpeed, FnSpeed, Speed, SpeedClass,
};
use crate::coefficients::{example_coefficient, fit_singularity_orders, SampleGrid};
use crate::excision::{build_majorants, integral_log_bound, PhaseGrid, PsiKind};
use crate::phasespace::PhaseParams;
use crate::sobolev::{bessel_potential, sobolev_norm, GridFunction, SobolevIndex};
use crate::solver::{cone_check, compute_gamma, solve, CauchyProblem, ConeSpec, SchemeConfig};
use crate::weights::{check_weight_axioms, SampleSpec, WeightPair, WeightSpec};
use crate::{Error, Result};

use super::config::{
    CascadeScanParams, CascadeSpeedChoice, CoefficientChoice, ConeParams, DataShape,
    ExperimentConfig, Params, SolveParams, WeightChoice,
};

fn build_field(choice: &CoefficientChoice) -> Result<crate::coefficients::CoefficientField> {
    match choice {
        CoefficientChoice::Example { kappa1, kappa2 } => example_coefficient(*kappa1, *kappa2),
        CoefficientChoice::LogOscillation { kappa1, kappa2 } => {
            let pair = WeightPair::brackets(*kappa1, *kappa2)?;
            Ok(crate::coefficients::CoefficientField::from_time_profile(
                "log-oscillation",
                pair,
                1.0,
                |t: f64| 2.0 + (1.0 / t).ln().sin(),
                |t: f64| -(1.0 / t).ln().cos() / t,
                1.0,
            ))
        }
    }
}

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub summary: serde_json::Value,
}

fn write_text(dir: &Path, name: &str, text: &str, files: &mut Vec<String>) -> Result<()> {
    std::fs::write(dir.join(name), text)?;
    files.push(name.to_string());
    Ok(())
}

fn write_json(
    dir: &Path,
    name: &str,
    value: &serde_json::Value,
    files: &mut Vec<String>,
) -> Result<()> {
    write_text(dir, name, &format!("{:#}\n", value), files)
}

fn csv_line(cells: &[String]) -> String {
    cells.join(",")
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

/// Run one experiment, writing artifacts under `out_dir` (created if absent).
///
/// Outputs are byte-identical across runs for the same config and seed; the
/// manifest (hash, version, wall time) is the one file excluded from that
/// guarantee.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let mut files = Vec::new();
    let result = dispatch(config, out_dir, &mut files);
    // The manifest is written even when the verdict is inconclusive, so a
    // partial run still documents itself; hard errors skip it.
    let summary = match &result {
        Ok(s) => s.clone(),
        Err(Error::Inconclusive(msg)) => serde_json::json!({"inconclusive": msg}),
        Err(_) => serde_json::Value::Null,
    };
    if !summary.is_null() {
        let manifest = serde_json::json!({
            "experiment": config.experiment.name(),
            "config-hash": config.content_hash(),
            "library-version": env!("CARGO_PKG_VERSION"),
            "seed": config.seed,
            "wall-time-ms": started.elapsed().as_millis() as u64,
            "files": files,
            "summary": summary,
        });
        std::fs::write(
            out_dir.join("manifest.json"),
            format!("{manifest:#}\n"),
        )?;
        files.push("manifest.json".to_string());
    }
    result.map(|summary| RunOutcome {
        out_dir: out_dir.to_path_buf(),
        files,
        summary,
    })
}

fn dispatch(
    config: &ExperimentConfig,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<serde_json::Value> {
    match config.validated_params()? {
        Params::WeightsAxioms(p) => run_weights(config, &p, dir, files),
        Params::SymbolFit(p) => run_symbol_fit(&p, dir, files),
        Params::ExcisionBounds(p) => run_excision(&p, dir, files),
        Params::SobolevSelftest(p) => run_sobolev(config, &p, dir, files),
        Params::Solve(p) => run_solve(&p, dir, files),
        Params::Cone(p) => run_cone(&p, dir, files),
        Params::ActivatorSweep(p) => run_sweep(config, &p, dir, files),
        Params::CascadeScan(p) => run_cascade(&p, dir, files),
    }
}

fn run_weights(
    config: &ExperimentConfig,
    p: &super::config::WeightsAxiomsParams,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<serde_json::Value> {
    let pair = WeightPair::new(p.omega, p.phi);
    let spec = SampleSpec {
        radius: p.radius,
        grid_points: p.grid_points,
        random_pairs: p.random_pairs,
        seed: config.seed,
    };
    let reports = check_weight_axioms(&pair, &spec)?;
    write_json(dir, "axioms.json", &serde_json::to_value(&reports).unwrap(), files)?;
    let mut csv = vec![csv_line(&[
        "axiom".into(),
        "pass".into(),
        "violations".into(),
        "r".into(),
        "s".into(),
        "C".into(),
        "witness_x".into(),
        "witness_y".into(),
        "lhs".into(),
        "rhs".into(),
    ])];
    for r in &reports {
        csv.push(csv_line(&[
            r.axiom.clone(),
            r.pass.to_string(),
            r.violations.to_string(),
            r.constants.r.map(fmt).unwrap_or_default(),
            r.constants.s.map(fmt).unwrap_or_default(),
            fmt(r.constants.c),
            r.witness.map(|w| fmt(w.x)).unwrap_or_default(),
            r.witness.and_then(|w| w.y).map(fmt).unwrap_or_default(),
            r.witness.map(|w| fmt(w.lhs)).unwrap_or_default(),
            r.witness.map(|w| fmt(w.rhs)).unwrap_or_default(),
        ]));
    }
    write_text(dir, "axioms.csv", &(csv.join("\n") + "\n"), files)?;
    let all_pass = reports.iter().all(|r| r.pass);
    Ok(serde_json::json!({"all-pass": all_pass}))
}

fn run_symbol_fit(
    p: &super::config::SymbolFitParams,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<serde_json::Value> {
    let field = example_coefficient(p.kappa1, p.kappa2)?;
    let grid = p.grid.unwrap_or_default();
    let report = fit_singularity_orders(&field, &grid)?;
    write_json(
        dir,
        "singularity.json",
        &serde_json::to_value(report).unwrap(),
        files,
    )?;
    let mut csv = vec![csv_line(&[
        "quantity".into(),
        "exponent".into(),
        "constant".into(),
        "r_squared".into(),
    ])];
    for (name, f) in [
        ("dt-order", report.dt_order),
        ("delta1", report.delta1),
        ("delta2", report.delta2),
    ] {
        csv.push(csv_line(&[
            name.into(),
            fmt(f.exponent),
            fmt(f.constant),
            fmt(f.r_squared),
        ]));
    }
    write_text(dir, "singularity.csv", &(csv.join("\n") + "\n"), files)?;
    Ok(serde_json::json!({
        "c0": report.c0,
        "log-blowup-pass": report.log_blowup_pass,
    }))
}

fn run_excision(
    p: &super::config::ExcisionBoundsParams,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<serde_json::Value> {
    let field = example_coefficient(p.kappa1, p.kappa2)?;
    let params = PhaseParams::new(p.k, 2.0, *field.pair())?;
    let grid = PhaseGrid {
        x_max: p.x_max,
        xi_max: p.xi_max,
        points: p.points,
        t_min: 1e-6,
        t_max: p.t_end,
        t_points: p.t_points,
    };
    let majorants = build_majorants(&field, &params, &grid, p.tilde_symmetric)?;
    write_json(
        dir,
        "majorants.json",
        &serde_json::json!({
            "c1": majorants.c1,
            "c2": majorants.c2,
            "kappa": majorants.kappa,
            "tilde-symmetric": majorants.tilde_symmetric,
            "grid": serde_json::to_value(grid).unwrap(),
        }),
        files,
    )?;

    type RatioRow = (f64, f64, f64, f64);
    let scan = |g: &PhaseGrid| -> Result<(Vec<RatioRow>, f64, f64)> {
        let cells = g.cells();
        let rows = crate::numerics::par_map(&cells, |&(x, xi)| -> Result<RatioRow> {
            let plain = integral_log_bound(&majorants, PsiKind::Psi, x, xi, p.t_end)?;
            let tilde = integral_log_bound(&majorants, PsiKind::PsiTilde, x, xi, p.t_end)?;
            Ok((x, xi, plain, tilde))
        });
        let mut out = Vec::with_capacity(rows.len());
        let mut sup = 0.0_f64;
        let mut sup_tilde = 0.0_f64;
        for r in rows {
            let row = r?;
            sup = sup.max(row.2);
            sup_tilde = sup_tilde.max(row.3);
            out.push(row);
        }
        Ok((out, sup, sup_tilde))
    };
    let (rows, sup, sup_tilde) = scan(&grid)?;
    let (_, sup_doubled, sup_tilde_doubled) = scan(&grid.doubled())?;
    let mut csv = vec![csv_line(&[
        "x".into(),
        "xi".into(),
        "psi_ratio".into(),
        "psi_tilde_ratio".into(),
    ])];
    for (x, xi, a, b) in rows {
        csv.push(csv_line(&[fmt(x), fmt(xi), fmt(a), fmt(b)]));
    }
    write_text(dir, "mfn.csv", &(csv.join("\n") + "\n"), files)?;
    let stability = (sup_doubled - sup).abs() / sup.max(1e-300);
    let summary = serde_json::json!({
        "c1": majorants.c1,
        "c2": majorants.c2,
        "kappa": majorants.kappa,
        "psi-ratio-sup": sup,
        "psi-ratio-sup-doubled": sup_doubled,
        "psi-ratio-stability": stability,
        "psi-tilde-ratio-sup": sup_tilde,
        "psi-tilde-ratio-sup-doubled": sup_tilde_doubled,
    });
    write_json(dir, "bounds.json", &summary, files)?;
    Ok(summary)
}

fn run_sobolev(
    config: &ExperimentConfig,
    p: &super::config::SobolevSelftestParams,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<serde_json::Value> {
    use crate::numerics::rng::SplitMix64;
    let l = p.half_width;
    let m = p.grid_size;
    // The reference carrier sits at ξ0 = 50; the grid must resolve it.
    let nyquist = std::f64::consts::PI * (m as f64 / 2.0) / l;
    if nyquist < 75.0 {
        return Err(Error::Validation(format!(
            "grid too coarse for the reference carrier: Nyquist frequency {nyquist:.1} < 75; \
             increase grid-size or decrease half-width"
        )));
    }
    let mut rows: Vec<(String, f64, f64, f64, bool)> = Vec::new();

    let gaussian = GridFunction::from_real_fn(l, m, |x| (-x * x / 2.0).exp())?;
    let norm = sobolev_norm(&gaussian, SobolevIndex::new(0.0, 0.0), 1.0, WeightSpec::one())?;
    let expected = std::f64::consts::PI.powf(0.25);
    rows.push((
        "gaussian-l2".into(),
        norm,
        expected,
        1e-6,
        (norm - expected).abs() <= 1e-6,
    ));

    let xi0 = 50.0;
    let modulated = GridFunction::from_fn(l, m, |x| {
        num_complex::Complex64::from_polar((-x * x / 2.0).exp(), xi0 * x)
    })?;
    for s1 in [1.0, 2.0] {
        let out = bessel_potential(&modulated, s1, 1.0)?;
        let ratio = out.l2_norm() / modulated.l2_norm();
        let target = (1.0 + xi0 * xi0).powf(s1 / 2.0);
        rows.push((
            format!("bessel-ratio-s{s1}"),
            ratio,
            target,
            0.05 * target,
            (ratio - target).abs() <= 0.05 * target,
        ));
    }

    let there = bessel_potential(&gaussian, 1.3, 2.0)?;
    let back = bessel_potential(&there, -1.3, 2.0)?;
    let rt_err = back
        .values()
        .iter()
        .zip(gaussian.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0_f64, f64::max);
    rows.push(("potential-round-trip".into(), rt_err, 0.0, 1e-9, rt_err <= 1e-9));

    let mut rng = SplitMix64::new(config.seed);
    let phi = WeightSpec::bracket_pow(1.0)?;
    let mut violations = 0usize;
    for _ in 0..p.random_states {
        let state = GridFunction::from_fn(l, m, |x| {
            num_complex::Complex64::new(
                (-x * x / 4.0).exp() * rng.uniform(-1.0, 1.0),
                (-x * x / 6.0).exp() * rng.uniform(-1.0, 1.0),
            )
        })?;
        let s_lo = SobolevIndex::new(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
        let s_hi = SobolevIndex::new(
            s_lo.s1 + rng.uniform(0.0, 2.0),
            s_lo.s2 + rng.uniform(0.0, 2.0),
        );
        let lo = sobolev_norm(&state, s_lo, 1.0, phi)?;
        let hi = sobolev_norm(&state, s_hi, 1.0, phi)?;
        if hi < lo * (1.0 - 1e-12) {
            violations += 1;
        }
    }
    rows.push((
        "monotonicity-violations".into(),
        violations as f64,
        0.0,
        0.0,
        violations == 0,
    ));

    let mut csv = vec![csv_line(&[
        "check".into(),
        "value".into(),
        "expected".into(),
        "tolerance".into(),
        "pass".into(),
    ])];
    for (name, value, expected, tol, pass) in &rows {
        csv.push(csv_line(&[
            name.clone(),
            fmt(*value),
            fmt(*expected),
            fmt(*tol),
            pass.to_string(),
        ]));
    }
    write_text(dir, "sobolev.csv", &(csv.join("\n") + "\n"), files)?;
    if rows.iter().all(|r| r.4) {
        Ok(serde_json::json!({"all-pass": true}))
    } else {
        Err(Error::Numerical(
            "sobolev self-test failed; see sobolev.csv".into(),
        ))
    }
}

fn build_data(shape: &DataShape, l: f64, m: usize) -> Result<GridFunction> {
    match shape {
        DataShape::Gaussian { width } => {
            let w = *width;
            GridFunction::from_real_fn(l, m, move |x| (-(x / w) * (x / w)).exp())
        }
        DataShape::Bump { radius } => {
            let r = *radius;
            GridFunction::from_real_fn(l, m, move |x| {
                let s = x / r;
                if s.abs() < 1.0 {
                    (-1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            })
        }
        DataShape::Mode { xi0 } => {
            let k = *xi0;
            GridFunction::from_real_fn(l, m, move |x| (k * x).sin())
        }
    }
}

fn run_solve(
    p: &SolveParams,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<serde_json::Value> {
    let field = build_field(&p.coefficient)?;
    let f1 = build_data(&p.data, p.half_width, p.grid_size)?;
    let f2 = GridFunction::zeros(p.half_width, p.grid_size)?;
    let problem = CauchyProblem::new(field, f1, f2, p.t_end)?;
    let cfg = SchemeConfig {
        cfl: p.cfl,
        grading: p.grading,
        time_steps: p.time_steps,
        ..Default::default()
    };
    let snaps = solve(&problem, &cfg, &p.snapshots)?;
    let mut csv = vec![csv_line(&[
        "t".into(),
        "l2_norm".into(),
        "dt_l2_norm".into(),
        "file".into(),
    ])];
    for (i, s) in snaps.iter().enumerate() {
        let base = format!("state_{i:03}");
        s.u.save(&dir.join(format!("{base}_u.bin")), &format!("u at t={}", s.t))?;
        s.du
            .save(&dir.join(format!("{base}_du.bin")), &format!("du at t={}", s.t))?;
        files.push(format!("{base}_u.bin"));
        files.push(format!("{base}_u.bin.json"));
        files.push(format!("{base}_du.bin"));
        files.push(format!("{base}_du.bin.json"));
        csv.push(csv_line(&[
            fmt(s.t),
            fmt(s.u.l2_norm()),
            fmt(s.du.l2_norm()),
            base,
        ]));
    }
    write_text(dir, "snapshots.csv", &(csv.join("\n") + "\n"), files)?;
    Ok(serde_json::json!({"snapshots": snaps.len()}))
}

fn run_cone(
    p: &ConeParams,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<serde_json::Value> {
    let field = build_field(&p.coefficient)?;
    let gamma = match p.gamma {
        Some(g) => g,
        None => compute_gamma(
            &field,
            &SampleGrid {
                t_max: p.vertex_t,
                x_radius: p.half_width,
                ..Default::default()
            },
        )?,
    };
    let f1 = build_data(
        &DataShape::Bump {
            radius: p.data_radius,
        },
        p.half_width,
        p.grid_size,
    )?;
    let f2 = GridFunction::zeros(p.half_width, p.grid_size)?;
    let problem = CauchyProblem::new(field, f1, f2, p.vertex_t)?;
    let cfg = SchemeConfig {
        cfl: p.cfl,
        grading: p.grading,
        ..Default::default()
    };
    let cone = ConeSpec {
        vertex_x: p.vertex_x,
        vertex_t: p.vertex_t,
        gamma,
        data_radius: p.data_radius,
    };
    let report = cone_check(&problem, &cfg, &cone, &p.snapshots)?;
    let mut csv = vec![csv_line(&[
        "t".into(),
        "radius".into(),
        "outside_mass".into(),
    ])];
    for s in &report.samples {
        csv.push(csv_line(&[fmt(s.t), fmt(s.radius), fmt(s.outside_mass)]));
    }
    write_text(dir, "cone.csv", &(csv.join("\n") + "\n"), files)?;
    let summary = serde_json::json!({
        "gamma": gamma,
        "outside-mass-max": report.outside_mass_max,
        "max-slope": report.max_slope,
        "support-growth-exact": report.support_growth_exact,
        "conclusive": report.conclusive,
    });
    write_json(dir, "cone.json", &summary, files)?;
    if !report.conclusive {
        return Err(Error::Inconclusive(
            "cone radius reached the domain boundary; enlarge the domain".into(),
        ));
    }
    Ok(summary)
}

fn run_sweep(
    config: &ExperimentConfig,
    p: &super::config::ActivatorSweepParams,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<serde_json::Value> {
    let class = SpeedClass::new(p.mu1, p.mu2, p.theta, p.t_end)?;
    let report = activator_sweep(p.gamma, p.t1, &class, &p.lambdas, p.delta, p.tolerance)?;
    let mut csv = vec![csv_line(&[
        "lambda".into(),
        "phi".into(),
        "a_lambda".into(),
        "b_lambda".into(),
        "theta_lambda".into(),
        "dC".into(),
        "infE".into(),
        "logE_T".into(),
        "logE_over_loglambda".into(),
        "verdict".into(),
    ])];
    for r in &report.rows {
        let verdict = if r.skipped {
            "skipped"
        } else if r.membership_pass {
            "pass"
        } else {
            "band-violation"
        };
        csv.push(csv_line(&[
            fmt(r.lambda),
            fmt(r.phi),
            fmt(r.a_mark),
            fmt(r.b_mark),
            fmt(r.theta_lambda),
            fmt(r.d_c),
            fmt(r.inf_energy),
            fmt(r.log_energy_end),
            fmt(r.log_energy_over_log_lambda),
            verdict.into(),
        ]));
    }
    write_text(dir, "sweep.csv", &(csv.join("\n") + "\n"), files)?;
    let summary = serde_json::json!({
        "gamma": p.gamma,
        "t1": p.t1,
        "mu1": p.mu1,
        "mu2": p.mu2,
        "theta": serde_json::to_value(p.theta).unwrap(),
        "delta": p.delta,
        "tolerance": p.tolerance,
        "seed": config.seed,
        "sampling": serde_json::to_value(report.sampling).unwrap(),
        "classification": serde_json::to_value(report.classification).unwrap(),
        "active-rows": report.active_rows().count(),
    });
    write_json(dir, "sweep.json", &summary, files)?;
    if report.active_rows().count() == 0 {
        return Err(Error::Inconclusive(
            "every requested frequency was below the admissible threshold".into(),
        ));
    }
    Ok(summary)
}

fn run_cascade(
    p: &CascadeScanParams,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<serde_json::Value> {
    let weight = |lambda: f64| match p.weights {
        WeightChoice::Unit => 1.0,
        WeightChoice::ExpSqrt => (-lambda.sqrt()).exp(),
    };
    let modes: Vec<CascadeMode> = match p.speed {
        CascadeSpeedChoice::Constant { value } => {
            let c: Arc<dyn Speed> = Arc::new(ConstantSpeed(value));
            p.lambdas
                .iter()
                .map(|&lambda| CascadeMode {
                    lambda,
                    weight: weight(lambda),
                    speed: c.clone(),
                })
                .collect()
        }
        CascadeSpeedChoice::LogOscillation => {
            let c: Arc<dyn Speed> = Arc::new(FnSpeed::new(
                |t: f64| 2.0 + (1.0 / t.max(1e-12)).ln().sin(),
                |t: f64| {
                    if t <= 1e-12 {
                        0.0
                    } else {
                        -(1.0 / t).ln().cos() / t
                    }
                },
            ));
            p.lambdas
                .iter()
                .map(|&lambda| CascadeMode {
                    lambda,
                    weight: weight(lambda),
                    speed: c.clone(),
                })
                .collect()
        }
        CascadeSpeedChoice::ActivatorPattern { gamma, t1 } => {
            let class = SpeedClass::new(p.mu1, p.mu2, p.theta, p.t_end)?;
            let mut modes = Vec::with_capacity(p.lambdas.len());
            for &lambda in &p.lambdas {
                let params = ActivatorParams::new(gamma, t1, lambda, &class)?;
                modes.push(CascadeMode {
                    lambda,
                    weight: weight(lambda),
                    speed: Arc::new(ActivatorSpeed::new(params)) as Arc<dyn Speed>,
                });
            }
            modes
        }
    };
    let report = cascade_loss_scan(&modes, p.t_end, &p.m_list, p.tolerance)?;
    let mut csv = vec![csv_line(&[
        "lambda".into(),
        "weight".into(),
        "unit_energy_end".into(),
    ])];
    for r in &report.rows {
        csv.push(csv_line(&[
            fmt(r.lambda),
            fmt(r.weight),
            fmt(r.unit_energy_end),
        ]));
    }
    write_text(dir, "cascade.csv", &(csv.join("\n") + "\n"), files)?;
    let orders: Vec<serde_json::Value> = report
        .orders
        .iter()
        .map(|o| {
            serde_json::json!({
                "m": o.m,
                "partial-sums": o.partial_sums,
                "verdict": serde_json::to_value(o.verdict).unwrap(),
            })
        })
        .collect();
    let summary = serde_json::json!({
        "energy-slope": report.energy_slope,
        "orders": orders,
    });
    write_json(dir, "orders.json", &summary, files)?;
    if report
        .orders
        .iter()
        .any(|o| o.verdict == CascadeVerdict::Inconclusive)
    {
        return Err(Error::Inconclusive(
            "at least one weighted-sum order had no readable term trend; extend the mode list"
                .into(),
        ));
    }
    Ok(summary)
}
