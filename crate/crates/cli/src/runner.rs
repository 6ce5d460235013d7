//! Single experiment runs.

use std::path::Path;

use levyfp::adjoint::{duality_residual, oscillation_trace, solve_backward};
use levyfp::forward::{stationary_solve, StationaryOptions};
use levyfp::lyapunov::{classify_weight, default_radii, solve_rate_ode, verify_lemma_lyap};
use levyfp::particles::{reflection_coupling_run, simulate};
use levyfp::rates::{fit_exponential, fit_power, fit_stretched, predicted_q, window_shift, DecayFit, FitWindow};
use levyfp::{
    CouplingOptions, DensityField, ForwardRun, GeneratorSpec, LevyError, ParticleEnsemble, ParticleModel, RngSpec,
    WeightFunction,
};
use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig, FitModel, ParticleStart};
use crate::output::{fmt_f64, ArtifactDir, Table};
use crate::CliError;

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config_hash: String,
    pub artifacts: Vec<String>,
    /// Headline numbers of the experiment, also stored in `run.json`.
    pub summary: Value,
}

/// Validate and run `cfg`, writing every artifact into `out`.
///
/// The resolved config and `run.json` are always written; failures also
/// produce `failure.json` before the error is returned.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, CliError> {
    let mut dir = ArtifactDir::create(out)?;
    dir.write_text("config.resolved.json", &cfg.echo_json())?;
    let hash = cfg.hash();
    let result = cfg.validate().map_err(CliError::from).and_then(|_| execute(cfg, &mut dir));
    match result {
        Ok(summary) => {
            let mut artifacts = dir.artifacts().to_vec();
            artifacts.push("run.json".into());
            dir.write_json(
                "run.json",
                &json!({
                    "config_hash": hash,
                    "experiment": cfg.experiment,
                    "status": "ok",
                    "exit_code": 0,
                    "artifacts": artifacts,
                    "summary": summary,
                }),
            )?;
            Ok(RunOutcome {
                config_hash: hash,
                artifacts,
                summary,
            })
        }
        Err(err) => {
            if let CliError::Levy(e) = &err {
                dir.write_json("failure.json", &failure_record(e))?;
            }
            let mut artifacts = dir.artifacts().to_vec();
            artifacts.push("run.json".into());
            dir.write_json(
                "run.json",
                &json!({
                    "config_hash": hash,
                    "experiment": cfg.experiment,
                    "status": if err.exit_code() == 3 { "failed" } else { "invalid" },
                    "exit_code": err.exit_code(),
                    "artifacts": artifacts,
                    "message": err.to_string(),
                }),
            )?;
            Err(err)
        }
    }
}

/// Machine-readable description of a solver or checker failure.
pub fn failure_record(e: &LevyError) -> Value {
    let suggested = match e {
        LevyError::Cfl { suggested, .. } => Some(*suggested),
        _ => None,
    };
    json!({
        "kind": e.kind(),
        "numerical": e.is_numerical(),
        "time": e.time(),
        "message": e.to_string(),
        "suggested_dt": suggested,
    })
}

fn execute(cfg: &ExperimentConfig, dir: &mut ArtifactDir) -> Result<Value, CliError> {
    let g = cfg.generator()?;
    let dt = cfg.effective_dt(&g)?;
    match cfg.experiment {
        Experiment::ForwardDecay => forward_decay(cfg, g, dt, dir),
        Experiment::AdjointOscillation => adjoint_oscillation(cfg, &g, dt, dir),
        Experiment::DualityCheck => duality_check(cfg, &g, dt, dir),
        Experiment::Particles => particles(cfg, &g, dt, dir),
        Experiment::Coupling => coupling(cfg, &g, dt, dir),
        Experiment::LyapunovReport => lyapunov_report(cfg, &g, dir),
        Experiment::RateOde => rate_ode(cfg, dir),
        Experiment::Stationary => stationary(cfg, &g, dt, dir),
    }
}

fn label_columns(prefix: &str, weights: &[WeightFunction]) -> Vec<String> {
    weights.iter().map(|w| format!("{prefix}_{}", w.label())).collect()
}

fn resolve_model(cfg: &ExperimentConfig, g: &GeneratorSpec) -> FitModel {
    match cfg.fit.model {
        FitModel::Auto if g.drift.gamma() >= 2.0 => FitModel::Exponential,
        FitModel::Auto => FitModel::Power,
        m => m,
    }
}

type Fitter = fn(&[f64], &[f64], &FitWindow) -> levyfp::Result<DecayFit>;

fn fitter(model: FitModel) -> Fitter {
    match model {
        FitModel::Exponential | FitModel::Auto => fit_exponential,
        FitModel::Power => fit_power,
        FitModel::Stretched => fit_stretched,
    }
}

/// Fit, window-shift sensitivity and, when `k̄` is set, the predicted exponent.
fn fit_report(cfg: &ExperimentConfig, model: FitModel, t: &[f64], v: &[f64], source: &str) -> Result<Value, LevyError> {
    let window = cfg.fit_window(t)?;
    let f = fitter(model);
    let fit = f(t, v, &window)?.with_source(source);
    let shift = if cfg.fit.shift > 0.0 {
        Some(window_shift(f, t, v, &window, cfg.fit.shift)?)
    } else {
        None
    };
    let predicted = match cfg.fit.kbar {
        Some(kbar) => {
            let k = cfg.weights()?[cfg.fit.weight].power_exponent().unwrap_or(0.0);
            Some(predicted_q(k, kbar, cfg.drift()?.gamma())?)
        }
        None => None,
    };
    Ok(json!({ "fit": fit, "window_shift": shift, "predicted_q": predicted }))
}

fn forward_decay(cfg: &ExperimentConfig, g: GeneratorSpec, dt: f64, dir: &mut ArtifactDir) -> Result<Value, CliError> {
    let weights = cfg.weights()?;
    let m0 = cfg.initial.sample(&g.grid)?;
    let mut opts = cfg.forward_options(dt);
    opts.weights = weights.clone();
    let model = resolve_model(cfg, &g);
    let run = ForwardRun::new(g, m0, opts)?.solve()?;

    let mut header: Vec<String> = ["t", "mass", "min_value", "boundary_mass"].map(String::from).to_vec();
    header.extend(label_columns("norm", &weights));
    let mut series = Table::new(header);
    for p in &run.series {
        let mut row = vec![p.t, p.mass, p.min_value, p.boundary_mass];
        row.extend(&p.norms);
        series.push(&row);
    }
    dir.write_csv("series.csv", &series)?;
    if let Some(m) = &run.final_state {
        dir.write_csv("final.csv", &field_table(m))?;
    }

    let t = run.times();
    let v = run.norm_series(cfg.fit.weight);
    let source = format!("series.csv:norm_{}", weights[cfg.fit.weight].label());
    let report = fit_report(cfg, model, &t, &v, &source)?;
    dir.write_json("fit.json", &report)?;
    Ok(json!({ "dt": dt, "final_norm": v.last(), "fit": report }))
}

fn field_table(m: &DensityField) -> Table {
    let grid = m.grid();
    let mut t = Table::new(["x", "m"]);
    for (i, v) in m.values().iter().enumerate() {
        t.push(&[grid.coord(i as isize), *v]);
    }
    t
}

fn adjoint_oscillation(cfg: &ExperimentConfig, g: &GeneratorSpec, dt: f64, dir: &mut ArtifactDir) -> Result<Value, CliError> {
    let weights = cfg.weights()?;
    let xi = cfg.terminal.sample(&g.grid)?;
    let f = cfg.source.map(|s| s.sample(&g.grid)).transpose()?;
    let run = solve_backward(&xi, f.as_ref(), g, &cfg.adjoint_options(dt))?;
    let traces: Vec<Vec<(f64, f64)>> = weights.iter().map(|w| oscillation_trace(&run, w)).collect();

    let mut header: Vec<String> = vec!["s".into(), "t".into()];
    header.extend(label_columns("seminorm", &weights));
    let mut table = Table::new(header);
    for (i, s) in run.s.iter().enumerate() {
        let mut row = vec![*s, cfg.time.horizon - s];
        row.extend(traces.iter().map(|tr| tr[i].1));
        table.push(&row);
    }
    dir.write_csv("oscillation.csv", &table)?;

    let (s, v): (Vec<f64>, Vec<f64>) = traces[cfg.fit.weight].iter().copied().unzip();
    let source = format!("oscillation.csv:seminorm_{}", weights[cfg.fit.weight].label());
    let report = fit_report(cfg, resolve_model(cfg, g), &s, &v, &source)?;
    dir.write_json("fit.json", &report)?;
    Ok(json!({ "dt": dt, "final_seminorm": v.last(), "fit": report }))
}

fn duality_check(cfg: &ExperimentConfig, g: &GeneratorSpec, dt: f64, dir: &mut ArtifactDir) -> Result<Value, CliError> {
    let m0 = cfg.initial.sample(&g.grid)?;
    let xi = cfg.terminal.sample(&g.grid)?;
    let f = cfg.source.map(|s| s.sample(&g.grid)).transpose()?;
    let report = |step: f64| -> Result<levyfp::DualityReport, LevyError> {
        let mut opts = cfg.forward_options(step);
        opts.keep_fields = f.is_some();
        let fw = ForwardRun::new(g.clone(), m0.clone(), opts)?.solve()?;
        duality_residual(&fw, &xi, f.as_ref())
    };
    let coarse = report(dt)?;
    let fine = report(0.5 * dt)?;
    let ratio = coarse.residual / fine.residual;
    let value = json!({ "coarse": coarse, "fine": fine, "halving_ratio": ratio });
    dir.write_json("duality.json", &value)?;
    Ok(value)
}

fn particles(cfg: &ExperimentConfig, g: &GeneratorSpec, dt: f64, dir: &mut ArtifactDir) -> Result<Value, CliError> {
    let p = &cfg.particles;
    let d = g.grid.dim();
    let rng = RngSpec::new(p.seed, p.stream);
    let model = ParticleModel::new(g, p.jump_cutoff)?;
    let mut e = match p.start {
        ParticleStart::Point => ParticleEnsemble::at_point(&vec![p.x0; d], p.np, rng)?,
        ParticleStart::Gaussian => ParticleEnsemble::isotropic_gaussian(&vec![p.mean; d], p.np, p.variance, rng)?,
        ParticleStart::Initial => ParticleEnsemble::sample_density(&cfg.initial.sample(&g.grid)?, p.np, rng)?,
    };
    let steps = (cfg.time.horizon / dt).round() as u64;
    let moment_col = format!("bracket_moment_{}", p.moment_p);
    let mut moments = if d == 1 {
        Table::new(["t".to_string(), "mean".into(), "variance".into(), moment_col])
    } else {
        Table::new(["t".to_string(), moment_col])
    };
    let record = |e: &ParticleEnsemble, table: &mut Table| {
        if d == 1 {
            let (m, v) = e.mean_variance();
            table.push(&[e.time(), m, v, e.bracket_moment(p.moment_p)]);
        } else {
            table.push(&[e.time(), e.bracket_moment(p.moment_p)]);
        }
    };
    record(&e, &mut moments);
    let mut done = 0u64;
    for j in 1..=p.records as u64 {
        let target = (j * steps + p.records as u64 / 2) / p.records as u64;
        if target > done {
            simulate(&mut e, &model, dt, target - done)?;
            done = target;
            record(&e, &mut moments);
        }
    }
    dir.write_csv("moments.csv", &moments)?;

    let mut summary = json!({ "dt": dt, "steps": steps, "np": p.np, "time": e.time() });
    if d == 1 {
        let mut ch = Table::new(["xi", "re", "im"]);
        for &xi in &p.xi {
            let (re, im) = e.characteristic(xi);
            ch.push(&[xi, re, im]);
        }
        dir.write_csv("characteristic.csv", &ch)?;
        let (m, v) = e.mean_variance();
        summary["mean"] = json!(m);
        summary["variance"] = json!(v);
    }
    if p.snapshot {
        let cols: Vec<&str> = if d == 1 { vec!["particle_id", "x"] } else { vec!["particle_id", "x", "y"] };
        let mut snap = Table::new(cols);
        for (id, q) in e.positions().chunks(d).enumerate() {
            let mut row = vec![id.to_string()];
            row.extend(q.iter().map(|v| fmt_f64(*v)));
            snap.push_cells(row);
        }
        dir.write_csv("ensemble.csv", &snap)?;
    }
    Ok(summary)
}

fn coupling(cfg: &ExperimentConfig, g: &GeneratorSpec, dt: f64, dir: &mut ArtifactDir) -> Result<Value, CliError> {
    let c = &cfg.coupling;
    let mut opts = CouplingOptions::new(
        dt,
        cfg.time.horizon,
        c.pairs,
        RngSpec::new(cfg.particles.seed, cfg.particles.stream),
    );
    opts.eps_couple = c.eps;
    opts.stride = c.stride;
    opts.jump_cutoff = cfg.particles.jump_cutoff;
    let stats = reflection_coupling_run(g, c.x0, c.y0, &opts)?;
    let mut table = Table::new(["t", "uncoupled_fraction"]);
    for (t, u) in stats.times.iter().zip(&stats.uncoupled) {
        table.push(&[*t, *u]);
    }
    dir.write_csv("coupling.csv", &table)?;

    // the survival curve is fitted up to its first zero
    let n = stats.uncoupled.iter().position(|u| *u <= 0.0).unwrap_or(stats.uncoupled.len());
    let (t, v) = (&stats.times[..n], &stats.uncoupled[..n]);
    let model = match cfg.fit.model {
        FitModel::Auto => FitModel::Exponential,
        m => m,
    };
    let report = fit_report(cfg, model, t, v, "coupling.csv:uncoupled_fraction")?;
    dir.write_json("fit.json", &report)?;
    let coupled = stats.coupling_times.iter().filter(|c| c.is_some()).count();
    Ok(json!({
        "dt": dt,
        "pairs": c.pairs,
        "coupled": coupled,
        "final_uncoupled": stats.uncoupled.last(),
        "fit": report,
    }))
}

fn lyapunov_report(cfg: &ExperimentConfig, g: &GeneratorSpec, dir: &mut ArtifactDir) -> Result<Value, CliError> {
    let l = &cfg.lyapunov;
    let xs = default_radii(g, l.radii);
    let check = verify_lemma_lyap(g, l.beta, l.eps, &xs)?;
    let reports = cfg
        .weights()?
        .iter()
        .map(|w| classify_weight(g, w, &xs))
        .collect::<levyfp::Result<Vec<_>>>()?;
    let value = json!({ "bound": check, "weights": reports });
    dir.write_json("lyapunov.json", &value)?;
    let classes: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "weight": r.weight, "classification": r.classification }))
        .collect();
    Ok(json!({ "bound": check, "classes": classes }))
}

fn rate_ode(cfg: &ExperimentConfig, dir: &mut ArtifactDir) -> Result<Value, CliError> {
    let r = &cfg.rate_ode;
    let h = r.h;
    let traj = solve_rate_ode(&|x| h.eval(x), r.l, r.theta, cfg.time.horizon, r.records)?;
    let mut table = Table::new(["t", "varpi"]);
    for (t, w) in traj.t.iter().zip(&traj.varpi) {
        table.push(&[*t, *w]);
    }
    dir.write_csv("rate_ode.csv", &table)?;
    let value = json!({
        "h": h,
        "identity_residual": traj.identity_residual,
        "final_varpi": traj.varpi.last(),
    });
    dir.write_json("rate_ode.json", &value)?;
    Ok(value)
}

fn stationary(cfg: &ExperimentConfig, g: &GeneratorSpec, dt: f64, dir: &mut ArtifactDir) -> Result<Value, CliError> {
    let s = &cfg.stationary;
    let opts = StationaryOptions {
        dt,
        max_time: s.max_time,
        tol: s.tol,
        initial_variance: s.initial_variance,
    };
    let m = stationary_solve(g, &opts)?;
    dir.write_csv("stationary.csv", &field_table(&m))?;
    let grid = m.grid();
    let dx = grid.dx();
    let mut table = Table::new(["xi", "re", "im"]);
    for j in 0..s.xi_count {
        let xi = s.xi_max * j as f64 / (s.xi_count - 1) as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, v) in m.values().iter().enumerate() {
            let a = xi * grid.coord(i as isize);
            re += v * a.cos() * dx;
            im -= v * a.sin() * dx;
        }
        table.push(&[xi, re, im]);
    }
    dir.write_csv("transform.csv", &table)?;
    let (mean, variance) = m.mean_variance();
    Ok(json!({ "time": m.time(), "mass": m.mass(), "mean": mean, "variance": variance }))
}
