//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p levyfp-cli --test acceptance`; extra arguments of
//! the form `AC-n` restrict the run to those criteria. The process fails when
//! a criterion outside `KNOWN_FAILURES` fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use levyfp::lyapunov::{classify_weight, default_radii, verify_lemma_lyap, Classification};
use levyfp::norms::{inf_shift_norm, weighted_seminorm};
use levyfp::{
    DriftSpec, ForwardOptions, ForwardRun, GeneratorSpec, Grid, InitialDatum, LevyError,
    LevyMeasureSpec, LocalDiffusionSpec, RngSpec, ScalarField, TransportScheme, WeightFunction,
};
use levyfp_cli::{run, sweep, ExperimentConfig};
use rand::Rng;
use serde_json::Value;

/// Criteria that fail for documented reasons; their FAIL lines do not fail the process.
const KNOWN_FAILURES: &[&str] = &["AC-10"];

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn spec(grid: Grid, lambda0: f64, levy: LevyMeasureSpec, drift: DriftSpec) -> GeneratorSpec {
    GeneratorSpec::new(grid, LocalDiffusionSpec::isotropic(lambda0).unwrap(), levy, drift).unwrap()
}

fn line() -> Grid {
    Grid::line(1024, 16.0).unwrap()
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Run a config through the library runner in a fresh directory.
fn run_config(text: &str, out: &Path) -> Value {
    let cfg = ExperimentConfig::parse(text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    run(&cfg, out).unwrap_or_else(|e| panic!("{e}\n{text}")).summary
}

/// Numeric columns of a CSV written by the runner.
fn read_csv(p: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(p).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

/// Fourier multiplier `exp(-t |ξ|^σ)` applied through a direct O(N^2) DFT.
fn dft_heat(values: &[f64], grid: &Grid, t: f64, sigma: f64) -> Vec<f64> {
    let n = values.len();
    let l = grid.half_width();
    let mut out = vec![0.0; n];
    for j in 0..n {
        let mode = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        let damp = (-t * (PI * mode / l).abs().powf(sigma)).exp();
        let (mut re, mut im) = (0.0, 0.0);
        for (i, v) in values.iter().enumerate() {
            let a = -2.0 * PI * ((i * j) % n) as f64 / n as f64;
            re += v * a.cos();
            im += v * a.sin();
        }
        for (i, o) in out.iter_mut().enumerate() {
            let a = 2.0 * PI * ((i * j) % n) as f64 / n as f64;
            *o += damp * (re * a.cos() - im * a.sin()) / n as f64;
        }
    }
    out
}

fn ac1() -> Verdict {
    let grid = line();
    let m0 = InitialDatum::Gaussian { mean: 0.5, variance: 1.0 }.sample(&grid).unwrap();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for sigma in [0.8, 1.5, 2.0] {
        let g = if sigma == 2.0 {
            spec(grid, 1.0, LevyMeasureSpec::none(), DriftSpec::zero())
        } else {
            spec(grid, 0.0, LevyMeasureSpec::fractional(sigma, 1.0).unwrap(), DriftSpec::zero())
        };
        let mut o = ForwardOptions::new(1e-2, 1.0);
        o.eps_boundary = 1e-1;
        let m = ForwardRun::new(g, m0.clone(), o).unwrap().solve().unwrap().final_state.unwrap();
        let err = sup(m.values(), &dft_heat(m0.values(), &grid, 1.0, sigma));
        parts.push(format!("σ={sigma}: {err:.2e}"));
        worst = worst.max(err);
    }
    Verdict::new(worst <= 1e-8, format!("sup error vs heat kernel {} (tol 1e-8)", parts.join(", ")))
}

fn ac2() -> Verdict {
    let grid = line();
    let g = spec(grid, 1.0, LevyMeasureSpec::none(), DriftSpec::ou()).with_transport(TransportScheme::Muscl);
    let v0 = 4.0;
    let m0 = InitialDatum::Gaussian { mean: 0.0, variance: v0 }.sample(&grid).unwrap();
    let mut o = ForwardOptions::new(1e-3, 3.0);
    o.keep_fields = true;
    let run_ = ForwardRun::new(g, m0, o).unwrap().solve().unwrap();
    let var_err = run_
        .fields
        .iter()
        .map(|m| (m.mean_variance().1 - (1.0 + (v0 - 1.0) * (-2.0 * m.time()).exp())).abs())
        .fold(0.0f64, f64::max);

    let dir = tmp();
    run_config(
        r#"{"experiment": "stationary", "generator.transport": "muscl", "time.dt": 0.001}"#,
        dir.path(),
    );
    let rows = read_csv(&dir.path().join("stationary.csv"));
    let stat_err = rows
        .iter()
        .map(|r| (r[1] - (-r[0] * r[0] / 2.0).exp() / (2.0 * PI).sqrt()).abs())
        .fold(0.0f64, f64::max);
    Verdict::new(
        var_err <= 1e-3 && stat_err <= 1e-4,
        format!("variance error {var_err:.2e} (tol 1e-3), stationary sup error {stat_err:.2e} (tol 1e-4)"),
    )
}

fn ac3() -> Verdict {
    let sigma: f64 = 1.5;
    let want = |xi: f64| (-xi.abs().powf(sigma) / sigma).exp();
    let dir = tmp();
    let base = r#""jumps.kind": "fractional", "jumps.sigma": 1.5, "generator.lambda0": 0"#;
    run_config(&format!(r#"{{"experiment": "stationary", {base}, "time.dt": 0.001}}"#), &dir.path().join("grid"));
    let grid_err = read_csv(&dir.path().join("grid/transform.csv"))
        .iter()
        .map(|r| (r[1] - want(r[0])).hypot(r[2]))
        .fold(0.0f64, f64::max);

    let xi: Vec<String> = (1..=16).map(|j| format!("{}", 0.5 * j as f64)).collect();
    run_config(
        &format!(
            r#"{{"experiment": "particles", {base}, "particles.np": 1000000, "particles.start": "point",
                "particles.seed": 7, "particles.records": 1, "particles.xi": [{}],
                "time.dt": 0.01, "time.horizon": 5}}"#,
            xi.join(",")
        ),
        &dir.path().join("particles"),
    );
    let mc_err = read_csv(&dir.path().join("particles/characteristic.csv"))
        .iter()
        .map(|r| (r[1] - want(r[0])).hypot(r[2]))
        .fold(0.0f64, f64::max);
    Verdict::new(
        grid_err <= 1e-2 && mc_err <= 5e-3,
        format!("grid transform error {grid_err:.2e} (tol 1e-2), particle transform error {mc_err:.2e} (tol 5e-3)"),
    )
}

fn ac4() -> Verdict {
    let dir = tmp();
    let cases = [
        ("σ=2", r#""generator.lambda0": 1"#, 1e-6),
        ("σ=1.5", r#""generator.lambda0": 0, "jumps.kind": "fractional", "jumps.sigma": 1.5"#, 1e-2),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, gen, eps)) in cases.iter().enumerate() {
        let summary = run_config(
            &format!(
                r#"{{"experiment": "forward-decay", {gen}, "drift.kind": "power", "drift.gamma": 2,
                    "weights": ["power(0.5)"], "time.dt": 0.001, "time.horizon": 30, "time.stride": 100,
                    "boundary.eps": {eps}, "fit.model": "exponential", "fit.window_lo": 6, "fit.window_hi": 30}}"#
            ),
            &dir.path().join(format!("case{i}")),
        );
        let fit = &summary["fit"];
        let rate = fit["fit"]["params"]["rate"].as_f64().unwrap();
        let r2 = fit["fit"]["r2"].as_f64().unwrap();
        let shift = fit["window_shift"]["max_relative_change"].as_f64().unwrap();
        pass &= rate > 0.0 && r2 >= 0.99 && shift <= 0.15;
        parts.push(format!("{name}: ω={rate:.4} R²={r2:.5} shift={:.1}%", 100.0 * shift));
    }
    Verdict::new(pass, format!("{} (need ω>0, R²≥0.99, shift≤15%)", parts.join("; ")))
}

fn ac5() -> Verdict {
    let dir = tmp();
    let cfg = ExperimentConfig::parse(
        r#"{"grid.n": 8192, "grid.half_width": 1024, "generator.lambda0": 1,
            "time.dt": 0.001, "time.cfl_fraction": 0.9, "time.horizon": 10, "time.stride": 100,
            "boundary.eps": 0.01, "sweep.gamma": [1.2, 1.5, 1.8], "sweep.sigma": [2, 1.5],
            "sweep.k": [0.2], "sweep.kbar": [0.7], "sweep.jump_lambda0": 0}"#,
    )
    .unwrap();
    let rows = sweep(&cfg, dir.path()).unwrap();
    let mut pass = rows.len() == 6;
    let mut parts = Vec::new();
    for r in &rows {
        let q = r.fitted_exponent.unwrap_or(f64::NAN);
        let r2 = r.r2.unwrap_or(f64::NAN);
        let ok = r.status == "ok" && q >= r.predicted_q - 0.2 && r2 >= 0.98;
        pass &= ok;
        parts.push(format!(
            "γ={} σ={}: q={q:.3} vs {:.3}, R²={r2:.4}{}",
            r.gamma,
            r.sigma,
            r.predicted_q,
            if r.status == "ok" { String::new() } else { format!(" [{}]", r.status) }
        ));
    }
    Verdict::new(pass, format!("{} (need q ≥ predicted−0.2, R² ≥ 0.98)", parts.join("; ")))
}

fn ac6() -> Verdict {
    let dir = tmp();
    run_config(
        r#"{"experiment": "duality-check", "generator.lambda0": 0, "jumps.kind": "fractional", "jumps.sigma": 1.5,
            "initial.kind": "gaussian", "initial.mean": 0.5, "initial.variance": 1, "terminal.kind": "tanh",
            "time.dt": 0.001, "time.horizon": 2, "time.stride": 10, "boundary.eps": 0.01}"#,
        dir.path(),
    );
    let d = read_json(&dir.path().join("duality.json"));
    let residual = d["coarse"]["residual"].as_f64().unwrap();
    let ratio = d["halving_ratio"].as_f64().unwrap();
    Verdict::new(
        residual <= 5e-3 && (ratio - 2.0).abs() <= 0.4,
        format!("residual {residual:.3e} at dt=1e-3 (tol 5e-3), halving ratio {ratio:.3} (need 2±20%)"),
    )
}

/// `sup_{x≠y} |u(x)-u(y)| / (φ(x)+φ(y))` by enumeration of pairs.
fn brute_seminorm(u: &[f64], phi: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            best = best.max((u[i] - u[j]).abs() / (phi[i] + phi[j]));
        }
    }
    best
}

/// `min_c max_i |u_i - c| / φ_i` by bisection on the balance of the two one-sided maxima.
fn bisect_shift_norm(u: &[f64], phi: &[f64]) -> f64 {
    let above = |c: f64| u.iter().zip(phi).map(|(v, p)| (v - c) / p).fold(f64::NEG_INFINITY, f64::max);
    let below = |c: f64| u.iter().zip(phi).map(|(v, p)| (c - v) / p).fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) > below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    above(lo).max(below(lo)).min(above(hi).max(below(hi)))
}

fn ac7() -> Verdict {
    let grid = Grid::line(512, 16.0).unwrap();
    let weights = [
        WeightFunction::power(0.5).unwrap(),
        WeightFunction::power(1.0).unwrap(),
        WeightFunction::exponential(0.5, 1.0).unwrap(),
    ];
    let mut rng = RngSpec::new(2024, 7).particle(0);
    let mut worst = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for _ in 0..100 {
        let modes: Vec<(f64, f64, f64)> = (0..6)
            .map(|_| (rng.random_range(-2.0..2.0), rng.random_range(0.05..4.0), rng.random_range(0.0..2.0 * PI)))
            .collect();
        let growth = rng.random_range(-1.0..1.0);
        let power = rng.random_range(0.0..1.2);
        let spike = rng.random_range(0..grid.n());
        let u = ScalarField::from_fn(grid, |x| {
            modes.iter().map(|(a, f, p)| a * (f * x + p).sin()).sum::<f64>() + growth * x.abs().powf(power)
        });
        let mut values = u.values().to_vec();
        values[spike] += rng.random_range(-5.0..5.0);
        let u = ScalarField::new(grid, values, 0.0).unwrap();
        for w in &weights {
            let phi = w.sample(&grid);
            let a = weighted_seminorm(&u, w);
            let b = inf_shift_norm(&u, w);
            worst = worst.max((a - b).abs() / a.abs().max(1e-300));
            let pair = brute_seminorm(u.values(), &phi);
            let shift = bisect_shift_norm(u.values(), &phi);
            worst_oracle = worst_oracle
                .max((a - pair).abs() / pair.max(1e-300))
                .max((b - shift).abs() / shift.max(1e-300));
        }
    }
    Verdict::new(
        worst <= 1e-10 && worst_oracle <= 1e-10,
        format!("300 cases: seminorm vs inf-shift {worst:.2e}, vs brute-force oracles {worst_oracle:.2e} (tol 1e-10)"),
    )
}

fn ac8() -> Verdict {
    let frac = |gamma: f64| {
        spec(line(), 0.0, LevyMeasureSpec::fractional(1.5, 1.0).unwrap(), DriftSpec::power(1.0, gamma).unwrap())
    };
    let local = |gamma: f64| spec(line(), 1.0, LevyMeasureSpec::none(), DriftSpec::power(1.0, gamma).unwrap());
    let g = frac(2.0);
    let xs = default_radii(&g, 200);
    let check = verify_lemma_lyap(&g, 0.9, 0.5, &xs).unwrap();
    let holds = check.holds && check.k_eps.is_finite();
    let refused = matches!(verify_lemma_lyap(&g, 1.6, 0.5, &xs), Err(LevyError::Hypothesis(_)));
    let class = |g: &GeneratorSpec, k: f64| {
        classify_weight(g, &WeightFunction::power(k).unwrap(), &default_radii(g, 200)).unwrap().classification
    };
    let neither = [class(&local(1.5), 0.3), class(&frac(1.5), 0.3)];
    let h1 = [class(&local(2.0), 0.5), class(&frac(2.0), 0.5)];
    let pass = holds
        && refused
        && neither.iter().all(|c| *c == Classification::Neither)
        && h1.iter().all(|c| matches!(c, Classification::H1 { .. }));
    Verdict::new(
        pass,
        format!(
            "β=0.9: holds={} K={:.4} (refined {:.4}); β=1.6 refused={refused}; γ=1.5,k=0.3 → {:?}; γ=2,k=0.5 → {:?}",
            check.holds, check.k_eps, check.k_eps_refined, neither, h1
        ),
    )
}

fn ac9() -> Verdict {
    let dir = tmp();
    let mut worst = 0.0f64;
    let mut identity = 0.0f64;
    for (i, &(p, l, theta)) in [(0.5f64, 1.0f64, 0.5f64), (1.0, 1.0, 0.5), (0.5, 3.0, 0.2), (1.0, 3.0, 0.2)].iter().enumerate() {
        let out = dir.path().join(format!("case{i}"));
        run_config(
            &format!(
                r#"{{"experiment": "rate-ode", "rate_ode.h.kind": "power", "rate_ode.h.c": 1, "rate_ode.h.p": {p},
                    "rate_ode.l": {l}, "rate_ode.theta": {theta}, "rate_ode.records": 80, "time.horizon": 40}}"#
            ),
            &out,
        );
        for r in read_csv(&out.join("rate_ode.csv")) {
            let want = (1.0 + p * r[0] * l.powf(-p) / (2.0 * (1.0 - theta))).powf(-(1.0 - theta) / p);
            worst = worst.max((r[1] - want).abs() / want);
        }
        identity = identity.max(read_json(&out.join("rate_ode.json"))["identity_residual"].as_f64().unwrap());
    }
    Verdict::new(
        worst <= 1e-8 && identity <= 1e-6,
        format!("relative error vs closed form {worst:.2e} (tol 1e-8), integral identity residual {identity:.2e} (tol 1e-6)"),
    )
}

fn ac10() -> Verdict {
    let dir = tmp();
    let (mu, k, gamma, theta) = (0.5, 1.0, 0.5, 0.5);
    let summary = run_config(
        &format!(
            r#"{{"experiment": "forward-decay", "generator.lambda0": 1, "drift.kind": "power", "drift.gamma": {gamma},
                "weights": ["exponential({},{k})"], "time.dt": 0.002, "time.horizon": 40, "time.stride": 50,
                "grid.n": 4096, "grid.half_width": 64, "boundary.eps": 0.01,
                "fit.model": "stretched", "fit.window_lo": 5, "fit.window_hi": 40, "fit.shift": 0}}"#,
            theta * mu
        ),
        dir.path(),
    );
    let fit = &summary["fit"]["fit"];
    let beta = fit["params"]["exponent"].as_f64().unwrap();
    let target = k / (2.0 - gamma);
    Verdict::new(
        (beta - target).abs() <= 0.15,
        format!(
            "stretch exponent {beta:.4} vs k/(2−γ) = {target:.4} (tol 0.15), R²={:.5}",
            fit["r2"].as_f64().unwrap()
        ),
    )
}

fn ac11() -> Verdict {
    let dir = tmp();
    let mut rates = Vec::new();
    let mut decreasing = true;
    for (i, drift) in [r#""drift.kind": "ou""#, r#""drift.kind": "perturbed-power", "drift.amplitude": 0.3"#]
        .iter()
        .enumerate()
    {
        let out = dir.path().join(format!("case{i}"));
        let summary = run_config(
            &format!(
                r#"{{"experiment": "adjoint-oscillation", "generator.lambda0": 0, "jumps.kind": "fractional",
                    "jumps.sigma": 1.5, {drift}, "terminal.kind": "tanh", "weights": ["power(0.5)"],
                    "time.dt": 0.001, "time.horizon": 10, "time.stride": 100, "fit.model": "exponential"}}"#
            ),
            &out,
        );
        rates.push(summary["fit"]["fit"]["params"]["rate"].as_f64().unwrap());
        let tail: Vec<f64> = read_csv(&out.join("oscillation.csv")).iter().filter(|r| r[0] >= 2.0).map(|r| r[2]).collect();
        decreasing &= tail.windows(2).all(|w| w[1] <= w[0]);
    }
    let change = (rates[1] - rates[0]).abs() / rates[0];
    Verdict::new(
        decreasing && rates.iter().all(|r| *r > 0.0) && change < 0.5,
        format!(
            "rate {:.4} unperturbed, {:.4} with A=0.3 (change {:.1}%, need <50%), eventually decreasing={decreasing}",
            rates[0],
            rates[1],
            100.0 * change
        ),
    )
}

fn ac12() -> Verdict {
    let dir = tmp();
    let mut rates = Vec::new();
    let mut monotone = true;
    for pairs in [10_000, 40_000] {
        let out = dir.path().join(format!("p{pairs}"));
        let summary = run_config(
            &format!(
                r#"{{"experiment": "coupling", "generator.lambda0": 1, "drift.kind": "ou", "coupling.x0": 1,
                    "coupling.y0": -1, "coupling.pairs": {pairs}, "time.dt": 0.002, "time.horizon": 5,
                    "particles.seed": 11, "fit.model": "exponential"}}"#
            ),
            &out,
        );
        rates.push(summary["fit"]["fit"]["params"]["rate"].as_f64().unwrap());
        let u: Vec<f64> = read_csv(&out.join("coupling.csv")).iter().map(|r| r[1]).collect();
        monotone &= u.windows(2).all(|w| w[1] <= w[0]);
    }
    let change = (rates[0] - rates[1]).abs() / rates[1];
    Verdict::new(
        rates.iter().all(|r| *r > 0.0) && change <= 0.15 && monotone,
        format!(
            "rate {:.4} at 1e4 pairs, {:.4} at 4e4 (difference {:.1}%, tol 15%), nonincreasing={monotone}",
            rates[0],
            rates[1],
            100.0 * change
        ),
    )
}

fn ac13() -> Verdict {
    let dir = tmp();
    let max_threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).max(4);
    let configs = [
        (
            "forward",
            r#"{"experiment": "forward-decay", "grid.n": 512, "jumps.kind": "tempered", "jumps.sigma": 1.2,
                "generator.lambda0": 0.2, "time.dt": 0.002, "time.horizon": 1, "time.stride": 50, "boundary.eps": 0.01}"#,
        ),
        (
            "particles",
            r#"{"experiment": "particles", "jumps.kind": "fractional", "generator.lambda0": 0.5, "particles.np": 30000,
                "particles.snapshot": true, "time.dt": 0.01, "time.horizon": 1}"#,
        ),
        (
            "coupling",
            r#"{"experiment": "coupling", "coupling.pairs": 10000, "time.dt": 0.01, "time.horizon": 3}"#,
        ),
    ];
    let mut compared = 0;
    let mut mismatched = Vec::new();
    for (name, text) in configs {
        let cfg = dir.path().join(format!("{name}.json"));
        fs::write(&cfg, text).unwrap();
        let mut outs = Vec::new();
        for threads in [1, max_threads] {
            let out = dir.path().join(format!("{name}_{threads}"));
            let status = Command::new(env!("CARGO_BIN_EXE_levyfp"))
                .args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", &threads.to_string()])
                .status()
                .unwrap();
            assert!(status.success(), "{name} with {threads} threads");
            outs.push(out);
        }
        let mut csvs: Vec<_> = fs::read_dir(&outs[0])
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|f| f.ends_with(".csv"))
            .collect();
        csvs.sort();
        for f in csvs {
            compared += 1;
            if fs::read(outs[0].join(&f)).unwrap() != fs::read(outs[1].join(&f)).unwrap() {
                mismatched.push(format!("{name}/{f}"));
            }
        }
    }
    Verdict::new(
        mismatched.is_empty() && compared >= 6,
        format!("{compared} CSV files compared between 1 and {max_threads} workers, mismatches: {mismatched:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 13] = [
        ("AC-1", ac1),
        ("AC-2", ac2),
        ("AC-3", ac3),
        ("AC-4", ac4),
        ("AC-5", ac5),
        ("AC-6", ac6),
        ("AC-7", ac7),
        ("AC-8", ac8),
        ("AC-9", ac9),
        ("AC-10", ac10),
        ("AC-11", ac11),
        ("AC-12", ac12),
        ("AC-13", ac13),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC-")).collect();
    let mut unexpected = Vec::new();
    for (id, check) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (v.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{id} {tag}: {} [{secs:.1}s]", v.detail);
        if !v.pass && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
