//! Experiment configuration: flat JSON with dotted keys, defaults for every
//! field, and validation of all admissibility constraints before any compute.

use std::collections::BTreeSet;
use std::str::FromStr;

use levyfp::forward::ForwardStepper;
use levyfp::lyapunov::HModel;
use levyfp::rates::{predicted_q, FitWindow};
use levyfp::{
    AdjointOptions, DriftKind, DriftSpec, ForwardOptions, GeneratorSpec, Grid, InitialDatum, LevyError,
    LevyMeasureSpec, LocalDiffusionSpec, ParticleModel, SigmaKind, TerminalDatum, TransportScheme, WeightFunction,
};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ForwardDecay,
    AdjointOscillation,
    DualityCheck,
    Particles,
    Coupling,
    LyapunovReport,
    RateOde,
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    pub n: usize,
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            d: 1,
            n: 1024,
            half_width: 16.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaChoice {
    Zero,
    Tanh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub lambda0: f64,
    pub sigma_kind: SigmaChoice,
    pub sigma_amplitude: f64,
    pub transport: TransportScheme,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            lambda0: 1.0,
            sigma_kind: SigmaChoice::Zero,
            sigma_amplitude: 0.0,
            transport: TransportScheme::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumpChoice {
    None,
    Fractional,
    Tempered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JumpConfig {
    pub kind: JumpChoice,
    pub sigma: f64,
    pub intensity: f64,
}

impl Default for JumpConfig {
    fn default() -> Self {
        Self {
            kind: JumpChoice::None,
            sigma: 1.5,
            intensity: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftConfig {
    pub kind: DriftKind,
    pub alpha: f64,
    pub gamma: f64,
    pub amplitude: f64,
    pub radius: f64,
    pub delta: f64,
    /// Defaults to `2 |A|` for the perturbed drift and 0 otherwise.
    pub c0: Option<f64>,
}

impl Default for DriftConfig {
    fn default() -> Self {
        Self {
            kind: DriftKind::Ou,
            alpha: 1.0,
            gamma: 2.0,
            amplitude: 0.0,
            radius: 1.0,
            delta: 0.5,
            c0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub horizon: f64,
    pub stride: usize,
    /// When set, `dt` is capped at this share of the transport limit at `t = 0`.
    pub cfl_fraction: Option<f64>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 10.0,
            stride: 100,
            cfl_fraction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryConfig {
    pub eps: f64,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self { eps: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// Exponential for `γ >= 2`, power otherwise.
    Auto,
    Exponential,
    Power,
    Stretched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub model: FitModel,
    pub window_lo: Option<f64>,
    pub window_hi: Option<f64>,
    /// Window start moves by this share of the horizon in the stability check.
    pub shift: f64,
    /// Index into `weights` of the fitted norm.
    pub weight: usize,
    /// Data weight exponent for the predicted polynomial rate.
    pub kbar: Option<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            model: FitModel::Auto,
            window_lo: None,
            window_hi: None,
            shift: 0.2,
            weight: 0,
            kbar: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParticleStart {
    Point,
    Gaussian,
    /// Samples the configured initial datum, which must be a probability density.
    Initial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParticleConfig {
    pub np: usize,
    pub seed: u64,
    pub stream: u64,
    pub jump_cutoff: f64,
    pub start: ParticleStart,
    pub x0: f64,
    pub mean: f64,
    pub variance: f64,
    /// Number of recorded times after the start.
    pub records: usize,
    pub moment_p: f64,
    pub xi: Vec<f64>,
    pub snapshot: bool,
}

impl Default for ParticleConfig {
    fn default() -> Self {
        Self {
            np: 100_000,
            seed: 1,
            stream: 0,
            jump_cutoff: levyfp::particles::DEFAULT_JUMP_CUTOFF,
            start: ParticleStart::Gaussian,
            x0: 0.0,
            mean: 0.0,
            variance: 1.0,
            records: 10,
            moment_p: 1.0,
            xi: vec![0.5, 1.0, 2.0, 4.0],
            snapshot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    pub x0: f64,
    pub y0: f64,
    pub pairs: usize,
    pub eps: f64,
    pub stride: u64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            x0: 1.0,
            y0: -1.0,
            pairs: 10_000,
            eps: 1e-3,
            stride: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovConfig {
    pub beta: f64,
    pub eps: f64,
    pub radii: usize,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            beta: 1.0,
            eps: 0.5,
            radii: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateOdeConfig {
    pub h: HModel,
    pub l: f64,
    pub theta: f64,
    pub records: usize,
}

impl Default for RateOdeConfig {
    fn default() -> Self {
        Self {
            h: HModel::Power { c: 1.0, p: 0.5 },
            l: 1.0,
            theta: 0.5,
            records: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationaryConfig {
    pub tol: f64,
    pub max_time: f64,
    pub initial_variance: f64,
    pub xi_max: f64,
    pub xi_count: usize,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_time: 200.0,
            initial_variance: 1.0,
            xi_max: 8.0,
            xi_count: 81,
        }
    }
}

/// Axes of a sweep; `σ = 2` means local diffusion only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub gamma: Vec<f64>,
    pub sigma: Vec<f64>,
    pub k: Vec<f64>,
    pub kbar: Vec<f64>,
    /// Initial tails decay like `<x>^{-(1 + k̄ + tail_offset)}`.
    pub tail_offset: f64,
    /// `λ0` of cells with `σ < 2`; cells with `σ = 2` use `generator.lambda0`.
    pub jump_lambda0: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            gamma: vec![1.5],
            sigma: vec![2.0],
            k: vec![0.2],
            kbar: vec![0.7],
            tail_offset: 0.3,
            jump_lambda0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid: GridConfig,
    pub generator: GeneratorConfig,
    pub jumps: JumpConfig,
    pub drift: DriftConfig,
    pub initial: InitialDatum,
    pub terminal: TerminalDatum,
    pub source: Option<TerminalDatum>,
    pub weights: Vec<String>,
    pub time: TimeConfig,
    pub boundary: BoundaryConfig,
    pub fit: FitConfig,
    pub particles: ParticleConfig,
    pub coupling: CouplingConfig,
    pub lyapunov: LyapunovConfig,
    pub rate_ode: RateOdeConfig,
    pub stationary: StationaryConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::ForwardDecay,
            grid: GridConfig::default(),
            generator: GeneratorConfig::default(),
            jumps: JumpConfig::default(),
            drift: DriftConfig::default(),
            initial: InitialDatum::DifferenceOfGaussians {
                shift: 1.0,
                variance: 1.0,
            },
            terminal: TerminalDatum::Tanh,
            source: None,
            weights: vec!["power(0.5)".into()],
            time: TimeConfig::default(),
            boundary: BoundaryConfig::default(),
            fit: FitConfig::default(),
            particles: ParticleConfig::default(),
            coupling: CouplingConfig::default(),
            lyapunov: LyapunovConfig::default(),
            rate_ode: RateOdeConfig::default(),
            stationary: StationaryConfig::default(),
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Nested objects flattened to dotted keys; arrays stay leaves.
pub fn flatten(value: &Value) -> Map<String, Value> {
    fn walk(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
        match v {
            Value::Object(map) if !map.is_empty() || prefix.is_empty() => {
                for (k, child) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, child, out);
                }
            }
            _ => {
                out.insert(prefix.to_string(), v.clone());
            }
        }
    }
    let mut out = Map::new();
    walk("", value, &mut out);
    out
}

fn unflatten(flat: &Map<String, Value>) -> Result<Value, CliError> {
    let mut root = Map::new();
    for (key, v) in flat {
        let parts: Vec<&str> = key.split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(CliError::Config(format!("malformed key '{key}'")));
        }
        let mut node = &mut root;
        for p in &parts[..parts.len() - 1] {
            let entry = node.entry(p.to_string()).or_insert_with(|| Value::Object(Map::new()));
            node = match entry {
                Value::Object(m) => m,
                _ => return Err(CliError::Config(format!("key '{key}' conflicts with a scalar at '{p}'"))),
            };
        }
        let last = parts[parts.len() - 1];
        if node.contains_key(last) {
            return Err(CliError::Config(format!("key '{key}' is given twice")));
        }
        node.insert(last.to_string(), v.clone());
    }
    Ok(Value::Object(root))
}

impl ExperimentConfig {
    /// Parse a config document; nested objects are accepted as well as dotted keys.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("not valid JSON: {e}")))?;
        if !raw.is_object() {
            return Err(CliError::Config("the config must be a JSON object".into()));
        }
        let flat = flatten(&raw);
        let nested = unflatten(&flat)?;
        let cfg: Self = serde_json::from_value(nested).map_err(|e| CliError::Config(e.to_string()))?;
        // tagged data enums ignore unknown fields, so compare against the echo
        let known: BTreeSet<String> = cfg.echo().keys().cloned().collect();
        if let Some(extra) = flat.keys().find(|k| !known.contains(*k)) {
            return Err(CliError::Config(format!("unknown key '{extra}'")));
        }
        Ok(cfg)
    }

    /// Fully resolved config as sorted dotted keys.
    pub fn echo(&self) -> Map<String, Value> {
        flatten(&serde_json::to_value(self).expect("config serializes"))
    }

    pub fn echo_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.echo())).expect("config serializes");
        s.push('\n');
        s
    }

    /// SHA-256 of the compact echo without the output location.
    pub fn hash(&self) -> String {
        let mut echo = self.echo();
        echo.remove("output.dir");
        let text = serde_json::to_string(&Value::Object(echo)).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn grid(&self) -> Result<Grid, LevyError> {
        Grid::new(self.grid.d, self.grid.n, self.grid.half_width)
    }

    pub fn levy(&self) -> Result<LevyMeasureSpec, LevyError> {
        match self.jumps.kind {
            JumpChoice::None => Ok(LevyMeasureSpec::none()),
            JumpChoice::Fractional => LevyMeasureSpec::fractional(self.jumps.sigma, self.jumps.intensity),
            JumpChoice::Tempered => LevyMeasureSpec::tempered(self.jumps.sigma, self.jumps.intensity),
        }
    }

    pub fn drift(&self) -> Result<DriftSpec, LevyError> {
        let c = &self.drift;
        let default_c0 = if c.kind == DriftKind::PerturbedPower { 2.0 * c.amplitude.abs() } else { 0.0 };
        let spec = DriftSpec {
            kind: c.kind,
            alpha: c.alpha,
            gamma: c.gamma,
            radius: c.radius,
            c0: c.c0.unwrap_or(default_c0),
            delta: c.delta,
            amplitude: c.amplitude,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn generator(&self) -> Result<GeneratorSpec, LevyError> {
        let sigma = match self.generator.sigma_kind {
            SigmaChoice::Zero => SigmaKind::Zero,
            SigmaChoice::Tanh => SigmaKind::Tanh {
                a: self.generator.sigma_amplitude,
            },
        };
        let local = LocalDiffusionSpec::new(self.generator.lambda0, sigma)?;
        Ok(GeneratorSpec::new(self.grid()?, local, self.levy()?, self.drift()?)?.with_transport(self.generator.transport))
    }

    pub fn weights(&self) -> Result<Vec<WeightFunction>, LevyError> {
        self.weights.iter().map(|s| WeightFunction::from_str(s)).collect()
    }

    /// Step actually used by grid solvers.
    pub fn effective_dt(&self, g: &GeneratorSpec) -> Result<f64, LevyError> {
        match self.time.cfl_fraction {
            None => Ok(self.time.dt),
            Some(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(LevyError::Parameter(format!("time.cfl_fraction must lie in (0, 1], got {f}")));
                }
                Ok(self.time.dt.min(f * ForwardStepper::new(g)?.max_dt(0.0)))
            }
        }
    }

    pub fn forward_options(&self, dt: f64) -> ForwardOptions {
        let mut o = ForwardOptions::new(dt, self.time.horizon);
        o.stride = self.time.stride;
        o.eps_boundary = self.boundary.eps;
        o
    }

    pub fn adjoint_options(&self, dt: f64) -> AdjointOptions {
        let mut o = AdjointOptions::new(dt, self.time.horizon);
        o.stride = self.time.stride;
        o
    }

    pub fn fit_window(&self, t: &[f64]) -> Result<FitWindow, LevyError> {
        let (Some(&a), Some(&b)) = (t.first(), t.last()) else {
            return Err(LevyError::Fit("no recorded samples".into()));
        };
        let lo = self.fit.window_lo.unwrap_or(a + levyfp::rates::DEFAULT_TRANSIENT * (b - a));
        let hi = self.fit.window_hi.unwrap_or(b);
        FitWindow::new(lo, hi)
    }

    /// Checks every constraint the selected experiment relies on.
    pub fn validate(&self) -> Result<(), LevyError> {
        let g = self.generator()?;
        let weights = self.weights()?;
        let levy = &g.levy;
        for w in &weights {
            check_weight(w, levy)?;
        }
        let needs_weights = matches!(
            self.experiment,
            Experiment::ForwardDecay | Experiment::AdjointOscillation | Experiment::LyapunovReport
        );
        if needs_weights && weights.is_empty() {
            return Err(LevyError::Parameter("at least one weight is required".into()));
        }
        if needs_weights && self.experiment != Experiment::LyapunovReport && self.fit.weight >= weights.len() {
            return Err(LevyError::Parameter(format!(
                "fit.weight = {} but only {} weights are configured",
                self.fit.weight,
                weights.len()
            )));
        }
        if !(self.fit.shift >= 0.0 && self.fit.shift < 1.0) {
            return Err(LevyError::Parameter(format!("fit.shift must lie in [0, 1), got {}", self.fit.shift)));
        }
        if let (Some(lo), Some(hi)) = (self.fit.window_lo, self.fit.window_hi) {
            FitWindow::new(lo, hi)?;
        }
        if self.grid.d != 1 && self.experiment != Experiment::Particles {
            return Err(LevyError::Unsupported(format!(
                "the {:?} experiment runs in d = 1; d = 2 is available for particles",
                self.experiment
            )));
        }
        if let Some(kbar) = self.fit.kbar {
            let k = weights
                .get(self.fit.weight)
                .and_then(|w| w.power_exponent())
                .ok_or_else(|| LevyError::Parameter("fit.kbar needs a power weight at fit.weight".into()))?;
            check_kbar(k, kbar, g.drift.gamma(), levy)?;
        }
        let dt = self.effective_dt(&g)?;
        match self.experiment {
            Experiment::ForwardDecay => {
                self.initial.validate()?;
                self.forward_options(dt).validate()?;
            }
            Experiment::DualityCheck => {
                self.initial.validate()?;
                self.terminal.validate()?;
                if let Some(f) = self.source {
                    f.validate()?;
                }
                self.forward_options(dt).validate()?;
                self.forward_options(0.5 * dt).validate()?;
            }
            Experiment::AdjointOscillation => {
                self.terminal.validate()?;
                if let Some(f) = self.source {
                    f.validate()?;
                }
                self.adjoint_options(dt).validate()?;
            }
            Experiment::Particles => {
                ParticleModel::new(&g, self.particles.jump_cutoff)?;
                let p = &self.particles;
                if p.np == 0 || p.records == 0 {
                    return Err(LevyError::Parameter("particles.np and particles.records must be positive".into()));
                }
                if p.start == ParticleStart::Initial {
                    if self.grid.d != 1 {
                        return Err(LevyError::Unsupported("sampling the initial datum needs d = 1".into()));
                    }
                    if self.initial.is_zero_average() {
                        return Err(LevyError::Parameter(
                            "particles.start = initial needs a probability datum (gaussian or bump)".into(),
                        ));
                    }
                    self.initial.validate()?;
                }
                if p.start == ParticleStart::Gaussian && !(p.variance >= 0.0) {
                    return Err(LevyError::Parameter("particles.variance must be nonnegative".into()));
                }
                check_step_count(dt, self.time.horizon)?;
            }
            Experiment::Coupling => {
                ParticleModel::new(&g, self.particles.jump_cutoff)?;
                let c = &self.coupling;
                if c.pairs == 0 || c.stride == 0 || !(c.eps > 0.0) {
                    return Err(LevyError::Parameter(
                        "coupling.pairs, coupling.stride and coupling.eps must be positive".into(),
                    ));
                }
                check_step_count(dt, self.time.horizon)?;
            }
            Experiment::LyapunovReport => {
                let l = &self.lyapunov;
                if l.radii < 4 || !(l.eps > 0.0 && l.eps < g.drift.alpha()) {
                    return Err(LevyError::Parameter(format!(
                        "lyapunov needs radii >= 4 and 0 < ε < α = {}",
                        g.drift.alpha()
                    )));
                }
                let beta_ok = if levy.has_jumps() { l.beta > 0.0 && l.beta < levy.sigma() } else { l.beta >= 0.0 };
                if !beta_ok {
                    return Err(LevyError::Hypothesis(format!(
                        "the jump tail needs 0 < β < σ = {}, got β = {}",
                        levy.sigma(),
                        l.beta
                    )));
                }
                if l.beta > 1.0 && g.drift.gamma() <= 1.0 {
                    return Err(LevyError::Hypothesis(format!(
                        "β = {} > 1 needs γ > 1, got γ = {}",
                        l.beta,
                        g.drift.gamma()
                    )));
                }
            }
            Experiment::RateOde => {
                let r = &self.rate_ode;
                let ok_h = match r.h {
                    HModel::Constant { c } => c > 0.0,
                    HModel::Power { c, p } => c > 0.0 && p >= 0.0,
                    HModel::InverseLog { c, q } => c > 0.0 && q >= 0.0,
                };
                if !ok_h {
                    return Err(LevyError::Parameter(format!("rate_ode.h needs positive parameters, got {:?}", r.h)));
                }
                if !(r.l > 0.0 && r.theta > 0.0 && r.theta < 1.0 && r.records > 0 && self.time.horizon > 0.0) {
                    return Err(LevyError::Parameter("rate_ode needs L > 0, θ in (0, 1), records > 0 and T > 0".into()));
                }
                if matches!(r.h, HModel::InverseLog { .. }) && r.l <= 1.0 {
                    return Err(LevyError::Parameter("an inverse-log rate needs L > 1".into()));
                }
            }
            Experiment::Stationary => {
                if g.drift.is_time_dependent() {
                    return Err(LevyError::Parameter("the stationary problem needs a time-independent drift".into()));
                }
                let s = &self.stationary;
                if !(s.tol > 0.0 && s.max_time > 0.0 && s.initial_variance > 0.0 && s.xi_max > 0.0 && s.xi_count >= 2) {
                    return Err(LevyError::Parameter("stationary settings must be positive (xi_count >= 2)".into()));
                }
                if !(dt > 0.0 && dt <= 1.0) {
                    return Err(LevyError::Parameter(format!("time.dt must lie in (0, 1], got {dt}")));
                }
            }
        }
        Ok(())
    }

    /// Constraints of a parameter sweep, checked cell by cell.
    pub fn validate_sweep(&self) -> Result<(), LevyError> {
        let s = &self.sweep;
        if s.gamma.is_empty() || s.sigma.is_empty() || s.k.is_empty() || s.kbar.is_empty() {
            return Err(LevyError::Parameter("every sweep axis needs at least one value".into()));
        }
        if self.grid.d != 1 {
            return Err(LevyError::Unsupported("sweeps run in d = 1".into()));
        }
        if !(s.tail_offset > 0.0) {
            return Err(LevyError::Parameter("sweep.tail_offset must be positive".into()));
        }
        for cell in self.sweep_cells() {
            let cfg = self.cell_config(&cell)?;
            cfg.validate()?;
        }
        Ok(())
    }

    pub fn sweep_cells(&self) -> Vec<SweepCell> {
        let s = &self.sweep;
        let mut out = Vec::new();
        for &gamma in &s.gamma {
            for &sigma in &s.sigma {
                for &k in &s.k {
                    for &kbar in &s.kbar {
                        out.push(SweepCell { gamma, sigma, k, kbar });
                    }
                }
            }
        }
        out
    }

    /// Forward-decay configuration of one sweep cell.
    pub fn cell_config(&self, c: &SweepCell) -> Result<Self, LevyError> {
        if !(c.sigma > 0.0 && c.sigma <= 2.0) {
            return Err(LevyError::Parameter(format!("sweep σ must lie in (0, 2], got {}", c.sigma)));
        }
        let mut cfg = self.clone();
        cfg.experiment = Experiment::ForwardDecay;
        cfg.drift.kind = DriftKind::Power;
        cfg.drift.gamma = c.gamma;
        cfg.jumps.kind = if c.sigma == 2.0 { JumpChoice::None } else { JumpChoice::Fractional };
        cfg.jumps.sigma = c.sigma;
        if c.sigma < 2.0 {
            cfg.generator.lambda0 = self.sweep.jump_lambda0;
        }
        cfg.weights = vec![format!("power({})", c.k)];
        cfg.fit.weight = 0;
        cfg.fit.kbar = Some(c.kbar);
        cfg.fit.model = FitModel::Power;
        cfg.initial = InitialDatum::PowerTail {
            exponent: 1.0 + c.kbar + self.sweep.tail_offset,
        };
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub gamma: f64,
    pub sigma: f64,
    pub k: f64,
    pub kbar: f64,
}

fn check_weight(w: &WeightFunction, levy: &LevyMeasureSpec) -> Result<(), LevyError> {
    if !levy.has_jumps() {
        return Ok(());
    }
    match w.power_exponent() {
        Some(k) if k >= levy.sigma() => Err(LevyError::Hypothesis(format!(
            "with jumps the weight exponent must satisfy k < σ; got k = {k}, σ = {}",
            levy.sigma()
        ))),
        Some(_) => Ok(()),
        None => Err(LevyError::Hypothesis(format!(
            "weight {} grows faster than any power, so the jump tail does not integrate it",
            w.label()
        ))),
    }
}

fn check_kbar(k: f64, kbar: f64, gamma: f64, levy: &LevyMeasureSpec) -> Result<(), LevyError> {
    predicted_q(k, kbar, gamma)?;
    if levy.has_jumps() && kbar >= levy.sigma() {
        return Err(LevyError::Hypothesis(format!(
            "with jumps the data weight must satisfy k̄ < σ; got k̄ = {kbar}, σ = {}",
            levy.sigma()
        )));
    }
    Ok(())
}

fn check_step_count(dt: f64, horizon: f64) -> Result<(), LevyError> {
    if !(dt > 0.0 && horizon > 0.0 && dt.is_finite() && horizon.is_finite()) {
        return Err(LevyError::Parameter(format!("need dt > 0 and T > 0, got dt = {dt}, T = {horizon}")));
    }
    Ok(())
}
