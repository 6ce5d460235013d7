//! The backward problem `-φ_t + L^b[φ] = f`, `φ(t) = ξ`, its oscillation decay
//! and the duality identity with the forward flow.
//!
//! With `v(s) = φ(t - s)` the problem runs forward in `s` as
//! `v_s = -L v - b·Dv + f`. A step is `D(ds/2) T(ds) D(ds/2)`: exact diffusion
//! half steps around one explicit transport step that also carries the source.
//! Pairing this ordering with the forward `T D T` splitting leaves a residual
//! that is first order in the step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, LevyError, Result};
use crate::field::{DensityField, ScalarField};
use crate::forward::{time_steps, ForwardRun};
use crate::norms::weighted_seminorm;
use crate::operators::{GeneratorPlan, GeneratorSpec};
use crate::transport::{advance, sigma_diffusion, Orientation, Scratch};
use crate::weight::WeightFunction;

/// Reusable stepping state for the backward problem.
#[derive(Debug, Clone)]
pub struct AdjointStepper {
    plan: GeneratorPlan,
    cached_dt: f64,
    half_multiplier: Vec<Complex64>,
    drift: Option<Vec<f64>>,
    scratch: Scratch,
}

impl AdjointStepper {
    pub fn new(spec: &GeneratorSpec) -> Result<Self> {
        if spec.grid.dim() != 1 {
            return Err(LevyError::Unsupported("the grid solvers are implemented for d = 1".into()));
        }
        let plan = GeneratorPlan::new(spec)?;
        let drift = (!spec.drift.is_time_dependent()).then(|| plan.face_drift(0.0));
        Ok(Self {
            plan,
            cached_dt: f64::NAN,
            half_multiplier: Vec::new(),
            drift,
            scratch: Scratch::default(),
        })
    }

    fn drift_at(&self, t: f64) -> Vec<f64> {
        match &self.drift {
            Some(b) => b.clone(),
            None => self.plan.face_drift(t),
        }
    }

    /// Largest stable step for the transport at physical time `t`.
    pub fn max_dt(&self, t: f64) -> f64 {
        let speed = self.drift_at(t).iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if speed == 0.0 {
            f64::INFINITY
        } else {
            self.plan.spec().transport.courant_limit() * self.plan.spec().grid.dx() / speed
        }
    }

    /// Advance `v` from `s` to `s + ds`, where `tau = t - s` is the physical time at `s`.
    pub fn step(&mut self, v: &mut [f64], tau: f64, ds: f64, source: Option<&[f64]>) -> Result<()> {
        if !(ds > 0.0 && ds.is_finite()) {
            return param(format!("time step must be positive, got {ds}"));
        }
        let mid = tau - 0.5 * ds;
        let max_dt = self.max_dt(mid);
        if ds > max_dt * (1.0 + 1e-12) {
            return Err(LevyError::Cfl {
                time: tau,
                dt: ds,
                max_dt,
                suggested: 0.9 * max_dt,
            });
        }
        self.diffuse(v, ds);
        let b = self.drift_at(mid);
        let dx = self.plan.spec().grid.dx();
        let scheme = self.plan.spec().transport;
        advance(v, &b, dx, ds, scheme, Orientation::Adjoint, &mut self.scratch);
        if let Some(f) = source {
            for (x, y) in v.iter_mut().zip(f) {
                *x += ds * y;
            }
        }
        self.diffuse(v, ds);
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(LevyError::Blowup {
                time: tau - ds,
                detail: format!("non-finite value at node {i}"),
            });
        }
        Ok(())
    }

    /// Half a diffusion step for a full step `ds`.
    fn diffuse(&mut self, v: &mut [f64], ds: f64) {
        if ds != self.cached_dt {
            self.half_multiplier = self.plan.symbol().iter().map(|s| (-0.5 * ds * s).exp()).collect();
            self.cached_dt = ds;
        }
        let out = self.plan.spectral().apply_symbol(v, &self.half_multiplier);
        v.copy_from_slice(&out);
        if self.plan.spec().local.is_variable() {
            let dx = self.plan.spec().grid.dx();
            sigma_diffusion(v, self.plan.sigma_sq(), dx, 0.5 * ds, Orientation::Adjoint, &mut self.scratch);
        }
    }
}

/// Time grid for a backward run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjointOptions {
    pub dt: f64,
    /// Terminal time `t`.
    pub horizon: f64,
    /// Steps between recorded points.
    pub stride: usize,
}

impl AdjointOptions {
    pub fn new(dt: f64, horizon: f64) -> Self {
        Self { dt, horizon, stride: 100 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return param(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return param(format!("terminal time must be nonnegative, got {}", self.horizon));
        }
        if self.stride == 0 {
            return param("recording stride must be at least one step");
        }
        Ok(())
    }

    /// Step sizes in `s`: the forward time grid traversed backwards.
    pub fn step_sizes(&self) -> Vec<f64> {
        let (n, last) = time_steps(self.dt, self.horizon);
        let mut steps = vec![self.dt; n];
        if let Some(l) = steps.last_mut() {
            *l = last;
        }
        steps.reverse();
        steps
    }
}

/// A solved backward problem.
#[derive(Debug, Clone)]
pub struct AdjointRun {
    pub spec: GeneratorSpec,
    pub terminal: ScalarField,
    pub source: Option<ScalarField>,
    pub options: AdjointOptions,
    /// Elapsed backward time `s` of each recorded field.
    pub s: Vec<f64>,
    /// `u(t - s)`, time-stamped with the physical time `t - s`.
    pub fields: Vec<ScalarField>,
}

impl AdjointRun {
    /// `u(0) = v(t)`.
    pub fn initial_value(&self) -> &ScalarField {
        self.fields.last().expect("a solved run records its final field")
    }
}

/// Solve the backward problem from `ξ` at time `t = opts.horizon` down to 0.
pub fn solve_backward(
    xi: &ScalarField,
    f: Option<&ScalarField>,
    g: &GeneratorSpec,
    opts: &AdjointOptions,
) -> Result<AdjointRun> {
    opts.validate()?;
    if *xi.grid() != g.grid || f.is_some_and(|f| *f.grid() != g.grid) {
        return Err(LevyError::Mismatch("data and generator use different grids".into()));
    }
    let mut stepper = AdjointStepper::new(g)?;
    let grid = g.grid;
    let t = opts.horizon;
    let mut v = xi.values().to_vec();
    let mut s_rec = vec![0.0];
    let mut fields = vec![ScalarField::from_parts(grid, v.clone(), t)];
    let steps = opts.step_sizes();
    let n = steps.len();
    let mut s = 0.0;
    for (k, ds) in steps.into_iter().enumerate() {
        stepper.step(&mut v, t - s, ds, f.map(|f| f.values()))?;
        s = if k + 1 == n { t } else { s + ds };
        if (k + 1) % opts.stride == 0 || k + 1 == n {
            s_rec.push(s);
            fields.push(ScalarField::from_parts(grid, v.clone(), t - s));
        }
    }
    Ok(AdjointRun {
        spec: g.clone(),
        terminal: xi.clone(),
        source: f.cloned(),
        options: *opts,
        s: s_rec,
        fields,
    })
}

/// `[u(t - s)]_w` at every recorded `s`.
pub fn oscillation_trace(run: &AdjointRun, w: &WeightFunction) -> Vec<(f64, f64)> {
    run.s
        .iter()
        .zip(&run.fields)
        .map(|(s, u)| (*s, weighted_seminorm(u, w)))
        .collect()
}

/// Both sides of the duality identity and their normalized gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// `|lhs - rhs| / scale`.
    pub residual: f64,
    /// `∫ ξ dm(t) + ∫∫ f dm`.
    pub lhs: f64,
    /// `∫ φ(0) dm0`.
    pub rhs: f64,
    /// `‖ξ‖_∞ ‖m0‖_TV + ∫∫ |f| |m|`.
    pub scale: f64,
    pub dt: f64,
    pub n: usize,
}

/// Check `∫ ξ dm(t) + ∫_0^t ∫ f dm dτ = ∫ φ(0) dm0` for a solved forward run.
///
/// The source term uses the trapezoidal rule on the recorded densities, so a
/// nonzero `f` requires a run that kept its fields.
pub fn duality_residual(fw: &ForwardRun, xi: &ScalarField, f: Option<&ScalarField>) -> Result<DualityReport> {
    let m_t = fw
        .final_state
        .as_ref()
        .ok_or_else(|| LevyError::Mismatch("the forward run has not been solved".into()))?;
    if *xi.grid() != fw.spec.grid {
        return Err(LevyError::Mismatch("terminal datum and forward run use different grids".into()));
    }
    let mut source_term = 0.0;
    let mut source_scale = 0.0;
    if let Some(f) = f {
        if fw.fields.len() < 2 {
            return Err(LevyError::Mismatch(
                "a source term needs the forward densities at the recorded times".into(),
            ));
        }
        let abs_f = f.map(f64::abs);
        for w in fw.fields.windows(2) {
            let h = w[1].time() - w[0].time();
            source_term += 0.5 * h * (f.pairing(&w[0])? + f.pairing(&w[1])?);
            source_scale += 0.5 * h * (abs_f.pairing(&abs(&w[0]))? + abs_f.pairing(&abs(&w[1]))?);
        }
    }
    let opts = AdjointOptions {
        dt: fw.options.dt,
        horizon: fw.options.horizon,
        stride: usize::MAX,
    };
    let back = solve_backward(xi, f, &fw.spec, &opts)?;
    let lhs = xi.pairing(m_t)? + source_term;
    let rhs = back.initial_value().pairing(&fw.initial)?;
    let scale = xi.max_abs() * fw.initial.total_variation() + source_scale;
    let scale = if scale > 0.0 { scale } else { 1.0 };
    Ok(DualityReport {
        residual: (lhs - rhs).abs() / scale,
        lhs,
        rhs,
        scale,
        dt: fw.options.dt,
        n: fw.spec.grid.n(),
    })
}

fn abs(m: &DensityField) -> DensityField {
    m.map(f64::abs)
}
