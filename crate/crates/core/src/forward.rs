//! Time stepping for the Fokker-Planck equation `m_t + L*[m] - div(b m) = 0`.
//!
//! One step is Strang split: half a step of conservative transport with
//! velocity `-b`, a full diffusion step, and another half step of transport.
//! The diffusion step multiplies Fourier modes by the exact exponential of the
//! constant-coefficient symbol and then sub-cycles the variable `Σ` part
//! explicitly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, LevyError, Result};
use crate::field::{boundary_mass, DensityField};
use crate::norms::weighted_tv_sampled;
use crate::operators::{GeneratorPlan, GeneratorSpec};
use crate::transport::{advance, sigma_diffusion, Orientation, Scratch};
use crate::weight::WeightFunction;

/// Boundary-mass tolerance used when none is configured.
pub const DEFAULT_EPS_BOUNDARY: f64 = 1e-6;

/// Total variation growth treated as a blowup.
const BLOWUP_FACTOR: f64 = 1e6;

/// Reusable stepping state for one generator.
#[derive(Debug, Clone)]
pub struct ForwardStepper {
    plan: GeneratorPlan,
    cached_dt: f64,
    multiplier: Vec<Complex64>,
    /// Face velocities of the transport, cached for autonomous drifts.
    velocity: Option<Vec<f64>>,
    scratch: Scratch,
}

impl ForwardStepper {
    pub fn new(spec: &GeneratorSpec) -> Result<Self> {
        if spec.grid.dim() != 1 {
            return Err(LevyError::Unsupported("the grid solvers are implemented for d = 1".into()));
        }
        let plan = GeneratorPlan::new(spec)?;
        let velocity = (!spec.drift.is_time_dependent()).then(|| velocity(&plan, 0.0));
        Ok(Self {
            plan,
            cached_dt: f64::NAN,
            multiplier: Vec::new(),
            velocity,
            scratch: Scratch::default(),
        })
    }

    pub fn plan(&self) -> &GeneratorPlan {
        &self.plan
    }

    /// Largest stable step at time `t`: each transport half step must respect
    /// the scheme's Courant limit, capped so that `dt max|b| <= dx`.
    pub fn max_dt(&self, t: f64) -> f64 {
        let v = self.velocity_at(t);
        let speed = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if speed == 0.0 {
            f64::INFINITY
        } else {
            let courant = (2.0 * self.plan.spec().transport.courant_limit()).min(1.0);
            courant * self.plan.spec().grid.dx() / speed
        }
    }

    fn velocity_at(&self, t: f64) -> Vec<f64> {
        match &self.velocity {
            Some(v) => v.clone(),
            None => velocity(&self.plan, t),
        }
    }

    fn check_cfl(&self, t: f64, dt: f64) -> Result<()> {
        let max_dt = self.max_dt(t).min(self.max_dt(t + dt));
        if dt > max_dt * (1.0 + 1e-12) {
            return Err(LevyError::Cfl {
                time: t,
                dt,
                max_dt,
                suggested: 0.9 * max_dt,
            });
        }
        Ok(())
    }

    /// Advance node values in place from `t` to `t + dt`.
    pub fn step(&mut self, m: &mut [f64], t: f64, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return param(format!("time step must be positive, got {dt}"));
        }
        self.check_cfl(t, dt)?;
        let dx = self.plan.spec().grid.dx();
        let scheme = self.plan.spec().transport;
        let v = self.velocity_at(t + 0.25 * dt);
        advance(m, &v, dx, 0.5 * dt, scheme, Orientation::Density, &mut self.scratch);
        self.diffuse(m, dt);
        let v = self.velocity_at(t + 0.75 * dt);
        advance(m, &v, dx, 0.5 * dt, scheme, Orientation::Density, &mut self.scratch);
        if let Some(i) = m.iter().position(|x| !x.is_finite()) {
            return Err(LevyError::Blowup {
                time: t + dt,
                detail: format!("non-finite density at node {i}"),
            });
        }
        Ok(())
    }

    fn diffuse(&mut self, m: &mut [f64], dt: f64) {
        if dt != self.cached_dt {
            self.multiplier = self.plan.adjoint_symbol().iter().map(|s| (-dt * s).exp()).collect();
            self.cached_dt = dt;
        }
        let out = self.plan.spectral().apply_symbol(m, &self.multiplier);
        m.copy_from_slice(&out);
        if self.plan.spec().local.is_variable() {
            let dx = self.plan.spec().grid.dx();
            sigma_diffusion(m, self.plan.sigma_sq(), dx, dt, Orientation::Density, &mut self.scratch);
        }
    }
}

/// Transport velocity `-b` at the faces.
fn velocity(plan: &GeneratorPlan, t: f64) -> Vec<f64> {
    plan.face_drift(t).into_iter().map(|b| -b).collect()
}

/// One step of the scheme from `(m, t)`.
pub fn step(m: &DensityField, g: &GeneratorSpec, t: f64, dt: f64) -> Result<DensityField> {
    let mut s = ForwardStepper::new(g)?;
    let mut v = m.values().to_vec();
    s.step(&mut v, t, dt)?;
    DensityField::new(*m.grid(), v, t + dt)
}

/// Time grid and recording choices for a forward run.
#[derive(Debug, Clone)]
pub struct ForwardOptions {
    pub dt: f64,
    pub horizon: f64,
    /// Steps between recorded points.
    pub stride: usize,
    /// Weights whose total variation norms are recorded.
    pub weights: Vec<WeightFunction>,
    /// Boundary mass tolerance relative to the initial total variation.
    pub eps_boundary: f64,
    /// Keep the density at every recorded time.
    pub keep_fields: bool,
}

impl ForwardOptions {
    pub fn new(dt: f64, horizon: f64) -> Self {
        Self {
            dt,
            horizon,
            stride: 100,
            weights: Vec::new(),
            eps_boundary: DEFAULT_EPS_BOUNDARY,
            keep_fields: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return param(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return param(format!("horizon must be nonnegative, got {}", self.horizon));
        }
        if self.stride == 0 {
            return param("recording stride must be at least one step");
        }
        if !(self.eps_boundary > 0.0) {
            return param("boundary tolerance must be positive");
        }
        Ok(())
    }

    /// Step count and the final (possibly shortened) step.
    pub fn steps(&self) -> (usize, f64) {
        time_steps(self.dt, self.horizon)
    }
}

/// Step count covering `[0, horizon]` with steps `dt`; the last step absorbs any remainder.
pub fn time_steps(dt: f64, horizon: f64) -> (usize, f64) {
    if horizon == 0.0 {
        return (0, dt);
    }
    let n = (horizon / dt - 1e-9).ceil().max(1.0) as usize;
    let last = horizon - (n - 1) as f64 * dt;
    (n, last)
}

/// One recorded point of a forward run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub mass: f64,
    pub min_value: f64,
    pub boundary_mass: f64,
    /// Weighted total variation per configured weight.
    pub norms: Vec<f64>,
}

/// A forward problem and, once solved, its recorded trajectory.
#[derive(Debug, Clone)]
pub struct ForwardRun {
    pub spec: GeneratorSpec,
    pub initial: DensityField,
    pub options: ForwardOptions,
    pub series: Vec<SeriesPoint>,
    /// Densities at the recorded times when `keep_fields` is set.
    pub fields: Vec<DensityField>,
    pub final_state: Option<DensityField>,
}

impl ForwardRun {
    pub fn new(spec: GeneratorSpec, initial: DensityField, options: ForwardOptions) -> Result<Self> {
        options.validate()?;
        if *initial.grid() != spec.grid {
            return Err(LevyError::Mismatch("initial density and generator use different grids".into()));
        }
        Ok(Self {
            spec,
            initial,
            options,
            series: Vec::new(),
            fields: Vec::new(),
            final_state: None,
        })
    }

    /// Recorded times.
    pub fn times(&self) -> Vec<f64> {
        self.series.iter().map(|p| p.t).collect()
    }

    /// Recorded norm for the `w`-th configured weight.
    pub fn norm_series(&self, w: usize) -> Vec<f64> {
        self.series.iter().map(|p| p.norms[w]).collect()
    }

    /// Integrate to the horizon and record.
    pub fn solve(mut self) -> Result<Self> {
        let grid = self.spec.grid;
        let mut stepper = ForwardStepper::new(&self.spec)?;
        let phis: Vec<Vec<f64>> = self.options.weights.iter().map(|w| w.sample(&grid)).collect();
        let cell = grid.cell_volume();
        let tv0 = self.initial.total_variation();
        let scale = if tv0 > 0.0 { tv0 } else { 1.0 };
        let eps = self.options.eps_boundary;
        let mut m = self.initial.values().to_vec();
        let record = |m: &[f64], t: f64| SeriesPoint {
            t,
            mass: m.iter().sum::<f64>() * cell,
            min_value: m.iter().copied().fold(f64::INFINITY, f64::min),
            boundary_mass: boundary_mass(&grid, m),
            norms: phis.iter().map(|phi| weighted_tv_sampled(m, phi, cell)).collect(),
        };
        self.series.clear();
        self.fields.clear();
        self.series.push(record(&m, 0.0));
        if self.options.keep_fields {
            self.fields.push(self.initial.clone().with_time(0.0));
        }
        let (n, last) = self.options.steps();
        let mut t = 0.0;
        for k in 0..n {
            let dt = if k + 1 == n { last } else { self.options.dt };
            stepper.step(&mut m, t, dt)?;
            t = if k + 1 == n { self.options.horizon } else { (k + 1) as f64 * self.options.dt };
            let bm = boundary_mass(&grid, &m);
            if bm > eps * scale {
                return Err(LevyError::BoundaryMass {
                    time: t,
                    mass: bm / scale,
                    eps,
                });
            }
            if (k + 1) % self.options.stride == 0 || k + 1 == n {
                let p = record(&m, t);
                let tv = m.iter().map(|x| x.abs()).sum::<f64>() * cell;
                if tv > BLOWUP_FACTOR * scale {
                    return Err(LevyError::Blowup {
                        time: t,
                        detail: format!("total variation grew to {tv:.3e}"),
                    });
                }
                self.series.push(p);
                if self.options.keep_fields {
                    self.fields.push(DensityField::from_parts(grid, m.clone(), t));
                }
            }
        }
        self.final_state = Some(DensityField::from_parts(grid, m, t));
        Ok(self)
    }
}

/// Integrate a run to its horizon.
pub fn solve(run: ForwardRun) -> Result<ForwardRun> {
    run.solve()
}

/// Controls for [`stationary_solve`].
#[derive(Debug, Clone, Copy)]
pub struct StationaryOptions {
    pub dt: f64,
    /// Give up after this much simulated time.
    pub max_time: f64,
    /// Stop once one time unit changes the density by less than this in total variation.
    pub tol: f64,
    /// Variance of the centered Gaussian start.
    pub initial_variance: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            max_time: 200.0,
            tol: 1e-8,
            initial_variance: 1.0,
        }
    }
}

/// Long-time limit of the forward flow from a centered Gaussian, normalized to unit mass.
pub fn stationary_solve(g: &GeneratorSpec, opts: &StationaryOptions) -> Result<DensityField> {
    if g.drift.is_time_dependent() {
        return param("the stationary problem needs a time-independent drift");
    }
    let grid = g.grid;
    let mut stepper = ForwardStepper::new(g)?;
    let var = opts.initial_variance;
    let start = DensityField::from_fn(grid, |x| (-x * x / (2.0 * var)).exp()).normalized()?;
    let mut m = start.into_values();
    let per_unit = (1.0 / opts.dt).round().max(1.0) as usize;
    let dt = 1.0 / per_unit as f64;
    let cell = grid.cell_volume();
    let mut t = 0.0;
    let mut residual = f64::INFINITY;
    while t < opts.max_time {
        let before = m.clone();
        for _ in 0..per_unit {
            stepper.step(&mut m, t, dt)?;
            t += dt;
        }
        residual = m.iter().zip(&before).map(|(a, b)| (a - b).abs()).sum::<f64>() * cell;
        if residual < opts.tol {
            return DensityField::from_parts(grid, m, t).normalized();
        }
    }
    Err(LevyError::NoConvergence { time: t, residual })
}
