//! The generator `L^b = L0 - I + b·D` and its formal adjoint on grid fields.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::diffusion::LocalDiffusionSpec;
use crate::drift::DriftSpec;
use crate::error::{param, LevyError, Result};
use crate::field::{DensityField, ScalarField};
use crate::grid::Grid;
use crate::interp::{HermiteInterpolant, PointFunction};
use crate::levy::{levy_integral, JumpIntegral, LevyMeasureSpec, QuadratureOptions, TailModel};
use crate::spectral::Spectral;
use crate::transport::{faces, upwind2_density_rate, upwind2_transpose, TransportScheme};

/// Local diffusion, jump measure and drift on a grid.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub grid: Grid,
    pub local: LocalDiffusionSpec,
    pub levy: LevyMeasureSpec,
    pub drift: DriftSpec,
    /// Drift discretization used by the time steppers.
    pub transport: TransportScheme,
}

impl GeneratorSpec {
    pub fn new(grid: Grid, local: LocalDiffusionSpec, levy: LevyMeasureSpec, drift: DriftSpec) -> Result<Self> {
        let g = Self {
            grid,
            local,
            levy,
            drift,
            transport: TransportScheme::Upwind,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_transport(mut self, scheme: TransportScheme) -> Self {
        self.transport = scheme;
        self
    }

    /// Component checks plus nondegeneracy `λ0 + λ > 0`.
    pub fn validate(&self) -> Result<()> {
        self.local.validate()?;
        self.drift.validate()?;
        let (lower, _) = self.levy.bounds(self.grid.dim());
        if !(self.local.lambda0 + lower > 0.0) {
            return param(format!(
                "nondegeneracy λ0 + λ > 0 fails (λ0 = {}, λ = {lower})",
                self.local.lambda0
            ));
        }
        Ok(())
    }

    /// Default jump quadrature on this grid: `r_min = dx/4`, `z_max = 8L`.
    pub fn default_quadrature(&self) -> QuadratureOptions {
        grid_quadrature(&self.grid)
    }

    fn require_line(&self, what: &str) -> Result<()> {
        if self.grid.dim() != 1 {
            return Err(LevyError::Unsupported(format!("{what} is implemented for d = 1")));
        }
        Ok(())
    }
}

fn grid_quadrature(grid: &Grid) -> QuadratureOptions {
    QuadratureOptions {
        r_min: grid.dx() / 4.0,
        z_max: 8.0 * grid.half_width(),
        reflected: false,
        order: 6,
    }
}

/// Multiply every Fourier mode by `|ξ|^σ`; `σ = 2` is the spectral `-Δ`.
pub fn apply_fractional_diffusion(u: &ScalarField, sigma: f64) -> Result<ScalarField> {
    if !(sigma > 0.0 && sigma <= 2.0) {
        return param(format!("fractional order must lie in (0, 2], got {sigma}"));
    }
    let n = u.grid().n();
    if !n.is_power_of_two() {
        return param(format!("points per axis must be a power of two, got {n}"));
    }
    let s = Spectral::new(*u.grid());
    let v = s.apply_radial(u.values(), |k| k.powf(sigma));
    Ok(ScalarField::from_parts(*u.grid(), v, u.time()))
}

/// Compensated jump integral `I(x, [u])` with the default grid quadrature.
pub fn apply_levy_quadrature(u: &ScalarField, x: f64, nu: &LevyMeasureSpec) -> Result<f64> {
    let opts = grid_quadrature(u.grid());
    Ok(apply_levy_quadrature_with(u, x, nu, &opts)?.value)
}

/// Compensated jump integral with explicit options; reports the truncated tail mass.
///
/// Off-node values come from the periodic Hermite interpolant of the field; the
/// integrand beyond `z_max` is replaced by the periodic mean.
pub fn apply_levy_quadrature_with(
    u: &ScalarField,
    x: f64,
    nu: &LevyMeasureSpec,
    opts: &QuadratureOptions,
) -> Result<JumpIntegral> {
    if u.grid().dim() != 1 {
        return Err(LevyError::Unsupported("jump quadrature is implemented for d = 1".into()));
    }
    if nu.has_jumps() && nu.sigma() >= 2.0 {
        return param("stability index must be below 2");
    }
    let s = Spectral::new(*u.grid());
    let it = HermiteInterpolant::new(u, &s);
    levy_integral(&it, x, nu, opts, TailModel::Constant(it.mean()))
}

/// Jump integral at every node, evaluated in parallel.
pub fn levy_quadrature_field(u: &ScalarField, nu: &LevyMeasureSpec, opts: &QuadratureOptions) -> Result<Vec<f64>> {
    let grid = *u.grid();
    let s = Spectral::new(grid);
    let it = HermiteInterpolant::new(u, &s);
    let mean = it.mean();
    (0..grid.n())
        .into_par_iter()
        .map(|i| levy_integral(&it, grid.coord(i as isize), nu, opts, TailModel::Constant(mean)).map(|j| j.value))
        .collect()
}

/// Precomputed symbols and coefficient samples shared by operators and solvers.
#[derive(Debug, Clone)]
pub struct GeneratorPlan {
    spec: GeneratorSpec,
    spectral: Spectral,
    /// Fourier symbol of `L0 - I` restricted to `λ0` and jumps.
    symbol: Vec<Complex64>,
    /// Same for the adjoint `L0* - I*`.
    adjoint_symbol: Vec<Complex64>,
    xs: Vec<f64>,
    faces: Vec<f64>,
    sigma_sq: Vec<f64>,
}

impl GeneratorPlan {
    pub fn new(spec: &GeneratorSpec) -> Result<Self> {
        spec.validate()?;
        let grid = spec.grid;
        let spectral = Spectral::new(grid);
        let norms = spectral.xi_norms();
        let lambda0 = spec.local.lambda0;
        let local: Vec<Complex64> = norms.iter().map(|k| Complex64::new(lambda0 * k * k, 0.0)).collect();
        let (symbol, adjoint_symbol) = if !spec.levy.has_jumps() {
            (local.clone(), local)
        } else if spec.levy.is_fractional() {
            let c = spec.levy.intensity();
            let sigma = spec.levy.sigma();
            let s: Vec<Complex64> = norms
                .iter()
                .zip(&local)
                .map(|(k, l)| l + c * k.powf(sigma))
                .collect();
            (s.clone(), s)
        } else {
            spec.require_line("quadrature jump kernels")?;
            let fwd = circulant_symbol(spec, &spectral, false)?;
            let adj = if spec.levy.is_symmetric() {
                fwd.clone()
            } else {
                circulant_symbol(spec, &spectral, true)?
            };
            let add = |j: Vec<Complex64>| local.iter().zip(j).map(|(l, c)| l + c).collect::<Vec<_>>();
            (add(fwd), add(adj))
        };
        let xs = grid.coords();
        let sigma_sq = xs.iter().map(|&x| spec.local.sigma_sq(x)).collect();
        let faces = faces(&xs, grid.dx());
        Ok(Self {
            spec: spec.clone(),
            spectral,
            symbol,
            adjoint_symbol,
            xs,
            faces,
            sigma_sq,
        })
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    /// Symbol of the diffusive part acting on test functions.
    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    /// Symbol of the diffusive part acting on densities.
    pub fn adjoint_symbol(&self) -> &[Complex64] {
        &self.adjoint_symbol
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    /// `Σ(x_i)^2` at the nodes.
    pub fn sigma_sq(&self) -> &[f64] {
        &self.sigma_sq
    }

    /// Drift at the cell faces at time `t`; the seam face is zeroed.
    pub fn face_drift(&self, t: f64) -> Vec<f64> {
        let mut b = self.spec.drift.sample(t, &self.faces);
        if let Some(last) = b.last_mut() {
            *last = 0.0;
        }
        b
    }

    /// `L^b u` at time `t`.
    pub fn apply(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        self.spec.require_line("the full generator")?;
        let mut out = self.spectral.apply_symbol(u, &self.symbol);
        let n = u.len();
        let dx = self.spec.grid.dx();
        if self.spec.local.is_variable() {
            for i in 0..n {
                let (im, ip) = neighbours(i, n);
                out[i] -= self.sigma_sq[i] * (u[ip] - 2.0 * u[i] + u[im]) / (dx * dx);
            }
        }
        let v: Vec<f64> = self.face_drift(t).into_iter().map(|b| -b).collect();
        let mut adv = vec![0.0; n];
        upwind2_transpose(u, &v, dx, &mut adv);
        for (o, a) in out.iter_mut().zip(adv) {
            *o -= a;
        }
        Ok(out)
    }

    /// `L* m - div(b m)` at time `t`.
    pub fn apply_adjoint(&self, m: &[f64], t: f64) -> Result<Vec<f64>> {
        self.spec.require_line("the full adjoint generator")?;
        let mut out = self.spectral.apply_symbol(m, &self.adjoint_symbol);
        let n = m.len();
        let dx = self.spec.grid.dx();
        if self.spec.local.is_variable() {
            let s = &self.sigma_sq;
            for i in 0..n {
                let (im, ip) = neighbours(i, n);
                out[i] -= (s[ip] * m[ip] - 2.0 * s[i] * m[i] + s[im] * m[im]) / (dx * dx);
            }
        }
        let v: Vec<f64> = self.face_drift(t).into_iter().map(|b| -b).collect();
        let mut flux = vec![0.0; n];
        upwind2_density_rate(m, &v, dx, &mut flux);
        // density_rate returns (b m)_x; the operator carries -div(b m)
        for (o, f) in out.iter_mut().zip(flux) {
            *o -= f;
        }
        Ok(out)
    }
}

#[inline]
fn neighbours(i: usize, n: usize) -> (usize, usize) {
    (if i == 0 { n - 1 } else { i - 1 }, if i + 1 == n { 0 } else { i + 1 })
}

/// Symbol `-Î` of the jump operator from its action on a unit impulse.
fn circulant_symbol(spec: &GeneratorSpec, spectral: &Spectral, reflected: bool) -> Result<Vec<Complex64>> {
    let grid = spec.grid;
    let mut impulse = vec![0.0; grid.n()];
    impulse[0] = 1.0;
    let field = ScalarField::from_parts(grid, impulse, 0.0);
    let mut opts = grid_quadrature(&grid);
    opts.reflected = reflected;
    let response = levy_quadrature_field(&field, &spec.levy, &opts)?;
    let hat = spectral.forward(&response);
    let mut symbol: Vec<Complex64> = hat.into_iter().map(|c| -c).collect();
    symbol[0] = Complex64::new(0.0, 0.0);
    for s in symbol.iter_mut() {
        s.re = s.re.max(0.0);
    }
    Ok(symbol)
}

/// `L^b u` on the grid: spectral local and jump parts, second-order upwind drift.
///
/// The drift term is the transpose of the finite-volume flux used for densities,
/// so [`apply_generator`] and [`apply_adjoint_generator`] are exact discrete adjoints.
pub fn apply_generator(u: &ScalarField, g: &GeneratorSpec, t: f64) -> Result<ScalarField> {
    check_grid(u.grid(), g)?;
    let plan = GeneratorPlan::new(g)?;
    Ok(ScalarField::from_parts(g.grid, plan.apply(u.values(), t)?, t))
}

/// `L* m - div(b m)` on the grid.
pub fn apply_adjoint_generator(m: &DensityField, g: &GeneratorSpec, t: f64) -> Result<DensityField> {
    check_grid(m.grid(), g)?;
    let plan = GeneratorPlan::new(g)?;
    Ok(DensityField::from_parts(g.grid, plan.apply_adjoint(m.values(), t)?, t))
}

fn check_grid(grid: &Grid, g: &GeneratorSpec) -> Result<()> {
    if *grid != g.grid {
        return Err(LevyError::Mismatch("field grid differs from the generator grid".into()));
    }
    Ok(())
}

/// Options for pointwise evaluation on the whole line.
pub fn line_quadrature(x: f64) -> QuadratureOptions {
    QuadratureOptions {
        r_min: 1e-4,
        z_max: 1e6 * (1.0 + x.abs()),
        reflected: false,
        order: 8,
    }
}

/// `L^b f(x)` for a smooth function on the whole line (no truncation box).
pub fn generator_at<F: PointFunction + ?Sized>(
    f: &F,
    g: &GeneratorSpec,
    t: f64,
    x: f64,
    tail: TailModel,
) -> Result<f64> {
    let local = -(g.local.lambda0 + g.local.sigma_sq(x)) * f.d2(x);
    let jump = if g.levy.has_jumps() {
        levy_integral(f, x, &g.levy, &line_quadrature(x), tail)?.value
    } else {
        0.0
    };
    Ok(local - jump + g.drift.eval(t, x) * f.d1(x))
}
