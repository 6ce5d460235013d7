//! Lévy measures with densities comparable to `|z|^{-d-sigma}` and the
//! compensated jump integral.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::error::{param, LevyError, Result};
use crate::interp::PointFunction;
use crate::quadrature::GaussRule;

/// Normalization making the symbol of `c (-Δ)^{σ/2}` equal `c |ξ|^σ`:
/// `σ 2^{σ-1} Γ((d+σ)/2) / (π^{d/2} Γ(1-σ/2))`.
pub fn fractional_constant(d: usize, sigma: f64) -> f64 {
    let df = d as f64;
    sigma * 2f64.powf(sigma - 1.0) * gamma((df + sigma) / 2.0)
        / (PI.powf(df / 2.0) * gamma(1.0 - sigma / 2.0))
}

/// Caller-supplied 1-D jump density `z -> rho(z)` with declared bounds.
#[derive(Clone)]
pub struct CustomKernel {
    label: String,
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel").field("label", &self.label).finish()
    }
}

#[derive(Debug, Clone)]
pub enum LevyKind {
    None,
    /// `rho = c C_{d,σ} |z|^{-d-σ}`.
    Fractional,
    /// `rho = c C_{d,σ} e^{-|z|} |z|^{-d-σ}`.
    Tempered,
    /// Arbitrary density; `lower`/`upper` are the declared `λ`, `Λ`.
    Custom {
        kernel: CustomKernel,
        lower: f64,
        upper: f64,
    },
}

/// Jump measure `ν(dz) = rho(z) dz`.
#[derive(Debug, Clone)]
pub struct LevyMeasureSpec {
    kind: LevyKind,
    sigma: f64,
    intensity: f64,
    /// `intensity * C_{1,σ}`, cached for density evaluation.
    scale: f64,
}

impl LevyMeasureSpec {
    pub fn none() -> Self {
        Self {
            kind: LevyKind::None,
            sigma: 1.0,
            intensity: 0.0,
            scale: 0.0,
        }
    }

    fn checked(kind: LevyKind, sigma: f64, intensity: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 2.0) {
            return param(format!("stability index must lie in (0, 2), got {sigma}"));
        }
        if !(intensity.is_finite() && intensity > 0.0) {
            return param(format!("jump intensity must be positive, got {intensity}"));
        }
        Ok(Self {
            kind,
            sigma,
            intensity,
            scale: intensity * fractional_constant(1, sigma),
        })
    }

    /// `intensity * (-Δ)^{σ/2}`.
    pub fn fractional(sigma: f64, intensity: f64) -> Result<Self> {
        Self::checked(LevyKind::Fractional, sigma, intensity)
    }

    /// Fractional kernel damped by `e^{-|z|}`.
    pub fn tempered(sigma: f64, intensity: f64) -> Result<Self> {
        Self::checked(LevyKind::Tempered, sigma, intensity)
    }

    /// Custom 1-D density with declared bounds `lower/|z|^{1+σ} <= rho <= upper/|z|^{1+σ}`.
    pub fn custom(
        label: impl Into<String>,
        sigma: f64,
        lower: f64,
        upper: f64,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(lower >= 0.0 && upper >= lower && upper > 0.0) {
            return param(format!("density bounds need 0 <= λ <= Λ, Λ > 0, got ({lower}, {upper})"));
        }
        let kernel = CustomKernel {
            label: label.into(),
            density: Arc::new(density),
        };
        Self::checked(LevyKind::Custom { kernel, lower, upper }, sigma, 1.0)
    }

    pub fn kind(&self) -> &LevyKind {
        &self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn has_jumps(&self) -> bool {
        !matches!(self.kind, LevyKind::None)
    }

    pub fn is_fractional(&self) -> bool {
        matches!(self.kind, LevyKind::Fractional)
    }

    /// Builtins are even in `z`.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self.kind, LevyKind::Custom { .. })
    }

    /// Bounds `(λ, Λ)` with `λ/|z|^{d+σ} <= rho(z) <= Λ/|z|^{d+σ}` on all of `ℝ^d`.
    pub fn bounds(&self, d: usize) -> (f64, f64) {
        match &self.kind {
            LevyKind::None => (0.0, 0.0),
            LevyKind::Fractional => {
                let c = self.intensity * fractional_constant(d, self.sigma);
                (c, c)
            }
            LevyKind::Tempered => (0.0, self.intensity * fractional_constant(d, self.sigma)),
            LevyKind::Custom { lower, upper, .. } => (*lower, *upper),
        }
    }

    /// 1-D density `rho(z)`; the reflected measure uses `rho(-z)`.
    #[inline]
    pub fn density(&self, z: f64, reflected: bool) -> f64 {
        let z = if reflected { -z } else { z };
        let a = z.abs();
        match &self.kind {
            LevyKind::None => 0.0,
            LevyKind::Fractional => self.scale * a.powf(-1.0 - self.sigma),
            LevyKind::Tempered => self.scale * (-a).exp() * a.powf(-1.0 - self.sigma),
            LevyKind::Custom { kernel, .. } => (kernel.density)(z),
        }
    }

    /// `g(z) = rho(z) |z|^{1+σ}`, the bounded profile of the density.
    #[inline]
    fn profile(&self, z: f64, reflected: bool) -> f64 {
        match &self.kind {
            LevyKind::Fractional => self.scale,
            LevyKind::Tempered => self.scale * (-z.abs()).exp(),
            _ => self.density(z, reflected) * z.abs().powf(1.0 + self.sigma),
        }
    }

    /// `∫_{0<|z|<r} z^2 rho(z) dz`, via the substitution `w = |z|^{2-σ}`.
    pub fn small_jump_moment(&self, r: f64, reflected: bool) -> f64 {
        if !self.has_jumps() {
            return 0.0;
        }
        let e = 2.0 - self.sigma;
        let rule = GaussRule::new(12);
        let top = r.powf(e);
        let side = |s: f64| {
            rule.integrate(0.0, top, |w| self.profile(s * w.powf(1.0 / e), reflected)) / e
        };
        side(1.0) + side(-1.0)
    }

    /// `∫_{|z|>z} rho`, from the profile frozen at the cutoff.
    pub fn tail_mass(&self, z: f64, reflected: bool) -> f64 {
        if !self.has_jumps() {
            return 0.0;
        }
        let (cp, cm) = self.tail_constants(z, reflected);
        (cp + cm) * z.powf(-self.sigma) / self.sigma
    }

    /// Profile values `(g(z), g(-z))` used for the far-field asymptotics.
    fn tail_constants(&self, z: f64, reflected: bool) -> (f64, f64) {
        (self.profile(z, reflected), self.profile(-z, reflected))
    }
}

/// How the integrand is continued beyond the truncation radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    /// `u(x+z)` replaced by a constant (the periodic mean, or 0 for decaying data).
    Constant(f64),
    /// `u(y) ~ |y|^k` at infinity, `k < σ`.
    PowerGrowth(f64),
}

/// Truncation and resolution controls for the jump integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Radius below which the second-order Taylor term is integrated analytically.
    pub r_min: f64,
    /// Truncation radius of the explicit quadrature.
    pub z_max: f64,
    /// Use `ν*(B) = ν(-B)`.
    pub reflected: bool,
    /// Gauss points per panel.
    pub order: usize,
}

/// Jump integral together with the mass of the truncated tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpIntegral {
    pub value: f64,
    pub tail_mass: f64,
}

/// Compensated integral `∫ [u(x+z) - u(x) - u'(x) z 1_{|z|<=1}] ν(dz)`.
///
/// Panels: dyadic shells `r_min 2^m`, the compensation radius 1, and every
/// breakpoint of a piecewise interpolant, up to `z_max`. Below `r_min` the
/// integrand is replaced by `u''(x) z^2 / 2`; beyond `z_max` by the tail model.
pub fn levy_integral<F: PointFunction + ?Sized>(
    u: &F,
    x: f64,
    nu: &LevyMeasureSpec,
    opts: &QuadratureOptions,
    tail: TailModel,
) -> Result<JumpIntegral> {
    if !nu.has_jumps() {
        return Ok(JumpIntegral {
            value: 0.0,
            tail_mass: 0.0,
        });
    }
    if !(nu.sigma > 0.0 && nu.sigma < 2.0) {
        return param(format!("stability index must lie in (0, 2), got {}", nu.sigma));
    }
    if !(opts.r_min > 0.0 && opts.r_min.is_finite()) {
        return param(format!("r_min must be positive, got {}", opts.r_min));
    }
    if !(opts.z_max > opts.r_min) {
        return param(format!("z_max = {} must exceed r_min = {}", opts.z_max, opts.r_min));
    }
    let rule = GaussRule::new(opts.order.max(2));
    let u0 = u.value(x);
    let du = u.d1(x);
    let mut total = 0.5 * u.d2(x) * nu.small_jump_moment(opts.r_min, opts.reflected);
    let mut edges = Vec::new();
    for side in [1.0f64, -1.0] {
        panel_edges(u, x, side, opts, &mut edges);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let comp = if b <= 1.0 + 1e-15 { du * side } else { 0.0 };
            total += rule.integrate(a, b, |r| {
                let z = side * r;
                (u.value(x + z) - u0 - comp * r) * nu.density(z, opts.reflected)
            });
        }
    }
    let tail_mass = nu.tail_mass(opts.z_max, opts.reflected);
    total += match tail {
        TailModel::Constant(c) => (c - u0) * tail_mass,
        TailModel::PowerGrowth(k) => {
            if k >= nu.sigma {
                return Err(LevyError::Hypothesis(format!(
                    "growth exponent {k} must be below the stability index {}",
                    nu.sigma
                )));
            }
            let s = nu.sigma;
            let z = opts.z_max;
            let (cp, cm) = nu.tail_constants(z, opts.reflected);
            let even = (cp + cm) * (z.powf(k - s) / (s - k) - u0 * z.powf(-s) / s);
            let odd = (cp - cm) * k * x * z.powf(k - 1.0 - s) / (1.0 + s - k);
            even + odd
        }
    };
    Ok(JumpIntegral {
        value: total,
        tail_mass,
    })
}

/// Sorted panel edges in `|z|` for one side of the integral.
fn panel_edges<F: PointFunction + ?Sized>(u: &F, x: f64, side: f64, opts: &QuadratureOptions, edges: &mut Vec<f64>) {
    edges.clear();
    let (lo, hi) = (opts.r_min, opts.z_max);
    edges.push(lo);
    edges.push(hi);
    if lo < 1.0 && hi > 1.0 {
        edges.push(1.0);
    }
    let mut r = lo;
    match u.cells() {
        Some((x0, h)) => {
            while r < hi {
                edges.push(r);
                r *= 2.0;
            }
            // nodes x0 + k h at distance side * (x0 + k h - x)
            let s = (x - x0) / h;
            let (kmin, kmax) = if side > 0.0 {
                ((s + lo / h).floor() as i64, (s + hi / h).ceil() as i64)
            } else {
                ((s - hi / h).floor() as i64, (s - lo / h).ceil() as i64)
            };
            for k in kmin..=kmax {
                let d = side * (x0 + k as f64 * h - x);
                if d > lo && d < hi {
                    edges.push(d);
                }
            }
        }
        None => {
            // dyadic shells split into four geometric panels
            let q = 2f64.powf(0.25);
            while r < hi {
                edges.push(r);
                r *= q;
            }
        }
    }
    edges.sort_by(|a, b| a.total_cmp(b));
    let tol = 1e-13 * hi;
    edges.dedup_by(|a, b| (*a - *b).abs() <= tol.max(1e-15 * lo));
    edges.retain(|&e| e >= lo && e <= hi);
}

/// `∫_{B⁻} |e·z|^2 |z|^{-d-σ} dz` over the half ball `{|z| < min(1, r/2), e·z < 0}`.
pub fn half_ball_moment(d: usize, sigma: f64, r: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 2.0) {
        return param(format!("stability index must lie in (0, 2), got {sigma}"));
    }
    if !(r > 0.0) {
        return param(format!("radius must be positive, got {r}"));
    }
    let a = (r / 2.0).min(1.0);
    let rule = GaussRule::new(16);
    let e = 2.0 - sigma;
    // radial part ∫_0^a ρ^{d+1-d-σ} dρ through w = ρ^{2-σ}
    let radial = rule.integrate(0.0, a.powf(e), |_| 1.0) / e;
    let angular = match d {
        1 => 1.0,
        2 => rule.integrate(PI / 2.0, 3.0 * PI / 2.0, |t| t.cos().powi(2)),
        _ => return Err(LevyError::Unsupported(format!("half-ball moment in dimension {d}"))),
    };
    Ok(radial * angular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::Analytic;

    #[test]
    fn constant_at_sigma_one_is_cauchy() {
        assert!((fractional_constant(1, 1.0) - 1.0 / PI).abs() < 1e-14);
        // d = 2, σ = 1: Γ(3/2)/(π Γ(1/2)) = 1/(2π)
        assert!((fractional_constant(2, 1.0) - 0.5 / PI).abs() < 1e-14);
    }

    #[test]
    fn small_jump_moment_closed_form() {
        let nu = LevyMeasureSpec::fractional(1.5, 1.0).unwrap();
        let c = fractional_constant(1, 1.5);
        let want = 2.0 * c * 0.1f64.powf(0.5) / 0.5;
        assert!((nu.small_jump_moment(0.1, false) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn cosine_is_an_eigenfunction() {
        // I[cos] = -|ξ|^σ cos for the fractional kernel
        let nu = LevyMeasureSpec::fractional(1.2, 1.0).unwrap();
        let f = Analytic {
            f: |x: f64| (2.0 * x).cos(),
            df: |x: f64| -2.0 * (2.0 * x).sin(),
            d2f: |x: f64| -4.0 * (2.0 * x).cos(),
        };
        let opts = QuadratureOptions {
            r_min: 1e-4,
            z_max: 4000.0,
            reflected: false,
            order: 12,
        };
        let x = 0.3;
        let got = levy_integral(&f, x, &nu, &opts, TailModel::Constant(0.0)).unwrap().value;
        let want = -(2f64.powf(1.2)) * (2.0 * x).cos();
        assert!((got - want).abs() < 2e-4 * want.abs(), "{got} vs {want}");
    }

    #[test]
    fn half_ball_closed_forms() {
        let v = half_ball_moment(1, 1.5, 1.0).unwrap();
        assert!((v - 0.5f64.powf(0.5) / 0.5).abs() < 1e-12);
        let v2 = half_ball_moment(2, 1.0, 10.0).unwrap();
        assert!((v2 - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_options() {
        let nu = LevyMeasureSpec::fractional(1.0, 1.0).unwrap();
        let f = Analytic {
            f: |_x: f64| 1.0,
            df: |_x: f64| 0.0,
            d2f: |_x: f64| 0.0,
        };
        let mut o = QuadratureOptions {
            r_min: 0.0,
            z_max: 10.0,
            reflected: false,
            order: 8,
        };
        assert!(levy_integral(&f, 0.0, &nu, &o, TailModel::Constant(1.0)).is_err());
        o.r_min = 0.1;
        assert!(levy_integral(&f, 0.0, &nu, &o, TailModel::PowerGrowth(1.5)).is_err());
        assert!(LevyMeasureSpec::fractional(2.0, 1.0).is_err());
    }
}
