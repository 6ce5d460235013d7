//! Lyapunov inequalities for weights, their H1/H2 classification, the radial
//! barrier `ψ` and the scalar rate ODE `ϖ' = -ϖ h(L ϖ^{-1/(1-θ)}) / 2`.
//!
//! Generator values come from [`generator_at`], which evaluates `L^b φ` on the
//! whole line, so the sampled radii are not limited by a periodic box. Radii
//! still default to `|x| <= 0.45 L` to stay comparable with the grid solvers.

use serde::{Deserialize, Serialize};

use crate::error::{param, LevyError, Result};
use crate::levy::TailModel;
use crate::operators::{generator_at, GeneratorSpec};
use crate::quadrature::adaptive;
use crate::weight::{bracket, WeightFunction};

/// Times at which time-dependent drifts are sampled; the perturbation is `2π`-periodic.
const PHASES: [f64; 4] = [0.0, 0.5 * std::f64::consts::PI, std::f64::consts::PI, 1.5 * std::f64::consts::PI];

/// Outer share of the radii standing in for `|x| -> ∞`.
const OUTER_BAND: f64 = 0.25;

/// Smallest tail infimum of `L^b φ / φ` accepted as an H1 witness.
pub const H1_THRESHOLD: f64 = 1e-2;

/// `n` radii spread over `[0, 0.45 L]`, mirrored to both signs.
pub fn default_radii(g: &GeneratorSpec, n: usize) -> Vec<f64> {
    let r_max = 0.45 * g.grid.half_width();
    let mut xs: Vec<f64> = (0..n).map(|i| r_max * (i as f64 + 0.5) / n as f64).collect();
    let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
    xs.extend(neg);
    xs.sort_by(f64::total_cmp);
    xs
}

/// Midpoints inserted between consecutive samples.
fn refine(xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * xs.len());
    for w in xs.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.extend(xs.last());
    out
}

fn tail_model(w: &WeightFunction, g: &GeneratorSpec) -> Result<TailModel> {
    match (w.power_exponent(), g.levy.has_jumps()) {
        (_, false) => Ok(TailModel::Constant(0.0)),
        (Some(k), true) => Ok(TailModel::PowerGrowth(k)),
        (None, true) => Err(LevyError::Hypothesis(format!(
            "the jump integral of {} diverges; only power weights <x>^k with k < σ are integrable",
            w.label()
        ))),
    }
}

/// `min over t` of `L^b φ(t, x)` at each sample (the drift may depend on time).
pub fn generator_values(g: &GeneratorSpec, w: &WeightFunction, xs: &[f64]) -> Result<Vec<f64>> {
    let tail = tail_model(w, g)?;
    let times: &[f64] = if g.drift.is_time_dependent() { &PHASES } else { &PHASES[..1] };
    xs.iter()
        .map(|&x| {
            let mut worst = f64::INFINITY;
            for &t in times {
                worst = worst.min(generator_at(w, g, t, x, tail)?);
            }
            Ok(worst)
        })
        .collect()
}

/// Outcome of checking `L^b <x>^β >= (α - ε) β <x>^β / <x>^{2-γ} - K_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovCheck {
    pub beta: f64,
    pub eps: f64,
    /// Smallest additive constant making the inequality hold on the samples.
    pub k_eps: f64,
    /// The same constant on the refined sample set.
    pub k_eps_refined: f64,
    /// Largest shortfall over the outer band before adding `K_ε`; nonpositive when the bound holds at infinity.
    pub tail_deficit: f64,
    /// `K_ε` finite, refinement-stable, and not needed in the outer band.
    pub holds: bool,
}

/// Check the Lyapunov lower bound for `φ = <x>^β` on the radii `xs`.
pub fn verify_lemma_lyap(g: &GeneratorSpec, beta: f64, eps: f64, xs: &[f64]) -> Result<LyapunovCheck> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return param(format!("β must be nonnegative, got {beta}"));
    }
    if !(eps > 0.0) {
        return param(format!("ε must be positive, got {eps}"));
    }
    if xs.len() < 4 {
        return param("at least four sample radii are required");
    }
    if g.levy.has_jumps() && beta >= g.levy.sigma() {
        return Err(LevyError::Hypothesis(format!(
            "with a jump part the Lyapunov bound needs 0 < β < σ, got β = {beta}, σ = {}",
            g.levy.sigma()
        )));
    }
    let gamma = g.drift.gamma();
    if beta > 1.0 && gamma <= 1.0 {
        return Err(LevyError::Hypothesis(format!(
            "weights growing faster than <x> need γ > 1, got β = {beta}, γ = {gamma}"
        )));
    }
    let w = WeightFunction::power(beta)?;
    let alpha = g.drift.alpha();
    let shortfall = |xs: &[f64]| -> Result<Vec<f64>> {
        let lb = generator_values(g, &w, xs)?;
        Ok(xs
            .iter()
            .zip(lb)
            .map(|(&x, v)| (alpha - eps) * beta * bracket(x).powf(beta - 2.0 + gamma) - v)
            .collect())
    };
    let coarse = shortfall(xs)?;
    let fine_xs = refine(xs);
    let fine = shortfall(&fine_xs)?;
    let k_eps = coarse.iter().fold(0.0f64, |a, b| a.max(*b));
    let k_eps_refined = fine.iter().fold(0.0f64, |a, b| a.max(*b));
    let r_max = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let tail_deficit = xs
        .iter()
        .zip(&coarse)
        .filter(|(x, _)| x.abs() >= (1.0 - OUTER_BAND) * r_max)
        .fold(f64::NEG_INFINITY, |a, (_, d)| a.max(*d));
    let stable = (k_eps_refined - k_eps).abs() <= 0.1 * k_eps.max(1e-12) + 1e-12;
    Ok(LyapunovCheck {
        beta,
        eps,
        k_eps,
        k_eps_refined,
        tail_deficit,
        holds: k_eps.is_finite() && stable && tail_deficit <= 0.0,
    })
}

/// Parametric decay model for `h` in `L^b φ >= h(φ) φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HModel {
    /// `h(r) = c`.
    Constant { c: f64 },
    /// `h(r) = c r^{-p}`.
    Power { c: f64, p: f64 },
    /// `h(r) = c (log r)^{-q}`.
    InverseLog { c: f64, q: f64 },
}

impl HModel {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Self::Constant { c } => c,
            Self::Power { c, p } => c * r.powf(-p),
            Self::InverseLog { c, q } => c * r.ln().powf(-q),
        }
    }
}

/// Weight class read off the outer samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum Classification {
    /// `L^b φ / φ` bounded below by `omega0 > 0` at large radii.
    H1 { omega0: f64 },
    /// `L^b φ -> ∞` with a decaying ratio `h(φ)`; the fitted model and its residual.
    H2 { h_model: HModel, rss: f64 },
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSample {
    pub x: f64,
    pub phi: f64,
    /// `L^b φ(x)`.
    pub value: f64,
    /// `L^b φ(x) / φ(x)`.
    pub ratio: f64,
}

/// Samples and verdict for one weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub weight: String,
    pub classification: Classification,
    /// `(ε, K_ε)` for power weights; empty when the bound does not apply.
    pub k_eps_table: Vec<(f64, f64)>,
    /// Change of the H1 estimate when the outer band is halved, relative.
    pub band_sensitivity: f64,
    pub samples: Vec<LyapunovSample>,
}

/// Least-squares line through `(x, y)`: `(intercept, slope, rss)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let rss = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    (icpt, slope, rss)
}

/// Classify `φ` as H1, H2 or neither from `L^b φ` on the radii `xs`.
///
/// H1 needs a positive, refinement-stable tail infimum of the ratio that does
/// not decay like a power of `|x|`. H2 needs `L^b φ` positive and growing on
/// the outer band; `h` is then fitted by the better of the power and
/// inverse-log families in `log h`.
pub fn classify_weight(g: &GeneratorSpec, w: &WeightFunction, xs: &[f64]) -> Result<LyapunovReport> {
    if xs.len() < 8 {
        return param("at least eight sample radii are required");
    }
    let values = generator_values(g, w, xs)?;
    let samples: Vec<LyapunovSample> = xs
        .iter()
        .zip(&values)
        .map(|(&x, &v)| {
            let phi = w.eval(&[x]);
            LyapunovSample { x, phi, value: v, ratio: v / phi }
        })
        .collect();
    let r_max = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let band = |share: f64| -> Vec<&LyapunovSample> {
        samples.iter().filter(|s| s.x.abs() >= (1.0 - share) * r_max).collect()
    };
    let outer = band(OUTER_BAND);
    let inner_half = band(0.5 * OUTER_BAND);
    let inf = |b: &[&LyapunovSample]| b.iter().fold(f64::INFINITY, |a, s| a.min(s.ratio));
    let omega0 = inf(&outer);
    let omega_half = inf(&inner_half);
    let band_sensitivity = (omega_half - omega0).abs() / omega0.abs().max(1e-300);

    let log_r: Vec<f64> = outer.iter().map(|s| s.x.abs().ln()).collect();
    let positive = outer.iter().all(|s| s.value > 0.0);
    let ratio_slope = if positive {
        line_fit(&log_r, &outer.iter().map(|s| s.ratio.ln()).collect::<Vec<_>>()).1
    } else {
        f64::NEG_INFINITY
    };
    let value_slope = if positive {
        line_fit(&log_r, &outer.iter().map(|s| s.value.ln()).collect::<Vec<_>>()).1
    } else {
        f64::NEG_INFINITY
    };

    let classification = if omega0 > H1_THRESHOLD && band_sensitivity < 0.1 && ratio_slope > -0.1 {
        Classification::H1 { omega0 }
    } else if positive && value_slope > 0.0 && outer.iter().all(|s| s.phi > 1.0) {
        let lphi: Vec<f64> = outer.iter().map(|s| s.phi.ln()).collect();
        let llphi: Vec<f64> = lphi.iter().map(|v| v.ln()).collect();
        let lh: Vec<f64> = outer.iter().map(|s| s.ratio.ln()).collect();
        let (a1, s1, rss1) = line_fit(&lphi, &lh);
        let (a2, s2, rss2) = line_fit(&llphi, &lh);
        let (h_model, rss) = if rss1 <= rss2 {
            (HModel::Power { c: a1.exp(), p: -s1 }, rss1)
        } else {
            (HModel::InverseLog { c: a2.exp(), q: -s2 }, rss2)
        };
        Classification::H2 { h_model, rss }
    } else {
        Classification::Neither
    };

    let mut k_eps_table = Vec::new();
    if let Some(beta) = w.power_exponent() {
        for share in [0.1, 0.3, 0.5] {
            let eps = share * g.drift.alpha();
            if eps > 0.0 {
                if let Ok(c) = verify_lemma_lyap(g, beta, eps, xs) {
                    k_eps_table.push((eps, c.k_eps));
                }
            }
        }
    }
    Ok(LyapunovReport {
        weight: w.label(),
        classification,
        k_eps_table,
        band_sensitivity,
        samples,
    })
}

/// `ψ(r) = C1 (1 - exp(-C2 r^θ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub c1: f64,
    pub c2: f64,
    pub theta: f64,
}

impl BarrierSpec {
    pub fn new(c1: f64, c2: f64, theta: f64) -> Result<Self> {
        if !(c1 > 0.0 && c2 > 0.0 && theta > 0.0 && theta < 1.0) {
            return param(format!("barrier needs C1, C2 > 0 and θ in (0, 1), got ({c1}, {c2}, {theta})"));
        }
        Ok(Self { c1, c2, theta })
    }

    pub fn psi(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        -self.c1 * (-self.c2 * r.powf(self.theta)).exp_m1()
    }

    /// Right derivative; infinite at `r = 0`.
    pub fn dpsi(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::INFINITY;
        }
        let s = r.powf(self.theta);
        self.c1 * self.c2 * self.theta * s / r * (-self.c2 * s).exp()
    }

    /// Second derivative; `-∞` at `r = 0`.
    pub fn d2psi(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let s = r.powf(self.theta);
        let th = self.theta;
        self.c1 * self.c2 * th * s / (r * r) * (-self.c2 * s).exp() * (th - 1.0 - self.c2 * th * s)
    }
}

/// Sample count of the dense grid in [`min_barrier_c2`].
pub const BARRIER_GRID: usize = 100_000;

/// Smallest `C2` with `4 λ θ C2 ξ^θ >= C g(ξ)` on a dense grid of `(0, r1]`, where
/// `g(ξ) = ξ^{σ-1} ∨ ξ` for `σ > 1` (requires `θ < σ - 1`) and `g(ξ) = ξ^δ ∨ ξ` for
/// `σ <= 1` (requires `θ < δ`). Without jumps (`λ = 0`) the local coefficient `λ0`
/// takes the place of `λ` with `σ = 2`.
pub fn min_barrier_c2(lambda: f64, lambda0: f64, sigma: f64, delta: f64, theta: f64, c: f64, r1: f64) -> Result<f64> {
    if !(c >= 0.0 && r1 > 0.0 && theta > 0.0) {
        return param(format!("barrier constants need C >= 0, r1 > 0, θ > 0, got ({c}, {r1}, {theta})"));
    }
    let (ell, sigma) = if lambda > 0.0 { (lambda, sigma) } else { (lambda0, 2.0) };
    if !(ell > 0.0) {
        return param("barrier needs λ > 0 or λ0 > 0");
    }
    let power = if sigma > 1.0 {
        if theta >= sigma - 1.0 {
            return Err(LevyError::Hypothesis(format!(
                "for σ > 1 the barrier exponent needs θ < σ - 1, got θ = {theta}, σ = {sigma}"
            )));
        }
        sigma - 1.0
    } else {
        if !(theta < delta) {
            return Err(LevyError::Hypothesis(format!(
                "for σ <= 1 the barrier exponent needs θ < δ, got θ = {theta}, δ = {delta}"
            )));
        }
        delta
    };
    if c == 0.0 {
        return Ok(0.0);
    }
    let worst = (1..=BARRIER_GRID)
        .map(|i| {
            let xi = r1 * i as f64 / BARRIER_GRID as f64;
            xi.powf(power).max(xi) / xi.powf(theta)
        })
        .fold(0.0f64, f64::max);
    Ok(c * worst / (4.0 * ell * theta))
}

/// Solution of the rate ODE at recorded times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTrajectory {
    pub t: Vec<f64>,
    pub varpi: Vec<f64>,
    /// Largest relative gap in `∫_ϖ^1 ds / (s h(L s^{-1/(1-θ)})) = t/2` over the records.
    pub identity_residual: f64,
}

/// Tolerance of the implicit-integral cross-check.
pub const IDENTITY_TOL: f64 = 1e-6;

/// Integrate `ϖ' = -ϖ h(L ϖ^{-1/(1-θ)}) / 2`, `ϖ(0) = 1`, on `[0, horizon]`
/// with step-doubling RK4, recording `records + 1` equally spaced points.
pub fn solve_rate_ode(
    h: &dyn Fn(f64) -> f64,
    l: f64,
    theta: f64,
    horizon: f64,
    records: usize,
) -> Result<RateTrajectory> {
    if !(l > 0.0 && theta > 0.0 && theta < 1.0 && horizon > 0.0 && records > 0) {
        return param(format!(
            "rate ODE needs L > 0, θ in (0, 1), T > 0 and records > 0, got ({l}, {theta}, {horizon}, {records})"
        ));
    }
    let expo = -1.0 / (1.0 - theta);
    let h_at = |w: f64| -> Result<f64> {
        let v = h(l * w.powf(expo));
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            param(format!("h must be positive and finite, got h({}) = {v}", l * w.powf(expo)))
        }
    };
    // in y = -log ϖ the equation is y' = h(L e^{y/(1-θ)}) / 2
    let rhs = |y: f64| -> Result<f64> { Ok(0.5 * h_at((-y).exp())?) };
    let rk4 = |y: f64, dt: f64| -> Result<f64> {
        let k1 = rhs(y)?;
        let k2 = rhs(y + 0.5 * dt * k1)?;
        let k3 = rhs(y + 0.5 * dt * k2)?;
        let k4 = rhs(y + dt * k3)?;
        Ok(y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    };
    let tol = 1e-13;
    let mut t_rec = vec![0.0];
    let mut y_rec = vec![0.0];
    let mut y = 0.0;
    let mut t = 0.0;
    let mut dt = horizon / records as f64 / 16.0;
    for r in 1..=records {
        let target = horizon * r as f64 / records as f64;
        while t < target {
            let step = dt.min(target - t);
            let full = rk4(y, step)?;
            let half = rk4(rk4(y, 0.5 * step)?, 0.5 * step)?;
            let err = (half - full).abs() / 15.0;
            if err <= tol * (1.0 + half.abs()) || step < 1e-12 * horizon {
                y = half + (half - full) / 15.0;
                t = if step == target - t { target } else { t + step };
                if step == dt {
                    let grow = if err > 0.0 { (tol * (1.0 + half.abs()) / err).powf(0.2).min(2.0) } else { 2.0 };
                    dt *= 0.9 * grow;
                }
            } else {
                dt = 0.5 * step;
            }
        }
        t_rec.push(target);
        y_rec.push(y);
    }
    let mut identity_residual = 0.0f64;
    for (&t, &y) in t_rec.iter().zip(&y_rec).skip(1) {
        let integral = adaptive(&|s: f64| 1.0 / h_at((-s).exp()).unwrap_or(f64::NAN), 0.0, y, 1e-13);
        identity_residual = identity_residual.max((integral - 0.5 * t).abs() / (0.5 * t));
    }
    if !(identity_residual <= IDENTITY_TOL) {
        return Err(LevyError::NoConvergence {
            time: horizon,
            residual: identity_residual,
        });
    }
    Ok(RateTrajectory {
        t: t_rec,
        varpi: y_rec.iter().map(|y| (-y).exp()).collect(),
        identity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barrier_shape() {
        let b = BarrierSpec::new(2.0, 1.5, 0.4).unwrap();
        assert_eq!(b.psi(0.0), 0.0);
        assert!(b.psi(100.0) < 2.0 && b.psi(100.0) > 1.99);
        for r in [0.1, 0.5, 1.0, 3.0] {
            assert!(b.dpsi(r) > 0.0 && b.d2psi(r) < 0.0);
            let h = 1e-5;
            assert!((b.dpsi(r) - (b.psi(r + h) - b.psi(r - h)) / (2.0 * h)).abs() < 1e-6);
            assert!((b.d2psi(r) - (b.dpsi(r + h) - b.dpsi(r - h)) / (2.0 * h)).abs() < 1e-5);
        }
        assert!(BarrierSpec::new(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn refinement_interleaves_midpoints() {
        assert_eq!(refine(&[0.0, 1.0, 3.0]), vec![0.0, 0.5, 1.0, 2.0, 3.0]);
    }
}
