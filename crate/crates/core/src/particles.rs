//! Euler simulation of `dX = -b(t,X) dt + sqrt(2 λ0) dB + sqrt(2) Σ(X) dB' + dP`
//! with stable or tempered jumps, and a reflection coupling experiment.
//!
//! Every particle owns a ChaCha stream selected by its id; step `k` reads from
//! word offset `k << 20` of that stream. A trajectory therefore depends only on
//! `(seed, stream, particle id)`, never on how work is split between threads.
//! Reductions are accumulated per fixed-size chunk and merged in chunk order.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, LevyError, Result};
use crate::field::DensityField;
use crate::levy::{LevyKind, LevyMeasureSpec};
use crate::norms::weighted_tv_norm;
use crate::operators::GeneratorSpec;
use crate::quadrature::adaptive;
use crate::weight::{bracket, WeightFunction};

/// Particles per work unit; also the reduction granularity.
const CHUNK: usize = 4096;

/// Word offset reserved for each time step within a particle stream.
const STEP_SHIFT: u32 = 20;

/// Default radius below which tempered jumps are replaced by a Gaussian.
pub const DEFAULT_JUMP_CUTOFF: f64 = 0.1;

/// Seed and stream of a counter-based generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Generator of one particle, positioned at the start of its stream.
    pub fn particle(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ self.stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        rng.set_stream(id);
        rng
    }

    /// The same generator moved to the block reserved for `step`.
    pub fn at_step(rng: &mut ChaCha8Rng, step: u64) {
        rng.set_word_pos((step as u128) << STEP_SHIFT);
    }
}

/// Chambers-Mallows-Stuck variate with characteristic function `exp(-|ξ|^σ)`.
fn cms<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    if sigma == 2.0 {
        let g: f64 = rng.sample(StandardNormal);
        return std::f64::consts::SQRT_2 * g;
    }
    let v = PI * (rng.random::<f64>() - 0.5);
    let w: f64 = rng.sample(Exp1);
    if sigma == 1.0 {
        return v.tan();
    }
    (sigma * v).sin() / v.cos().powf(1.0 / sigma) * (((1.0 - sigma) * v).cos() / w).powf((1.0 - sigma) / sigma)
}

/// Symmetric σ-stable variate; with `scale = dt^{1/σ}` it is the increment over
/// `dt` of the process with characteristic exponent `|ξ|^σ`.
pub fn sample_stable<R: Rng + ?Sized>(sigma: f64, scale: f64, rng: &mut R) -> Result<f64> {
    if !(sigma > 0.0 && sigma <= 2.0) {
        return param(format!("stability index must lie in (0, 2], got {sigma}"));
    }
    Ok(scale * cms(sigma, rng))
}

/// Positive α-stable variate with Laplace transform `exp(-s^α)` (Kanter's representation).
fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = PI * rng.random::<f64>();
    let e: f64 = rng.sample(Exp1);
    let a = ((alpha * u).sin() / u.sin()).powf(1.0 / (1.0 - alpha)) * ((1.0 - alpha) * u).sin() / (alpha * u).sin();
    (a / e).powf((1.0 - alpha) / alpha)
}

/// Isotropic 2-D σ-stable variate with characteristic function `exp(-scale^σ |ξ|^σ)`,
/// a Gaussian run for a (σ/2)-stable time.
pub fn sample_stable_2d<R: Rng + ?Sized>(sigma: f64, scale: f64, rng: &mut R) -> Result<[f64; 2]> {
    if !(sigma > 0.0 && sigma <= 2.0) {
        return param(format!("stability index must lie in (0, 2], got {sigma}"));
    }
    let a = if sigma == 2.0 { 1.0 } else { positive_stable(sigma / 2.0, rng) };
    let s = scale * (2.0 * a).sqrt();
    let g1: f64 = rng.sample(StandardNormal);
    let g2: f64 = rng.sample(StandardNormal);
    Ok([s * g1, s * g2])
}

/// Jump increments for one time step.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpSampler {
    None,
    /// Exact stable increments for `c (-Δ)^{σ/2}`.
    Stable { sigma: f64, intensity: f64 },
    /// Compound Poisson above `cutoff` plus a Gaussian for the small jumps.
    Tempered {
        sigma: f64,
        cutoff: f64,
        /// Intensity of jumps with `|z| > cutoff`.
        rate: f64,
        /// `∫_{|z|<cutoff} z^2 ν(dz)`.
        small_variance: f64,
    },
}

impl JumpSampler {
    pub fn new(levy: &LevyMeasureSpec, cutoff: f64) -> Result<Self> {
        match levy.kind() {
            LevyKind::None => Ok(Self::None),
            LevyKind::Fractional => Ok(Self::Stable {
                sigma: levy.sigma(),
                intensity: levy.intensity(),
            }),
            LevyKind::Tempered => {
                if !(cutoff > 0.0) {
                    return param(format!("jump cutoff must be positive, got {cutoff}"));
                }
                let sigma = levy.sigma();
                let side = adaptive(&|z: f64| levy.density(z, false), cutoff, cutoff + 60.0, 1e-12);
                Ok(Self::Tempered {
                    sigma,
                    cutoff,
                    rate: 2.0 * side,
                    small_variance: levy.small_jump_moment(cutoff, false),
                })
            }
            LevyKind::Custom { .. } => Err(LevyError::Unsupported(
                "particle simulation needs a fractional or tempered jump kernel".into(),
            )),
        }
    }

    /// Jump increment over `dt` in 1-D.
    pub fn increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Stable { sigma, intensity } => (intensity * dt).powf(1.0 / sigma) * cms(sigma, rng),
            Self::Tempered {
                sigma,
                cutoff,
                rate,
                small_variance,
            } => {
                let g: f64 = rng.sample(StandardNormal);
                let mut total = (small_variance * dt).sqrt() * g;
                let mean = rate * dt;
                if mean > 0.0 {
                    let count = Poisson::new(mean).map(|p| p.sample(rng)).unwrap_or(0.0) as u64;
                    for _ in 0..count {
                        total += tempered_jump(sigma, cutoff, rng);
                    }
                }
                total
            }
        }
    }

    /// Jump increment over `dt` in 2-D (stable kernels only).
    pub fn increment_2d<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> Result<[f64; 2]> {
        match *self {
            Self::None => Ok([0.0, 0.0]),
            Self::Stable { sigma, intensity } => sample_stable_2d(sigma, (intensity * dt).powf(1.0 / sigma), rng),
            Self::Tempered { .. } => Err(LevyError::Unsupported("tempered jumps are simulated in d = 1".into())),
        }
    }
}

/// One jump of size above `cutoff` from `e^{-|z|} |z|^{-1-σ}`: Pareto proposal, exponential acceptance.
fn tempered_jump<R: Rng + ?Sized>(sigma: f64, cutoff: f64, rng: &mut R) -> f64 {
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let z = cutoff * u.powf(-1.0 / sigma);
        if rng.random::<f64>() < (cutoff - z).exp() {
            return if rng.random::<bool>() { z } else { -z };
        }
    }
}

/// Noise coefficients of the SDE for one generator.
#[derive(Debug, Clone)]
pub struct ParticleModel {
    spec: GeneratorSpec,
    jumps: JumpSampler,
}

impl ParticleModel {
    pub fn new(spec: &GeneratorSpec, jump_cutoff: f64) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec: spec.clone(),
            jumps: JumpSampler::new(&spec.levy, jump_cutoff)?,
        })
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn jumps(&self) -> &JumpSampler {
        &self.jumps
    }

    /// Draw the Brownian and jump parts of one 1-D step.
    fn noise(&self, dt: f64, rng: &mut ChaCha8Rng) -> Noise {
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = if self.spec.local.is_variable() { rng.sample(StandardNormal) } else { 0.0 };
        let jump = self.jumps.increment(dt, rng);
        Noise { g1, g2, jump }
    }

    /// `x - b dt + sqrt(2 λ0 dt) g1 + sqrt(2 dt) Σ(x) g2 + jump`.
    fn apply(&self, x: f64, t: f64, dt: f64, n: &Noise) -> f64 {
        let l = &self.spec.local;
        x - self.spec.drift.eval(t, x) * dt
            + (2.0 * l.lambda0 * dt).sqrt() * n.g1
            + (2.0 * dt).sqrt() * l.sigma_at(x) * n.g2
            + n.jump
    }

    fn step_2d(&self, p: [f64; 2], t: f64, dt: f64, rng: &mut ChaCha8Rng) -> Result<[f64; 2]> {
        let b = self.spec.drift.eval2(t, p);
        let l = &self.spec.local;
        let s = l.sigma_at(p[0].hypot(p[1]));
        let j = self.jumps.increment_2d(dt, rng)?;
        let mut out = [0.0; 2];
        for k in 0..2 {
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            out[k] = p[k] - b[k] * dt + (2.0 * l.lambda0 * dt).sqrt() * g1 + (2.0 * dt).sqrt() * s * g2 + j[k];
        }
        Ok(out)
    }
}

struct Noise {
    g1: f64,
    g2: f64,
    jump: f64,
}

/// Positions of `Np` particles in `d` dimensions at a common time.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    dim: usize,
    positions: Vec<f64>,
    time: f64,
    step: u64,
    rng: RngSpec,
}

impl ParticleEnsemble {
    /// Flat positions, `d` coordinates per particle.
    pub fn new(dim: usize, positions: Vec<f64>, rng: RngSpec) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return param(format!("dimension must be 1 or 2, got {dim}"));
        }
        if positions.is_empty() || positions.len() % dim != 0 {
            return param("an ensemble needs at least one particle with complete coordinates");
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return param("particle positions must be finite");
        }
        Ok(Self {
            dim,
            positions,
            time: 0.0,
            step: 0,
            rng,
        })
    }

    /// `np` particles at the same point.
    pub fn at_point(point: &[f64], np: usize, rng: RngSpec) -> Result<Self> {
        let positions = (0..np).flat_map(|_| point.iter().copied()).collect();
        Self::new(point.len(), positions, rng)
    }

    /// `np` 1-D particles drawn from `N(mean, variance)`.
    pub fn gaussian(np: usize, mean: f64, variance: f64, rng: RngSpec) -> Result<Self> {
        Self::isotropic_gaussian(&[mean], np, variance, rng)
    }

    /// `np` particles drawn from `N(center, variance I)` in `center.len()` dimensions.
    pub fn isotropic_gaussian(center: &[f64], np: usize, variance: f64, rng: RngSpec) -> Result<Self> {
        if !(variance >= 0.0) {
            return param("variance must be nonnegative");
        }
        let d = center.len();
        if !(d == 1 || d == 2) {
            return param(format!("dimension must be 1 or 2, got {d}"));
        }
        let init = RngSpec::new(rng.seed, rng.stream ^ INIT_STREAM);
        let mut positions = vec![0.0; np * d];
        positions.par_chunks_mut(CHUNK * d).enumerate().for_each(|(c, slot)| {
            for (k, p) in slot.chunks_mut(d).enumerate() {
                let mut r = init.particle((c * CHUNK + k) as u64);
                for (x, m) in p.iter_mut().zip(center) {
                    let g: f64 = r.sample(StandardNormal);
                    *x = m + variance.sqrt() * g;
                }
            }
        });
        Self::new(d, positions, rng)
    }

    /// `np` 1-D particles drawn by inverse CDF from a nonnegative grid density,
    /// uniform within each cell `[x_i - dx/2, x_i + dx/2)`.
    pub fn sample_density(m: &DensityField, np: usize, rng: RngSpec) -> Result<Self> {
        let grid = *m.grid();
        if grid.dim() != 1 {
            return Err(LevyError::Unsupported("density sampling is implemented for d = 1".into()));
        }
        if m.values().iter().any(|v| *v < 0.0) || m.mass() <= 0.0 {
            return param("sampling needs a nonnegative density with positive mass");
        }
        let mut cdf = Vec::with_capacity(m.len());
        let mut acc = 0.0;
        for v in m.values() {
            acc += v;
            cdf.push(acc);
        }
        let total = acc;
        let dx = grid.dx();
        let init = RngSpec::new(rng.seed, rng.stream ^ INIT_STREAM);
        let positions = par_map_ids(np, |id| {
            let mut r = init.particle(id);
            let target = r.random::<f64>() * total;
            let i = cdf.partition_point(|c| *c <= target).min(cdf.len() - 1);
            let below = if i == 0 { 0.0 } else { cdf[i - 1] };
            let frac = if m.values()[i] > 0.0 { (target - below) / m.values()[i] } else { 0.5 };
            grid.coord(i as isize) - 0.5 * dx + frac * dx
        });
        Self::new(1, positions, rng)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.positions.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Steps taken so far; selects the next random block of every stream.
    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn rng(&self) -> RngSpec {
        self.rng
    }

    /// Mean of `f` over particles (1-D), reduced in fixed chunk order.
    pub fn mean_of(&self, f: impl Fn(f64) -> f64 + Sync) -> f64 {
        chunked_sum(&self.positions, |x| f(x)) / self.len() as f64
    }

    /// Empirical mean and variance (1-D).
    pub fn mean_variance(&self) -> (f64, f64) {
        let m = self.mean_of(|x| x);
        let v = self.mean_of(|x| (x - m) * (x - m));
        (m, v)
    }

    /// Real and imaginary parts of the empirical characteristic function at `ξ` (1-D).
    pub fn characteristic(&self, xi: f64) -> (f64, f64) {
        (self.mean_of(|x| (xi * x).cos()), self.mean_of(|x| (xi * x).sin()))
    }

    /// Mean of `<X>^p` over particles (any dimension).
    pub fn bracket_moment(&self, p: f64) -> f64 {
        let d = self.dim;
        let sums: Vec<f64> = self
            .positions
            .par_chunks(CHUNK * d)
            .map(|c| c.chunks(d).map(|q| bracket(q.iter().map(|v| v * v).sum::<f64>().sqrt()).powf(p)).sum())
            .collect();
        sums.into_iter().sum::<f64>() / self.len() as f64
    }

    /// Histogram on the grid cells, normalized as a density.
    pub fn histogram(&self, grid: &crate::grid::Grid) -> Result<DensityField> {
        if self.dim != 1 || grid.dim() != 1 {
            return Err(LevyError::Unsupported("histograms are implemented for d = 1".into()));
        }
        let n = grid.n();
        let counts = self
            .positions
            .par_chunks(CHUNK)
            .map(|c| {
                let mut h = vec![0u64; n];
                for x in c {
                    h[grid.nearest(*x)] += 1;
                }
                h
            })
            .reduce(
                || vec![0u64; n],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );
        let norm = 1.0 / (self.len() as f64 * grid.dx());
        DensityField::new(*grid, counts.into_iter().map(|c| c as f64 * norm).collect(), self.time)
    }
}

const INIT_STREAM: u64 = 0x5EED_0000_0000_0001;

fn par_map_ids(np: usize, f: impl Fn(u64) -> f64 + Sync) -> Vec<f64> {
    let mut out = vec![0.0; np];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, slot)| {
        for (k, v) in slot.iter_mut().enumerate() {
            *v = f((c * CHUNK + k) as u64);
        }
    });
    out
}

fn chunked_sum(values: &[f64], f: impl Fn(f64) -> f64 + Sync) -> f64 {
    let sums: Vec<f64> = values.par_chunks(CHUNK).map(|c| c.iter().map(|x| f(*x)).sum()).collect();
    sums.into_iter().sum()
}

/// Advance an ensemble by `steps` Euler steps of size `dt`.
pub fn simulate(e: &mut ParticleEnsemble, model: &ParticleModel, dt: f64, steps: u64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return param(format!("time step must be positive, got {dt}"));
    }
    if model.spec.grid.dim() != e.dim {
        return Err(LevyError::Mismatch("ensemble and generator dimensions differ".into()));
    }
    let (t0, k0, spec, d) = (e.time, e.step, e.rng, e.dim);
    let failed = std::sync::atomic::AtomicBool::new(false);
    e.positions.par_chunks_mut(CHUNK * d).enumerate().for_each(|(c, slot)| {
        for (k, p) in slot.chunks_mut(d).enumerate() {
            let mut rng = spec.particle((c * CHUNK + k) as u64);
            for s in 0..steps {
                let t = t0 + s as f64 * dt;
                RngSpec::at_step(&mut rng, k0 + s);
                if d == 1 {
                    let n = model.noise(dt, &mut rng);
                    p[0] = model.apply(p[0], t, dt, &n);
                } else {
                    match model.step_2d([p[0], p[1]], t, dt, &mut rng) {
                        Ok(q) => p.copy_from_slice(&q),
                        Err(_) => failed.store(true, std::sync::atomic::Ordering::Relaxed),
                    }
                }
            }
        }
    });
    if failed.into_inner() {
        return Err(LevyError::Unsupported("tempered jumps are simulated in d = 1".into()));
    }
    e.step += steps;
    e.time = t0 + steps as f64 * dt;
    if let Some(i) = e.positions.iter().position(|x| !x.is_finite()) {
        return Err(LevyError::Blowup {
            time: e.time,
            detail: format!("particle {} left the finite range", i / d),
        });
    }
    Ok(())
}

/// One Euler step with the default tempered-jump cutoff.
pub fn step_euler(e: &ParticleEnsemble, g: &GeneratorSpec, dt: f64) -> Result<ParticleEnsemble> {
    let model = ParticleModel::new(g, DEFAULT_JUMP_CUTOFF)?;
    let mut next = e.clone();
    simulate(&mut next, &model, dt, 1)?;
    Ok(next)
}

/// Weighted total variation between the ensemble histogram and a grid density.
pub fn ensemble_vs_grid_distance(e: &ParticleEnsemble, m: &DensityField, w: &WeightFunction) -> Result<f64> {
    let h = e.histogram(m.grid())?;
    Ok(weighted_tv_norm(&h.combine(1.0, m, -1.0)?, w))
}

/// Controls of the coupling experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingOptions {
    pub dt: f64,
    pub horizon: f64,
    pub pairs: usize,
    /// Pairs closer than this are merged.
    pub eps_couple: f64,
    /// Steps between recorded points of the survival curve.
    pub stride: u64,
    pub rng: RngSpec,
    pub jump_cutoff: f64,
}

impl CouplingOptions {
    pub fn new(dt: f64, horizon: f64, pairs: usize, rng: RngSpec) -> Self {
        Self {
            dt,
            horizon,
            pairs,
            eps_couple: 1e-3,
            stride: 10,
            rng,
            jump_cutoff: DEFAULT_JUMP_CUTOFF,
        }
    }
}

/// Survival curve of the coupling time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingStats {
    pub times: Vec<f64>,
    /// Fraction of pairs not yet coupled at each recorded time.
    pub uncoupled: Vec<f64>,
    /// Coupling time per pair, `None` if still apart at the horizon.
    pub coupling_times: Vec<Option<f64>>,
}

/// Pairs started at `x0` and `y0`. Brownian increments of the second copy are
/// reflected; jumps smaller than `min(1, |X - Y| / 2)` are reflected and larger
/// ones shared. A pair merges when it comes within `eps_couple` or crosses.
pub fn reflection_coupling_run(g: &GeneratorSpec, x0: f64, y0: f64, opts: &CouplingOptions) -> Result<CouplingStats> {
    if g.grid.dim() != 1 {
        return Err(LevyError::Unsupported("the coupling experiment is implemented for d = 1".into()));
    }
    if !(opts.dt > 0.0 && opts.horizon >= 0.0 && opts.pairs > 0 && opts.stride > 0 && opts.eps_couple > 0.0) {
        return param("coupling needs dt > 0, horizon >= 0, pairs > 0, stride > 0 and eps_couple > 0");
    }
    let model = ParticleModel::new(g, opts.jump_cutoff)?;
    let steps = (opts.horizon / opts.dt).round() as u64;
    let records = (steps / opts.stride) as usize + 1;
    let times: Vec<f64> = (0..records).map(|r| (r as u64 * opts.stride) as f64 * opts.dt).collect();
    let dt = opts.dt;
    let run_pair = |id: u64| -> Option<f64> {
        let (mut x, mut y) = (x0, y0);
        if (x - y).abs() < opts.eps_couple {
            return Some(0.0);
        }
        let mut rng = opts.rng.particle(id);
        for s in 0..steps {
            let t = s as f64 * dt;
            RngSpec::at_step(&mut rng, s);
            let n = model.noise(dt, &mut rng);
            let r = (x - y).abs();
            let mirrored = Noise {
                g1: -n.g1,
                g2: -n.g2,
                jump: if n.jump.abs() < r.min(2.0) / 2.0 { -n.jump } else { n.jump },
            };
            let nx = model.apply(x, t, dt, &n);
            let ny = model.apply(y, t, dt, &mirrored);
            if (nx - ny).abs() < opts.eps_couple || (nx - ny).signum() != (x - y).signum() {
                return Some((s + 1) as f64 * dt);
            }
            x = nx;
            y = ny;
        }
        None
    };
    let mut coupling_times = vec![None; opts.pairs];
    coupling_times.par_chunks_mut(CHUNK).enumerate().for_each(|(c, slot)| {
        for (k, v) in slot.iter_mut().enumerate() {
            *v = run_pair((c * CHUNK + k) as u64);
        }
    });
    let np = opts.pairs as f64;
    let uncoupled = times
        .iter()
        .map(|t| coupling_times.iter().filter(|c| c.is_none_or(|tc| tc > t + 1e-12)).count() as f64 / np)
        .collect();
    Ok(CouplingStats {
        times,
        uncoupled,
        coupling_times,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_positioned_by_step() {
        let spec = RngSpec::new(7, 1);
        let mut a = spec.particle(3);
        let mut b = spec.particle(3);
        RngSpec::at_step(&mut a, 5);
        let _: f64 = b.random();
        RngSpec::at_step(&mut b, 5);
        assert_eq!(a.random::<u64>(), b.random::<u64>());
        let mut c = spec.particle(4);
        RngSpec::at_step(&mut c, 5);
        assert_ne!(a.random::<u64>(), c.random::<u64>());
    }

    #[test]
    fn stable_rejects_bad_index() {
        let mut r = RngSpec::new(1, 0).particle(0);
        assert!(sample_stable(2.5, 1.0, &mut r).is_err());
        assert!(sample_stable(0.0, 1.0, &mut r).is_err());
    }
}
