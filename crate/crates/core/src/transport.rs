//! Finite-volume transport and variable local diffusion on a 1-D periodic axis.
//!
//! The density update upwinds with velocities sampled at cell faces and passes
//! no flux across the periodic seam, where a confining drift is discontinuous.
//! The adjoint update is its exact transpose.

use serde::{Deserialize, Serialize};

/// Spatial order of the drift discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportScheme {
    /// First-order upwind, forward Euler.
    #[default]
    Upwind,
    /// Limited second-order reconstruction with two-stage Runge-Kutta.
    Muscl,
}

impl TransportScheme {
    /// Largest Courant number accepted for one explicit step.
    pub fn courant_limit(&self) -> f64 {
        match self {
            TransportScheme::Upwind => 1.0,
            TransportScheme::Muscl => 0.5,
        }
    }
}

#[inline]
fn mc_limiter(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else {
        a.signum() * (2.0 * a.abs()).min(2.0 * b.abs()).min(0.5 * (a + b).abs())
    }
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Rate `-(v m)_x` with face velocities `vf` (`vf[i]` sits between nodes `i`
/// and `i+1`; the seam face `vf[n-1]` carries no flux), written into `out`.
pub fn density_rate(m: &[f64], vf: &[f64], dx: f64, scheme: TransportScheme, out: &mut [f64]) {
    let n = m.len();
    let slope = |i: usize| -> f64 {
        if scheme == TransportScheme::Muscl && i >= 1 && i + 1 < n {
            mc_limiter(m[i] - m[i - 1], m[i + 1] - m[i])
        } else {
            0.0
        }
    };
    let mut left = 0.0;
    for i in 0..n {
        let right = if i + 1 < n {
            let v = vf[i];
            if v >= 0.0 {
                v * (m[i] + 0.5 * slope(i))
            } else {
                v * (m[i + 1] - 0.5 * slope(i + 1))
            }
        } else {
            0.0
        };
        out[i] = -(right - left) / dx;
        left = right;
    }
}

/// Rate `-b u_x` by upwinding with face drifts `bf`; with `Upwind` this is the
/// exact transpose of [`density_rate`] for `vf = -bf`.
pub fn adjoint_rate(u: &[f64], bf: &[f64], dx: f64, scheme: TransportScheme, out: &mut [f64]) {
    let n = u.len();
    for i in 0..n {
        let bl = if i >= 1 { bf[i - 1].max(0.0) } else { 0.0 };
        let br = if i + 1 < n { bf[i].min(0.0) } else { 0.0 };
        let mut back = if i >= 1 { (u[i] - u[i - 1]) / dx } else { 0.0 };
        let mut fwd = if i + 1 < n { (u[i + 1] - u[i]) / dx } else { 0.0 };
        if scheme == TransportScheme::Muscl && i >= 2 && i + 2 < n {
            let c = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / dx;
            let l = (u[i] - 2.0 * u[i - 1] + u[i - 2]) / dx;
            let r = (u[i + 2] - 2.0 * u[i + 1] + u[i]) / dx;
            back += 0.5 * minmod(l, c);
            fwd -= 0.5 * minmod(r, c);
        }
        out[i] = -(bl * back + br * fwd);
    }
}

/// Linear second-order upwind rate `-(v m)_x` with face velocities `vf`;
/// the seam face carries no flux. Not positivity preserving, so it serves the
/// operator evaluations rather than the time steppers.
pub fn upwind2_density_rate(m: &[f64], vf: &[f64], dx: f64, out: &mut [f64]) {
    let n = m.len();
    let at = |i: isize| m[i.rem_euclid(n as isize) as usize];
    let mut left = 0.0;
    for i in 0..n {
        let right = if i + 1 < n {
            let (v, j) = (vf[i], i as isize);
            v.max(0.0) * (1.5 * at(j) - 0.5 * at(j - 1)) + v.min(0.0) * (1.5 * at(j + 1) - 0.5 * at(j + 2))
        } else {
            0.0
        };
        out[i] = -(right - left) / dx;
        left = right;
    }
}

/// Exact transpose of [`upwind2_density_rate`]: `out = R^T u`.
pub fn upwind2_transpose(u: &[f64], vf: &[f64], dx: f64, out: &mut [f64]) {
    let n = u.len();
    let idx = |i: isize| i.rem_euclid(n as isize) as usize;
    out.iter_mut().for_each(|o| *o = 0.0);
    for f in 0..n - 1 {
        let d = (u[f + 1] - u[f]) / dx;
        let (vp, vm, j) = (vf[f].max(0.0) * d, vf[f].min(0.0) * d, f as isize);
        out[idx(j)] += 1.5 * vp;
        out[idx(j - 1)] -= 0.5 * vp;
        out[idx(j + 1)] += 1.5 * vm;
        out[idx(j + 2)] -= 0.5 * vm;
    }
}

/// Face midpoints `x_i + dx/2` of a 1-D axis (the last one is the seam).
pub fn faces(xs: &[f64], dx: f64) -> Vec<f64> {
    xs.iter().map(|x| x + 0.5 * dx).collect()
}

/// Which transport equation to advance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `m_t = -(v m)_x`.
    Density,
    /// `u_s = -b u_x`.
    Adjoint,
}

/// Explicit transport over `tau`: forward Euler for upwind, Heun for the
/// limited scheme. `vel` holds face values of `v` for densities and of `b` for
/// the adjoint.
pub fn advance(
    state: &mut [f64],
    vel: &[f64],
    dx: f64,
    tau: f64,
    scheme: TransportScheme,
    orientation: Orientation,
    scratch: &mut Scratch,
) {
    let n = state.len();
    scratch.ensure(n);
    let rate = |s: &[f64], out: &mut [f64]| match orientation {
        Orientation::Density => density_rate(s, vel, dx, scheme, out),
        Orientation::Adjoint => adjoint_rate(s, vel, dx, scheme, out),
    };
    match scheme {
        TransportScheme::Upwind => {
            rate(state, &mut scratch.k1);
            for (s, k) in state.iter_mut().zip(&scratch.k1) {
                *s += tau * k;
            }
        }
        TransportScheme::Muscl => {
            rate(state, &mut scratch.k1);
            for i in 0..n {
                scratch.stage[i] = state[i] + tau * scratch.k1[i];
            }
            rate(&scratch.stage, &mut scratch.k2);
            for i in 0..n {
                state[i] += 0.5 * tau * (scratch.k1[i] + scratch.k2[i]);
            }
        }
    }
}

/// Variable diffusion over `tau` with explicit sub-steps below the parabolic limit.
/// Densities follow `m_t = (S m)_xx`, the adjoint `u_s = S u_xx`, `S = Σ^2`.
pub fn sigma_diffusion(state: &mut [f64], s: &[f64], dx: f64, tau: f64, orientation: Orientation, scratch: &mut Scratch) {
    let n = state.len();
    let smax = s.iter().fold(0.0f64, |a, b| a.max(*b));
    if smax == 0.0 || tau == 0.0 {
        return;
    }
    scratch.ensure(n);
    let limit = 0.45 * dx * dx / smax;
    let steps = (tau / limit).ceil().max(1.0) as usize;
    let h = tau / steps as f64;
    let c = h / (dx * dx);
    for _ in 0..steps {
        let k = &mut scratch.k1;
        for i in 0..n {
            let im = if i == 0 { n - 1 } else { i - 1 };
            let ip = if i + 1 == n { 0 } else { i + 1 };
            k[i] = match orientation {
                Orientation::Density => s[ip] * state[ip] - 2.0 * s[i] * state[i] + s[im] * state[im],
                Orientation::Adjoint => s[i] * (state[ip] - 2.0 * state[i] + state[im]),
            };
        }
        for (x, d) in state.iter_mut().zip(k.iter()) {
            *x += c * d;
        }
    }
}

/// Reusable work buffers.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    stage: Vec<f64>,
}

impl Scratch {
    fn ensure(&mut self, n: usize) {
        if self.k1.len() != n {
            self.k1 = vec![0.0; n];
            self.k2 = vec![0.0; n];
            self.stage = vec![0.0; n];
        }
    }
}
