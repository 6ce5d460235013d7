//! Confining drifts `b(t, x)`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::weight::bracket;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftKind {
    /// `b = x`.
    Ou,
    /// `b = α x <x>^{γ-2}`.
    Power,
    /// Power drift plus `A sin(x_i + t)` in every component.
    PerturbedPower,
    /// `b = 0`.
    Zero,
}

/// Drift with its declared confinement and one-sided constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub kind: DriftKind,
    pub alpha: f64,
    pub gamma: f64,
    /// Radius beyond which confinement is declared.
    pub radius: f64,
    /// One-sided Lipschitz defect `c0`.
    pub c0: f64,
    /// Hölder slack `δ` of the refined one-sided condition.
    pub delta: f64,
    /// Perturbation amplitude `A`.
    pub amplitude: f64,
}

impl DriftSpec {
    pub fn zero() -> Self {
        Self {
            kind: DriftKind::Zero,
            alpha: 0.0,
            gamma: 2.0,
            radius: 1.0,
            c0: 0.0,
            delta: 0.5,
            amplitude: 0.0,
        }
    }

    pub fn ou() -> Self {
        Self {
            kind: DriftKind::Ou,
            alpha: 1.0,
            ..Self::zero()
        }
    }

    pub fn power(alpha: f64, gamma: f64) -> Result<Self> {
        let s = Self {
            kind: DriftKind::Power,
            alpha,
            gamma,
            ..Self::zero()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn perturbed_power(alpha: f64, gamma: f64, amplitude: f64) -> Result<Self> {
        let s = Self {
            kind: DriftKind::PerturbedPower,
            alpha,
            gamma,
            amplitude,
            c0: 2.0 * amplitude.abs(),
            ..Self::zero()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.gamma, self.radius, self.c0, self.delta, self.amplitude]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return param("drift parameters must be finite");
        }
        if self.kind != DriftKind::Zero && !(self.alpha > 0.0) {
            return param(format!("confinement strength α must be positive, got {}", self.alpha));
        }
        if !(self.gamma > 0.0) {
            return param(format!("confinement exponent γ must be positive, got {}", self.gamma));
        }
        if !(self.radius > 0.0) {
            return param(format!("confinement radius R must be positive, got {}", self.radius));
        }
        if self.c0 < 0.0 {
            return param(format!("one-sided constant c0 must be >= 0, got {}", self.c0));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return param(format!("δ must lie in (0, 1), got {}", self.delta));
        }
        if self.kind == DriftKind::Ou && self.gamma != 2.0 {
            return param("the OU drift has γ = 2");
        }
        Ok(())
    }

    pub fn is_time_dependent(&self) -> bool {
        self.kind == DriftKind::PerturbedPower && self.amplitude != 0.0
    }

    /// Confinement strength `α`.
    pub fn alpha(&self) -> f64 {
        match self.kind {
            DriftKind::Ou => 1.0,
            _ => self.alpha,
        }
    }

    /// Confinement exponent `γ`.
    pub fn gamma(&self) -> f64 {
        match self.kind {
            DriftKind::Ou => 2.0,
            _ => self.gamma,
        }
    }

    /// Radial factor `g(|x|)` with `b = g(|x|) x` for the unperturbed part.
    #[inline]
    fn radial(&self, r: f64) -> f64 {
        match self.kind {
            DriftKind::Zero => 0.0,
            DriftKind::Ou => 1.0,
            DriftKind::Power | DriftKind::PerturbedPower => {
                if self.gamma == 2.0 {
                    self.alpha
                } else {
                    self.alpha * bracket(r).powf(self.gamma - 2.0)
                }
            }
        }
    }

    /// One-dimensional drift.
    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let mut b = self.radial(x.abs()) * x;
        if self.kind == DriftKind::PerturbedPower {
            b += self.amplitude * (x + t).sin();
        }
        b
    }

    /// Drift at a point of the plane.
    pub fn eval2(&self, t: f64, p: [f64; 2]) -> [f64; 2] {
        let g = self.radial(p[0].hypot(p[1]));
        let mut b = [g * p[0], g * p[1]];
        if self.kind == DriftKind::PerturbedPower {
            b[0] += self.amplitude * (p[0] + t).sin();
            b[1] += self.amplitude * (p[1] + t).sin();
        }
        b
    }

    /// Drift at every node of a 1-D axis.
    pub fn sample(&self, t: f64, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(t, x)).collect()
    }

    /// `dB/dx` in 1-D.
    pub fn derivative(&self, t: f64, x: f64) -> f64 {
        let base = match self.kind {
            DriftKind::Zero => 0.0,
            DriftKind::Ou => 1.0,
            _ => {
                let s2 = 1.0 + x * x;
                self.alpha * s2.powf(self.gamma / 2.0 - 2.0) * (1.0 + (self.gamma - 1.0) * x * x)
            }
        };
        if self.kind == DriftKind::PerturbedPower {
            base + self.amplitude * (x + t).cos()
        } else {
            base
        }
    }

    /// Smallest `b(t,x) x / |x|^γ` over sampled `|x| >= R` and times.
    pub fn confinement_margin(&self, radii: &[f64], times: &[f64]) -> f64 {
        let g = self.gamma();
        let mut worst = f64::INFINITY;
        for &t in times {
            for &r in radii.iter().filter(|r| **r >= self.radius) {
                for x in [r, -r] {
                    worst = worst.min(self.eval(t, x) * x / r.powf(g));
                }
            }
        }
        worst
    }

    /// Checks `b(t,x) x >= α |x|^γ` on the samples.
    pub fn check_confinement(&self, radii: &[f64], times: &[f64]) -> bool {
        self.confinement_margin(radii, times) >= self.alpha() * (1.0 - 1e-12)
    }

    /// Largest `α'` with `b x >= α' |x|^γ` for `|x| >= R`, from the closed forms.
    pub fn effective_alpha(&self) -> f64 {
        let r = self.radius;
        match self.kind {
            DriftKind::Zero => 0.0,
            DriftKind::Ou => 1.0,
            _ => {
                let g = self.gamma;
                // |x|^2 <x>^{γ-2} / |x|^γ = (|x|/<x>)^{2-γ}; worst at R when γ < 2
                let base = if g <= 2.0 {
                    self.alpha * (r / bracket(r)).powf(2.0 - g)
                } else {
                    self.alpha
                };
                let pert = if self.kind == DriftKind::PerturbedPower {
                    if g < 1.0 && self.amplitude != 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    self.amplitude.abs() * r.powf(1.0 - g)
                } else {
                    0.0
                };
                base - pert
            }
        }
    }

    /// Smallest `c` with `(b(x) - b(y))(x - y) >= -c |x - y|` on sampled pairs.
    pub fn one_sided_defect(&self, xs: &[f64], times: &[f64]) -> f64 {
        let mut c = 0.0f64;
        for &t in times {
            for (i, &x) in xs.iter().enumerate() {
                for &y in &xs[i + 1..] {
                    let d = x - y;
                    if d == 0.0 {
                        continue;
                    }
                    let v = (self.eval(t, x) - self.eval(t, y)) * d / d.abs();
                    c = c.max(-v);
                }
            }
        }
        c
    }

    /// Checks the declared `c0` against sampled pairs.
    pub fn check_one_sided(&self, xs: &[f64], times: &[f64]) -> bool {
        self.one_sided_defect(xs, times) <= self.c0 + 1e-12
    }

    /// Checks `(b(x)-b(y))(x-y) >= -c0 |x-y| (|x-y| ∧ 1)^{1-σ+δ}` on sampled pairs.
    pub fn check_one_sided_holder(&self, sigma: f64, xs: &[f64], times: &[f64]) -> bool {
        let e = 1.0 - sigma + self.delta;
        for &t in times {
            for (i, &x) in xs.iter().enumerate() {
                for &y in &xs[i + 1..] {
                    let d = x - y;
                    let lhs = (self.eval(t, x) - self.eval(t, y)) * d;
                    let rhs = -self.c0 * d.abs() * d.abs().min(1.0).powf(e);
                    if lhs < rhs - 1e-12 {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `max |b(t, x)|` over the given nodes.
    pub fn max_speed(&self, t: f64, xs: &[f64]) -> f64 {
        xs.iter().fold(0.0, |m, &x| m.max(self.eval(t, x).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<f64> {
        (0..200).map(|i| -10.0 + 0.1 * i as f64).collect()
    }

    #[test]
    fn ou_confinement_is_exact() {
        let b = DriftSpec::ou();
        let radii: Vec<f64> = (1..50).map(|i| i as f64 * 0.5).collect();
        assert_eq!(b.confinement_margin(&radii, &[0.0]), 1.0);
        assert!(b.check_confinement(&radii, &[0.0, 1.0]));
        assert!(b.check_one_sided(&samples(), &[0.0]));
    }

    #[test]
    fn power_drift_effective_alpha_holds() {
        let b = DriftSpec::power(1.0, 1.5).unwrap();
        let radii: Vec<f64> = (0..400).map(|i| 1.0 + i as f64 * 0.25).collect();
        let a = b.effective_alpha();
        assert!(a > 0.0 && a < 1.0);
        assert!(b.confinement_margin(&radii, &[0.0]) >= a * (1.0 - 1e-12));
    }

    #[test]
    fn perturbation_is_one_sided_bounded() {
        let b = DriftSpec::perturbed_power(1.0, 2.0, 0.3).unwrap();
        assert!(b.is_time_dependent());
        assert!(b.check_one_sided(&samples(), &[0.0, 0.7, 2.0]));
        let d = DriftSpec::power(1.0, 1.2).unwrap();
        for &x in &[-3.0, 0.2, 4.0] {
            let h = 1e-6;
            let fd = (d.eval(0.0, x + h) - d.eval(0.0, x - h)) / (2.0 * h);
            assert!((fd - d.derivative(0.0, x)).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_invalid() {
        assert!(DriftSpec::power(0.0, 1.0).is_err());
        assert!(DriftSpec::power(1.0, -1.0).is_err());
    }
}
