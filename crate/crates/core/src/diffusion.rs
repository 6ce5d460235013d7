//! Local diffusion `-λ0 Δ - tr(Σ Σ^T D^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaKind {
    /// `Σ = 0`.
    Zero,
    /// `Σ(x) = a tanh(x) I` (radius in 2-D).
    Tanh { a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalDiffusionSpec {
    pub lambda0: f64,
    pub sigma: SigmaKind,
}

impl LocalDiffusionSpec {
    pub fn new(lambda0: f64, sigma: SigmaKind) -> Result<Self> {
        let s = Self { lambda0, sigma };
        s.validate()?;
        Ok(s)
    }

    /// Constant isotropic diffusivity, `Σ = 0`.
    pub fn isotropic(lambda0: f64) -> Result<Self> {
        Self::new(lambda0, SigmaKind::Zero)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda0.is_finite() && self.lambda0 >= 0.0) {
            return param(format!("λ0 must be >= 0, got {}", self.lambda0));
        }
        if let SigmaKind::Tanh { a } = self.sigma {
            if !a.is_finite() {
                return param("Σ amplitude must be finite");
            }
        }
        Ok(())
    }

    /// Scalar `Σ(x)` (the matrix is a multiple of the identity).
    #[inline]
    pub fn sigma_at(&self, r: f64) -> f64 {
        match self.sigma {
            SigmaKind::Zero => 0.0,
            SigmaKind::Tanh { a } => a * r.tanh(),
        }
    }

    /// `Σ(x)^2`, the coefficient of `u''` in 1-D.
    #[inline]
    pub fn sigma_sq(&self, x: f64) -> f64 {
        let s = self.sigma_at(x);
        s * s
    }

    pub fn is_variable(&self) -> bool {
        matches!(self.sigma, SigmaKind::Tanh { a } if a != 0.0)
    }

    /// Sup bound `σ0 = sup |Σ|`.
    pub fn sigma0(&self) -> f64 {
        match self.sigma {
            SigmaKind::Zero => 0.0,
            SigmaKind::Tanh { a } => a.abs(),
        }
    }

    /// Lipschitz bound `σ1`.
    pub fn sigma1(&self) -> f64 {
        self.sigma0()
    }

    /// Checks both bounds on sampled pairs.
    pub fn check_bounds(&self, xs: &[f64]) -> bool {
        let (s0, s1) = (self.sigma0(), self.sigma1());
        xs.iter().all(|&x| self.sigma_at(x).abs() <= s0 + 1e-15)
            && xs.iter().enumerate().all(|(i, &x)| {
                xs[i + 1..].iter().all(|&y| {
                    (self.sigma_at(x) - self.sigma_at(y)).abs() <= s1 * (x - y).abs() + 1e-15
                })
            })
    }
}
