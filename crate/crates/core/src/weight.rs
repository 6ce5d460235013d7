use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{param, LevyError, Result};
use crate::interp::PointFunction;

/// Japanese bracket `sqrt(1 + r^2)`.
pub fn bracket(r: f64) -> f64 {
    (1.0 + r * r).sqrt()
}

/// Radial weight profile supplied by the caller.
#[derive(Clone)]
pub struct CustomWeight {
    label: String,
    profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomWeight").field("label", &self.label).finish()
    }
}

/// Weight `phi(x)` as a function of `|x|`.
#[derive(Debug, Clone)]
pub enum WeightFunction {
    /// `<x>^k`.
    Power { k: f64 },
    /// `exp(mu <x>^k)`.
    Exponential { mu: f64, k: f64 },
    /// Arbitrary radial profile `r -> phi(r)`.
    Custom(CustomWeight),
}

impl WeightFunction {
    pub fn power(k: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 0.0) {
            return param(format!("power weight needs k >= 0, got {k}"));
        }
        Ok(Self::Power { k })
    }

    pub fn exponential(mu: f64, k: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0 && k.is_finite() && k > 0.0) {
            return param(format!("exponential weight needs mu > 0 and k > 0, got ({mu}, {k})"));
        }
        Ok(Self::Exponential { mu, k })
    }

    /// Radial weight from a closure; the caller guarantees `phi >= 1` and monotonicity.
    pub fn custom(label: impl Into<String>, profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(CustomWeight {
            label: label.into(),
            profile: Arc::new(profile),
        })
    }

    /// Value at radius `r = |x|`.
    pub fn eval_radius(&self, r: f64) -> f64 {
        match self {
            Self::Power { k } => {
                if *k == 0.0 {
                    1.0
                } else {
                    bracket(r).powf(*k)
                }
            }
            Self::Exponential { mu, k } => (mu * bracket(r).powf(*k)).exp(),
            Self::Custom(c) => (c.profile)(r.abs()),
        }
    }

    /// Value at a point given by its coordinates.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.eval_radius(r)
    }

    /// Weight at every node of a grid.
    pub fn sample(&self, grid: &crate::grid::Grid) -> Vec<f64> {
        (0..grid.len()).map(|i| self.eval_radius(grid.radius(i))).collect()
    }

    /// Value, first and second derivative along a line through the origin.
    pub fn derivatives(&self, x: f64) -> (f64, f64, f64) {
        match self {
            Self::Power { k } => {
                let s = bracket(x);
                let g = s.powf(*k);
                let g1 = k * s.powf(k - 1.0);
                let g2 = k * (k - 1.0) * s.powf(k - 2.0);
                chain(x, s, g, g1, g2)
            }
            Self::Exponential { mu, k } => {
                let s = bracket(x);
                let g = (mu * s.powf(*k)).exp();
                let a = mu * k * s.powf(k - 1.0);
                let g1 = a * g;
                let g2 = (mu * k * (k - 1.0) * s.powf(k - 2.0) + a * a) * g;
                chain(x, s, g, g1, g2)
            }
            Self::Custom(c) => {
                let f = |y: f64| (c.profile)(y.abs());
                let h = 1e-4 * (1.0 + x.abs());
                let f0 = f(x);
                let fp = f(x + h);
                let fm = f(x - h);
                (f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
            }
        }
    }

    /// Growth exponent `k` when the weight is a power of the bracket.
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            Self::Power { k } => Some(*k),
            _ => None,
        }
    }

    /// Column-safe label used in CSV headers, e.g. `power_0.5` or `exp_0.5_1`.
    pub fn label(&self) -> String {
        match self {
            Self::Power { k } => format!("power_{k}"),
            Self::Exponential { mu, k } => format!("exp_{mu}_{k}"),
            Self::Custom(c) => c.label.clone(),
        }
    }
}

/// Compose radial derivatives of `g(<x>)` into derivatives in `x`.
fn chain(x: f64, s: f64, g: f64, g1: f64, g2: f64) -> (f64, f64, f64) {
    let ds = x / s;
    let dds = 1.0 / (s * s * s);
    (g, g1 * ds, g2 * ds * ds + g1 * dds)
}

impl PointFunction for WeightFunction {
    fn value(&self, x: f64) -> f64 {
        self.eval_radius(x.abs())
    }

    fn d1(&self, x: f64) -> f64 {
        self.derivatives(x).1
    }

    fn d2(&self, x: f64) -> f64 {
        self.derivatives(x).2
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { k } => write!(f, "power({k})"),
            Self::Exponential { mu, k } => write!(f, "exponential({mu},{k})"),
            Self::Custom(c) => write!(f, "custom({})", c.label),
        }
    }
}

impl FromStr for WeightFunction {
    type Err = LevyError;

    /// Parses `power(k)` or `exponential(mu,k)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || LevyError::Parameter(format!("cannot parse weight '{s}'"));
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = &s[..open];
        let args: Vec<f64> = s[open + 1..s.len() - 1]
            .split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (name, args.as_slice()) {
            ("power", [k]) => Self::power(*k),
            ("exponential" | "exp", [mu, k]) => Self::exponential(*mu, *k),
            _ => Err(bad()),
        }
    }
}
