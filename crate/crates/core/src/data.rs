//! Initial densities and terminal data on 1-D grids.
//!
//! Densities are normalized on the grid itself, so probability data have mass
//! one and zero-average data have mass zero up to rounding. Terminal data are
//! multiplied by a cosine taper that is one on `|x| <= L/2` and vanishes beyond
//! `0.9 L`, which keeps them continuous across the periodic seam.

use serde::{Deserialize, Serialize};

use crate::error::{param, LevyError, Result};
use crate::field::{DensityField, ScalarField};
use crate::grid::Grid;
use crate::weight::bracket;

/// Initial densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialDatum {
    /// `g(x - shift) - g(x + shift)` for two Gaussians of the given variance.
    DifferenceOfGaussians { shift: f64, variance: f64 },
    /// Single Gaussian probability density.
    Gaussian { mean: f64, variance: f64 },
    /// Uniform density on `[-half_width, half_width)`.
    Bump { half_width: f64 },
    /// Standard Gaussian minus a probability density proportional to `<x>^-exponent`.
    PowerTail { exponent: f64 },
    /// Standard Gaussian minus a probability density proportional to `exp(-rate <x>^k)`.
    ExpTail { rate: f64, k: f64 },
}

impl InitialDatum {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::DifferenceOfGaussians { shift, variance } => shift.is_finite() && variance > 0.0,
            Self::Gaussian { mean, variance } => mean.is_finite() && variance > 0.0,
            Self::Bump { half_width } => half_width > 0.0,
            Self::PowerTail { exponent } => exponent > 1.0,
            Self::ExpTail { rate, k } => rate > 0.0 && k > 0.0,
        };
        if ok {
            Ok(())
        } else {
            param(format!("invalid initial datum {self:?}"))
        }
    }

    /// True when the datum has zero total mass.
    pub fn is_zero_average(&self) -> bool {
        !matches!(self, Self::Gaussian { .. } | Self::Bump { .. })
    }

    pub fn sample(&self, grid: &Grid) -> Result<DensityField> {
        self.validate()?;
        if grid.dim() != 1 {
            return Err(LevyError::Unsupported("initial data are defined for d = 1".into()));
        }
        let gauss = |mean: f64, var: f64| probability(grid, |x| (-(x - mean) * (x - mean) / (2.0 * var)).exp());
        let field = match *self {
            Self::DifferenceOfGaussians { shift, variance } => {
                difference(&gauss(shift, variance)?, &gauss(-shift, variance)?)
            }
            Self::Gaussian { mean, variance } => gauss(mean, variance)?,
            Self::Bump { half_width } => probability(grid, |x| if (-half_width..half_width).contains(&x) { 1.0 } else { 0.0 })?,
            Self::PowerTail { exponent } => {
                difference(&gauss(0.0, 1.0)?, &probability(grid, |x| bracket(x).powf(-exponent))?)
            }
            Self::ExpTail { rate, k } => {
                difference(&gauss(0.0, 1.0)?, &probability(grid, |x| (-rate * bracket(x).powf(k)).exp())?)
            }
        };
        Ok(field)
    }
}

fn probability(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<DensityField> {
    DensityField::from_fn(*grid, f).normalized()
}

fn difference(a: &DensityField, b: &DensityField) -> DensityField {
    let v = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
    DensityField::from_parts(*a.grid(), v, 0.0)
}

/// Terminal data for the backward problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TerminalDatum {
    /// `tanh(x)`.
    Tanh,
    /// `min(|x|, clip)`.
    Ramp { clip: f64 },
    /// Indicator of `[-a, a]` smoothed by a Gaussian of the given width.
    SmoothedIndicator { a: f64, width: f64 },
    /// `x` itself (growth one), tapered like every datum.
    Linear,
    /// The constant `c`.
    Constant { c: f64 },
}

impl TerminalDatum {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Ramp { clip } => clip > 0.0,
            Self::SmoothedIndicator { a, width } => a > 0.0 && width > 0.0,
            Self::Constant { c } => c.is_finite(),
            Self::Tanh | Self::Linear => true,
        };
        if ok {
            Ok(())
        } else {
            param(format!("invalid terminal datum {self:?}"))
        }
    }

    /// Untapered profile.
    pub fn profile(&self, x: f64) -> f64 {
        match *self {
            Self::Tanh => x.tanh(),
            Self::Ramp { clip } => x.abs().min(clip),
            Self::SmoothedIndicator { a, width } => {
                let s = std::f64::consts::SQRT_2 * width;
                0.5 * (erf((x + a) / s) - erf((x - a) / s))
            }
            Self::Linear => x,
            Self::Constant { c } => c,
        }
    }

    /// Tapered samples on the grid; constants are left untouched.
    pub fn sample(&self, grid: &Grid) -> Result<ScalarField> {
        self.validate()?;
        if grid.dim() != 1 {
            return Err(LevyError::Unsupported("terminal data are defined for d = 1".into()));
        }
        if let Self::Constant { c } = *self {
            return Ok(ScalarField::constant(*grid, c));
        }
        let l = grid.half_width();
        Ok(ScalarField::from_fn(*grid, |x| self.profile(x) * taper(x, l)))
    }
}

/// One on `|x| <= L/2`, a half cosine down to zero at `0.9 L`, zero beyond.
pub fn taper(x: f64, half_width: f64) -> f64 {
    let (a, b) = (0.5 * half_width, 0.9 * half_width);
    let r = x.abs();
    if r <= a {
        1.0
    } else if r >= b {
        0.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI * (r - a) / (b - a)).cos())
    }
}

fn erf(x: f64) -> f64 {
    statrs::function::erf::erf(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::line(256, 8.0).unwrap()
    }

    #[test]
    fn densities_have_the_advertised_mass() {
        let g = grid();
        for d in [
            InitialDatum::DifferenceOfGaussians { shift: 1.0, variance: 1.0 },
            InitialDatum::PowerTail { exponent: 2.0 },
            InitialDatum::ExpTail { rate: 0.5, k: 1.0 },
        ] {
            assert!(d.sample(&g).unwrap().mass().abs() < 1e-14);
        }
        for d in [
            InitialDatum::Gaussian { mean: 0.5, variance: 2.0 },
            InitialDatum::Bump { half_width: 1.0 },
        ] {
            assert!((d.sample(&g).unwrap().mass() - 1.0).abs() < 1e-14);
        }
        assert!(InitialDatum::Bump { half_width: 0.0 }.validate().is_err());
    }

    #[test]
    fn terminal_data_are_tapered() {
        let g = grid();
        let u = TerminalDatum::Linear.sample(&g).unwrap();
        assert_eq!(u.values()[g.nearest(3.0)], 3.0);
        assert_eq!(u.values()[g.nearest(-7.5)], 0.0);
        let c = TerminalDatum::Constant { c: 2.5 }.sample(&g).unwrap();
        assert!(c.values().iter().all(|v| *v == 2.5));
        let ind = TerminalDatum::SmoothedIndicator { a: 1.0, width: 1e-3 };
        assert!((ind.profile(0.0) - 1.0).abs() < 1e-12 && ind.profile(2.0).abs() < 1e-12);
        assert_eq!(taper(6.0, 8.0), 0.5 * (1.0 + (std::f64::consts::PI * 2.0 / 3.2).cos()));
    }
}
