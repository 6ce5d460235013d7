use std::marker::PhantomData;

use crate::error::{LevyError, Result};
use crate::grid::Grid;

/// Marker for test functions and adjoint solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scalar;

/// Marker for densities against Lebesgue measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Density;

/// Node values on a grid with a time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<K> {
    grid: Grid,
    values: Vec<f64>,
    time: f64,
    _kind: PhantomData<K>,
}

pub type ScalarField = Field<Scalar>;
pub type DensityField = Field<Density>;

impl<K> Field<K> {
    /// Wrap node values; rejects wrong lengths and non-finite entries.
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LevyError::Mismatch(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LevyError::Parameter(format!("non-finite value at node {i}")));
        }
        Ok(Self::from_parts(grid, values, time))
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>, time: f64) -> Self {
        Self {
            grid,
            values,
            time,
            _kind: PhantomData,
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_parts(grid, vec![0.0; grid.len()], 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self::from_parts(grid, vec![c; grid.len()], 0.0)
    }

    /// Sample a function of the node position (`[x, y]`, `y = 0` in 1-D).
    pub fn from_point_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::from_parts(grid, values, 0.0)
    }

    /// Sample a function of `x` on a 1-D grid (first coordinate in 2-D).
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_point_fn(grid, |p| f(p[0]))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Apply `f` to every node value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|&v| f(v)).collect(), self.time)
    }

    /// Linear combination `a*self + b*other` on a common grid.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(LevyError::Mismatch("fields live on different grids".into()));
        }
        let v = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self::from_parts(self.grid, v, self.time))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `sum_i a_i b_i dx^d`.
    pub fn pairing<J>(&self, other: &Field<J>) -> Result<f64> {
        if self.grid != *other.grid() {
            return Err(LevyError::Mismatch("fields live on different grids".into()));
        }
        Ok(dot(&self.values, other.values()) * self.grid.cell_volume())
    }

    /// Reinterpret the values under another marker.
    pub fn cast<J>(self) -> Field<J> {
        Field::from_parts(self.grid, self.values, self.time)
    }
}

impl DensityField {
    /// `sum_i m_i dx^d`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Total variation `sum_i |m_i| dx^d`.
    pub fn total_variation(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_volume()
    }

    /// `sum_i x_i^p m_i dx` for a 1-D density.
    pub fn moment(&self, p: i32) -> f64 {
        (0..self.len())
            .map(|i| self.grid.point(i)[0].powi(p) * self.values[i])
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    /// Mean and variance of a 1-D density normalized by its mass.
    pub fn mean_variance(&self) -> (f64, f64) {
        let m0 = self.mass();
        let m1 = self.moment(1) / m0;
        let m2 = self.moment(2) / m0;
        (m1, m2 - m1 * m1)
    }

    /// Mass within the boundary monitoring band, `sum |m_i| dx^d`.
    pub fn boundary_mass(&self) -> f64 {
        boundary_mass(&self.grid, &self.values)
    }

    /// Rescale to unit mass.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.mass();
        if !(m.is_finite() && m.abs() > 0.0) {
            return Err(LevyError::Parameter("cannot normalize a field with zero mass".into()));
        }
        Ok(self.map(|v| v / m))
    }
}

pub(crate) fn boundary_mass(grid: &Grid, values: &[f64]) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.in_band(*i))
        .map(|(_, v)| v.abs())
        .sum::<f64>()
        * grid.cell_volume()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let g = Grid::line(8, 1.0).unwrap();
        assert!(ScalarField::new(g, vec![0.0; 7], 0.0).is_err());
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(ScalarField::new(g, v, 0.0).is_err());
    }

    #[test]
    fn mass_of_indicator() {
        let g = Grid::line(64, 4.0).unwrap();
        let m = DensityField::from_fn(g, |x| if (-1.0..1.0).contains(&x) { 0.5 } else { 0.0 });
        assert!((m.mass() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_moments() {
        let g = Grid::line(1024, 16.0).unwrap();
        let s = (2.0 * std::f64::consts::PI).sqrt();
        let m = DensityField::from_fn(g, |x| (-(x - 0.5) * (x - 0.5) / 2.0).exp() / s);
        let (mean, var) = m.mean_variance();
        assert!((m.mass() - 1.0).abs() < 1e-12);
        assert!((mean - 0.5).abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_dimensional_layout() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let f = ScalarField::from_point_fn(g, |p| p[0] + 10.0 * p[1]);
        assert_eq!(f.len(), 64);
        assert_eq!(f.values()[9], g.coord(1) + 10.0 * g.coord(1));
        assert_eq!(f.values()[1], g.coord(0) + 10.0 * g.coord(1));
    }
}
