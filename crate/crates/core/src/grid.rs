use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Uniform periodic lattice on `[-L, L)^d`.
///
/// Nodes sit at `x_i = -L + i*dx` with `dx = 2L/N`. In two dimensions values
/// are stored row-major: index `i*N + j` holds the node `(x_i, x_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    d: usize,
    n: usize,
    half_width: f64,
}

impl Grid {
    pub fn new(d: usize, n: usize, half_width: f64) -> Result<Self> {
        if d != 1 && d != 2 {
            return param(format!("dimension must be 1 or 2, got {d}"));
        }
        if n < 8 || !n.is_power_of_two() {
            return param(format!("points per axis must be a power of two >= 8, got {n}"));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return param(format!("half-width must be positive, got {half_width}"));
        }
        Ok(Self { d, n, half_width })
    }

    /// One-dimensional grid.
    pub fn line(n: usize, half_width: f64) -> Result<Self> {
        Self::new(1, n, half_width)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Volume element `dx^d`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.d as i32)
    }

    /// Total number of nodes `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of node `i` along one axis; indices wrap periodically.
    pub fn coord(&self, i: isize) -> f64 {
        let n = self.n as isize;
        let i = i.rem_euclid(n);
        -self.half_width + i as f64 * self.dx()
    }

    /// Axis coordinates `x_0 .. x_{N-1}`.
    pub fn coords(&self) -> Vec<f64> {
        (0..self.n as isize).map(|i| self.coord(i)).collect()
    }

    /// Node position as a point; unused components are zero.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        match self.d {
            1 => [self.coord(idx as isize), 0.0],
            _ => [
                self.coord((idx / self.n) as isize),
                self.coord((idx % self.n) as isize),
            ],
        }
    }

    /// Euclidean norm of the node position.
    pub fn radius(&self, idx: usize) -> f64 {
        let p = self.point(idx);
        p[0].hypot(p[1])
    }

    /// Signed integer wavenumber of FFT slot `j`.
    pub fn mode(&self, j: usize) -> isize {
        let n = self.n as isize;
        let j = j as isize;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Angular wavenumber `pi*j/L` of FFT slot `j`; the Nyquist slot is positive.
    pub fn wavenumber(&self, j: usize) -> f64 {
        PI * self.mode(j) as f64 / self.half_width
    }

    /// Wavenumbers of all FFT slots along one axis.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    /// Index of the node nearest to `x` (1-D, periodic).
    pub fn nearest(&self, x: f64) -> usize {
        let s = ((x + self.half_width) / self.dx()).round() as isize;
        s.rem_euclid(self.n as isize) as usize
    }

    /// Wrap `x` into `[-L, L)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let w = 2.0 * self.half_width;
        let y = (x + self.half_width).rem_euclid(w) - self.half_width;
        if y >= self.half_width {
            -self.half_width
        } else {
            y
        }
    }

    /// Node count per axis within the boundary monitoring band.
    pub fn boundary_band(&self) -> usize {
        (0.05 * self.n as f64).ceil() as usize
    }

    /// True when an axis index lies within the boundary band.
    pub fn in_band_axis(&self, i: usize) -> bool {
        let b = self.boundary_band();
        i < b || self.n - i <= b
    }

    /// True when the node lies within the boundary band along any axis.
    pub fn in_band(&self, idx: usize) -> bool {
        match self.d {
            1 => self.in_band_axis(idx),
            _ => self.in_band_axis(idx / self.n) || self.in_band_axis(idx % self.n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::line(6, 1.0).is_err());
        assert!(Grid::line(100, 1.0).is_err());
        assert!(Grid::line(64, 0.0).is_err());
        assert!(Grid::new(3, 64, 1.0).is_err());
    }

    #[test]
    fn spacing_and_nodes() {
        let g = Grid::line(1024, 16.0).unwrap();
        assert_eq!(g.dx() * 1024.0, 32.0);
        assert_eq!(g.coord(0), -16.0);
        assert_eq!(g.coord(1024), g.coord(0));
        assert_eq!(g.coord(-1), g.coord(1023));
        assert_eq!(g.coord(512), 0.0);
    }

    #[test]
    fn wavenumbers_fft_order() {
        let g = Grid::line(8, std::f64::consts::PI).unwrap();
        let k: Vec<isize> = (0..8).map(|j| g.mode(j)).collect();
        assert_eq!(k, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert!((g.wavenumber(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn band_counts() {
        let g = Grid::line(1024, 16.0).unwrap();
        let count = (0..1024).filter(|&i| g.in_band(i)).count();
        assert_eq!(count, 2 * g.boundary_band());
    }

    #[test]
    fn wrap_and_nearest() {
        let g = Grid::line(16, 1.0).unwrap();
        assert!((g.wrap(1.25) + 0.75).abs() < 1e-15);
        assert_eq!(g.wrap(1.0), -1.0);
        assert_eq!(g.nearest(0.99), 0);
        assert_eq!(g.nearest(0.0), 8);
    }
}
