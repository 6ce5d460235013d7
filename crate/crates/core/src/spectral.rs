//! FFT plumbing and Fourier multipliers on periodic grids.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

/// Cached FFT plans for one grid. Safe to share between threads.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    xi: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n();
        Self {
            grid,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            xi: grid.wavenumbers(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Axis wavenumbers in FFT order.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// Unnormalized forward transform of real node values.
    pub fn forward(&self, u: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.fwd);
        buf
    }

    /// Inverse transform returning real parts, scaled by `1/N^d`.
    pub fn inverse(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut buf, &self.inv);
        let scale = 1.0 / self.grid.len() as f64;
        buf.into_iter().map(|c| c.re * scale).collect()
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        plan.process(buf);
        if self.grid.dim() == 2 {
            // rows are already done; transform columns through a scratch line
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = buf[i * n + j];
                }
                plan.process(&mut col);
                for i in 0..n {
                    buf[i * n + j] = col[i];
                }
            }
        }
    }

    /// Euclidean wavenumber magnitude for every FFT slot.
    pub fn xi_norms(&self) -> Vec<f64> {
        let n = self.grid.n();
        match self.grid.dim() {
            1 => self.xi.iter().map(|x| x.abs()).collect(),
            _ => (0..n * n)
                .map(|s| self.xi[s / n].hypot(self.xi[s % n]))
                .collect(),
        }
    }

    /// Multiply every mode by a real radial symbol `f(|xi|)`.
    pub fn apply_radial(&self, u: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
        let norms = self.xi_norms();
        let mut hat = self.forward(u);
        for (h, &k) in hat.iter_mut().zip(&norms) {
            *h *= f(k);
        }
        self.inverse(hat)
    }

    /// Multiply modes by a precomputed complex symbol (same slot order).
    pub fn apply_symbol(&self, u: &[f64], symbol: &[Complex64]) -> Vec<f64> {
        let mut hat = self.forward(u);
        for (h, s) in hat.iter_mut().zip(symbol) {
            *h *= s;
        }
        self.inverse(hat)
    }

    /// Spectral derivative of order `order` along a 1-D axis.
    /// Odd orders drop the Nyquist mode so real data stay real.
    pub fn derivative(&self, u: &[f64], order: u32) -> Vec<f64> {
        let n = self.grid.n();
        let mut hat = self.forward(u);
        let i = Complex64::new(0.0, 1.0);
        for (j, h) in hat.iter_mut().enumerate() {
            if order % 2 == 1 && j == n / 2 {
                *h = Complex64::new(0.0, 0.0);
            } else {
                *h *= (i * self.xi[j]).powu(order);
            }
        }
        self.inverse(hat)
    }
}
