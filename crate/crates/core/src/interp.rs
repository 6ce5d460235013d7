//! Pointwise evaluation of smooth functions and of grid data between nodes.

use crate::field::ScalarField;
use crate::spectral::Spectral;

/// A function of one real variable with first and second derivatives.
pub trait PointFunction: Sync {
    fn value(&self, x: f64) -> f64;
    fn d1(&self, x: f64) -> f64;
    fn d2(&self, x: f64) -> f64;

    /// Breakpoints `x0 + k*h` where the function is only piecewise smooth.
    fn cells(&self) -> Option<(f64, f64)> {
        None
    }
}

/// Closure-backed smooth function with user derivatives.
pub struct Analytic<F, G, H> {
    pub f: F,
    pub df: G,
    pub d2f: H,
}

impl<F, G, H> PointFunction for Analytic<F, G, H>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
    H: Fn(f64) -> f64 + Sync,
{
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn d1(&self, x: f64) -> f64 {
        (self.df)(x)
    }
    fn d2(&self, x: f64) -> f64 {
        (self.d2f)(x)
    }
}

/// Periodic cubic Hermite interpolant of 1-D node values, with slopes from
/// spectral differentiation. Second derivatives are spectral at nodes and
/// linearly interpolated between them.
#[derive(Debug, Clone)]
pub struct HermiteInterpolant {
    x0: f64,
    h: f64,
    n: usize,
    u: Vec<f64>,
    du: Vec<f64>,
    d2u: Vec<f64>,
}

impl HermiteInterpolant {
    pub fn new(field: &ScalarField, spectral: &Spectral) -> Self {
        let g = field.grid();
        Self {
            x0: -g.half_width(),
            h: g.dx(),
            n: g.n(),
            u: field.values().to_vec(),
            du: spectral.derivative(field.values(), 1),
            d2u: spectral.derivative(field.values(), 2),
        }
    }

    /// Cell index and local coordinate in `[0, 1)`.
    #[inline]
    fn locate(&self, x: f64) -> (usize, usize, f64) {
        let s = (x - self.x0) / self.h;
        let fl = s.floor();
        let t = s - fl;
        let i = (fl as i64).rem_euclid(self.n as i64) as usize;
        let j = if i + 1 == self.n { 0 } else { i + 1 };
        (i, j, t)
    }

    /// Node values.
    pub fn nodes(&self) -> &[f64] {
        &self.u
    }

    /// Spectral first derivative at nodes.
    pub fn node_slopes(&self) -> &[f64] {
        &self.du
    }

    /// Spectral second derivative at nodes.
    pub fn node_curvatures(&self) -> &[f64] {
        &self.d2u
    }

    /// Periodic mean of the node values.
    pub fn mean(&self) -> f64 {
        self.u.iter().sum::<f64>() / self.n as f64
    }
}

impl PointFunction for HermiteInterpolant {
    #[inline]
    fn value(&self, x: f64) -> f64 {
        let (i, j, t) = self.locate(x);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.u[i] + h10 * self.h * self.du[i] + h01 * self.u[j] + h11 * self.h * self.du[j]
    }

    fn d1(&self, x: f64) -> f64 {
        let (i, j, t) = self.locate(x);
        let t2 = t * t;
        let a00 = 6.0 * t2 - 6.0 * t;
        let a10 = 3.0 * t2 - 4.0 * t + 1.0;
        let a01 = -6.0 * t2 + 6.0 * t;
        let a11 = 3.0 * t2 - 2.0 * t;
        (a00 * self.u[i] + a01 * self.u[j]) / self.h + a10 * self.du[i] + a11 * self.du[j]
    }

    fn d2(&self, x: f64) -> f64 {
        let (i, j, t) = self.locate(x);
        (1.0 - t) * self.d2u[i] + t * self.d2u[j]
    }

    fn cells(&self) -> Option<(f64, f64)> {
        Some((self.x0, self.h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn reproduces_nodes_and_smooth_functions() {
        let g = Grid::line(128, 8.0).unwrap();
        let s = Spectral::new(g);
        let f = ScalarField::from_fn(g, |x| (-x * x / 2.0).exp());
        let it = HermiteInterpolant::new(&f, &s);
        for (i, x) in g.coords().iter().enumerate() {
            assert!((it.value(*x) - f.values()[i]).abs() < 1e-15);
        }
        for &x in &[-1.23, 0.011, 2.5, 7.99] {
            let exact = (-x * x / 2.0f64).exp();
            assert!((it.value(x) - exact).abs() < 1e-5);
            assert!((it.d1(x) + x * exact).abs() < 1e-3);
        }
        // periodic wrap
        assert!((it.value(-8.0 + 16.0 * 3.0 + 0.3) - it.value(-7.7)).abs() < 1e-14);
    }
}
