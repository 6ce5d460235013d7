//! Numerical laboratory for Fokker-Planck equations driven by Lévy noise.
//!
//! Grid solvers for densities and for the backward adjoint problem, particle
//! simulation with stable jumps, Lyapunov checks on the whole line, and decay
//! fitting. Everything is one-dimensional unless a function says otherwise.

pub mod adjoint;
pub mod data;
pub mod diffusion;
pub mod drift;
pub mod error;
pub mod field;
pub mod forward;
pub mod grid;
pub mod interp;
pub mod levy;
pub mod lyapunov;
pub mod norms;
pub mod operators;
pub mod particles;
pub mod quadrature;
pub mod rates;
pub mod spectral;
pub mod transport;
pub mod weight;

pub use adjoint::{AdjointOptions, AdjointRun, DualityReport};
pub use data::{InitialDatum, TerminalDatum};
pub use diffusion::{LocalDiffusionSpec, SigmaKind};
pub use drift::{DriftKind, DriftSpec};
pub use error::{LevyError, Result};
pub use field::{DensityField, ScalarField};
pub use forward::{ForwardOptions, ForwardRun, SeriesPoint};
pub use grid::Grid;
pub use levy::{LevyMeasureSpec, QuadratureOptions, TailModel};
pub use operators::GeneratorSpec;
pub use particles::{CouplingOptions, CouplingStats, ParticleEnsemble, ParticleModel, RngSpec};
pub use transport::TransportScheme;
pub use weight::WeightFunction;
