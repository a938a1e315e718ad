//! Periodic 2-D grids, transforms, Fourier multipliers and the pointwise
//! dissipation functionals.
//!
//! Fields live on the torus `[0, 2π)²` sampled at `n × n` points. Arrays are
//! row-major with `x₁` as the fast index: entry `j·n + i` is the point
//! `(i·Δx, j·Δx)`. Spectral coefficients are unnormalized DFT sums
//! `θ̂(k) = Σₓ θ(x) e^{-ik·x}`, so the Fourier-series coefficient is `θ̂(k)/n²`.

mod dissipation;
mod field;
mod grid;
mod ops;
mod transform;

pub use dissipation::{pointwise_dissipation_d, pointwise_dissipation_dh, DissipationOperator, GridShift};
pub use field::{RealField, SpectralField, VectorField};
pub use grid::Grid;
pub(crate) use ops::dealias_in_place;
pub use ops::{
    apply_multiplier, compute_velocity, dealias, gradient, spectral_divergence_ratio, velocity_coefficients,
};
pub use ops::{gradient_coefficients, kept_by_two_thirds};
pub use transform::Fft2;
