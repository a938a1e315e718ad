use num_complex::Complex64;

use super::{Grid, SpectralField, VectorField};
use crate::error::{Error, Result};
use crate::symbols::{RadialFn, VelocityMultiplier};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Multiplies every coefficient by `symbol(|k|)`, using `at_zero` for `k = 0`.
pub fn apply_multiplier<S: RadialFn + ?Sized>(
    field: &SpectralField,
    symbol: &S,
    at_zero: f64,
) -> Result<SpectralField> {
    let grid = field.grid();
    let mut out = field.clone();
    for (idx, c) in out.coefficients_mut().iter_mut().enumerate() {
        let s = if idx == 0 {
            at_zero
        } else {
            symbol.eval(grid.wavenumber_norm(idx))
        };
        if !s.is_finite() {
            let (k1, k2) = grid.wavevector(idx);
            return Err(Error::Domain(format!("symbol is not finite at k = ({k1}, {k2})")));
        }
        *c *= s;
    }
    Ok(out)
}

/// Spectral components of `u = ∇⊥ Λ⁻¹ m(Λ) θ` with `∇⊥ = (-∂₂, ∂₁)`:
/// `û(k) = i k⊥ |k|⁻¹ m(|k|) θ̂(k)`, `k⊥ = (-k₂, k₁)`, and `û(0) = 0`.
pub fn velocity_coefficients(theta: &SpectralField, mult: &VelocityMultiplier) -> (SpectralField, SpectralField) {
    let grid = theta.grid();
    let n = grid.n();
    let mut u1 = SpectralField::zeros(grid);
    let mut u2 = SpectralField::zeros(grid);
    let c = theta.coefficients();
    let (a, b) = (u1.coefficients_mut(), u2.coefficients_mut());
    for idx in 1..grid.len() {
        let k = grid.wavenumber_norm(idx);
        let psi = c[idx] * (mult.eval(k) / k);
        let d1 = grid.derivative_wavenumber(idx % n);
        let d2 = grid.derivative_wavenumber(idx / n);
        a[idx] = -I * d2 * psi;
        b[idx] = I * d1 * psi;
    }
    (u1, u2)
}

pub fn compute_velocity(theta: &SpectralField, mult: &VelocityMultiplier) -> VectorField {
    let (u1, u2) = velocity_coefficients(theta, mult);
    VectorField {
        x1: u1.to_real(),
        x2: u2.to_real(),
    }
}

/// Spectral components of `∇θ`.
pub fn gradient_coefficients(theta: &SpectralField) -> (SpectralField, SpectralField) {
    let grid = theta.grid();
    let n = grid.n();
    let mut g1 = theta.clone();
    let mut g2 = theta.clone();
    for (idx, (a, b)) in g1.coefficients_mut().iter_mut().zip(g2.coefficients_mut()).enumerate() {
        *a *= I * grid.derivative_wavenumber(idx % n);
        *b *= I * grid.derivative_wavenumber(idx / n);
    }
    (g1, g2)
}

/// `∇θ` by spectral differentiation.
pub fn gradient(theta: &SpectralField) -> VectorField {
    let (g1, g2) = gradient_coefficients(theta);
    VectorField {
        x1: g1.to_real(),
        x2: g2.to_real(),
    }
}

/// Whether index `i` survives the 2/3 rule, `|k| ≤ n/3`.
pub fn kept_by_two_thirds(grid: Grid, i: usize) -> bool {
    3 * grid.wavenumber(i).unsigned_abs() as usize <= grid.n()
}

pub(crate) fn dealias_in_place(field: &mut SpectralField) {
    let grid = field.grid();
    let n = grid.n();
    for (idx, c) in field.coefficients_mut().iter_mut().enumerate() {
        if !(kept_by_two_thirds(grid, idx % n) && kept_by_two_thirds(grid, idx / n)) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Zeroes every coefficient with `max(|k₁|, |k₂|) > n/3`.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let mut out = field.clone();
    dealias_in_place(&mut out);
    out
}

/// `max_k |k·û(k)| / max_k |û(k)|`, zero for a vanishing field.
pub fn spectral_divergence_ratio(u1: &SpectralField, u2: &SpectralField) -> f64 {
    let grid = u1.grid();
    let n = grid.n();
    let (a, b) = (u1.coefficients(), u2.coefficients());
    let mut div = 0.0f64;
    let mut size = 0.0f64;
    for idx in 0..grid.len() {
        let d = a[idx] * grid.derivative_wavenumber(idx % n) + b[idx] * grid.derivative_wavenumber(idx / n);
        div = div.max(d.norm());
        size = size.max(a[idx].norm().hypot(b[idx].norm()));
    }
    if size == 0.0 {
        0.0
    } else {
        div / size
    }
}
