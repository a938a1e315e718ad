//! The pointwise dissipation functional
//!
//! `D[f](x) = Σ_{y≠x} |f(x) − f(y)|² k_δ(|x−y|) / |x−y|² Δx²`
//!
//! with minimum-image distances and `k_δ(r) = k(max(r, δ))`. Expanding the
//! square gives three periodic convolutions with the weight
//! `W(z) = k_δ(|z|)/|z|²`:
//!
//! `D = S·|f|² + W∗|f|² − 2 f·(W∗f)`, `S = Σ_z W(z) Δx²`,
//!
//! each evaluated by FFT.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Fft2, Grid, RealField, VectorField};
use crate::error::{Error, Result};
use crate::symbols::RadialFn;

/// Shift by whole grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridShift {
    pub i1: i64,
    pub i2: i64,
}

impl GridShift {
    pub fn new(i1: i64, i2: i64) -> Self {
        Self { i1, i2 }
    }

    /// Converts a physical shift; each component must be a multiple of `Δx`.
    pub fn from_physical(grid: Grid, h: (f64, f64)) -> Result<Self> {
        let dx = grid.dx();
        let snap = |v: f64| -> Result<i64> {
            let cells = v / dx;
            let rounded = cells.round();
            if (cells - rounded).abs() > 1e-9 * cells.abs().max(1.0) {
                Err(Error::Domain(format!(
                    "shift component {v} is not a multiple of the grid spacing {dx}"
                )))
            } else {
                Ok(rounded as i64)
            }
        };
        Ok(Self::new(snap(h.0)?, snap(h.1)?))
    }

    pub fn is_zero(&self) -> bool {
        self.i1 == 0 && self.i2 == 0
    }

    /// Minimum-image length on the torus.
    pub fn length(&self, grid: Grid) -> f64 {
        let n = grid.n() as i64;
        let a = grid.min_image(self.i1.rem_euclid(n) as usize) as f64;
        let b = grid.min_image(self.i2.rem_euclid(n) as usize) as f64;
        a.hypot(b) * grid.dx()
    }

    /// `θ(x + h) − θ(x)` with periodic wrap.
    pub fn difference(&self, theta: &RealField) -> RealField {
        let grid = theta.grid();
        let n = grid.n() as i64;
        let v = theta.values();
        let values = (0..grid.len())
            .map(|idx| {
                let (i, j) = ((idx as i64) % n, (idx as i64) / n);
                v[grid.index(i + self.i1, j + self.i2)] - v[idx]
            })
            .collect();
        RealField::from_values_unchecked(grid, values)
    }
}

/// Precomputed convolution weight for one grid, kernel and regularization.
#[derive(Debug, Clone)]
pub struct DissipationOperator {
    grid: Grid,
    delta: f64,
    /// `Σ_z W(z) Δx²`.
    total_weight: f64,
    /// DFT of the weight array.
    weight_hat: Vec<Complex64>,
}

impl DissipationOperator {
    /// `delta` must be at least `Δx/2`.
    pub fn new<K: RadialFn + ?Sized>(grid: Grid, kernel: &K, delta: f64) -> Result<Self> {
        let dx = grid.dx();
        if !(delta >= 0.5 * dx) || !delta.is_finite() {
            return Err(Error::Config(format!(
                "regularization length {delta} below half the grid spacing {}",
                0.5 * dx
            )));
        }
        let n = grid.n();
        let mut weight = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (idx, w) in weight.iter_mut().enumerate().skip(1) {
            let a = grid.min_image(idx % n) as f64;
            let b = grid.min_image(idx / n) as f64;
            let r = a.hypot(b) * dx;
            w.re = kernel.eval(r.max(delta)) / (r * r);
        }
        // Fixed-order sum for reproducibility.
        let total_weight = weight.iter().map(|w| w.re).sum::<f64>() * dx * dx;
        Fft2::get(n).forward(&mut weight);
        Ok(Self {
            grid,
            delta,
            total_weight,
            weight_hat: weight,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Symbol of the regularized operator on the grid,
    /// `P_num(k) = Δx² (Ŵ(0) − Ŵ(k))`, indexed like spectral coefficients.
    pub fn discrete_symbol(&self) -> Vec<f64> {
        let dx2 = self.grid.dx().powi(2);
        let w0 = self.weight_hat[0].re;
        self.weight_hat.iter().map(|w| dx2 * (w0 - w.re)).collect()
    }

    /// `(W ∗ f)(x) = Σ_z W(z) f(x − z) Δx²`.
    fn convolve(&self, f: &[f64]) -> Vec<f64> {
        let fft = Fft2::get(self.grid.n());
        let mut data: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward(&mut data);
        for (d, w) in data.iter_mut().zip(&self.weight_hat) {
            *d *= w;
        }
        fft.inverse(&mut data);
        let dx2 = self.grid.dx().powi(2);
        data.into_iter().map(|c| c.re * dx2).collect()
    }

    /// Dissipation density of a multi-component field, before clamping.
    pub fn apply_raw(&self, components: &[&RealField]) -> Result<RealField> {
        for c in components {
            if c.grid() != self.grid {
                return Err(Error::Config("field grid does not match dissipation operator".into()));
            }
        }
        let len = self.grid.len();
        let mut sq = vec![0.0; len];
        for c in components {
            for (s, v) in sq.iter_mut().zip(c.values()) {
                *s += v * v;
            }
        }
        let conv_sq = self.convolve(&sq);
        let mut out: Vec<f64> = sq
            .iter()
            .zip(&conv_sq)
            .map(|(s, cs)| self.total_weight * s + cs)
            .collect();
        for c in components {
            let conv = self.convolve(c.values());
            for ((o, v), cv) in out.iter_mut().zip(c.values()).zip(&conv) {
                *o -= 2.0 * v * cv;
            }
        }
        Ok(RealField::from_values_unchecked(self.grid, out))
    }

    /// Dissipation density clamped at zero, with the largest clamped magnitude
    /// relative to `max |D|`.
    pub fn apply_with_clamp(&self, components: &[&RealField]) -> Result<(RealField, f64)> {
        let mut raw = self.apply_raw(components)?;
        let scale = raw.max_abs();
        let mut clamped = 0.0f64;
        for v in raw.values_mut() {
            if *v < 0.0 {
                clamped = clamped.max(-*v);
                *v = 0.0;
            }
        }
        let rel = if scale > 0.0 { clamped / scale } else { 0.0 };
        Ok((raw, rel))
    }

    pub fn apply_vector(&self, field: &VectorField) -> Result<RealField> {
        Ok(self.apply_with_clamp(&[&field.x1, &field.x2])?.0)
    }

    pub fn apply_scalar(&self, field: &RealField) -> Result<RealField> {
        Ok(self.apply_with_clamp(&[field])?.0)
    }
}

/// `D(x)` for a gradient field.
pub fn pointwise_dissipation_d<K: RadialFn + ?Sized>(
    grad_theta: &VectorField,
    kernel: &K,
    delta: f64,
) -> Result<RealField> {
    DissipationOperator::new(grad_theta.grid(), kernel, delta)?.apply_vector(grad_theta)
}

/// `D_h(x)`: the density applied to `δ_hθ(x) = θ(x+h) − θ(x)` for a physical,
/// grid-aligned shift `h`.
pub fn pointwise_dissipation_dh<K: RadialFn + ?Sized>(
    theta: &RealField,
    h: (f64, f64),
    kernel: &K,
    delta: f64,
) -> Result<RealField> {
    let grid = theta.grid();
    let shift = GridShift::from_physical(grid, h)?;
    let op = DissipationOperator::new(grid, kernel, delta)?;
    op.apply_scalar(&shift.difference(theta))
}
