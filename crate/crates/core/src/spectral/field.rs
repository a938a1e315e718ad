use num_complex::Complex64;

use super::{Fft2, Grid};
use crate::error::{Error, Result};

/// Scalar field sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field value at index {pos}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x₁, x₂)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let values = (0..grid.len())
            .map(|idx| f(grid.coord(idx % n), grid.coord(idx / n)))
            .collect();
        Self { grid, values }
    }

    pub(crate) fn from_values_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
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

    /// Value at `(i, j)` with periodic wrap.
    pub fn at(&self, i: i64, j: i64) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(Σ θ² Δx²)^½`.
    pub fn l2_norm(&self) -> f64 {
        let dx = self.grid.dx();
        (self.values.iter().map(|v| v * v).sum::<f64>() * dx * dx).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn to_spectral(&self) -> SpectralField {
        let mut data: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Fft2::get(self.grid.n()).forward(&mut data);
        SpectralField {
            grid: self.grid,
            coeffs: data,
        }
    }
}

/// Spectral coefficients of a real field (unnormalized DFT sums).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Wraps raw coefficients; the caller guarantees conjugate symmetry.
    pub fn from_coefficients(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Config(format!(
                "spectral field has {} coefficients, grid needs {}",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of wavevector `(k₁, k₂)`.
    pub fn coeff(&self, k1: i64, k2: i64) -> Complex64 {
        self.coeffs[self.grid.index(k1, k2)]
    }

    /// Spatial mean, `θ̂(0)/n²`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re / self.grid.len() as f64
    }

    pub fn to_real(&self) -> RealField {
        let mut data = self.coeffs.clone();
        Fft2::get(self.grid.n()).inverse(&mut data);
        RealField::from_values_unchecked(self.grid, data.into_iter().map(|c| c.re).collect())
    }

    /// Largest `|θ̂(k) - conj θ̂(-k)|` relative to the largest coefficient.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for idx in 0..self.coeffs.len() {
            let (k1, k2) = self.grid.wavevector(idx);
            let mirror = self.grid.index(-k1, -k2);
            worst = worst.max((self.coeffs[idx] - self.coeffs[mirror].conj()).norm());
            scale = scale.max(self.coeffs[idx].norm());
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Pair of scalar fields on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x1: RealField,
    pub x2: RealField,
}

impl VectorField {
    pub fn new(x1: RealField, x2: RealField) -> Result<Self> {
        if x1.grid() != x2.grid() {
            return Err(Error::Config("vector components on different grids".into()));
        }
        Ok(Self { x1, x2 })
    }

    pub fn grid(&self) -> Grid {
        self.x1.grid()
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> RealField {
        let values = self
            .x1
            .values()
            .iter()
            .zip(self.x2.values())
            .map(|(a, b)| a.hypot(*b))
            .collect();
        RealField::from_values_unchecked(self.grid(), values)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.x1
            .values()
            .iter()
            .zip(self.x2.values())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn round_trip_random_field() {
        let g = Grid::new(64).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let vals: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = RealField::new(g, vals).unwrap();
        let spec = f.to_spectral();
        assert!(spec.conjugate_asymmetry() < 1e-13);
        let back = spec.to_real();
        let err = f
            .values()
            .iter()
            .zip(back.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err / f.max_abs() < 1e-12, "round trip error {err:e}");
    }

    #[test]
    fn single_mode_coefficient() {
        let g = Grid::new(32).unwrap();
        let f = RealField::from_fn(g, |x, _| x.sin());
        let s = f.to_spectral();
        let nn = g.len() as f64;
        // sin x = (e^{ix} - e^{-ix}) / 2i
        assert!((s.coeff(1, 0) - Complex64::new(0.0, -nn / 2.0)).norm() < 1e-9);
        assert!((s.coeff(-1, 0) - Complex64::new(0.0, nn / 2.0)).norm() < 1e-9);
        assert!(s.mean().abs() < 1e-14);
    }

    #[test]
    fn rejects_non_finite() {
        let g = Grid::new(32).unwrap();
        let mut v = vec![0.0; g.len()];
        v[3] = f64::NAN;
        assert!(RealField::new(g, v).is_err());
    }
}
