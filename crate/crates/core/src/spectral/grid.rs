use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Square periodic grid of side `2π` with `n` points per dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    /// `n` must be a power of two and at least 32.
    pub fn new(n: usize) -> Result<Self> {
        if n < 32 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= 32, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points, `n²`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        2.0 * PI
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Physical coordinate of index `i`.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Integer wavenumber of FFT index `i`, in `-n/2+1 ..= n/2`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumber used by odd-order derivatives: the Nyquist index maps to 0
    /// so that derivatives of real fields stay real.
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i) as f64
        }
    }

    /// `(k₁, k₂)` of flat spectral index `idx`.
    pub fn wavevector(&self, idx: usize) -> (i64, i64) {
        (self.wavenumber(idx % self.n), self.wavenumber(idx / self.n))
    }

    /// Euclidean magnitude `|k|` of flat spectral index `idx`.
    pub fn wavenumber_norm(&self, idx: usize) -> f64 {
        let (k1, k2) = self.wavevector(idx);
        ((k1 * k1 + k2 * k2) as f64).sqrt()
    }

    /// Minimum-image signed offset of index difference `d` (mod n).
    pub fn min_image(&self, d: usize) -> i64 {
        self.wavenumber(d % self.n)
    }

    /// Flat index of `(i, j)` with periodic wrap.
    pub fn index(&self, i: i64, j: i64) -> usize {
        let n = self.n as i64;
        (j.rem_euclid(n) * n + i.rem_euclid(n)) as usize
    }
}
