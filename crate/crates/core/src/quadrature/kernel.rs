//! Physical-space kernels reconstructed from radial symbols
//!
//! The whole-space kernel is approximated by the periodic one,
//! `K(y) ≈ IFFT(σ)(y)/Δx²`, sampled on an annulus that avoids both the
//! origin cell and the periodization error near the domain edge.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Verdict, VerificationReport};
use crate::spectral::{Fft2, Grid};
use crate::symbols::{DissipationSymbol, RadialFn, VelocityMultiplier};

/// Smallest resolution accepted by [`kernel_bound_check`].
pub const MIN_KERNEL_GRID: usize = 1024;
/// Inner radius of the fitting annulus in grid cells.
pub const ANNULUS_INNER_CELLS: f64 = 8.0;
/// Largest relative change of a fitted constant under grid doubling.
pub const STABILITY_TOLERANCE: f64 = 0.25;

/// Symbol whose kernel is reconstructed.
#[derive(Debug, Clone, Copy)]
pub enum KernelSymbol {
    /// `P(|ζ|)`; the kernel is the positive weight of `∫ (f(x) − f(x−y)) K(y) dy`.
    Dissipation(DissipationSymbol),
    /// `iζ_j |ζ|⁻¹ m(|ζ|)` for `j = 1, 2`; the vector kernel of `∇Λ⁻¹m(Λ)`.
    VelocityGradient(VelocityMultiplier),
}

impl KernelSymbol {
    pub fn label(&self) -> String {
        match self {
            Self::Dissipation(p) => format!("dissipation kernel, alpha1 = {}", p.alpha1()),
            Self::VelocityGradient(m) => format!("velocity-gradient kernel, alpha2 = {}", m.alpha2()),
        }
    }

    /// Radial profile `|y|^{-d}` is multiplied by this at `1/|y|`.
    fn profile(&self, zeta: f64) -> f64 {
        match self {
            Self::Dissipation(p) => p.eval(zeta),
            Self::VelocityGradient(m) => m.eval(zeta),
        }
    }
}

/// One reconstructed kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub y: (f64, f64),
    pub radius: f64,
    /// Signed value for the scalar kernel; Euclidean norm for the vector one.
    pub value: f64,
    /// Euclidean norm of the gradient (Frobenius for the vector kernel).
    pub gradient: f64,
}

/// Fitted constants at one resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionFit {
    pub n: usize,
    pub annulus: (f64, f64),
    pub samples: usize,
    /// `sup |K(y)| |y|² / P(1/|y|)`.
    pub upper_constant: f64,
    /// `sup |∇K(y)| |y|³ / P(1/|y|)`.
    pub gradient_constant: f64,
    /// `inf K(y) |y|² / P(1/|y|)`, scalar kernel only.
    pub lower_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelBoundReport {
    pub symbol: String,
    pub fits: Vec<ResolutionFit>,
    pub report: VerificationReport,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Spectral filter `exp(−16 s³ − s⁸/(1 − s²))`, `s = |k|/(n/2)`, zero for `s ≥ 1`.
///
/// Vanishes to all orders at the inscribed circle, so the reconstruction
/// error is independent of the resolution in grid-cell units.
pub fn reconstruction_filter(grid: Grid, idx: usize) -> f64 {
    let s = grid.wavenumber_norm(idx) / (grid.n() as f64 / 2.0);
    if s >= 1.0 {
        0.0
    } else {
        (-16.0 * s.powi(3) - s.powi(8) / (1.0 - s * s)).exp()
    }
}

/// Reconstructs the kernel on an `n × n` grid and returns every grid point
/// with `inner < |y| < outer`.
#[allow(clippy::needless_range_loop)]
pub fn kernel_samples(symbol: &KernelSymbol, n: usize, inner: f64, outer: f64) -> Result<Vec<KernelSample>> {
    let grid = Grid::new(n)?;
    let fft = Fft2::get(n);
    let len = grid.len();
    let scale = 1.0 / grid.dx().powi(2);

    // Each entry of `fields` is one spectral array reconstructed to physical space.
    let mut fields: Vec<Vec<Complex64>> = Vec::new();
    match symbol {
        KernelSymbol::Dissipation(p) => {
            let mut base = vec![zero(); len];
            for (idx, c) in base.iter_mut().enumerate() {
                c.re = -p.eval(grid.wavenumber_norm(idx));
            }
            fields.push(base.clone());
            for axis in 0..2 {
                let mut d = base.clone();
                for (idx, c) in d.iter_mut().enumerate() {
                    *c *= Complex64::new(0.0, derivative_k(grid, idx, axis));
                }
                fields.push(d);
            }
        }
        KernelSymbol::VelocityGradient(m) => {
            for j in 0..2 {
                let mut base = vec![zero(); len];
                for (idx, c) in base.iter_mut().enumerate().skip(1) {
                    let norm = grid.wavenumber_norm(idx);
                    *c = Complex64::new(0.0, derivative_k(grid, idx, j) * m.eval(norm) / norm);
                }
                fields.push(base.clone());
                for axis in 0..2 {
                    let mut d = base.clone();
                    for (idx, c) in d.iter_mut().enumerate() {
                        *c *= Complex64::new(0.0, derivative_k(grid, idx, axis));
                    }
                    fields.push(d);
                }
            }
        }
    }
    for f in fields.iter_mut() {
        for (idx, c) in f.iter_mut().enumerate() {
            *c *= reconstruction_filter(grid, idx);
        }
        if f.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("kernel symbol is not finite on the grid".into()));
        }
        fft.inverse(f);
    }

    let dx = grid.dx();
    let mut out = Vec::new();
    for idx in 0..len {
        let y1 = grid.min_image(idx % n) as f64 * dx;
        let y2 = grid.min_image(idx / n) as f64 * dx;
        let radius = y1.hypot(y2);
        if radius <= inner || radius >= outer {
            continue;
        }
        let (value, gradient) = match symbol {
            KernelSymbol::Dissipation(_) => (
                fields[0][idx].re * scale,
                fields[1][idx].re.hypot(fields[2][idx].re) * scale,
            ),
            KernelSymbol::VelocityGradient(_) => {
                let v = fields[0][idx].re.hypot(fields[3][idx].re) * scale;
                let g = [1, 2, 4, 5]
                    .iter()
                    .map(|&c| fields[c][idx].re.powi(2))
                    .sum::<f64>()
                    .sqrt()
                    * scale;
                (v, g)
            }
        };
        out.push(KernelSample {
            y: (y1, y2),
            radius,
            value,
            gradient,
        });
    }
    Ok(out)
}

fn derivative_k(grid: Grid, idx: usize, axis: usize) -> f64 {
    let n = grid.n();
    grid.derivative_wavenumber(if axis == 0 { idx % n } else { idx / n })
}

fn fit(symbol: &KernelSymbol, n: usize) -> Result<ResolutionFit> {
    let grid = Grid::new(n)?;
    let inner = ANNULUS_INNER_CELLS * grid.dx();
    let outer = grid.length() / 4.0;
    let samples = kernel_samples(symbol, n, inner, outer)?;
    let mut upper = 0.0f64;
    let mut gradient = 0.0f64;
    let mut lower = f64::INFINITY;
    for s in &samples {
        let profile = symbol.profile(1.0 / s.radius);
        let base = s.radius.powi(2) / profile;
        upper = upper.max(s.value.abs() * base);
        gradient = gradient.max(s.gradient * base * s.radius);
        lower = lower.min(s.value * base);
    }
    Ok(ResolutionFit {
        n,
        annulus: (inner, outer),
        samples: samples.len(),
        upper_constant: upper,
        gradient_constant: gradient,
        lower_constant: matches!(symbol, KernelSymbol::Dissipation(_)).then_some(lower),
    })
}

fn relative_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Fits the kernel bounds at `n_grid` and `2 n_grid` and checks that the
/// constants are finite and stable.
pub fn kernel_bound_check(symbol: &KernelSymbol, n_grid: usize) -> Result<KernelBoundReport> {
    if n_grid < MIN_KERNEL_GRID || !n_grid.is_power_of_two() {
        return Err(Error::Config(format!(
            "kernel reconstruction needs a power-of-two grid of at least {MIN_KERNEL_GRID}, got {n_grid}"
        )));
    }
    let coarse = fit(symbol, n_grid)?;
    let fine = fit(symbol, 2 * n_grid)?;
    let mut report = VerificationReport::new(symbol.label());
    let mut stable = |name: &str, a: f64, b: f64| {
        let change = relative_change(a, b);
        let ok = a.is_finite() && b.is_finite() && a > 0.0 && change < STABILITY_TOLERANCE;
        report.push(
            name,
            Verdict::from_bool(ok),
            Some(b),
            format!(
                "n = {}: {a:.6e}, n = {}: {b:.6e}, change {change:.3}",
                n_grid,
                2 * n_grid
            ),
        );
    };
    stable("upper_constant", coarse.upper_constant, fine.upper_constant);
    stable("gradient_constant", coarse.gradient_constant, fine.gradient_constant);
    if let (Some(a), Some(b)) = (coarse.lower_constant, fine.lower_constant) {
        stable("lower_constant", a, b);
    }
    Ok(KernelBoundReport {
        symbol: symbol.label(),
        fits: vec![coarse, fine],
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn riesz_kernel_magnitude() {
        let sym = KernelSymbol::VelocityGradient(VelocityMultiplier::new(0.0).unwrap());
        let n = 1024;
        let dx = 2.0 * PI / n as f64;
        let samples = kernel_samples(&sym, n, 8.0 * dx, PI / 2.0).unwrap();
        let worst = samples
            .iter()
            .map(|s| (s.value * 2.0 * PI * s.radius.powi(2) - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.1, "worst relative deviation {worst}");
        let worst_grad = samples
            .iter()
            .map(|s| (s.gradient * 2.0 * PI * s.radius.powi(3) / 5f64.sqrt() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst_grad < 0.1, "worst gradient deviation {worst_grad}");
    }

    #[test]
    fn lambda_kernel_lower_bound() {
        let sym = KernelSymbol::Dissipation(DissipationSymbol::new(0.0).unwrap());
        let out = kernel_bound_check(&sym, 1024).unwrap();
        let lower = out.fits[1].lower_constant.unwrap();
        assert!(lower > 0.0, "{lower}");
        assert_eq!(out.report.verdict(), Verdict::Pass, "{:#?}", out.report);
    }

    #[test]
    fn log_multiplier_stable() {
        let sym = KernelSymbol::VelocityGradient(VelocityMultiplier::new(0.5).unwrap());
        let out = kernel_bound_check(&sym, 1024).unwrap();
        assert_eq!(out.report.verdict(), Verdict::Pass, "{:#?}", out.report);
    }

    #[test]
    fn low_resolution_rejected() {
        let sym = KernelSymbol::Dissipation(DissipationSymbol::new(0.0).unwrap());
        assert!(matches!(kernel_bound_check(&sym, 512), Err(Error::Config(_))));
    }
}
