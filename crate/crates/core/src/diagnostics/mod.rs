//! Norms, modulus-of-continuity audits, the nonlinear maximum principle
//! radius and the a priori gradient bound.

mod bounds;
mod moc;
mod nlmp;

pub use bounds::{bound_crossover, gradient_bound, BoundConstants, BoundReport};
pub use moc::{breakthrough_search, moc_ratio, Breakthrough, MocReport, ShiftRatio, ShiftSet};
pub use nlmp::{fit_nlmp_constant, nlmp_radius, NlmpFit, DEFAULT_GRADIENT_PERCENTILE};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::evolution::SimState;
use crate::spectral::{gradient, Grid, RealField, SpectralField};
use crate::symbols::{DissipationSymbol, RadialFn, SymbolTriple};

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub linf: f64,
    pub l2: f64,
    pub grad_linf: f64,
    pub blowup_integral: f64,
    pub moc_ratio: f64,
    pub total_dissipation: f64,
}

impl DiagnosticsRecord {
    pub const HEADER: [&'static str; 7] = [
        "time",
        "linf",
        "l2",
        "grad_linf",
        "blowup_integral",
        "moc_ratio",
        "total_dissipation",
    ];

    /// Evaluates the columns for `state`. The MOC column is computed over
    /// `shifts` and is zero without them; likewise the dissipation column.
    pub fn from_state(
        state: &SimState,
        triple: &SymbolTriple,
        shifts: Option<&ShiftSet>,
        with_dissipation: bool,
    ) -> Self {
        let real = state.theta.to_real();
        Self {
            time: state.time,
            linf: refined_linf(&state.theta),
            l2: real.l2_norm(),
            grad_linf: gradient(&state.theta).max_magnitude(),
            blowup_integral: state.blowup_integral,
            moc_ratio: shifts.map_or(0.0, |s| moc_ratio(&real, &triple.moc, s).m_est),
            total_dissipation: if with_dissipation {
                total_dissipation(&state.theta, &triple.symbol)
            } else {
                0.0
            },
        }
    }
}

/// `2 ∫ θ Pθ dx = 2 (Δx²/n²) Σ_k P(|k|) |θ̂(k)|²` for unnormalized coefficients.
pub fn total_dissipation(theta: &SpectralField, symbol: &DissipationSymbol) -> f64 {
    let grid = theta.grid();
    let sum: f64 = theta
        .coefficients()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(idx, c)| symbol.eval(grid.wavenumber_norm(idx)) * c.norm_sqr())
        .sum();
    let n2 = grid.len() as f64;
    2.0 * grid.dx().powi(2) / n2 * sum
}

/// Trigonometric interpolant of a spectral field, evaluated off the grid.
struct Interpolant<'a> {
    grid: Grid,
    coeffs: &'a [Complex64],
}

impl Interpolant<'_> {
    /// Value, gradient and Hessian `(f, [f₁, f₂], [f₁₁, f₁₂, f₂₂])` at `x`.
    fn eval(&self, x: (f64, f64)) -> (f64, [f64; 2], [f64; 3]) {
        let n = self.grid.n();
        let k: Vec<f64> = (0..n).map(|i| self.grid.wavenumber(i) as f64).collect();
        let e1: Vec<Complex64> = k.iter().map(|&k| Complex64::from_polar(1.0, k * x.0)).collect();
        let e2: Vec<Complex64> = k.iter().map(|&k| Complex64::from_polar(1.0, k * x.1)).collect();
        let i = Complex64::new(0.0, 1.0);
        let mut acc = [Complex64::new(0.0, 0.0); 6];
        for j in 0..n {
            // Row sums of c·e1, c·e1·(ik₁), c·e1·(ik₁)².
            let (mut r0, mut r1, mut r2) = (
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            );
            let row = &self.coeffs[j * n..(j + 1) * n];
            for (c, (e, &kk)) in row.iter().zip(e1.iter().zip(&k)) {
                let t = c * e;
                r0 += t;
                r1 += t * kk;
                r2 += t * (kk * kk);
            }
            let w = e2[j];
            let kj = k[j];
            acc[0] += r0 * w;
            acc[1] += r1 * w * i;
            acc[2] += r0 * w * (i * kj);
            acc[3] -= r2 * w;
            acc[4] -= r1 * w * kj;
            acc[5] -= r0 * w * (kj * kj);
        }
        let s = 1.0 / self.grid.len() as f64;
        (
            acc[0].re * s,
            [acc[1].re * s, acc[2].re * s],
            [acc[3].re * s, acc[4].re * s, acc[5].re * s],
        )
    }
}

/// Number of grid extrema refined by [`refined_linf`].
const REFINED_CANDIDATES: usize = 4;

/// `‖θ‖_{L∞}` of the trigonometric interpolant.
///
/// Starts from the largest grid values of `|θ|` and runs Newton's method on
/// `∇θ = 0`, each step confined to one cell. Never below the grid maximum.
pub fn refined_linf(theta: &SpectralField) -> f64 {
    let grid = theta.grid();
    let real = theta.to_real();
    let values = real.values();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    let grid_max = values[order[0]].abs();
    let interp = Interpolant {
        grid,
        coeffs: theta.coefficients(),
    };
    let n = grid.n();
    let dx = grid.dx();
    let mut best = grid_max;
    let mut seen: Vec<usize> = Vec::new();
    for &idx in &order {
        if seen.len() >= REFINED_CANDIDATES {
            break;
        }
        // Skip neighbours of an already refined candidate.
        let (i, j) = ((idx % n) as i64, (idx / n) as i64);
        let near = seen.iter().any(|&s| {
            let di = grid.min_image(((s % n) as i64 - i).rem_euclid(n as i64) as usize).abs();
            let dj = grid.min_image(((s / n) as i64 - j).rem_euclid(n as i64) as usize).abs();
            di <= 2 && dj <= 2
        });
        if near {
            continue;
        }
        seen.push(idx);
        let start = (grid.coord(i as usize), grid.coord(j as usize));
        let mut x = start;
        for _ in 0..20 {
            let (f, g, h) = interp.eval(x);
            best = best.max(f.abs());
            let det = h[0] * h[2] - h[1] * h[1];
            let curvature = h[0].abs() + h[2].abs();
            if !(curvature > 0.0) {
                break;
            }
            let (s1, s2) = if det.abs() > 1e-10 * curvature * curvature {
                ((h[2] * g[0] - h[1] * g[1]) / det, (h[0] * g[1] - h[1] * g[0]) / det)
            } else {
                // Flat along some direction: Newton per axis where curved.
                let axis = |g: f64, h: f64| if h.abs() > 1e-10 * curvature { g / h } else { 0.0 };
                (axis(g[0], h[0]), axis(g[1], h[2]))
            };
            let len = s1.hypot(s2);
            let scale = if len > dx { dx / len } else { 1.0 };
            x = (x.0 - s1 * scale, x.1 - s2 * scale);
            if ((x.0 - start.0).abs() > 2.0 * dx) || ((x.1 - start.1).abs() > 2.0 * dx) {
                break;
            }
            if len < 1e-14 {
                let (f, _, _) = interp.eval(x);
                best = best.max(f.abs());
                break;
            }
        }
    }
    best
}

/// `‖θ‖_{L∞}` on the grid only.
pub fn grid_linf(theta: &RealField) -> f64 {
    theta.max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn total_dissipation_examples() {
        let g = Grid::new(64).unwrap();
        let p = DissipationSymbol::new(0.0).unwrap();
        assert_eq!(total_dissipation(&RealField::constant(g, 3.0).to_spectral(), &p), 0.0);
        let s = RealField::from_fn(g, |x, _| x.sin()).to_spectral();
        let v = total_dissipation(&s, &p);
        assert!((v - 4.0 * PI * PI).abs() < 1e-10, "{v}");
        let c = RealField::from_fn(g, |_, y| (3.0 * y).cos()).to_spectral();
        let both = RealField::from_fn(g, |x, y| x.sin() + (3.0 * y).cos()).to_spectral();
        let sum = total_dissipation(&s, &p) + total_dissipation(&c, &p);
        assert!((total_dissipation(&both, &p) - sum).abs() < 1e-10 * sum);
    }

    #[test]
    fn refined_linf_finds_off_grid_peak() {
        let g = Grid::new(32).unwrap();
        let shift = 0.37 * g.dx();
        let f = RealField::from_fn(g, |x, y| 2.0 * (x - 1.0 - shift).cos() * (y - 2.0).cos());
        let grid_max = f.max_abs();
        let refined = refined_linf(&f.to_spectral());
        assert!(grid_max < 2.0 - 1e-4);
        assert!((refined - 2.0).abs() < 1e-12, "{refined}");
    }

    #[test]
    fn refined_linf_handles_one_dimensional_fields() {
        let g = Grid::new(32).unwrap();
        let f = RealField::from_fn(g, |x, _| (x - 0.4 * g.dx()).sin());
        assert!(f.max_abs() < 1.0 - 1e-3);
        let refined = refined_linf(&f.to_spectral());
        assert!((refined - 1.0).abs() < 1e-12, "{refined}");
    }

    #[test]
    fn interpolant_derivatives() {
        let g = Grid::new(32).unwrap();
        let f = RealField::from_fn(g, |x, y| x.sin() * (2.0 * y).cos() + (x + y).cos());
        let spec = f.to_spectral();
        let interp = Interpolant {
            grid: g,
            coeffs: spec.coefficients(),
        };
        let (x, y) = (0.3, 1.1);
        let (v, gr, h) = interp.eval((x, y));
        assert!((v - (x.sin() * (2.0 * y).cos() + (x + y).cos())).abs() < 1e-12);
        assert!((gr[0] - (x.cos() * (2.0 * y).cos() - (x + y).sin())).abs() < 1e-12);
        assert!((gr[1] - (-2.0 * x.sin() * (2.0 * y).sin() - (x + y).sin())).abs() < 1e-12);
        assert!((h[1] - (-2.0 * x.cos() * (2.0 * y).sin() - (x + y).cos())).abs() < 1e-12);
    }
}
