//! Radius selection and constant fitting for the nonlinear maximum principle
//! `D(x) ≥ 4 c₂ |∇θ(x)|² k(R)`, where `Ω(R)/R = |∇θ(x)|/c₁`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{RealField, VectorField};
use crate::symbols::RadialFn;

/// Lower end of the radius search.
pub const NLMP_RADIUS_FLOOR: f64 = 1e-300;
/// Relative residual at which the bisection stops.
pub const NLMP_TOLERANCE: f64 = 1e-10;
/// Points with `|∇θ|` at or above this quantile enter the fit.
pub const DEFAULT_GRADIENT_PERCENTILE: f64 = 0.9;

/// Solves `Ω(R)/R = grad_linf/c₁` for `R ∈ (10⁻³⁰⁰, r_max)`.
///
/// `Ω(r)/r` must be strictly decreasing there; the search is a bisection in
/// `log r` until the relative residual is below `10⁻¹⁰`.
pub fn nlmp_radius<W: RadialFn + ?Sized>(grad_linf: f64, omega: &W, c1: f64, r_max: f64) -> Result<f64> {
    if !(grad_linf > 0.0 && grad_linf.is_finite()) {
        return Err(Error::Domain(format!(
            "gradient sup norm must be positive, got {grad_linf}"
        )));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::Domain(format!("c1 must be positive, got {c1}")));
    }
    if !(r_max > NLMP_RADIUS_FLOOR && r_max.is_finite()) {
        return Err(Error::Domain(format!("search interval upper end {r_max} is invalid")));
    }
    let target = grad_linf / c1;
    let ratio = |r: f64| omega.eval(r) / r;
    let (hi_val, lo_val) = (ratio(NLMP_RADIUS_FLOOR), ratio(r_max));
    let range = Error::Range {
        target,
        lo: lo_val,
        hi: hi_val,
    };
    if !(hi_val > lo_val * (1.0 + 1e-12)) || !(target > lo_val && target < hi_val) {
        return Err(range);
    }
    let residual = |r: f64| ratio(r) / target - 1.0;
    let (mut a, mut b) = (NLMP_RADIUS_FLOOR.ln(), r_max.ln());
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        let r = mid.exp();
        let res = residual(r);
        if res.abs() < NLMP_TOLERANCE {
            return Ok(r);
        }
        if res > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let r = (0.5 * (a + b)).exp();
    if residual(r).abs() < 1e3 * NLMP_TOLERANCE {
        Ok(r)
    } else {
        Err(range)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlmpFit {
    pub threshold: f64,
    pub selected: usize,
    /// Selected points dropped because no radius solved the equation.
    pub excluded: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    /// `min/4`.
    pub c2: f64,
    /// No positive ratio among the selected points.
    pub degenerate: bool,
}

/// Fits `D(x) / (|∇θ(x)|² k(R(x)))` over large-gradient points.
#[allow(clippy::too_many_arguments)]
pub fn fit_nlmp_constant<K: RadialFn + ?Sized, W: RadialFn + ?Sized>(
    d_field: &RealField,
    grad_field: &VectorField,
    kernel: &K,
    omega: &W,
    c1: f64,
    r_max: f64,
    percentile: f64,
) -> Result<NlmpFit> {
    if d_field.grid() != grad_field.grid() {
        return Err(Error::Config(
            "dissipation and gradient fields live on different grids".into(),
        ));
    }
    if !(0.0..1.0).contains(&percentile) {
        return Err(Error::Config(format!(
            "percentile must lie in [0, 1), got {percentile}"
        )));
    }
    let mags = grad_field.magnitude();
    let mut sorted = mags.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let threshold = sorted[((sorted.len() - 1) as f64 * percentile).floor() as usize];
    let mut ratios = Vec::new();
    let mut selected = 0;
    let mut excluded = 0;
    for (&g, &d) in mags.values().iter().zip(d_field.values()) {
        if g < threshold {
            continue;
        }
        selected += 1;
        match nlmp_radius(g, omega, c1, r_max) {
            Ok(r) => ratios.push(d / (g * g * kernel.eval(r))),
            Err(_) => excluded += 1,
        }
    }
    ratios.sort_by(f64::total_cmp);
    let (min, median, max) = if ratios.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        (ratios[0], ratios[ratios.len() / 2], ratios[ratios.len() - 1])
    };
    Ok(NlmpFit {
        threshold,
        selected,
        excluded,
        min,
        median,
        max,
        c2: min / 4.0,
        degenerate: !(max > 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{gradient, DissipationOperator, Grid};
    use crate::symbols::{ModulusOfContinuity, RadialKernel, Scaled};

    fn inverse_log(r: f64) -> f64 {
        1.0 / (-r.ln())
    }

    #[test]
    fn lipschitz_modulus_is_degenerate() {
        let err = nlmp_radius(1.0, &|r: f64| r, 1.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::Range { .. }), "{err}");
    }

    #[test]
    fn residual_check() {
        let r = nlmp_radius(10.0, &inverse_log, 1.0, 0.5).unwrap();
        let res = (inverse_log(r) / r / 10.0 - 1.0).abs();
        assert!(res < 1e-10, "{res}");
    }

    #[test]
    fn radius_decreases_with_gradient() {
        let moc = ModulusOfContinuity::with_default_cap(1.0).unwrap();
        let a = nlmp_radius(10.0, &moc, 1.0, moc.r_cap()).unwrap();
        let b = nlmp_radius(100.0, &moc, 1.0, moc.r_cap()).unwrap();
        assert!(b < a);
    }

    #[test]
    fn unreachable_target_names_interval() {
        let moc = ModulusOfContinuity::with_default_cap(1.0).unwrap();
        match nlmp_radius(1e-3, &moc, 1.0, moc.r_cap()) {
            Err(Error::Range { lo, hi, .. }) => assert!(lo > 1e-3 && hi > lo),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_gradient_is_degenerate() {
        let g = Grid::new(32).unwrap();
        let grad = VectorField::new(RealField::constant(g, 2.0), RealField::constant(g, 0.0)).unwrap();
        let d = RealField::zeros(g);
        let moc = ModulusOfContinuity::with_default_cap(1.0).unwrap();
        let k = RadialKernel::new(0.0).unwrap();
        let fit = fit_nlmp_constant(&d, &grad, &k, &moc, 1.0, moc.r_cap(), 0.9).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.selected, g.len());
        assert_eq!((fit.min, fit.max), (0.0, 0.0));
    }

    #[test]
    fn ratios_invariant_under_joint_rescaling() {
        let g = Grid::new(64).unwrap();
        let theta = RealField::from_fn(g, |x, y| ((y - 3.0) / 0.3).tanh() * (-(1.0 + x.cos())).exp());
        let k = RadialKernel::new(0.0).unwrap();
        let op = DissipationOperator::new(g, &k, g.dx()).unwrap();
        let moc = ModulusOfContinuity::with_default_cap(1.0).unwrap();
        let fit_at = |lambda: f64| {
            let grad = gradient(&theta.scaled(lambda).to_spectral());
            let d = op.apply_vector(&grad).unwrap();
            let omega = Scaled::new(0.1 * lambda, moc);
            fit_nlmp_constant(&d, &grad, &k, &omega, 1.0, moc.r_cap(), 0.9).unwrap()
        };
        let (a, b) = (fit_at(1.0), fit_at(2.0));
        assert!(a.min > 0.0 && a.excluded == 0, "{a:?}");
        for (x, y) in [(a.min, b.min), (a.median, b.median), (a.max, b.max)] {
            assert!((x - y).abs() <= 1e-8 * x, "{x} vs {y}");
        }
    }
}
