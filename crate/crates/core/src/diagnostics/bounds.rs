//! A priori gradient bound for critical SQG with the modulus
//! `Ω = min(M(−log r)^{−β}, 2‖θ₀‖_{L∞})`.
//!
//! With `x = ‖θ₀‖_{L∞} ≥ 1`:
//!
//! ```text
//! −log r₀ = c β x
//! M       = 2 (cβ)^β x^{1+β}
//! r₁      = exp(−(M/c′)^{1/β}),   c′ = min(1/(√8 c₁c₃), 1/(8c₄), 1)
//! ```
//!
//! and two comparison forms for `‖∇θ‖_{L∞}` with `g = ‖∇θ₀‖_{L∞}`:
//! the single exponential `g C exp(C x^{1+1/β})` and the double exponential
//! `g C exp(exp(C x))`. Both are compared through their logarithms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Configurable constants, all `1` by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundConstants {
    /// `c` in `−log r₀ = cβ‖θ₀‖`.
    pub c: f64,
    /// Outer constant `C` of both comparison forms.
    pub c_outer: f64,
    pub c1: f64,
    pub c3: f64,
    pub c4: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            c: 1.0,
            c_outer: 1.0,
            c1: 1.0,
            c3: 1.0,
            c4: 1.0,
        }
    }
}

impl BoundConstants {
    /// `c′ = min(1/(√8 c₁c₃), 1/(8c₄), 1)`.
    pub fn c_prime(&self) -> f64 {
        (1.0 / (8f64.sqrt() * self.c1 * self.c3))
            .min(1.0 / (8.0 * self.c4))
            .min(1.0)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c", self.c),
            ("c_outer", self.c_outer),
            ("c1", self.c1),
            ("c3", self.c3),
            ("c4", self.c4),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("constant {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theta0_linf: f64,
    pub theta0_grad_linf: f64,
    pub beta: f64,
    pub constants: BoundConstants,
    pub r0: f64,
    pub r1: f64,
    pub m: f64,
    /// `g C exp(C x^{1+1/β})`; infinite when it overflows.
    pub exponential_bound: f64,
    /// `g C exp(exp(C x))`; infinite when it overflows.
    pub double_exponential_bound: f64,
    pub log_exponential_bound: f64,
    pub log_double_exponential_bound: f64,
    pub exponential_below_double: bool,
}

pub fn gradient_bound(
    theta0_linf: f64,
    theta0_grad_linf: f64,
    beta: f64,
    constants: BoundConstants,
) -> Result<BoundReport> {
    if !(theta0_linf >= 1.0) || !theta0_linf.is_finite() {
        return Err(Error::Domain(format!(
            "theta0_linf = {theta0_linf} is below 1; rescale θ₀ so that its sup norm is at least 1"
        )));
    }
    if !(theta0_grad_linf > 0.0 && theta0_grad_linf.is_finite()) {
        return Err(Error::Domain(format!(
            "theta0_grad_linf must be positive, got {theta0_grad_linf}"
        )));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    constants.validate()?;
    let x = theta0_linf;
    let c = constants.c;
    let big_c = constants.c_outer;
    let r0 = (-c * beta * x).exp();
    let m = 2.0 * (c * beta).powf(beta) * x.powf(1.0 + beta);
    let r1 = (-(m / constants.c_prime()).powf(1.0 / beta)).exp();
    let log_prefactor = (theta0_grad_linf * big_c).ln();
    let log_exp = log_prefactor + big_c * x.powf(1.0 + 1.0 / beta);
    let log_dexp = log_prefactor + (big_c * x).exp();
    Ok(BoundReport {
        theta0_linf,
        theta0_grad_linf,
        beta,
        constants,
        r0,
        r1,
        m,
        exponential_bound: log_exp.exp(),
        double_exponential_bound: log_dexp.exp(),
        log_exponential_bound: log_exp,
        log_double_exponential_bound: log_dexp,
        exponential_below_double: log_exp < log_dexp,
    })
}

/// Smallest `x* ≥ 1` such that the single-exponential form stays below the
/// double-exponential one for every `x ≥ x*` on `[1, 10⁴]`.
///
/// Located by a logarithmic scan for the last sign change of
/// `exp(Cx) − C x^{1+1/β}`, then bisection.
pub fn bound_crossover(beta: f64, c_outer: f64) -> Result<f64> {
    if !(beta > 0.0 && c_outer > 0.0) {
        return Err(Error::Domain(format!(
            "beta and c_outer must be positive, got {beta}, {c_outer}"
        )));
    }
    let gap = |x: f64| (c_outer * x).exp() - c_outer * x.powf(1.0 + 1.0 / beta);
    const SCAN: usize = 4000;
    let xs: Vec<f64> = (0..=SCAN).map(|i| 10f64.powf(4.0 * i as f64 / SCAN as f64)).collect();
    let last_bad = xs.iter().rposition(|&x| !(gap(x) > 0.0));
    match last_bad {
        None => Ok(1.0),
        Some(i) if i == SCAN => Err(Error::Range {
            target: 0.0,
            lo: 1.0,
            hi: xs[SCAN],
        }),
        Some(i) => {
            let (mut a, mut b) = (xs[i], xs[i + 1]);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if gap(mid) > 0.0 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            Ok(b)
        }
    }
}
