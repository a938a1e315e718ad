//! Adaptive quadrature for radial integrals on `(a, b)` with `0 ≤ a < b ≤ ∞`.
//!
//! Integrals are computed in the logarithmic variable `ρ = e^s`, which turns
//! the algebraic–logarithmic endpoint behaviour of the kernel family into
//! exponential decay. Semi-infinite ranges are marched outward in unit panels
//! until the integrand is negligible; the discarded tail is bounded by the
//! `ρ⁻²` envelope (unit-rate exponential in `s`) and added to the error
//! estimate. The retained range is then refined by global adaptive
//! Gauss–Kronrod (7/15) bisection.

mod kernel;
mod lemmas;

pub use kernel::{kernel_bound_check, KernelBoundReport, KernelSymbol, ResolutionFit};
pub use lemmas::{verify_lemma26, LemmaConfig, LemmaItem, LemmaReport, LemmaSample, Relation};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Limits on the adaptive refinement.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Integrator {
    pub fn new(rel_tol: f64) -> Result<Self> {
        if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
            return Err(Error::Config(format!(
                "rel_tol must lie in (1e-14, 1e-2), got {rel_tol:e}"
            )));
        }
        Ok(Self {
            rel_tol,
            max_subdivisions: 4000,
        })
    }
}

/// Integrates `f` over `(lower, upper)`; `upper` may be `f64::INFINITY`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lower: f64, upper: f64, rel_tol: f64) -> Result<QuadratureResult> {
    Integrator::new(rel_tol)?.integrate(f, lower, upper)
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Log-variable bounds beyond which `e^s` leaves the normal f64 range.
const S_LIMIT: f64 = 700.0;

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: Fn(f64) -> f64> Counted<F> {
    /// Integrand in the log variable, `f(e^s) e^s`.
    fn g(&mut self, s: f64) -> f64 {
        self.evaluations += 1;
        let rho = s.exp();
        let v = (self.f)(rho) * rho;
        if v.is_finite() {
            v
        } else {
            f64::NAN
        }
    }

    fn gk15(&mut self, a: f64, b: f64) -> Panel {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = self.g(c);
        let mut kronrod = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        for j in 0..7 {
            let dx = h * XGK[j];
            let pair = self.g(c - dx) + self.g(c + dx);
            kronrod += WGK[j] * pair;
            if j % 2 == 1 {
                gauss += WG[j / 2] * pair;
            }
        }
        let value = kronrod * h;
        let error = ((kronrod - gauss) * h).abs();
        Panel {
            a,
            b,
            value,
            error: if error.is_nan() { f64::INFINITY } else { error },
        }
    }
}

impl Integrator {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, lower: f64, upper: f64) -> Result<QuadratureResult> {
        if !(lower >= 0.0 && lower.is_finite()) {
            return Err(Error::Domain(format!(
                "lower limit must be finite and >= 0, got {lower}"
            )));
        }
        if !(upper > lower) {
            return Err(Error::Domain(format!(
                "upper limit {upper} must exceed lower limit {lower}"
            )));
        }
        let mut counted = Counted { f, evaluations: 0 };
        let lo_open = lower == 0.0;
        let hi_open = upper.is_infinite();
        let s_lo = if lo_open { None } else { Some(lower.ln()) };
        let s_hi = if hi_open { None } else { Some(upper.ln()) };

        // Anchor segment that is integrated before any marching.
        let (a0, b0) = match (s_lo, s_hi) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, a + 1.0),
            (None, Some(b)) => (b - 1.0, b),
            (None, None) => (-0.5, 0.5),
        };
        let mut panels = vec![counted.gk15(a0, b0)];
        let mut tail_error = 0.0;
        if hi_open {
            tail_error += self.march(&mut counted, &mut panels, b0, 1.0)?;
        }
        if lo_open {
            tail_error += self.march(&mut counted, &mut panels, a0, -1.0)?;
        }

        let mut heap: BinaryHeap<Panel> = panels.into_iter().collect();
        let mut subdivisions = 0;
        loop {
            let (value, error) = totals(&heap);
            let target = self.rel_tol * 0.5 * value.abs();
            if error + tail_error <= target || error + tail_error <= f64::MIN_POSITIVE {
                return Ok(QuadratureResult {
                    value,
                    abs_error_estimate: error + tail_error,
                    evaluations: counted.evaluations,
                });
            }
            if subdivisions >= self.max_subdivisions
                || !error.is_finite() && subdivisions > 0 && heap.len() > self.max_subdivisions
            {
                return Err(Error::Quadrature {
                    partial: value,
                    abs_error: error + tail_error,
                    subdivisions,
                });
            }
            let worst = heap.pop().expect("nonempty panel set");
            if worst.error <= 0.0 && tail_error > target {
                // Only the truncated tail violates the tolerance.
                return Err(Error::Quadrature {
                    partial: value,
                    abs_error: error + tail_error,
                    subdivisions,
                });
            }
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                return Err(Error::Quadrature {
                    partial: value,
                    abs_error: error + tail_error,
                    subdivisions,
                });
            }
            heap.push(counted.gk15(worst.a, mid));
            heap.push(counted.gk15(mid, worst.b));
            subdivisions += 1;
        }
    }

    /// Appends unit panels from `start` in direction `dir` until the integrand
    /// is negligible against the running total; returns the tail bound.
    fn march<F: Fn(f64) -> f64>(
        &self,
        counted: &mut Counted<F>,
        panels: &mut Vec<Panel>,
        start: f64,
        dir: f64,
    ) -> Result<f64> {
        let mut s = start;
        let mut quiet = 0;
        while s.abs() < S_LIMIT {
            let next = s + dir;
            let p = if dir > 0.0 {
                counted.gk15(s, next)
            } else {
                counted.gk15(next, s)
            };
            panels.push(p);
            let total: f64 = panels.iter().map(|p| p.value).sum::<f64>().abs();
            let edge = counted.g(next).abs();
            let small = 1e-2 * self.rel_tol * total;
            if p.value.abs() <= small && edge <= small {
                quiet += 1;
                if quiet >= 2 {
                    return Ok(edge);
                }
            } else {
                quiet = 0;
            }
            if total == 0.0 && edge == 0.0 && p.value == 0.0 {
                quiet += 1;
                if quiet >= 4 {
                    return Ok(0.0);
                }
            }
            s = next;
        }
        let (partial, abs_error) = totals(panels.iter());
        Err(Error::Quadrature {
            partial,
            abs_error: abs_error.max(f64::INFINITY),
            subdivisions: panels.len(),
        })
    }
}

fn totals<'a, I: IntoIterator<Item = &'a Panel>>(panels: I) -> (f64, f64) {
    // Sort by position so the sum is independent of heap layout.
    let mut v: Vec<&Panel> = panels.into_iter().collect();
    v.sort_by(|x, y| x.a.total_cmp(&y.a));
    v.iter().fold((0.0, 0.0), |(s, e), p| (s + p.value, e + p.error))
}
