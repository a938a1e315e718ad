//! The logarithmic kernel/multiplier family and its structural checks.
//!
//! A dissipation operator is described twice: by a radial kernel `k` acting as
//! `L f(x) = p.v. ∫ (f(x) - f(y)) k(|x-y|) / |x-y|² dy`, and by its Fourier
//! symbol `P`. The velocity is `u = ∇⊥ Λ⁻¹ m(Λ) θ` for a radial multiplier `m`.
//! The modulus of continuity `ω(r) = (-log r)^(-β)` is the regularity profile
//! the diagnostics audit.
//!
//! Every limit condition is replaced by a sampled trend check with an explicit
//! [`Verdict::Inconclusive`] outcome when the samples cannot decide.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Verdict, VerificationReport};

/// A real function of one radial variable (a distance or a frequency magnitude).
///
/// Implemented by the named symbol types and by any `Fn(f64) -> f64`, so tests
/// can inject pathological profiles into the checkers.
pub trait RadialFn {
    fn eval(&self, r: f64) -> f64;
}

impl<F: Fn(f64) -> f64> RadialFn for F {
    fn eval(&self, r: f64) -> f64 {
        self(r)
    }
}

/// Relative slack used by all sampled monotonicity checks.
const MONOTONE_SLACK: f64 = 1e-12;

fn check_exponent(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and >= 0, got {value}")))
    }
}

/// `k(r) = 1 / (r (log(10 + 1/r))^α₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialKernel {
    alpha1: f64,
}

impl RadialKernel {
    pub fn new(alpha1: f64) -> Result<Self> {
        check_exponent("alpha1", alpha1)?;
        Ok(Self { alpha1 })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    /// Checked evaluation; `r` must be strictly positive.
    pub fn try_eval(&self, r: f64) -> Result<f64> {
        if r > 0.0 && r.is_finite() {
            Ok(self.eval(r))
        } else {
            Err(Error::Domain(format!("kernel radius must be > 0, got {r}")))
        }
    }

    /// Closed-form derivative `k'(r)`.
    pub fn derivative(&self, r: f64) -> f64 {
        let log_term = (10.0 + 1.0 / r).ln();
        let a = self.alpha1;
        let base = -1.0 / (r * r * log_term.powf(a));
        if a == 0.0 {
            return base;
        }
        base + a / (r * r * log_term.powf(a + 1.0) * (10.0 * r + 1.0))
    }
}

impl RadialFn for RadialKernel {
    fn eval(&self, r: f64) -> f64 {
        if self.alpha1 == 0.0 {
            return 1.0 / r;
        }
        1.0 / (r * (10.0 + 1.0 / r).ln().powf(self.alpha1))
    }
}

/// `m(ζ) = (log(10 + |ζ|))^α₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityMultiplier {
    alpha2: f64,
}

impl VelocityMultiplier {
    pub fn new(alpha2: f64) -> Result<Self> {
        check_exponent("alpha2", alpha2)?;
        Ok(Self { alpha2 })
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn is_identity(&self) -> bool {
        self.alpha2 == 0.0
    }
}

impl RadialFn for VelocityMultiplier {
    fn eval(&self, zeta: f64) -> f64 {
        if self.alpha2 == 0.0 {
            return 1.0;
        }
        let v = (10.0 + zeta.abs()).ln().powf(self.alpha2);
        if v.is_finite() {
            v
        } else {
            f64::MAX
        }
    }
}

/// Fourier symbol of the dissipation, `P(ζ) = |ζ| (log(10 + |ζ|))^(-α₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationSymbol {
    alpha1: f64,
}

impl DissipationSymbol {
    pub fn new(alpha1: f64) -> Result<Self> {
        check_exponent("alpha1", alpha1)?;
        Ok(Self { alpha1 })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }
}

impl RadialFn for DissipationSymbol {
    fn eval(&self, zeta: f64) -> f64 {
        let z = zeta.abs();
        if self.alpha1 == 0.0 {
            return z;
        }
        z / (10.0 + z).ln().powf(self.alpha1)
    }
}

/// `ω(r) = (-log r)^(-β)` on `(0, r_cap]`, continued by the constant `ω(r_cap)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusOfContinuity {
    beta: f64,
    r_cap: f64,
}

impl ModulusOfContinuity {
    /// Largest cap that keeps ω concave: ω'' ≤ 0 exactly when `-log r ≥ β + 1`.
    pub fn concavity_cap(beta: f64) -> f64 {
        (-(beta + 1.0)).exp()
    }

    /// Default cap `min(e⁻², e^-(β+1))`.
    pub fn default_cap(beta: f64) -> f64 {
        Self::concavity_cap(beta).min(E.powi(-2))
    }

    pub fn new(beta: f64, r_cap: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!("beta must be finite and > 0, got {beta}")));
        }
        if !(r_cap > 0.0 && r_cap < 1.0) {
            return Err(Error::Domain(format!("r_cap must lie in (0, 1), got {r_cap}")));
        }
        Ok(Self { beta, r_cap })
    }

    pub fn with_default_cap(beta: f64) -> Result<Self> {
        Self::new(beta, Self::default_cap(beta))
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn r_cap(&self) -> f64 {
        self.r_cap
    }

    /// Closed-form `ω'(r) = β (-log r)^(-β-1) / r` below the cap, zero above it.
    pub fn derivative(&self, r: f64) -> f64 {
        if r <= 0.0 || r > self.r_cap {
            return 0.0;
        }
        let s = -r.ln();
        self.beta * s.powf(-self.beta - 1.0) / r
    }

    /// `ω'(r) / ω(r) = β / (r (-log r))` below the cap.
    pub fn log_derivative(&self, r: f64) -> f64 {
        if r <= 0.0 || r > self.r_cap {
            return 0.0;
        }
        self.beta / (r * -r.ln())
    }
}

impl RadialFn for ModulusOfContinuity {
    fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let r = r.min(self.r_cap);
        (-r.ln()).powf(-self.beta)
    }
}

/// A modulus multiplied by an amplitude, `r ↦ M·ω(r)`.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<F> {
    pub amplitude: f64,
    pub inner: F,
}

impl<F> Scaled<F> {
    pub fn new(amplitude: f64, inner: F) -> Self {
        Self { amplitude, inner }
    }
}

impl<F: RadialFn> RadialFn for Scaled<F> {
    fn eval(&self, r: f64) -> f64 {
        self.amplitude * self.inner.eval(r)
    }
}

/// The full `(k, m, P, ω)` description of one equation of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripleParams", into = "TripleParams")]
pub struct SymbolTriple {
    pub kernel: RadialKernel,
    pub multiplier: VelocityMultiplier,
    pub symbol: DissipationSymbol,
    pub moc: ModulusOfContinuity,
}

impl SymbolTriple {
    pub fn new(alpha1: f64, alpha2: f64, beta: f64, r_cap: Option<f64>) -> Result<Self> {
        Ok(Self {
            kernel: RadialKernel::new(alpha1)?,
            multiplier: VelocityMultiplier::new(alpha2)?,
            symbol: DissipationSymbol::new(alpha1)?,
            moc: match r_cap {
                Some(cap) => ModulusOfContinuity::new(beta, cap)?,
                None => ModulusOfContinuity::with_default_cap(beta)?,
            },
        })
    }

    /// Critical SQG with the `(-log r)^(-1)` modulus.
    pub fn critical() -> Self {
        Self::new(0.0, 0.0, 1.0, None).expect("valid critical triple")
    }

    pub fn alpha1(&self) -> f64 {
        self.kernel.alpha1()
    }

    pub fn alpha2(&self) -> f64 {
        self.multiplier.alpha2()
    }

    pub fn beta(&self) -> f64 {
        self.moc.beta()
    }
}

/// Wire form of a [`SymbolTriple`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_cap: Option<f64>,
}

impl TryFrom<TripleParams> for SymbolTriple {
    type Error = Error;

    fn try_from(p: TripleParams) -> Result<Self> {
        SymbolTriple::new(p.alpha1, p.alpha2, p.beta, p.r_cap)
    }
}

impl From<SymbolTriple> for TripleParams {
    fn from(t: SymbolTriple) -> Self {
        TripleParams {
            alpha1: t.alpha1(),
            alpha2: t.alpha2(),
            beta: t.beta(),
            r_cap: Some(t.moc.r_cap()),
        }
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "invalid log grid");
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Default radial sample set for the kernel checks: 1e-300 to 1e2.
pub fn default_r_grid() -> Vec<f64> {
    log_grid(1e-300, 1e2, 2048)
}

/// Default frequency sample set for the multiplier checks: 1e-300 to 1e12.
pub fn default_zeta_grid() -> Vec<f64> {
    log_grid(1e-300, 1e12, 2048)
}

fn validate_grid(grid: &[f64], what: &str) -> Result<()> {
    if grid.len() < 64 {
        return Err(Error::Config(format!(
            "{what} grid needs at least 64 points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|&r| !(r > 0.0 && r.is_finite())) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!(
            "{what} grid must be positive, finite and strictly increasing"
        )));
    }
    let span = grid[grid.len() - 1] / grid[0];
    if span < 1e8 {
        return Err(Error::Config(format!(
            "{what} grid must span at least 8 decades, spans {:.2}",
            span.log10()
        )));
    }
    Ok(())
}

fn nonincreasing(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite()) && values.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK * w[0].abs())
}

fn nondecreasing(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite()) && values.windows(2).all(|w| w[1] >= w[0] - MONOTONE_SLACK * w[0].abs())
}

/// Length of the longest prefix of `values` on which `ok(prev, next)` holds pairwise.
fn monotone_prefix(values: &[f64], ok: impl Fn(f64, f64) -> bool) -> usize {
    let mut end = 0;
    for i in 1..values.len() {
        if values[i].is_finite() && values[i - 1].is_finite() && ok(values[i - 1], values[i]) {
            end = i;
        } else {
            break;
        }
    }
    end
}

const EPSILONS: [f64; 2] = [0.1, 0.01];

/// Samples the structural assumptions on the dissipation kernel.
///
/// Reports positivity, monotonicity of `k` and `r²k`, the fitted doubling
/// constant `max k(r/2)/k(r)`, and for each `ε ∈ {0.1, 0.01}` the threshold
/// below which `r^(1-ε) k(r)` is nonincreasing together with its growth trend.
pub fn check_kernel_assumptions<K: RadialFn + ?Sized>(kernel: &K, r_grid: &[f64]) -> Result<VerificationReport> {
    validate_grid(r_grid, "radius")?;
    let k: Vec<f64> = r_grid.iter().map(|&r| kernel.eval(r)).collect();
    let mut report = VerificationReport::new("kernel");

    report.push(
        "positive",
        Verdict::from_bool(k.iter().all(|&v| v > 0.0 && v.is_finite())),
        None,
        "",
    );
    report.push("nonincreasing", Verdict::from_bool(nonincreasing(&k)), None, "k(r)");

    let r2k: Vec<f64> = r_grid.iter().zip(&k).map(|(r, v)| r * (r * v)).collect();
    report.push(
        "r2k_nondecreasing",
        Verdict::from_bool(nondecreasing(&r2k)),
        None,
        "r^2 k(r)",
    );

    let doubling = r_grid
        .iter()
        .zip(&k)
        .map(|(&r, &v)| kernel.eval(r / 2.0) / v)
        .fold(f64::NEG_INFINITY, f64::max);
    report.push(
        "doubling",
        Verdict::from_bool(doubling.is_finite()),
        Some(doubling),
        "max k(r/2)/k(r)",
    );

    for eps in EPSILONS {
        let g: Vec<f64> = r_grid.iter().zip(&k).map(|(&r, &v)| r.powf(1.0 - eps) * v).collect();
        // Walk up from the smallest radius while g keeps decreasing.
        let end = monotone_prefix(&g, |prev, next| next <= prev + MONOTONE_SLACK * prev.abs());
        let name = format!("supercritical_dissipation_eps_{eps}");
        if end < 3 {
            report.push(
                name,
                Verdict::Inconclusive,
                None,
                "no monotone region of r^(1-eps) k(r) at the small end of the grid",
            );
        } else {
            let grows = g[0] > g[end] * (1.0 + 1e-9);
            report.push(
                name,
                if grows { Verdict::Pass } else { Verdict::Inconclusive },
                Some(r_grid[end]),
                format!(
                    "nonincreasing below r_eps = {:e}; growth factor to smallest r {:.4e}",
                    r_grid[end],
                    g[0] / g[end]
                ),
            );
        }
    }
    Ok(report)
}

/// Sampled Hörmander–Mikhlin constants `max ζ^j |m^(j)(ζ)| / m(ζ)` for `j = 1, 2`.
///
/// Derivatives of the radial profile use central differences with step `ζ·10⁻⁴`.
pub fn hormander_mikhlin_ratios<M: RadialFn + ?Sized>(mult: &M, zeta: f64) -> (f64, f64) {
    const STEP: f64 = 1e-4;
    let h = zeta * STEP;
    let (lo, mid, hi) = (mult.eval(zeta - h), mult.eval(zeta), mult.eval(zeta + h));
    // ζ and h are combined analytically so tiny ζ does not underflow.
    let first = (hi - lo).abs() / (2.0 * STEP);
    let second = (hi - 2.0 * mid + lo).abs() / (STEP * STEP);
    (first / mid, second / mid)
}

/// A sampled constant is accepted when it is finite and the top decade of the
/// grid does not exceed twice the maximum seen below it.
fn bounded_constant(grid: &[f64], ratios: &[f64]) -> (Verdict, f64) {
    if ratios.iter().any(|v| !v.is_finite()) {
        return (Verdict::Fail, f64::INFINITY);
    }
    let top = grid[grid.len() - 1] / 10.0;
    let (mut c_top, mut c_rest) = (0.0_f64, 0.0_f64);
    for (&z, &v) in grid.iter().zip(ratios) {
        if z >= top {
            c_top = c_top.max(v);
        } else {
            c_rest = c_rest.max(v);
        }
    }
    let c = c_top.max(c_rest);
    (Verdict::from_bool(c_top <= 2.0 * c_rest || c_top == 0.0), c)
}

/// Samples the structural assumptions on the velocity multiplier.
pub fn check_multiplier_assumptions<M: RadialFn + ?Sized>(mult: &M, zeta_grid: &[f64]) -> Result<VerificationReport> {
    validate_grid(zeta_grid, "frequency")?;
    let m: Vec<f64> = zeta_grid.iter().map(|&z| mult.eval(z)).collect();
    let mut report = VerificationReport::new("multiplier");

    report.push(
        "at_least_one",
        Verdict::from_bool(m.iter().all(|&v| v >= 1.0 - 1e-15)),
        None,
        "m >= 1",
    );
    report.push("nondecreasing", Verdict::from_bool(nondecreasing(&m)), None, "");

    let (c1, c2): (Vec<f64>, Vec<f64>) = zeta_grid.iter().map(|&z| hormander_mikhlin_ratios(mult, z)).unzip();
    for (order, ratios) in [(1, c1), (2, c2)] {
        let (verdict, c) = bounded_constant(zeta_grid, &ratios);
        report.push(
            format!("hormander_mikhlin_{order}"),
            verdict,
            Some(c),
            format!("max |zeta|^{order} |m^({order})| / m"),
        );
    }

    for eps in EPSILONS {
        let g: Vec<f64> = zeta_grid.iter().map(|&z| z.powf(eps) * mult.eval(1.0 / z)).collect();
        let end = monotone_prefix(&g, |prev, next| next >= prev - MONOTONE_SLACK * prev.abs());
        let name = format!("supercritical_velocity_eps_{eps}");
        if g.iter().any(|v| !v.is_finite()) {
            report.push(name, Verdict::Fail, None, "non-finite |zeta|^eps m(1/|zeta|)");
        } else if end < 3 {
            report.push(
                name,
                Verdict::Inconclusive,
                None,
                "no monotone region of |zeta|^eps m(1/|zeta|) at the small end of the grid",
            );
        } else {
            let decays = g[0] < g[end] * (1.0 - 1e-9);
            report.push(
                name,
                if decays { Verdict::Pass } else { Verdict::Inconclusive },
                Some(zeta_grid[end]),
                format!(
                    "nondecreasing below {:e}; decay factor to smallest zeta {:.4e}",
                    zeta_grid[end],
                    g[0] / g[end]
                ),
            );
        }
    }
    Ok(report)
}

/// Samples `ω(0) = 0`, monotonicity and concavity of a modulus on `(0, r_cap]`.
///
/// Concavity is tested through chord slopes, which must be nonincreasing.
pub fn check_moc_assumptions(moc: &ModulusOfContinuity) -> VerificationReport {
    let grid = log_grid(1e-300, moc.r_cap(), 4096);
    let w: Vec<f64> = grid.iter().map(|&r| moc.eval(r)).collect();
    let mut report = VerificationReport::new("modulus");
    report.push("vanishes_at_zero", Verdict::from_bool(moc.eval(0.0) == 0.0), None, "");
    let mut beyond = grid.clone();
    beyond.extend(log_grid(moc.r_cap(), 1e3, 64).into_iter().skip(1));
    let wb: Vec<f64> = beyond.iter().map(|&r| moc.eval(r)).collect();
    report.push("nondecreasing", Verdict::from_bool(nondecreasing(&wb)), None, "");

    let slopes: Vec<f64> = grid
        .windows(2)
        .zip(w.windows(2))
        .map(|(r, v)| (v[1] - v[0]) / (r[1] - r[0]))
        .collect();
    let worst = slopes
        .windows(2)
        .map(|s| (s[1] - s[0]) / s[0].abs().max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max);
    report.push(
        "concave",
        Verdict::from_bool(worst <= 1e-12),
        Some(worst),
        format!(
            "largest relative chord-slope increase; concave up to e^-(beta+1) = {:e}",
            ModulusOfContinuity::concavity_cap(moc.beta())
        ),
    );
    report
}

/// Outcome of a dyadic trend test for a quantity expected to vanish as `r → 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSummary {
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Fitted exponent `p` of `ratio ∝ (-log r)^p` over the tail window.
    pub log_exponent: f64,
    /// Last value over first value inside the tail window.
    pub decay_factor: f64,
    pub verdict: Verdict,
}

/// Dyadic radii `2^-j` used by the criticality checks.
pub const CRITICALITY_J: std::ops::RangeInclusive<i32> = 4..=40;
/// Number of trailing dyadic points the trend test inspects.
pub const TREND_WINDOW: usize = 20;
/// Minimum magnitude of the fitted exponent for a decisive verdict.
pub const TREND_EXPONENT_MARGIN: f64 = 0.05;

/// Decides whether `ratios` (sampled at decreasing `radii`) tend to zero.
///
/// Over the last [`TREND_WINDOW`] points: PASS when the sequence is strictly
/// decreasing and the fitted exponent in `-log r` is below `-margin`; FAIL when
/// the exponent exceeds `+margin`; INCONCLUSIVE otherwise.
pub fn vanishing_trend(radii: &[f64], ratios: &[f64]) -> TrendSummary {
    let n = ratios.len();
    let w = TREND_WINDOW.min(n);
    let tail = n - w;
    let xs: Vec<f64> = radii[tail..].iter().map(|r| (-r.ln()).ln()).collect();
    let ys: Vec<f64> = ratios[tail..].iter().map(|v| v.ln()).collect();
    let p = least_squares_slope(&xs, &ys);
    let decreasing = ratios[tail..].windows(2).all(|v| v[1] < v[0]);
    let verdict = if ratios[tail..].iter().any(|v| !(v.is_finite() && *v > 0.0)) || !p.is_finite() {
        Verdict::Inconclusive
    } else if decreasing && p < -TREND_EXPONENT_MARGIN {
        Verdict::Pass
    } else if p > TREND_EXPONENT_MARGIN {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    TrendSummary {
        radii: radii.to_vec(),
        ratios: ratios.to_vec(),
        log_exponent: p,
        decay_factor: ratios[n - 1] / ratios[tail],
        verdict,
    }
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Full criticality audit of a triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    /// `m(1/r) ω(r) / (r k(r))`, which must vanish for conditional regularity.
    pub regularity_ratio: TrendSummary,
    /// `(m(1/r) / k(r)) · ω'(r)/ω(r)`, which must vanish for MOC conservation.
    pub conservation_ratio: TrendSummary,
    pub report: VerificationReport,
}

impl CriticalityReport {
    pub fn verdict(&self) -> Verdict {
        self.report.verdict()
    }
}

/// Growth exponent used for the `ω(r)/r^γ` trend.
pub const GROWTH_GAMMA: f64 = 0.5;

/// Checks the two vanishing-ratio conditions and the `ω(r)/r^γ` growth condition.
pub fn check_criticality(triple: &SymbolTriple) -> CriticalityReport {
    let radii: Vec<f64> = CRITICALITY_J.map(|j| 2f64.powi(-j)).collect();
    let k = &triple.kernel;
    let m = &triple.multiplier;
    let w = &triple.moc;

    let reg: Vec<f64> = radii
        .iter()
        .map(|&r| m.eval(1.0 / r) * w.eval(r) / (r * k.eval(r)))
        .collect();
    let cons: Vec<f64> = radii
        .iter()
        .map(|&r| m.eval(1.0 / r) / k.eval(r) * w.log_derivative(r))
        .collect();
    let regularity_ratio = vanishing_trend(&radii, &reg);
    let conservation_ratio = vanishing_trend(&radii, &cons);

    let mut report = VerificationReport::new("criticality");
    report.push(
        "conditional_regularity_ratio",
        regularity_ratio.verdict,
        Some(*reg.last().unwrap()),
        format!("m(1/r) w(r) / (r k(r)) ~ (-log r)^{:.4}", regularity_ratio.log_exponent),
    );
    report.push(
        "moc_conservation_ratio",
        conservation_ratio.verdict,
        Some(*cons.last().unwrap()),
        format!(
            "(m(1/r)/k(r)) w'(r)/w(r) ~ (-log r)^{:.4}",
            conservation_ratio.log_exponent
        ),
    );
    report.extend(check_growth(w, GROWTH_GAMMA));
    CriticalityReport {
        regularity_ratio,
        conservation_ratio,
        report,
    }
}

/// `ω(r)/r^γ → ∞` as `r → 0` and `→ 0` as `r → ∞`, as dyadic monotone trends.
pub fn check_growth<W: RadialFn + ?Sized>(moc: &W, gamma: f64) -> VerificationReport {
    let mut report = VerificationReport::new("growth");
    let small: Vec<f64> = CRITICALITY_J
        .map(|j| {
            let r = 2f64.powi(-j);
            moc.eval(r) / r.powf(gamma)
        })
        .collect();
    let tail = &small[small.len() - TREND_WINDOW..];
    let rising = tail.windows(2).all(|v| v[1] > v[0]) && tail[tail.len() - 1] > 2.0 * tail[0];
    report.push(
        "moc_growth_small_r",
        Verdict::from_bool(rising),
        Some(*small.last().unwrap()),
        format!("w(r)/r^{gamma} increasing as r -> 0"),
    );
    let large: Vec<f64> = (0..=40)
        .map(|j| {
            let r = 2f64.powi(j);
            moc.eval(r) / r.powf(gamma)
        })
        .collect();
    let falling = large.windows(2).all(|v| v[1] < v[0]) && large[large.len() - 1] < 0.5 * large[0];
    report.push(
        "moc_decay_large_r",
        Verdict::from_bool(falling),
        Some(*large.last().unwrap()),
        format!("w(r)/r^{gamma} decreasing as r -> infinity"),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernel_values() {
        let k0 = RadialKernel::new(0.0).unwrap();
        assert_eq!(k0.eval(1.0), 1.0);
        assert_relative_eq!(k0.eval(1.0 / (2.0 * std::f64::consts::PI)), 2.0 * std::f64::consts::PI);
        let k1 = RadialKernel::new(1.0).unwrap();
        assert_relative_eq!(k1.eval(0.1), 10.0 / 20f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(k1.eval(0.1), 3.33808, max_relative = 1e-5);
        assert!(matches!(k1.try_eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(k1.try_eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn kernel_derivative_matches_finite_difference() {
        for a in [0.0, 0.3, 1.0] {
            let k = RadialKernel::new(a).unwrap();
            for r in [1e-6, 1e-3, 0.1, 2.0] {
                let h = r * 1e-6;
                let fd = (k.eval(r + h) - k.eval(r - h)) / (2.0 * h);
                assert_relative_eq!(k.derivative(r), fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn multiplier_values() {
        let m0 = VelocityMultiplier::new(0.0).unwrap();
        for z in [0.0, 1.0, 1e300, f64::INFINITY] {
            assert_eq!(m0.eval(z), 1.0);
        }
        let m1 = VelocityMultiplier::new(1.0).unwrap();
        assert_relative_eq!(m1.eval(0.0), std::f64::consts::LN_10, max_relative = 1e-12);
        let mh = VelocityMultiplier::new(0.5).unwrap();
        assert_relative_eq!(mh.eval(90.0), 2.145966, max_relative = 1e-6);
        assert_eq!(m1.eval(f64::INFINITY), f64::MAX);
    }

    #[test]
    fn moc_values() {
        let w = ModulusOfContinuity::new(1.0, E.powi(-2)).unwrap();
        assert_relative_eq!(w.eval((-10f64).exp()), 0.1, max_relative = 1e-14);
        assert_eq!(w.eval(0.0), 0.0);
        let w2 = ModulusOfContinuity::new(2.0, E.powi(-2)).unwrap();
        assert_relative_eq!(w2.eval(1.0), 0.25, max_relative = 1e-14);
        assert!(ModulusOfContinuity::new(0.0, 0.1).is_err());
        assert!(ModulusOfContinuity::new(1.0, 1.5).is_err());
    }

    #[test]
    fn moc_derivative_matches_finite_difference() {
        let w = ModulusOfContinuity::new(0.8, 0.1).unwrap();
        for r in [1e-8, 1e-4, 0.05] {
            let h = r * 1e-6;
            let fd = (w.eval(r + h) - w.eval(r - h)) / (2.0 * h);
            assert_relative_eq!(w.derivative(r), fd, max_relative = 1e-6);
            assert_relative_eq!(w.log_derivative(r), w.derivative(r) / w.eval(r), max_relative = 1e-12);
        }
        assert_eq!(w.derivative(0.5), 0.0);
    }

    #[test]
    fn default_cap_keeps_concavity() {
        for beta in [0.3, 1.0, 2.0, 5.0] {
            let w = ModulusOfContinuity::with_default_cap(beta).unwrap();
            assert!(check_moc_assumptions(&w).verdict().is_pass(), "beta = {beta}");
        }
        // A cap beyond e^-(beta+1) breaks concavity near the cap.
        let w = ModulusOfContinuity::new(2.0, E.powi(-2)).unwrap();
        assert_eq!(check_moc_assumptions(&w).verdict_of("concave"), Verdict::Fail);
    }

    #[test]
    fn kernel_checks_critical() {
        let rep = check_kernel_assumptions(&RadialKernel::new(0.0).unwrap(), &default_r_grid()).unwrap();
        assert!(rep.verdict().is_pass(), "{rep:#?}");
        assert_relative_eq!(rep.value_of("doubling").unwrap(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn kernel_checks_log() {
        let rep = check_kernel_assumptions(&RadialKernel::new(1.0).unwrap(), &default_r_grid()).unwrap();
        assert!(rep.verdict().is_pass(), "{rep:#?}");
        assert!(rep.value_of("doubling").unwrap() <= 2.0);
        // Threshold for eps = 0.01 and alpha1 = 1 sits near e^-100.
        let r_eps = rep.value_of("supercritical_dissipation_eps_0.01").unwrap();
        assert!(r_eps > 1e-46 && r_eps < 1e-42, "{r_eps:e}");
    }

    #[test]
    fn kernel_checks_reject_increasing_kernel() {
        let rep = check_kernel_assumptions(&|r: f64| r, &default_r_grid()).unwrap();
        assert_eq!(rep.verdict_of("r2k_nondecreasing"), Verdict::Pass);
        assert_eq!(rep.verdict_of("nonincreasing"), Verdict::Fail);
    }

    #[test]
    fn grid_validation() {
        let k = RadialKernel::new(0.0).unwrap();
        assert!(matches!(
            check_kernel_assumptions(&k, &log_grid(1.0, 1e9, 32)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            check_kernel_assumptions(&k, &log_grid(1.0, 1e7, 128)),
            Err(Error::Config(_))
        ));
        let m = VelocityMultiplier::new(0.0).unwrap();
        assert!(matches!(
            check_multiplier_assumptions(&m, &log_grid(1.0, 10.0, 128)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn multiplier_checks() {
        let rep = check_multiplier_assumptions(&VelocityMultiplier::new(0.0).unwrap(), &default_zeta_grid()).unwrap();
        assert!(rep.verdict().is_pass(), "{rep:#?}");
        assert_eq!(rep.value_of("hormander_mikhlin_1"), Some(0.0));
        assert_eq!(rep.value_of("hormander_mikhlin_2"), Some(0.0));

        let rep = check_multiplier_assumptions(&VelocityMultiplier::new(1.0).unwrap(), &default_zeta_grid()).unwrap();
        assert!(rep.verdict().is_pass(), "{rep:#?}");
        // zeta m'(zeta) = zeta/(10+zeta) <= 1 <= m.
        assert!(rep.value_of("hormander_mikhlin_1").unwrap() <= 1.0);

        let rep = check_multiplier_assumptions(&|z: f64| z.exp(), &log_grid(1e-4, 1e6, 512)).unwrap();
        assert_eq!(rep.verdict_of("hormander_mikhlin_1"), Verdict::Fail);
    }

    #[test]
    fn criticality_examples() {
        let t = SymbolTriple::new(0.3, 0.3, 0.8, None).unwrap();
        assert_eq!(check_criticality(&t).verdict(), Verdict::Pass);
        assert_eq!(check_criticality(&SymbolTriple::critical()).verdict(), Verdict::Pass);
        let t = SymbolTriple::new(0.6, 0.6, 2.0, None).unwrap();
        let rep = check_criticality(&t);
        assert_eq!(rep.verdict(), Verdict::Fail);
        assert_eq!(rep.report.verdict_of("moc_conservation_ratio"), Verdict::Fail);
        assert_eq!(rep.report.verdict_of("conditional_regularity_ratio"), Verdict::Pass);
        assert!((rep.conservation_ratio.log_exponent - 0.2).abs() < 0.02);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn criticality_depends_on_exponent_sums(
            a1 in 0.0f64..1.0,
            a2 in 0.0f64..1.0,
            beta in 0.05f64..3.0,
        ) {
            let s = a1 + a2;
            proptest::prop_assume!((beta - s).abs() >= 0.2 && (1.0 - s).abs() >= 0.2);
            let rep = check_criticality(&SymbolTriple::new(a1, a2, beta, None).unwrap());
            proptest::prop_assert_eq!(
                rep.report.verdict_of("conditional_regularity_ratio"),
                Verdict::from_bool(beta > s)
            );
            proptest::prop_assert_eq!(
                rep.report.verdict_of("moc_conservation_ratio"),
                Verdict::from_bool(s < 1.0)
            );
        }

        #[test]
        fn doubling_ratio_in_unit_to_two(a1 in 0.0f64..=1.0, e in -300.0f64..2.0) {
            let k = RadialKernel::new(a1).unwrap();
            let r = 10f64.powf(e);
            let q = k.eval(r / 2.0) / k.eval(r);
            proptest::prop_assert!((1.0..=2.0 * (1.0 + 1e-15)).contains(&q), "q = {}", q);
        }

        #[test]
        fn multiplier_is_one_iff_alpha2_zero(a2 in 0.0f64..2.0, z in 0.0f64..1e6) {
            let m = VelocityMultiplier::new(a2).unwrap();
            proptest::prop_assert_eq!(m.eval(z) == 1.0, a2 == 0.0);
        }
    }

    #[test]
    fn triple_json_round_trip() {
        let t: SymbolTriple =
            serde_json::from_str(r#"{"alpha1": 0.3, "alpha2": 0.2, "beta": 0.8, "r_cap": 0.1}"#).unwrap();
        assert_eq!(t.moc.r_cap(), 0.1);
        let back: SymbolTriple = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(t, back);
        assert!(serde_json::from_str::<SymbolTriple>(r#"{"alpha1": -1, "alpha2": 0, "beta": 1}"#).is_err());
        assert!(serde_json::from_str::<SymbolTriple>(r#"{"alpha1": 0, "alpha2": 0, "beta": 1, "x": 1}"#).is_err());
    }
}
