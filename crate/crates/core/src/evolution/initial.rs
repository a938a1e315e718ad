//! Initial data library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, RealField};

/// Wire form `{kind, params, seed}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub kind: String,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigFactor {
    Sin,
    Cos,
    One,
}

impl TrigFactor {
    fn eval(self, k: i64, x: f64) -> f64 {
        match self {
            Self::Sin => (k as f64 * x).sin(),
            Self::Cos => (k as f64 * x).cos(),
            Self::One => 1.0,
        }
    }
}

/// `amplitude · f1(k1 x₁) · f2(k2 x₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    #[serde(default = "one")]
    pub amplitude: f64,
    pub f1: TrigFactor,
    #[serde(default)]
    pub k1: i64,
    pub f2: TrigFactor,
    #[serde(default)]
    pub k2: i64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// Sum of products of single modes.
    Trig(Vec<TrigTerm>),
    /// Band-limited field `Σ a_k cos(k·x) + b_k sin(k·x)` over `1 ≤ |k| ≤ k_max`,
    /// coefficients uniform in `[−1, 1]·|k|^{−slope}`, rescaled to the given RMS.
    Random {
        modes: Vec<((i64, i64), f64, f64)>,
    },
    /// `A · tanh(sin(x₂ − π)/w) · exp(−(1 + cos x₁)/s)`: a front across `x₂ = π`
    /// of width `w`, localized around `x₁ = π`.
    Front {
        amplitude: f64,
        width: f64,
        spread: f64,
    },
    Constant(f64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrigParams {
    terms: Vec<TrigTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomParams {
    #[serde(default = "default_k_max")]
    k_max: i64,
    #[serde(default = "one")]
    rms: f64,
    #[serde(default = "one")]
    slope: f64,
}

fn default_k_max() -> i64 {
    8
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrontParams {
    #[serde(default = "one")]
    amplitude: f64,
    #[serde(default = "default_width")]
    width: f64,
    #[serde(default = "default_spread")]
    spread: f64,
}

fn default_width() -> f64 {
    0.15
}

fn default_spread() -> f64 {
    0.5
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantParams {
    value: f64,
}

fn params<T: serde::de::DeserializeOwned>(kind: &str, value: &serde_json::Value) -> Result<T> {
    let value = if value.is_null() {
        serde_json::Value::Object(Default::default())
    } else {
        value.clone()
    };
    serde_json::from_value(value).map_err(|e| Error::Config(format!("theta0.params for kind '{kind}': {e}")))
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("theta0.params.{name} must be positive, got {v}")))
    }
}

impl InitialData {
    pub fn from_spec(spec: &InitialSpec) -> Result<Self> {
        match spec.kind.as_str() {
            "trig" => {
                let p: TrigParams = params("trig", &spec.params)?;
                if p.terms.iter().any(|t| !t.amplitude.is_finite()) {
                    return Err(Error::Config("theta0.params.terms: amplitude must be finite".into()));
                }
                Ok(Self::Trig(p.terms))
            }
            "random" => {
                let p: RandomParams = params("random", &spec.params)?;
                if p.k_max < 1 {
                    return Err(Error::Config(format!(
                        "theta0.params.k_max must be at least 1, got {}",
                        p.k_max
                    )));
                }
                positive("rms", p.rms)?;
                if !p.slope.is_finite() {
                    return Err(Error::Config("theta0.params.slope must be finite".into()));
                }
                Ok(Self::random(p.k_max, p.rms, p.slope, spec.seed))
            }
            "front" => {
                let p: FrontParams = params("front", &spec.params)?;
                Ok(Self::Front {
                    amplitude: p.amplitude,
                    width: positive("width", p.width)?,
                    spread: positive("spread", p.spread)?,
                })
            }
            "constant" => {
                let p: ConstantParams = params("constant", &spec.params)?;
                Ok(Self::Constant(p.value))
            }
            other => Err(Error::Config(format!(
                "theta0.kind '{other}' is not one of trig, random, front, constant"
            ))),
        }
    }

    /// Seeded band-limited field; independent of the sampling grid.
    pub fn random(k_max: i64, rms: f64, slope: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        let limit = (k_max * k_max) as f64;
        for k2 in 0..=k_max {
            for k1 in -k_max..=k_max {
                let norm2 = (k1 * k1 + k2 * k2) as f64;
                if (k2 == 0 && k1 <= 0) || norm2 > limit {
                    continue;
                }
                let w = norm2.sqrt().powf(-slope);
                let a = rng.gen_range(-1.0..=1.0) * w;
                let b = rng.gen_range(-1.0..=1.0) * w;
                modes.push(((k1, k2), a, b));
            }
        }
        // Each mode contributes (a² + b²)/2 to the mean square.
        let ms: f64 = modes.iter().map(|(_, a, b)| 0.5 * (a * a + b * b)).sum();
        let s = rms / ms.sqrt();
        for m in modes.iter_mut() {
            m.1 *= s;
            m.2 *= s;
        }
        Self::Random { modes }
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        match self {
            Self::Trig(terms) => terms
                .iter()
                .map(|t| t.amplitude * t.f1.eval(t.k1, x1) * t.f2.eval(t.k2, x2))
                .sum(),
            Self::Random { modes } => modes
                .iter()
                .map(|&((k1, k2), a, b)| {
                    let phase = k1 as f64 * x1 + k2 as f64 * x2;
                    a * phase.cos() + b * phase.sin()
                })
                .sum(),
            Self::Front {
                amplitude,
                width,
                spread,
            } => amplitude * ((x2 - std::f64::consts::PI).sin() / width).tanh() * (-(1.0 + x1.cos()) / spread).exp(),
            Self::Constant(v) => *v,
        }
    }

    pub fn sample(&self, grid: Grid) -> RealField {
        self.sample_scaled(grid, 1)
    }

    /// Samples `θ₀(λx)`; integer `λ` keeps the field periodic.
    pub fn sample_scaled(&self, grid: Grid, lambda: u32) -> RealField {
        let l = lambda as f64;
        RealField::from_fn(grid, |x1, x2| self.eval(l * x1, l * x2))
    }
}
