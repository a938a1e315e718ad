//! Time integration of `∂ₜθ + u·∇θ + Lθ = 0`.
//!
//! The dissipation is diagonal in Fourier space and integrated exactly; the
//! transport term is explicit. One step of size `dt` with `E = e^{−P(|k|) dt}`:
//!
//! ```text
//! θ*    = E (θ + dt N(θ))
//! θnew  = E θ + dt/2 (E N(θ) + N(θ*))
//! ```
//!
//! where `N(θ) = −dealias(u·∇θ)` with products formed in physical space.

mod initial;
mod run;

pub use initial::{InitialData, InitialSpec, TrigFactor, TrigTerm};
pub use run::{integrate, run, Event, RunOutput, BLOWUP_SNAPSHOT, DIAGNOSTICS_FILE, SNAPSHOT_DIR};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    compute_velocity, dealias_in_place, gradient, velocity_coefficients, Fft2, Grid, RealField, SpectralField,
    VectorField,
};
use crate::symbols::{RadialFn, SymbolTriple};

/// Velocity floor in the CFL denominator.
pub const CFL_VELOCITY_FLOOR: f64 = 1e-12;
/// Default ceiling on `‖∇θ‖_{L∞}` before a run is declared blown up.
pub const DEFAULT_GRADIENT_CEILING: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub time: f64,
    pub theta: SpectralField,
    /// `∫₀ᵗ ‖∇θ‖_{L∞} ds`, accumulated with left-endpoint values.
    pub blowup_integral: f64,
}

impl SimState {
    pub fn new(theta: SpectralField) -> Self {
        Self {
            time: 0.0,
            theta,
            blowup_integral: 0.0,
        }
    }

    pub fn grid(&self) -> Grid {
        self.theta.grid()
    }
}

/// State of a run that stopped early.
#[derive(Debug, Clone)]
pub struct BlowUp {
    pub reason: String,
    /// Time reached by the last finite state.
    pub time: f64,
    pub last_state: SimState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub triple: SymbolTriple,
    pub cfl_factor: f64,
    pub dt_max: f64,
    pub dealias: bool,
    /// Whether the transport term is integrated; off gives pure dissipation.
    pub transport: bool,
    pub gradient_ceiling: f64,
}

impl StepperConfig {
    pub fn new(triple: SymbolTriple) -> Self {
        Self {
            triple,
            cfl_factor: 0.5,
            dt_max: 0.05,
            dealias: true,
            transport: true,
            gradient_ceiling: DEFAULT_GRADIENT_CEILING,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_factor > 0.0 && self.cfl_factor <= 1.0) {
            return Err(Error::Config(format!(
                "cfl_factor must lie in (0, 1], got {}",
                self.cfl_factor
            )));
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return Err(Error::Config(format!("dt_max must be positive, got {}", self.dt_max)));
        }
        if !(self.gradient_ceiling > 0.0) {
            return Err(Error::Config(format!(
                "gradient_ceiling must be positive, got {}",
                self.gradient_ceiling
            )));
        }
        Ok(())
    }
}

/// Transport term and the quantities evaluated alongside it.
struct Tendency {
    n_hat: Vec<Complex64>,
    grad_linf: f64,
}

/// A configured integrator for one grid; precomputes the dissipation symbol.
#[derive(Debug, Clone)]
pub struct Stepper {
    config: StepperConfig,
    grid: Grid,
    /// `P(|k|)` per coefficient, zero at `k = 0`.
    symbol: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: Grid, config: StepperConfig) -> Result<Self> {
        config.validate()?;
        let p = config.triple.symbol;
        let symbol: Vec<f64> = (0..grid.len())
            .map(|idx| {
                if idx == 0 {
                    0.0
                } else {
                    p.eval(grid.wavenumber_norm(idx))
                }
            })
            .collect();
        Ok(Self { config, grid, symbol })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.config
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn check_grid(&self, state: &SimState) -> Result<()> {
        if state.grid() != self.grid {
            return Err(Error::Config(format!(
                "state grid n = {} does not match stepper grid n = {}",
                state.grid().n(),
                self.grid.n()
            )));
        }
        Ok(())
    }

    pub fn velocity(&self, theta: &SpectralField) -> VectorField {
        if !self.config.transport {
            return VectorField {
                x1: RealField::zeros(self.grid),
                x2: RealField::zeros(self.grid),
            };
        }
        compute_velocity(theta, &self.config.triple.multiplier)
    }

    /// `min(dt_max, cfl·Δx / max(‖u‖_{L∞}, 10⁻¹²))`.
    pub fn cfl_dt(&self, state: &SimState) -> f64 {
        let umax = self.velocity(&state.theta).max_magnitude();
        cfl_formula(self.grid.dx(), umax, self.config.cfl_factor, self.config.dt_max)
    }

    fn tendency(&self, theta: &SpectralField) -> Tendency {
        let grad = gradient(theta);
        let grad_linf = grad.max_magnitude();
        let len = self.grid.len();
        if !self.config.transport {
            return Tendency {
                n_hat: vec![Complex64::new(0.0, 0.0); len],
                grad_linf,
            };
        }
        let (u1, u2) = velocity_coefficients(theta, &self.config.triple.multiplier);
        let (u1, u2) = (u1.to_real(), u2.to_real());
        let mut prod: Vec<Complex64> = (0..len)
            .map(|i| {
                let v = u1.values()[i] * grad.x1.values()[i] + u2.values()[i] * grad.x2.values()[i];
                Complex64::new(-v, 0.0)
            })
            .collect();
        Fft2::get(self.grid.n()).forward(&mut prod);
        prod[0] = Complex64::new(0.0, 0.0);
        if self.config.dealias {
            let mut f = SpectralField::from_coefficients(self.grid, prod).expect("grid length");
            dealias_in_place(&mut f);
            prod = f.into_coefficients();
        }
        Tendency { n_hat: prod, grad_linf }
    }

    /// One ETD–Heun step.
    pub fn step(&self, state: &SimState, dt: f64) -> Result<SimState> {
        self.check_grid(state)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be positive, got {dt}")));
        }
        let blow_up = |reason: String| {
            Error::BlowUp(Box::new(BlowUp {
                reason,
                time: state.time,
                last_state: state.clone(),
            }))
        };
        let first = self.tendency(&state.theta);
        if !first.grad_linf.is_finite() {
            return Err(blow_up("non-finite gradient".into()));
        }
        if first.grad_linf > self.config.gradient_ceiling {
            return Err(blow_up(format!(
                "gradient sup norm {:.6e} exceeds ceiling {:.6e}",
                first.grad_linf, self.config.gradient_ceiling
            )));
        }
        let decay: Vec<f64> = self.symbol.iter().map(|p| (-p * dt).exp()).collect();
        let theta = state.theta.coefficients();
        let predictor: Vec<Complex64> = theta
            .iter()
            .zip(&first.n_hat)
            .zip(&decay)
            .map(|((t, n), e)| (t + n * dt) * e)
            .collect();
        let predictor = SpectralField::from_coefficients(self.grid, predictor)?;
        let second = if self.config.transport {
            self.tendency(&predictor).n_hat
        } else {
            first.n_hat.clone()
        };
        let next: Vec<Complex64> = theta
            .iter()
            .zip(&first.n_hat)
            .zip(&second)
            .zip(&decay)
            .map(|(((t, n1), n2), e)| t * e + (n1 * e + n2) * (0.5 * dt))
            .collect();
        let next = SpectralField::from_coefficients(self.grid, next)?;
        if !next.is_finite() {
            return Err(blow_up("non-finite coefficients after step".into()));
        }
        Ok(SimState {
            time: state.time + dt,
            theta: next,
            blowup_integral: state.blowup_integral + dt * first.grad_linf,
        })
    }
}

pub(crate) fn cfl_formula(dx: f64, umax: f64, cfl: f64, dt_max: f64) -> f64 {
    dt_max.min(cfl * dx / umax.max(CFL_VELOCITY_FLOOR))
}

/// Time step from the CFL rule for a standalone state.
pub fn cfl_dt(state: &SimState, config: &StepperConfig) -> Result<f64> {
    Ok(Stepper::new(state.grid(), config.clone())?.cfl_dt(state))
}

/// One ETD–Heun step for a standalone state.
pub fn step(state: &SimState, dt: f64, config: &StepperConfig) -> Result<SimState> {
    Stepper::new(state.grid(), config.clone())?.step(state, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn critical() -> StepperConfig {
        StepperConfig::new(SymbolTriple::critical())
    }

    #[test]
    fn cfl_examples() {
        assert_eq!(cfl_formula(0.1, 0.0, 0.5, 0.3), 0.3);
        let dx = 2.0 * PI / 256.0;
        assert!((cfl_formula(dx, 1.0, 0.5, 1.0) - 0.012272).abs() < 1e-6);
        let a = cfl_formula(dx, 1.0, 0.5, 1.0);
        let b = cfl_formula(dx, 2.0, 0.5, 1.0);
        assert!((a - 2.0 * b).abs() < 1e-15);
        let g = Grid::new(32).unwrap();
        let s = SimState::new(SpectralField::zeros(g));
        assert_eq!(cfl_dt(&s, &critical()).unwrap(), 0.05);
    }

    #[test]
    fn eigenmode_decay_is_exact() {
        let g = Grid::new(64).unwrap();
        let mut cfg = critical();
        cfg.transport = false;
        let stepper = Stepper::new(g, cfg).unwrap();
        let theta0 = RealField::from_fn(g, |x, _| x.sin());
        let mut s = SimState::new(theta0.to_spectral());
        for _ in 0..20 {
            s = stepper.step(&s, 0.05).unwrap();
        }
        let expected = theta0.scaled((-1.0f64).exp());
        let diff = s
            .theta
            .to_real()
            .values()
            .iter()
            .zip(expected.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10 * (-1.0f64).exp(), "{diff:e}");
    }

    #[test]
    fn zero_stays_zero() {
        let g = Grid::new(32).unwrap();
        let stepper = Stepper::new(g, critical()).unwrap();
        let mut s = SimState::new(SpectralField::zeros(g));
        for _ in 0..10 {
            let dt = stepper.cfl_dt(&s);
            s = stepper.step(&s, dt).unwrap();
        }
        assert!(s.theta.coefficients().iter().all(|c| c.norm() == 0.0));
        assert_eq!(s.blowup_integral, 0.0);
    }

    #[test]
    fn mean_is_preserved_and_integral_grows() {
        let g = Grid::new(64).unwrap();
        let stepper = Stepper::new(g, critical()).unwrap();
        let theta0 = RealField::from_fn(g, |x, y| 0.3 + x.sin() * y.sin() + y.cos());
        let mut s = SimState::new(theta0.to_spectral());
        let mut last = 0.0;
        for _ in 0..10 {
            let dt = stepper.cfl_dt(&s);
            s = stepper.step(&s, dt).unwrap();
            assert!(s.blowup_integral > last);
            last = s.blowup_integral;
        }
        assert!((s.theta.mean() - 0.3).abs() < 1e-12);
        assert!(s.theta.conjugate_asymmetry() < 1e-10);
    }

    #[test]
    fn ceiling_reports_last_state() {
        let g = Grid::new(32).unwrap();
        let mut cfg = critical();
        cfg.gradient_ceiling = 0.5;
        let stepper = Stepper::new(g, cfg).unwrap();
        let s = SimState::new(RealField::from_fn(g, |x, _| x.sin()).to_spectral());
        match stepper.step(&s, 0.01) {
            Err(Error::BlowUp(b)) => {
                assert_eq!(b.time, 0.0);
                assert_eq!(b.last_state, s);
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn second_order_in_time() {
        let g = Grid::new(32).unwrap();
        let mut cfg = critical();
        cfg.dt_max = 1.0;
        let stepper = Stepper::new(g, cfg).unwrap();
        let theta0 = RealField::from_fn(g, |x, y| x.sin() * y.sin() + y.cos()).to_spectral();
        let evolve = |steps: usize| {
            let dt = 0.1 / steps as f64;
            let mut s = SimState::new(theta0.clone());
            for _ in 0..steps {
                s = stepper.step(&s, dt).unwrap();
            }
            s.theta.to_real()
        };
        let reference = evolve(64);
        let err = |f: &RealField| {
            f.values()
                .iter()
                .zip(reference.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(&evolve(4)), err(&evolve(8)));
        let order = (e1 / e2).log2();
        assert!(order > 1.8 && order < 2.3, "observed order {order} ({e1:e}, {e2:e})");
    }
}
