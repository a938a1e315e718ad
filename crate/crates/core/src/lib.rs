//! Pseudo-spectral laboratory for the slightly supercritical surface
//! quasi-geostrophic equation
//!
//! ```text
//! ∂ₜθ + u·∇θ + Lθ = 0,    u = ∇⊥ Λ⁻¹ m(Λ) θ
//! ```
//!
//! on the 2π-periodic torus, with the logarithmic kernel/multiplier family,
//! a quadrature engine for the radial integral inequalities the regularity
//! argument relies on, and diagnostics for moduli of continuity and the
//! nonlinear maximum principle.

// Negated float comparisons reject NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod io;
pub mod quadrature;
pub mod report;
pub mod scenario;
pub mod spectral;
pub mod symbols;

pub use error::{Error, Result};
pub use report::{Check, Verdict, VerificationReport};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
