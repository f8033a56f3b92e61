#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical laboratory for the radial critical Lane-Emden problem
//!
//! ```text
//! -Δu = c(|x|) u₊^p + λ k(|x|) f(u)   in B,   u = 0 on ∂B,
//! ```
//!
//! on the unit ball of ℝᴺ. The crate covers the full loop from the equation to
//! evidence about it:
//!
//! * [`problem`]: equation family, coefficient and nonlinearity models,
//!   assumption checks and the closed-form thresholds.
//! * [`radial_ode`]: shooting from the singular center, Dirichlet solutions.
//! * [`functionals`]: radial quadrature, energies, the Sobolev constant and
//!   Talenti bubbles.
//! * [`mountain_pass`]: mountain-pass geometry, the min-max level and ray
//!   maximizers.
//! * [`pohozaev`]: Pohozaev identities and nonexistence certificates.
//! * [`scanner`]: phase-diagram scans over `(N, β, λ)` and report emission.

pub mod error;
pub mod functionals;
pub mod mountain_pass;
pub mod pohozaev;
pub mod problem;
pub mod quadrature;
pub mod radial_ode;
pub mod scanner;

pub use error::{Error, Result};
pub use problem::{CoefficientModel, Nonlinearity, ProblemSpec};
