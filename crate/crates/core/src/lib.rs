//! Numerical core for the Maass-form / period-function correspondence on the
//! modular group.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: complex Γ, ζ, Hurwitz ζ, completed ζ, `K_μ`, Whittaker `W_{0,μ}`,
//!   divisor sums and branch-aware powers.
//! * [`autoforms`]: Fourier data (`A_n`, `A_0`, `B_0`, `C_0`) of automorphic
//!   hyperfunctions, Maass/Eisenstein evaluators and the `ι(ν)` map.
//! * [`periodmap`]: the periodic function `f`, the `f ↔ ψ` transforms, closed-form
//!   Eisenstein period functions and functional-equation residuals.
//! * [`transfer`]: the Gauss-map transfer operator: direct application, Taylor-basis
//!   truncation, spectrum, Fredholm determinants and critical-line scans.
//! * [`verify`]: named residual suites shared by the tests and the CLI.
//!
//! Data-parallel loops (matrix columns, scan grids, residual tables) go through
//! [`Execution`]; with the `parallel` feature disabled everything runs sequentially.

pub mod autoforms;
mod error;
mod exec;
pub mod periodmap;
pub mod quad;
pub mod specfun;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
