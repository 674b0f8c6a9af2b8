//! Group classification of linear time-fractional diffusion-wave equations
//! with variable coefficients, evaluation of their explicit invariant
//! solutions (Mittag-Leffler, generalized Wright and Fox H-function forms),
//! and independent numerical verification of every constructed solution by
//! discretized fractional-PDE residuals and invariant-surface checks.
//!
//! Modules:
//! - [`specfun`]: the special functions the solutions are written in
//! - [`fracderiv`]: Riemann-Liouville differentiation (analytic power rule +
//!   Grünwald-Letnikov grid discretization)
//! - [`symmetry`]: the eight classified coefficient families, their
//!   infinitesimal generators, the ω-map, and numerical classification
//! - [`solutions`]: the invariant solutions for generators V₁…V₇ and their
//!   classical (α = 1, 2) limits
//! - [`verify`]: residual and invariant-surface verification on grids
//! - [`cli`]: batch front door (config parsing, commands, CSV exports)

pub mod cli;
pub mod fracderiv;
pub mod oracle;
pub mod quad;
pub mod solutions;
pub mod specfun;
pub mod sum;
pub mod symmetry;
pub mod verify;
