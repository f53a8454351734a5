//! Numerical laboratory for sigma-evolution equations with double structural
//! damping:
//!
//! ```text
//! u_tt + (-Delta)^sigma u + mu1 (-Delta)^sigma1 u_t + mu2 (-Delta)^sigma2 u_t = |u|^p
//! ```
//!
//! with `0 <= sigma1 < sigma/2 < sigma2 <= sigma`. The crate evaluates the
//! exact Fourier-space propagators of the linear flow, radial kernel norms via
//! modified Bessel transforms, spectral field evolution on periodic grids, the
//! closed-form decay/admissibility arithmetic of the solution theory, and an
//! experiment harness that fits empirical decay exponents against the
//! predicted ones.

// validations use `!(x > 0.0)` so NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::manual_is_multiple_of)]

pub mod evolution;
pub mod grid;
pub mod harness;
pub mod radial;
pub mod rates;
pub mod symbols;

pub use symbols::ModelParams;
