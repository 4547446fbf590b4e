//! A desk-scale laboratory for complex analysis on sums of
//! finite-dimensional `ℓ_p(ℂ^n)` blocks: multihomogeneous expansions with
//! certified Runge-type approximation, a symbolic `∂̄`-calculus for
//! polynomial data in `(z, z̄)`, and almost complex structures on
//! `B × G` driven by Lie-algebra-valued `(0,1)`-forms.
//!
//! Everything numeric is deterministic under a fixed seed; everything
//! symbolic is coefficientwise and available in an exact rational mode.

pub mod acs;
pub mod dbar;
pub mod dominate;
pub mod error;
pub mod mhcalc;
pub mod multiindex;
pub mod poly;
pub mod runge;
pub mod sampling;
pub mod sumspace;

pub use error::{Error, Result};
