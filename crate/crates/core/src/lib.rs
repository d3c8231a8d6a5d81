//! Numerical verification engine for weighted Hardy–Rellich type integral
//! identities on homogeneous groups, reduced to one-dimensional radial
//! calculus in the homogeneous dimension `Q`.
//!
//! Everything funnels through three layers:
//!
//! * [`profile`] — radial test functions with exact derivatives (jets),
//!   built from a small set of atoms (powers, log-powers, smooth cutoffs)
//!   and combinators (sum, product, dilation, complex polar form);
//! * [`quadrature`] — adaptive weighted radial integration
//!   `sphere_mass × ∫ F(r) r^{Q−1} dr` with declared breakpoints;
//! * [`identities`] — the catalogue of equalities, sharp inequalities and
//!   uncertainty principles, each expressed as coefficient × integral terms,
//!   with residual computation, verdicts and an independent compositional
//!   re-derivation used to cross-check the closed forms.
//!
//! On top of those sit [`sharpness`] (extremizing-sequence drivers and
//! divergence-law fits), [`euclid`] (Euclidean energy identities for
//! separable modes, cross-checked against a Monte Carlo oracle in
//! [`mc`]), and [`suite`] (batch runner with JSON reports).

pub mod constants;
pub mod error;
pub mod euclid;
pub mod identities;
pub mod jet;
pub mod mc;
pub mod operators;
pub mod profile;
pub mod quadrature;
pub mod remainders;
pub mod report;
pub mod sharpness;
pub mod suite;

pub use error::HrError;
pub use jet::Jet;
pub use operators::GroupContext;
pub use profile::{CutoffSpec, RadialProfile};

/// Crate result alias.
pub type Result<T> = std::result::Result<T, HrError>;
