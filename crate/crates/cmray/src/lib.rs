//! Class-field invariants over imaginary quadratic fields.
//!
//! The crate computes, at arbitrary precision with tracked error radii:
//! exact ideal arithmetic and ray class groups of imaginary quadratic
//! fields, modular q-series (g2, g3, Delta, j, the Weierstrass p-function,
//! Fricke and Siegel functions), Fricke and Siegel-Ramachandra invariants
//! attached to ray classes, Stickelberger elements and Hecke L-values, and
//! numeric certificates that suitable invariant values generate ray and
//! ring class fields.

pub mod ap;
pub mod fieldgen;
pub mod invariants;
pub mod limitformula;
pub mod modfun;
pub mod qfield;
pub mod rayclass;

pub use ap::{ApComplex, ApReal};
pub use qfield::{AlgNum, Field, Ideal};
pub use rayclass::{Modulus, RayClass, RayClassGroup};
