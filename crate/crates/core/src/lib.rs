//! Tensor algebra, pinching constants, inequality checks and exact
//! ODE-reduced families for mean curvature flow in high codimension.
//!
//! Modules:
//! - [`tensor_core`]: second fundamental form, principal split, normal curvature.
//! - [`pinching`]: named constants and the pinching quantities `f` and `Q`.
//! - [`reaction_terms`]: zeroth-order terms and their upper/lower bounds.
//! - [`verifier`]: seeded randomized checks with counterexample capture.
//! - [`flow`]: sphere, cylinder, sphere-product and hyperbolic families.
//! - [`rescaling`]: parabolic rescaling of recorded diagnostics.

pub mod bound;
pub mod error;
pub mod pinching;
pub mod reaction_terms;
pub mod rescaling;
pub mod tensor_core;
pub mod flow;
pub mod verifier;

pub use bound::Sides;
pub use error::{Error, Result};
