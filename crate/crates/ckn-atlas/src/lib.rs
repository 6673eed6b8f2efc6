//! Sharp constants, extremal profiles, and threshold curves for two families
//! of weighted interpolation inequalities (power-law weights on R^d and their
//! logarithmic endpoint), studied on the cylinder R x S^{d-1} where radial
//! power weights become translation-invariant.
//!
//! Module map:
//! - [`numerics`]: quadrature, ODE, eigenvalue, and special-function kernels
//! - [`constants`]: closed-form optimal constants and threshold formulas
//! - [`profiles`]: extremal profiles on the cylinder and functional evaluation
//! - [`gn`]: Gagliardo-Nirenberg ground states by shooting, and their constant
//! - [`spectrum`]: linearized stability operators and threshold location
//! - [`atlas`]: threshold curves in the (p, a) plane, CSV/SVG emission, and
//!   the self-check suite

pub mod atlas;
pub mod constants;
pub mod error;
pub mod gn;
pub mod numerics;
pub mod profiles;
pub mod spectrum;

pub use error::{Error, Result};
