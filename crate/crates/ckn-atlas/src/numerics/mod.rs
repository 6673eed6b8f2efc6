//! Shared numerical kernels: special functions, quadrature, root finding,
//! ODE integration, and tridiagonal eigenvalues. Everything here is plain
//! f64 and deterministic.

pub mod eigen;
pub mod gamma;
pub mod ode;
pub mod quad;
pub mod roots;

pub use eigen::{lowest_eigenvalues, GridOperator};
pub use gamma::{gamma, ln_gamma, ln_gamma_ratio_half};
pub use ode::{integrate_ivp, Event, EventDirection, IvpOptions, IvpSolution, IvpStatus};
pub use quad::{
    integrate_half_line, integrate_interval, integrate_line, DecayEnvelope, Quadrature,
};
pub use roots::{find_root, RootResult};
