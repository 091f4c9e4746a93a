//! Shared numerical kernel: adaptive ODE integration with dense output,
//! adaptive (and endpoint-singular) quadrature, and bracketed root finding.
//!
//! Everything downstream — period functions, orbit solvers, reparametrization
//! maps — is built from these three primitives, so their tolerances are the
//! ones that set the accuracy budget of the whole toolkit.

pub mod ivp;
pub mod quad;
pub mod root;

pub use ivp::{integrate_ivp, Trajectory};
pub use quad::{quad, quad_singular};
pub use root::{find_root, find_root_fallible, Bracket};

/// Default relative tolerance for orbit integrations.
pub const DEFAULT_REL_TOL: f64 = 1e-12;
/// Default absolute tolerance for orbit integrations.
pub const DEFAULT_ABS_TOL: f64 = 1e-13;
