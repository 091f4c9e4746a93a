//! Numerical differential geometry on product cylinders.
//!
//! This crate constructs two families of metrics on `S^1(T) x S^(n-1)` —
//! conformally-cylindrical metrics `u^(4/(n-2))(dt^2 + dxi^2)` driven by a
//! periodic conformal factor, and warped products `dt^2 + h^(4/m) g_0`
//! driven by a periodic warp — and certifies their curvature properties
//! numerically:
//!
//! * the Codazzi (harmonic-curvature) identity for the Ricci tensor,
//! * non-parallelism of the Ricci tensor (`||DRic|| > 0`),
//! * vanishing of the Weyl tensor,
//! * and the conformal change of variables identifying the two families.
//!
//! Every geometric quantity is computed twice: in closed form from the
//! reduced one-dimensional equations, and through a finite-difference
//! curvature oracle that knows nothing about those closed forms. The
//! certificates compare the two routes.
//!
//! Layout: [`numerics`] holds the generic machinery (adaptive Runge–Kutta
//! with dense output, adaptive quadrature, root finding); [`periodic`] the
//! trigonometric interpolants; [`orbit`] the shared one-degree-of-freedom
//! solver; [`fowler`] and [`derdzinski`] the two reduced equations;
//! [`oracle`] the independent finite-difference curvature engine;
//! [`conformal`] the closed-form curvature of conformally-cylindrical
//! metrics and the grid certificates built on both routes;
//! [`correspondence`] the warped-to-conformal change of variables; [`io`]
//! the orbit artifacts on disk; [`verify`] the aggregated certification
//! suite.

pub mod conformal;
pub mod correspondence;
pub mod derdzinski;
pub mod error;
pub mod fowler;
pub mod io;
pub mod numerics;
pub mod oracle;
pub mod orbit;
pub mod periodic;
pub mod verify;

pub use error::{Error, Result};
