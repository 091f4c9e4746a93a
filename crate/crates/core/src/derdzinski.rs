//! The warp equation for constant-scalar-curvature warped products
//! `dt^2 + h^{4/m}(t) g_0` over an Einstein fiber:
//!
//! ```text
//! h'' = (m R / (4(m-1))) h^(1 - 4/m) - (m C / 4) h,    h > 0,
//! ```
//!
//! with `m >= 3` the fiber parameter, `R > 0` the fiber scalar curvature and
//! `C > 0` a stiffness constant (the linearization about the constant
//! solution oscillates at frequency `sqrt(C)`). Like the cylinder equation in
//! [`crate::fowler`], this is a one-degree-of-freedom mechanical system with
//! a single potential well on `h > 0`; the closed-orbit energy window is
//! `(E_center, 0)` and each energy in it carries a nonconstant positive
//! periodic warp.

use crate::error::{Error, Result};
use crate::orbit::{
    period_quadrature, require_in_window, solve_orbit, turning_points, OneDofSystem, OrbitFamily,
    PeriodicOrbit, DEFAULT_RESIDUAL_BOUND,
};

/// The warp equation at fixed parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerdzinskiSystem {
    m: u32,
    fiber_scalar: f64,
    stiffness: f64,
}

impl DerdzinskiSystem {
    /// Build the system; requires `m >= 3` and positive, finite
    /// `fiber_scalar` (the `R` of the equation) and `stiffness` (its `C`).
    pub fn new(m: u32, fiber_scalar: f64, stiffness: f64) -> Result<Self> {
        if m < 3 {
            return Err(Error::invalid_parameter(format!(
                "fiber parameter must be at least 3, got {m}"
            )));
        }
        if !(fiber_scalar.is_finite() && fiber_scalar > 0.0) {
            return Err(Error::invalid_parameter(format!(
                "fiber scalar curvature must be positive and finite, got {fiber_scalar}"
            )));
        }
        if !(stiffness.is_finite() && stiffness > 0.0) {
            return Err(Error::invalid_parameter(format!(
                "stiffness must be positive and finite, got {stiffness}"
            )));
        }
        Ok(Self {
            m,
            fiber_scalar,
            stiffness,
        })
    }

    /// Fiber parameter `m`.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Fiber scalar curvature (`R`).
    pub fn fiber_scalar(&self) -> f64 {
        self.fiber_scalar
    }

    /// Linear restoring coefficient (`C`).
    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }

    fn mf(&self) -> f64 {
        f64::from(self.m)
    }

    /// Residual of the equation at a state: `h'' - accel(h)`. Zero exactly on
    /// solutions.
    pub fn residual(&self, h: f64, h_dd: f64) -> f64 {
        h_dd - self.accel(h)
    }

    /// The constant positive solution `(R/(C(m-1)))^(m/4)` — the bottom of
    /// the potential well.
    pub fn constant_solution(&self) -> f64 {
        self.center()
    }

    /// Period of infinitesimal oscillations about the constant solution,
    /// `2*pi/sqrt(C)` — independent of `m` and of the fiber curvature.
    pub fn critical_period(&self) -> f64 {
        self.small_oscillation_period()
    }

    /// The period map `E -> T(E)` on the closed-orbit energy window.
    pub fn period_function(&self, energy: f64) -> Result<f64> {
        period_quadrature(self, energy)
    }

    /// Turning points `(h_min, h_max)` of the orbit at `energy`.
    pub fn turning_points(&self, energy: f64) -> Result<(f64, f64)> {
        turning_points(self, energy)
    }

    /// Solve for the nonconstant periodic warp at `energy`, which must lie
    /// strictly inside the closed-orbit window `(E_center, 0)`.
    pub fn solve_at_energy(&self, energy: f64) -> Result<PeriodicOrbit> {
        require_in_window(self, energy)?;
        solve_orbit(
            self,
            OrbitFamily::Derdzinski {
                m: self.m,
                r: self.fiber_scalar,
                c: self.stiffness,
            },
            energy,
            DEFAULT_RESIDUAL_BOUND,
        )
    }
}

impl OneDofSystem for DerdzinskiSystem {
    fn potential(&self, q: f64) -> f64 {
        let m = self.mf();
        let pull = m * m * self.fiber_scalar / (8.0 * (m - 1.0) * (m - 2.0));
        let push = m * self.stiffness / 8.0;
        -pull * q.powf((2.0 * m - 4.0) / m) + push * q * q
    }

    fn accel(&self, q: f64) -> f64 {
        let m = self.mf();
        m * self.fiber_scalar / (4.0 * (m - 1.0)) * q.powf(1.0 - 4.0 / m)
            - m * self.stiffness / 4.0 * q
    }

    fn accel_slope(&self, q: f64) -> f64 {
        let m = self.mf();
        self.fiber_scalar * (m - 4.0) / (4.0 * (m - 1.0)) * q.powf(-4.0 / m)
            - m * self.stiffness / 4.0
    }

    fn center(&self) -> f64 {
        let m = self.mf();
        (self.fiber_scalar / (self.stiffness * (m - 1.0))).powf(m / 4.0)
    }

    fn angular_frequency(&self) -> f64 {
        self.stiffness.sqrt()
    }
}
