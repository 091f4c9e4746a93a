//! The reduced equation for the conformal factor of a constant-scalar-curvature
//! product metric on a round cylinder of dimension `n >= 3`:
//!
//! ```text
//! u'' = ((n-2)^2/4) u - (n(n-2)/4) u^((n+2)/(n-2)),    u > 0.
//! ```
//!
//! This is a one-degree-of-freedom mechanical system. Its potential has a
//! single well on `u > 0` whose bottom is the constant solution; every energy
//! strictly between the well bottom and zero carries a closed orbit, and those
//! orbits yield the nonconstant periodic factors consumed by the geometry
//! layers. The period map `E -> T(E)` increases from the small-oscillation
//! limit `2*pi/sqrt(n-2)` (not attained) to infinity, so a periodic solution
//! of prescribed period exists exactly for periods above that threshold;
//! [`FowlerSystem::solve_period`] inverts the map by shooting on the energy.

use crate::error::{Error, Result};
use crate::numerics::{find_root_fallible, Bracket};
use crate::orbit::{
    period_quadrature, solve_orbit, turning_points, OneDofSystem, OrbitFamily, PeriodicOrbit,
    DEFAULT_RESIDUAL_BOUND,
};

/// Acceptable relative mismatch between a requested period and the measured
/// period of the orbit returned for it.
pub const PERIOD_MATCH_TOL: f64 = 1e-8;

/// The cylinder equation at a fixed dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FowlerSystem {
    n: u32,
}

impl FowlerSystem {
    /// Build the system for cylinder dimension `n`; requires `n >= 3`.
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid_parameter(format!(
                "cylinder dimension must be at least 3, got {n}"
            )));
        }
        Ok(Self { n })
    }

    /// The dimension this system was built for.
    pub fn n(&self) -> u32 {
        self.n
    }

    fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// Exponent `(n+2)/(n-2)` of the nonlinearity.
    pub fn exponent(&self) -> f64 {
        let n = self.nf();
        (n + 2.0) / (n - 2.0)
    }

    /// Residual of the equation at a state: `u'' - accel(u)`. Zero exactly on
    /// solutions.
    pub fn residual(&self, u: f64, u_dd: f64) -> f64 {
        u_dd - self.accel(u)
    }

    /// The constant positive solution `((n-2)/n)^((n-2)/4)` — the bottom of
    /// the potential well.
    pub fn constant_solution(&self) -> f64 {
        self.center()
    }

    /// Period of infinitesimal oscillations about the constant solution,
    /// `2*pi/sqrt(n-2)`. Closed-orbit periods approach this value from above
    /// but never attain it.
    pub fn critical_period(&self) -> f64 {
        self.small_oscillation_period()
    }

    /// The period map `E -> T(E)` on the closed-orbit energy window, by
    /// singular quadrature between the turning points.
    pub fn period_function(&self, energy: f64) -> Result<f64> {
        period_quadrature(self, energy)
    }

    /// Turning points `(u_min, u_max)` of the orbit at `energy`.
    pub fn turning_points(&self, energy: f64) -> Result<(f64, f64)> {
        turning_points(self, energy)
    }

    /// Solve for the nonconstant periodic solution of prescribed `period`.
    ///
    /// Fails with [`Error::BelowThreshold`] when `period` does not exceed the
    /// small-oscillation limit, where no such solution exists. On success the
    /// orbit carries its residual and energy-flatness certificates, and the
    /// measured period matches the request to [`PERIOD_MATCH_TOL`]
    /// (relative).
    pub fn solve_period(&self, period: f64) -> Result<PeriodicOrbit> {
        let energy = self.energy_for_period(period)?;
        let orbit = solve_orbit(
            self,
            OrbitFamily::Fowler { n: self.n },
            energy,
            DEFAULT_RESIDUAL_BOUND,
        )?;
        let err = (orbit.period() - period).abs();
        if err > PERIOD_MATCH_TOL * period.max(1.0) {
            return Err(Error::OrbitValidation(format!(
                "solved orbit has period {} but {period} was requested (off by {err:e})",
                orbit.period()
            )));
        }
        Ok(orbit)
    }

    /// Invert the period map: find the energy whose closed orbit has the
    /// requested period.
    fn energy_for_period(&self, period: f64) -> Result<f64> {
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::invalid_parameter(format!(
                "requested period must be positive and finite, got {period}"
            )));
        }
        let threshold = self.critical_period();
        if period <= threshold {
            return Err(Error::BelowThreshold {
                dim: self.n,
                requested: period,
                threshold,
            });
        }

        // Shoot on the relative offset s in (0, 1), with E = E_center*(1 - s):
        // T(E(s)) grows monotonically from the threshold (s -> 0) to infinity
        // (s -> 1, where the orbit degenerates toward the origin).
        let e_center = self.center_energy();
        let period_at = |s: f64| period_quadrature(self, e_center * (1.0 - s));

        let mut s_lo = 1e-6;
        while period_at(s_lo)? >= period {
            s_lo *= 0.1;
            if s_lo < 1e-13 {
                return Err(Error::invalid_parameter(format!(
                    "period {period} sits too close above the threshold {threshold} to resolve"
                )));
            }
        }
        const S_CAP: f64 = 1.0 - 1e-9;
        let mut s_hi = (3.0 * s_lo).min(S_CAP);
        while period_at(s_hi)? <= period {
            if s_hi >= S_CAP {
                return Err(Error::invalid_parameter(format!(
                    "failed to bracket an orbit of period {period}"
                )));
            }
            s_hi = (3.0 * s_hi).min(S_CAP);
        }

        let s = find_root_fallible(
            |s| Ok(period_at(s)? - period),
            Bracket::new(s_lo, s_hi)?,
            1e-13,
        )?;
        Ok(e_center * (1.0 - s))
    }
}

impl OneDofSystem for FowlerSystem {
    fn potential(&self, q: f64) -> f64 {
        let n = self.nf();
        let k = (n - 2.0) * (n - 2.0) / 8.0;
        k * (q.powf(2.0 * n / (n - 2.0)) - q * q)
    }

    fn accel(&self, q: f64) -> f64 {
        let n = self.nf();
        (n - 2.0) * (n - 2.0) / 4.0 * q - n * (n - 2.0) / 4.0 * q.powf((n + 2.0) / (n - 2.0))
    }

    fn accel_slope(&self, q: f64) -> f64 {
        let n = self.nf();
        (n - 2.0) * (n - 2.0) / 4.0 - n * (n + 2.0) / 4.0 * q.powf(4.0 / (n - 2.0))
    }

    fn center(&self) -> f64 {
        let n = self.nf();
        ((n - 2.0) / n).powf((n - 2.0) / 4.0)
    }

    fn angular_frequency(&self) -> f64 {
        (self.nf() - 2.0).sqrt()
    }
}
