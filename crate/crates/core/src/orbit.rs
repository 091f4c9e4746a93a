//! One-degree-of-freedom Hamiltonian machinery shared by the two ODE
//! families.
//!
//! Both reduced equations have the form `q'' = -V'(q)` with a potential that
//! falls from 0 at `q = 0+` to a single interior minimum (the constant
//! solution) and rises afterwards, so closed orbits fill the energy window
//! between the center energy `V(q_center)` and the escape threshold `0`.
//! Everything orbit-related factors through this picture:
//!
//! * turning points by bracketed root finding on `V(q) = E` (no scanning);
//! * the period function `T(E) = 2 * integral dq / sqrt(2 (E - V(q)))`,
//!   de-singularized exactly before quadrature (see [`period_quadrature`]);
//! * an independent period measurement by direct integration (return time);
//! * orbit construction: integrate one period from the lower turning point,
//!   resample uniformly through dense output, and fit a trigonometric
//!   interpolant whose high derivatives come from the motion law itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate_ivp, quad, Bracket};
use crate::numerics::{DEFAULT_ABS_TOL, DEFAULT_REL_TOL};
use crate::periodic::{PeriodicScalar, TrigSeries};

/// Absolute quadrature tolerance used for period integrals (floor; the
/// request is relaxed toward the cancellation noise floor of `E - V` when
/// that is larger, e.g. for orbits very close to the well bottom).
const PERIOD_QUAD_TOL: f64 = 1e-11;

/// Number of uniform samples per stored orbit.
pub const ORBIT_SAMPLES: usize = 256;

/// A conservative one-degree-of-freedom system `q'' = -V'(q)` on `q > 0`
/// with a single potential well.
pub trait OneDofSystem {
    /// Potential `V(q)`.
    fn potential(&self, q: f64) -> f64;
    /// Acceleration `-V'(q)`.
    fn accel(&self, q: f64) -> f64;
    /// `d(accel)/dq`, used for exact third derivatives of orbits.
    fn accel_slope(&self, q: f64) -> f64;
    /// Location of the potential minimum (the constant solution).
    fn center(&self) -> f64;
    /// Angular frequency of small oscillations, `sqrt(V''(center))`.
    fn angular_frequency(&self) -> f64;

    /// Energy of a state.
    fn energy(&self, q: f64, v: f64) -> f64 {
        0.5 * v * v + self.potential(q)
    }

    /// Energy of the constant solution — the bottom of the closed-orbit
    /// window.
    fn center_energy(&self) -> f64 {
        self.potential(self.center())
    }

    /// Period of infinitesimal oscillations about the center.
    fn small_oscillation_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.angular_frequency()
    }

    /// Energy at a relative position inside the closed-orbit window:
    /// `offset = 0` is the well bottom (excluded), `offset = 1` the upper
    /// boundary (excluded). Requires `0 < offset < 1`.
    fn energy_at_offset(&self, offset: f64) -> Result<f64> {
        if !(offset > 0.0 && offset < 1.0) {
            return Err(Error::invalid_parameter(format!(
                "window offset must lie strictly between 0 and 1, got {offset}"
            )));
        }
        Ok(self.center_energy() * (1.0 - offset))
    }
}

/// Default equation-residual bound demanded of solved orbits.
pub const DEFAULT_RESIDUAL_BOUND: f64 = 1e-8;

/// Check that `energy` lies in the open closed-orbit window `(E_center, 0)`.
pub fn require_in_window(sys: &impl OneDofSystem, energy: f64) -> Result<()> {
    let lo = sys.center_energy();
    if !(energy > lo && energy < 0.0) {
        return Err(Error::EnergyOutsideWindow {
            energy,
            lo,
            hi: 0.0,
        });
    }
    Ok(())
}

/// Turning points `(q_min, q_max)` of the orbit at `energy`: the two positive
/// roots of `V(q) = E` straddling the center.
///
/// Brackets are grown geometrically away from the center (the potential
/// tends to 0 from below near the origin and to +infinity on the right, so
/// growth terminates); each root is then pinned by Brent's method.
pub fn turning_points(sys: &impl OneDofSystem, energy: f64) -> Result<(f64, f64)> {
    require_in_window(sys, energy)?;
    let center = sys.center();
    let g = |q: f64| sys.potential(q) - energy;

    // Left bracket: shrink toward 0 until the potential rises above E.
    let mut a = 0.5 * center;
    let mut guard = 0;
    while g(a) <= 0.0 {
        a *= 0.5;
        guard += 1;
        if guard > 1080 {
            return Err(Error::invalid_parameter(
                "failed to bracket the lower turning point".to_string(),
            ));
        }
    }
    let q_min = find_root(g, Bracket::new(a, center)?, 1e-14 * center.max(1.0))?;

    // Right bracket: grow until the potential rises above E.
    let mut b = 2.0 * center;
    guard = 0;
    while g(b) <= 0.0 {
        b *= 2.0;
        guard += 1;
        if guard > 600 {
            return Err(Error::invalid_parameter(
                "failed to bracket the upper turning point".to_string(),
            ));
        }
    }
    let q_max = find_root(g, Bracket::new(center, b)?, 1e-14 * b.max(1.0))?;

    Ok((q_min, q_max))
}

/// Period of the closed orbit at `energy`, by quadrature between the turning
/// points.
///
/// The raw integrand `1/sqrt(2(E - V))` has square-root singularities at both
/// turning points, and worse, `E - V(q)` near them is a catastrophic
/// cancellation — its computed value is pure roundoff in a boundary layer.
/// Both problems are removed analytically. Writing
///
/// ```text
/// E - V(q) = (q - a)(b - q) G(q)
/// ```
///
/// with `G` smooth and positive (the turning points are simple zeros), the
/// substitution `q = a + (b - a) sin^2 s` turns the period into
///
/// ```text
/// T = 2 sqrt(2) * integral_0^{pi/2} G(q(s))^{-1/2} ds,
/// ```
///
/// a regular integral. `G` is evaluated directly where `E - V` is well above
/// its roundoff floor, and by linear interpolation of its exact endpoint
/// values `G(a) = -V'(a)/(b-a)`, `G(b) = V'(b)/(b-a)` (from the motion law)
/// inside the cancellation layer. The requested tolerance is floored by the
/// residual noise the direct region can still carry.
pub fn period_quadrature(sys: &impl OneDofSystem, energy: f64) -> Result<f64> {
    let (a, b) = turning_points(sys, energy)?;
    let width = b - a;
    let g_a = sys.accel(a) / width;
    let g_b = -sys.accel(b) / width;
    if !(g_a > 0.0 && g_b > 0.0 && width > 0.0) {
        return Err(Error::invalid_parameter(format!(
            "turning points ({a}, {b}) are not simple zeros of E - V; cannot de-singularize"
        )));
    }

    // Absolute roundoff floor of the computed E - V(q) along the orbit.
    let eta = 16.0 * f64::EPSILON * (energy.abs() + sys.center_energy().abs());
    // Hand over to the endpoint model while the true E - V is still four
    // orders of magnitude above the floor.
    let switch = 1e4 * eta;

    let integrand = |s: f64| {
        let (sin, cos) = s.sin_cos();
        let p = width * sin * sin; // q - a, exact in the parametrization
        let q = width * cos * cos; // b - q
        let model = (g_a * q + g_b * p) / width;
        let predicted = p * q * model;
        let g = if predicted <= switch {
            model
        } else {
            // Evaluate the potential at the point expressed relative to the
            // nearer endpoint, where it is represented most accurately.
            let x = if p <= q { a + p } else { b - q };
            let direct = energy - sys.potential(x);
            if direct > 0.0 {
                direct / (p * q)
            } else {
                model
            }
        };
        1.0 / g.sqrt()
    };

    // Residual quadrature noise from the direct region next to the handover
    // (relative noise eta / (E - V), integrated); don't request better.
    let stall = eta.sqrt() / (200.0 * width * g_a.min(g_b));
    let tol = PERIOD_QUAD_TOL.max(4.0 * stall);
    let root2 = std::f64::consts::SQRT_2;
    let i = quad(
        integrand,
        0.0,
        std::f64::consts::FRAC_PI_2,
        tol / (2.0 * root2),
    )?;
    Ok(2.0 * root2 * i)
}

/// Period measured by direct integration: start at the lower turning point
/// and time the return to it (second zero of the velocity).
///
/// This route shares no code with [`period_quadrature`] beyond the turning
/// points, which makes it the independent cross-check.
pub fn return_time(sys: &impl OneDofSystem, energy: f64) -> Result<f64> {
    let (q_min, _) = turning_points(sys, energy)?;
    let guess = sys.small_oscillation_period();
    let rhs = |_t: f64, y: &[f64; 2]| [y[1], sys.accel(y[0])];

    // Integrate in chunks until the velocity has crossed zero twice (once at
    // the top of the swing, once back at the bottom).
    let mut horizon = 2.0 * guess;
    for _ in 0..8 {
        let traj = integrate_ivp(rhs, [q_min, 0.0], (0.0, horizon), DEFAULT_REL_TOL, DEFAULT_ABS_TOL)?;
        let times = traj.times();
        let states = traj.states();
        let mut crossings = Vec::new();
        for w in 1..times.len() {
            let (v0, v1) = (states[w - 1][1], states[w][1]);
            // Skip the initial rest point; look for genuine sign changes.
            if times[w - 1] > 1e-12 * guess && v0 != 0.0 && v0.signum() != v1.signum() {
                let t_cross = find_root(
                    |t| traj.eval(t).expect("inside trajectory")[1],
                    Bracket::new(times[w - 1], times[w])?,
                    1e-13 * guess,
                )?;
                crossings.push(t_cross);
                if crossings.len() == 2 {
                    return Ok(crossings[1]);
                }
            }
        }
        horizon *= 2.0;
    }
    Err(Error::invalid_parameter(
        "velocity never returned to zero twice; orbit does not close".to_string(),
    ))
}

/// Which reduced equation an orbit solves, with its parameters.
///
/// Carried by orbit artifacts so a factor read back from disk can rebuild its
/// exact motion law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum OrbitFamily {
    /// Conformal-factor equation on the cylinder of dimension `n`.
    Fowler { n: u32 },
    /// Warp equation with fiber parameter `m`, fiber scalar curvature `r`,
    /// and linear coefficient `c`.
    Derdzinski {
        m: u32,
        #[serde(rename = "R")]
        r: f64,
        #[serde(rename = "C")]
        c: f64,
    },
}

/// A certified periodic orbit of one of the reduced equations.
///
/// Guarantees established at construction: positivity of all samples, energy
/// flatness along the samples, and a small equation residual measured through
/// the interpolant's own second derivative.
#[derive(Clone, Debug)]
pub struct PeriodicOrbit {
    family: OrbitFamily,
    energy: f64,
    period: f64,
    q_min: f64,
    q_max: f64,
    t_samples: Vec<f64>,
    q_samples: Vec<f64>,
    v_samples: Vec<f64>,
    /// Raw interpolant (honest second derivative for residual probes).
    series: TrigSeries,
    /// Motion-law-backed factor handed to the geometry layers.
    factor: PeriodicScalar,
    residual_max: f64,
    energy_spread: f64,
}

impl PeriodicOrbit {
    /// Family and parameters.
    pub fn family(&self) -> OrbitFamily {
        self.family
    }

    /// Orbit energy.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Measured period (return time of the integration).
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Minimum of the orbit (phase convention: attained at t = 0).
    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    /// Maximum of the orbit.
    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    /// Uniform sample times over one period.
    pub fn t_samples(&self) -> &[f64] {
        &self.t_samples
    }

    /// Orbit values at the sample times.
    pub fn q_samples(&self) -> &[f64] {
        &self.q_samples
    }

    /// Orbit derivatives at the sample times.
    pub fn v_samples(&self) -> &[f64] {
        &self.v_samples
    }

    /// The orbit as a positive periodic factor with exact high derivatives.
    pub fn factor(&self) -> &PeriodicScalar {
        &self.factor
    }

    /// The raw trigonometric interpolant, whose second derivative is honest
    /// (differentiated from the samples, not rebuilt from the motion law).
    /// This is what the residual certificate was measured with.
    pub fn series(&self) -> &TrigSeries {
        &self.series
    }

    /// Largest equation residual of the interpolant (measured off-node with
    /// the series' own second derivative).
    pub fn residual_max(&self) -> f64 {
        self.residual_max
    }

    /// Peak-to-peak spread of the sample energies around the target.
    pub fn energy_spread(&self) -> f64 {
        self.energy_spread
    }

    /// Ratio `q_max / q_min` — a scale-free nonconstancy measure.
    pub fn amplitude_ratio(&self) -> f64 {
        self.q_max / self.q_min
    }

    /// Standard deviation of the sample energies.
    pub fn energy_stddev(&self, sys: &impl OneDofSystem) -> f64 {
        let energies: Vec<f64> = self
            .q_samples
            .iter()
            .zip(&self.v_samples)
            .map(|(&q, &v)| sys.energy(q, v))
            .collect();
        let mean = energies.iter().sum::<f64>() / energies.len() as f64;
        (energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / energies.len() as f64).sqrt()
    }
}

/// Solve for the closed orbit at `energy` and package it with its
/// certificates.
///
/// `family` must describe `sys` itself — it is stored on the orbit and used
/// to rebuild the motion law for the factor's high derivatives.
/// `residual_bound` is the acceptance gate on the interpolant's equation
/// residual; construction fails loudly if the orbit cannot meet it.
pub fn solve_orbit(
    sys: &impl OneDofSystem,
    family: OrbitFamily,
    energy: f64,
    residual_bound: f64,
) -> Result<PeriodicOrbit> {
    let (q_min, q_max) = turning_points(sys, energy)?;
    let t_quad = period_quadrature(sys, energy)?;

    // Integrate a little past one quadrature period, then pin the measured
    // period as the zero of the velocity near t_quad (between the maximum at
    // T/2 and the end of the swing the velocity crosses zero only at T).
    let rhs = |_t: f64, y: &[f64; 2]| [y[1], sys.accel(y[0])];
    let traj = integrate_ivp(
        rhs,
        [q_min, 0.0],
        (0.0, 1.15 * t_quad),
        DEFAULT_REL_TOL,
        DEFAULT_ABS_TOL,
    )?;
    let v_at = |t: f64| traj.eval(t).expect("inside trajectory")[1];
    let period = find_root(
        v_at,
        Bracket::new(0.85 * t_quad, 1.1 * t_quad)?,
        1e-13 * t_quad,
    )?;

    // The two period routes must agree; a disagreement means the quadrature
    // or the integration is untrustworthy, so fail rather than pick one.
    if (period - t_quad).abs() > 1e-8 * t_quad.max(1.0) {
        return Err(Error::OrbitValidation(format!(
            "period routes disagree: quadrature {t_quad:.12e} vs return time {period:.12e}"
        )));
    }

    let mut t_samples = Vec::with_capacity(ORBIT_SAMPLES);
    let mut q_samples = Vec::with_capacity(ORBIT_SAMPLES);
    let mut v_samples = Vec::with_capacity(ORBIT_SAMPLES);
    for j in 0..ORBIT_SAMPLES {
        let t = j as f64 * period / ORBIT_SAMPLES as f64;
        let y = traj.eval(t).expect("inside trajectory");
        t_samples.push(t);
        q_samples.push(y[0]);
        v_samples.push(y[1]);
    }

    for (&t, &q) in t_samples.iter().zip(&q_samples) {
        if !(q > 0.0) {
            return Err(Error::NonPositiveFactor { t, value: q });
        }
    }

    // Energy flatness across the samples.
    let mut e_min = f64::INFINITY;
    let mut e_max = f64::NEG_INFINITY;
    for (&q, &v) in q_samples.iter().zip(&v_samples) {
        let e = sys.energy(q, v);
        e_min = e_min.min(e);
        e_max = e_max.max(e);
    }
    let energy_spread = (e_max - energy).abs().max((e_min - energy).abs());
    if energy_spread > 1e-9 * energy.abs().max(1.0) {
        return Err(Error::OrbitValidation(format!(
            "energy drifted by {energy_spread:e} along the orbit"
        )));
    }

    let series = TrigSeries::fit(period, &q_samples)?;

    // Equation residual of the interpolant, probed between the fit nodes
    // where interpolation error actually shows.
    let mut residual_max: f64 = 0.0;
    for j in 0..ORBIT_SAMPLES {
        let t = (j as f64 + 0.5) * period / ORBIT_SAMPLES as f64;
        let q = series.eval_deriv(t, 0);
        let qdd = series.eval_deriv(t, 2);
        residual_max = residual_max.max((qdd - sys.accel(q)).abs());
    }
    if residual_max > residual_bound {
        return Err(Error::OrbitValidation(format!(
            "interpolant residual {residual_max:e} exceeds the bound {residual_bound:e}"
        )));
    }

    // Motion-law-backed factor for the geometry layers. The closures capture
    // copies of the parameters through the family tag, not the system borrow.
    let factor = build_factor(family, period, &q_samples)?;

    Ok(PeriodicOrbit {
        family,
        energy,
        period,
        q_min,
        q_max,
        t_samples,
        q_samples,
        v_samples,
        series,
        factor,
        residual_max,
        energy_spread,
    })
}

/// Rebuild the motion-law-backed periodic factor for a given family from
/// uniform samples. Shared by the solver and the orbit-file reader.
pub fn build_factor(family: OrbitFamily, period: f64, samples: &[f64]) -> Result<PeriodicScalar> {
    match family {
        OrbitFamily::Fowler { n } => {
            let sys = crate::fowler::FowlerSystem::new(n)?;
            PeriodicScalar::from_ode_samples(
                period,
                samples,
                move |q| sys.accel(q),
                move |q| sys.accel_slope(q),
            )
        }
        OrbitFamily::Derdzinski { m, r, c } => {
            let sys = crate::derdzinski::DerdzinskiSystem::new(m, r, c)?;
            PeriodicScalar::from_ode_samples(
                period,
                samples,
                move |q| sys.accel(q),
                move |q| sys.accel_slope(q),
            )
        }
    }
}
