//! Change of variables between warped products `dt^2 + f^2(t) dxi^2` and
//! conformally-cylindrical metrics `phi^2(theta)(dtheta^2 + dxi^2)`, and the
//! transport of reduced warped-product orbits into the conformal family.
//!
//! The mechanism is an arclength reparametrization: with
//! `theta(t) = integral of ds/f(s)` the warped metric becomes
//! `f^2 (dtheta^2 + dxi^2)`, so `phi(theta) = f(t(theta))` and the induced
//! conformal-cylinder factor is `w_c = phi^((n-2)/2)` on a circle of length
//! `L = theta(T)`.
//!
//! The reduced warp exponent `h^(2/m)` is ambiguous about what `m` counts —
//! the fiber's own dimension or the total dimension. Both readings are
//! implemented as [`Convention`] values and certified per orbit by
//! [`verify_identification`], never assumed: one of them must make the
//! transported metric's scalar curvature constant and its factor satisfy the
//! cylinder equation after a homothety.

use serde::{Deserialize, Serialize};

use crate::conformal::{
    harmonicity_certificate, ConformalCylinderMetric, GridSpec, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::fowler::FowlerSystem;
use crate::oracle;
use crate::orbit::{OrbitFamily, PeriodicOrbit};
use crate::periodic::{PeriodicScalar, TrigSeries};

/// Node count of the reparametrization tables (forward and inverse).
const MAP_NODES: usize = 1024;

/// Uniform samples used to fit the trigonometric representation of `1/f`.
const SPEED_SAMPLES: usize = 512;

/// Node-wise pullback agreement `phi(theta(t)) = f(t)` required of every
/// constructed equivalence (relative to the warp's size).
const PULLBACK_TOL: f64 = 1e-10;

/// Round-trip accuracy `theta -> t -> theta` required of the inverse table.
const ROUND_TRIP_TOL: f64 = 1e-10;

/// Scalar-curvature constancy gate for the identification (grid stddev of
/// the finite-difference scalar curvature).
pub const SCALAR_CONSTANCY_THRESHOLD: f64 = 1e-6;

/// Residual gate for the cylinder equation, both with the measured scalar
/// curvature and after the normalizing homothety.
pub const RESIDUAL_THRESHOLD: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Warped metrics and the arclength map
// ---------------------------------------------------------------------------

/// A warped product `dt^2 + f^2(t) dxi^2` on the product of a circle of
/// length `f.period()` with the **unit** round sphere of dimension
/// `fiber_dim`. Einstein fibers of other radii are absorbed into `f`.
#[derive(Debug, Clone)]
pub struct WarpedMetric {
    f: PeriodicScalar,
    fiber_dim: u32,
}

impl WarpedMetric {
    /// Wrap a positive periodic warp over a unit sphere of dimension
    /// `fiber_dim >= 2`.
    pub fn new(f: PeriodicScalar, fiber_dim: u32) -> Result<Self> {
        if fiber_dim < 2 {
            return Err(Error::invalid_parameter(format!(
                "warped fiber dimension must be at least 2, got {fiber_dim}"
            )));
        }
        Ok(WarpedMetric { f, fiber_dim })
    }

    /// The warp function.
    pub fn warp(&self) -> &PeriodicScalar {
        &self.f
    }

    /// Circle length `T`.
    pub fn period(&self) -> f64 {
        self.f.period()
    }

    /// Fiber sphere dimension.
    pub fn fiber_dim(&self) -> u32 {
        self.fiber_dim
    }

    /// Total dimension `fiber_dim + 1`.
    pub fn total_dim(&self) -> u32 {
        self.fiber_dim + 1
    }

    /// Diagonal metric components at a chart point `(t, th_1, ..)`:
    /// `(1, f^2, f^2 sin^2 th_1, ...)`.
    pub fn diagonal(&self, p: &[f64]) -> Result<Vec<f64>> {
        let dim = self.total_dim() as usize;
        if p.len() != dim {
            return Err(Error::invalid_parameter(format!(
                "chart point has {} coordinates, warped metric needs {dim}",
                p.len()
            )));
        }
        let f = self.f.value(p[0]);
        if !(f > 0.0) {
            return Err(Error::NonPositiveFactor {
                t: p[0],
                value: f,
            });
        }
        let mut diag = Vec::with_capacity(dim);
        diag.push(1.0);
        let mut sigma = f * f;
        for k in 1..dim {
            diag.push(sigma);
            let s = p[k].sin();
            sigma *= s * s;
        }
        Ok(diag)
    }
}

/// The arclength reparametrization `theta(t) = integral of ds/f(s)`: a
/// strictly increasing map from the `t`-circle of length `T` onto the
/// `theta`-circle of length `L = theta(T)`, with a high-accuracy inverse.
///
/// The forward map integrates the trigonometric representation of `1/f`
/// term-wise (spectrally accurate); the inverse predicts with cubic Hermite
/// pieces over Newton-refined nodes, then polishes every evaluation with two
/// Newton steps against the forward map. The polish matters: downstream
/// finite-difference stencils divide interpolation error by their step
/// squared, so the inverse must be smooth to machine accuracy, not merely
/// accurate in value.
#[derive(Debug, Clone)]
pub struct ReparametrizationMap {
    period: f64,
    length: f64,
    /// The warp `f` (the inverse map's analytic slope).
    warp: PeriodicScalar,
    /// Trigonometric representation of `1/f`.
    speed: TrigSeries,
    /// `t` at the uniform `theta` nodes `k L / MAP_NODES`.
    inv_t: Vec<f64>,
    /// `dt/dtheta = f(t)` at those nodes.
    inv_slope: Vec<f64>,
    /// Forward table `(t_j, theta_j)` at uniform `t` nodes.
    forward: Vec<(f64, f64)>,
}

impl ReparametrizationMap {
    fn build(f: &PeriodicScalar) -> Result<Self> {
        let period = f.period();
        let mut samples = Vec::with_capacity(SPEED_SAMPLES);
        for j in 0..SPEED_SAMPLES {
            let t = j as f64 * period / SPEED_SAMPLES as f64;
            let v = f.value(t);
            if !(v > 0.0) {
                return Err(Error::NonPositiveFactor { t, value: v });
            }
            samples.push(1.0 / v);
        }
        let speed = TrigSeries::fit(period, &samples)?;
        let length = speed.integral(period);
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid_parameter(format!(
                "arclength reparametrization produced a nonpositive length {length}"
            )));
        }

        let forward: Vec<(f64, f64)> = (0..=MAP_NODES)
            .map(|j| {
                let t = j as f64 * period / MAP_NODES as f64;
                (t, speed.integral(t))
            })
            .collect();
        if forward.windows(2).any(|w| !(w[1].1 > w[0].1)) {
            return Err(Error::invalid_parameter(
                "arclength map is not strictly increasing".to_string(),
            ));
        }

        // Invert on a uniform theta grid: bracket through the forward table,
        // then Newton with the analytic derivative dtheta/dt = 1/f.
        let mut inv_t = Vec::with_capacity(MAP_NODES + 1);
        let mut inv_slope = Vec::with_capacity(MAP_NODES + 1);
        for k in 0..=MAP_NODES {
            let target = k as f64 * length / MAP_NODES as f64;
            let t = if k == 0 {
                0.0
            } else if k == MAP_NODES {
                period
            } else {
                let j = forward.partition_point(|&(_, th)| th <= target) - 1;
                let (t0, th0) = forward[j];
                let (t1, th1) = forward[j + 1];
                let mut t = t0 + (target - th0) / (th1 - th0) * (t1 - t0);
                for _ in 0..6 {
                    t -= (speed.integral(t) - target) * f.value(t);
                }
                if (speed.integral(t) - target).abs() > 1e-12 * length.max(1.0) {
                    return Err(Error::invalid_parameter(
                        "arclength inversion did not converge".to_string(),
                    ));
                }
                t
            };
            inv_t.push(t);
            inv_slope.push(f.value(t));
        }

        Ok(ReparametrizationMap {
            period,
            length,
            warp: f.clone(),
            speed,
            inv_t,
            inv_slope,
            forward,
        })
    }

    /// Source circle length `T`.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Target circle length `L = theta(T)`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// The forward node table `(t_j, theta_j)`.
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.forward
    }

    /// Forward map `theta(t)`, extended to all of `R` by
    /// `theta(t + T) = theta(t) + L`.
    pub fn theta_of_t(&self, t: f64) -> f64 {
        let wraps = t.div_euclid(self.period);
        let frac = t.rem_euclid(self.period);
        wraps * self.length + self.speed.integral(frac)
    }

    /// Inverse map `t(theta)`, extended by `t(theta + L) = t(theta) + T`.
    pub fn t_of_theta(&self, theta: f64) -> f64 {
        let wraps = theta.div_euclid(self.length);
        let w = theta.rem_euclid(self.length);
        let h = self.length / MAP_NODES as f64;
        let cell = ((w / h) as usize).min(MAP_NODES - 1);
        let s = (w - cell as f64 * h) / h;
        let (t0, t1) = (self.inv_t[cell], self.inv_t[cell + 1]);
        let (m0, m1) = (self.inv_slope[cell] * h, self.inv_slope[cell + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let mut t = (2.0 * s3 - 3.0 * s2 + 1.0) * t0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * t1
            + (s3 - s2) * m1;
        // Polish the Hermite prediction to machine accuracy; dt/dtheta = f.
        for _ in 0..2 {
            t -= (self.speed.integral(t) - w) * self.warp.value(t);
        }
        wraps * self.period + t
    }

    /// Maximum of `|theta(t(theta)) - theta|` over a dense sweep of the
    /// target circle.
    pub fn round_trip_error(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let theta = (k as f64 + 0.37) * self.length / samples as f64;
                (self.theta_of_t(self.t_of_theta(theta)) - theta).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Compute the arclength reparametrization of a warped metric: the new
/// circle length `L = integral of dt/f over the circle` and the monotone
/// map table. The round trip `theta -> t -> theta` is certified to
/// `1e-10` before returning.
pub fn arclength_reparametrize(w: &WarpedMetric) -> Result<(f64, ReparametrizationMap)> {
    let map = ReparametrizationMap::build(w.warp())?;
    let rt = map.round_trip_error(257);
    if rt > ROUND_TRIP_TOL {
        return Err(Error::invalid_parameter(format!(
            "arclength round trip error {rt:e} exceeds {ROUND_TRIP_TOL:e}"
        )));
    }
    Ok((map.length(), map))
}

// ---------------------------------------------------------------------------
// The conformal equivalence
// ---------------------------------------------------------------------------

/// Which dimension the reduced warp exponent's `m` counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `m` is the fiber's own dimension: fiber `S^m`, total dimension
    /// `n = m + 1`.
    FiberDim,
    /// `m` is the total dimension: fiber `S^(m-1)`, total dimension `n = m`.
    TotalDim,
}

impl Convention {
    /// Both readings, for callers that certify each in turn.
    pub fn all() -> [Convention; 2] {
        [Convention::FiberDim, Convention::TotalDim]
    }

    /// Kebab-case label matching the serialized form.
    pub fn label(&self) -> &'static str {
        match self {
            Convention::FiberDim => "fiber-dim",
            Convention::TotalDim => "total-dim",
        }
    }
}

/// Parameters of the reduced warped-product orbit an equivalence was
/// transported from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportOrigin {
    /// The convention used to read the warp exponent.
    pub convention: Convention,
    /// The orbit's `m` parameter.
    pub m: u32,
    /// Scalar curvature of the Einstein fiber before unit-sphere rescaling.
    pub fiber_scalar: f64,
    /// The orbit's stiffness constant.
    pub stiffness: f64,
    /// Radius giving the fiber sphere the required scalar curvature.
    pub fiber_radius: f64,
}

/// A certified identity `dt^2 + f^2(t) dxi^2 = phi^2(theta)(dtheta^2 +
/// dxi^2)`: the arclength map, the conformal profile `phi(theta) =
/// f(t(theta))`, and the induced conformal-cylinder factor
/// `w_c = phi^((n-2)/2)` with `n = fiber_dim + 1`.
#[derive(Debug, Clone)]
pub struct ConformalEquivalence {
    map: ReparametrizationMap,
    phi: PeriodicScalar,
    w_c: PeriodicScalar,
    fiber_dim: u32,
    origin: Option<TransportOrigin>,
}

impl ConformalEquivalence {
    /// Target circle length `L`.
    pub fn length(&self) -> f64 {
        self.map.length()
    }

    /// The arclength map.
    pub fn map(&self) -> &ReparametrizationMap {
        &self.map
    }

    /// Forward map `theta(t)`.
    pub fn theta_of_t(&self, t: f64) -> f64 {
        self.map.theta_of_t(t)
    }

    /// Inverse map `t(theta)`.
    pub fn t_of_theta(&self, theta: f64) -> f64 {
        self.map.t_of_theta(theta)
    }

    /// Conformal profile `phi(theta)`, periodic with period `L`.
    pub fn phi(&self) -> &PeriodicScalar {
        &self.phi
    }

    /// Induced conformal-cylinder factor `w_c = phi^((n-2)/2)`.
    pub fn w_c(&self) -> &PeriodicScalar {
        &self.w_c
    }

    /// Fiber sphere dimension.
    pub fn fiber_dim(&self) -> u32 {
        self.fiber_dim
    }

    /// Total dimension `n = fiber_dim + 1`.
    pub fn n(&self) -> u32 {
        self.fiber_dim + 1
    }

    /// The transported orbit's parameters, when the equivalence came from
    /// [`derdzinski_to_pseudocylindric`].
    pub fn origin(&self) -> Option<&TransportOrigin> {
        self.origin.as_ref()
    }
}

/// Transform a warped metric into conformal-to-cylinder form. The profile
/// `phi` carries analytic derivatives (chain rule through the arclength
/// map, whose derivative `dt/dtheta = f` is known exactly), and the
/// construction is self-checked: `phi(theta(t))` must reproduce `f(t)` at
/// every forward node within `1e-10`.
pub fn warped_to_conformal(w: &WarpedMetric) -> Result<ConformalEquivalence> {
    let (length, map) = arclength_reparametrize(w)?;
    let f = w.warp().clone();

    // d/dtheta = f * d/dt along the map, so with f_k = d^k f/dt^k:
    //   phi   = f,
    //   phi'  = f f1,
    //   phi'' = f (f1^2 + f f2),
    //   phi''' = f (f1^3 + 4 f f1 f2 + f^2 f3).
    let (m0, m1, m2, m3) = (map.clone(), map.clone(), map.clone(), map.clone());
    let (f0, f1, f2, f3) = (f.clone(), f.clone(), f.clone(), f.clone());
    let phi = PeriodicScalar::from_rule(
        length,
        move |theta| f0.value(m0.t_of_theta(theta)),
        move |theta| {
            let t = m1.t_of_theta(theta);
            f1.value(t) * f1.d1(t)
        },
        move |theta| {
            let t = m2.t_of_theta(theta);
            let (v, d1, d2) = (f2.value(t), f2.d1(t), f2.d2(t));
            v * (d1 * d1 + v * d2)
        },
        move |theta| {
            let t = m3.t_of_theta(theta);
            let (v, d1, d2, d3) = (f3.value(t), f3.d1(t), f3.d2(t), f3.d3(t));
            v * (d1 * d1 * d1 + 4.0 * v * d1 * d2 + v * v * d3)
        },
    )?;

    let scale = w.warp().max_value().max(1.0);
    for &(t, theta) in map.nodes() {
        let gap = (phi.value(theta) - w.warp().value(t)).abs();
        if gap > PULLBACK_TOL * scale {
            return Err(Error::invalid_parameter(format!(
                "profile pullback self-check failed at t = {t}: gap {gap:e}"
            )));
        }
    }

    let n = w.total_dim();
    let w_c = phi.powered((f64::from(n) - 2.0) / 2.0)?;
    Ok(ConformalEquivalence {
        map,
        phi,
        w_c,
        fiber_dim: w.fiber_dim(),
        origin: None,
    })
}

/// Maximum relative disagreement between the warped metric's components and
/// the pulled-back conformal metric's components over `samples` circle
/// points (at a fixed generic sphere position).
pub fn pullback_certificate(
    eq: &ConformalEquivalence,
    w: &WarpedMetric,
    samples: usize,
) -> Result<f64> {
    if eq.fiber_dim() != w.fiber_dim() {
        return Err(Error::invalid_parameter(
            "equivalence and warped metric have different fiber dimensions".to_string(),
        ));
    }
    let dim = w.total_dim() as usize;
    let mut p = vec![std::f64::consts::FRAC_PI_2; dim];
    p[1] = 1.1;
    p[dim - 1] = 1.0;

    let mut worst = 0.0f64;
    for i in 0..samples {
        let t = (i as f64 + 0.41) * w.period() / samples as f64;
        p[0] = t;
        let warped = w.diagonal(&p)?;

        let theta = eq.theta_of_t(t);
        let phi = eq.phi().value(theta);
        let f = w.warp().value(t);
        // Pull dtheta^2 back through theta(t): dtheta = dt / f.
        let mut pulled = Vec::with_capacity(dim);
        pulled.push(phi * phi / (f * f));
        let mut sigma = phi * phi;
        for k in 1..dim {
            pulled.push(sigma);
            let s = p[k].sin();
            sigma *= s * s;
        }

        for (a, b) in warped.iter().zip(&pulled) {
            worst = worst.max((a - b).abs() / a.abs().max(1e-300));
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Transport of reduced orbits
// ---------------------------------------------------------------------------

/// Realize a warped-product orbit `h` as a concrete warped metric over a
/// round-sphere fiber, under the chosen reading of the warp exponent.
///
/// The warp over a **unit** fiber sphere is `f = r h^(2/m)`, where `r` is
/// the radius at which a round sphere of the convention's fiber dimension
/// `d` attains the orbit's fiber scalar curvature `R`, i.e.
/// `r^2 = d(d-1)/R`.
pub fn transport_warp(orbit: &PeriodicOrbit, convention: Convention) -> Result<WarpedMetric> {
    let OrbitFamily::Derdzinski { m, r: fiber_scalar, .. } = orbit.family() else {
        return Err(Error::invalid_parameter(format!(
            "orbit transport needs a warped-product orbit, got {:?}",
            orbit.family()
        )));
    };
    let mf = f64::from(m);
    let fiber_dim = match convention {
        Convention::FiberDim => m,
        Convention::TotalDim => m - 1,
    };
    let d = f64::from(fiber_dim);
    let rad2 = d * (d - 1.0) / fiber_scalar;
    if !(rad2 > 0.0) {
        return Err(Error::invalid_parameter(format!(
            "fiber radius is undefined for fiber dimension {fiber_dim} at scalar {fiber_scalar}"
        )));
    }
    let f = orbit.factor().powered(2.0 / mf)?.scaled(rad2.sqrt())?;
    WarpedMetric::new(f, fiber_dim)
}

/// Transport a warped-product orbit `h` into the conformal-cylinder family
/// under the chosen reading of the warp exponent (see [`transport_warp`]).
/// Which convention actually lands in the conformal-cylinder family is
/// decided by [`verify_identification`], not here.
pub fn derdzinski_to_pseudocylindric(
    orbit: &PeriodicOrbit,
    convention: Convention,
) -> Result<ConformalEquivalence> {
    let OrbitFamily::Derdzinski {
        m,
        r: fiber_scalar,
        c: stiffness,
    } = orbit.family()
    else {
        return Err(Error::invalid_parameter(format!(
            "orbit transport needs a warped-product orbit, got {:?}",
            orbit.family()
        )));
    };
    let warped = transport_warp(orbit, convention)?;
    let d = f64::from(warped.fiber_dim());
    let fiber_radius = (d * (d - 1.0) / fiber_scalar).sqrt();
    let mut eq = warped_to_conformal(&warped)?;
    eq.origin = Some(TransportOrigin {
        convention,
        m,
        fiber_scalar,
        stiffness,
        fiber_radius,
    });
    Ok(eq)
}

// ---------------------------------------------------------------------------
// Identification report
// ---------------------------------------------------------------------------

/// Outcome of certifying that a transported metric lands in the
/// conformal-cylinder family: measured scalar curvature, cylinder-equation
/// residuals before and after the normalizing homothety, and the curvature
/// certificates of the normalized metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationReport {
    /// Report format version.
    pub schema_version: String,
    /// Convention the equivalence was transported under (absent for
    /// hand-built warps).
    pub convention: Option<Convention>,
    /// The source orbit's `m` parameter (absent for hand-built warps).
    pub m: Option<u32>,
    /// Total dimension of the conformal metric.
    pub n: u32,
    /// Target circle length.
    #[serde(rename = "L")]
    pub length: f64,
    /// Grid mean of the finite-difference scalar curvature of
    /// `w_c^(4/(n-2)) (dtheta^2 + dxi^2)`.
    #[serde(rename = "R_bar_mean")]
    pub r_bar_mean: f64,
    /// Grid standard deviation of the same.
    #[serde(rename = "R_bar_stddev")]
    pub r_bar_stddev: f64,
    /// Max residual of the cylinder equation driven by the measured mean
    /// scalar curvature:
    /// `w'' - ((n-2)^2/4) w + (R_mean (n-2)/(4(n-1))) w^((n+2)/(n-2))`.
    pub generalized_residual_max: f64,
    /// Max residual of the standard cylinder equation after the homothety
    /// normalizing the scalar curvature to `n(n-1)`; absent when the
    /// measured scalar curvature is not positive (no such homothety exists).
    pub fowler_residual_max: Option<f64>,
    /// Codazzi residual maximum of the normalized metric; absent as above.
    pub codazzi_max: Option<f64>,
    /// Ricci-derivative norm maximum of the normalized metric; absent as
    /// above.
    pub dric_max: Option<f64>,
    /// `r_bar_stddev <= 1e-6`.
    pub scalar_constant_pass: bool,
    /// `fowler_residual_max <= 1e-6` (false when absent).
    pub fowler_pass: bool,
    /// Codazzi maximum within the harmonic-curvature gate (false when
    /// absent).
    pub harmonic_pass: bool,
    /// Ricci-derivative norm above the non-parallelism gate (false when
    /// absent).
    pub nonparallel_pass: bool,
    /// All four checks passed: the metric lies in the conformal-cylinder
    /// family with constant scalar curvature, harmonic curvature, and
    /// non-parallel Ricci tensor.
    pub identified: bool,
}

/// Certify the identification on the default grid. See
/// [`verify_identification_on_grid`].
pub fn verify_identification(eq: &ConformalEquivalence, n: u32) -> Result<IdentificationReport> {
    verify_identification_on_grid(eq, n, &GridSpec::default())
}

/// Certify that the equivalence's induced factor `w_c` places the metric in
/// the conformal-cylinder family, in four steps:
///
/// 1. assemble `w_c^(4/(n-2)) (dtheta^2 + dxi^2)` and measure its scalar
///    curvature through the finite-difference route over the grid — it must
///    be constant (stddev within [`SCALAR_CONSTANCY_THRESHOLD`]);
/// 2. check the cylinder equation on `w_c` with the measured mean scalar
///    curvature in place of `n(n-1)`;
/// 3. apply the homothety normalizing the scalar curvature to `n(n-1)`
///    (factors scale by `lambda^((n-2)/2)` with `lambda^2 = R_mean/(n(n-1))`)
///    and check the standard cylinder equation;
/// 4. run the harmonicity and non-parallelism certificates on the
///    normalized metric.
///
/// Every measured number is reported; failing a step flips a flag, it does
/// not error. When the measured mean scalar curvature is not strictly
/// positive, no normalizing homothety exists: steps 3 and 4 are skipped,
/// their fields reported absent, and their flags failed.
pub fn verify_identification_on_grid(
    eq: &ConformalEquivalence,
    n: u32,
    grid: &GridSpec,
) -> Result<IdentificationReport> {
    if n != eq.n() {
        return Err(Error::invalid_parameter(format!(
            "equivalence has total dimension {}, asked to verify {n}",
            eq.n()
        )));
    }

    // Step 1: finite-difference scalar curvature over the grid.
    let metric = ConformalCylinderMetric::new(n, eq.w_c().clone())?;
    let field = metric.metric_field()?;
    let mut scalars = Vec::new();
    for &t in &grid.times(metric.period()) {
        for &theta in &grid.polar_values() {
            let p = grid.chart_point(n, t, theta);
            scalars.push(oracle::scalar_curvature(&field, &p)?);
        }
    }
    let len = scalars.len() as f64;
    let mean = scalars.iter().sum::<f64>() / len;
    let stddev = (scalars.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / len).sqrt();

    // Step 2: cylinder equation with the measured scalar curvature.
    let nf = f64::from(n);
    let times = grid.times(eq.length());
    let w_c = eq.w_c();
    let p_exp = (nf + 2.0) / (nf - 2.0);
    let generalized_residual_max = times
        .iter()
        .map(|&th| {
            let w = w_c.value(th);
            (w_c.d2(th) - (nf - 2.0) * (nf - 2.0) / 4.0 * w
                + mean * (nf - 2.0) / (4.0 * (nf - 1.0)) * w.powf(p_exp))
            .abs()
        })
        .fold(0.0, f64::max);

    // Steps 3 and 4 need the homothety normalizing the scalar curvature to
    // n(n-1); it only exists when the measured curvature is positive.
    let normalized_checks = if mean > 0.0 {
        // Step 3: normalize the scalar curvature and re-check against the
        // standard equation.
        let sys = FowlerSystem::new(n)?;
        let lambda_sq = mean / (nf * (nf - 1.0));
        let normalized = w_c.scaled(lambda_sq.powf((nf - 2.0) / 4.0))?;
        let fowler_residual_max = times
            .iter()
            .map(|&th| sys.residual(normalized.value(th), normalized.d2(th)).abs())
            .fold(0.0, f64::max);

        // Step 4: curvature certificates on the normalized metric.
        let transported = ConformalCylinderMetric::new(n, normalized)?;
        let report = harmonicity_certificate(&transported, grid)?;
        Some((fowler_residual_max, report))
    } else {
        None
    };

    let scalar_constant_pass = stddev <= SCALAR_CONSTANCY_THRESHOLD;
    let fowler_residual_max = normalized_checks.as_ref().map(|(res, _)| *res);
    let fowler_pass = fowler_residual_max.is_some_and(|res| res <= RESIDUAL_THRESHOLD);
    let harmonic_pass = normalized_checks
        .as_ref()
        .is_some_and(|(_, report)| report.harmonic);
    let nonparallel_pass = normalized_checks
        .as_ref()
        .is_some_and(|(_, report)| report.nonparallel);
    Ok(IdentificationReport {
        schema_version: SCHEMA_VERSION.to_string(),
        convention: eq.origin().map(|o| o.convention),
        m: eq.origin().map(|o| o.m),
        n,
        length: eq.length(),
        r_bar_mean: mean,
        r_bar_stddev: stddev,
        generalized_residual_max,
        fowler_residual_max,
        codazzi_max: normalized_checks
            .as_ref()
            .map(|(_, report)| report.codazzi_max.value),
        dric_max: normalized_checks
            .as_ref()
            .map(|(_, report)| report.dricci_norm_max.value),
        scalar_constant_pass,
        fowler_pass,
        harmonic_pass,
        nonparallel_pass,
        identified: scalar_constant_pass && fowler_pass && harmonic_pass && nonparallel_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derdzinski::DerdzinskiSystem;
    use crate::orbit::OneDofSystem;

    fn mid_window_orbit() -> PeriodicOrbit {
        let sys = DerdzinskiSystem::new(3, 6.0, 2.0).unwrap();
        sys.solve_at_energy(sys.energy_at_offset(0.5).unwrap()).unwrap()
    }

    fn small_grid() -> GridSpec {
        GridSpec {
            time_points: 8,
            angular_points: 3,
            band_margin: 0.4,
        }
    }

    #[test]
    fn fiber_dimension_below_two_is_rejected() {
        let f = PeriodicScalar::constant(5.0, 1.0).unwrap();
        assert!(WarpedMetric::new(f, 1).is_err());
    }

    #[test]
    fn unit_warp_reparametrizes_to_the_identity() {
        let w = WarpedMetric::new(PeriodicScalar::constant(5.0, 1.0).unwrap(), 2).unwrap();
        let (length, map) = arclength_reparametrize(&w).unwrap();
        assert!((length - 5.0).abs() < 1e-12);
        for k in 0..10 {
            let t = 0.5 * k as f64;
            assert!((map.theta_of_t(t) - t).abs() < 1e-12);
            assert!((map.t_of_theta(t) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_warp_rescales_the_length() {
        let w = WarpedMetric::new(PeriodicScalar::constant(4.0, 2.5).unwrap(), 3).unwrap();
        let (length, _) = arclength_reparametrize(&w).unwrap();
        assert!((length - 4.0 / 2.5).abs() < 1e-12);
    }

    #[test]
    fn sine_warp_round_trip_is_tight() {
        let f = PeriodicScalar::offset_sine(6.0, 1.0, 0.2).unwrap();
        let w = WarpedMetric::new(f, 3).unwrap();
        let (length, map) = arclength_reparametrize(&w).unwrap();
        // L = integral of dt/(1 + 0.2 sin(2 pi t/6)) = 6/sqrt(1 - 0.04).
        let expected = 6.0 / (1.0f64 - 0.04).sqrt();
        assert!((length - expected).abs() < 1e-11, "{length} vs {expected}");
        assert!(map.round_trip_error(513) <= 1e-10);
        // The map must be strictly increasing across nodes.
        assert!(map.nodes().windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn orbit_warp_round_trip_is_tight() {
        let orbit = mid_window_orbit();
        let f = orbit.factor().powered(2.0 / 3.0).unwrap();
        let w = WarpedMetric::new(f, 2).unwrap();
        let (length, map) = arclength_reparametrize(&w).unwrap();
        assert!(length.is_finite() && length > 0.0);
        assert!(map.round_trip_error(513) <= 1e-10);
    }

    #[test]
    fn unit_warp_gives_unit_profile() {
        let w = WarpedMetric::new(PeriodicScalar::constant(5.0, 1.0).unwrap(), 2).unwrap();
        let eq = warped_to_conformal(&w).unwrap();
        for k in 0..10 {
            let theta = 0.48 * k as f64;
            assert!((eq.phi().value(theta) - 1.0).abs() < 1e-12);
            assert!((eq.w_c().value(theta) - 1.0).abs() < 1e-12);
        }
        assert_eq!(eq.n(), 3);
    }

    #[test]
    fn sine_warp_pullback_is_certified() {
        let f = PeriodicScalar::offset_sine(6.0, 1.0, 0.2).unwrap();
        let w = WarpedMetric::new(f, 3).unwrap();
        let eq = warped_to_conformal(&w).unwrap();
        let err = pullback_certificate(&eq, &w, 50).unwrap();
        assert!(err <= 1e-9, "pullback error {err:e}");
        // phi has period L by construction.
        let l = eq.length();
        assert!((eq.phi().value(0.3) - eq.phi().value(0.3 + l)).abs() < 1e-11);
    }

    #[test]
    fn orbit_warp_pullback_is_certified() {
        let eq = derdzinski_to_pseudocylindric(&mid_window_orbit(), Convention::TotalDim).unwrap();
        let origin = eq.origin().unwrap();
        assert_eq!(origin.convention, Convention::TotalDim);
        assert_eq!(origin.m, 3);
        // Rebuild the warped side to compare against.
        let radius = origin.fiber_radius;
        let f = mid_window_orbit()
            .factor()
            .powered(2.0 / 3.0)
            .unwrap()
            .scaled(radius)
            .unwrap();
        let w = WarpedMetric::new(f, 2).unwrap();
        let err = pullback_certificate(&eq, &w, 50).unwrap();
        assert!(err <= 1e-9, "pullback error {err:e}");
    }

    #[test]
    fn factor_power_round_trip_is_algebraic() {
        let eq = derdzinski_to_pseudocylindric(&mid_window_orbit(), Convention::TotalDim).unwrap();
        let n = f64::from(eq.n());
        for k in 0..25 {
            let theta = (k as f64 + 0.3) * eq.length() / 25.0;
            let w = eq.w_c().value(theta);
            let phi = eq.phi().value(theta);
            assert!(
                (w.powf(4.0 / (n - 2.0)) - phi * phi).abs() < 1e-12 * phi * phi,
                "round trip at {theta}"
            );
        }
    }

    #[test]
    fn fowler_orbit_is_rejected_for_transport() {
        let orbit = FowlerSystem::new(4).unwrap().solve_period(6.0).unwrap();
        assert!(matches!(
            derdzinski_to_pseudocylindric(&orbit, Convention::TotalDim),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn constant_warp_identifies_as_the_cylinder() {
        // h = h0 transported by hand under the total-dimension reading:
        // f = r h0^(2/3) over a unit circle of fiber dimension 2.
        let sys = DerdzinskiSystem::new(3, 6.0, 2.0).unwrap();
        let h0 = sys.constant_solution();
        let radius = (2.0f64 * 1.0 / 6.0).sqrt();
        let f = PeriodicScalar::constant(4.4, radius * h0.powf(2.0 / 3.0)).unwrap();
        let w = WarpedMetric::new(f, 2).unwrap();
        let eq = warped_to_conformal(&w).unwrap();
        let report = verify_identification_on_grid(&eq, 3, &small_grid()).unwrap();
        assert!(report.scalar_constant_pass, "stddev {}", report.r_bar_stddev);
        // The warped scalar curvature is (m-1) C = 4 under this reading.
        assert!(
            (report.r_bar_mean - 4.0).abs() < 1e-6,
            "mean {}",
            report.r_bar_mean
        );
        assert!(
            report.fowler_pass,
            "residual {:?}",
            report.fowler_residual_max
        );
        assert!(report.harmonic_pass);
        // The cylinder is parallel: certified NOT non-parallel.
        assert!(!report.nonparallel_pass);
        assert!(!report.identified);
        assert!(report.convention.is_none());
        assert_eq!(report.m, None);
    }

    #[test]
    fn orbit_identifies_under_the_total_dimension_reading() {
        let eq = derdzinski_to_pseudocylindric(&mid_window_orbit(), Convention::TotalDim).unwrap();
        let report = verify_identification_on_grid(&eq, 3, &small_grid()).unwrap();
        assert!(
            report.scalar_constant_pass,
            "stddev {}",
            report.r_bar_stddev
        );
        assert!(
            (report.r_bar_mean - 4.0).abs() < 1e-5,
            "mean {} should be (m-1) C",
            report.r_bar_mean
        );
        assert!(
            report.generalized_residual_max <= RESIDUAL_THRESHOLD,
            "generalized residual {}",
            report.generalized_residual_max
        );
        assert!(
            report.fowler_pass,
            "residual {:?}",
            report.fowler_residual_max
        );
        assert!(report.harmonic_pass, "codazzi {:?}", report.codazzi_max);
        assert!(report.nonparallel_pass, "dric {:?}", report.dric_max);
        assert!(report.identified);
        assert_eq!(report.convention, Some(Convention::TotalDim));
        assert_eq!(report.m, Some(3));
    }

    #[test]
    fn orbit_fails_under_the_fiber_dimension_reading() {
        let eq = derdzinski_to_pseudocylindric(&mid_window_orbit(), Convention::FiberDim).unwrap();
        let report = verify_identification_on_grid(&eq, 4, &small_grid()).unwrap();
        // This reading measures a negative, non-constant scalar curvature:
        // no normalizing homothety exists, so the homothety-dependent fields
        // come back absent and their flags failed.
        assert!(report.r_bar_mean < 0.0, "mean {}", report.r_bar_mean);
        assert!(
            !report.scalar_constant_pass,
            "stddev {} should be macroscopic",
            report.r_bar_stddev
        );
        assert!(report.fowler_residual_max.is_none());
        assert!(report.codazzi_max.is_none());
        assert!(report.dric_max.is_none());
        assert!(!report.fowler_pass);
        assert!(!report.harmonic_pass);
        assert!(!report.nonparallel_pass);
        assert!(!report.identified);
        assert_eq!(report.convention, Some(Convention::FiberDim));
    }

    #[test]
    fn generic_warp_fails_the_identification() {
        let f = PeriodicScalar::offset_sine(6.0, 1.0, 0.2).unwrap();
        let w = WarpedMetric::new(f, 3).unwrap();
        let eq = warped_to_conformal(&w).unwrap();
        let report = verify_identification_on_grid(&eq, 4, &small_grid()).unwrap();
        assert!(
            !report.scalar_constant_pass,
            "generic warps are not constant-curvature, stddev {}",
            report.r_bar_stddev
        );
        assert!(!report.identified);
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let eq = derdzinski_to_pseudocylindric(&mid_window_orbit(), Convention::TotalDim).unwrap();
        assert!(verify_identification_on_grid(&eq, 4, &small_grid()).is_err());
    }
}
