//! Closed-form curvature of conformally-cylindrical metrics
//! `u(t)^(4/(n-2)) (dt^2 + dxi^2)` on the product of a circle with a unit
//! round sphere, together with the grid certificates built on it:
//! harmonicity (Codazzi identity for Ricci), non-parallelism of Ricci, and
//! Weyl vanishing.
//!
//! Everything here is derived from the standard conformal transformation law
//! with `phi = (2/(n-2)) ln u`:
//!
//! ```text
//! Gam^k_ij   += delta^k_i phi_j + delta^k_j phi_i - g_ij g^kl phi_l,
//! Ric        += -(n-2)(Hess phi - dphi (x) dphi) - (lap phi + (n-2)|dphi|^2) g,
//! R          -> e^(-2 phi) (R - 2(n-1) lap phi - (n-1)(n-2) |dphi|^2).
//! ```
//!
//! Certain widely circulated display variants of these formulas (an opposite
//! sign on the `u''/u` term of the time-time Ricci entry, a rescaled metric
//! in the angular Christoffel row, a `(2n-1)/(n-2)` cross coefficient) are
//! retained as *alternate readings* and quantified against the
//! finite-difference referee in [`crate::oracle`] instead of being silently
//! discarded; reports carry the measured gaps.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{self, conformal_metric, cylinder_metric, MetricField};
use crate::periodic::PeriodicScalar;

/// JSON schema version stamped on serialized reports.
pub const SCHEMA_VERSION: &str = "1";

/// A grid maximum of the Codazzi residual at or below this value certifies
/// harmonic curvature.
pub const HARMONIC_THRESHOLD: f64 = 1e-6;

/// A grid maximum of the Ricci-derivative norm at or above this value
/// certifies a non-parallel Ricci tensor. The three orders of magnitude
/// between this and [`HARMONIC_THRESHOLD`] separate genuine nonvanishing
/// from truncation noise.
pub const NONPARALLEL_THRESHOLD: f64 = 1e-3;

/// Seed for the pseudo-random sample points of [`oracle_cross_check`];
/// fixed so reports are reproducible byte for byte.
pub const CROSS_CHECK_SEED: u64 = 42;

// ---------------------------------------------------------------------------
// The sampling grid
// ---------------------------------------------------------------------------

/// Sampling grid for the certificates: uniform points around the circle
/// direction crossed with a sweep of the first polar angle inside the safe
/// chart band `[band_margin, pi - band_margin]` (remaining polar angles sit
/// at the equator, the azimuth at 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of uniform sample times over one period.
    pub time_points: usize,
    /// Number of first-polar-angle samples across the band.
    pub angular_points: usize,
    /// Distance kept from the polar coordinate singularities at 0 and pi.
    pub band_margin: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            time_points: 64,
            angular_points: 5,
            band_margin: 0.4,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if self.time_points < 2 || self.angular_points == 0 {
            return Err(Error::invalid_parameter(format!(
                "grid needs at least 2 time points and 1 angular point, got {} x {}",
                self.time_points, self.angular_points
            )));
        }
        if !(self.band_margin > 0.0 && self.band_margin < PI / 2.0) {
            return Err(Error::invalid_parameter(format!(
                "band margin must lie in (0, pi/2), got {}",
                self.band_margin
            )));
        }
        Ok(())
    }

    /// The sample times `j T / time_points`, `j = 0 .. time_points`.
    pub fn times(&self, period: f64) -> Vec<f64> {
        (0..self.time_points)
            .map(|j| j as f64 * period / self.time_points as f64)
            .collect()
    }

    /// The first-polar-angle samples across the band (band midpoint when a
    /// single sample is requested).
    pub fn polar_values(&self) -> Vec<f64> {
        let (lo, hi) = (self.band_margin, PI - self.band_margin);
        if self.angular_points == 1 {
            return vec![0.5 * (lo + hi)];
        }
        let step = (hi - lo) / (self.angular_points - 1) as f64;
        (0..self.angular_points).map(|k| lo + k as f64 * step).collect()
    }

    /// Full chart point for dimension `n` at time `t` with first polar angle
    /// `theta1`: remaining polar angles at the equator, azimuth at 1.
    pub fn chart_point(&self, n: u32, t: f64, theta1: f64) -> Vec<f64> {
        let n = n as usize;
        let mut p = Vec::with_capacity(n);
        p.push(t);
        p.push(theta1);
        for _ in 2..(n - 1) {
            p.push(PI / 2.0);
        }
        p.push(1.0);
        p
    }
}

// ---------------------------------------------------------------------------
// Labeled closed-form components
// ---------------------------------------------------------------------------

/// The Christoffel entries a circle-direction conformal factor adds to the
/// product cylinder, in the block form they take for `phi = phi(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalChristoffel {
    /// `Gam^0_00 = phi'`.
    pub time_time_time: f64,
    /// Coefficient of `delta^i_j` in `Gam^i_{j0} = phi' delta^i_j`.
    pub mixed_identity_coeff: f64,
    /// Coefficient of the *base* angular metric in
    /// `Gam^0_{jk} = -phi' g_jk`. Multiplying by the rescaled metric
    /// instead would introduce a factor `u^(4/(n-2))`; reports record that
    /// factor's range so the two readings stay distinguishable.
    pub angular_base_coeff: f64,
    /// `Gam^i_00`, identically zero for circle-only factors.
    pub angular_time_time: f64,
}

/// Closed-form Ricci entries of the rescaled metric for a circle-direction
/// factor. The angular block is proportional to the base sphere metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalRicci {
    /// `R_00 = -(n-1) phi''`.
    pub time_time: f64,
    /// `R_0i`, identically zero for circle-only factors.
    pub time_angular: f64,
    /// Coefficient `rho` of the base angular metric in `R_ij = rho g_ij`,
    /// `rho = (n-2) - phi'' - (n-2) phi'^2`.
    pub angular_base_coeff: f64,
    /// Alternate reading of the time-time entry with the opposite sign on
    /// the `u''/u` term: `(2(n-1)/(n-2)) (u''/u + (u'/u)^2)`. Kept so the
    /// finite-difference referee can quantify its error; never used in the
    /// certificates.
    pub time_time_alternate: f64,
}

/// Closed-form covariant derivative of the Ricci tensor. For a
/// circle-direction factor the full tensor `D_k R_ij` is determined by
/// three scalars:
///
/// ```text
/// D_0 R_00 = time_time_time,
/// D_0 R_ij = time_angular_coeff  * g_ij,
/// D_i R_0j = angular_time_coeff * g_ij   (= D_i R_j0),
/// ```
///
/// with `g` the base angular metric; every other component vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalRicciDerivative {
    /// `D_0 R_00`, connection correction included.
    pub time_time_time: f64,
    /// Coefficient of `g_ij` in `D_0 R_ij`.
    pub time_angular_coeff: f64,
    /// Coefficient of `g_ij` in `D_i R_0j`.
    pub angular_time_coeff: f64,
    /// The plain time derivative `d R_00 / dt`, i.e. the shortcut that drops
    /// the connection correction `-2 phi' R_00`. Reported alongside the
    /// honest `time_time_time` so the gap between them stays measured.
    pub time_time_shortcut: f64,
}

impl ConformalRicciDerivative {
    /// `max_{k,i,j} |D_k R_ij - D_i R_kj|` over tensor components. The only
    /// surviving combination is `(time_angular_coeff - angular_time_coeff)
    /// g_ij`, and the base angular metric attains component magnitude 1, so
    /// the component maximum is exactly this coefficient gap.
    pub fn codazzi_residual(&self) -> f64 {
        (self.time_angular_coeff - self.angular_time_coeff).abs()
    }
}

// ---------------------------------------------------------------------------
// The metric
// ---------------------------------------------------------------------------

/// A metric `u(t)^(4/(n-2)) (dt^2 + dxi^2)` on the product of a circle of
/// length `u.period()` with the unit round sphere of dimension `n - 1`.
#[derive(Debug, Clone)]
pub struct ConformalCylinderMetric {
    n: u32,
    factor: PeriodicScalar,
}

/// Logarithmic derivatives of the factor at a fixed time.
struct LogDerivs {
    u: f64,
    phi1: f64,
    phi2: f64,
    phi3: f64,
}

impl ConformalCylinderMetric {
    /// Wrap a positive periodic factor as a conformal metric in dimension
    /// `n >= 3`.
    pub fn new(n: u32, factor: PeriodicScalar) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid_parameter(format!(
                "conformal cylinder needs dimension n >= 3, got {n}"
            )));
        }
        Ok(ConformalCylinderMetric { n, factor })
    }

    /// Total dimension `n`.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Circle length (the factor's period).
    pub fn period(&self) -> f64 {
        self.factor.period()
    }

    /// The conformal factor.
    pub fn factor(&self) -> &PeriodicScalar {
        &self.factor
    }

    /// Conformal exponent `4/(n-2)`.
    pub fn exponent(&self) -> f64 {
        4.0 / (f64::from(self.n) - 2.0)
    }

    /// The pointwise rescaling `u(t)^(4/(n-2)) = e^(2 phi)`.
    pub fn conformal_power(&self, t: f64) -> Result<f64> {
        let u = self.positive_value(t)?;
        Ok(u.powf(self.exponent()))
    }

    fn positive_value(&self, t: f64) -> Result<f64> {
        let u = self.factor.value(t);
        if !(u > 0.0) {
            return Err(Error::NonPositiveFactor { t, value: u });
        }
        Ok(u)
    }

    fn log_derivs(&self, t: f64) -> Result<LogDerivs> {
        let u = self.positive_value(t)?;
        let a1 = self.factor.d1(t) / u;
        let a2 = self.factor.d2(t) / u;
        let a3 = self.factor.d3(t) / u;
        let k = 2.0 / (f64::from(self.n) - 2.0);
        Ok(LogDerivs {
            u,
            phi1: k * a1,
            phi2: k * (a2 - a1 * a1),
            phi3: k * (a3 - 3.0 * a1 * a2 + 2.0 * a1 * a1 * a1),
        })
    }

    /// Labeled Christoffel corrections at time `t`.
    pub fn christoffel_closed(&self, t: f64) -> Result<ConformalChristoffel> {
        let l = self.log_derivs(t)?;
        Ok(ConformalChristoffel {
            time_time_time: l.phi1,
            mixed_identity_coeff: l.phi1,
            angular_base_coeff: -l.phi1,
            angular_time_time: 0.0,
        })
    }

    /// Labeled Ricci entries at time `t`.
    pub fn ricci_closed(&self, t: f64) -> Result<ConformalRicci> {
        let nf = f64::from(self.n);
        let l = self.log_derivs(t)?;
        let u1 = self.factor.d1(t) / l.u;
        let u2 = self.factor.d2(t) / l.u;
        Ok(ConformalRicci {
            time_time: -(nf - 1.0) * l.phi2,
            time_angular: 0.0,
            angular_base_coeff: (nf - 2.0) - l.phi2 - (nf - 2.0) * l.phi1 * l.phi1,
            time_time_alternate: 2.0 * (nf - 1.0) / (nf - 2.0) * (u2 + u1 * u1),
        })
    }

    /// Scalar curvature of the rescaled metric at time `t`:
    /// `e^(-2 phi) ((n-1)(n-2) - 2(n-1) phi'' - (n-1)(n-2) phi'^2)`.
    pub fn scalar_curvature_closed(&self, t: f64) -> Result<f64> {
        let nf = f64::from(self.n);
        let l = self.log_derivs(t)?;
        let inner = (nf - 1.0) * (nf - 2.0) * (1.0 - l.phi1 * l.phi1) - 2.0 * (nf - 1.0) * l.phi2;
        Ok(inner / self.conformal_power(t)?)
    }

    /// Closed-form covariant derivative of the Ricci tensor at time `t`.
    pub fn dricci_closed(&self, t: f64) -> Result<ConformalRicciDerivative> {
        let nf = f64::from(self.n);
        let l = self.log_derivs(t)?;
        let r00 = -(nf - 1.0) * l.phi2;
        let rho = (nf - 2.0) - l.phi2 - (nf - 2.0) * l.phi1 * l.phi1;
        let r00_dt = -(nf - 1.0) * l.phi3;
        let rho_dt = -l.phi3 - 2.0 * (nf - 2.0) * l.phi1 * l.phi2;
        Ok(ConformalRicciDerivative {
            time_time_time: r00_dt - 2.0 * l.phi1 * r00,
            time_angular_coeff: rho_dt - 2.0 * l.phi1 * rho,
            angular_time_coeff: l.phi1 * (r00 - rho),
            time_time_shortcut: r00_dt,
        })
    }

    /// Invariant norm `|D Ric|` of the covariant derivative at time `t`,
    /// indices raised with the rescaled metric:
    /// `e^(-3 phi) sqrt(a^2 + (n-1)(b^2 + 2 c^2))` in the notation of
    /// [`ConformalRicciDerivative`].
    pub fn dricci_norm_closed(&self, t: f64) -> Result<f64> {
        let nf = f64::from(self.n);
        let d = self.dricci_closed(t)?;
        let sq = d.time_time_time * d.time_time_time
            + (nf - 1.0)
                * (d.time_angular_coeff * d.time_angular_coeff
                    + 2.0 * d.angular_time_coeff * d.angular_time_coeff);
        Ok(sq.sqrt() * self.conformal_power(t)?.powf(-1.5))
    }

    /// Assemble the same metric as an evaluator field for the
    /// finite-difference referee.
    pub fn metric_field(&self) -> Result<MetricField> {
        let base = cylinder_metric(self.n, self.period())?;
        let factor = self.factor.clone();
        conformal_metric(&base, move |p: &[f64]| factor.value(p[0]), self.exponent())
    }

    // -- full-tensor assemblies (for referee comparisons) -------------------

    /// Full Christoffel tensor (row-major `n^3`) of the rescaled metric:
    /// base cylinder symbols plus the conformal corrections.
    pub fn christoffel_full(&self, p: &[f64]) -> Result<Vec<f64>> {
        let n = self.check_point(p)?;
        let l = self.log_derivs(p[0])?;
        let g = base_diag(n, p);
        let mut gam = base_christoffel(n, p);
        let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
        for a in 0..n {
            for b in 0..n {
                gam[idx(a, b, 0)] += if a == b { l.phi1 } else { 0.0 };
                gam[idx(a, 0, b)] += if a == b { l.phi1 } else { 0.0 };
            }
            gam[idx(0, a, a)] -= l.phi1 * g[a];
        }
        Ok(gam)
    }

    /// Full Ricci tensor (row-major `n^2`) of the rescaled metric.
    pub fn ricci_full(&self, p: &[f64]) -> Result<Vec<f64>> {
        let n = self.check_point(p)?;
        let ric = self.ricci_closed(p[0])?;
        let g = base_diag(n, p);
        let mut out = vec![0.0; n * n];
        out[0] = ric.time_time;
        for i in 1..n {
            out[i * n + i] = ric.angular_base_coeff * g[i];
        }
        Ok(out)
    }

    /// Full covariant Ricci derivative (row-major `n^3`, layout `D_k R_ij`).
    pub fn dricci_full(&self, p: &[f64]) -> Result<Vec<f64>> {
        let n = self.check_point(p)?;
        let d = self.dricci_closed(p[0])?;
        let g = base_diag(n, p);
        let mut out = vec![0.0; n * n * n];
        let idx = |k: usize, i: usize, j: usize| (k * n + i) * n + j;
        out[idx(0, 0, 0)] = d.time_time_time;
        for i in 1..n {
            out[idx(0, i, i)] = d.time_angular_coeff * g[i];
            out[idx(i, 0, i)] = d.angular_time_coeff * g[i];
            out[idx(i, i, 0)] = d.angular_time_coeff * g[i];
        }
        Ok(out)
    }

    fn check_point(&self, p: &[f64]) -> Result<usize> {
        let n = self.n as usize;
        if p.len() != n {
            return Err(Error::invalid_parameter(format!(
                "chart point has {} coordinates, metric dimension is {n}",
                p.len()
            )));
        }
        Ok(n)
    }
}

/// Diagonal of the base product metric `dt^2 + dxi^2` at `p`:
/// `(1, 1, sin^2 th_1, sin^2 th_1 sin^2 th_2, ...)`.
fn base_diag(n: usize, p: &[f64]) -> Vec<f64> {
    let mut d = vec![1.0; n];
    for i in 2..n {
        let s = p[i - 1].sin();
        d[i] = d[i - 1] * s * s;
    }
    d
}

/// Christoffel symbols of the base product metric (row-major `n^3`): every
/// entry touching the circle direction vanishes, and the sphere block is the
/// standard polar-coordinate set.
fn base_christoffel(n: usize, p: &[f64]) -> Vec<f64> {
    let g = base_diag(n, p);
    let mut gam = vec![0.0; n * n * n];
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    for i in 1..n {
        let cot = p[i].cos() / p[i].sin();
        for j in (i + 1)..n {
            gam[idx(i, j, j)] = -g[j] * cot / g[i];
            gam[idx(j, i, j)] = cot;
            gam[idx(j, j, i)] = cot;
        }
    }
    gam
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Where and how large a grid maximum was.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Sample time of the maximum.
    pub time: f64,
    /// Full chart point of the maximum.
    pub point: Vec<f64>,
    /// The maximal value.
    pub value: f64,
}

/// Sign- and convention-audit data carried by every report: the formulas the
/// implementation committed to, plus the measured distance to the alternate
/// readings so neither is taken on faith.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionNotes {
    /// The implemented time-time Ricci formula.
    pub ricci_time_formula: String,
    /// Grid maximum of |alternate - implemented| for the time-time Ricci
    /// entry (the alternate flips the sign of the u''/u term).
    pub ricci_time_alternate_gap: f64,
    /// Which metric multiplies the angular Christoffel coefficient.
    pub christoffel_angular_metric: String,
    /// Minimum over the grid of the rescaling factor `u^(4/(n-2))` that
    /// separates the base-metric reading from the rescaled-metric one.
    pub christoffel_rescale_min: f64,
    /// Maximum of the same factor.
    pub christoffel_rescale_max: f64,
    /// Grid maximum of |D_0 R_00 - dR_00/dt|: the connection correction a
    /// plain-derivative shortcut would drop.
    pub time_shortcut_gap: f64,
}

/// Grid-certificate output: scalar-curvature statistics, the Codazzi and
/// Ricci-derivative maxima with witnesses, the referee's Weyl maximum, and
/// the convention audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    /// Report format version.
    pub schema_version: String,
    /// Metric family tag.
    pub family: String,
    /// Total dimension `n`.
    pub dimension: u32,
    /// Circle length.
    pub period: f64,
    /// Representation backing the factor (`series` / `rule` / `ode-series`).
    pub factor_kind: String,
    /// Minimum of the factor over one period.
    pub factor_min: f64,
    /// Maximum of the factor over one period.
    pub factor_max: f64,
    /// The sampling grid.
    pub grid: GridSpec,
    /// Mean of the closed-form scalar curvature over the time grid.
    pub scalar_mean: f64,
    /// Maximum deviation of the scalar curvature from its mean.
    pub scalar_max_deviation: f64,
    /// Standard deviation of the scalar curvature over the time grid.
    pub scalar_stddev: f64,
    /// Grid maximum of the Codazzi residual `|D_k R_ij - D_i R_kj|`.
    pub codazzi_max: Witness,
    /// Grid maximum of the invariant norm `|D Ric|`.
    pub dricci_norm_max: Witness,
    /// Referee's grid maximum over lowered Weyl components.
    pub weyl_max: f64,
    /// `codazzi_max <= 1e-6`.
    pub harmonic: bool,
    /// `dricci_norm_max >= 1e-3`.
    pub nonparallel: bool,
    /// Formula audit.
    pub conventions: ConventionNotes,
}

impl CurvatureReport {
    fn validate(self) -> Result<Self> {
        let stats = [
            self.period,
            self.factor_min,
            self.factor_max,
            self.scalar_mean,
            self.scalar_max_deviation,
            self.scalar_stddev,
            self.codazzi_max.value,
            self.dricci_norm_max.value,
            self.weyl_max,
            self.conventions.ricci_time_alternate_gap,
            self.conventions.christoffel_rescale_min,
            self.conventions.christoffel_rescale_max,
            self.conventions.time_shortcut_gap,
        ];
        if stats.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_parameter(
                "curvature report contains non-finite statistics".to_string(),
            ));
        }
        Ok(self)
    }
}

fn grid_report(m: &ConformalCylinderMetric, grid: &GridSpec) -> Result<CurvatureReport> {
    grid.validate()?;
    let times = grid.times(m.period());
    let witness_theta = grid.polar_values()[0];

    let mut scalars = Vec::with_capacity(times.len());
    let mut codazzi_max = (0.0f64, times[0]);
    let mut norm_max = (0.0f64, times[0]);
    let mut alt_gap = 0.0f64;
    let mut shortcut_gap = 0.0f64;
    let mut rescale_min = f64::INFINITY;
    let mut rescale_max = f64::NEG_INFINITY;

    for &t in &times {
        scalars.push(m.scalar_curvature_closed(t)?);
        let ric = m.ricci_closed(t)?;
        alt_gap = alt_gap.max((ric.time_time_alternate - ric.time_time).abs());
        let d = m.dricci_closed(t)?;
        let cod = d.codazzi_residual();
        if cod > codazzi_max.0 {
            codazzi_max = (cod, t);
        }
        shortcut_gap = shortcut_gap.max((d.time_time_time - d.time_time_shortcut).abs());
        let norm = m.dricci_norm_closed(t)?;
        if norm > norm_max.0 {
            norm_max = (norm, t);
        }
        let cp = m.conformal_power(t)?;
        rescale_min = rescale_min.min(cp);
        rescale_max = rescale_max.max(cp);
    }

    let len = scalars.len() as f64;
    let mean = scalars.iter().sum::<f64>() / len;
    let max_dev = scalars.iter().fold(0.0f64, |acc, s| acc.max((s - mean).abs()));
    let stddev = (scalars.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / len).sqrt();

    let weyl_max = weyl_vanishing_check(m, grid)?;

    CurvatureReport {
        schema_version: SCHEMA_VERSION.to_string(),
        family: "conformal-cylinder".to_string(),
        dimension: m.n(),
        period: m.period(),
        factor_kind: m.factor().kind().to_string(),
        factor_min: m.factor().min_value(),
        factor_max: m.factor().max_value(),
        grid: *grid,
        scalar_mean: mean,
        scalar_max_deviation: max_dev,
        scalar_stddev: stddev,
        codazzi_max: Witness {
            time: codazzi_max.1,
            point: grid.chart_point(m.n(), codazzi_max.1, witness_theta),
            value: codazzi_max.0,
        },
        dricci_norm_max: Witness {
            time: norm_max.1,
            point: grid.chart_point(m.n(), norm_max.1, witness_theta),
            value: norm_max.0,
        },
        weyl_max,
        harmonic: codazzi_max.0 <= HARMONIC_THRESHOLD,
        nonparallel: norm_max.0 >= NONPARALLEL_THRESHOLD,
        conventions: ConventionNotes {
            ricci_time_formula: "R_00 = -(n-1) phi'', phi = (2/(n-2)) ln u".to_string(),
            ricci_time_alternate_gap: alt_gap,
            christoffel_angular_metric: "base cylinder g_jk".to_string(),
            christoffel_rescale_min: rescale_min,
            christoffel_rescale_max: rescale_max,
            time_shortcut_gap: shortcut_gap,
        },
    }
    .validate()
}

/// Certify harmonic curvature: the grid maximum of the closed-form Codazzi
/// residual must not exceed [`HARMONIC_THRESHOLD`] (`harmonic` flag). The
/// returned report also carries the scalar-curvature constancy statistics —
/// the mechanism behind harmonicity for these conformally flat metrics —
/// and everything [`nonparallelism_certificate`] reports.
pub fn harmonicity_certificate(
    m: &ConformalCylinderMetric,
    grid: &GridSpec,
) -> Result<CurvatureReport> {
    grid_report(m, grid)
}

/// Certify a non-parallel Ricci tensor: the grid maximum of the invariant
/// norm `|D Ric|` must reach [`NONPARALLEL_THRESHOLD`] (`nonparallel` flag),
/// with the witness point recorded. Constant factors yield an exact zero.
pub fn nonparallelism_certificate(
    m: &ConformalCylinderMetric,
    grid: &GridSpec,
) -> Result<CurvatureReport> {
    grid_report(m, grid)
}

/// Maximum over the grid of the referee's lowered-Weyl components. Dimension
/// 3 returns an exact zero by construction.
pub fn weyl_vanishing_check(m: &ConformalCylinderMetric, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    let field = m.metric_field()?;
    let mut worst = 0.0f64;
    for &t in &grid.times(m.period()) {
        for &theta in &grid.polar_values() {
            let p = grid.chart_point(m.n(), t, theta);
            worst = worst.max(oracle::weyl(&field, &p)?.max_abs());
        }
    }
    Ok(worst)
}

/// Maximum over the grid of |referee scalar curvature - target|, computed
/// entirely through the finite-difference route.
pub fn oracle_scalar_deviation(
    m: &ConformalCylinderMetric,
    grid: &GridSpec,
    target: f64,
) -> Result<f64> {
    grid.validate()?;
    let field = m.metric_field()?;
    let mut worst = 0.0f64;
    for &t in &grid.times(m.period()) {
        for &theta in &grid.polar_values() {
            let p = grid.chart_point(m.n(), t, theta);
            worst = worst.max((oracle::scalar_curvature(&field, &p)? - target).abs());
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Closed form vs referee
// ---------------------------------------------------------------------------

/// Worst relative gaps between the closed forms and the finite-difference
/// referee over a set of sample points. Each gap is the component-wise
/// absolute difference divided by `max(1, closed-form magnitude)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    /// Number of sample points compared.
    pub points: usize,
    /// Worst Christoffel gap (full tensor).
    pub christoffel_gap: f64,
    /// Worst Ricci gap (full tensor).
    pub ricci_gap: f64,
    /// Worst scalar-curvature gap.
    pub scalar_gap: f64,
    /// Worst Ricci-derivative gap (full tensor).
    pub dricci_gap: f64,
}

impl OracleComparison {
    /// The single worst gap across all compared quantities.
    pub fn max_gap(&self) -> f64 {
        self.christoffel_gap
            .max(self.ricci_gap)
            .max(self.scalar_gap)
            .max(self.dricci_gap)
    }
}

fn relative_gap(closed: &[f64], referee: &[f64]) -> f64 {
    let scale = closed
        .iter()
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    closed
        .iter()
        .zip(referee)
        .fold(0.0f64, |acc, (c, o)| acc.max((c - o).abs()))
        / scale
}

/// Compare the closed-form Christoffel, Ricci, Ricci-derivative, and scalar
/// curvature against the finite-difference referee at `points` pseudo-random
/// chart points (seeded, hence reproducible).
pub fn oracle_cross_check(
    m: &ConformalCylinderMetric,
    points: usize,
    seed: u64,
) -> Result<OracleComparison> {
    if points == 0 {
        return Err(Error::invalid_parameter(
            "cross-check needs at least one sample point".to_string(),
        ));
    }
    let field = m.metric_field()?;
    let n = m.n() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = GridSpec::default().band_margin;

    let mut out = OracleComparison {
        points,
        christoffel_gap: 0.0,
        ricci_gap: 0.0,
        scalar_gap: 0.0,
        dricci_gap: 0.0,
    };
    for _ in 0..points {
        let mut p = Vec::with_capacity(n);
        p.push(rng.gen::<f64>() * m.period());
        for _ in 1..(n - 1) {
            p.push(margin + rng.gen::<f64>() * (PI - 2.0 * margin));
        }
        p.push(rng.gen::<f64>() * 2.0 * PI);

        let gam_closed = m.christoffel_full(&p)?;
        let gam_ref = oracle::christoffel(&field, &p)?;
        out.christoffel_gap = out
            .christoffel_gap
            .max(relative_gap(&gam_closed, gam_ref.values()));

        let ric_closed = m.ricci_full(&p)?;
        let ric_ref = oracle::ricci(&field, &p)?;
        out.ricci_gap = out.ricci_gap.max(relative_gap(&ric_closed, ric_ref.values()));

        let s_closed = m.scalar_curvature_closed(p[0])?;
        let s_ref = oracle::scalar_curvature(&field, &p)?;
        out.scalar_gap = out
            .scalar_gap
            .max((s_closed - s_ref).abs() / s_closed.abs().max(1.0));

        let d_closed = m.dricci_full(&p)?;
        let d_ref = oracle::ricci_covariant_derivative(&field, &p)?;
        out.dricci_gap = out.dricci_gap.max(relative_gap(&d_closed, d_ref.values()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// General (time- and sphere-dependent) factors
// ---------------------------------------------------------------------------

/// A positive factor `u(t, xi)` on the cylinder with the partial derivatives
/// the mixed Ricci entries need. On the product metric the mixed covariant
/// Hessian equals the plain mixed partial (`Gam^k_{i0} = 0`), so plain
/// partials suffice.
pub trait GeneralFactor: Send + Sync {
    /// `u(p)`.
    fn value(&self, p: &[f64]) -> f64;
    /// `du/dt`.
    fn time_derivative(&self, p: &[f64]) -> f64;
    /// `du/dx_axis` for an angular axis (`1 <= axis <= n-1`).
    fn angular_derivative(&self, p: &[f64], axis: usize) -> f64;
    /// `d^2 u / dt^2`.
    fn second_time_derivative(&self, p: &[f64]) -> f64;
    /// `d^2 u / (dt dx_axis)`.
    fn mixed_time_angular(&self, p: &[f64], axis: usize) -> f64;
}

/// Adapter presenting a circle-only factor as a [`GeneralFactor`] (all
/// angular derivatives vanish).
#[derive(Debug, Clone)]
pub struct TimeOnlyFactor(pub PeriodicScalar);

impl GeneralFactor for TimeOnlyFactor {
    fn value(&self, p: &[f64]) -> f64 {
        self.0.value(p[0])
    }
    fn time_derivative(&self, p: &[f64]) -> f64 {
        self.0.d1(p[0])
    }
    fn angular_derivative(&self, _p: &[f64], _axis: usize) -> f64 {
        0.0
    }
    fn second_time_derivative(&self, p: &[f64]) -> f64 {
        self.0.d2(p[0])
    }
    fn mixed_time_angular(&self, _p: &[f64], _axis: usize) -> f64 {
        0.0
    }
}

/// Mixed Ricci entries for a general factor, both the transformation-law
/// values and the alternate readings kept for audit.
///
/// `time_time` is evaluated from circle-direction derivatives only; it is
/// exact when the factor depends on `t` alone, and [`ricci_general_audit`]
/// measures what the angular dependence adds for genuinely mixed factors.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedRicciComponents {
    /// `R_00` from the law, circle-direction part:
    /// `(2(n-1)/(n-2)) (-u_tt/u + (u_t/u)^2)`.
    pub time_time: f64,
    /// Alternate reading with the opposite `u_tt/u` sign.
    pub time_time_alternate: f64,
    /// `R_0i = -2 u_{i t}/u + (2n/(n-2)) u_t u_i / u^2`, `i = 1..n-1`.
    pub time_angular: Vec<f64>,
    /// Alternate reading with cross coefficient `(2n-1)/(n-2)`.
    pub time_angular_alternate: Vec<f64>,
}

/// Evaluate the mixed Ricci entries of `u^(4/(n-2)) (dt^2 + dxi^2)` at `p`
/// for a factor depending on both the circle and the sphere.
pub fn ricci_general_factor(
    n: u32,
    factor: &dyn GeneralFactor,
    p: &[f64],
) -> Result<MixedRicciComponents> {
    if n < 3 {
        return Err(Error::invalid_parameter(format!(
            "mixed Ricci entries need dimension n >= 3, got {n}"
        )));
    }
    if p.len() != n as usize {
        return Err(Error::invalid_parameter(format!(
            "chart point has {} coordinates, metric dimension is {n}",
            p.len()
        )));
    }
    let u = factor.value(p);
    if !(u > 0.0) {
        return Err(Error::NonPositiveFactor { t: p[0], value: u });
    }
    let nf = f64::from(n);
    let ut = factor.time_derivative(p) / u;
    let utt = factor.second_time_derivative(p) / u;
    let lead = 2.0 * (nf - 1.0) / (nf - 2.0);

    let mut time_angular = Vec::with_capacity(n as usize - 1);
    let mut time_angular_alternate = Vec::with_capacity(n as usize - 1);
    for axis in 1..(n as usize) {
        let ui = factor.angular_derivative(p, axis) / u;
        let uti = factor.mixed_time_angular(p, axis) / u;
        time_angular.push(-2.0 * uti + 2.0 * nf / (nf - 2.0) * ut * ui);
        time_angular_alternate.push(-2.0 * uti + (2.0 * nf - 1.0) / (nf - 2.0) * ut * ui);
    }
    Ok(MixedRicciComponents {
        time_time: lead * (-utt + ut * ut),
        time_time_alternate: lead * (utt + ut * ut),
        time_angular,
        time_angular_alternate,
    })
}

/// Referee gaps for the mixed Ricci entries of a general factor: how far the
/// law values and the alternate readings each sit from the finite-difference
/// Ricci of the assembled metric at `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralFactorAudit {
    /// |law `R_00` - referee|: for mixed factors this also contains the
    /// angular terms the circle-only expression omits.
    pub law_time_time_gap: f64,
    /// |alternate `R_00` - referee|.
    pub alternate_time_time_gap: f64,
    /// max_i |law `R_0i` - referee|.
    pub law_time_angular_gap: f64,
    /// max_i |alternate `R_0i` - referee|.
    pub alternate_time_angular_gap: f64,
}

/// Compare both readings of the mixed Ricci entries against the referee's
/// Ricci tensor of the assembled metric at `p`.
pub fn ricci_general_audit(
    n: u32,
    factor: Arc<dyn GeneralFactor>,
    p: &[f64],
) -> Result<GeneralFactorAudit> {
    let comps = ricci_general_factor(n, factor.as_ref(), p)?;
    let base = cylinder_metric(n, 1.0)?;
    let expo = 4.0 / (f64::from(n) - 2.0);
    let inner = factor.clone();
    let field = conformal_metric(&base, move |q: &[f64]| inner.value(q), expo)?;
    let ric = oracle::ricci(&field, p)?;

    let r00 = ric.get(&[0, 0]);
    let mut law_ang = 0.0f64;
    let mut alt_ang = 0.0f64;
    for axis in 1..(n as usize) {
        let referee = ric.get(&[0, axis]);
        law_ang = law_ang.max((comps.time_angular[axis - 1] - referee).abs());
        alt_ang = alt_ang.max((comps.time_angular_alternate[axis - 1] - referee).abs());
    }
    Ok(GeneralFactorAudit {
        law_time_time_gap: (comps.time_time - r00).abs(),
        alternate_time_time_gap: (comps.time_time_alternate - r00).abs(),
        law_time_angular_gap: law_ang,
        alternate_time_angular_gap: alt_ang,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fowler::FowlerSystem;

    fn fowler_metric(n: u32, period: f64) -> ConformalCylinderMetric {
        let sys = FowlerSystem::new(n).unwrap();
        let orbit = sys.solve_period(period).unwrap();
        ConformalCylinderMetric::new(n, orbit.factor().clone()).unwrap()
    }

    fn constant_metric(n: u32, c: f64) -> ConformalCylinderMetric {
        ConformalCylinderMetric::new(n, PeriodicScalar::constant(5.0, c).unwrap()).unwrap()
    }

    /// Coarse grid keeping referee sweeps cheap in unit tests.
    fn small_grid() -> GridSpec {
        GridSpec {
            time_points: 8,
            angular_points: 3,
            band_margin: 0.4,
        }
    }

    #[test]
    fn dimension_two_is_rejected() {
        let factor = PeriodicScalar::constant(1.0, 1.0).unwrap();
        assert!(matches!(
            ConformalCylinderMetric::new(2, factor),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn unit_factor_has_no_conformal_corrections() {
        let m = constant_metric(4, 1.0);
        let gam = m.christoffel_closed(0.3).unwrap();
        assert_eq!(gam.time_time_time, 0.0);
        assert_eq!(gam.mixed_identity_coeff, 0.0);
        assert_eq!(gam.angular_base_coeff, 0.0);
        assert_eq!(gam.angular_time_time, 0.0);
        let ric = m.ricci_closed(0.3).unwrap();
        assert_eq!(ric.time_time, 0.0);
        assert_eq!(ric.time_angular, 0.0);
        assert_eq!(ric.angular_base_coeff, 2.0);
        assert_eq!(m.scalar_curvature_closed(0.3).unwrap(), 6.0);
    }

    #[test]
    fn equilibrium_factor_is_the_einstein_rescaling() {
        // u = ((n-2)/n)^((n-2)/4): scalar curvature n(n-1), flat time block,
        // exactly parallel Ricci.
        let n = 4u32;
        let m = constant_metric(n, FowlerSystem::new(n).unwrap().constant_solution());
        assert!((m.scalar_curvature_closed(1.0).unwrap() - 12.0).abs() < 1e-12);
        let ric = m.ricci_closed(1.0).unwrap();
        assert_eq!(ric.time_time, 0.0);
        let d = m.dricci_closed(1.0).unwrap();
        assert_eq!(d.time_time_time, 0.0);
        assert_eq!(d.time_angular_coeff, 0.0);
        assert_eq!(d.angular_time_coeff, 0.0);
        assert_eq!(m.dricci_norm_closed(1.0).unwrap(), 0.0);
    }

    #[test]
    fn solution_factors_pin_the_scalar_curvature() {
        let m = fowler_metric(4, 6.0);
        for j in 0..10 {
            let t = j as f64 * m.period() / 10.0;
            let s = m.scalar_curvature_closed(t).unwrap();
            assert!((s - 12.0).abs() < 1e-10, "t = {t}: {s}");
        }
    }

    #[test]
    fn homothety_rescales_the_scalar_curvature() {
        let m = fowler_metric(4, 6.0);
        let c: f64 = 1.7;
        let scaled =
            ConformalCylinderMetric::new(4, m.factor().scaled(c).unwrap()).unwrap();
        for j in 0..7 {
            let t = j as f64 * m.period() / 7.0;
            let lhs = scaled.scalar_curvature_closed(t).unwrap();
            let rhs = c.powf(-m.exponent()) * m.scalar_curvature_closed(t).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs(), "t = {t}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn christoffel_blocks_match_the_referee() {
        let m = fowler_metric(4, 6.0);
        let t = m.period() / 4.0;
        let gam = m.christoffel_closed(t).unwrap();
        let u = m.factor().value(t);
        let expected = m.factor().d1(t) / u; // (2/(n-2)) u'/u with n = 4
        assert!((gam.time_time_time - expected).abs() < 1e-14);

        let field = m.metric_field().unwrap();
        let p = [t, 1.2, 1.7, 0.9];
        let referee = oracle::christoffel(&field, &p).unwrap();
        assert!(
            (referee.get(&[0, 0, 0]) - gam.time_time_time).abs() < 1e-7,
            "time-time-time: {} vs {}",
            referee.get(&[0, 0, 0]),
            gam.time_time_time
        );
        let g = base_diag(4, &p);
        for i in 1..4 {
            for j in 1..4 {
                let mixed = if i == j { gam.mixed_identity_coeff } else { 0.0 };
                assert!(
                    (referee.get(&[i, j, 0]) - mixed).abs() < 1e-7,
                    "mixed block ({i},{j})"
                );
                let ang = if i == j { gam.angular_base_coeff * g[i] } else { 0.0 };
                assert!(
                    (referee.get(&[0, i, j]) - ang).abs() < 1e-7,
                    "angular row ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn ricci_time_angular_entries_vanish_structurally() {
        let m = fowler_metric(4, 6.0);
        assert_eq!(m.ricci_closed(0.7).unwrap().time_angular, 0.0);
    }

    #[test]
    fn referee_rejects_the_alternate_time_ricci_sign() {
        let m = fowler_metric(4, 6.0);
        let t = m.period() / 8.0;
        let p = [t, 1.2, 1.7, 0.9];
        let ric_ref = oracle::ricci(&m.metric_field().unwrap(), &p).unwrap();
        let ric = m.ricci_closed(t).unwrap();
        let law_gap = (ric.time_time - ric_ref.get(&[0, 0])).abs();
        let alt_gap = (ric.time_time_alternate - ric_ref.get(&[0, 0])).abs();
        assert!(law_gap < 1e-6, "law vs referee {law_gap}");
        assert!(
            alt_gap > 1e-2,
            "alternate should be visibly wrong here, gap {alt_gap}"
        );
    }

    #[test]
    fn closed_forms_match_the_referee_at_random_points() {
        let m = fowler_metric(4, 6.0);
        let cmp = oracle_cross_check(&m, 5, CROSS_CHECK_SEED).unwrap();
        assert!(cmp.christoffel_gap < 1e-6, "christoffel {}", cmp.christoffel_gap);
        assert!(cmp.ricci_gap < 1e-6, "ricci {}", cmp.ricci_gap);
        assert!(cmp.scalar_gap < 1e-6, "scalar {}", cmp.scalar_gap);
        assert!(cmp.dricci_gap < 1e-6, "dricci {}", cmp.dricci_gap);
    }

    #[test]
    fn connection_correction_vanishes_only_at_critical_points() {
        let m = fowler_metric(4, 6.0);
        // Phase convention puts a minimum of u at t = 0, so u'(0) ~ 0 and the
        // shortcut agrees there.
        let d0 = m.dricci_closed(0.0).unwrap();
        assert!(
            (d0.time_time_time - d0.time_time_shortcut).abs() < 1e-9,
            "gap at the critical point: {}",
            (d0.time_time_time - d0.time_time_shortcut).abs()
        );
        // Away from it the dropped term -2 phi' R_00 is macroscopic.
        let d1 = m.dricci_closed(m.period() / 8.0).unwrap();
        assert!(
            (d1.time_time_time - d1.time_time_shortcut).abs() > 1e-3,
            "correction should matter off the critical set"
        );
    }

    #[test]
    fn contracted_second_bianchi_holds_for_arbitrary_factors() {
        // e^(-2 phi) (D_0 R_00 + (n-1) c) = (1/2) dR/dt must hold for ANY
        // factor, solution or not; this ties the derivative scalars to the
        // scalar-curvature formula through an independent identity.
        let n = 5u32;
        let factor = PeriodicScalar::offset_sine(4.0, 1.0, 0.3).unwrap();
        let m = ConformalCylinderMetric::new(n, factor).unwrap();
        let s = |t: f64| m.scalar_curvature_closed(t).unwrap();
        for j in 0..9 {
            let t = 0.05 + j as f64 * m.period() / 9.0;
            let d = m.dricci_closed(t).unwrap();
            let lhs = (d.time_time_time + (f64::from(n) - 1.0) * d.angular_time_coeff)
                / m.conformal_power(t).unwrap();
            let h = 1e-3;
            let dr =
                (s(t - 2.0 * h) - 8.0 * s(t - h) + 8.0 * s(t + h) - s(t + 2.0 * h)) / (12.0 * h);
            assert!(
                (lhs - 0.5 * dr).abs() < 1e-9 * (1.0 + dr.abs()),
                "t = {t}: {lhs} vs {}",
                0.5 * dr
            );
        }
    }

    #[test]
    fn harmonicity_certificate_for_solution_factors() {
        let m = fowler_metric(4, 6.0);
        let report = harmonicity_certificate(&m, &small_grid()).unwrap();
        assert!(report.harmonic, "codazzi max {}", report.codazzi_max.value);
        assert!(report.codazzi_max.value <= 1e-7);
        assert!((report.scalar_mean - 12.0).abs() < 1e-8);
        assert!(report.scalar_max_deviation <= 1e-6);
        assert!(report.nonparallel, "norm max {}", report.dricci_norm_max.value);
        assert!(report.dricci_norm_max.value >= 1e-3);
        assert!(report.weyl_max <= 1e-6, "weyl {}", report.weyl_max);
        // Convention audit: the alternate sign is macroscopically different.
        assert!(report.conventions.ricci_time_alternate_gap > 1e-2);
        assert!(report.conventions.time_shortcut_gap > 1e-3);
    }

    #[test]
    fn non_solution_factors_fail_harmonicity() {
        let factor = PeriodicScalar::offset_sine(6.0, 1.0, 0.3).unwrap();
        let m = ConformalCylinderMetric::new(4, factor).unwrap();
        let report = harmonicity_certificate(&m, &small_grid()).unwrap();
        assert!(!report.harmonic);
        assert!(report.codazzi_max.value >= 1e-3, "codazzi {}", report.codazzi_max.value);
        assert!(report.scalar_stddev >= 1e-2, "stddev {}", report.scalar_stddev);
    }

    #[test]
    fn constant_factors_are_certified_parallel() {
        let n = 4u32;
        let m = constant_metric(n, FowlerSystem::new(n).unwrap().constant_solution());
        let report = nonparallelism_certificate(&m, &small_grid()).unwrap();
        assert_eq!(report.codazzi_max.value, 0.0);
        assert_eq!(report.dricci_norm_max.value, 0.0);
        assert!(report.harmonic);
        assert!(!report.nonparallel);
        assert!((report.scalar_mean - 12.0).abs() < 1e-12);
    }

    #[test]
    fn nonparallelism_witness_lies_on_the_grid() {
        let m = fowler_metric(4, 6.0);
        let grid = small_grid();
        let report = nonparallelism_certificate(&m, &grid).unwrap();
        assert!(report.nonparallel);
        let times = grid.times(m.period());
        assert!(
            times.iter().any(|&t| t == report.dricci_norm_max.time),
            "witness time off-grid"
        );
        assert_eq!(report.dricci_norm_max.point.len(), 4);
    }

    #[test]
    fn weyl_check_certifies_conformal_flatness() {
        let m_flat = constant_metric(4, 1.0);
        assert!(weyl_vanishing_check(&m_flat, &small_grid()).unwrap() <= 1e-7);

        let m = fowler_metric(4, 6.0);
        assert!(weyl_vanishing_check(&m, &small_grid()).unwrap() <= 1e-6);

        // Dimension 3: exactly zero by construction.
        let factor = PeriodicScalar::offset_sine(7.0, 1.0, 0.2).unwrap();
        let m3 = ConformalCylinderMetric::new(3, factor).unwrap();
        assert_eq!(weyl_vanishing_check(&m3, &small_grid()).unwrap(), 0.0);
    }

    #[test]
    fn referee_scalar_curvature_is_pinned_on_solutions() {
        let m = fowler_metric(4, 6.0);
        let dev = oracle_scalar_deviation(&m, &small_grid(), 12.0).unwrap();
        assert!(dev <= 1e-6, "referee deviation {dev}");
    }

    #[test]
    fn mixed_entries_reduce_for_circle_only_factors() {
        let m = fowler_metric(4, 6.0);
        let wrapped = TimeOnlyFactor(m.factor().clone());
        let p = [0.7, 1.2, 1.7, 0.9];
        let comps = ricci_general_factor(4, &wrapped, &p).unwrap();
        for v in &comps.time_angular {
            assert_eq!(*v, 0.0);
        }
        let closed = m.ricci_closed(0.7).unwrap();
        assert!((comps.time_time - closed.time_time).abs() < 1e-13);
    }

    #[test]
    fn constant_general_factor_has_flat_time_block() {
        let wrapped = TimeOnlyFactor(PeriodicScalar::constant(3.0, 0.8).unwrap());
        let comps = ricci_general_factor(5, &wrapped, &[0.2, 1.0, 1.3, 1.1, 2.0]).unwrap();
        assert_eq!(comps.time_time, 0.0);
    }

    /// Mixed test factor `u = c (1 + eps sin t cos th_1)` with analytic
    /// partial derivatives.
    struct WavyMixed {
        c: f64,
        eps: f64,
    }

    impl GeneralFactor for WavyMixed {
        fn value(&self, p: &[f64]) -> f64 {
            self.c * (1.0 + self.eps * p[0].sin() * p[1].cos())
        }
        fn time_derivative(&self, p: &[f64]) -> f64 {
            self.c * self.eps * p[0].cos() * p[1].cos()
        }
        fn angular_derivative(&self, p: &[f64], axis: usize) -> f64 {
            if axis == 1 {
                -self.c * self.eps * p[0].sin() * p[1].sin()
            } else {
                0.0
            }
        }
        fn second_time_derivative(&self, p: &[f64]) -> f64 {
            -self.c * self.eps * p[0].sin() * p[1].cos()
        }
        fn mixed_time_angular(&self, p: &[f64], axis: usize) -> f64 {
            if axis == 1 {
                -self.c * self.eps * p[0].cos() * p[1].sin()
            } else {
                0.0
            }
        }
    }

    #[test]
    fn referee_resolves_the_cross_term_coefficient() {
        let n = 4u32;
        let ubar = FowlerSystem::new(n).unwrap().constant_solution();
        let factor = Arc::new(WavyMixed { c: ubar, eps: 0.01 });
        let p = [0.7, 1.1, PI / 2.0, 1.0];
        let audit = ricci_general_audit(n, factor, &p).unwrap();
        assert!(
            audit.law_time_angular_gap < 1e-6,
            "law cross terms should match the referee: {}",
            audit.law_time_angular_gap
        );
        assert!(
            audit.alternate_time_angular_gap > 5e-6,
            "alternate coefficient should be visibly off: {}",
            audit.alternate_time_angular_gap
        );
        assert!(audit.alternate_time_angular_gap > 3.0 * audit.law_time_angular_gap);
        assert!(audit.law_time_time_gap.is_finite());
        assert!(audit.alternate_time_time_gap.is_finite());
    }

    #[test]
    fn nonpositive_general_factor_is_rejected() {
        struct Bad;
        impl GeneralFactor for Bad {
            fn value(&self, _p: &[f64]) -> f64 {
                -1.0
            }
            fn time_derivative(&self, _p: &[f64]) -> f64 {
                0.0
            }
            fn angular_derivative(&self, _p: &[f64], _axis: usize) -> f64 {
                0.0
            }
            fn second_time_derivative(&self, _p: &[f64]) -> f64 {
                0.0
            }
            fn mixed_time_angular(&self, _p: &[f64], _axis: usize) -> f64 {
                0.0
            }
        }
        assert!(matches!(
            ricci_general_factor(4, &Bad, &[0.0, 1.0, 1.0, 1.0]),
            Err(Error::NonPositiveFactor { .. })
        ));
    }
}
