//! Smooth periodic scalar functions with analytic derivative evaluators.
//!
//! A [`PeriodicScalar`] is the canonical carrier for conformal factors and
//! warp functions: strictly positive, exactly `T`-periodic, and differentiable
//! three times. Three representations share that interface:
//!
//! * a truncated trigonometric series fitted to uniform samples (the
//!   canonical form for solver output — derivatives are term-wise exact for
//!   the series);
//! * an analytic rule (four closures), for closed-form factors such as
//!   constants and offset sines;
//! * an ODE-backed series: values and first derivatives from the series,
//!   second and third derivatives from the orbit's own equation of motion,
//!   which keeps high derivatives of sampled orbits exact instead of
//!   noise-amplified.
//!
//! Construction validates positivity, periodicity and value/derivative
//! consistency, so downstream code can rely on the invariants.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Threshold (relative to the dominant coefficient) below which fitted
/// Fourier coefficients are zeroed. Sampled orbits carry integrator roundoff
/// of order 1e-12; coefficients below this floor are noise, and dropping them
/// keeps the (k*omega)^2,3 amplification out of the derivative evaluators.
const COEFFICIENT_FLOOR: f64 = 1e-13;

/// Number of scan points for positivity/extent checks.
const SCAN_POINTS: usize = 2048;

type Rule = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Real trigonometric interpolant of uniform samples on one period.
#[derive(Clone, Debug)]
pub struct TrigSeries {
    period: f64,
    /// Cosine coefficients, index k = 0..=m; entries 0 and m carry weight 1/2.
    cos_coef: Vec<f64>,
    /// Sine coefficients, same indexing (entry 0 unused, entry m zero).
    sin_coef: Vec<f64>,
}

impl TrigSeries {
    /// Fit the interpolant through `samples` taken at `t_j = j T / N`
    /// (N = `samples.len()`, which must be even and at least 4).
    pub fn fit(period: f64, samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n < 4 || n % 2 != 0 {
            return Err(Error::invalid_parameter(format!(
                "trigonometric fit needs an even sample count >= 4, got {n}"
            )));
        }
        if !(period > 0.0) {
            return Err(Error::invalid_parameter(
                "period must be positive".to_string(),
            ));
        }
        let m = n / 2;
        let mut cos_coef = vec![0.0; m + 1];
        let mut sin_coef = vec![0.0; m + 1];
        let two_pi = 2.0 * std::f64::consts::PI;
        for k in 0..=m {
            let mut a = 0.0;
            let mut b = 0.0;
            for (j, &v) in samples.iter().enumerate() {
                // Reduce k*j modulo N before forming the angle so the phase
                // stays accurate for large harmonics.
                let phase = two_pi * ((k * j) % n) as f64 / n as f64;
                a += v * phase.cos();
                b += v * phase.sin();
            }
            cos_coef[k] = 2.0 * a / n as f64;
            sin_coef[k] = 2.0 * b / n as f64;
        }
        sin_coef[m] = 0.0;
        let mut series = TrigSeries {
            period,
            cos_coef,
            sin_coef,
        };
        series.threshold(COEFFICIENT_FLOOR);
        Ok(series)
    }

    /// Zero coefficients smaller than `rel` times the dominant one.
    fn threshold(&mut self, rel: f64) {
        let peak = self
            .cos_coef
            .iter()
            .chain(self.sin_coef.iter())
            .fold(0.0_f64, |acc, &c| acc.max(c.abs()));
        let floor = rel * peak;
        for c in self.cos_coef.iter_mut().chain(self.sin_coef.iter_mut()) {
            if c.abs() < floor {
                *c = 0.0;
            }
        }
    }

    /// Fundamental period.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Evaluate the `order`-th derivative (order 0 = the value).
    pub fn eval_deriv(&self, t: f64, order: u32) -> f64 {
        let omega = 2.0 * std::f64::consts::PI / self.period;
        let m = self.cos_coef.len() - 1;
        let mut sum = 0.0;
        for k in 0..=m {
            let a = self.cos_coef[k];
            let b = self.sin_coef[k];
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let weight = if k == 0 || k == m { 0.5 } else { 1.0 };
            let kw = k as f64 * omega;
            let theta = kw * t;
            let (s, c) = theta.sin_cos();
            // d/dt rotates (cos, sin) -> (-sin, cos) and multiplies by k*omega.
            let term = match order % 4 {
                0 => a * c + b * s,
                1 => -a * s + b * c,
                2 => -a * c - b * s,
                _ => a * s - b * c,
            };
            sum += weight * kw.powi(order as i32) * term;
        }
        sum
    }

    /// Largest harmonic index with a nonzero coefficient.
    pub fn active_harmonics(&self) -> usize {
        (0..self.cos_coef.len())
            .rev()
            .find(|&k| self.cos_coef[k] != 0.0 || self.sin_coef[k] != 0.0)
            .unwrap_or(0)
    }

    /// The antiderivative `F(t) = integral of the series from 0 to t`,
    /// term-wise exact. The mean (k = 0) term contributes linearly, so `F`
    /// is not itself periodic unless the mean vanishes; `F(t + T) = F(t) +
    /// F(T)` always holds.
    pub fn integral(&self, t: f64) -> f64 {
        let omega = 2.0 * std::f64::consts::PI / self.period;
        let m = self.cos_coef.len() - 1;
        let mut sum = 0.5 * self.cos_coef[0] * t;
        for k in 1..=m {
            let a = self.cos_coef[k];
            let b = self.sin_coef[k];
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let weight = if k == m { 0.5 } else { 1.0 };
            let kw = k as f64 * omega;
            let (s, c) = (kw * t).sin_cos();
            sum += weight * (a * s - b * (c - 1.0)) / kw;
        }
        sum
    }
}

enum Repr {
    /// Pure series: all derivative orders term-wise.
    Series(TrigSeries),
    /// Analytic rule: value and first three derivatives as closures.
    Rule { derivs: [Rule; 4] },
    /// Series for value/first derivative; the motion law for the rest.
    OdeSeries {
        series: TrigSeries,
        /// u'' as a function of u.
        accel: Rule,
        /// d(accel)/du, for u''' = accel'(u) * u'.
        accel_slope: Rule,
    },
}

/// A strictly positive, `T`-periodic scalar function with evaluators for the
/// value and its first three derivatives.
pub struct PeriodicScalar {
    period: f64,
    repr: Repr,
}

impl Clone for PeriodicScalar {
    fn clone(&self) -> Self {
        let repr = match &self.repr {
            Repr::Series(s) => Repr::Series(s.clone()),
            Repr::Rule { derivs } => Repr::Rule {
                derivs: derivs.clone(),
            },
            Repr::OdeSeries {
                series,
                accel,
                accel_slope,
            } => Repr::OdeSeries {
                series: series.clone(),
                accel: accel.clone(),
                accel_slope: accel_slope.clone(),
            },
        };
        PeriodicScalar {
            period: self.period,
            repr,
        }
    }
}

impl fmt::Debug for PeriodicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Series(_) => "series",
            Repr::Rule { .. } => "rule",
            Repr::OdeSeries { .. } => "ode-series",
        };
        f.debug_struct("PeriodicScalar")
            .field("period", &self.period)
            .field("repr", &kind)
            .finish()
    }
}

impl PeriodicScalar {
    /// Build from uniform samples over one period (trigonometric fit).
    pub fn from_samples(period: f64, samples: &[f64]) -> Result<Self> {
        let series = TrigSeries::fit(period, samples)?;
        let out = PeriodicScalar {
            period,
            repr: Repr::Series(series),
        };
        out.validate_positivity()?;
        Ok(out)
    }

    /// Build from an analytic rule: the value and its first three derivatives.
    ///
    /// Positivity, periodicity of the value, and consistency of the supplied
    /// derivatives against finite differences are all checked here.
    pub fn from_rule(
        period: f64,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d3: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::invalid_parameter(
                "period must be positive".to_string(),
            ));
        }
        let out = PeriodicScalar {
            period,
            repr: Repr::Rule {
                derivs: [
                    Arc::new(value),
                    Arc::new(d1),
                    Arc::new(d2),
                    Arc::new(d3),
                ],
            },
        };
        out.validate_positivity()?;
        out.validate_periodicity()?;
        out.validate_derivatives()?;
        Ok(out)
    }

    /// Build from orbit samples plus the orbit's own motion law `u'' = accel(u)`.
    ///
    /// Value and first derivative come from the trigonometric fit; second and
    /// third derivatives are evaluated through `accel` (and its u-derivative),
    /// so they are exact in `u` rather than doubly-differentiated samples.
    pub fn from_ode_samples(
        period: f64,
        samples: &[f64],
        accel: impl Fn(f64) -> f64 + Send + Sync + 'static,
        accel_slope: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let series = TrigSeries::fit(period, samples)?;
        let out = PeriodicScalar {
            period,
            repr: Repr::OdeSeries {
                series,
                accel: Arc::new(accel),
                accel_slope: Arc::new(accel_slope),
            },
        };
        out.validate_positivity()?;
        Ok(out)
    }

    /// Constant factor `c > 0`.
    pub fn constant(period: f64, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::NonPositiveFactor { t: 0.0, value: c });
        }
        Self::from_rule(period, move |_| c, |_| 0.0, |_| 0.0, |_| 0.0)
    }

    /// Offset sine `offset + amplitude * sin(2 pi t / period)`.
    ///
    /// Requires `|amplitude| < offset` so the factor stays positive. This is
    /// the standard non-solution control factor.
    pub fn offset_sine(period: f64, offset: f64, amplitude: f64) -> Result<Self> {
        if !(amplitude.abs() < offset) {
            return Err(Error::invalid_parameter(format!(
                "offset sine needs |amplitude| < offset for positivity, got {amplitude} vs {offset}"
            )));
        }
        let omega = 2.0 * std::f64::consts::PI / period;
        Self::from_rule(
            period,
            move |t| offset + amplitude * (omega * t).sin(),
            move |t| amplitude * omega * (omega * t).cos(),
            move |t| -amplitude * omega * omega * (omega * t).sin(),
            move |t| -amplitude * omega * omega * omega * (omega * t).cos(),
        )
    }

    /// Fundamental period.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Which representation backs this factor: `"series"`, `"rule"`, or
    /// `"ode-series"`. Report metadata only.
    pub fn kind(&self) -> &'static str {
        match &self.repr {
            Repr::Series(_) => "series",
            Repr::Rule { .. } => "rule",
            Repr::OdeSeries { .. } => "ode-series",
        }
    }

    /// Value `u(t)`.
    pub fn value(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Series(s) => s.eval_deriv(t, 0),
            Repr::Rule { derivs } => (derivs[0])(self.fold(t)),
            Repr::OdeSeries { series, .. } => series.eval_deriv(t, 0),
        }
    }

    /// First derivative `u'(t)`.
    pub fn d1(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Series(s) => s.eval_deriv(t, 1),
            Repr::Rule { derivs } => (derivs[1])(self.fold(t)),
            Repr::OdeSeries { series, .. } => series.eval_deriv(t, 1),
        }
    }

    /// Second derivative `u''(t)`.
    pub fn d2(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Series(s) => s.eval_deriv(t, 2),
            Repr::Rule { derivs } => (derivs[2])(self.fold(t)),
            Repr::OdeSeries { series, accel, .. } => accel(series.eval_deriv(t, 0)),
        }
    }

    /// Third derivative `u'''(t)`.
    pub fn d3(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Series(s) => s.eval_deriv(t, 3),
            Repr::Rule { derivs } => (derivs[3])(self.fold(t)),
            Repr::OdeSeries {
                series,
                accel_slope,
                ..
            } => accel_slope(series.eval_deriv(t, 0)) * series.eval_deriv(t, 1),
        }
    }

    /// Second derivative taken from the sampled representation itself (for
    /// series-backed factors), bypassing any motion-law shortcut.
    ///
    /// This is the honest residual probe for solver output: it measures how
    /// well the *interpolant* satisfies the equation of motion instead of
    /// restating the equation.
    pub fn sampled_d2(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Series(s) => s.eval_deriv(t, 2),
            Repr::Rule { derivs } => (derivs[2])(self.fold(t)),
            Repr::OdeSeries { series, .. } => series.eval_deriv(t, 2),
        }
    }

    /// Minimum of the value over a dense scan of one period.
    pub fn min_value(&self) -> f64 {
        (0..SCAN_POINTS)
            .map(|j| self.value(j as f64 * self.period / SCAN_POINTS as f64))
            .fold(f64::INFINITY, f64::min)
    }

    /// Maximum of the value over a dense scan of one period.
    pub fn max_value(&self) -> f64 {
        (0..SCAN_POINTS)
            .map(|j| self.value(j as f64 * self.period / SCAN_POINTS as f64))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The same function scaled by a positive constant.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::NonPositiveFactor {
                t: 0.0,
                value: factor,
            });
        }
        let inner = self.clone();
        let (a, b, c, d) = (
            inner.clone(),
            inner.clone(),
            inner.clone(),
            inner,
        );
        PeriodicScalar::from_rule(
            self.period,
            move |t| factor * a.value(t),
            move |t| factor * b.d1(t),
            move |t| factor * c.d2(t),
            move |t| factor * d.d3(t),
        )
    }

    /// The pointwise power `u(t)^exponent`, with derivatives by the chain
    /// rule. Well-defined for any real exponent since `u > 0`.
    pub fn powered(&self, exponent: f64) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(Error::invalid_parameter(format!(
                "power exponent must be finite, got {exponent}"
            )));
        }
        let p = exponent;
        let (a, b, c, d) = (self.clone(), self.clone(), self.clone(), self.clone());
        PeriodicScalar::from_rule(
            self.period,
            move |t| a.value(t).powf(p),
            move |t| {
                let u = b.value(t);
                p * u.powf(p - 1.0) * b.d1(t)
            },
            move |t| {
                let u = c.value(t);
                let (u1, u2) = (c.d1(t), c.d2(t));
                p * (p - 1.0) * u.powf(p - 2.0) * u1 * u1 + p * u.powf(p - 1.0) * u2
            },
            move |t| {
                let u = d.value(t);
                let (u1, u2, u3) = (d.d1(t), d.d2(t), d.d3(t));
                p * (p - 1.0) * (p - 2.0) * u.powf(p - 3.0) * u1 * u1 * u1
                    + 3.0 * p * (p - 1.0) * u.powf(p - 2.0) * u1 * u2
                    + p * u.powf(p - 1.0) * u3
            },
        )
    }

    /// Map `t` into the fundamental period for rule evaluation (rules are
    /// only guaranteed periodic after folding; series are periodic as is).
    fn fold(&self, t: f64) -> f64 {
        t.rem_euclid(self.period)
    }

    fn validate_positivity(&self) -> Result<()> {
        for j in 0..SCAN_POINTS {
            let t = j as f64 * self.period / SCAN_POINTS as f64;
            let v = self.value(t);
            if !(v > 0.0) {
                return Err(Error::NonPositiveFactor { t, value: v });
            }
        }
        Ok(())
    }

    fn validate_periodicity(&self) -> Result<()> {
        let scale = self.max_value().abs().max(1.0);
        let tolerance = 1e-12 * scale;
        // Compare raw (unfolded) evaluations across one period at several
        // phases to catch rules that are not actually periodic.
        let raw = |t: f64| match &self.repr {
            Repr::Rule { derivs } => (derivs[0])(t),
            _ => self.value(t),
        };
        for j in 0..8 {
            let t = j as f64 * self.period / 8.0;
            let mismatch = (raw(t) - raw(t + self.period)).abs();
            if mismatch > tolerance {
                return Err(Error::NotPeriodic {
                    mismatch,
                    tolerance,
                });
            }
        }
        Ok(())
    }

    fn validate_derivatives(&self) -> Result<()> {
        // Central differences of the value vs. the supplied d1, and of d1 vs.
        // d2, at a handful of phases. The 1e-6 gate is loose relative to the
        // h^2 truncation of the probe, so only genuinely wrong rules trip it.
        let h = 1e-5 * self.period.max(1.0);
        let scale = self.max_value().abs().max(1.0);
        for j in 0..16 {
            let t = (j as f64 + 0.37) * self.period / 16.0;
            let fd1 = (self.value(t + h) - self.value(t - h)) / (2.0 * h);
            let dev1 = (fd1 - self.d1(t)).abs() / scale;
            if dev1 > 1e-6 {
                return Err(Error::InconsistentDerivative {
                    order: 1,
                    t,
                    deviation: dev1,
                });
            }
            let fd2 = (self.d1(t + h) - self.d1(t - h)) / (2.0 * h);
            let dev2 = (fd2 - self.d2(t)).abs() / scale;
            if dev2 > 1e-6 {
                return Err(Error::InconsistentDerivative {
                    order: 2,
                    t,
                    deviation: dev2,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_fit_reproduces_samples_at_nodes() {
        let period = 5.0;
        let n = 64;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let t = j as f64 * period / n as f64;
                1.5 + 0.3 * (2.0 * std::f64::consts::PI * t / period).sin()
                    + 0.1 * (6.0 * std::f64::consts::PI * t / period).cos()
            })
            .collect();
        let series = TrigSeries::fit(period, &samples).unwrap();
        for (j, &v) in samples.iter().enumerate() {
            let t = j as f64 * period / n as f64;
            assert!(
                (series.eval_deriv(t, 0) - v).abs() < 1e-12,
                "node {j} mismatch"
            );
        }
        // Only harmonics 0, 1, 3 should survive thresholding.
        assert_eq!(series.active_harmonics(), 3);
    }

    #[test]
    fn series_derivatives_match_analytic_sine() {
        let period = 2.0 * std::f64::consts::PI;
        let n = 32;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let t = j as f64 * period / n as f64;
                2.0 + t.sin()
            })
            .collect();
        let series = TrigSeries::fit(period, &samples).unwrap();
        for k in 0..50 {
            let t = 0.13 * k as f64;
            assert!((series.eval_deriv(t, 0) - (2.0 + t.sin())).abs() < 1e-11);
            assert!((series.eval_deriv(t, 1) - t.cos()).abs() < 1e-10);
            assert!((series.eval_deriv(t, 2) + t.sin()).abs() < 1e-9);
            assert!((series.eval_deriv(t, 3) + t.cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn offset_sine_is_validated_and_periodic() {
        let u = PeriodicScalar::offset_sine(6.0, 1.0, 0.3).unwrap();
        assert!((u.value(0.0) - u.value(6.0)).abs() < 1e-12);
        assert!(u.min_value() > 0.6);
        assert!(u.max_value() < 1.4);
        // Amplitude >= offset would cross zero.
        assert!(PeriodicScalar::offset_sine(6.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn rule_with_wrong_derivative_is_rejected() {
        let res = PeriodicScalar::from_rule(
            2.0 * std::f64::consts::PI,
            |t| 2.0 + t.sin(),
            |t| 2.0 * t.cos(), // wrong by a factor of two
            |t| -t.sin(),
            |t| -t.cos(),
        );
        assert!(matches!(res, Err(Error::InconsistentDerivative { .. })));
    }

    #[test]
    fn nonperiodic_rule_is_rejected() {
        let res = PeriodicScalar::from_rule(
            1.0,
            |t| 1.0 + 0.1 * t, // not periodic
            |_| 0.1,
            |_| 0.0,
            |_| 0.0,
        );
        assert!(matches!(res, Err(Error::NotPeriodic { .. })));
    }

    #[test]
    fn nonpositive_factor_is_rejected() {
        let n = 16;
        let samples: Vec<f64> = (0..n).map(|j| (j as f64 - 7.5) * 0.1).collect();
        assert!(matches!(
            PeriodicScalar::from_samples(1.0, &samples),
            Err(Error::NonPositiveFactor { .. })
        ));
    }

    #[test]
    fn ode_backed_derivatives_use_the_motion_law() {
        // u = 2 + sin t solves u'' = -(u - 2); feed that law in and check
        // d2/d3 against the closed form.
        let period = 2.0 * std::f64::consts::PI;
        let n = 64;
        let samples: Vec<f64> = (0..n)
            .map(|j| 2.0 + (j as f64 * period / n as f64).sin())
            .collect();
        let u = PeriodicScalar::from_ode_samples(
            period,
            &samples,
            |v| -(v - 2.0),
            |_| -1.0,
        )
        .unwrap();
        for k in 0..20 {
            let t = 0.3 * k as f64;
            assert!((u.d2(t) + t.sin()).abs() < 1e-10, "d2 at {t}");
            assert!((u.d3(t) + t.cos()).abs() < 1e-10, "d3 at {t}");
        }
    }

    #[test]
    fn series_integral_matches_closed_form() {
        // 2 + sin t over one full period: F(t) = 2t + 1 - cos t.
        let period = 2.0 * std::f64::consts::PI;
        let n = 64;
        let samples: Vec<f64> = (0..n)
            .map(|j| 2.0 + (j as f64 * period / n as f64).sin())
            .collect();
        let series = TrigSeries::fit(period, &samples).unwrap();
        for k in 0..40 {
            let t = 0.19 * k as f64;
            let expected = 2.0 * t + 1.0 - t.cos();
            assert!(
                (series.integral(t) - expected).abs() < 1e-11,
                "integral at {t}"
            );
        }
        // Additivity across periods.
        let f_t = series.integral(1.3);
        let f_period = series.integral(period);
        assert!((series.integral(1.3 + period) - f_t - f_period).abs() < 1e-10);
    }

    #[test]
    fn powered_factor_matches_analytic_derivatives() {
        // (2 + sin t)^1.5 differentiated three times by hand.
        let u = PeriodicScalar::from_rule(
            2.0 * std::f64::consts::PI,
            |t| 2.0 + t.sin(),
            |t| t.cos(),
            |t| -t.sin(),
            |t| -t.cos(),
        )
        .unwrap();
        let v = u.powered(1.5).unwrap();
        for k in 0..25 {
            let t = 0.26 * k as f64;
            let (s, c) = t.sin_cos();
            let base: f64 = 2.0 + s;
            assert!((v.value(t) - base.powf(1.5)).abs() < 1e-13);
            assert!((v.d1(t) - 1.5 * base.sqrt() * c).abs() < 1e-13);
            let d2 = 0.75 * c * c / base.sqrt() - 1.5 * base.sqrt() * s;
            assert!((v.d2(t) - d2).abs() < 1e-13, "d2 at {t}");
            let d3 = -0.375 * c * c * c / base.powf(1.5) - 2.25 * c * s / base.sqrt()
                - 1.5 * base.sqrt() * c;
            assert!((v.d3(t) - d3).abs() < 1e-12, "d3 at {t}");
        }
    }

    #[test]
    fn scaled_factor_scales_all_derivatives() {
        let u = PeriodicScalar::offset_sine(4.0, 1.0, 0.2).unwrap();
        let v = u.scaled(3.0).unwrap();
        for k in 0..10 {
            let t = 0.41 * k as f64;
            assert!((v.value(t) - 3.0 * u.value(t)).abs() < 1e-13);
            assert!((v.d2(t) - 3.0 * u.d2(t)).abs() < 1e-13);
            assert!((v.d3(t) - 3.0 * u.d3(t)).abs() < 1e-13);
        }
    }
}
