//! Adaptive explicit Runge–Kutta 5(4) integration with dense output.
//!
//! The stepper is the classic Dormand–Prince 5(4) pair: a fifth-order
//! propagating solution with an embedded fourth-order error estimate and the
//! companion fourth-order interpolant, so solution values between accepted
//! steps come from the interpolant rather than from re-integration. The
//! first-same-as-last property keeps the cost at six right-hand-side
//! evaluations per accepted step (plus one at the start of the integration).
//!
//! Error control uses the weighted root-mean-square norm with per-component
//! scale `abs_tol + rel_tol * max(|y_i|, |y_i'|)` and the standard step
//! controller `h_new = 0.9 * h * err^(-1/5)`, clamped to a factor in
//! [0.2, 5.0].

use crate::error::{Error, Result};

/// Hard floor for the step size relative to the local time scale; going below
/// it means the tolerances cannot be met and the integration aborts.
const STEP_FLOOR: f64 = 1.0e-14;

/// Safety factor of the step controller.
const SAFETY: f64 = 0.9;

/// Dormand–Prince stage coefficients (the `a` matrix, row by row).
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
/// Fifth-order weights (also the seventh stage row: first-same-as-last).
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Difference between the fifth- and the embedded fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];
/// Dense-output weights for the quartic interpolant.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step's interpolation data: a quartic polynomial in the
/// normalized step variable `theta = (t - t_start) / h`.
#[derive(Clone, Debug)]
struct DenseSegment<const N: usize> {
    t_start: f64,
    h: f64,
    coeff: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    /// Evaluate the interpolant at `t` inside the segment.
    fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t_start) / self.h;
        let mut out = [0.0_f64; N];
        let [c1, c2, c3, c4, c5] = &self.coeff;
        for i in 0..N {
            // Horner-like evaluation of the standard quartic form
            //   c1 + theta*(c2 + (1-theta)*(c3 + theta*(c4 + (1-theta)*c5))).
            let inner = c4[i] + (1.0 - theta) * c5[i];
            let mid = c3[i] + theta * inner;
            out[i] = c1[i] + theta * (c2[i] + (1.0 - theta) * mid);
        }
        out
    }
}

/// Solution of an initial-value problem on a finite interval.
///
/// Holds the accepted step points and a dense interpolant per step, so the
/// solution can be evaluated anywhere inside the integration range. At the
/// accepted sample times the interpolant reproduces the stored samples
/// exactly (the interpolant is anchored at both step endpoints).
#[derive(Clone, Debug)]
pub struct Trajectory<const N: usize> {
    t_samples: Vec<f64>,
    y_samples: Vec<[f64; N]>,
    segments: Vec<DenseSegment<N>>,
    rhs_evaluations: usize,
}

impl<const N: usize> Trajectory<N> {
    /// Accepted sample times, strictly increasing.
    pub fn times(&self) -> &[f64] {
        &self.t_samples
    }

    /// States at the accepted sample times.
    pub fn states(&self) -> &[[f64; N]] {
        &self.y_samples
    }

    /// Start of the integration range.
    pub fn t_start(&self) -> f64 {
        self.t_samples[0]
    }

    /// End of the integration range.
    pub fn t_end(&self) -> f64 {
        *self.t_samples.last().expect("trajectory has samples")
    }

    /// Final state.
    pub fn final_state(&self) -> [f64; N] {
        *self.y_samples.last().expect("trajectory has samples")
    }

    /// Number of right-hand-side evaluations spent.
    pub fn rhs_evaluations(&self) -> usize {
        self.rhs_evaluations
    }

    /// Evaluate the dense interpolant at `t`.
    ///
    /// Returns an error for `t` outside the integrated range. Sample times
    /// themselves reproduce the stored states exactly.
    pub fn eval(&self, t: f64) -> Result<[f64; N]> {
        let (t0, t1) = (self.t_start(), self.t_end());
        if !(t >= t0 && t <= t1) {
            return Err(Error::OutsideTrajectory { t, t0, t1 });
        }
        // Exact hits on stored samples short-circuit the interpolant so the
        // round-trip guarantee is bitwise.
        if let Ok(k) = self
            .t_samples
            .binary_search_by(|probe| probe.partial_cmp(&t).expect("finite times"))
        {
            return Ok(self.y_samples[k]);
        }
        let seg_idx = match self
            .t_samples
            .binary_search_by(|probe| probe.partial_cmp(&t).expect("finite times"))
        {
            Ok(k) => k.min(self.segments.len() - 1),
            Err(k) => (k - 1).min(self.segments.len() - 1),
        };
        Ok(self.segments[seg_idx].eval(t))
    }
}

/// Integrate `dy/dt = rhs(t, y)` from `t_span.0` to `t_span.1` (forward only).
///
/// `rel_tol`/`abs_tol` control the local error per step in the weighted RMS
/// norm. Either may be zero (not both). Fails explicitly on step-size
/// underflow or non-finite states; never returns a partially valid result.
pub fn integrate_ivp<const N: usize>(
    rhs: impl Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_span: (f64, f64),
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory<N>> {
    let (t0, t1) = t_span;
    if !(t1 > t0) {
        return Err(Error::invalid_parameter(format!(
            "integration span must be forward and nonempty, got [{t0}, {t1}]"
        )));
    }
    if rel_tol < 0.0 || abs_tol < 0.0 || (rel_tol == 0.0 && abs_tol == 0.0) {
        return Err(Error::invalid_parameter(
            "tolerances must be nonnegative and not both zero".to_string(),
        ));
    }

    let mut evals = 0usize;
    let mut call = |t: f64, y: &[f64; N]| -> [f64; N] {
        evals += 1;
        rhs(t, y)
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = call(t, &y);

    let mut h = initial_step(&mut call, t, &y, &k1, t1 - t0, rel_tol, abs_tol);

    let mut t_samples = vec![t];
    let mut y_samples = vec![y];
    let mut segments: Vec<DenseSegment<N>> = Vec::new();

    while t < t1 {
        h = h.min(t1 - t);
        if h < STEP_FLOOR * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, step: h });
        }

        // The six fresh stages (k1 carried over: first-same-as-last).
        let mut stage = |c: f64, a: &[f64], ks: &[[f64; N]]| -> [f64; N] {
            let mut yt = y;
            for (w, k) in a.iter().zip(ks) {
                for i in 0..N {
                    yt[i] += h * w * k[i];
                }
            }
            call(t + c * h, &yt)
        };
        let k2 = stage(1.0 / 5.0, &A2, &[k1]);
        let k3 = stage(3.0 / 10.0, &A3, &[k1, k2]);
        let k4 = stage(4.0 / 5.0, &A4, &[k1, k2, k3]);
        let k5 = stage(8.0 / 9.0, &A5, &[k1, k2, k3, k4]);
        let k6 = stage(1.0, &A6, &[k1, k2, k3, k4, k5]);

        let mut y_new = y;
        let ks5 = [k1, k2, k3, k4, k5, k6];
        for (w, k) in B.iter().zip(&ks5) {
            for i in 0..N {
                y_new[i] += h * w * k[i];
            }
        }
        let k7 = call(t + h, &y_new);

        if y_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { t: t + h });
        }

        // Weighted RMS error estimate.
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (w, k) in E.iter().zip(&ks) {
                e += w * k[i];
            }
            e *= h;
            let scale = abs_tol + rel_tol * y[i].abs().max(y_new[i].abs());
            let r = e / scale;
            err_sq += r * r;
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            // Accept: build the dense segment before moving the state.
            let mut delta = [0.0_f64; N];
            let mut c3 = [0.0_f64; N];
            let mut c4 = [0.0_f64; N];
            let mut c5 = [0.0_f64; N];
            for i in 0..N {
                delta[i] = y_new[i] - y[i];
                let bspl = h * k1[i] - delta[i];
                c3[i] = bspl;
                c4[i] = delta[i] - h * k7[i] - bspl;
                let mut s = 0.0;
                for (d, k) in D.iter().zip(&ks) {
                    s += d * k[i];
                }
                c5[i] = h * s;
            }
            segments.push(DenseSegment {
                t_start: t,
                h,
                coeff: [y, delta, c3, c4, c5],
            });

            t += h;
            y = y_new;
            k1 = k7;
            t_samples.push(t);
            y_samples.push(y);

            let factor = if err == 0.0 {
                5.0
            } else {
                (SAFETY * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            h *= (SAFETY * err.powf(-0.2)).clamp(0.2, 1.0).min(0.9);
        }
    }

    Ok(Trajectory {
        t_samples,
        y_samples,
        segments,
        rhs_evaluations: evals,
    })
}

/// Conventional automatic initial-step heuristic (explicit order-5 variant):
/// balance the size of the state against the size of the derivative, probe one
/// Euler step, and bound by the span.
fn initial_step<const N: usize>(
    call: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    span: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    let sc = |y: f64| abs_tol + rel_tol * y.abs();
    let d0 = (y0.iter().map(|&v| (v / sc(v)).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d1 = (f0
        .iter()
        .zip(y0)
        .map(|(&f, &v)| (f / sc(v)).powi(2))
        .sum::<f64>()
        / N as f64)
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);

    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = call(t0 + h0, &y1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(y0)
        .map(|((&a, &b), &v)| ((a - b) / sc(v)).powi(2))
        .sum::<f64>()
        / N as f64)
        .sqrt()
        / h0;

    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    h1.min(100.0 * h0).min(span)
}
