//! Bracketed scalar root finding.
//!
//! [`find_root`] is Brent's method: inverse-quadratic/secant steps guarded by
//! bisection, so convergence is guaranteed on any valid sign-change bracket
//! and superlinear near simple roots. There is no grid scanning anywhere —
//! callers supply the bracket.

use crate::error::{Error, Result};

/// A sign-change bracket `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    /// Construct a bracket, rejecting unordered or non-finite endpoints.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::DegenerateBracket { lo, hi });
        }
        Ok(Bracket { lo, hi })
    }

    /// Bracket width.
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Find a root of `f` inside `bracket` to absolute x-tolerance `tol`.
///
/// Preconditions: `f(lo)` and `f(hi)` straddle zero (an endpoint that is
/// exactly zero is returned immediately). The returned abscissa lies within a
/// final bracket of width at most `tol` plus a few ulps of the local scale.
pub fn find_root(f: impl Fn(f64) -> f64, bracket: Bracket, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid_parameter(
            "root tolerance must be positive".to_string(),
        ));
    }
    let mut a = bracket.lo;
    let mut b = bracket.hi;
    let mut fa = f(a);
    let mut fb = f(b);

    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidBracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    // Classic Brent bookkeeping: b is the best iterate, a the previous one,
    // c the last iterate with f(c) of opposite sign to f(b).
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            // Ensure b remains the best approximation.
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Attempt inverse quadratic interpolation (secant if a == c).
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                // Interpolation accepted.
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b);
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    // 200 iterations of a bisection-guarded method shrink any f64 bracket to
    // machine resolution; reaching this point means f is misbehaving (NaNs).
    Err(Error::invalid_parameter(
        "root iteration failed to converge (non-finite function values?)".to_string(),
    ))
}

/// [`find_root`] for functions that can fail.
///
/// The first evaluation error aborts the search and is returned as-is, so
/// callers embedding quadratures or integrations inside the objective get the
/// real failure instead of a NaN-driven non-convergence.
pub fn find_root_fallible(
    f: impl Fn(f64) -> Result<f64>,
    bracket: Bracket,
    tol: f64,
) -> Result<f64> {
    use std::cell::RefCell;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let wrapped = |x: f64| -> f64 {
        if failure.borrow().is_some() {
            return f64::NAN;
        }
        match f(x) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                f64::NAN
            }
        }
    };
    let result = find_root(wrapped, bracket, tol);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    result
}
