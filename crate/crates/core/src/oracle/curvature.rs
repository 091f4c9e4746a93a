//! The curvature operations themselves: everything is a finite-difference
//! composition over [`MetricField::components`], with the index convention
//!
//! ```text
//! R^i_{jkl} = d_k Gam^i_{lj} - d_l Gam^i_{kj}
//!           + Gam^i_{km} Gam^m_{lj} - Gam^i_{lm} Gam^m_{kj},
//! Ric_{jl}  = R^k_{jkl},
//! ```
//!
//! fixed so the unit sphere has positive scalar curvature.

use nalgebra::DMatrix;

use super::{
    cylinder_metric, MetricField, Tensor3, Tensor4, TensorComponents, Variance, FD_OUTER_STEP,
    FD_STEP,
};
use crate::error::{Error, Result};

/// Ratio between the outer (derivative-of-Ricci) and inner stencil steps.
const OUTER_RATIO: f64 = FD_OUTER_STEP / FD_STEP;

fn shifted(p: &[f64], axis: usize, delta: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[axis] += delta;
    q
}

/// 4th-order central first derivative from the four off-center samples
/// `f(-2h), f(-h), f(+h), f(+2h)`.
fn d1(m2: f64, m1: f64, p1: f64, p2: f64, h: f64) -> f64 {
    (m2 - p2 + 8.0 * (p1 - m1)) / (12.0 * h)
}

/// 4th-order central second derivative (needs the center value too).
fn d2(m2: f64, m1: f64, c: f64, p1: f64, p2: f64, h: f64) -> f64 {
    (-m2 - p2 + 16.0 * (m1 + p1) - 30.0 * c) / (12.0 * h * h)
}

/// First derivatives of the metric components along every axis:
/// `out[k][(i, j)] = d_k g_ij`.
fn metric_first_derivs(m: &MetricField, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    let d = m.dim();
    let mut out = Vec::with_capacity(d);
    for axis in 0..d {
        let h = m.fd_step()[axis];
        let gm2 = m.components(&shifted(p, axis, -2.0 * h))?;
        let gm1 = m.components(&shifted(p, axis, -h))?;
        let gp1 = m.components(&shifted(p, axis, h))?;
        let gp2 = m.components(&shifted(p, axis, 2.0 * h))?;
        out.push((gm2 - gp2 + 8.0 * (gp1 - gm1)) / (12.0 * h));
    }
    Ok(out)
}

/// Metric, inverse, and Christoffel symbols `Gam^i_{jk}` at `p`.
fn gamma_at(m: &MetricField, p: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>, Tensor3)> {
    let (g, ginv) = m.components_and_inverse(p)?;
    let dg = metric_first_derivs(m, p)?;
    let d = m.dim();
    let mut gamma = Tensor3::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in j..d {
                let mut s = 0.0;
                for l in 0..d {
                    s += ginv[(i, l)] * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
                }
                let v = 0.5 * s;
                gamma.set(i, j, k, v);
                gamma.set(i, k, j, v);
            }
        }
    }
    Ok((g, ginv, gamma))
}

/// Riemann tensor `R^i_{jkl}` at `p`, plus the ingredients computed on the
/// way (metric, inverse, Christoffel).
fn riemann_up_at(
    m: &MetricField,
    p: &[f64],
) -> Result<(DMatrix<f64>, DMatrix<f64>, Tensor3, Tensor4)> {
    let (g, ginv, gamma) = gamma_at(m, p)?;
    let d = m.dim();
    let mut dgamma = Vec::with_capacity(d);
    for axis in 0..d {
        let h = m.fd_step()[axis];
        let (_, _, gm2) = gamma_at(m, &shifted(p, axis, -2.0 * h))?;
        let (_, _, gm1) = gamma_at(m, &shifted(p, axis, -h))?;
        let (_, _, gp1) = gamma_at(m, &shifted(p, axis, h))?;
        let (_, _, gp2) = gamma_at(m, &shifted(p, axis, 2.0 * h))?;
        let vals: Vec<f64> = gm2
            .values()
            .iter()
            .zip(gm1.values())
            .zip(gp1.values())
            .zip(gp2.values())
            .map(|(((&a, &b), &c), &e)| d1(a, b, c, e, h))
            .collect();
        dgamma.push(Tensor3::from_values(d, vals));
    }
    let mut riem = Tensor4::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut v = dgamma[k].get(i, l, j) - dgamma[l].get(i, k, j);
                    for w in 0..d {
                        v += gamma.get(i, k, w) * gamma.get(w, l, j)
                            - gamma.get(i, l, w) * gamma.get(w, k, j);
                    }
                    riem.set(i, j, k, l, v);
                }
            }
        }
    }
    Ok((g, ginv, gamma, riem))
}

fn ricci_from_riemann(riem: &Tensor4) -> DMatrix<f64> {
    let d = riem.dim();
    let mut ric = DMatrix::zeros(d, d);
    for j in 0..d {
        for l in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                s += riem.get(k, j, k, l);
            }
            ric[(j, l)] = s;
        }
    }
    ric
}

fn ricci_matrix_at(m: &MetricField, p: &[f64]) -> Result<DMatrix<f64>> {
    let (_, _, _, riem) = riemann_up_at(m, p)?;
    Ok(ricci_from_riemann(&riem))
}

fn matrix_components(mat: &DMatrix<f64>, p: &[f64]) -> TensorComponents {
    let d = mat.nrows();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            v.push(mat[(i, j)]);
        }
    }
    TensorComponents::new(d, vec![Variance::Lower; 2], v, p)
}

/// Christoffel symbols `Gam^i_{jk}` of the Levi-Civita connection.
pub fn christoffel(m: &MetricField, p: &[f64]) -> Result<TensorComponents> {
    m.ensure_interior(p, 2.0)?;
    let (_, _, gamma) = gamma_at(m, p)?;
    Ok(gamma.into_components([Variance::Upper, Variance::Lower, Variance::Lower], p))
}

/// Riemann curvature `R^i_{jkl}`.
pub fn riemann(m: &MetricField, p: &[f64]) -> Result<TensorComponents> {
    m.ensure_interior(p, 4.0)?;
    let (_, _, _, riem) = riemann_up_at(m, p)?;
    Ok(riem.into_components(
        [
            Variance::Upper,
            Variance::Lower,
            Variance::Lower,
            Variance::Lower,
        ],
        p,
    ))
}

/// Ricci tensor `R_jl = R^k_{jkl}`.
pub fn ricci(m: &MetricField, p: &[f64]) -> Result<TensorComponents> {
    m.ensure_interior(p, 4.0)?;
    Ok(matrix_components(&ricci_matrix_at(m, p)?, p))
}

/// Scalar curvature `g^{jl} R_jl`.
pub fn scalar_curvature(m: &MetricField, p: &[f64]) -> Result<f64> {
    m.ensure_interior(p, 4.0)?;
    let (_, ginv, _, riem) = riemann_up_at(m, p)?;
    let ric = ricci_from_riemann(&riem);
    Ok((ginv * ric).trace())
}

/// The covariant derivative of Ricci and the pieces needed to contract it.
fn dricci_at(m: &MetricField, p: &[f64]) -> Result<(DMatrix<f64>, Tensor3)> {
    let d = m.dim();
    let (_, ginv, gamma) = gamma_at(m, p)?;
    let ric = ricci_matrix_at(m, p)?;
    let mut dric = Tensor3::zeros(d);
    for axis in 0..d {
        // Ricci values already carry stencil noise; differentiating them
        // wants the coarser outer step.
        let hh = m.fd_step()[axis] * OUTER_RATIO;
        let rm2 = ricci_matrix_at(m, &shifted(p, axis, -2.0 * hh))?;
        let rm1 = ricci_matrix_at(m, &shifted(p, axis, -hh))?;
        let rp1 = ricci_matrix_at(m, &shifted(p, axis, hh))?;
        let rp2 = ricci_matrix_at(m, &shifted(p, axis, 2.0 * hh))?;
        for i in 0..d {
            for j in 0..d {
                let partial = d1(rm2[(i, j)], rm1[(i, j)], rp1[(i, j)], rp2[(i, j)], hh);
                let mut v = partial;
                for l in 0..d {
                    v -= gamma.get(l, axis, i) * ric[(l, j)];
                    v -= gamma.get(l, axis, j) * ric[(i, l)];
                }
                dric.set(axis, i, j, v);
            }
        }
    }
    Ok((ginv, dric))
}

/// Clearance (in inner-step units) needed by the nested Ricci-derivative
/// stencils.
fn dricci_clearance() -> f64 {
    2.0 * OUTER_RATIO + 4.0
}

/// Covariant derivative of the Ricci tensor, `D_k R_ij`.
pub fn ricci_covariant_derivative(m: &MetricField, p: &[f64]) -> Result<TensorComponents> {
    m.ensure_interior(p, dricci_clearance())?;
    let (_, dric) = dricci_at(m, p)?;
    Ok(dric.into_components([Variance::Lower, Variance::Lower, Variance::Lower], p))
}

/// Codazzi residual `max_{k,i,j} |D_k R_ij - D_i R_kj|`: zero exactly when
/// the curvature is harmonic.
pub fn codazzi_residual(m: &MetricField, p: &[f64]) -> Result<f64> {
    m.ensure_interior(p, dricci_clearance())?;
    let (_, dric) = dricci_at(m, p)?;
    let d = m.dim();
    let mut worst = 0.0f64;
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((dric.get(k, i, j) - dric.get(i, k, j)).abs());
            }
        }
    }
    Ok(worst)
}

/// Invariant norm `sqrt(g^{ka} g^{ib} g^{jc} D_k R_ij D_a R_bc)` of the
/// covariant derivative of Ricci.
pub fn dricci_norm(m: &MetricField, p: &[f64]) -> Result<f64> {
    m.ensure_interior(p, dricci_clearance())?;
    let (ginv, dric) = dricci_at(m, p)?;
    let d = m.dim();
    // Contract one index at a time.
    let mut up1 = Tensor3::zeros(d); // ^k_ij
    for a in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += ginv[(a, k)] * dric.get(k, i, j);
                }
                up1.set(a, i, j, s);
            }
        }
    }
    let mut sq = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let mut up = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        up += ginv[(b, i)] * ginv[(c, j)] * dric.get(a, i, j);
                    }
                }
                sq += up * up1.get(a, b, c);
            }
        }
    }
    Ok(sq.max(0.0).sqrt())
}

/// Weyl tensor with all indices lowered, via the orthogonal decomposition
/// `W = Rm - P (kn) g` with the Schouten tensor
/// `P = (Ric - R g / (2(d-1))) / (d-2)` and `(kn)` the Kulkarni–Nomizu
/// product. Identically zero in dimension 3, by construction.
pub fn weyl(m: &MetricField, p: &[f64]) -> Result<TensorComponents> {
    let d = m.dim();
    let variance = [
        Variance::Lower,
        Variance::Lower,
        Variance::Lower,
        Variance::Lower,
    ];
    if d == 3 {
        m.ensure_interior(p, 0.0)?;
        return Ok(Tensor4::zeros(d).into_components(variance, p));
    }
    m.ensure_interior(p, 4.0)?;
    let (g, ginv, _, riem_up) = riemann_up_at(m, p)?;
    let ric = ricci_from_riemann(&riem_up);
    let scal = (&ginv * &ric).trace();

    // Lower the first index.
    let mut low = Tensor4::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut s = 0.0;
                    for w in 0..d {
                        s += g[(i, w)] * riem_up.get(w, j, k, l);
                    }
                    low.set(i, j, k, l, s);
                }
            }
        }
    }

    let dd = d as f64;
    let mut schouten = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            schouten[(i, j)] = (ric[(i, j)] - scal * g[(i, j)] / (2.0 * (dd - 1.0))) / (dd - 2.0);
        }
    }

    let mut w = Tensor4::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let kn = schouten[(i, k)] * g[(j, l)] + schouten[(j, l)] * g[(i, k)]
                        - schouten[(i, l)] * g[(j, k)]
                        - schouten[(j, k)] * g[(i, l)];
                    w.set(i, j, k, l, low.get(i, j, k, l) - kn);
                }
            }
        }
    }
    Ok(w.into_components(variance, p))
}

/// Laplace–Beltrami operator of `m` applied to a scalar function at `p`:
/// `g^{ij} (d_i d_j f - Gam^k_{ij} d_k f)`, all derivatives by 4th-order
/// stencils. Positive on functions curving upward (so on the unit round
/// sphere, `lap cos(theta_1) = -(d-1) cos(theta_1)`).
pub fn laplace_beltrami(
    m: &MetricField,
    f: impl Fn(&[f64]) -> f64,
    p: &[f64],
) -> Result<f64> {
    m.ensure_interior(p, 2.0)?;
    let d = m.dim();
    let (_, ginv, gamma) = gamma_at(m, p)?;

    let eval_d1 = |q: &[f64], axis: usize| {
        let h = m.fd_step()[axis];
        d1(
            f(&shifted(q, axis, -2.0 * h)),
            f(&shifted(q, axis, -h)),
            f(&shifted(q, axis, h)),
            f(&shifted(q, axis, 2.0 * h)),
            h,
        )
    };

    let grad: Vec<f64> = (0..d).map(|k| eval_d1(p, k)).collect();
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        let hi = m.fd_step()[i];
        for j in i..d {
            let v = if i == j {
                d2(
                    f(&shifted(p, i, -2.0 * hi)),
                    f(&shifted(p, i, -hi)),
                    f(p),
                    f(&shifted(p, i, hi)),
                    f(&shifted(p, i, 2.0 * hi)),
                    hi,
                )
            } else {
                d1(
                    eval_d1(&shifted(p, i, -2.0 * hi), j),
                    eval_d1(&shifted(p, i, -hi), j),
                    eval_d1(&shifted(p, i, hi), j),
                    eval_d1(&shifted(p, i, 2.0 * hi), j),
                    hi,
                )
            };
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }

    let mut lap = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut corr = 0.0;
            for k in 0..d {
                corr += gamma.get(k, i, j) * grad[k];
            }
            lap += ginv[(i, j)] * (hess[(i, j)] - corr);
        }
    }
    Ok(lap)
}

/// Residual of the constant-scalar-curvature equation for a conformal factor
/// `u` on the product cylinder of dimension `n`:
///
/// ```text
/// -(4(n-1)/(n-2)) lap u + (n-1)(n-2) u - n(n-1) u^((n+2)/(n-2)),
/// ```
///
/// with `lap` the Laplace–Beltrami operator of `dt^2 + dxi^2` as computed by
/// [`laplace_beltrami`]. The sign of the Laplacian term is pinned by the
/// requirement that the verified periodic factors (which make the conformal
/// metric's scalar curvature equal `n(n-1)`) give a vanishing residual.
pub fn yamabe_pde_residual(
    n: u32,
    u: impl Fn(&[f64]) -> f64,
    p: &[f64],
) -> Result<f64> {
    let m = cylinder_metric(n, 1.0)?;
    let value = u(p);
    if !(value > 0.0) {
        return Err(Error::NonPositiveFactor {
            t: p[0],
            value,
        });
    }
    let lap = laplace_beltrami(&m, u, p)?;
    let nf = f64::from(n);
    Ok(-(4.0 * (nf - 1.0) / (nf - 2.0)) * lap + (nf - 1.0) * (nf - 2.0) * value
        - nf * (nf - 1.0) * value.powf((nf + 2.0) / (nf - 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{conformal_metric, CoordInterval};

    fn euclidean(d: usize) -> MetricField {
        MetricField::new(
            d,
            vec![CoordInterval::Unbounded; d],
            vec![FD_STEP; d],
            move |_p| DMatrix::identity(d, d),
        )
        .unwrap()
    }

    /// A smooth factor that is NOT a solution of anything — just a test
    /// function of t.
    fn wavy(t: f64) -> f64 {
        1.0 + 0.3 * t.sin()
    }

    fn wavy_metric(n: u32) -> MetricField {
        let base = cylinder_metric(n, 2.0 * std::f64::consts::PI).unwrap();
        let expo = 4.0 / (f64::from(n) - 2.0);
        conformal_metric(&base, |p: &[f64]| wavy(p[0]), expo).unwrap()
    }

    #[test]
    fn flat_metric_has_no_curvature() {
        let m = euclidean(3);
        let p = [0.1, -0.4, 2.0];
        assert!(christoffel(&m, &p).unwrap().max_abs() < 1e-12);
        assert!(riemann(&m, &p).unwrap().max_abs() < 1e-12);
        assert!(ricci(&m, &p).unwrap().max_abs() < 1e-12);
        assert!(scalar_curvature(&m, &p).unwrap().abs() < 1e-12);
        assert!(ricci_covariant_derivative(&m, &p).unwrap().max_abs() < 1e-12);
        assert!(codazzi_residual(&m, &p).unwrap() < 1e-12);
        assert!(weyl(&m, &p).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn cylinder_christoffel_matches_spherical_coordinates() {
        let m = cylinder_metric(4, 5.0).unwrap();
        let p = [0.5, 1.1, 1.9, 0.7];
        let gam = christoffel(&m, &p).unwrap();
        // Flat circle direction: every t-component vanishes.
        let d = 4;
        for j in 0..d {
            for k in 0..d {
                assert!(gam.get(&[0, j, k]).abs() < 1e-10, "Gam^0_{j}{k}");
                assert!(gam.get(&[j, 0, k]).abs() < 1e-10, "Gam^{j}_0{k}");
            }
        }
        // Sphere block: Gam^th1_{th2 th2} = -sin th1 cos th1,
        // Gam^th2_{th1 th2} = cot th1.
        let th1 = p[1];
        assert!(
            (gam.get(&[1, 2, 2]) + th1.sin() * th1.cos()).abs() < 1e-9,
            "got {}",
            gam.get(&[1, 2, 2])
        );
        assert!(
            (gam.get(&[2, 1, 2]) - th1.cos() / th1.sin()).abs() < 1e-9,
            "got {}",
            gam.get(&[2, 1, 2])
        );
    }

    #[test]
    fn conformal_time_christoffel_matches_log_derivative() {
        // For g = u(t)^(4/(n-2)) (dt^2 + dxi^2):
        // Gam^0_00 = (2/(n-2)) u'/u.
        let n = 4u32;
        let m = wavy_metric(n);
        let p = [0.8, 1.2, 1.7, 0.5];
        let gam = christoffel(&m, &p).unwrap();
        let expected = (2.0 / (f64::from(n) - 2.0)) * 0.3 * p[0].cos() / wavy(p[0]);
        assert!(
            (gam.get(&[0, 0, 0]) - expected).abs() < 1e-7,
            "got {} want {expected}",
            gam.get(&[0, 0, 0])
        );
    }

    #[test]
    fn riemann_reproduces_the_unit_sphere_block() {
        // On dt^2 + dxi^2 the curvature lives purely in the sphere block,
        // where R^i_{jkl} = delta^i_k s_jl - delta^i_l s_jk (unit curvature).
        let m = cylinder_metric(4, 5.0).unwrap();
        let p = [1.0, 1.2, 1.8, 0.6];
        let riem = riemann(&m, &p).unwrap();
        let g = m.components(&p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let model = if i == 0 || j == 0 || k == 0 || l == 0 {
                            0.0
                        } else {
                            let dik = if i == k { g[(j, l)] } else { 0.0 };
                            let dil = if i == l { g[(j, k)] } else { 0.0 };
                            dik - dil
                        };
                        assert!(
                            (riem.get(&[i, j, k, l]) - model).abs() < 1e-7,
                            "R^{i}_{j}{k}{l}: got {} want {model}",
                            riem.get(&[i, j, k, l])
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn riemann_antisymmetry_and_first_bianchi() {
        for m in [cylinder_metric(4, 5.0).unwrap(), wavy_metric(4)] {
            let p = [0.7, 1.0, 2.0, 1.3];
            let riem = riemann(&m, &p).unwrap();
            let mut anti = 0.0f64;
            let mut bianchi = 0.0f64;
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            anti = anti
                                .max((riem.get(&[i, j, k, l]) + riem.get(&[i, j, l, k])).abs());
                            bianchi = bianchi.max(
                                (riem.get(&[i, j, k, l])
                                    + riem.get(&[i, k, l, j])
                                    + riem.get(&[i, l, j, k]))
                                .abs(),
                            );
                        }
                    }
                }
            }
            assert!(anti < 1e-13, "antisymmetry {anti}");
            assert!(bianchi < 1e-7, "first Bianchi {bianchi}");
        }
    }

    #[test]
    fn cylinder_ricci_is_the_sphere_einstein_block() {
        let m = cylinder_metric(4, 5.0).unwrap();
        let p = [2.0, 1.3, 1.0, 0.4];
        let ric = ricci(&m, &p).unwrap();
        let g = m.components(&p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                // Ric = (n-2) g on the sphere block (unit S^3 here), zero on
                // anything touching t.
                let model = if i == 0 || j == 0 { 0.0 } else { 2.0 * g[(i, j)] };
                assert!(
                    (ric.get(&[i, j]) - model).abs() < 1e-7,
                    "Ric_{i}{j}: got {} want {model}",
                    ric.get(&[i, j])
                );
                let asym = (ric.get(&[i, j]) - ric.get(&[j, i])).abs();
                assert!(asym < 1e-8, "Ricci asymmetry {asym}");
            }
        }
    }

    #[test]
    fn cylinder_scalar_curvature_is_that_of_the_sphere() {
        // (n-1)(n-2) for S^1 x S^(n-1).
        let m4 = cylinder_metric(4, 5.0).unwrap();
        let s4 = scalar_curvature(&m4, &[0.3, 1.2, 1.9, 2.8]).unwrap();
        assert!((s4 - 6.0).abs() < 1e-7, "n=4: {s4}");
        let m3 = cylinder_metric(3, 5.0).unwrap();
        let s3 = scalar_curvature(&m3, &[0.1, 0.9, 1.0]).unwrap();
        assert!((s3 - 2.0).abs() < 1e-7, "n=3: {s3}");
    }

    #[test]
    fn homothety_rescales_scalar_curvature() {
        let n = 4u32;
        let base = cylinder_metric(n, 5.0).unwrap();
        let expo = 4.0 / (f64::from(n) - 2.0);
        let c: f64 = 1.7;
        let scaled = conformal_metric(&base, move |_p| c, expo).unwrap();
        let p = [0.3, 1.2, 1.9, 2.8];
        let s0 = scalar_curvature(&base, &p).unwrap();
        let s1 = scalar_curvature(&scaled, &p).unwrap();
        assert!(
            (s1 - c.powf(-expo) * s0).abs() < 1e-7 * s0.abs(),
            "{s1} vs {}",
            c.powf(-expo) * s0
        );
    }

    #[test]
    fn cylinder_ricci_is_parallel() {
        let m = cylinder_metric(4, 5.0).unwrap();
        let p = [0.9, 1.4, 1.1, 2.0];
        assert!(ricci_covariant_derivative(&m, &p).unwrap().max_abs() < 1e-7);
        assert!(codazzi_residual(&m, &p).unwrap() < 1e-7);
        // The invariant norm aggregates all d^3 components, so its noise
        // floor sits a factor ~d^(3/2) above the component-wise one.
        assert!(dricci_norm(&m, &p).unwrap() < 1e-6);
    }

    #[test]
    fn weyl_vanishes_on_the_cylinder_and_in_dimension_three() {
        // S^1 x S^3 is conformally flat.
        let m4 = cylinder_metric(4, 5.0).unwrap();
        assert!(weyl(&m4, &[0.3, 1.2, 1.9, 2.8]).unwrap().max_abs() < 1e-7);
        // d = 3 returns the exact zero tensor even on curved input.
        let w3 = weyl(&wavy_metric(3), &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(w3.max_abs(), 0.0);
    }

    #[test]
    fn lowered_weyl_is_conformally_covariant() {
        // For ghat = u^(4/(n-2)) g, the all-lowered Weyl obeys
        // What = u^(4/(n-2)) W.
        let n = 4u32;
        let base = cylinder_metric(n, 2.0 * std::f64::consts::PI).unwrap();
        let m = wavy_metric(n);
        let p = [0.8, 1.1, 1.6, 2.3];
        let w0 = weyl(&base, &p).unwrap();
        let w1 = weyl(&m, &p).unwrap();
        let scale = wavy(p[0]).powf(4.0 / (f64::from(n) - 2.0));
        let mut worst = 0.0f64;
        for (a, b) in w1.values().iter().zip(w0.values()) {
            worst = worst.max((a - scale * b).abs());
        }
        assert!(worst < 1e-6, "conformal covariance residual {worst}");
    }

    #[test]
    fn laplacian_of_height_function_on_the_sphere_block() {
        // lap_{S^(n-1)} cos(theta_1) = -(n-1) cos(theta_1); the flat t-part
        // contributes nothing.
        let n = 4u32;
        let m = cylinder_metric(n, 5.0).unwrap();
        let p = [0.2, 1.0, 1.4, 2.0];
        let lap = laplace_beltrami(&m, |q: &[f64]| q[1].cos(), &p).unwrap();
        let expected = -(f64::from(n) - 1.0) * p[1].cos();
        assert!((lap - expected).abs() < 1e-8, "got {lap} want {expected}");
    }

    #[test]
    fn laplacian_sees_the_time_direction_too() {
        let m = cylinder_metric(3, 5.0).unwrap();
        let p = [0.7, 1.2, 0.4];
        // f = sin t is a pure t-mode: lap f = f'' = -sin t.
        let lap = laplace_beltrami(&m, |q: &[f64]| q[0].sin(), &p).unwrap();
        assert!((lap + p[0].sin()).abs() < 1e-9, "got {lap}");
    }

    #[test]
    fn unit_factor_residual_is_exactly_the_curvature_gap() {
        // u = 1: residual (n-1)(n-2) - n(n-1) = -2(n-1), with the stencil
        // terms exactly zero on a constant.
        for n in [3u32, 4, 5, 6] {
            let p: Vec<f64> = std::iter::once(0.4)
                .chain((1..n as usize).map(|_| 1.3))
                .collect();
            let r = yamabe_pde_residual(n, |_q: &[f64]| 1.0, &p).unwrap();
            assert_eq!(r, -2.0 * (f64::from(n) - 1.0), "n = {n}");
        }
    }

    #[test]
    fn constant_equilibrium_factor_balances_the_equation() {
        let sys = crate::fowler::FowlerSystem::new(4).unwrap();
        let u0 = sys.constant_solution();
        let p = [0.4, 1.3, 1.3, 1.3];
        let r = yamabe_pde_residual(4, move |_q: &[f64]| u0, &p).unwrap();
        assert!(r.abs() < 1e-8, "got {r}");
    }

    #[test]
    fn boundary_proximity_is_an_error() {
        let m = cylinder_metric(4, 5.0).unwrap();
        // theta_1 close to the pole: DRic stencils cannot fit.
        let p = [0.0, 0.02, 1.0, 1.0];
        assert!(matches!(
            ricci_covariant_derivative(&m, &p),
            Err(Error::OutsideChart { .. })
        ));
    }
}
