//! The Neumann kernel, the Nyström system for the boundary density, and
//! Nyström interpolation.
//!
//! The discretized equation at node `i` reads
//!
//! ```text
//! φ(t_i) − Σ_j w_j k(t_i, t_j) φ(t_j) = −2 p(t_i)
//! ```
//!
//! with the real kernel `k(t, τ) = (1/π) Im[p'(τ) / (p(t) − p(τ))]` and its
//! continuous diagonal `−(1/2π) Im[p''(t) / p'(t)]`. On a circle the kernel is
//! the constant `−1/(2π)`.

use std::f64::consts::{PI, TAU};

use faer::prelude::*;
use faer::Mat;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::curve::{Curve, CurvePoint};
use crate::error::{MapError, Result};
use crate::quadrature::{MeshKind, QuadratureMesh};

/// Right-hand side factor: the system is solved with data `RHS_SCALE · p(t_i)`.
pub const RHS_SCALE: f64 = -2.0;

/// Condition estimates above this are reported as a failed solve.
pub const MAX_CONDITION: f64 = 1e12;

/// Nodes closer than this fraction of the period to an evaluation parameter
/// use the diagonal kernel value.
const COINCIDENT: f64 = 1e-13;

/// Target distances below this many local node spacings are flagged.
pub const NEAR_BOUNDARY_SPACINGS: f64 = 5.0;

#[inline]
pub(crate) fn kernel_offdiag(target: Complex64, source: &CurvePoint) -> f64 {
    (source.dp / (target - source.p)).im / PI
}

#[inline]
pub(crate) fn kernel_diag(pt: &CurvePoint) -> f64 {
    -(pt.ddp / pt.dp).im / TAU
}

#[inline]
fn kernel_dt_offdiag(target: &CurvePoint, source: &CurvePoint) -> f64 {
    let d = target.p - source.p;
    -(source.dp * target.dp / (d * d)).im / PI
}

/// Periodic distance between two parameters.
fn param_gap(curve: &Curve, t: f64, tau: f64) -> f64 {
    let d = (curve.wrap(t) - curve.wrap(tau)).abs();
    d.min(curve.period() - d)
}

/// `k(t, τ)`; the diagonal is used when `t ≡ τ` modulo the period.
pub fn neumann_kernel(curve: &Curve, t: f64, tau: f64) -> Result<f64> {
    if curve.is_corner(t, 0.0) {
        return Err(MapError::CornerParameter(t));
    }
    if curve.is_corner(tau, 0.0) {
        return Err(MapError::CornerParameter(tau));
    }
    let (a, b) = (curve.eval(t), curve.eval(tau));
    if param_gap(curve, t, tau) == 0.0 {
        return Ok(kernel_diag(&a));
    }
    let d = a.p - b.p;
    if d.norm() <= 1e-15 * (1.0 + a.p.norm()) {
        return Err(MapError::Singular { t, tau });
    }
    Ok(kernel_offdiag(a.p, &b))
}

/// Dense Nyström matrix `A_ij = δ_ij − w_j k(t_i, t_j)`.
pub fn assemble(mesh: &QuadratureMesh) -> Mat<f64> {
    let pts = mesh.points();
    let w = mesh.weights();
    Mat::from_fn(mesh.len(), mesh.len(), |i, j| {
        if i == j {
            1.0 - w[j] * kernel_diag(&pts[j])
        } else {
            -w[j] * kernel_offdiag(pts[i].p, &pts[j])
        }
    })
}

/// Complex boundary density at the mesh nodes.
#[derive(Clone, Debug)]
pub struct DensitySolution {
    pub mesh: QuadratureMesh,
    pub phi: Vec<Complex64>,
    /// `‖A x − b‖∞` over both real solves.
    pub residual_norm: f64,
    /// Estimate of the 1-norm condition number of `A`.
    pub condition_estimate: f64,
}

/// Factor `A` once and solve for the real and imaginary parts of the density.
pub fn solve_density(mesh: &QuadratureMesh) -> Result<DensitySolution> {
    let n = mesh.len();
    let a = assemble(mesh);
    let rhs = Mat::from_fn(n, 2, |i, c| {
        let p = mesh.points()[i].p * RHS_SCALE;
        if c == 0 {
            p.re
        } else {
            p.im
        }
    });
    let lu = a.partial_piv_lu();
    let x = lu.solve(&rhs);

    let condition_estimate = norm1(&a)
        * inverse_norm1_estimate(n, |v, transpose| {
            let b = Mat::from_fn(n, 1, |i, _| v[i]);
            let y = if transpose {
                lu.solve_transpose(&b)
            } else {
                lu.solve(&b)
            };
            (0..n).map(|i| y[(i, 0)]).collect()
        });

    let residual = &a * &x - &rhs;
    let mut residual_norm = 0.0f64;
    for c in 0..2 {
        for i in 0..n {
            residual_norm = residual_norm.max(residual[(i, c)].abs());
        }
    }
    let phi: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(x[(i, 0)], x[(i, 1)]))
        .collect();
    if !condition_estimate.is_finite()
        || condition_estimate > MAX_CONDITION
        || phi.iter().any(|v| !v.is_finite())
    {
        return Err(MapError::IllConditioned(condition_estimate));
    }
    Ok(DensitySolution {
        mesh: mesh.clone(),
        phi,
        residual_norm,
        condition_estimate,
    })
}

fn norm1(a: &Mat<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Hager's estimate of `‖A⁻¹‖₁` using solves with `A` and `Aᵀ`.
fn inverse_norm1_estimate(n: usize, solve: impl Fn(&[f64], bool) -> Vec<f64>) -> f64 {
    let mut x = vec![1.0 / n as f64; n];
    let mut estimate = 0.0;
    for _ in 0..5 {
        let y = solve(&x, false);
        estimate = y.iter().map(|v| v.abs()).sum::<f64>();
        let xi: Vec<f64> = y
            .iter()
            .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
            .collect();
        let z = solve(&xi, true);
        let (jmax, zmax) = z
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (j, &v)| {
                if v.abs() > b.1 {
                    (j, v.abs())
                } else {
                    b
                }
            });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zmax <= ztx {
            break;
        }
        x = vec![0.0; n];
        x[jmax] = 1.0;
    }
    estimate
}

impl DensitySolution {
    pub fn curve(&self) -> &Curve {
        self.mesh.curve()
    }
}

/// Nyström interpolant `φ(t) = −2p(t) + Σ_j w_j k(t, t_j) φ_j`.
///
/// At a node this reproduces the solved value up to the linear residual.
pub fn interpolate_density(sol: &DensitySolution, t: f64) -> Result<Complex64> {
    let curve = sol.curve();
    if curve.is_corner(t, 0.0) {
        return Err(MapError::CornerParameter(t));
    }
    let target = curve.eval(t);
    let tol = COINCIDENT * curve.period();
    let mesh = &sol.mesh;
    let mut acc = target.p * RHS_SCALE;
    for ((pt, &w), (&tj, &phi)) in mesh
        .points()
        .iter()
        .zip(mesh.weights())
        .zip(mesh.nodes().iter().zip(&sol.phi))
    {
        let k = if param_gap(curve, t, tj) <= tol {
            kernel_diag(pt)
        } else {
            kernel_offdiag(target.p, pt)
        };
        acc += phi * (w * k);
    }
    Ok(acc)
}

/// Derivative of the Nyström interpolant in the parameter.
///
/// Off the nodes the interpolation formula is differentiated term by term;
/// at a node the termwise derivative is singular, so the periodic nodal
/// sequence is differentiated spectrally instead. Trapezoid meshes only.
pub fn interpolate_density_derivative(sol: &DensitySolution, t: f64) -> Result<Complex64> {
    let mesh = &sol.mesh;
    if mesh.kind() != MeshKind::Trapezoid {
        return Err(MapError::WrongMeshKind {
            expected: "trapezoid",
        });
    }
    let curve = sol.curve();
    let tol = COINCIDENT * curve.period();
    if let Some(i) = mesh
        .nodes()
        .iter()
        .position(|&tj| param_gap(curve, t, tj) <= tol)
    {
        return Ok(spectral_derivative(&sol.phi, curve.period())[i]);
    }
    let target = curve.eval(t);
    let mut acc = target.dp * RHS_SCALE;
    for ((pt, &w), &phi) in mesh.points().iter().zip(mesh.weights()).zip(&sol.phi) {
        acc += phi * (w * kernel_dt_offdiag(&target, pt));
    }
    Ok(acc)
}

/// Derivative of a periodic sequence sampled at `n` equispaced points over
/// one period, by discrete Fourier differentiation. The Nyquist mode of an
/// even-length sequence is dropped.
pub fn spectral_derivative(values: &[Complex64], period: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = values.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = TAU / period / n as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = if 2 * k < n {
            k as f64
        } else if 2 * k == n {
            0.0
        } else {
            k as f64 - n as f64
        };
        *c *= Complex64::new(0.0, freq * scale);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

/// A value computed by naive quadrature, with a flag set when the target
/// is within [`NEAR_BOUNDARY_SPACINGS`] local node spacings of the curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub near_boundary: bool,
}

pub(crate) fn near_boundary(mesh: &QuadratureMesh, z: Complex64) -> bool {
    let (j, dist) = mesh.nearest_node(z);
    dist < NEAR_BOUNDARY_SPACINGS * mesh.arc_weight(j)
}

pub(crate) fn require_inside(mesh: &QuadratureMesh, z: Complex64) -> Result<()> {
    if mesh.winding_number(z) > 0.5 {
        Ok(())
    } else {
        Err(MapError::Domain(
            format!("{z}"),
            "expected a point inside the curve",
        ))
    }
}

pub(crate) fn require_outside(mesh: &QuadratureMesh, z: Complex64) -> Result<()> {
    if mesh.winding_number(z) < 0.5 {
        Ok(())
    } else {
        Err(MapError::Domain(
            format!("{z}"),
            "expected a point outside the curve",
        ))
    }
}

/// Cauchy sum `(1/2πi) Σ_j w_j f_j p'_j / (p_j − z)`.
pub(crate) fn cauchy_sum(
    mesh: &QuadratureMesh,
    f: impl Fn(usize) -> Complex64,
    z: Complex64,
) -> Complex64 {
    let s: Complex64 = mesh
        .points()
        .iter()
        .zip(mesh.weights())
        .enumerate()
        .map(|(j, (pt, &w))| f(j) * pt.dp * w / (pt.p - z))
        .sum();
    s / Complex64::new(0.0, TAU)
}

/// Double-layer potential `Dφ(x)` at an interior point. A complex density is
/// treated componentwise: `D(a + ib) = Da + i Db` with
/// `Da(x) = −Re[(1/2πi) ∫ a(y)/(y − x) dy]`.
pub fn apply_dlp(mesh: &QuadratureMesh, density: &[Complex64], x: Complex64) -> Result<Evaluation> {
    if density.len() != mesh.len() {
        return Err(MapError::LengthMismatch {
            expected: mesh.len(),
            got: density.len(),
        });
    }
    require_inside(mesh, x)?;
    let re = -cauchy_sum(mesh, |j| Complex64::new(density[j].re, 0.0), x).re;
    let im = -cauchy_sum(mesh, |j| Complex64::new(density[j].im, 0.0), x).re;
    Ok(Evaluation {
        value: Complex64::new(re, im),
        near_boundary: near_boundary(mesh, x),
    })
}
