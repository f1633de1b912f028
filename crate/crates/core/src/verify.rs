//! Reference maps, error metrics and convergence studies.
//!
//! The ellipse, Cassini oval and circle have closed-form exterior maps; the
//! square is checked by self-convergence under corner refinement together
//! with its dihedral symmetry. Faber polynomials get an independent
//! contour-integral evaluation to cross-check the double-layer form.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{Curve, CurveDescriptor};
use crate::error::{MapError, Result};
use crate::operator::{cauchy_sum, near_boundary, require_inside, solve_density, Evaluation};
use crate::quadrature::{panel_mesh, refine_corners, trapezoid_mesh, QuadratureMesh};
use crate::recovery::{boundary_map, BoundaryMap};

/// Number of evaluation parameters used for the sup-norm error by default.
pub const DEFAULT_SAMPLES: usize = 36;

/// Closed-form `Ψ(p(t))` for the smooth built-in families.
///
/// For the Cassini oval `Ψ = (z² − 1)^{1/2}/a` with the square root followed
/// continuously in `t` from the positive value at `t = 0`: `z² − 1` runs once
/// around the circle of radius `a²` while `t` covers `[0, π)`, so half its
/// argument, taken in `[0, 2π)`, plus a sign flip on `[π, 2π)` gives the lift.
pub fn analytic_boundary_map(curve: &Curve, t: f64) -> Result<Complex64> {
    match curve.descriptor() {
        CurveDescriptor::Ellipse { .. } | CurveDescriptor::Circle { .. } => {
            Ok(Complex64::from_polar(1.0, t))
        }
        CurveDescriptor::Cassini { center, .. } => {
            let z = curve.point(t) - Complex64::new(center[0], center[1]);
            let t = t.rem_euclid(TAU);
            let half = t.rem_euclid(PI);
            let mut phi = (z * z - 1.0).arg();
            if half >= PI / 2.0 && phi < 0.0 {
                phi += TAU;
            }
            let w = Complex64::from_polar(1.0, phi / 2.0);
            Ok(if t >= PI { -w } else { w })
        }
        CurveDescriptor::Polygon { .. } => Err(MapError::NoAnalyticReference("polygon")),
    }
}

/// Closed-form `Ψ(z)` at an exterior point.
pub fn analytic_exterior(curve: &Curve, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    match *curve.descriptor() {
        CurveDescriptor::Ellipse { a, center } => {
            // z = c₁w + c₂/w with c₁ = (a+1)/2, c₂ = (a−1)/2.
            let z = z - Complex64::new(center[0], center[1]);
            let (c1, c2) = ((a + 1.0) / 2.0, (a - 1.0) / 2.0);
            Ok(z * (one + (one - 4.0 * c1 * c2 / (z * z)).sqrt()) / (2.0 * c1))
        }
        CurveDescriptor::Cassini { a, center } => {
            let z = z - Complex64::new(center[0], center[1]);
            Ok(z * (one - one / (z * z)).sqrt() / a)
        }
        CurveDescriptor::Circle { r, center } => Ok((z - Complex64::new(center[0], center[1])) / r),
        CurveDescriptor::Polygon { .. } => Err(MapError::NoAnalyticReference("polygon")),
    }
}

/// Exact `α₁` (reciprocal capacity) where known.
pub fn analytic_alpha1(curve: &Curve) -> Option<f64> {
    match *curve.descriptor() {
        CurveDescriptor::Ellipse { a, .. } => Some(2.0 / (a + 1.0)),
        CurveDescriptor::Cassini { a, .. } => Some(1.0 / a),
        CurveDescriptor::Circle { r, .. } => Some(1.0 / r),
        CurveDescriptor::Polygon { .. } => None,
    }
}

/// Equispaced evaluation parameters. Curves with corners are sampled at the
/// midpoints of the equispaced cells so that no sample lands on a corner.
pub fn sample_parameters(curve: &Curve, count: usize) -> Vec<f64> {
    let offset = if curve.is_smooth() { 0.0 } else { 0.5 };
    (0..count)
        .map(|k| curve.period() * (k as f64 + offset) / count as f64)
        .collect()
}

/// `max_k |Ψ̃(p(t_k)) − Ψ(p(t_k))|` over equispaced parameters, with `Ψ̃`
/// from Nyström interpolation of the density.
pub fn boundary_error(map: &BoundaryMap, samples: usize) -> Result<f64> {
    let curve = map.mesh().curve();
    let mut worst = 0.0f64;
    for t in sample_parameters(curve, samples) {
        let exact = analytic_boundary_map(curve, t)?;
        worst = worst.max((map.psi_at(t)? - exact).norm());
    }
    Ok(worst)
}

/// `P_m(z₀) = (1/2πi) ∮ Ψ(z)^m / (z − z₀) dz` for `z₀` inside the curve.
pub fn faber_oracle(map: &BoundaryMap, m: u32, z0: Complex64) -> Result<Evaluation> {
    let mesh = map.mesh();
    require_inside(mesh, z0)?;
    let value = cauchy_sum(mesh, |j| map.psi[j].powu(m), z0);
    Ok(Evaluation {
        value,
        near_boundary: near_boundary(mesh, z0),
    })
}

fn centered_square_vertices(curve: &Curve) -> Option<Vec<Complex64>> {
    let CurveDescriptor::Polygon { vertices } = curve.descriptor() else {
        return None;
    };
    if vertices.len() != 4 {
        return None;
    }
    let s = vertices[0][0].abs();
    let ok = s > 0.0 && vertices.iter().all(|v| v[0].abs() == s && v[1].abs() == s);
    let distinct = (0..4).all(|i| (i + 1..4).all(|j| vertices[i] != vertices[j]));
    (ok && distinct).then(|| {
        vertices
            .iter()
            .map(|v| Complex64::new(v[0], v[1]))
            .collect()
    })
}

/// Deviation of a computed square map from its dihedral symmetry.
///
/// Two checks, the larger is returned:
/// * corner images: both one-sided limits of `θ` at each corner, extrapolated
///   from the Gauss nodes of the adjacent panel, against the corner's own
///   argument, which is one of `π/4, 3π/4, 5π/4, 7π/4`;
/// * quarter turns: `θ(t + β/4) = θ(t) + π/2` at every node.
pub fn square_corner_symmetry(map: &BoundaryMap) -> Result<f64> {
    let mesh = map.mesh();
    let curve = mesh.curve();
    let vertices = centered_square_vertices(curve).ok_or_else(|| {
        MapError::InvalidParameter(
            "symmetry check needs an origin-centered axis-aligned square".into(),
        )
    })?;
    let nodes = mesh.nodes();
    let n = nodes.len();
    let beta = curve.period();
    let q = match mesh.gauss_order() {
        Some(q) if mesh.panels().len() * q == n => q,
        _ => return Err(MapError::WrongMeshKind { expected: "panel" }),
    };

    let mut worst = 0.0f64;
    for (&c, v) in curve.corners().iter().zip(&vertices) {
        let dir = v.conj() / v.norm();
        let tol = 1e-12 * beta;
        let ending = mesh
            .panels()
            .iter()
            .position(|p| (p.end - c).abs() < tol || (c == 0.0 && (p.end - beta).abs() < tol));
        let starting = mesh.panels().iter().position(|p| (p.start - c).abs() < tol);
        let (Some(ending), Some(starting)) = (ending, starting) else {
            return Err(MapError::InvalidMesh(
                "corner is not a panel endpoint".into(),
            ));
        };
        for (k, target) in [(ending, mesh.panels()[ending].end), (starting, c)] {
            let range = k * q..(k + 1) * q;
            let ts = &nodes[range.clone()];
            let offsets: Vec<f64> = map.psi[range]
                .iter()
                .map(|&psi| (psi * dir).arg())
                .collect();
            worst = worst.max(lagrange_at(ts, &offsets, target).abs());
        }
    }

    if !n.is_multiple_of(4) {
        return Err(MapError::InvalidMesh(
            "square mesh is not invariant under quarter turns".into(),
        ));
    }
    let shift = n / 4;
    let quarter = Complex64::new(0.0, -1.0);
    for j in 0..n {
        let k = (j + shift) % n;
        let gap = (nodes[k] - nodes[j] - beta / 4.0).rem_euclid(beta);
        if gap.min(beta - gap) > 1e-12 * beta {
            return Err(MapError::InvalidMesh(
                "square mesh is not invariant under quarter turns".into(),
            ));
        }
        worst = worst.max((map.psi[k] * map.psi[j].conj() * quarter).arg().abs());
    }
    Ok(worst)
}

fn lagrange_at(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut total = 0.0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                basis *= (x - xj) / (xi - xj);
            }
        }
        total += basis * yi;
    }
    total
}

/// How a convergence study discretizes the curve.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sweep {
    /// One trapezoid mesh per listed node count.
    Trapezoid { n_values: Vec<usize> },
    /// Panel mesh refined at the corners `0..=max_level` times.
    CornerRefinement {
        panels_per_side: usize,
        gauss_order: usize,
        max_level: usize,
    },
}

/// What the sup errors are measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    Analytic,
    /// The finest row of the same study.
    SelfConvergence,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    /// Number of quadrature nodes.
    pub n: usize,
    /// Corner refinement level for panel sweeps.
    pub level: Option<usize>,
    pub sup_error: Option<f64>,
    pub alpha1: Option<f64>,
    pub alpha1_error: Option<f64>,
    pub condition_estimate: Option<f64>,
    pub residual_norm: Option<f64>,
    pub symmetry_deviation: Option<f64>,
    pub runtime_seconds: f64,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub curve: CurveDescriptor,
    pub sweep: Sweep,
    pub reference: Reference,
    pub sample_count: usize,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| r.failure.is_some())
    }
}

struct RowOutcome {
    n: usize,
    level: Option<usize>,
    runtime: f64,
    result: Result<RowData>,
}

struct RowData {
    samples: Vec<Complex64>,
    alpha1: f64,
    condition: f64,
    residual: f64,
    symmetry: Option<f64>,
}

fn run_row(mesh: &QuadratureMesh, params: &[f64], with_symmetry: bool) -> Result<RowData> {
    let sol = solve_density(mesh)?;
    let map = boundary_map(&sol)?;
    let samples = params
        .iter()
        .map(|&t| map.psi_at(t))
        .collect::<Result<Vec<_>>>()?;
    let symmetry = if with_symmetry {
        Some(square_corner_symmetry(&map)?)
    } else {
        None
    };
    Ok(RowData {
        samples,
        alpha1: map.alpha1,
        condition: sol.condition_estimate,
        residual: sol.residual_norm,
        symmetry,
    })
}

/// Solve, recover and measure the map on a sequence of discretizations.
///
/// Rows run on at most `jobs` worker threads. Failing rows are recorded with
/// their error message. Without a closed-form map the errors are measured
/// against the finest successful row.
pub fn convergence_study(
    curve: &Curve,
    sweep: &Sweep,
    samples: usize,
    jobs: usize,
) -> Result<ConvergenceReport> {
    let meshes: Vec<(Option<usize>, Result<QuadratureMesh>)> = match sweep {
        Sweep::Trapezoid { n_values } => {
            let mut ns = n_values.clone();
            ns.sort_unstable();
            ns.dedup();
            ns.into_iter()
                .map(|n| (None, trapezoid_mesh(curve, n)))
                .collect()
        }
        Sweep::CornerRefinement {
            panels_per_side,
            gauss_order,
            max_level,
        } => {
            let mut mesh = panel_mesh(curve, *panels_per_side, *gauss_order)?;
            let mut out = Vec::with_capacity(max_level + 1);
            for level in 0..=*max_level {
                if level > 0 {
                    mesh = refine_corners(&mesh)?;
                }
                out.push((Some(level), Ok(mesh.clone())));
            }
            out
        }
    };

    let params = sample_parameters(curve, samples);
    let with_symmetry = centered_square_vertices(curve).is_some();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let outcomes: Vec<RowOutcome> = pool.install(|| {
        meshes
            .into_par_iter()
            .map(|(level, mesh)| {
                let start = Instant::now();
                let n = mesh.as_ref().map(|m| m.len()).unwrap_or(0);
                let result = mesh.and_then(|m| run_row(&m, &params, with_symmetry));
                RowOutcome {
                    n,
                    level,
                    runtime: start.elapsed().as_secs_f64(),
                    result,
                }
            })
            .collect()
    });

    let exact_alpha1 = analytic_alpha1(curve);
    let analytic: Option<Vec<Complex64>> = params
        .iter()
        .map(|&t| analytic_boundary_map(curve, t).ok())
        .collect();
    let (reference, ref_samples, ref_alpha1) = match analytic {
        Some(values) => (Reference::Analytic, Some(values), exact_alpha1),
        None => {
            let finest = outcomes.iter().rev().find_map(|o| o.result.as_ref().ok());
            (
                Reference::SelfConvergence,
                finest.map(|d| d.samples.clone()),
                finest.map(|d| d.alpha1),
            )
        }
    };

    let rows = outcomes
        .into_iter()
        .map(|o| match o.result {
            Ok(d) => ConvergenceRow {
                n: o.n,
                level: o.level,
                sup_error: ref_samples.as_ref().map(|r| {
                    r.iter()
                        .zip(&d.samples)
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max)
                }),
                alpha1: Some(d.alpha1),
                alpha1_error: ref_alpha1.map(|a| (a - d.alpha1).abs()),
                condition_estimate: Some(d.condition),
                residual_norm: Some(d.residual),
                symmetry_deviation: d.symmetry,
                runtime_seconds: o.runtime,
                failure: None,
            },
            Err(e) => ConvergenceRow {
                n: o.n,
                level: o.level,
                sup_error: None,
                alpha1: None,
                alpha1_error: None,
                condition_estimate: None,
                residual_norm: None,
                symmetry_deviation: None,
                runtime_seconds: o.runtime,
                failure: Some(e.to_string()),
            },
        })
        .collect();

    Ok(ConvergenceReport {
        curve: curve.descriptor().clone(),
        sweep: sweep.clone(),
        reference,
        sample_count: samples,
        rows,
    })
}

/// Powers of two from 4 up to `n_max`, the row set of the smooth-curve tables.
pub fn doubling_list(n_max: usize) -> Vec<usize> {
    std::iter::successors(Some(4usize), |n| Some(n * 2))
        .take_while(|&n| n <= n_max)
        .collect()
}
