//! Quadrature discretizations of a curve.
//!
//! Smooth curves use the periodic trapezoid rule, which converges
//! geometrically for analytic integrands. Curves with corners use composite
//! Gauss–Legendre panels whose breakpoints include every corner; panels
//! touching a corner can be halved repeatedly with [`refine_corners`].

use num_complex::Complex64;
use serde::Serialize;

use crate::curve::{Curve, CurvePoint};
use crate::error::{MapError, Result};

/// Nodes and weights of the `q`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in increasing order.
///
/// Roots of `P_q` are found by Newton iteration from the usual cosine guess.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                dp = legendre_with_derivative(q, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(q: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Trapezoid,
    Panel,
}

/// Parameter interval `[start, end]` carrying one Gauss rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Panel {
    pub start: f64,
    pub end: f64,
}

impl Panel {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

/// One discretization of a curve: nodes in increasing parameter order,
/// positive weights, and the curve data cached at every node.
#[derive(Clone, Debug)]
pub struct QuadratureMesh {
    curve: Curve,
    kind: MeshKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    points: Vec<CurvePoint>,
    panels: Vec<Panel>,
    gauss_order: Option<usize>,
    refinement_level: usize,
}

impl QuadratureMesh {
    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn kind(&self) -> MeshKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    /// Empty for trapezoid meshes.
    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn gauss_order(&self) -> Option<usize> {
        self.gauss_order
    }

    pub fn refinement_level(&self) -> usize {
        self.refinement_level
    }

    /// Arc-length weight `w_j |p'(t_j)|` of node `j`; roughly the node spacing.
    pub fn arc_weight(&self, j: usize) -> f64 {
        self.weights[j] * self.points[j].dp.norm()
    }

    /// Σ w_j |p'(t_j)|, the discrete curve length.
    pub fn length(&self) -> f64 {
        (0..self.len()).map(|j| self.arc_weight(j)).sum()
    }

    /// Index of the node nearest to `z` and its distance.
    pub fn nearest_node(&self, z: Complex64) -> (usize, f64) {
        self.points
            .iter()
            .enumerate()
            .map(|(j, pt)| (j, (pt.p - z).norm()))
            .fold(
                (0, f64::INFINITY),
                |best, cur| if cur.1 < best.1 { cur } else { best },
            )
    }

    /// Discrete Cauchy-integral winding number `(1/2πi) Σ w_j p'_j / (p_j − z)`.
    pub fn winding_number(&self, z: Complex64) -> f64 {
        let s: Complex64 = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(pt, &w)| pt.dp * w / (pt.p - z))
            .sum();
        (s / Complex64::new(0.0, std::f64::consts::TAU)).re
    }

    fn from_panels(curve: &Curve, panels: Vec<Panel>, q: usize, refinement_level: usize) -> Self {
        let (x, w) = gauss_legendre(q);
        let mut nodes = Vec::with_capacity(panels.len() * q);
        let mut weights = Vec::with_capacity(panels.len() * q);
        for panel in &panels {
            let mid = 0.5 * (panel.start + panel.end);
            let half = 0.5 * panel.len();
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        let points = nodes.iter().map(|&t| curve.eval(t)).collect();
        QuadratureMesh {
            curve: curve.clone(),
            kind: MeshKind::Panel,
            nodes,
            weights,
            points,
            panels,
            gauss_order: Some(q),
            refinement_level,
        }
    }
}

/// `n` equispaced nodes `t_j = jβ/n` with equal weights `β/n`.
pub fn trapezoid_mesh(curve: &Curve, n: usize) -> Result<QuadratureMesh> {
    if !curve.is_smooth() {
        return Err(MapError::InvalidMesh(
            "trapezoid rule needs a curve without corners".into(),
        ));
    }
    if n < 4 {
        return Err(MapError::InvalidMesh(format!(
            "need at least 4 nodes, got {n}"
        )));
    }
    let beta = curve.period();
    let nodes: Vec<f64> = (0..n).map(|j| beta * j as f64 / n as f64).collect();
    let points = nodes.iter().map(|&t| curve.eval(t)).collect();
    Ok(QuadratureMesh {
        curve: curve.clone(),
        kind: MeshKind::Trapezoid,
        nodes,
        weights: vec![beta / n as f64; n],
        points,
        panels: Vec::new(),
        gauss_order: None,
        refinement_level: 0,
    })
}

/// Splits every side (the stretch between consecutive corners, or the whole
/// period for smooth curves) into `panels_per_side` equal panels carrying a
/// `q`-point Gauss rule.
pub fn panel_mesh(curve: &Curve, panels_per_side: usize, q: usize) -> Result<QuadratureMesh> {
    if q < 2 {
        return Err(MapError::InvalidMesh(format!(
            "gauss order must be at least 2, got {q}"
        )));
    }
    if panels_per_side == 0 {
        return Err(MapError::InvalidMesh(
            "need at least one panel per side".into(),
        ));
    }
    let beta = curve.period();
    let mut breaks: Vec<f64> = if curve.is_smooth() {
        vec![0.0]
    } else {
        curve.corners().to_vec()
    };
    if breaks[0] != 0.0 {
        breaks.insert(0, 0.0);
    }
    breaks.push(beta);
    let mut panels = Vec::with_capacity((breaks.len() - 1) * panels_per_side);
    for side in breaks.windows(2) {
        let (a, b) = (side[0], side[1]);
        for k in 0..panels_per_side {
            let start = if k == 0 {
                a
            } else {
                a + (b - a) * k as f64 / panels_per_side as f64
            };
            let end = if k + 1 == panels_per_side {
                b
            } else {
                a + (b - a) * (k + 1) as f64 / panels_per_side as f64
            };
            panels.push(Panel { start, end });
        }
    }
    Ok(QuadratureMesh::from_panels(curve, panels, q, 0))
}

/// Halves every panel whose closure contains a corner parameter. The corner
/// at `t = 0` also touches the last panel, which ends at the period.
pub fn refine_corners(mesh: &QuadratureMesh) -> Result<QuadratureMesh> {
    let q = match (mesh.kind, mesh.gauss_order) {
        (MeshKind::Panel, Some(q)) => q,
        _ => return Err(MapError::WrongMeshKind { expected: "panel" }),
    };
    let curve = &mesh.curve;
    let beta = curve.period();
    let touches = |x: f64| {
        curve
            .corners()
            .iter()
            .any(|&c| x == c || (c == 0.0 && x == beta))
    };
    let mut panels = Vec::with_capacity(mesh.panels.len() + 2 * curve.corners().len());
    for panel in &mesh.panels {
        if touches(panel.start) || touches(panel.end) {
            let mid = 0.5 * (panel.start + panel.end);
            panels.push(Panel {
                start: panel.start,
                end: mid,
            });
            panels.push(Panel {
                start: mid,
                end: panel.end,
            });
        } else {
            panels.push(*panel);
        }
    }
    Ok(QuadratureMesh::from_panels(
        curve,
        panels,
        q,
        mesh.refinement_level + 1,
    ))
}

/// `Σ_j w_j f_j` in the parameter variable. Multiply by `p'` beforehand to
/// integrate against `dz`.
pub fn integrate(mesh: &QuadratureMesh, f: &[Complex64]) -> Result<Complex64> {
    if f.len() != mesh.len() {
        return Err(MapError::LengthMismatch {
            expected: mesh.len(),
            got: f.len(),
        });
    }
    Ok(f.iter().zip(&mesh.weights).map(|(v, &w)| v * w).sum())
}
