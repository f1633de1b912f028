//! Closed, positively oriented, piecewise-C² parametric curves.
//!
//! A [`Curve`] maps a parameter `t ∈ [0, period)` to a point of the plane,
//! identified with a complex number, together with its first two
//! derivatives. Smooth families (ellipse, Cassini oval, circle) are analytic
//! and 2π-periodic; polygons are parametrized by arc length with a corner at
//! every vertex.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MapError, Result};

/// Family tag plus parameters; this is the JSON form accepted on the command
/// line, e.g. `{"family":"ellipse","a":2.0}`.
///
/// Smooth families take an optional `center` that translates the curve. The
/// translated curve must still enclose the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveDescriptor {
    Ellipse {
        a: f64,
        #[serde(default, skip_serializing_if = "is_origin")]
        center: [f64; 2],
    },
    Cassini {
        a: f64,
        #[serde(default, skip_serializing_if = "is_origin")]
        center: [f64; 2],
    },
    Circle {
        r: f64,
        #[serde(default, skip_serializing_if = "is_origin")]
        center: [f64; 2],
    },
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
}

fn is_origin(c: &[f64; 2]) -> bool {
    c[0] == 0.0 && c[1] == 0.0
}

impl CurveDescriptor {
    pub fn family(&self) -> &'static str {
        match self {
            CurveDescriptor::Ellipse { .. } => "ellipse",
            CurveDescriptor::Cassini { .. } => "cassini",
            CurveDescriptor::Circle { .. } => "circle",
            CurveDescriptor::Polygon { .. } => "polygon",
        }
    }

    /// Short label such as `a=2` used for table columns.
    pub fn label(&self) -> String {
        match self {
            CurveDescriptor::Ellipse { a, .. } | CurveDescriptor::Cassini { a, .. } => {
                format!("a={a}")
            }
            CurveDescriptor::Circle { r, .. } => format!("r={r}"),
            CurveDescriptor::Polygon { vertices } => format!("{}-gon", vertices.len()),
        }
    }
}

/// Position and first two derivatives at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub p: Complex64,
    pub dp: Complex64,
    pub ddp: Complex64,
}

#[derive(Clone, Debug)]
struct Edge {
    start: Complex64,
    dir: Complex64,
    t0: f64,
}

#[derive(Clone, Debug)]
enum Shape {
    Ellipse { a: f64 },
    Cassini { a: f64 },
    Circle { r: f64 },
    Polygon { edges: Vec<Edge> },
}

/// An immutable parametric Jordan curve.
#[derive(Clone, Debug)]
pub struct Curve {
    descriptor: CurveDescriptor,
    shape: Shape,
    center: Complex64,
    period: f64,
    corners: Vec<f64>,
}

impl Curve {
    /// `p(t) = a cos t + i sin t`. `a = 1` is the unit circle.
    pub fn ellipse(a: f64) -> Result<Self> {
        Self::from_descriptor(&CurveDescriptor::Ellipse {
            a,
            center: [0.0, 0.0],
        })
    }

    /// `p(t) = (cos 2t + sqrt(a⁴ − sin² 2t))^{1/2} e^{it}`, the oval `|z² − 1| = a²`.
    pub fn cassini(a: f64) -> Result<Self> {
        Self::from_descriptor(&CurveDescriptor::Cassini {
            a,
            center: [0.0, 0.0],
        })
    }

    pub fn circle(r: f64) -> Result<Self> {
        Self::from_descriptor(&CurveDescriptor::Circle {
            r,
            center: [0.0, 0.0],
        })
    }

    /// Counterclockwise simple polygon enclosing the origin, parametrized by
    /// arc length starting at the first vertex.
    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        Self::from_descriptor(&CurveDescriptor::Polygon {
            vertices: vertices.to_vec(),
        })
    }

    /// Origin-centered axis-aligned square of side 1, starting at `(-1/2, -1/2)`.
    pub fn unit_square() -> Self {
        Self::polygon(&[[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])
            .expect("unit square is a valid polygon")
    }

    pub fn from_descriptor(descriptor: &CurveDescriptor) -> Result<Self> {
        let (shape, center, period, corners) = match descriptor {
            CurveDescriptor::Ellipse { a, center } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(MapError::InvalidParameter(format!(
                        "ellipse needs a > 0, got {a}"
                    )));
                }
                (
                    Shape::Ellipse { a: *a },
                    to_complex(*center),
                    TAU,
                    Vec::new(),
                )
            }
            CurveDescriptor::Cassini { a, center } => {
                if !(a.is_finite() && *a > 1.0) {
                    return Err(MapError::InvalidParameter(format!(
                        "cassini oval needs a > 1, got {a}"
                    )));
                }
                (
                    Shape::Cassini { a: *a },
                    to_complex(*center),
                    TAU,
                    Vec::new(),
                )
            }
            CurveDescriptor::Circle { r, center } => {
                if !(r.is_finite() && *r > 0.0) {
                    return Err(MapError::InvalidParameter(format!(
                        "circle needs r > 0, got {r}"
                    )));
                }
                (
                    Shape::Circle { r: *r },
                    to_complex(*center),
                    TAU,
                    Vec::new(),
                )
            }
            CurveDescriptor::Polygon { vertices } => {
                let vs: Vec<Complex64> = vertices.iter().map(|v| to_complex(*v)).collect();
                let edges = validate_polygon(&vs)?;
                let last = edges.last().expect("at least three edges");
                let period = last.t0 + (vs[0] - last.start).norm();
                let corners = edges.iter().map(|e| e.t0).collect();
                (
                    Shape::Polygon { edges },
                    Complex64::new(0.0, 0.0),
                    period,
                    corners,
                )
            }
        };
        if !center.re.is_finite() || !center.im.is_finite() {
            return Err(MapError::InvalidParameter("center must be finite".into()));
        }
        let curve = Curve {
            descriptor: descriptor.clone(),
            shape,
            center,
            period,
            corners,
        };
        if !matches!(curve.shape, Shape::Polygon { .. }) {
            let w = curve.winding_number(Complex64::new(0.0, 0.0), 2048);
            if (w - 1.0).abs() > 1e-6 || curve.distance_estimate(Complex64::new(0.0, 0.0)) < 1e-12 {
                return Err(MapError::OriginOutside);
            }
        }
        Ok(curve)
    }

    pub fn descriptor(&self) -> &CurveDescriptor {
        &self.descriptor
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Parameter values where `p'` jumps, sorted; empty for smooth curves.
    pub fn corners(&self) -> &[f64] {
        &self.corners
    }

    pub fn is_smooth(&self) -> bool {
        self.corners.is_empty()
    }

    /// Reduce `t` into `[0, period)`.
    pub fn wrap(&self, t: f64) -> f64 {
        let w = t.rem_euclid(self.period);
        if w >= self.period {
            0.0
        } else {
            w
        }
    }

    /// True when `t` is within `tol · period` of a corner, modulo the period.
    pub fn is_corner(&self, t: f64, tol: f64) -> bool {
        let t = self.wrap(t);
        let eps = tol * self.period;
        self.corners
            .iter()
            .any(|&c| (t - c).abs() <= eps || (self.period - (t - c).abs()) <= eps)
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        let mut pt = match &self.shape {
            Shape::Ellipse { a } => {
                let (s, c) = t.sin_cos();
                CurvePoint {
                    p: Complex64::new(a * c, s),
                    dp: Complex64::new(-a * s, c),
                    ddp: Complex64::new(-a * c, -s),
                }
            }
            Shape::Circle { r } => {
                let e = Complex64::from_polar(1.0, t);
                let i = Complex64::i();
                CurvePoint {
                    p: e * r,
                    dp: i * e * r,
                    ddp: -e * r,
                }
            }
            Shape::Cassini { a } => cassini_point(*a, t),
            Shape::Polygon { edges } => {
                let t = self.wrap(t);
                let k = edges.partition_point(|e| e.t0 <= t).saturating_sub(1);
                let e = &edges[k];
                CurvePoint {
                    p: e.start + e.dir * (t - e.t0),
                    dp: e.dir,
                    ddp: Complex64::new(0.0, 0.0),
                }
            }
        };
        pt.p += self.center;
        pt
    }

    pub fn point(&self, t: f64) -> Complex64 {
        self.eval(t).p
    }

    /// Winding number of the curve about `z` by discrete argument summation
    /// over `samples` equispaced parameters (plus every corner).
    pub fn winding_number(&self, z: Complex64, samples: usize) -> f64 {
        let mut ts: Vec<f64> = (0..samples)
            .map(|k| self.period * k as f64 / samples as f64)
            .collect();
        ts.extend_from_slice(&self.corners);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let pts: Vec<Complex64> = ts.iter().map(|&t| self.point(t) - z).collect();
        let total: f64 = pts
            .iter()
            .zip(pts.iter().cycle().skip(1))
            .map(|(a, b)| (b / a).arg())
            .sum();
        total / TAU
    }

    fn distance_estimate(&self, z: Complex64) -> f64 {
        (0..2048)
            .map(|k| (self.point(self.period * k as f64 / 2048.0) - z).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

fn to_complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

// r(t)² = g(t) = cos 2t + sqrt(a⁴ − sin² 2t); p = r e^{it}.
fn cassini_point(a: f64, t: f64) -> CurvePoint {
    let (s, c) = (2.0 * t).sin_cos();
    let h = (a.powi(4) - s * s).sqrt();
    let g = c + h;
    let g1 = -2.0 * s - 2.0 * s * c / h;
    let g2 = -4.0 * c - 4.0 * (c * c - s * s) / h - 4.0 * s * s * c * c / h.powi(3);
    let r = g.sqrt();
    let r1 = g1 / (2.0 * r);
    let r2 = g2 / (2.0 * r) - g1 * g1 / (4.0 * r * g);
    let e = Complex64::from_polar(1.0, t);
    CurvePoint {
        p: e * r,
        dp: e * Complex64::new(r1, r),
        ddp: e * Complex64::new(r2 - r, 2.0 * r1),
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

fn segments_touch(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Complex64, b: Complex64, p: Complex64, d: f64| {
        d == 0.0
            && p.re >= a.re.min(b.re)
            && p.re <= a.re.max(b.re)
            && p.im >= a.im.min(b.im)
            && p.im <= a.im.max(b.im)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let s = (dot(z - a, ab) / ab.norm_sqr()).clamp(0.0, 1.0);
    (z - (a + ab * s)).norm()
}

fn validate_polygon(vs: &[Complex64]) -> Result<Vec<Edge>> {
    let n = vs.len();
    if n < 3 {
        return Err(MapError::InvalidParameter(format!(
            "polygon needs at least 3 vertices, got {n}"
        )));
    }
    if vs.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(MapError::InvalidParameter(
            "polygon vertices must be finite".into(),
        ));
    }
    let next = |k: usize| vs[(k + 1) % n];
    if let Some(k) = (0..n).find(|&k| next(k) == vs[k]) {
        return Err(MapError::InvalidParameter(format!(
            "edge {k} has zero length"
        )));
    }
    let area2: f64 = (0..n).map(|k| cross(vs[k], next(k))).sum();
    if area2 == 0.0 {
        return Err(MapError::InvalidParameter("polygon has zero area".into()));
    }
    if area2 < 0.0 {
        return Err(MapError::Orientation);
    }
    for k in 0..n {
        let incoming = vs[k] - vs[(k + n - 1) % n];
        let outgoing = next(k) - vs[k];
        if cross(incoming, outgoing) == 0.0 && dot(incoming, outgoing) < 0.0 {
            return Err(MapError::SelfIntersecting(format!("cusp at vertex {k}")));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if !adjacent && segments_touch(vs[i], next(i), vs[j], next(j)) {
                return Err(MapError::SelfIntersecting(format!(
                    "edges {i} and {j} intersect"
                )));
            }
        }
    }
    let origin = Complex64::new(0.0, 0.0);
    let on_boundary = (0..n).any(|k| point_segment_distance(origin, vs[k], next(k)) == 0.0);
    let winding: f64 = (0..n).map(|k| (next(k) / vs[k]).arg()).sum::<f64>() / TAU;
    if on_boundary || (winding - 1.0).abs() > 1e-9 {
        return Err(MapError::OriginOutside);
    }

    let mut t0 = 0.0;
    let mut edges = Vec::with_capacity(n);
    for k in 0..n {
        let d = next(k) - vs[k];
        let len = d.norm();
        edges.push(Edge {
            start: vs[k],
            dir: d / len,
            t0,
        });
        t0 += len;
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn ellipse_values() {
        let e = Curve::ellipse(2.0).unwrap();
        let pt = e.eval(0.0);
        assert!(close(pt.p, Complex64::new(2.0, 0.0), 1e-15));
        assert!(close(pt.dp, Complex64::new(0.0, 1.0), 1e-15));
        assert!(close(pt.ddp, Complex64::new(-2.0, 0.0), 1e-15));
        let q = e.point(PI / 4.0);
        assert!(close(
            q,
            Complex64::new(2f64.sqrt(), 2f64.sqrt() / 2.0),
            1e-15
        ));
        let c = Curve::ellipse(1.0).unwrap();
        assert!(close(c.point(PI / 2.0), Complex64::new(0.0, 1.0), 1e-15));
        assert!(Curve::ellipse(0.0).is_err());
        assert!(Curve::ellipse(-1.0).is_err());
    }

    #[test]
    fn cassini_values() {
        let c = Curve::cassini(2.0).unwrap();
        assert!(close(c.point(0.0), Complex64::new(5f64.sqrt(), 0.0), 1e-14));
        assert!(close(
            c.point(PI / 2.0),
            Complex64::new(0.0, 3f64.sqrt()),
            1e-14
        ));
        assert!(Curve::cassini(1.0).is_err());
        assert!(Curve::cassini(0.5).is_err());
    }

    #[test]
    fn cassini_derivatives_match_central_differences() {
        let c = Curve::cassini(1.25).unwrap();
        let t = 0.7;
        let h = 1e-5;
        let fd1 = (c.point(t + h) - c.point(t - h)) / (2.0 * h);
        let fd2 = (c.eval(t + h).dp - c.eval(t - h).dp) / (2.0 * h);
        assert!(
            close(c.eval(t).dp, fd1, 1e-8),
            "{} vs {}",
            c.eval(t).dp,
            fd1
        );
        assert!(close(c.eval(t).ddp, fd2, 1e-8));
    }

    #[test]
    fn cassini_lies_on_lemniscate_family() {
        let a = 1.25;
        let c = Curve::cassini(a).unwrap();
        for k in 0..50 {
            let z = c.point(0.123 * k as f64);
            assert!(((z * z - 1.0).norm() - a * a).abs() < 1e-13);
        }
    }

    #[test]
    fn circle_values() {
        let c = Curve::circle(1.0).unwrap();
        assert!(close(c.point(PI), Complex64::new(-1.0, 0.0), 1e-15));
        assert!(
            (Curve::circle(2.0)
                .unwrap()
                .winding_number(Complex64::new(0.0, 0.0), 256)
                - 1.0)
                .abs()
                < 1e-12
        );
        assert!(Curve::circle(0.5).unwrap().corners().is_empty());
        assert!(Curve::circle(0.0).is_err());
    }

    #[test]
    fn square_parametrization() {
        let sq = Curve::unit_square();
        assert!((sq.period() - 4.0).abs() < 1e-15);
        assert_eq!(sq.corners(), &[0.0, 1.0, 2.0, 3.0]);
        assert!(close(sq.point(0.5), Complex64::new(0.0, -0.5), 1e-15));
        assert!(close(sq.point(3.5), Complex64::new(-0.5, 0.0), 1e-15));
        assert!(close(sq.point(4.0), sq.point(0.0), 1e-15));
        assert_eq!(sq.eval(1.5).ddp, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn polygon_validation() {
        let tri = Curve::polygon(&[[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]).unwrap();
        assert!((tri.winding_number(Complex64::new(0.0, 0.0), 300) - 1.0).abs() < 1e-12);
        let cw = Curve::polygon(&[[-0.5, -0.5], [-0.5, 0.5], [0.5, 0.5], [0.5, -0.5]]);
        assert!(matches!(cw, Err(MapError::Orientation)));
        let shifted = Curve::polygon(&[[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0]]);
        assert!(matches!(shifted, Err(MapError::OriginOutside)));
        let bowtie = Curve::polygon(&[[-1.0, -1.0], [1.0, 1.0], [1.0, -1.0], [-1.0, 1.0]]);
        assert!(bowtie.is_err());
        let cusp = Curve::polygon(&[
            [-1.0, -1.0],
            [1.0, -1.0],
            [1.0, 1.0],
            [1.0, 0.0],
            [-1.0, 1.0],
        ]);
        assert!(matches!(cusp, Err(MapError::SelfIntersecting(_))));
    }

    #[test]
    fn off_center_curves_must_enclose_origin() {
        let ok = CurveDescriptor::Ellipse {
            a: 2.0,
            center: [1.0, 0.0],
        };
        assert!(Curve::from_descriptor(&ok).is_ok());
        let bad = CurveDescriptor::Circle {
            r: 1.0,
            center: [3.0, 0.0],
        };
        assert!(matches!(
            Curve::from_descriptor(&bad),
            Err(MapError::OriginOutside)
        ));
    }

    #[test]
    fn descriptor_json_forms() {
        let d: CurveDescriptor = serde_json::from_str(r#"{"family":"ellipse","a":2.0}"#).unwrap();
        assert_eq!(
            d,
            CurveDescriptor::Ellipse {
                a: 2.0,
                center: [0.0, 0.0]
            }
        );
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"family":"ellipse","a":2.0}"#
        );
        let p: CurveDescriptor =
            serde_json::from_str(r#"{"family":"polygon","vertices":[[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(p.family(), "polygon");
        assert!(serde_json::from_str::<CurveDescriptor>(r#"{"family":"spline"}"#).is_err());
    }
}
