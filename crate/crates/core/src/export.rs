//! CSV and JSON writers.
//!
//! Every float is written with 17 significant digits so that files round-trip
//! exactly; data files carry no timestamps.

use std::fmt::Write as _;

use faer::Mat;
use serde_json::{json, Value};

use crate::operator::DensitySolution;
use crate::quadrature::QuadratureMesh;
use crate::recovery::BoundaryMap;
use crate::verify::ConvergenceReport;

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn mesh_summary_json(mesh: &QuadratureMesh) -> Value {
    json!({
        "curve": mesh.curve().descriptor(),
        "kind": mesh.kind(),
        "n": mesh.len(),
        "refinement_level": mesh.refinement_level(),
        "gauss_order": mesh.gauss_order(),
        "panels": mesh.panels().iter().map(|p| [p.start, p.end]).collect::<Vec<_>>(),
    })
}

/// Columns `t, w, re_p, im_p`.
pub fn mesh_nodes_csv(mesh: &QuadratureMesh) -> String {
    let mut out = String::from("t,w,re_p,im_p\n");
    for ((t, w), pt) in mesh.nodes().iter().zip(mesh.weights()).zip(mesh.points()) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(*t),
            fmt_f64(*w),
            fmt_f64(pt.p.re),
            fmt_f64(pt.p.im)
        );
    }
    out
}

/// Row-major dump of a dense matrix.
pub fn matrix_csv(a: &Mat<f64>) -> String {
    let mut out = String::new();
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| fmt_f64(a[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Columns `t, re_phi, im_phi`.
pub fn density_csv(sol: &DensitySolution) -> String {
    let mut out = String::from("t,re_phi,im_phi\n");
    for (t, phi) in sol.mesh.nodes().iter().zip(&sol.phi) {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(*t),
            fmt_f64(phi.re),
            fmt_f64(phi.im)
        );
    }
    out
}

/// Columns `t, re_p, im_p, theta, re_psi, im_psi, theta_prime`; the last is
/// empty on panel meshes.
pub fn boundary_map_csv(map: &BoundaryMap) -> String {
    let mesh = map.mesh();
    let mut out = String::from("t,re_p,im_p,theta,re_psi,im_psi,theta_prime\n");
    for j in 0..mesh.len() {
        let p = mesh.points()[j].p;
        let tp = map.theta_prime.as_ref().map(|v| v[j]);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(mesh.nodes()[j]),
            fmt_f64(p.re),
            fmt_f64(p.im),
            fmt_f64(map.theta[j]),
            fmt_f64(map.psi[j].re),
            fmt_f64(map.psi[j].im),
            fmt_opt(tp),
        );
    }
    out
}

pub fn boundary_map_header(map: &BoundaryMap) -> Value {
    let mesh = map.mesh();
    json!({
        "curve": mesh.curve().descriptor(),
        "alpha1": map.alpha1,
        "alpha0": [map.alpha0.re, map.alpha0.im],
        "mean_correction": [map.mean_correction.re, map.mean_correction.im],
        "n": mesh.len(),
        "mesh_kind": mesh.kind(),
        "refinement_level": mesh.refinement_level(),
        "residual_norm": map.density.residual_norm,
        "condition_estimate": map.density.condition_estimate,
        "theta_prime_imag": map.theta_prime_imag,
    })
}

/// Header plus one object per node.
pub fn boundary_map_json(map: &BoundaryMap) -> Value {
    let mesh = map.mesh();
    let rows: Vec<Value> = (0..mesh.len())
        .map(|j| {
            let p = mesh.points()[j].p;
            json!({
                "t": mesh.nodes()[j],
                "p": [p.re, p.im],
                "theta": map.theta[j],
                "psi": [map.psi[j].re, map.psi[j].im],
                "theta_prime": map.theta_prime.as_ref().map(|v| v[j]),
            })
        })
        .collect();
    json!({ "header": boundary_map_header(map), "rows": rows })
}

/// One line per row. Runtimes are left out so that identical runs produce
/// identical files; they live in the JSON form.
pub fn report_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from(
        "n,level,sup_error,alpha1,alpha1_error,condition_estimate,residual_norm,symmetry_deviation,failure\n",
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.level.map(|l| l.to_string()).unwrap_or_default(),
            fmt_opt(r.sup_error),
            fmt_opt(r.alpha1),
            fmt_opt(r.alpha1_error),
            fmt_opt(r.condition_estimate),
            fmt_opt(r.residual_norm),
            fmt_opt(r.symmetry_deviation),
            r.failure
                .as_deref()
                .map(|f| format!("\"{}\"", f.replace('"', "'")))
                .unwrap_or_default(),
        );
    }
    out
}

/// Reports as an error table: one column per curve,
/// one row per node count (or refinement level), `null` where a row is
/// missing or failed.
pub fn table_json(reports: &[ConvergenceReport]) -> Value {
    let key = |r: &crate::verify::ConvergenceRow| r.level.unwrap_or(r.n);
    let mut keys: Vec<usize> = reports
        .iter()
        .flat_map(|rep| rep.rows.iter().map(key))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let by_level = reports
        .iter()
        .any(|r| r.rows.iter().any(|row| row.level.is_some()));
    let rows: Vec<Value> = keys
        .iter()
        .map(|&k| {
            let values: Vec<Value> = reports
                .iter()
                .map(|rep| {
                    rep.rows
                        .iter()
                        .find(|r| key(r) == k)
                        .and_then(|r| r.sup_error)
                        .map_or(Value::Null, |e| json!(e))
                })
                .collect();
            json!({ (if by_level { "level" } else { "n" }): k, "errors": values })
        })
        .collect();
    json!({
        "columns": reports.iter().map(|r| r.curve.label()).collect::<Vec<_>>(),
        "rows": rows,
    })
}

pub fn report_json(report: &ConvergenceReport) -> Value {
    json!({ "report": report, "table": table_json(std::slice::from_ref(report)) })
}
