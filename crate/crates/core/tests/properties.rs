use std::f64::consts::TAU;

use extmap::{
    apply_dlp, boundary_map, gauss_legendre, integrate, interpolate_density, panel_mesh,
    refine_corners, solve_density, trapezoid_mesh, Complex64, Curve,
};
use proptest::prelude::*;

fn smooth_curve() -> impl Strategy<Value = Curve> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|r| Curve::circle(r).unwrap()),
        (1.05f64..6.0).prop_map(|a| Curve::ellipse(a).unwrap()),
        (1.1f64..5.0).prop_map(|a| Curve::cassini(a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curves_are_periodic_and_differentiable(curve in smooth_curve(), t in 0.0f64..TAU) {
        let beta = curve.period();
        prop_assert!((curve.point(t + beta) - curve.point(t)).norm() < 1e-12);
        let h = 1e-5;
        let fd = (curve.point(t + h) - curve.point(t - h)) / (2.0 * h);
        let pt = curve.eval(t);
        prop_assert!((fd - pt.dp).norm() < 1e-7 * (1.0 + pt.dp.norm()));
        let fd2 = (curve.eval(t + h).dp - curve.eval(t - h).dp) / (2.0 * h);
        prop_assert!((fd2 - pt.ddp).norm() < 1e-6 * (1.0 + pt.ddp.norm()));
    }

    #[test]
    fn trapezoid_integrates_trig_polynomials(k in 1usize..7, n in 16usize..40, phase in 0.0f64..TAU) {
        let mesh = trapezoid_mesh(&Curve::circle(1.0).unwrap(), n).unwrap();
        let f: Vec<Complex64> = mesh.nodes().iter().map(|&t| Complex64::from_polar(1.0, k as f64 * t + phase)).collect();
        prop_assert!(integrate(&mesh, &f).unwrap().norm() < 1e-12);
    }

    #[test]
    fn gauss_is_exact_to_degree(q in 1usize..20, deg_frac in 0.0f64..1.0) {
        let deg = ((2 * q - 1) as f64 * deg_frac) as i32;
        let (x, w) = gauss_legendre(q);
        let quad: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
        let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
        prop_assert!((quad - exact).abs() < 1e-13);
    }

    #[test]
    fn dlp_is_linear(curve in smooth_curve(), s in 0.1f64..0.4, u in 0.0f64..TAU, alpha in -3.0f64..3.0) {
        let mesh = trapezoid_mesh(&curve, 64).unwrap();
        let f: Vec<Complex64> = mesh.nodes().iter().map(|&t| Complex64::new(t.cos(), (2.0 * t).sin())).collect();
        let g: Vec<Complex64> = mesh.nodes().iter().map(|&t| Complex64::new((3.0 * t).sin(), 1.0)).collect();
        let mix: Vec<Complex64> = f.iter().zip(&g).map(|(a, b)| alpha * a + b).collect();
        let z = curve.point(u) * s;
        let lhs = apply_dlp(&mesh, &mix, z).unwrap().value;
        let rhs = alpha * apply_dlp(&mesh, &f, z).unwrap().value + apply_dlp(&mesh, &g, z).unwrap().value;
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn boundary_map_is_unimodular_and_monotone(curve in smooth_curve()) {
        let mesh = trapezoid_mesh(&curve, 128).unwrap();
        let sol = solve_density(&mesh).unwrap();
        let map = boundary_map(&sol).unwrap();
        prop_assert!(map.psi.iter().all(|p| (p.norm() - 1.0).abs() < 1e-14));
        prop_assert!(map.theta.windows(2).all(|w| w[1] > w[0]));
        prop_assert!((map.total_increase() - TAU).abs() < 1e-8);
        prop_assert!(map.alpha1 > 0.0);
    }

    #[test]
    fn interpolant_reproduces_nodes(curve in smooth_curve(), j in 0usize..48) {
        let mesh = trapezoid_mesh(&curve, 48).unwrap();
        let sol = solve_density(&mesh).unwrap();
        let t = mesh.nodes()[j];
        let v = interpolate_density(&sol, t).unwrap();
        prop_assert!((v - sol.phi[j]).norm() < 1e-13 * (1.0 + sol.phi[j].norm()));
    }

    #[test]
    fn dilation_scales_capacity(r in 0.3f64..4.0) {
        // Scaling the square by r divides the leading map coefficient by r.
        let alpha1 = |h: f64| {
            let square = Curve::polygon(&[[-h, -h], [h, -h], [h, h], [-h, h]]).unwrap();
            let mesh = refine_corners(&panel_mesh(&square, 4, 8).unwrap()).unwrap();
            boundary_map(&solve_density(&mesh).unwrap()).unwrap().alpha1
        };
        let unit = alpha1(0.5);
        prop_assert!((alpha1(0.5 * r) * r - unit).abs() < 1e-12 * unit);
    }
}
