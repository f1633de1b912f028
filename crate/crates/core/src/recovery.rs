//! From the solved density to the exterior map.
//!
//! The density satisfies `φ = −(2/α₁)(Ψ − α₀)` on the curve. Adding the mean
//! correction `c = (1/2πi)∮ φ(z)/z dz = −α₀/α₁` gives `φ̃ = −(2/α₁)Ψ`, from
//! which `Ψ = −φ̃/|φ̃|`, `α₁ = 2/|φ̃|` and `α₀ = −α₁ c` follow.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{MapError, Result};
use crate::operator::{
    apply_dlp, cauchy_sum, interpolate_density, near_boundary, require_outside,
    spectral_derivative, DensitySolution, Evaluation,
};
use crate::quadrature::{MeshKind, QuadratureMesh};

/// Largest principal angle step accepted between consecutive nodes when
/// unwrapping the boundary correspondence.
pub const MAX_THETA_STEP: f64 = 0.75 * PI;

/// Density moduli below this are treated as a failed solve.
const DEGENERATE_MODULUS: f64 = 1e-13;

/// Boundary values of the exterior map on one mesh.
#[derive(Clone, Debug)]
pub struct BoundaryMap {
    pub density: DensitySolution,
    pub mean_correction: Complex64,
    pub phi_tilde: Vec<Complex64>,
    /// `Ψ` at the nodes, unit modulus.
    pub psi: Vec<Complex64>,
    /// Continuous lift of `arg Ψ`; the first value lies in `[0, 2π)`.
    pub theta: Vec<f64>,
    /// `dθ/ds` with respect to arc length; trapezoid meshes only.
    pub theta_prime: Option<Vec<f64>>,
    /// Largest `|Im(−i φ̃'/φ̃)|` seen while forming `theta_prime`.
    pub theta_prime_imag: Option<f64>,
    pub alpha1: f64,
    pub alpha0: Complex64,
}

impl BoundaryMap {
    pub fn mesh(&self) -> &QuadratureMesh {
        &self.density.mesh
    }

    /// `θ_last − θ_first` plus the closing step back to the first node; 2π
    /// for a correctly resolved map.
    pub fn total_increase(&self) -> f64 {
        let n = self.psi.len();
        let closing = (self.psi[0] * self.psi[n - 1].conj()).arg();
        self.theta[n - 1] - self.theta[0] + closing
    }

    /// `(max − min) / mean` of `|φ̃_j|`; zero in exact arithmetic.
    pub fn modulus_spread(&self) -> f64 {
        let moduli: Vec<f64> = self.phi_tilde.iter().map(|v| v.norm()).collect();
        let max = moduli.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min) * moduli.len() as f64 / moduli.iter().sum::<f64>()
    }

    /// `φ̃` at an arbitrary non-corner parameter via Nyström interpolation.
    pub fn phi_tilde_at(&self, t: f64) -> Result<Complex64> {
        Ok(interpolate_density(&self.density, t)? + self.mean_correction)
    }

    /// `Ψ(p(t))` at an arbitrary non-corner parameter.
    pub fn psi_at(&self, t: f64) -> Result<Complex64> {
        let v = self.phi_tilde_at(t)?;
        if v.norm() < DEGENERATE_MODULUS {
            return Err(MapError::DegenerateDensity(v.norm()));
        }
        Ok(-v / v.norm())
    }
}

/// `c = (1/2πi) Σ_j w_j φ_j p'_j / p_j`.
pub fn mean_correction(sol: &DensitySolution) -> Complex64 {
    cauchy_sum(&sol.mesh, |j| sol.phi[j], Complex64::new(0.0, 0.0))
}

/// Shift, normalize and unwrap the density into boundary values of `Ψ`.
pub fn boundary_map(sol: &DensitySolution) -> Result<BoundaryMap> {
    let c = mean_correction(sol);
    let phi_tilde: Vec<Complex64> = sol.phi.iter().map(|v| v + c).collect();
    let moduli: Vec<f64> = phi_tilde.iter().map(|v| v.norm()).collect();
    let min = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
    if min.is_nan() || min < DEGENERATE_MODULUS {
        return Err(MapError::DegenerateDensity(min));
    }
    let psi: Vec<Complex64> = phi_tilde
        .iter()
        .zip(&moduli)
        .map(|(v, m)| -v / *m)
        .collect();
    let theta = unwrap_angles(&psi)?;
    let alpha1 = 2.0 * moduli.len() as f64 / moduli.iter().sum::<f64>();
    let alpha0 = -c * alpha1;

    let mut map = BoundaryMap {
        density: sol.clone(),
        mean_correction: c,
        phi_tilde,
        psi,
        theta,
        theta_prime: None,
        theta_prime_imag: None,
        alpha1,
        alpha0,
    };
    if map.mesh().kind() == MeshKind::Trapezoid {
        let (tp, imag) = theta_prime_parts(&map);
        map.theta_prime = Some(tp);
        map.theta_prime_imag = Some(imag);
    }
    Ok(map)
}

fn unwrap_angles(psi: &[Complex64]) -> Result<Vec<f64>> {
    let mut theta = Vec::with_capacity(psi.len());
    let mut current = psi[0].arg().rem_euclid(TAU);
    theta.push(current);
    for (j, pair) in psi.windows(2).enumerate() {
        let step = (pair[1] * pair[0].conj()).arg();
        if step.abs() > MAX_THETA_STEP {
            return Err(MapError::Resolution { node: j + 1, step });
        }
        current += step;
        theta.push(current);
    }
    Ok(theta)
}

fn theta_prime_parts(map: &BoundaryMap) -> (Vec<f64>, f64) {
    let mesh = map.mesh();
    let d = spectral_derivative(&map.phi_tilde, mesh.curve().period());
    let mut imag = 0.0f64;
    let tp = d
        .iter()
        .zip(&map.phi_tilde)
        .zip(mesh.points())
        .map(|((dv, v), pt)| {
            let q = Complex64::new(0.0, -1.0) * dv / v;
            imag = imag.max(q.im.abs());
            q.re / pt.dp.norm()
        })
        .collect();
    (tp, imag)
}

/// `dθ/ds` at the nodes by spectral differentiation of `φ̃`.
pub fn theta_prime(map: &BoundaryMap) -> Result<Vec<f64>> {
    if map.mesh().kind() != MeshKind::Trapezoid {
        return Err(MapError::WrongMeshKind {
            expected: "trapezoid",
        });
    }
    Ok(theta_prime_parts(map).0)
}

/// `Ψ(z₀) = α₁z₀ + α₀ − (1/2πi) ∮ Ψ(z)/(z − z₀) dz` for `z₀` outside the curve.
pub fn eval_exterior(map: &BoundaryMap, z0: Complex64) -> Result<Evaluation> {
    let mesh = map.mesh();
    require_outside(mesh, z0)?;
    let cauchy = cauchy_sum(mesh, |j| map.psi[j], z0);
    Ok(Evaluation {
        value: z0 * map.alpha1 + map.alpha0 - cauchy,
        near_boundary: near_boundary(mesh, z0),
    })
}

/// Faber polynomial `P_m(z₀)` as the double-layer potential
/// `−2D(cos mθ + i sin mθ)`; `P_0 = D(−1) = 1`.
pub fn faber_dlp(map: &BoundaryMap, m: u32, z0: Complex64) -> Result<Evaluation> {
    let mesh = map.mesh();
    if m == 0 {
        return apply_dlp(mesh, &vec![Complex64::new(-1.0, 0.0); mesh.len()], z0);
    }
    let density: Vec<Complex64> = map
        .theta
        .iter()
        .map(|&th| Complex64::from_polar(1.0, m as f64 * th))
        .collect();
    let e = apply_dlp(mesh, &density, z0)?;
    Ok(Evaluation {
        value: e.value * -2.0,
        ..e
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Curve, CurveDescriptor};
    use crate::operator::solve_density;
    use crate::quadrature::trapezoid_mesh;

    fn map_for(curve: &Curve, n: usize) -> BoundaryMap {
        boundary_map(&solve_density(&trapezoid_mesh(curve, n).unwrap()).unwrap()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_map_is_scaling() {
        for r in [0.5, 1.0, 2.0] {
            let map = map_for(&Curve::circle(r).unwrap(), 16);
            assert!(map.mean_correction.norm() < 1e-13);
            assert!((map.alpha1 - 1.0 / r).abs() < 1e-12);
            assert!(map.alpha0.norm() < 1e-12);
            for (th, t) in map.theta.iter().zip(map.mesh().nodes()) {
                assert!((th - t).abs() < 1e-13);
            }
            for tp in map.theta_prime.as_ref().unwrap() {
                assert!((tp - 1.0 / r).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn ellipse_coefficients() {
        let map = map_for(&Curve::ellipse(2.0).unwrap(), 64);
        assert!(map.mean_correction.norm() < 1e-12);
        assert!((map.alpha1 - 2.0 / 3.0).abs() < 1e-10);
        assert!(map.alpha0.norm() < 1e-10);
        assert!(map.theta.windows(2).all(|p| p[1] > p[0]));
        assert!((map.total_increase() - TAU).abs() < 1e-8);
        assert!(map.psi.iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn cassini_capacity() {
        let map = map_for(&Curve::cassini(2.0).unwrap(), 64);
        assert!((map.alpha1 - 0.5).abs() < 1e-10);
    }

    #[test]
    fn translation_shows_up_in_alpha0() {
        let shift = c(1.0, 0.0);
        let curve = Curve::from_descriptor(&CurveDescriptor::Ellipse {
            a: 2.0,
            center: [1.0, 0.0],
        })
        .unwrap();
        let map = map_for(&curve, 64);
        assert!(map.mean_correction.norm() > 0.1);
        // Ψ(z) = Ψ₀(z − s) gives α₀ = −α₁ s, so the shift is −α₀/α₁ = c.
        assert!((map.mean_correction - shift).norm() < 1e-8);
        assert!((-map.alpha0 / map.alpha1 - shift).norm() < 1e-8);
    }

    #[test]
    fn theta_prime_integrates_to_two_pi() {
        let map = map_for(&Curve::ellipse(2.0).unwrap(), 64);
        let tp = map.theta_prime.as_ref().unwrap();
        let mesh = map.mesh();
        let total: f64 = (0..mesh.len()).map(|j| tp[j] * mesh.arc_weight(j)).sum();
        assert!((total - TAU).abs() < 1e-10);
        assert!(tp.iter().all(|&v| v > 0.0));
        assert!(map.theta_prime_imag.unwrap() < 1e-9);
        assert_eq!(theta_prime(&map).unwrap(), *tp);
    }

    #[test]
    fn theta_prime_matches_finite_difference_of_theta() {
        let map = map_for(&Curve::ellipse(2.0).unwrap(), 64);
        let curve = map.mesh().curve().clone();
        let tp = map.theta_prime.as_ref().unwrap();
        let h = 1e-5;
        for j in [0, 7, 20, 41] {
            let t = map.mesh().nodes()[j];
            let forward = map.psi_at(t + h).unwrap();
            let backward = map.psi_at(t - h).unwrap();
            let dtheta = (forward * backward.conj()).arg() / (2.0 * h);
            let fd = dtheta / curve.eval(t).dp.norm();
            assert!((tp[j] - fd).abs() < 1e-7, "node {j}: {} vs {fd}", tp[j]);
        }
    }

    #[test]
    fn exterior_identity_on_circle() {
        let map = map_for(&Curve::circle(1.0).unwrap(), 32);
        let e = eval_exterior(&map, c(3.0, 0.0)).unwrap();
        assert!((e.value - 3.0).norm() < 1e-12);
        assert!(matches!(
            eval_exterior(&map, c(0.1, 0.0)),
            Err(MapError::Domain(..))
        ));
    }

    #[test]
    fn exterior_ellipse_against_joukowski_inverse() {
        let map = map_for(&Curve::ellipse(2.0).unwrap(), 128);
        // z = (3/2) w + (1/2)/w, so (3/2) w² − 4w + 1/2 = 0 at z = 4.
        let w = (4.0 + (16.0f64 - 3.0).sqrt()) / 3.0;
        let e = eval_exterior(&map, c(4.0, 0.0)).unwrap();
        assert!((e.value - w).norm() < 1e-10, "{} vs {w}", e.value);
        assert!(!e.near_boundary);
    }

    #[test]
    fn faber_dlp_on_circle_is_monomial() {
        let map = map_for(&Curve::circle(1.0).unwrap(), 64);
        let z0 = c(0.3, 0.2);
        assert!((faber_dlp(&map, 0, z0).unwrap().value - 1.0).norm() < 1e-12);
        assert!((faber_dlp(&map, 2, z0).unwrap().value - z0 * z0).norm() < 1e-10);
    }

    #[test]
    fn faber_dlp_ellipse_degree_one_and_zero() {
        let map = map_for(&Curve::ellipse(2.0).unwrap(), 64);
        let z0 = c(0.3, 0.2);
        assert!((faber_dlp(&map, 0, z0).unwrap().value - 1.0).norm() < 1e-12);
        let p1 = faber_dlp(&map, 1, z0).unwrap().value;
        assert!((p1 - (z0 * map.alpha1 + map.alpha0)).norm() < 1e-10);
    }

    #[test]
    fn unwrap_rejects_coarse_steps() {
        let psi: Vec<Complex64> = [0.0, 0.5, 2.9]
            .iter()
            .map(|&a| Complex64::from_polar(1.0, a))
            .collect();
        assert!(matches!(
            unwrap_angles(&psi),
            Err(MapError::Resolution { node: 2, .. })
        ));
    }
}
