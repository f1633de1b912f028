//! Exterior conformal maps of piecewise-smooth Jordan curves.
//!
//! The map `Psi` from the exterior of a closed curve onto the exterior of the
//! unit disk is recovered from the solution of a second-kind integral equation
//! for the double-layer potential. The pipeline is
//!
//! 1. build a [`Curve`] and discretize it into a [`QuadratureMesh`],
//! 2. solve the Nyström system for the complex density ([`solve_density`]),
//! 3. shift and normalize the density into a [`BoundaryMap`] ([`boundary_map`]),
//!
//! after which the map can be evaluated off the boundary, its leading Laurent
//! coefficients read off, and Faber polynomials evaluated two independent ways.
//!
//! ```
//! use extmap::{boundary_map, solve_density, trapezoid_mesh, Curve};
//!
//! let ellipse = Curve::ellipse(2.0).unwrap();
//! let mesh = trapezoid_mesh(&ellipse, 64).unwrap();
//! let map = boundary_map(&solve_density(&mesh).unwrap()).unwrap();
//! assert!((map.alpha1 - 2.0 / 3.0).abs() < 1e-10);
//! ```

pub mod cli;
pub mod curve;
mod error;
pub mod export;
pub mod operator;
pub mod quadrature;
pub mod recovery;
pub mod verify;

pub use num_complex::Complex64;

pub use curve::{Curve, CurveDescriptor, CurvePoint};
pub use error::{MapError, Result};
pub use operator::{
    apply_dlp, assemble, interpolate_density, interpolate_density_derivative, neumann_kernel,
    solve_density, DensitySolution, Evaluation,
};
pub use quadrature::{
    gauss_legendre, integrate, panel_mesh, refine_corners, trapezoid_mesh, MeshKind, Panel,
    QuadratureMesh,
};
pub use recovery::{
    boundary_map, eval_exterior, faber_dlp, mean_correction, theta_prime, BoundaryMap,
};
pub use verify::{
    analytic_alpha1, analytic_boundary_map, boundary_error, convergence_study, faber_oracle,
    square_corner_symmetry, ConvergenceReport, ConvergenceRow, Reference, Sweep,
};
