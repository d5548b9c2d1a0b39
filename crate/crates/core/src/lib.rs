//! First nonzero Neumann eigenpairs of thin convex planar domains.
//!
//! A convex domain of unit length and width at most `2 eps` is close, in
//! spectral terms, to a weighted interval: the cross-sectional width
//! `omega(x)` defines the one-dimensional eigenproblem
//! `-(omega phi')' = mu omega phi` with Neumann ends, whose first
//! eigenpair `(mu, phi)` tracks the planar eigenpair `(lambda, u)` as the
//! domain gets thinner. This crate computes both sides and measures how
//! fast the two agree as `eps` shrinks:
//!
//! * [`geometry`] — graph-domain families, width profiles, convexity checks;
//! * [`sl_solver`] — the weighted 1D Neumann eigensolver (series patch at
//!   singular ends plus two-sided shooting);
//! * [`laplace2d`] — a P1 finite-element eigensolver on boundary-fitted
//!   meshes, cross-sectional averages and nodal-set extraction;
//! * [`verify`] — paired 1D/2D runs over `eps` grids, log-log slope fits
//!   and machine-readable scaling reports.

pub mod error;
pub mod geometry;
pub mod laplace2d;
pub mod numerics;
pub mod sl_solver;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{
    brunn_minkowski_check, check_weight_inequalities, make_domain, width_profile, Domain2D,
    WeightProfile,
};
pub use laplace2d::{
    build_mesh, cross_section_average, energy_check, eta_profile, gradient_diagnostics,
    nodal_set, solve_first_neumann, transverse_oscillation, CrossSectionProfile, Mesh,
    NodalReport, PDESolution,
};
pub use sl_solver::{
    picard_local, rayleigh_quotient_1d, s1_of_mu, shoot, solve_first_eigen, SLEigenpair,
    ShootResult, Side,
};
pub use verify::{
    fit_slope, run_pair, sandwich_check, scaling_study, MeshPolicy, ScalingReport, ScalingRow,
    SlopeFit,
};
