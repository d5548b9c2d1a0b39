//! First nonzero Neumann eigenpair of a thin graph domain, its
//! cross-sectional average, flux defect, gradients and nodal set.

mod diagnostics;
mod eigen;
mod mesh;

pub use diagnostics::{
    cross_section_average, energy_check, eta_profile, gradient_diagnostics, nodal_set,
    transverse_oscillation, CrossSectionProfile, EtaProfile, GradientDiagnostics, NodalReport,
    Oscillation,
};
pub use mesh::{build_mesh_unchecked, Mesh};

use crate::error::{Error, Result};
use crate::geometry::Domain2D;

/// Discrete first nonzero Neumann eigenpair. The eigenvector is normalized
/// to unit weighted mass and signed so the first-column average is positive.
#[derive(Clone, Debug)]
pub struct PDESolution {
    pub mesh: Mesh,
    pub lambda: f64,
    pub u: Vec<f64>,
    /// Constant gradient per element.
    pub grad_u: Vec<[f64; 2]>,
    pub sup_u: f64,
    pub inf_u: f64,
    /// Weighted mass `integral of u^2` (1 after normalization).
    pub mass_norm: f64,
    /// Relative eigenvalue residual reached by the solver.
    pub residual: f64,
}

impl PDESolution {
    pub fn sup_abs(&self) -> f64 {
        self.sup_u.max(-self.inf_u)
    }
}

/// Conforming triangulation of the domain; see [`mesh::build_mesh`].
pub fn build_mesh(dom: &Domain2D, nx: usize, ny: usize) -> Result<Mesh> {
    mesh::build_mesh(dom, nx, ny)
}

/// Assembles and solves for the smallest nonzero eigenpair; `tol` is the
/// relative eigenvalue residual (at least 1e-10).
pub fn solve_first_neumann(mesh: Mesh, tol: f64) -> Result<PDESolution> {
    if tol < 1e-10 {
        return Err(Error::InvalidTolerance(tol));
    }
    solve_first_neumann_unchecked(mesh, tol)
}

pub(crate) fn solve_first_neumann_unchecked(mesh: Mesh, tol: f64) -> Result<PDESolution> {
    let asm = eigen::assemble(&mesh);
    let out = eigen::smallest_nonzero(&asm, &mesh, tol)?;
    let u = out.vector;
    let mut grad_u = Vec::with_capacity(mesh.elements.len());
    for tri in &mesh.elements {
        let [a, b, c] = *tri;
        let p = mesh.nodes[a];
        let q = mesh.nodes[b];
        let r = mesh.nodes[c];
        let det = (q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]);
        let gx = (u[a] * (q[1] - r[1]) + u[b] * (r[1] - p[1]) + u[c] * (p[1] - q[1])) / det;
        let gy = (u[a] * (r[0] - q[0]) + u[b] * (p[0] - r[0]) + u[c] * (q[0] - p[0])) / det;
        grad_u.push([gx, gy]);
    }
    let sup_u = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let inf_u = u.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(PDESolution {
        mesh,
        lambda: out.lambda,
        u,
        grad_u,
        sup_u,
        inf_u,
        mass_norm: 1.0,
        residual: out.residual,
    })
}
