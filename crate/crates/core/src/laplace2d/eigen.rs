//! P1 assembly and the smallest nonzero Neumann eigenpair.
//!
//! Natural boundary terms vanish, so assembly is the volume part only.
//! The generalized problem `K v = lambda M v` is solved by shift-and-invert
//! iteration at shift zero with the constant vector deflated in the mass
//! inner product; one banded Cholesky factorization of the regularized
//! stiffness serves all iterations.

use super::mesh::Mesh;
use crate::error::{Error, Result};
use crate::numerics::band::BandMatrix;

pub struct Assembled {
    pub stiffness: BandMatrix,
    pub mass: BandMatrix,
}

/// Exact element-wise P1 matrices accumulated into band storage.
pub fn assemble(mesh: &Mesh) -> Assembled {
    let n = mesh.node_count();
    let bw = mesh.bandwidth();
    let mut k = BandMatrix::zeros(n, bw);
    let mut m = BandMatrix::zeros(n, bw);
    for tri in &mesh.elements {
        let [a, b, c] = *tri;
        let p = mesh.nodes[a];
        let q = mesh.nodes[b];
        let r = mesh.nodes[c];
        let det = (q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]);
        let area = 0.5 * det;
        // gradients of the barycentric basis
        let gb = [
            [(q[1] - r[1]) / det, (r[0] - q[0]) / det],
            [(r[1] - p[1]) / det, (p[0] - r[0]) / det],
            [(p[1] - q[1]) / det, (q[0] - p[0]) / det],
        ];
        let idx = [a, b, c];
        for s in 0..3 {
            for t in 0..=s {
                let (hi, lo) =
                    if idx[s] >= idx[t] { (idx[s], idx[t]) } else { (idx[t], idx[s]) };
                let ke = area * (gb[s][0] * gb[t][0] + gb[s][1] * gb[t][1]);
                let me = area / 12.0 * if s == t { 2.0 } else { 1.0 };
                k.add(hi, lo, ke);
                m.add(hi, lo, me);
            }
        }
    }
    Assembled { stiffness: k, mass: m }
}

pub struct EigenOutcome {
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Smallest nonzero generalized eigenpair via deflated inverse iteration.
/// Stops when `||K v - lambda M v|| <= tol ||lambda M v||`.
pub fn smallest_nonzero(asm: &Assembled, mesh: &Mesh, tol: f64) -> Result<EigenOutcome> {
    let n = mesh.node_count();
    let k = &asm.stiffness;
    let m = &asm.mass;

    // relative regularization keeps the constant-mode pivot well above
    // roundoff in the factorization
    let trace_k: f64 = (0..n).map(|i| k.get(i, i)).sum();
    let trace_m: f64 = (0..n).map(|i| m.get(i, i)).sum();
    if trace_m <= 0.0 {
        return Err(Error::DegenerateMass);
    }
    let sigma = 1e-8 * trace_k / trace_m;
    let factor = k.shifted(sigma, m).cholesky().ok_or(Error::DegenerateMass)?;
    let k_diags = k.nonzero_diagonals();
    let m_diags = m.nonzero_diagonals();

    let ones = vec![1.0; n];
    let mut m_ones = vec![0.0; n];
    m.mul_vec_on(&m_diags, &ones, &mut m_ones);
    let ones_m_ones: f64 = m_ones.iter().sum();

    // deterministic start close to the expected first mode shape
    let mut v: Vec<f64> =
        mesh.nodes.iter().map(|p| (std::f64::consts::PI * p[0]).cos()).collect();
    let mut mv = vec![0.0; n];
    let mut kv = vec![0.0; n];
    let mut next = vec![0.0; n];

    let deflate = |v: &mut [f64], m_ones: &[f64]| {
        let c: f64 = v.iter().zip(m_ones).map(|(a, b)| a * b).sum::<f64>() / ones_m_ones;
        for x in v.iter_mut() {
            *x -= c;
        }
    };

    deflate(&mut v, &m_ones);
    let cap = 100 + n / 50;
    let mut best_resid = f64::INFINITY;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut stagnant = 0usize;
    for it in 0..cap {
        m.mul_vec_on(&m_diags, &v, &mut mv);
        factor.solve(&mv, &mut next);
        deflate(&mut next, &m_ones);
        m.mul_vec_on(&m_diags, &next, &mut mv);
        let nrm: f64 = next.iter().zip(&mv).map(|(a, b)| a * b).sum::<f64>().sqrt();
        if !(nrm > 0.0) {
            return Err(Error::EigenNoConvergence(it));
        }
        for (x, y) in v.iter_mut().zip(&next) {
            *x = y / nrm;
        }
        // Rayleigh quotient and residual
        m.mul_vec_on(&m_diags, &v, &mut mv);
        k.mul_vec_on(&k_diags, &v, &mut kv);
        let vmv: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
        let vkv: f64 = v.iter().zip(&kv).map(|(a, b)| a * b).sum();
        let lambda = vkv / vmv;
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..n {
            let r = kv[i] - lambda * mv[i];
            num += r * r;
            den += (lambda * mv[i]) * (lambda * mv[i]);
        }
        let residual = (num / den).sqrt();
        if residual < best_resid * 0.99 {
            best_resid = residual;
            best = Some((lambda, v.clone()));
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        // stop at the target, or at the roundoff floor once the residual
        // no longer improves (the Rayleigh value is then accurate to
        // residual^2, far below the target)
        let at_floor = stagnant >= 4 && best_resid <= 1e3 * tol;
        if residual <= tol || at_floor {
            let (lambda, mut v) = if residual <= tol { (lambda, v) } else { best.unwrap() };
            let achieved = if residual <= tol { residual } else { best_resid };
            // sign: positive average over the first column
            let col = &mesh.logical[0];
            let mut seen = usize::MAX;
            let mut sum = 0.0;
            for &id in col {
                if id != seen {
                    sum += v[id];
                    seen = id;
                }
            }
            if sum < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
            let _ = it;
            return Ok(EigenOutcome { lambda, vector: v, residual: achieved });
        }
    }
    Err(Error::EigenNoConvergence(cap))
}
