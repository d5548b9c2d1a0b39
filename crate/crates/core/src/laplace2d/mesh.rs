//! Boundary-fitted triangulation of a graph domain.
//!
//! Logical grid: column `i` sits at `x_i = i/nx`, row `j` at
//! `y = g_bot(x_i) + (j/ny) width(x_i)`. Each logical quad splits into two
//! triangles along a diagonal that alternates with `(i + j)` parity, which
//! keeps the mesh symmetric under `x` and `y` mirrors (for even `nx`) and
//! pushes quadrature asymmetries to grid frequency. Columns whose width
//! vanishes collapse to a single merged node.

use crate::error::{Error, Result};
use crate::geometry::{Domain2D, SINGULAR_TOL};

#[derive(Clone, Debug)]
pub struct Mesh {
    pub nx: usize,
    pub ny: usize,
    /// Node coordinates.
    pub nodes: Vec<[f64; 2]>,
    /// Triangles as node index triples, positively oriented.
    pub elements: Vec<[usize; 3]>,
    /// True for nodes on the domain boundary.
    pub boundary: Vec<bool>,
    /// `logical[i][j]` is the node at logical position `(i, j)`; merged
    /// columns repeat one node index for all `j`.
    pub logical: Vec<Vec<usize>>,
    /// Column abscissae `x_i = i / nx`.
    pub col_x: Vec<f64>,
    /// True where the column collapsed to a point.
    pub merged: Vec<bool>,
    /// Width bound of the source domain.
    pub eps: f64,
    /// Family the source domain was built from.
    pub family: String,
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Half-bandwidth of the node numbering (column-major).
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0;
        for tri in &self.elements {
            for a in 0..3 {
                for b in a + 1..3 {
                    bw = bw.max(tri[a].abs_diff(tri[b]));
                }
            }
        }
        bw
    }

    pub fn total_area(&self) -> f64 {
        self.elements.iter().map(|t| self.area(t)).sum()
    }

    pub fn area(&self, tri: &[usize; 3]) -> f64 {
        let [a, b, c] = *tri;
        let p = self.nodes[a];
        let q = self.nodes[b];
        let r = self.nodes[c];
        0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
    }
}

/// Builds the mapped logical-grid triangulation. Needs `nx >= 64`,
/// `ny >= 4` (coarser meshes are allowed in tests through
/// [`build_mesh_unchecked`]).
pub fn build_mesh(dom: &Domain2D, nx: usize, ny: usize) -> Result<Mesh> {
    if nx < 64 || ny < 4 {
        return Err(Error::MeshTooCoarse(nx.min(ny)));
    }
    build_mesh_unchecked(dom, nx, ny)
}

/// Same construction without the resolution floor.
pub fn build_mesh_unchecked(dom: &Domain2D, nx: usize, ny: usize) -> Result<Mesh> {
    assert!(nx >= 2 && ny >= 1);
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    let mut boundary = Vec::new();
    let mut logical = vec![vec![0usize; ny + 1]; nx + 1];
    let mut merged = vec![false; nx + 1];
    let mut col_x = Vec::with_capacity(nx + 1);

    for i in 0..=nx {
        let x = i as f64 / nx as f64;
        col_x.push(x);
        let top = dom.top(x);
        let bot = dom.bot(x);
        let width = top - bot;
        if width.abs() <= SINGULAR_TOL {
            let id = nodes.len();
            nodes.push([x, 0.5 * (top + bot)]);
            boundary.push(true);
            for j in 0..=ny {
                logical[i][j] = id;
            }
            merged[i] = true;
        } else {
            for j in 0..=ny {
                let id = nodes.len();
                let y = bot + (j as f64 / ny as f64) * width;
                nodes.push([x, y]);
                boundary.push(j == 0 || j == ny || i == 0 || i == nx);
                logical[i][j] = id;
            }
        }
    }

    let mut elements = Vec::with_capacity(2 * nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let a = logical[i][j];
            let b = logical[i + 1][j];
            let c = logical[i + 1][j + 1];
            let d = logical[i][j + 1];
            let candidates: [[usize; 3]; 2] =
                if (i + j) % 2 == 0 { [[a, b, c], [a, c, d]] } else { [[a, b, d], [b, c, d]] };
            for tri in candidates {
                if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                    continue; // collapsed edge of a degenerate quad
                }
                elements.push(tri);
            }
        }
    }

    let mesh = Mesh {
        nx,
        ny,
        nodes,
        elements,
        boundary,
        logical,
        col_x,
        merged,
        eps: dom.eps(),
        family: dom.family_name().to_string(),
    };
    for (e, tri) in mesh.elements.iter().enumerate() {
        let area = mesh.area(tri);
        if area <= 0.0 {
            return Err(Error::InvertedElement { element: e, area });
        }
    }
    Ok(mesh)
}
