//! Planar caps closing the ends of a reconstructed stack.

use serde::{Deserialize, Serialize};

use super::error::{GeometryError, Result};
use super::mesh::TriangleMesh;
use super::point::{orient, Point2};
use super::polygon::signed_area;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Facing {
    Up,
    Down,
}

impl Facing {
    pub fn opposite(self) -> Self {
        match self {
            Facing::Up => Facing::Down,
            Facing::Down => Facing::Up,
        }
    }
}

/// Ear-clipping triangulation of a simple polygon, as index triples into `polygon`, each
/// triangle counterclockwise. Produces `n - 2` triangles.
pub fn triangulate(polygon: &[Point2]) -> Result<Vec<[usize; 3]>> {
    let n = polygon.len();
    if n < 3 {
        return Err(GeometryError::DegenerateInput("cap needs at least 3 vertices".into()));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    if signed_area(polygon) < 0.0 {
        idx.reverse();
    }
    let mut out = Vec::with_capacity(n - 2);
    while idx.len() > 3 {
        let m = idx.len();
        let ear = (0..m)
            .find(|&k| is_ear(polygon, &idx, k, false))
            // Nearly collinear chains can leave no strictly convex ear; accept a flat one.
            .or_else(|| (0..m).find(|&k| is_ear(polygon, &idx, k, true)))
            .ok_or_else(|| GeometryError::DegenerateInput("no ear found; loop not simple".into()))?;
        let (p, c, nx) = (idx[(ear + m - 1) % m], idx[ear], idx[(ear + 1) % m]);
        out.push([p, c, nx]);
        idx.remove(ear);
    }
    out.push([idx[0], idx[1], idx[2]]);
    Ok(out)
}

fn is_ear(poly: &[Point2], idx: &[usize], k: usize, allow_flat: bool) -> bool {
    let m = idx.len();
    let (ip, ic, inx) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
    let (a, b, c) = (poly[ip], poly[ic], poly[inx]);
    let turn = orient(a, b, c);
    if turn < 0.0 || (!allow_flat && turn == 0.0) {
        return false;
    }
    idx.iter().all(|&j| {
        if j == ip || j == ic || j == inx {
            return true;
        }
        let p = poly[j];
        if p == a || p == b || p == c {
            return true;
        }
        // Reject any vertex inside or on the candidate triangle.
        !(orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0)
    })
}

/// Triangulates a hole-free loop at height `z` with normals facing `facing`.
pub fn cap_loop(vertices: &[Point2], z: f64, facing: Facing) -> Result<TriangleMesh> {
    let tris = triangulate(vertices)?;
    let mut mesh = TriangleMesh::new();
    for &p in vertices {
        mesh.push_vertex(p.lift(z));
    }
    for [a, b, c] in tris {
        // Counterclockwise seen from above faces +z.
        let t = match facing {
            Facing::Up => [a as u32, b as u32, c as u32],
            Facing::Down => [a as u32, c as u32, b as u32],
        };
        mesh.push_triangle(t);
    }
    Ok(mesh)
}
