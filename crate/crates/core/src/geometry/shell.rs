//! Triangle bands between two normalized loops on different slices.

use super::error::{GeometryError, Result};
use super::mesh::TriangleMesh;
use super::normalize::NormalizedLoop;

/// Builds the band joining `a` (at height `z_a`) and `b` (at height `z_b`).
///
/// Both vertex lists are walked in ascending angle order from their first (lowest-angle)
/// vertex. At each step the loop whose next vertex has the lower angle advances, and one
/// triangle is emitted from the two current vertices and the advanced one. Angle ties
/// advance `a` first. The band therefore has exactly `|a| + |b|` triangles, and its boundary
/// is the two input loops.
///
/// Triangles face the left of each loop's direction of travel. For normalized loops the
/// material is on the right, so the band faces away from the solid.
pub fn build_shell(a: &NormalizedLoop, z_a: f64, b: &NormalizedLoop, z_b: f64) -> Result<TriangleMesh> {
    if a.is_empty() || b.is_empty() {
        return Err(GeometryError::EmptyLoop);
    }
    if z_a == z_b {
        return Err(GeometryError::InvalidArgument(
            "shell loops must lie on different heights".into(),
        ));
    }
    let (na, nb) = (a.len(), b.len());
    let mut mesh = TriangleMesh::new();
    for &p in &a.vertices {
        mesh.push_vertex(p.lift(z_a));
    }
    for &p in &b.vertices {
        mesh.push_vertex(p.lift(z_b));
    }
    let ia = |i: usize| (i % na) as u32;
    let ib = |j: usize| (na + j % nb) as u32;
    // Angle of the vertex after position `i`; past the end the walk wraps to the start,
    // one full turn later.
    let next_angle = |angles: &[f64], i: usize| {
        if i + 1 < angles.len() {
            angles[i + 1]
        } else {
            angles[0] + 360.0
        }
    };

    // `a` below `b` gives the left-facing winding directly; otherwise flip.
    let upward = z_a < z_b;
    let mut emit = |t: [u32; 3]| {
        let t = if upward { t } else { [t[0], t[2], t[1]] };
        mesh.push_triangle(t);
    };

    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        let advance_a = if i == na {
            false
        } else if j == nb {
            true
        } else {
            next_angle(&a.angles, i) <= next_angle(&b.angles, j)
        };
        if advance_a {
            emit([ia(i), ib(j), ia(i + 1)]);
            i += 1;
        } else {
            emit([ia(i), ib(j), ib(j + 1)]);
            j += 1;
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::normalize::normalize_loop;
    use crate::geometry::point::Point2;
    use crate::geometry::polygon::Loop;
    use crate::geometry::stats::mesh_stats;

    fn regular(n: usize, r: f64, phase: f64) -> NormalizedLoop {
        let pts = (0..n)
            .map(|k| {
                let t = phase + std::f64::consts::TAU * k as f64 / n as f64;
                Point2::new(r * t.cos(), r * t.sin())
            })
            .collect();
        normalize_loop(&Loop::new(pts).unwrap(), 0, None).unwrap()
    }

    #[test]
    fn two_squares_make_a_cube_wall() {
        let sq = regular(4, 1.0, 0.25);
        let band = build_shell(&sq, 0.0, &sq, 1.0).unwrap();
        assert_eq!(band.triangle_count(), 8);
        let s = mesh_stats(&band);
        assert_eq!((s.vertex_count, s.edge_count, s.triangle_count), (8, 16, 8));
        assert_eq!(s.euler_characteristic, 0);
        assert_eq!(s.boundary_loop_count, 2);
    }

    #[test]
    fn square_to_octagon() {
        let band = build_shell(&regular(4, 1.0, 0.1), 0.0, &regular(8, 2.0, 0.0), 2.0).unwrap();
        assert_eq!(band.triangle_count(), 12);
    }

    #[test]
    fn band_faces_outward_for_solid_loops() {
        let l = regular(16, 3.0, 0.0);
        for (za, zb) in [(0.0, 1.0), (1.0, 0.0)] {
            let band = build_shell(&l, za, &l, zb).unwrap();
            for t in &band.triangles {
                let [p, q, r] = t.map(|i| band.vertices[i as usize]);
                let n = q.sub(p).cross(r.sub(p));
                let mid = Point2::new((p.x + q.x + r.x) / 3.0, (p.y + q.y + r.y) / 3.0);
                assert!(n.x * mid.x + n.y * mid.y > 0.0, "triangle faces inward");
            }
        }
    }

    #[test]
    fn equal_heights_rejected() {
        let l = regular(5, 1.0, 0.0);
        assert!(build_shell(&l, 1.0, &l, 1.0).is_err());
    }
}
