use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::point::Point3;

/// Triangles below this area (mm²) are dropped on emission.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Positions closer than this (mm) are welded into one vertex.
pub const WELD_TOLERANCE: f64 = 1e-6;

/// Indexed triangle mesh. Vertex order and triangle order are part of the output contract:
/// identical inputs must produce identical meshes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriangleMesh {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn push_vertex(&mut self, p: Point3) -> u32 {
        self.vertices.push(p);
        (self.vertices.len() - 1) as u32
    }

    pub fn triangle_area(&self, t: [u32; 3]) -> f64 {
        let [a, b, c] = t.map(|i| self.vertices[i as usize]);
        0.5 * b.sub(a).cross(c.sub(a)).norm()
    }

    /// Pushes the triangle unless it is degenerate. Returns whether it was kept.
    pub fn push_triangle(&mut self, t: [u32; 3]) -> bool {
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || self.triangle_area(t) < DEGENERATE_AREA
        {
            return false;
        }
        self.triangles.push(t);
        true
    }

    pub fn flip(&mut self) {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
    }

    /// Indices are all in range.
    pub fn indices_valid(&self) -> bool {
        let n = self.vertices.len() as u32;
        self.triangles.iter().all(|t| t.iter().all(|&i| i < n))
    }

    /// Appends `other`, welding vertices whose positions agree within [`WELD_TOLERANCE`]
    /// with vertices already present.
    pub fn merge_welded(&mut self, other: &TriangleMesh) {
        let mut welder = Welder::from_mesh(self);
        let remap: Vec<u32> = other.vertices.iter().map(|&p| welder.insert(self, p)).collect();
        for t in &other.triangles {
            self.triangles.push(t.map(|i| remap[i as usize]));
        }
    }

    /// Appends `other` as a separate piece; no vertices are shared.
    pub fn append(&mut self, other: &TriangleMesh) {
        let base = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(other.triangles.iter().map(|t| t.map(|i| i + base)));
    }

    /// Merges several meshes into one, in order, welding shared positions.
    pub fn merge_all<'a>(parts: impl IntoIterator<Item = &'a TriangleMesh>) -> TriangleMesh {
        let mut out = TriangleMesh::new();
        let mut welder = Welder::default();
        for part in parts {
            let remap: Vec<u32> =
                part.vertices.iter().map(|&p| welder.insert(&mut out, p)).collect();
            for t in &part.triangles {
                out.triangles.push(t.map(|i| remap[i as usize]));
            }
        }
        out
    }
}

/// Grid-keyed vertex deduplication. Positions are snapped to the weld tolerance and the
/// neighbouring cells are searched so points straddling a cell boundary still weld.
#[derive(Default)]
struct Welder {
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
}

impl Welder {
    fn key(p: Point3) -> (i64, i64, i64) {
        let q = |v: f64| (v / WELD_TOLERANCE).floor() as i64;
        (q(p.x), q(p.y), q(p.z))
    }

    fn from_mesh(mesh: &TriangleMesh) -> Self {
        let mut w = Welder::default();
        for (i, &p) in mesh.vertices.iter().enumerate() {
            w.cells.entry(Self::key(p)).or_default().push(i as u32);
        }
        w
    }

    fn insert(&mut self, mesh: &mut TriangleMesh, p: Point3) -> u32 {
        let (kx, ky, kz) = Self::key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &id in ids {
                            let q = mesh.vertices[id as usize];
                            if (q.x - p.x).abs() <= WELD_TOLERANCE
                                && (q.y - p.y).abs() <= WELD_TOLERANCE
                                && (q.z - p.z).abs() <= WELD_TOLERANCE
                            {
                                return id;
                            }
                        }
                    }
                }
            }
        }
        let id = mesh.push_vertex(p);
        self.cells.entry((kx, ky, kz)).or_default().push(id);
        id
    }
}
