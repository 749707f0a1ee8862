//! Topology and volume statistics for triangle meshes.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::mesh::TriangleMesh;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub triangle_count: usize,
    /// `V - E + F`, exact.
    pub euler_characteristic: i64,
    /// Every edge is shared by exactly two triangles.
    pub watertight: bool,
    /// Every directed edge appears at most once, i.e. neighbours agree on orientation.
    pub orientation_consistent: bool,
    /// mm³, divergence theorem; positive when triangles face outward.
    pub signed_volume: f64,
    pub boundary_loop_count: usize,
    /// Triangle-connected components.
    pub component_count: usize,
}

fn edge_key(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Undirected edge -> number of incident triangles, in sorted order.
pub fn edge_incidence(mesh: &TriangleMesh) -> BTreeMap<(u32, u32), usize> {
    let mut map = BTreeMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            *map.entry(edge_key(t[k], t[(k + 1) % 3])).or_insert(0) += 1;
        }
    }
    map
}

/// Edges incident to exactly one triangle.
pub fn boundary_edges(mesh: &TriangleMesh) -> Vec<(u32, u32)> {
    edge_incidence(mesh).into_iter().filter(|&(_, n)| n == 1).map(|(e, _)| e).collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Groups triangles into connected components (sharing at least one vertex). Returns one
/// list of triangle indices per component, ordered by first triangle.
pub fn connected_components(mesh: &TriangleMesh) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(mesh.vertices.len());
    for t in &mesh.triangles {
        uf.union(t[0] as usize, t[1] as usize);
        uf.union(t[1] as usize, t[2] as usize);
    }
    let mut order: Vec<usize> = Vec::new();
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, t) in mesh.triangles.iter().enumerate() {
        let root = uf.find(t[0] as usize);
        groups
            .entry(root)
            .or_insert_with(|| {
                order.push(root);
                Vec::new()
            })
            .push(i);
    }
    order.into_iter().map(|r| groups.remove(&r).unwrap_or_default()).collect()
}

/// Sub-mesh holding only the given triangles, vertices renumbered in first-use order.
pub fn extract(mesh: &TriangleMesh, triangles: &[usize]) -> TriangleMesh {
    let mut remap: HashMap<u32, u32> = HashMap::new();
    let mut out = TriangleMesh::new();
    for &ti in triangles {
        let t = mesh.triangles[ti].map(|v| {
            *remap.entry(v).or_insert_with(|| out.push_vertex(mesh.vertices[v as usize]))
        });
        out.triangles.push(t);
    }
    out
}

pub fn signed_volume(mesh: &TriangleMesh) -> f64 {
    mesh.triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| mesh.vertices[i as usize]);
            a.dot(b.cross(c))
        })
        .sum::<f64>()
        / 6.0
}

pub fn mesh_stats(mesh: &TriangleMesh) -> MeshStats {
    let incidence = edge_incidence(mesh);
    let boundary: Vec<(u32, u32)> =
        incidence.iter().filter(|&(_, &n)| n == 1).map(|(&e, _)| e).collect();
    let watertight = !mesh.triangles.is_empty() && incidence.values().all(|&n| n == 2);

    let mut directed: HashMap<(u32, u32), usize> = HashMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            *directed.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
        }
    }
    let orientation_consistent = directed.values().all(|&n| n == 1);

    // Boundary loops: connected components of the boundary-edge graph.
    let mut uf = UnionFind::new(mesh.vertices.len());
    for &(a, b) in &boundary {
        uf.union(a as usize, b as usize);
    }
    let mut roots: Vec<usize> = boundary.iter().map(|&(a, _)| uf.find(a as usize)).collect();
    roots.sort_unstable();
    roots.dedup();

    let v = mesh.vertices.len();
    let e = incidence.len();
    let f = mesh.triangles.len();
    MeshStats {
        vertex_count: v,
        edge_count: e,
        triangle_count: f,
        euler_characteristic: v as i64 - e as i64 + f as i64,
        watertight,
        orientation_consistent,
        signed_volume: signed_volume(mesh),
        boundary_loop_count: roots.len(),
        component_count: connected_components(mesh).len(),
    }
}
