use std::collections::BTreeMap;

use tracing::warn;

use crate::geometry::{mesh_stats, reconstruct_volume, Contour, MeshStats, TriangleMesh};

/// One structure's mesh: every author's stack reconstructed on its own, then concatenated
/// without welding so each author's volume stays a separate component. Stacks that fail to
/// reconstruct are skipped.
pub fn build_structure_mesh(stacks: &BTreeMap<String, Vec<Contour>>, slice_spacing: f64) -> (TriangleMesh, MeshStats) {
    let mut mesh = TriangleMesh::new();
    for (author, contours) in stacks {
        match reconstruct_volume(contours, slice_spacing) {
            Ok(rec) => mesh.append(&rec.mesh),
            Err(e) => warn!(%author, error = %e, "skipping stack"),
        }
    }
    let stats = mesh_stats(&mesh);
    (mesh, stats)
}
