//! Volume assembly from a stack of contours of one structure.
//!
//! Contours are grouped by slice and ordered along the slice normal. Loops on consecutive
//! slices are paired by nearest centroid, outer boundaries first and then holes within each
//! matched pair, recursively. Every pair becomes a shell; loops left without a partner are
//! capped in their own plane. All pieces are merged with exact vertex welding.
//!
//! A loop with no partner on either side (a branch that exists on one slice only) is closed
//! as a slab extruded half-way towards the neighbouring slice, so the output stays closed.
//! Loops that still have holes where they terminate cannot be capped and are left open.

use std::collections::BTreeMap;

use serde::Serialize;

use super::cap::{cap_loop, Facing};
use super::contour::Contour;
use super::error::{GeometryError, Result};
use super::matching::match_loops;
use super::mesh::TriangleMesh;
use super::normalize::{normalize_contour, NormalizedLoop};
use super::shell::build_shell;
use super::stats::{mesh_stats, MeshStats};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReconstructionWarning {
    /// Loop counts differ between two consecutive slices; extra loops were capped.
    Branching { lower_slice: u32, upper_slice: u32, lower_loops: usize, upper_loops: usize },
    /// A terminating loop still has holes in that plane, so the volume is left open there.
    CapUnsupported { slice: u32, contour: usize, depth: usize },
    /// A hole present on a single slice only; it bounds no volume and was skipped.
    IsolatedHoleSkipped { slice: u32, contour: usize },
    /// A solid loop with no partner on either side, closed as a half-gap slab.
    IsolatedLoopExtruded { slice: u32, contour: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction {
    pub mesh: TriangleMesh,
    pub stats: MeshStats,
    pub warnings: Vec<ReconstructionWarning>,
}

/// One loop of one slice, flattened across all contours on that slice.
struct SliceLoop {
    contour: usize,
    normalized: NormalizedLoop,
    parent: Option<usize>,
    children: Vec<usize>,
    matched_below: bool,
    matched_above: bool,
}

struct Slice {
    index: u32,
    z: f64,
    loops: Vec<SliceLoop>,
}

impl Slice {
    fn roots(&self) -> Vec<usize> {
        (0..self.loops.len()).filter(|&i| self.loops[i].parent.is_none()).collect()
    }
}

/// Reconstructs a closed (where possible) triangle mesh from contours of one structure.
/// `z = slice_index * slice_spacing`.
pub fn reconstruct_volume(contours: &[Contour], slice_spacing: f64) -> Result<Reconstruction> {
    if !(slice_spacing.is_finite() && slice_spacing > 0.0) {
        return Err(GeometryError::InvalidArgument(format!(
            "slice spacing must be positive, got {slice_spacing}"
        )));
    }
    if contours.len() < 2 {
        return Err(GeometryError::InsufficientContours(contours.len()));
    }
    let label = &contours[0].structure_label;
    if let Some(other) = contours.iter().find(|c| &c.structure_label != label) {
        return Err(GeometryError::MixedStructureLabels(
            label.clone(),
            other.structure_label.clone(),
        ));
    }

    let mut by_slice: BTreeMap<u32, Vec<(usize, &Contour)>> = BTreeMap::new();
    for (i, c) in contours.iter().enumerate() {
        by_slice.entry(c.slice_index).or_default().push((i, c));
    }
    if by_slice.len() < 2 {
        return Err(GeometryError::InsufficientContours(by_slice.len()));
    }

    let mut slices = Vec::with_capacity(by_slice.len());
    for (&index, members) in &by_slice {
        let mut loops: Vec<SliceLoop> = Vec::new();
        for &(ci, c) in members {
            let normalized = normalize_contour(c)?;
            let base = loops.len();
            for nl in normalized.loops {
                let parent = nl.parent.map(|p| base + p);
                loops.push(SliceLoop {
                    contour: ci,
                    normalized: nl,
                    parent,
                    children: Vec::new(),
                    matched_below: false,
                    matched_above: false,
                });
            }
        }
        for i in 0..loops.len() {
            if let Some(p) = loops[i].parent {
                loops[p].children.push(i);
            }
        }
        slices.push(Slice { index, z: index as f64 * slice_spacing, loops });
    }

    let mut warnings = Vec::new();
    let mut parts: Vec<TriangleMesh> = Vec::new();

    for k in 0..slices.len() - 1 {
        let (lower_part, upper_part) = slices.split_at_mut(k + 1);
        let (lower, upper) = (&mut lower_part[k], &mut upper_part[0]);
        let (lo_roots, up_roots) = (lower.roots(), upper.roots());
        if lo_roots.len() != up_roots.len() {
            warnings.push(ReconstructionWarning::Branching {
                lower_slice: lower.index,
                upper_slice: upper.index,
                lower_loops: lo_roots.len(),
                upper_loops: up_roots.len(),
            });
        }
        let mut pairs = Vec::new();
        pair_level(lower, upper, &lo_roots, &up_roots, &mut pairs);
        for (i, j) in pairs {
            parts.push(build_shell(
                &lower.loops[i].normalized,
                lower.z,
                &upper.loops[j].normalized,
                upper.z,
            )?);
        }
    }

    for k in 0..slices.len() {
        let slab_height = if k + 1 < slices.len() {
            (slices[k + 1].z - slices[k].z) * 0.5
        } else {
            (slices[k - 1].z - slices[k].z) * 0.5
        };
        let slice = &slices[k];
        for l in &slice.loops {
            close_loop(slice, l, slab_height, &mut parts, &mut warnings)?;
        }
    }

    let mesh = TriangleMesh::merge_all(parts.iter());
    let stats = mesh_stats(&mesh);
    Ok(Reconstruction { mesh, stats, warnings })
}

/// Matches `lower_ids` against `upper_ids` and recurses into the children of each pair.
fn pair_level(
    lower: &mut Slice,
    upper: &mut Slice,
    lower_ids: &[usize],
    upper_ids: &[usize],
    pairs: &mut Vec<(usize, usize)>,
) {
    let lc: Vec<_> = lower_ids.iter().map(|&i| lower.loops[i].normalized.centroid()).collect();
    let uc: Vec<_> = upper_ids.iter().map(|&j| upper.loops[j].normalized.centroid()).collect();
    let m = match_loops(&lc, &uc);
    for (a, b) in m.pairs {
        let (i, j) = (lower_ids[a], upper_ids[b]);
        lower.loops[i].matched_above = true;
        upper.loops[j].matched_below = true;
        pairs.push((i, j));
        let lch = lower.loops[i].children.clone();
        let uch = upper.loops[j].children.clone();
        pair_level(lower, upper, &lch, &uch, pairs);
    }
}

fn close_loop(
    slice: &Slice,
    l: &SliceLoop,
    slab_height: f64,
    parts: &mut Vec<TriangleMesh>,
    warnings: &mut Vec<ReconstructionWarning>,
) -> Result<()> {
    let nl = &l.normalized;
    let parent = l.parent.map(|p| &slice.loops[p]);

    if !l.matched_below && !l.matched_above {
        // The parent decides for its whole subtree when it is isolated too.
        if parent.is_some_and(|p| !p.matched_below && !p.matched_above) {
            return Ok(());
        }
        if !nl.is_solid() {
            warnings.push(ReconstructionWarning::IsolatedHoleSkipped {
                slice: slice.index,
                contour: l.contour,
            });
            return Ok(());
        }
        if !l.children.is_empty() {
            warnings.push(ReconstructionWarning::CapUnsupported {
                slice: slice.index,
                contour: l.contour,
                depth: nl.depth,
            });
            return Ok(());
        }
        warnings.push(ReconstructionWarning::IsolatedLoopExtruded {
            slice: slice.index,
            contour: l.contour,
        });
        let (z0, z1) = (slice.z, slice.z + slab_height);
        let (bottom, top) = if z0 < z1 { (z0, z1) } else { (z1, z0) };
        parts.push(build_shell(nl, bottom, nl, top)?);
        parts.push(cap_loop(&nl.vertices, bottom, Facing::Down)?);
        parts.push(cap_loop(&nl.vertices, top, Facing::Up)?);
        return Ok(());
    }

    for (open, side) in [(!l.matched_below, Facing::Down), (!l.matched_above, Facing::Up)] {
        if !open {
            continue;
        }
        let parent_open = parent.is_some_and(|p| match side {
            Facing::Down => !p.matched_below,
            Facing::Up => !p.matched_above,
        });
        if parent_open {
            continue;
        }
        if !l.children.is_empty() {
            warnings.push(ReconstructionWarning::CapUnsupported {
                slice: slice.index,
                contour: l.contour,
                depth: nl.depth,
            });
            continue;
        }
        // Caps face away from the material: outward for solids, into the tunnel for holes.
        let facing = if nl.is_solid() { side } else { side.opposite() };
        parts.push(cap_loop(&nl.vertices, slice.z, facing)?);
    }
    Ok(())
}
