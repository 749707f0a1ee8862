use serde::{Deserialize, Serialize};

use super::contour::Contour;
use super::point::Point2;

/// Points closer than this (mm) are reported once.
const DEDUP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Collision {
    pub point: Point2,
    /// Index into the `existing` list passed to [`detect_collisions`].
    pub existing: usize,
}

/// Crossing point of two segments, counting each segment as half-open `[start, end)` so a
/// crossing through a shared loop vertex is found exactly once. Parallel and collinear
/// segments do not cross transversally and yield `None`.
fn crossing(a0: Point2, a1: Point2, b0: Point2, b1: Point2) -> Option<Point2> {
    let r = a1 - a0;
    let s = b1 - b0;
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let qp = b0 - a0;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (0.0..1.0).contains(&t) && (0.0..1.0).contains(&u) {
        Some(a0 + r * t)
    } else {
        None
    }
}

/// All boundary crossings between `candidate` and each contour in `existing` lying on the
/// same slice. Contours on other slices are ignored. Results are sorted by `existing`
/// index, then by position.
pub fn detect_collisions(candidate: &Contour, existing: &[Contour]) -> Vec<Collision> {
    let cand_edges: Vec<(Point2, Point2)> =
        candidate.loops().iter().flat_map(|l| l.ring.edges()).collect();
    let mut out = Vec::new();
    for (idx, other) in existing.iter().enumerate() {
        if other.slice_index != candidate.slice_index {
            continue;
        }
        let mut points: Vec<Point2> = Vec::new();
        for l in other.loops() {
            for (b0, b1) in l.ring.edges() {
                for &(a0, a1) in &cand_edges {
                    if let Some(p) = crossing(a0, a1, b0, b1) {
                        points.push(p);
                    }
                }
            }
        }
        points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        points.dedup_by(|a, b| a.distance(*b) <= DEDUP_TOLERANCE);
        out.extend(points.into_iter().map(|point| Collision { point, existing: idx }));
    }
    out
}
