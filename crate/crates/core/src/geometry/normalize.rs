//! Angular normalization of contour loops.
//!
//! Every loop gets its own convex hull and hull center. Each vertex is then tagged with its
//! angle about that center, measured from the +X axis in the loop's direction of travel.
//! Solid loops (even depth) wind clockwise, holes (odd depth) counterclockwise, so the
//! material always lies to the right of the direction of travel. The vertex list is rotated
//! to start at the smallest angle, and angles are forced strictly increasing without
//! reordering vertices, so non-star-shaped loops keep their shape.

use serde::Serialize;

use super::contour::Contour;
use super::error::Result;
use super::hull::{convex_hull, hull_center_or_mean};
use super::point::Point2;
use super::polygon::{Loop, Winding};

/// Smallest step between consecutive angles, degrees.
pub const ANGLE_STEP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedLoop {
    pub vertices: Vec<Point2>,
    /// Degrees in `[0, 360)`, strictly increasing, same length as `vertices`.
    pub angles: Vec<f64>,
    pub center: Point2,
    /// 0 = outer boundary, 1 = hole, 2 = sub-hole, ...
    pub depth: usize,
    /// Index of the enclosing loop within the same contour.
    pub parent: Option<usize>,
    /// The hull was too thin for an area centroid and the vertex mean was used instead.
    pub center_fallback: bool,
}

impl NormalizedLoop {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn winding(&self) -> Winding {
        winding_for_depth(self.depth)
    }

    pub fn is_solid(&self) -> bool {
        self.depth % 2 == 0
    }

    /// Area centroid of the loop itself (not its hull); used for cross-slice matching.
    pub fn centroid(&self) -> Point2 {
        super::polygon::polygon_centroid(&self.vertices)
            .unwrap_or_else(|| super::polygon::vertex_mean(&self.vertices))
    }

    /// The loop translated along the slice normal is unchanged in-plane; this rebuilds the
    /// underlying [`Loop`] for predicates such as capping.
    pub fn to_loop(&self) -> Result<Loop> {
        Loop::new(self.vertices.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedContour {
    pub source: Contour,
    pub loops: Vec<NormalizedLoop>,
}

impl NormalizedContour {
    pub fn children_of(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.loops
            .iter()
            .enumerate()
            .filter(move |(_, l)| l.parent == Some(idx))
            .map(|(i, _)| i)
    }
}

pub fn winding_for_depth(depth: usize) -> Winding {
    if depth % 2 == 0 {
        Winding::Clockwise
    } else {
        Winding::Counterclockwise
    }
}

/// Angle of `p` about `center` measured from +X, clockwise or counterclockwise, in `[0, 360)`.
pub fn angle_about(center: Point2, p: Point2, direction: Winding) -> f64 {
    let d = p - center;
    let dy = match direction {
        Winding::Clockwise => -d.y,
        Winding::Counterclockwise => d.y,
    };
    let mut deg = dy.atan2(d.x).to_degrees();
    if deg < 0.0 {
        deg += 360.0;
    }
    if deg >= 360.0 {
        deg -= 360.0;
    }
    // Folds -0.0 into +0.0.
    deg + 0.0
}

/// Normalizes one loop at the given nesting depth.
pub fn normalize_loop(ring: &Loop, depth: usize, parent: Option<usize>) -> Result<NormalizedLoop> {
    let hull = convex_hull(ring.vertices())?;
    let (center, center_fallback) = hull_center_or_mean(&hull);
    let winding = winding_for_depth(depth);
    let oriented = ring.with_winding(winding);
    let verts = oriented.vertices();

    let raw: Vec<f64> = verts.iter().map(|&p| angle_about(center, p, winding)).collect();
    let start = (0..verts.len())
        .min_by(|&i, &j| {
            raw[i]
                .total_cmp(&raw[j])
                .then(verts[i].distance(center).total_cmp(&verts[j].distance(center)))
                .then(i.cmp(&j))
        })
        .expect("loop has vertices");

    let n = verts.len();
    let mut vertices = Vec::with_capacity(n);
    let mut angles: Vec<f64> = Vec::with_capacity(n);
    for k in 0..n {
        let i = (start + k) % n;
        vertices.push(verts[i]);
        let a = match angles.last() {
            Some(&prev) => raw[i].max(prev + ANGLE_STEP),
            None => raw[i],
        };
        angles.push(a);
    }

    Ok(NormalizedLoop { vertices, angles, center, depth, parent, center_fallback })
}

/// Validates the contour and normalizes every loop (outer, holes, sub-holes) in
/// depth-first order.
pub fn normalize_contour(contour: &Contour) -> Result<NormalizedContour> {
    contour.validate()?;
    let loops = contour
        .loops()
        .into_iter()
        .map(|l| normalize_loop(l.ring, l.depth, l.parent))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalizedContour { source: contour.clone(), loops })
}
