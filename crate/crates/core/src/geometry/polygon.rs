//! Closed planar loops and the polygon predicates shared by the rest of the kernel.

use serde::{Deserialize, Serialize};

use super::error::{GeometryError, Result};
use super::point::{orient, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winding {
    Clockwise,
    Counterclockwise,
}

impl Winding {
    pub fn reversed(self) -> Self {
        match self {
            Winding::Clockwise => Winding::Counterclockwise,
            Winding::Counterclockwise => Winding::Clockwise,
        }
    }
}

/// An implicitly closed polygon: the last vertex connects back to the first.
///
/// Construction checks the cheap invariants (at least three finite vertices, no two
/// consecutive vertices identical, non-zero area). Simplicity is checked separately by
/// [`Loop::check_simple`] because it is quadratic.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    vertices: Vec<Point2>,
    winding: Winding,
}

impl Loop {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(GeometryError::EmptyLoop);
        }
        if vertices.len() < 3 {
            return Err(GeometryError::DegenerateInput(format!(
                "loop needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::DegenerateInput(format!("vertex {i} is not finite")));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(GeometryError::DegenerateInput(format!(
                    "consecutive vertices {i} and {} are identical",
                    (i + 1) % n
                )));
            }
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(GeometryError::DegenerateInput("loop has zero area".into()));
        }
        let winding = if area > 0.0 { Winding::Counterclockwise } else { Winding::Clockwise };
        Ok(Self { vertices, winding })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point2> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn winding(&self) -> Winding {
        self.winding
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self { vertices, winding: self.winding.reversed() }
    }

    /// Same loop, rewound to `winding` if necessary.
    pub fn with_winding(&self, winding: Winding) -> Self {
        if self.winding == winding {
            self.clone()
        } else {
            self.reversed()
        }
    }

    /// Area centroid of the enclosed region.
    pub fn centroid(&self) -> Point2 {
        polygon_centroid(&self.vertices).unwrap_or_else(|| vertex_mean(&self.vertices))
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Fails with [`GeometryError::NonSimpleLoop`] naming the first pair of crossing edges.
    pub fn check_simple(&self) -> Result<()> {
        let v = &self.vertices;
        let n = v.len();
        for i in 0..n {
            let (a0, a1) = (v[i], v[(i + 1) % n]);
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (b0, b1) = (v[j], v[(j + 1) % n]);
                if adjacent {
                    // Adjacent edges share one endpoint; they only conflict when they fold back
                    // onto each other.
                    let (shared, p, q) = if j == i + 1 { (a1, a0, b1) } else { (a0, a1, b0) };
                    if orient(shared, p, q) == 0.0 && (p - shared).dot(q - shared) > 0.0 {
                        return Err(GeometryError::NonSimpleLoop(i, j));
                    }
                    continue;
                }
                if segments_touch(a0, a1, b0, b1) {
                    return Err(GeometryError::NonSimpleLoop(i, j));
                }
            }
        }
        Ok(())
    }

    /// Even-odd point containment. Points exactly on the boundary may land on either side.
    pub fn contains(&self, p: Point2) -> bool {
        point_in_polygon(&self.vertices, p)
    }

    /// True when every vertex of `inner` is inside `self` and no edges touch.
    pub fn strictly_contains(&self, inner: &Loop) -> bool {
        inner.vertices.iter().all(|&p| self.contains(p)) && !self.boundaries_touch(inner)
    }

    pub fn boundaries_touch(&self, other: &Loop) -> bool {
        if !bbox_overlap(&self.vertices, &other.vertices) {
            return false;
        }
        self.edges()
            .any(|(a0, a1)| other.edges().any(|(b0, b1)| segments_touch(a0, a1, b0, b1)))
    }

    /// Regions are disjoint: no shared boundary and neither contains the other.
    pub fn disjoint_from(&self, other: &Loop) -> bool {
        !self.boundaries_touch(other)
            && !self.contains(other.vertices[0])
            && !other.contains(self.vertices[0])
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        bbox(&self.vertices)
    }
}

pub fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let twice: f64 = (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum();
    twice * 0.5
}

/// Standard polygon centroid; `None` when the area vanishes.
pub fn polygon_centroid(vertices: &[Point2]) -> Option<Point2> {
    let n = vertices.len();
    if n < 3 {
        return None;
    }
    // Shift to the first vertex to keep the products well conditioned.
    let origin = vertices[0];
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = vertices[i] - origin;
        let q = vertices[(i + 1) % n] - origin;
        let w = p.cross(q);
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    if a.abs() < 1e-12 {
        return None;
    }
    Some(Point2::new(origin.x + cx / (3.0 * a), origin.y + cy / (3.0 * a)))
}

pub fn vertex_mean(vertices: &[Point2]) -> Point2 {
    let n = vertices.len().max(1) as f64;
    let (sx, sy) = vertices.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point2::new(sx / n, sy / n)
}

pub fn point_in_polygon(vertices: &[Point2], p: Point2) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, including touching and collinear overlap.
pub fn segments_touch(a0: Point2, a1: Point2, b0: Point2, b1: Point2) -> bool {
    let d1 = orient(b0, b1, a0);
    let d2 = orient(b0, b1, a1);
    let d3 = orient(a0, a1, b0);
    let d4 = orient(a0, a1, b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(b0, b1, a0))
        || (d2 == 0.0 && on_segment(b0, b1, a1))
        || (d3 == 0.0 && on_segment(a0, a1, b0))
        || (d4 == 0.0 && on_segment(a0, a1, b1))
}

pub fn bbox(vertices: &[Point2]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in vertices {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

fn bbox_overlap(a: &[Point2], b: &[Point2]) -> bool {
    let (alo, ahi) = bbox(a);
    let (blo, bhi) = bbox(b);
    alo.x <= bhi.x && blo.x <= ahi.x && alo.y <= bhi.y && blo.y <= ahi.y
}
