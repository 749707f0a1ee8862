use super::error::{GeometryError, Result};
use super::point::{orient, Point2};
use super::polygon::{polygon_centroid, vertex_mean, Loop};

/// Convex hull by monotone chain, counterclockwise, collinear boundary points dropped.
pub fn convex_hull(points: &[Point2]) -> Result<Loop> {
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(GeometryError::DegenerateInput(format!("point {i} is not finite")));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(GeometryError::DegenerateInput(format!(
            "convex hull needs 3 distinct points, got {}",
            pts.len()
        )));
    }

    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();

    if hull.len() < 3 {
        return Err(GeometryError::DegenerateInput("all points are collinear".into()));
    }
    Loop::new(hull)
}

/// Area centroid of a hull polygon.
pub fn hull_center(hull: &Loop) -> Result<Point2> {
    polygon_centroid(hull.vertices())
        .ok_or_else(|| GeometryError::DegenerateInput("hull area below tolerance".into()))
}

/// Area centroid, or the vertex mean when the area is degenerate. The flag reports the fallback.
pub fn hull_center_or_mean(hull: &Loop) -> (Point2, bool) {
    match hull_center(hull) {
        Ok(c) => (c, false),
        Err(_) => (vertex_mean(hull.vertices()), true),
    }
}
