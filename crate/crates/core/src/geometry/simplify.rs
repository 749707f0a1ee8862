//! Stroke simplification for raw sketch input (Ramer-Douglas-Peucker).

use super::point::Point2;

/// Default tolerance for a dataset: half a pixel.
pub fn default_epsilon(pixel_spacing: f64) -> f64 {
    0.5 * pixel_spacing
}

/// Distance from `p` to the closed segment `a..b`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Simplifies a polyline, keeping both endpoints. Consecutive duplicate points are always
/// removed; with `epsilon <= 0` nothing else is.
pub fn simplify_stroke(points: &[Point2], epsilon: f64) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.dedup();
    if pts.len() < 3 || epsilon <= 0.0 {
        return pts;
    }
    let mut keep = vec![false; pts.len()];
    keep[0] = true;
    keep[pts.len() - 1] = true;

    // Explicit stack instead of recursion: tablet strokes can run to many thousands of points.
    let mut stack = vec![(0usize, pts.len() - 1)];
    while let Some((start, end)) = stack.pop() {
        if end <= start + 1 {
            continue;
        }
        let (mut worst, mut worst_d) = (start, 0.0f64);
        for i in start + 1..end {
            let d = point_segment_distance(pts[i], pts[start], pts[end]);
            if d > worst_d {
                worst = i;
                worst_d = d;
            }
        }
        if worst_d > epsilon {
            keep[worst] = true;
            stack.push((worst, end));
            stack.push((start, worst));
        }
    }
    pts.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_segment_collapses_to_endpoints() {
        let line: Vec<Point2> = (0..100).map(|i| Point2::new(i as f64 * 0.1, 0.0)).collect();
        let out = simplify_stroke(&line, 0.1);
        assert_eq!(out, vec![line[0], line[99]]);
    }

    #[test]
    fn zero_epsilon_only_removes_duplicates() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 1.0),
        ];
        let out = simplify_stroke(&pts, 0.0);
        assert_eq!(out.len(), 4);
        assert_eq!(out[1], Point2::new(1.0, 0.0));
    }

    #[test]
    fn corner_is_kept() {
        let pts = vec![Point2::new(0.0, 0.0), Point2::new(5.0, 5.0), Point2::new(10.0, 0.0)];
        assert_eq!(simplify_stroke(&pts, 1.0).len(), 3);
        assert_eq!(simplify_stroke(&pts, 10.0).len(), 2);
    }

    #[test]
    fn short_inputs_pass_through() {
        let pts = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)];
        assert_eq!(simplify_stroke(&pts, 5.0), pts);
    }

    #[test]
    fn default_epsilon_is_half_a_pixel() {
        assert_eq!(default_epsilon(0.33), 0.165);
    }
}
