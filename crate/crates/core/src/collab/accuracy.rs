//! Contour overlap scoring on the dataset pixel grid.

use crate::geometry::Contour;

/// Pixels (column, row) whose centers lie inside any of `contours`. Within one contour
/// the even-odd rule applies, so holes are excluded and sub-holes included again.
fn rasterize(contours: &[&Contour], pixel_spacing: f64, cols: (i64, i64), rows: (i64, i64)) -> Vec<bool> {
    let width = (cols.1 - cols.0) as usize;
    let mut mask = vec![false; width * (rows.1 - rows.0) as usize];
    let mut xs: Vec<f64> = Vec::new();
    for c in contours {
        let loops = c.loops();
        for row in rows.0..rows.1 {
            let y = (row as f64 + 0.5) * pixel_spacing;
            xs.clear();
            for l in &loops {
                for (p, q) in l.ring.edges() {
                    if (p.y <= y) != (q.y <= y) {
                        xs.push(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
                    }
                }
            }
            xs.sort_by(f64::total_cmp);
            let base = (row - rows.0) as usize * width;
            for span in xs.chunks_exact(2) {
                // Columns whose center x satisfies span[0] <= x < span[1].
                let start = ((span[0] / pixel_spacing - 0.5).ceil() as i64).max(cols.0);
                let end = ((span[1] / pixel_spacing - 0.5).ceil() as i64).min(cols.1);
                for col in start..end.max(start) {
                    mask[base + (col - cols.0) as usize] = true;
                }
            }
        }
    }
    mask
}

fn pixel_bounds(contours: &[&Contour], pixel_spacing: f64) -> Option<((i64, i64), (i64, i64))> {
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in contours {
        let (lo, hi) = c.outer.bbox();
        lo_x = lo_x.min(lo.x);
        lo_y = lo_y.min(lo.y);
        hi_x = hi_x.max(hi.x);
        hi_y = hi_y.max(hi.y);
    }
    if !lo_x.is_finite() {
        return None;
    }
    let cell = |v: f64| (v / pixel_spacing).floor() as i64;
    Some(((cell(lo_x) - 1, cell(hi_x) + 2), (cell(lo_y) - 1, cell(hi_y) + 2)))
}

/// Dice coefficient `2|A∩B| / (|A|+|B|)` of the rasterized regions. Two regions that
/// cover no pixel centers at all score 1.
pub fn dice_score(a: &[&Contour], b: &[&Contour], pixel_spacing: f64) -> f64 {
    assert!(pixel_spacing > 0.0, "pixel spacing must be positive");
    let all: Vec<&Contour> = a.iter().chain(b).copied().collect();
    let Some((cols, rows)) = pixel_bounds(&all, pixel_spacing) else {
        return 1.0;
    };
    let ma = rasterize(a, pixel_spacing, cols, rows);
    let mb = rasterize(b, pixel_spacing, cols, rows);
    let (mut na, mut nb, mut both) = (0u64, 0u64, 0u64);
    for (&x, &y) in ma.iter().zip(&mb) {
        na += x as u64;
        nb += y as u64;
        both += (x && y) as u64;
    }
    if na + nb == 0 {
        return 1.0;
    }
    2.0 * both as f64 / (na + nb) as f64
}

/// Score of one contour against the atlas contours for the same slice and structure.
pub fn accuracy_against_atlas(contour: &Contour, atlas: &[&Contour], pixel_spacing: f64) -> f64 {
    dice_score(&[contour], atlas, pixel_spacing)
}

/// Number of pixel centers inside the contour.
pub fn pixel_area(contour: &Contour, pixel_spacing: f64) -> u64 {
    let Some((cols, rows)) = pixel_bounds(&[contour], pixel_spacing) else {
        return 0;
    };
    rasterize(&[contour], pixel_spacing, cols, rows).iter().filter(|&&b| b).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Hole, Loop, Point2};

    fn square(x: f64, y: f64, s: f64) -> Loop {
        Loop::new(vec![
            Point2::new(x, y),
            Point2::new(x + s, y),
            Point2::new(x + s, y + s),
            Point2::new(x, y + s),
        ])
        .unwrap()
    }

    fn c(l: Loop) -> Contour {
        Contour::new(0, "s", "a", l)
    }

    #[test]
    fn identical_and_disjoint() {
        let a = c(square(0.0, 0.0, 10.0));
        let b = c(square(20.0, 0.0, 10.0));
        assert_eq!(dice_score(&[&a], &[&a], 0.5), 1.0);
        assert_eq!(dice_score(&[&a], &[&b], 0.5), 0.0);
    }

    #[test]
    fn half_overlap() {
        let a = c(square(0.0, 0.0, 1.0));
        let b = c(square(0.5, 0.0, 1.0));
        let d = dice_score(&[&a], &[&b], 0.01);
        assert!((d - 0.5).abs() < 0.02, "{d}");
    }

    #[test]
    fn holes_are_excluded() {
        let ring = c(square(0.0, 0.0, 10.0)).with_hole(Hole::new(square(2.0, 2.0, 6.0)));
        assert_eq!(pixel_area(&ring, 1.0), 100 - 36);
        assert_eq!(pixel_area(&c(square(0.0, 0.0, 10.0)), 1.0), 100);
    }

    #[test]
    fn sub_pixel_contours() {
        let tiny = c(square(0.1, 0.1, 0.2));
        assert_eq!(pixel_area(&tiny, 1.0), 0);
        assert_eq!(dice_score(&[&tiny], &[&tiny], 1.0), 1.0);
    }
}
