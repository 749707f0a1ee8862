//! Fixtures shared by the benchmarks.

use slicelab_core::geometry::{Contour, Loop, Point2};

pub fn circle(cx: f64, cy: f64, r: f64, n: usize) -> Loop {
    Loop::new(
        (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                Point2::new(cx + r * t.cos(), cy + r * t.sin())
            })
            .collect(),
    )
    .expect("a regular polygon is a valid loop")
}

/// `slices` circles of `n` vertices whose radius swells towards the middle of the stack.
pub fn circle_stack(slices: u32, n: usize) -> Vec<Contour> {
    (0..slices)
        .map(|s| {
            let t = s as f64 / slices.max(2) as f64 - 0.5;
            Contour::new(s, "bench", "bench", circle(0.0, 0.0, 10.0 * (1.0 - t * t), n))
        })
        .collect()
}
