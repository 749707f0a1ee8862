#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicelab_core::geometry::{Loop, Point2};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn regular_polygon(cx: f64, cy: f64, r: f64, n: usize) -> Loop {
    Loop::new(
        (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                Point2::new(cx + r * t.cos(), cy + r * t.sin())
            })
            .collect(),
    )
    .unwrap()
}

/// Random convex polygon: sorted random angles on an ellipse.
pub fn random_convex(rng: &mut impl Rng, n: usize) -> Loop {
    let (rx, ry) = (rng.random_range(2.0..20.0), rng.random_range(2.0..20.0));
    let (cx, cy) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
    loop {
        let mut ts: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        ts.sort_by(f64::total_cmp);
        let min_gap = ts
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(ts[0] + std::f64::consts::TAU - ts[n - 1]))
            .fold(f64::INFINITY, f64::min);
        if min_gap < 1e-3 {
            continue;
        }
        let pts = ts.iter().map(|t| Point2::new(cx + rx * t.cos(), cy + ry * t.sin())).collect();
        if let Ok(l) = Loop::new(pts) {
            return l;
        }
    }
}

/// Random polygon star-shaped about `(cx, cy)`: sorted angles, radii in `[r/2, r]`.
pub fn random_star(rng: &mut impl Rng, cx: f64, cy: f64, r: f64, n: usize) -> Loop {
    loop {
        let mut ts: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        ts.sort_by(f64::total_cmp);
        if ts.windows(2).any(|w| w[1] - w[0] < 1e-3) {
            continue;
        }
        let pts = ts
            .iter()
            .map(|t| {
                let rr = rng.random_range(0.5 * r..r);
                Point2::new(cx + rr * t.cos(), cy + rr * t.sin())
            })
            .collect();
        if let Ok(l) = Loop::new(pts) {
            if l.check_simple().is_ok() {
                return l;
            }
        }
    }
}

pub mod collab {
    use std::collections::HashMap;

    use serde_json::{json, Value};
    use slicelab_core::collab::*;
    use slicelab_core::geometry::{Contour, Loop, Point2};

    pub fn config(grouping: GroupingMode) -> SessionConfig {
        SessionConfig {
            dataset_id: "d".into(),
            atlas_id: None,
            grouping,
            slice_count: 64,
            pixel_spacing: 0.5,
            slice_spacing: 1.0,
            palette_size: MAX_PALETTE_SIZE,
        }
    }

    /// Builds envelopes with per-sender increasing sequence numbers.
    #[derive(Default)]
    pub struct Seqs(HashMap<String, u64>);

    impl Seqs {
        pub fn env(&mut self, session: &str, sender: &str, kind: MessageType, payload: Value) -> MessageEnvelope {
            let seq = self.0.entry(sender.to_string()).or_default();
            *seq += 1;
            MessageEnvelope::new(kind, session, sender, *seq, payload)
        }
    }

    pub fn square(x: f64, y: f64, side: f64) -> Loop {
        Loop::new(vec![
            Point2::new(x, y),
            Point2::new(x + side, y),
            Point2::new(x + side, y + side),
            Point2::new(x, y + side),
        ])
        .unwrap()
    }

    pub fn contour_json(slice: u32, structure: &str, author: &str, ring: Loop) -> Value {
        serde_json::to_value(Contour::new(slice, structure, author, ring)).unwrap()
    }

    pub fn join_payload(name: &str) -> Value {
        json!({ "display_name": name })
    }
}
