//! Kernel operations checked against independent brute-force oracles.

mod common;

use std::collections::BTreeMap;

use common::{random_convex, random_star, regular_polygon, rng};
use rand::Rng;
use slicelab_core::geometry::*;

fn brute_force_hull(points: &[Point2]) -> Vec<Point2> {
    // A point is a hull vertex iff it is not inside any triangle of other points and is
    // not strictly between two others on a line. O(n^4) for the triangle test would be slow;
    // use the edge criterion instead: (p, q) is a hull edge iff every other point is
    // strictly left of p->q, or on the line but not beyond the segment.
    let mut verts = Vec::new();
    for &p in points {
        for &q in points {
            if p == q {
                continue;
            }
            let ok = points.iter().all(|&r| {
                let o = orient(p, q, r);
                o > 0.0 || (o == 0.0 && (r - p).dot(q - p) >= 0.0 && (r - q).dot(p - q) >= 0.0)
            });
            if ok {
                verts.push(p);
            }
        }
    }
    verts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    verts.dedup();
    verts
}

#[test]
fn hull_matches_brute_force_on_random_disk_points() {
    let mut r = rng(7);
    for _ in 0..20 {
        let pts: Vec<Point2> = (0..50)
            .map(|_| {
                let (t, rad) = (r.random_range(0.0..std::f64::consts::TAU), r.random::<f64>().sqrt());
                Point2::new(rad * t.cos(), rad * t.sin())
            })
            .collect();
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.winding(), Winding::Counterclockwise);
        let mut got = hull.vertices().to_vec();
        got.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        assert_eq!(got, brute_force_hull(&pts));
        // Every input point is inside or on the hull.
        for &p in &pts {
            assert!(hull.edges().all(|(a, b)| orient(a, b, p) >= -1e-12));
        }
    }
}

#[test]
fn hull_center_matches_sampled_centroid() {
    let mut r = rng(11);
    for _ in 0..3 {
        let hull = convex_hull(random_convex(&mut r, 9).vertices()).unwrap();
        let c = hull_center(&hull).unwrap();
        // Jittered-grid sampling of the bounding box, one sample per cell.
        let (lo, hi) = hull.bbox();
        let cells = 800;
        let (dx, dy) = ((hi.x - lo.x) / cells as f64, (hi.y - lo.y) / cells as f64);
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for i in 0..cells {
            for j in 0..cells {
                let p = Point2::new(
                    lo.x + (i as f64 + r.random::<f64>()) * dx,
                    lo.y + (j as f64 + r.random::<f64>()) * dy,
                );
                if point_in_polygon(hull.vertices(), p) {
                    sx += p.x;
                    sy += p.y;
                    n += 1;
                }
            }
        }
        let sampled = Point2::new(sx / n as f64, sy / n as f64);
        assert!(c.distance(sampled) < 1e-3, "{c:?} vs {sampled:?}");
    }
}

#[test]
fn star_shaped_twenty_gon_angles_increase_and_span_under_a_turn() {
    let mut r = rng(3);
    for _ in 0..50 {
        let ring = random_star(&mut r, 1.0, -2.0, 10.0, 20);
        let nl = normalize_loop(&ring, 0, None).unwrap();
        assert_eq!(nl.angles.len(), 20);
        assert!(nl.angles.windows(2).all(|w| w[0] < w[1]));
        assert!(nl.angles[0] >= 0.0 && nl.angles[19] < 360.0);
        assert!(nl.angles[19] - nl.angles[0] < 360.0);
    }
}

/// Half-edge audit: directed boundary edges of a mesh, by position.
fn boundary_position_edges(mesh: &TriangleMesh) -> Vec<[i64; 6]> {
    let key = |p: Point3| [p.x, p.y, p.z].map(|v| (v * 1e6).round() as i64);
    let mut count: BTreeMap<[i64; 6], i32> = BTreeMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (key(mesh.vertices[t[k] as usize]), key(mesh.vertices[t[(k + 1) % 3] as usize]));
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let e = [lo[0], lo[1], lo[2], hi[0], hi[1], hi[2]];
            *count.entry(e).or_default() += 1;
        }
    }
    assert!(count.values().all(|&c| c == 1 || c == 2), "edge used more than twice");
    count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect()
}

fn loop_position_edges(l: &Loop, z: f64) -> Vec<[i64; 6]> {
    let key = |p: Point2| [p.x, p.y, z].map(|v| (v * 1e6).round() as i64);
    l.edges()
        .map(|(a, b)| {
            let (a, b) = (key(a), key(b));
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            [lo[0], lo[1], lo[2], hi[0], hi[1], hi[2]]
        })
        .collect()
}

#[test]
fn shell_between_random_convex_loops_passes_boundary_audit() {
    let mut r = rng(5);
    for _ in 0..25 {
        let (a, b) = (random_convex(&mut r, 7), random_convex(&mut r, 11));
        let (na, nb) = (normalize_loop(&a, 0, None).unwrap(), normalize_loop(&b, 0, None).unwrap());
        let band = build_shell(&na, 0.0, &nb, 3.0).unwrap();
        assert_eq!(band.triangle_count(), 18);
        let mut expected = loop_position_edges(&a, 0.0);
        expected.extend(loop_position_edges(&b, 3.0));
        expected.sort();
        assert_eq!(boundary_position_edges(&band), expected);
    }
}

#[test]
fn convex_cap_area_matches_shoelace() {
    let ring = regular_polygon(3.0, -1.0, 7.5, 12);
    let cap = cap_loop(ring.vertices(), 4.0, Facing::Up).unwrap();
    assert_eq!(cap.triangle_count(), 10);
    let total: f64 = cap.triangles.iter().map(|&t| cap.triangle_area(t)).sum();
    let shoelace = signed_area(ring.vertices()).abs();
    assert!((total - shoelace).abs() < 1e-9);
}

#[test]
fn l_shape_cap_covers_polygon_exactly_once() {
    let l_shape: Vec<Point2> = [(0.0, 0.0), (4.0, 0.0), (4.0, 1.0), (1.0, 1.0), (1.0, 3.0), (0.0, 3.0)]
        .iter()
        .map(|&p| p.into())
        .collect();
    let cap = cap_loop(&l_shape, 0.0, Facing::Down).unwrap();
    assert_eq!(cap.triangle_count(), 4);
    // Rasterized coverage: sample points strictly inside the polygon must hit exactly one
    // triangle; points outside must hit none.
    let tris: Vec<[Point2; 3]> =
        cap.triangles.iter().map(|t| t.map(|i| cap.vertices[i as usize].xy())).collect();
    let inside_tri = |p: Point2, t: &[Point2; 3]| {
        let s = [orient(t[0], t[1], p), orient(t[1], t[2], p), orient(t[2], t[0], p)];
        s.iter().all(|&v| v > 0.0) || s.iter().all(|&v| v < 0.0)
    };
    let n = 200;
    let (mut covered, mut inside) = (0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            // Offsets keep samples off every triangle edge.
            let p = Point2::new((i as f64 + 0.5137) * 4.0 / n as f64, (j as f64 + 0.4731) * 3.0 / n as f64);
            let hits = tris.iter().filter(|t| inside_tri(p, t)).count();
            let in_poly = point_in_polygon(&l_shape, p);
            assert!(hits <= 1, "overlapping cap triangles at {p:?}");
            assert_eq!(hits == 1, in_poly, "coverage mismatch at {p:?}");
            covered += hits;
            inside += in_poly as usize;
        }
    }
    assert_eq!(covered, inside);
}

#[test]
fn branching_pair_caps_the_extra_loop_and_closes() {
    let lower = [regular_polygon(-15.0, 0.0, 4.0, 10), regular_polygon(15.0, 0.0, 4.0, 10)];
    let upper = regular_polygon(14.0, 1.0, 4.0, 10);
    let m = match_loops(&[lower[0].centroid(), lower[1].centroid()], &[upper.centroid()]);
    assert_eq!(m.pairs, vec![(1, 0)]);
    assert_eq!(m.unmatched_first, vec![0]);
    let contours = vec![
        Contour::new(4, "x", "a", lower[0].clone()),
        Contour::new(4, "x", "a", lower[1].clone()),
        Contour::new(5, "x", "a", upper),
    ];
    let rec = reconstruct_volume(&contours, 1.0).unwrap();
    assert!(rec.stats.watertight);
    assert_eq!(rec.stats.euler_characteristic, 4);
    assert!(rec
        .warnings
        .iter()
        .any(|w| matches!(w, ReconstructionWarning::IsolatedLoopExtruded { slice: 4, .. })));
}

fn cylinder_stack(n: usize, r: f64, slices: u32) -> Vec<Contour> {
    let ring = regular_polygon(0.0, 0.0, r, n);
    (0..slices).map(|s| Contour::new(s, "cyl", "expert", ring.clone())).collect()
}

fn prism_volume(n: usize, r: f64, h: f64) -> f64 {
    0.5 * n as f64 * r * r * (std::f64::consts::TAU / n as f64).sin() * h
}

#[test]
fn ten_circle_stack_matches_analytic_prism() {
    let rec = reconstruct_volume(&cylinder_stack(32, 10.0, 10), 1.0).unwrap();
    let s = &rec.stats;
    assert!(s.watertight && s.orientation_consistent);
    assert_eq!(s.euler_characteristic, 2);
    let expected = prism_volume(32, 10.0, 9.0);
    assert!((s.signed_volume - expected).abs() / expected < 0.005);
    assert!((s.signed_volume - expected).abs() < 1e-6);
}

#[test]
fn two_tube_stacks_are_separate_closed_components() {
    let (a, b) = (regular_polygon(-20.0, 0.0, 5.0, 16), regular_polygon(20.0, 3.0, 6.0, 20));
    let contours: Vec<Contour> = (0..5)
        .flat_map(|s| [Contour::new(s, "t", "p", a.clone()), Contour::new(s, "t", "p", b.clone())])
        .collect();
    let rec = reconstruct_volume(&contours, 2.5).unwrap();
    let comps = connected_components(&rec.mesh);
    assert_eq!(comps.len(), 2);
    for c in &comps {
        let s = mesh_stats(&extract(&rec.mesh, c));
        assert!(s.watertight);
        assert_eq!(s.euler_characteristic, 2);
        assert_eq!(s.boundary_loop_count, 0);
    }
    let expected = (a.area() + b.area()) * 10.0;
    assert!((rec.stats.signed_volume - expected).abs() < 1e-8);
}

fn brute_force_crossings(a: &Contour, b: &Contour) -> Vec<Point2> {
    let mut out = Vec::new();
    for la in a.loops() {
        for (p0, p1) in la.ring.edges() {
            for lb in b.loops() {
                for (q0, q1) in lb.ring.edges() {
                    let (d1, d2) = (orient(q0, q1, p0), orient(q0, q1, p1));
                    let (d3, d4) = (orient(p0, p1, q0), orient(p0, p1, q1));
                    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                        let t = d1 / (d1 - d2);
                        out.push(p0 + (p1 - p0) * t);
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    out
}

#[test]
fn collisions_match_all_pairs_segment_test() {
    let unit = |x: f64, y: f64| {
        Loop::new(vec![
            Point2::new(x, y),
            Point2::new(x + 1.0, y),
            Point2::new(x + 1.0, y + 1.0),
            Point2::new(x, y + 1.0),
        ])
        .unwrap()
    };
    let a = Contour::new(2, "s", "u1", unit(0.0, 0.0));
    let b = Contour::new(2, "s", "u2", unit(0.5, 0.5));
    let hits = detect_collisions(&a, std::slice::from_ref(&b));
    assert_eq!(hits.len(), 2);
    let oracle = brute_force_crossings(&a, &b);
    assert_eq!(oracle.len(), 2);
    for (h, o) in hits.iter().zip(&oracle) {
        assert!(h.point.distance(*o) < 1e-12);
    }

    let mut r = rng(21);
    for _ in 0..30 {
        let a = Contour::new(0, "s", "u", random_star(&mut r, 0.0, 0.0, 5.0, 13));
        let b = Contour::new(0, "s", "v", random_star(&mut r, 2.0, 1.0, 5.0, 17));
        let hits = detect_collisions(&a, std::slice::from_ref(&b));
        let oracle = brute_force_crossings(&a, &b);
        assert_eq!(hits.len(), oracle.len());
        for (h, o) in hits.iter().zip(&oracle) {
            assert!(h.point.distance(*o) < 1e-9);
        }
    }
}

#[test]
fn noisy_circle_simplification_stays_within_epsilon() {
    let mut r = rng(99);
    let pts: Vec<Point2> = (0..512)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / 512.0;
            let rad = 20.0 + r.random_range(-0.05..0.05);
            Point2::new(rad * t.cos(), rad * t.sin())
        })
        .collect();
    let out = simplify_stroke(&pts, 0.2);
    assert!(out.len() < pts.len() / 4, "{} points kept", out.len());
    assert_eq!(out[0], pts[0]);
    assert_eq!(*out.last().unwrap(), pts[511]);
    // Directed Hausdorff input -> simplified polyline, brute force over all segments.
    let hausdorff = pts
        .iter()
        .map(|&p| {
            out.windows(2)
                .map(|w| point_segment_distance(p, w[0], w[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    assert!(hausdorff <= 0.2, "{hausdorff}");
}

#[test]
fn closed_cylinder_stats_match_analytic_volume() {
    let rec = reconstruct_volume(&cylinder_stack(48, 3.0, 2), 7.0).unwrap();
    let s = mesh_stats(&rec.mesh);
    assert_eq!(s, rec.stats);
    assert_eq!(s.euler_characteristic, 2);
    assert!(s.watertight);
    assert!((s.signed_volume - prism_volume(48, 3.0, 7.0)).abs() < 1e-9);
}

#[test]
fn obj_round_trip_reproduces_mesh() {
    let rec = reconstruct_volume(&cylinder_stack(13, 4.321, 4), 0.7).unwrap();
    let text = obj_string(&rec.mesh);
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), rec.mesh.vertices.len());
    let back = parse_obj(&text).unwrap();
    assert_eq!(back.triangles, rec.mesh.triangles);
    for (p, q) in back.vertices.iter().zip(&rec.mesh.vertices) {
        assert!(p.sub(*q).norm() < 1e-6);
    }
    assert_eq!(obj_string(&back), text);
}

#[test]
fn band_obj_has_eight_vertex_and_face_lines() {
    let sq = normalize_loop(&regular_polygon(0.0, 0.0, 1.0, 4), 0, None).unwrap();
    let band = build_shell(&sq, 0.0, &sq, 1.0).unwrap();
    let text = obj_string(&band);
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 8);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 8);
}
