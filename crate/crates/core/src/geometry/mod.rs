//! Computational-geometry core: contour normalization, shell construction, volume assembly,
//! collision detection and mesh export. Everything here is a pure function of its inputs.

mod cap;
mod collision;
mod contour;
mod error;
mod hull;
mod matching;
mod mesh;
mod normalize;
mod obj;
mod point;
mod polygon;
mod shell;
mod simplify;
mod stats;
mod volume;

pub use cap::{cap_loop, triangulate, Facing};
pub use collision::{detect_collisions, Collision};
pub use contour::{Contour, Hole, LoopRef};
pub use error::{GeometryError, Result};
pub use hull::{convex_hull, hull_center, hull_center_or_mean};
pub use matching::{match_loops, LoopMatching};
pub use mesh::{TriangleMesh, DEGENERATE_AREA, WELD_TOLERANCE};
pub use normalize::{
    angle_about, normalize_contour, normalize_loop, winding_for_depth, NormalizedContour,
    NormalizedLoop, ANGLE_STEP,
};
pub use obj::{export_obj, obj_string, parse_obj};
pub use point::{orient, Point2, Point3};
pub use polygon::{point_in_polygon, polygon_centroid, signed_area, Loop, Winding};
pub use shell::build_shell;
pub use simplify::{default_epsilon, point_segment_distance, simplify_stroke};
pub use stats::{boundary_edges, connected_components, edge_incidence, extract, mesh_stats, MeshStats};
pub use volume::{reconstruct_volume, Reconstruction, ReconstructionWarning};
