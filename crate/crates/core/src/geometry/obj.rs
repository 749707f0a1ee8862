//! Wavefront OBJ export (and the minimal reader needed to load it back).

use std::fmt::Write as _;
use std::io::{self, Write};

use super::error::{GeometryError, Result};
use super::mesh::TriangleMesh;
use super::point::Point3;

fn coord(out: &mut String, v: f64) {
    let start = out.len();
    write!(out, "{v:.6}").expect("writing to a String");
    if &out[start..] == "-0.000000" {
        out.replace_range(start.., "0.000000");
    }
}

/// Renders the mesh as OBJ text: `v x y z` lines with six decimals, then `f i j k` lines
/// with 1-based indices, in mesh order.
pub fn obj_string(mesh: &TriangleMesh) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 40 + mesh.triangles.len() * 24);
    for p in &mesh.vertices {
        out.push('v');
        for v in [p.x, p.y, p.z] {
            out.push(' ');
            coord(&mut out, v);
        }
        out.push('\n');
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).expect("writing to a String");
    }
    out
}

pub fn export_obj<W: Write>(mesh: &TriangleMesh, mut writer: W) -> io::Result<()> {
    writer.write_all(obj_string(mesh).as_bytes())
}

/// Reads `v` and `f` records. Faces may use `v/vt/vn` syntax; only the position index is
/// kept. Polygons with more than three corners are fan-triangulated.
pub fn parse_obj(text: &str) -> Result<TriangleMesh> {
    let mut mesh = TriangleMesh::new();
    let err = |line: usize, reason: &str| GeometryError::MalformedObj { line, reason: reason.into() };
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts
                    .take(3)
                    .map(|s| s.parse::<f64>().map_err(|_| err(line_no, "bad coordinate")))
                    .collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(err(line_no, "vertex needs 3 coordinates"));
                }
                mesh.vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = parts
                    .map(|s| {
                        let first = s.split('/').next().unwrap_or("");
                        let i: i64 = first.parse().map_err(|_| err(line_no, "bad index"))?;
                        let n = mesh.vertices.len() as i64;
                        let resolved = if i < 0 { n + i } else { i - 1 };
                        if resolved < 0 || resolved >= n {
                            return Err(err(line_no, "index out of range"));
                        }
                        Ok(resolved as u32)
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(err(line_no, "face needs 3 indices"));
                }
                for k in 1..idx.len() - 1 {
                    mesh.triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(mesh)
}
