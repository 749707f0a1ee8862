//! Authored contours and their JSON wire form.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::error::{GeometryError, Result};
use super::point::Point2;
use super::polygon::Loop;

/// A hole inside an outer boundary (or inside another hole, as an island).
#[derive(Debug, Clone, PartialEq)]
pub struct Hole {
    pub ring: Loop,
    pub sub_holes: Vec<Hole>,
}

impl Hole {
    pub fn new(ring: Loop) -> Self {
        Self { ring, sub_holes: Vec::new() }
    }
}

/// A planar loop with optional holes traced over one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub slice_index: u32,
    pub structure_label: String,
    pub author_id: String,
    pub outer: Loop,
    pub holes: Vec<Hole>,
}

/// One loop of a contour in depth-first order; `depth` 0 is the outer boundary.
#[derive(Debug, Clone, Copy)]
pub struct LoopRef<'a> {
    pub ring: &'a Loop,
    pub depth: usize,
    pub parent: Option<usize>,
}

impl Contour {
    pub fn new(
        slice_index: u32,
        structure_label: impl Into<String>,
        author_id: impl Into<String>,
        outer: Loop,
    ) -> Self {
        Self {
            slice_index,
            structure_label: structure_label.into(),
            author_id: author_id.into(),
            outer,
            holes: Vec::new(),
        }
    }

    pub fn with_hole(mut self, hole: Hole) -> Self {
        self.holes.push(hole);
        self
    }

    /// All loops in depth-first pre-order: outer first, then each hole followed by its
    /// sub-holes. `parent` indexes into the same sequence.
    pub fn loops(&self) -> Vec<LoopRef<'_>> {
        fn walk<'a>(holes: &'a [Hole], depth: usize, parent: usize, out: &mut Vec<LoopRef<'a>>) {
            for h in holes {
                let idx = out.len();
                out.push(LoopRef { ring: &h.ring, depth, parent: Some(parent) });
                walk(&h.sub_holes, depth + 1, idx, out);
            }
        }
        let mut out = vec![LoopRef { ring: &self.outer, depth: 0, parent: None }];
        walk(&self.holes, 1, 0, &mut out);
        out
    }

    pub fn loop_count(&self) -> usize {
        self.loops().len()
    }

    /// Checks simplicity of every loop and the nesting rules: children strictly inside
    /// their parent, siblings pairwise disjoint.
    pub fn validate(&self) -> Result<()> {
        self.outer.check_simple()?;
        validate_children(&self.outer, &self.holes)
    }

    /// Enclosed area honoring holes and islands.
    pub fn area(&self) -> f64 {
        self.loops()
            .iter()
            .map(|l| if l.depth % 2 == 0 { l.ring.area() } else { -l.ring.area() })
            .sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ContourJson = serde_json::from_str(text)
            .map_err(|e| GeometryError::InvalidContour(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ContourJson::from(self)).expect("contour serializes")
    }
}

fn validate_children(parent: &Loop, children: &[Hole]) -> Result<()> {
    for (i, h) in children.iter().enumerate() {
        h.ring.check_simple()?;
        if !parent.strictly_contains(&h.ring) {
            return Err(GeometryError::InvalidContour(format!(
                "hole {i} is not strictly inside its parent loop"
            )));
        }
        for (j, other) in children.iter().enumerate().skip(i + 1) {
            if !h.ring.disjoint_from(&other.ring) {
                return Err(GeometryError::InvalidContour(format!(
                    "holes {i} and {j} overlap"
                )));
            }
        }
        validate_children(&h.ring, &h.sub_holes)?;
    }
    Ok(())
}

/// Coordinates round to six decimals (micrometers) on the wire.
fn round6(v: f64) -> f64 {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone)]
struct WireRing(Vec<Point2>);

impl Serialize for WireRing {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|p| [round6(p.x), round6(p.y)]))
    }
}

impl<'de> Deserialize<'de> for WireRing {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(WireRing(raw.into_iter().map(Point2::from).collect()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct HoleJson {
    #[serde(rename = "loop")]
    ring: WireRing,
    #[serde(default)]
    sub_holes: Vec<HoleJson>,
}

/// Wire form: `{"slice", "structure", "author", "outer", "holes": [{"loop", "sub_holes"}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct ContourJson {
    slice: u32,
    structure: String,
    author: String,
    outer: WireRing,
    #[serde(default)]
    holes: Vec<HoleJson>,
}

impl TryFrom<HoleJson> for Hole {
    type Error = GeometryError;
    fn try_from(h: HoleJson) -> Result<Self> {
        Ok(Hole {
            ring: Loop::new(h.ring.0)?,
            sub_holes: h.sub_holes.into_iter().map(Hole::try_from).collect::<Result<_>>()?,
        })
    }
}

impl TryFrom<ContourJson> for Contour {
    type Error = GeometryError;
    fn try_from(c: ContourJson) -> Result<Self> {
        Ok(Contour {
            slice_index: c.slice,
            structure_label: c.structure,
            author_id: c.author,
            outer: Loop::new(c.outer.0)?,
            holes: c.holes.into_iter().map(Hole::try_from).collect::<Result<_>>()?,
        })
    }
}

impl From<&Hole> for HoleJson {
    fn from(h: &Hole) -> Self {
        HoleJson {
            ring: WireRing(h.ring.vertices().to_vec()),
            sub_holes: h.sub_holes.iter().map(HoleJson::from).collect(),
        }
    }
}

impl From<&Contour> for ContourJson {
    fn from(c: &Contour) -> Self {
        ContourJson {
            slice: c.slice_index,
            structure: c.structure_label.clone(),
            author: c.author_id.clone(),
            outer: WireRing(c.outer.vertices().to_vec()),
            holes: c.holes.iter().map(HoleJson::from).collect(),
        }
    }
}

impl Serialize for Contour {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ContourJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Contour {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ContourJson::deserialize(d)?;
        Contour::try_from(raw).map_err(serde::de::Error::custom)
    }
}
