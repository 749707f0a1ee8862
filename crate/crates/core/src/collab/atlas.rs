use serde::{Deserialize, Serialize};

use crate::geometry::Contour;

/// Expert reference contours for one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atlas {
    pub atlas_id: String,
    pub dataset_id: String,
    pub contours: Vec<Contour>,
}

impl Atlas {
    pub fn entries(&self, slice: u32, structure: &str) -> Vec<&Contour> {
        self.contours
            .iter()
            .filter(|c| c.slice_index == slice && c.structure_label == structure)
            .collect()
    }
}
