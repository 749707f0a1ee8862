use serde::{Deserialize, Serialize};

use super::error::{CollabError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeRecord {
    pub grader_id: String,
    pub author_id: String,
    pub structure_label: String,
    pub stars: u8,
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeSummary {
    pub author_id: String,
    pub structure_label: String,
    pub average: f64,
    pub count: usize,
}

pub fn validate_stars(stars: i64) -> Result<u8> {
    if (1..=5).contains(&stars) {
        Ok(stars as u8)
    } else {
        Err(CollabError::InvalidStars(stars))
    }
}

/// Mean rounded half-up to two decimals, computed in integer hundredths.
pub fn average_half_up(stars: &[u8]) -> Option<f64> {
    if stars.is_empty() {
        return None;
    }
    let sum: u64 = stars.iter().map(|&s| s as u64).sum();
    let n = stars.len() as u64;
    let hundredths = (200 * sum + n) / (2 * n);
    Some(hundredths as f64 / 100.0)
}

/// One record per (grader, author, structure), kept sorted by that key.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradeBook {
    records: Vec<GradeRecord>,
}

impl GradeBook {
    pub fn records(&self) -> &[GradeRecord] {
        &self.records
    }

    fn key(r: &GradeRecord) -> (&str, &str, &str) {
        (&r.grader_id, &r.author_id, &r.structure_label)
    }

    pub fn upsert(&mut self, record: GradeRecord) {
        match self.records.binary_search_by(|r| Self::key(r).cmp(&Self::key(&record))) {
            Ok(i) => self.records[i] = record,
            Err(i) => self.records.insert(i, record),
        }
    }

    pub fn remove(&mut self, grader: &str, author: &str, structure: &str) -> Option<GradeRecord> {
        let i = self
            .records
            .binary_search_by(|r| Self::key(r).cmp(&(grader, author, structure)))
            .ok()?;
        Some(self.records.remove(i))
    }

    pub fn summary(&self, author: &str, structure: &str) -> GradeSummary {
        let stars: Vec<u8> = self
            .records
            .iter()
            .filter(|r| r.author_id == author && r.structure_label == structure)
            .map(|r| r.stars)
            .collect();
        GradeSummary {
            author_id: author.to_string(),
            structure_label: structure.to_string(),
            average: average_half_up(&stars).unwrap_or(0.0),
            count: stars.len(),
        }
    }
}
