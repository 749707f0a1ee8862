//! Read-only access to ingested datasets.

use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use super::error::{Result, TilerError};
use super::manifest::{DatasetManifest, TileAddress};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Dataset and session ids: ASCII alphanumerics, `-`, `_` and `.`, not starting with `.`.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'))
}

pub fn tile_relative_path(slice: u32, zoom: u32, tx: u32, ty: u32) -> PathBuf {
    Path::new("slices")
        .join(slice.to_string())
        .join(zoom.to_string())
        .join(format!("{tx}_{ty}.png"))
}

fn parse_index(s: &str) -> Result<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return Err(TilerError::MalformedPath(s.to_string()));
    }
    s.parse().map_err(|_| TilerError::MalformedPath(s.to_string()))
}

/// Parses the `{slice}`, `{zoom}` and `{tx}_{ty}.png` segments of a tile URL.
pub fn parse_tile_path(slice: &str, zoom: &str, file: &str) -> Result<TileAddress> {
    let stem = file
        .strip_suffix(".png")
        .ok_or_else(|| TilerError::MalformedPath(file.to_string()))?;
    let (tx, ty) = stem
        .split_once('_')
        .ok_or_else(|| TilerError::MalformedPath(file.to_string()))?;
    Ok(TileAddress {
        slice: parse_index(slice)?,
        zoom: parse_index(zoom)?,
        tx: parse_index(tx)?,
        ty: parse_index(ty)?,
    })
}

#[derive(Debug, Clone)]
pub struct TileStore {
    root: PathBuf,
}

impl TileStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dataset_dir(&self, id: &str) -> Result<PathBuf> {
        if !valid_id(id) {
            return Err(TilerError::MalformedPath(id.to_string()));
        }
        Ok(self.root.join(id))
    }

    fn read(path: &Path, what: impl FnOnce() -> String) -> Result<Vec<u8>> {
        fs::read(path).map_err(|e| match e.kind() {
            ErrorKind::NotFound => TilerError::NotFound(what()),
            _ => e.into(),
        })
    }

    /// Stored manifest bytes, exactly as written at ingest.
    pub fn manifest_bytes(&self, id: &str) -> Result<Vec<u8>> {
        let path = self.dataset_dir(id)?.join(MANIFEST_FILE);
        Self::read(&path, || format!("dataset {id}"))
    }

    pub fn get_manifest(&self, id: &str) -> Result<DatasetManifest> {
        Ok(serde_json::from_slice(&self.manifest_bytes(id)?)?)
    }

    pub fn has_dataset(&self, id: &str) -> bool {
        self.dataset_dir(id).is_ok_and(|d| d.join(MANIFEST_FILE).is_file())
    }

    pub fn get_tile(&self, id: &str, addr: TileAddress) -> Result<Vec<u8>> {
        let manifest = self.get_manifest(id)?;
        manifest.check(addr)?;
        let path = self
            .dataset_dir(id)?
            .join(tile_relative_path(addr.slice, addr.zoom, addr.tx, addr.ty));
        Self::read(&path, || format!("tile {addr:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids() {
        assert!(valid_id("knee-01"));
        assert!(valid_id("a.b_c"));
        assert!(!valid_id(""));
        assert!(!valid_id(".."));
        assert!(!valid_id("a/b"));
        assert!(!valid_id(".hidden"));
    }

    #[test]
    fn tile_paths() {
        assert_eq!(parse_tile_path("3", "0", "1_2.png").unwrap(), TileAddress::new(3, 0, 1, 2));
        for (s, z, f) in [("x", "0", "0_0.png"), ("0", "0", "0_0.jpg"), ("0", "0", "00.png"),
                          ("0", "-1", "0_0.png"), ("01", "0", "0_0.png"), ("0", "0", "0_0_0.png"),
                          ("99999999999", "0", "0_0.png")] {
            assert!(matches!(parse_tile_path(s, z, f), Err(TilerError::MalformedPath(_))), "{s} {z} {f}");
        }
    }
}
