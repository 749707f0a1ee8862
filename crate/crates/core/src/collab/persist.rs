//! Session documents on disk:
//! `{root}/{session_id}/state.json` and `{root}/{session_id}/meshes/{structure}_{version}.obj`.
//! Atlases live in `{root}/atlases/{atlas_id}.json`.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::atlas::Atlas;
use super::error::{CollabError, Result};
use super::rebuild::build_structure_mesh;
use super::session::SessionState;
use crate::geometry::{obj_string, MeshStats};
use crate::tiler::valid_id;

pub const STATE_FILE: &str = "state.json";
pub const ATLAS_DIR: &str = "atlases";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredVersion {
    pub revision: u64,
    /// Hex sha256 of the stored state document.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestoredMesh {
    pub structure: String,
    pub stored: Option<MeshStats>,
    pub recomputed: MeshStats,
}

impl RestoredMesh {
    pub fn matches(&self) -> bool {
        self.stored.as_ref() == Some(&self.recomputed)
    }
}

/// File-name form of a structure label: ASCII alphanumerics, `-` and `_` kept, every other
/// byte percent-encoded.
pub fn label_file_stem(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for b in label.bytes() {
        if b.is_ascii_alphanumeric() || b == b'-' || b == b'_' {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(
        ".{name}.{}.{}.tmp",
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

#[derive(Debug, Clone)]
pub struct SessionStore {
    root: PathBuf,
}

impl SessionStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn session_dir(&self, id: &str) -> Result<PathBuf> {
        if !valid_id(id) || id == ATLAS_DIR {
            return Err(CollabError::InvalidId(id.to_string()));
        }
        Ok(self.root.join(id))
    }

    pub fn mesh_path(&self, id: &str, structure: &str, version: u64) -> Result<PathBuf> {
        Ok(self
            .session_dir(id)?
            .join("meshes")
            .join(format!("{}_{version}.obj", label_file_stem(structure))))
    }

    /// Writes the state document and any cached mesh not yet on disk.
    pub fn save(&self, state: &SessionState) -> Result<StoredVersion> {
        let dir = self.session_dir(&state.session_id)?;
        let bytes = serde_json::to_vec_pretty(state)?;
        for (label, s) in &state.structures {
            if let Some(mesh) = &s.mesh {
                let path = self.mesh_path(&state.session_id, label, s.mesh_version)?;
                if !path.exists() {
                    write_atomic(&path, obj_string(mesh).as_bytes())?;
                }
            }
        }
        write_atomic(&dir.join(STATE_FILE), &bytes)?;
        Ok(StoredVersion { revision: state.revision, digest: hex::encode(Sha256::digest(&bytes)) })
    }

    pub fn stored_version(&self, id: &str) -> Result<StoredVersion> {
        let bytes = self.read_state_bytes(id)?;
        let state: SessionState = serde_json::from_slice(&bytes)?;
        Ok(StoredVersion { revision: state.revision, digest: hex::encode(Sha256::digest(&bytes)) })
    }

    fn read_state_bytes(&self, id: &str) -> Result<Vec<u8>> {
        let path = self.session_dir(id)?.join(STATE_FILE);
        fs::read(&path).map_err(|e| match e.kind() {
            ErrorKind::NotFound => CollabError::UnknownSession(id.to_string()),
            _ => e.into(),
        })
    }

    /// Loads a stored session without meshes; see [`restore_meshes`].
    pub fn load(&self, id: &str) -> Result<SessionState> {
        Ok(serde_json::from_slice(&self.read_state_bytes(id)?)?)
    }

    /// Ids of every stored session, sorted.
    pub fn list(&self) -> Result<Vec<String>> {
        let mut ids = Vec::new();
        let entries = match fs::read_dir(&self.root) {
            Ok(e) => e,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(ids),
            Err(e) => return Err(e.into()),
        };
        for e in entries {
            let e = e?;
            let name = e.file_name().to_string_lossy().into_owned();
            if valid_id(&name) && name != ATLAS_DIR && e.path().join(STATE_FILE).is_file() {
                ids.push(name);
            }
        }
        ids.sort();
        Ok(ids)
    }

    pub fn save_atlas(&self, atlas: &Atlas) -> Result<()> {
        if !valid_id(&atlas.atlas_id) {
            return Err(CollabError::InvalidId(atlas.atlas_id.clone()));
        }
        let path = self.root.join(ATLAS_DIR).join(format!("{}.json", atlas.atlas_id));
        write_atomic(&path, &serde_json::to_vec_pretty(atlas)?)?;
        Ok(())
    }

    pub fn load_atlas(&self, atlas_id: &str) -> Result<Atlas> {
        if !valid_id(atlas_id) {
            return Err(CollabError::UnknownAtlas(atlas_id.to_string()));
        }
        let path = self.root.join(ATLAS_DIR).join(format!("{atlas_id}.json"));
        let bytes = fs::read(&path).map_err(|e| match e.kind() {
            ErrorKind::NotFound => CollabError::UnknownAtlas(atlas_id.to_string()),
            _ => e.into(),
        })?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}

/// Recomputes every structure mesh that had been built before the state was stored and
/// reports how the recomputed statistics compare.
pub fn restore_meshes(state: &mut SessionState) -> Vec<RestoredMesh> {
    let spacing = state.config.slice_spacing;
    let labels: Vec<String> = state.structures.keys().cloned().collect();
    let mut out = Vec::new();
    for label in labels {
        let Some(input) = state.rebuild_input(&label) else { continue };
        let s = &state.structures[&label];
        if s.mesh_version == 0 {
            continue;
        }
        let (mesh, stats) = build_structure_mesh(&input, spacing);
        let s = state.structures.get_mut(&label).expect("label exists");
        out.push(RestoredMesh { structure: label, stored: s.mesh_stats.clone(), recomputed: stats });
        s.mesh = Some(Arc::new(mesh));
    }
    out
}
