//! Slice ingest: source images to a tile pyramid plus manifest.

use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageDecoder, ImageReader};
use sha2::{Digest, Sha256};
use tracing::{debug, info};

use super::error::{Result, TilerError};
use super::manifest::{zoom_levels_for, DatasetManifest, DEFAULT_TILE_SIZE};
use super::raster::Raster;
use super::store::{tile_relative_path, valid_id, MANIFEST_FILE};

pub const SOURCE_EXTENSIONS: [&str; 6] = ["png", "bmp", "pnm", "pgm", "ppm", "pbm"];

#[derive(Debug, Clone)]
pub struct IngestConfig {
    pub source: PathBuf,
    pub output_root: PathBuf,
    /// Defaults to the source directory name.
    pub dataset_id: Option<String>,
    pub pixel_spacing: f64,
    pub slice_spacing: f64,
    pub tile_size: u32,
    /// Ceiling on decoded pixel memory held at once, in bytes.
    pub memory_budget: Option<usize>,
}

impl IngestConfig {
    pub fn new(source: impl Into<PathBuf>, output_root: impl Into<PathBuf>) -> Self {
        Self {
            source: source.into(),
            output_root: output_root.into(),
            dataset_id: None,
            pixel_spacing: 1.0,
            slice_spacing: 1.0,
            tile_size: DEFAULT_TILE_SIZE,
            memory_budget: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IngestReport {
    pub manifest: DatasetManifest,
    pub dataset_dir: PathBuf,
    pub tiles_written: u64,
    pub peak_resident_bytes: usize,
}

/// Tracks decoded pixel bytes held by the ingest loop.
#[derive(Debug, Default)]
struct MemoryMeter {
    resident: usize,
    peak: usize,
    budget: Option<usize>,
}

impl MemoryMeter {
    fn reserve(&mut self, bytes: usize) -> Result<()> {
        if let Some(budget) = self.budget {
            if self.resident + bytes > budget {
                return Err(TilerError::MemoryBudgetExceeded {
                    requested: bytes,
                    resident: self.resident,
                    budget,
                });
            }
        }
        self.resident += bytes;
        self.peak = self.peak.max(self.resident);
        Ok(())
    }

    fn release(&mut self, bytes: usize) {
        self.resident -= bytes;
    }
}

fn raster_bytes(r: &Raster) -> usize {
    std::mem::size_of_val(r.samples.as_slice())
}

/// Orders `slice2.png` before `slice10.png`.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut a, mut b) = (a, b);
    loop {
        match (a.chars().next(), b.chars().next()) {
            (None, None) => return Ordering::Equal,
            (None, _) => return Ordering::Less,
            (_, None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let na = a.find(|c: char| !c.is_ascii_digit()).unwrap_or(a.len());
                let nb = b.find(|c: char| !c.is_ascii_digit()).unwrap_or(b.len());
                let (da, db) = (a[..na].trim_start_matches('0'), b[..nb].trim_start_matches('0'));
                let ord = da.len().cmp(&db.len()).then(da.cmp(db)).then(na.cmp(&nb));
                if ord != Ordering::Equal {
                    return ord;
                }
                a = &a[na..];
                b = &b[nb..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(&y);
                }
                a = &a[x.len_utf8()..];
                b = &b[y.len_utf8()..];
            }
        }
    }
}

/// Slice images in `dir`, in natural file-name order. Other files are ignored.
pub fn list_slices(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| SOURCE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    files.sort_by(|a, b| {
        let name = |p: &PathBuf| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        natural_cmp(&name(a), &name(b))
    });
    Ok(files)
}

fn unreadable(path: &Path, e: impl ToString) -> TilerError {
    TilerError::UnreadableImage { path: path.to_path_buf(), reason: e.to_string() }
}

fn dimensions(path: &Path) -> Result<(u32, u32)> {
    ImageReader::open(path)?
        .with_guessed_format()?
        .into_dimensions()
        .map_err(|e| unreadable(path, e))
}

/// Tiles every slice into `{output_root}/{id}/`, replacing any previous ingest of the same
/// id only once the new pyramid is complete. Slices are processed one at a time and each
/// pyramid level is dropped as soon as the next one exists.
pub fn ingest_dataset(cfg: &IngestConfig) -> Result<IngestReport> {
    if cfg.tile_size == 0 {
        return Err(TilerError::InvalidConfig("tile_size must be positive".into()));
    }
    for (name, v) in [("pixel_spacing", cfg.pixel_spacing), ("slice_spacing", cfg.slice_spacing)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(TilerError::InvalidConfig(format!("{name} must be positive, got {v}")));
        }
    }
    let dataset_id = match &cfg.dataset_id {
        Some(id) => id.clone(),
        None => cfg
            .source
            .canonicalize()?
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };
    if !valid_id(&dataset_id) {
        return Err(TilerError::InvalidConfig(format!("bad dataset id {dataset_id:?}")));
    }

    let sources = list_slices(&cfg.source)?;
    if sources.is_empty() {
        return Err(TilerError::NoImages(cfg.source.clone()));
    }
    let (width, height) = dimensions(&sources[0])?;
    for p in &sources[1..] {
        let found = dimensions(p)?;
        if found != (width, height) {
            return Err(TilerError::MixedDimensions {
                path: p.clone(),
                expected: (width, height),
                found,
            });
        }
    }

    let mut manifest = DatasetManifest {
        dataset_id: dataset_id.clone(),
        slice_count: sources.len() as u32,
        slice_width_px: width,
        slice_height_px: height,
        pixel_spacing: cfg.pixel_spacing,
        slice_spacing: cfg.slice_spacing,
        tile_size: cfg.tile_size,
        zoom_levels: zoom_levels_for(width, height, cfg.tile_size),
        checksums: Vec::with_capacity(sources.len()),
    };

    fs::create_dir_all(&cfg.output_root)?;
    let staging = cfg.output_root.join(format!(".{dataset_id}.ingest"));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir_all(&staging)?;

    let mut meter = MemoryMeter { budget: cfg.memory_budget, ..Default::default() };
    let mut tiles_written = 0u64;
    let result = (|| -> Result<()> {
        for (slice, path) in sources.iter().enumerate() {
            let digest = tile_slice(&manifest, slice as u32, path, &staging, &mut meter)?;
            tiles_written += manifest.tiles_per_slice();
            manifest.checksums.push(digest);
            debug!(slice, path = %path.display(), "slice tiled");
        }
        fs::write(staging.join(MANIFEST_FILE), manifest.to_json())?;
        Ok(())
    })();
    if let Err(e) = result {
        let _ = fs::remove_dir_all(&staging);
        return Err(e);
    }

    let dataset_dir = cfg.output_root.join(&dataset_id);
    if dataset_dir.exists() {
        fs::remove_dir_all(&dataset_dir)?;
    }
    fs::rename(&staging, &dataset_dir)?;
    info!(dataset = %dataset_id, slices = manifest.slice_count, tiles = tiles_written, "ingest complete");
    Ok(IngestReport { manifest, dataset_dir, tiles_written, peak_resident_bytes: meter.peak })
}

fn tile_slice(
    manifest: &DatasetManifest,
    slice: u32,
    path: &Path,
    out: &Path,
    meter: &mut MemoryMeter,
) -> Result<String> {
    let decoder = ImageReader::open(path)?
        .with_guessed_format()?
        .into_decoder()
        .map_err(|e| unreadable(path, e))?;
    let decoded_len = decoder.total_bytes() as usize;
    meter.reserve(decoded_len)?;
    let img = DynamicImage::from_decoder(decoder).map_err(|e| unreadable(path, e))?;
    let mut level = Raster::from_image(&img)
        .ok_or_else(|| unreadable(path, format!("unsupported pixel format {:?}", img.color())))?;
    meter.reserve(raster_bytes(&level))?;
    drop(img);
    meter.release(decoded_len);

    let mut hasher = Sha256::new();
    let ts = manifest.tile_size;
    for zoom in 0..manifest.zoom_levels {
        let dir = out.join(tile_relative_path(slice, zoom, 0, 0));
        fs::create_dir_all(dir.parent().expect("tile path has a parent"))?;
        let (cols, rows) = manifest.grid(zoom);
        for ty in 0..rows {
            for tx in 0..cols {
                let (x, y) = (tx * ts, ty * ts);
                let tile = level.crop(x, y, ts.min(level.width - x), ts.min(level.height - y));
                let bytes = tile.encode_png()?;
                hasher.update(&bytes);
                fs::write(out.join(tile_relative_path(slice, zoom, tx, ty)), &bytes)?;
            }
        }
        if zoom + 1 < manifest.zoom_levels {
            let next = level.half();
            meter.reserve(raster_bytes(&next))?;
            meter.release(raster_bytes(&level));
            level = next;
        }
    }
    meter.release(raster_bytes(&level));
    Ok(hex::encode(hasher.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order() {
        let mut v = vec!["s10.png", "s2.png", "s1.png", "a.png", "s02.png"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, vec!["a.png", "s1.png", "s2.png", "s02.png", "s10.png"]);
    }

    #[test]
    fn meter_enforces_budget() {
        let mut m = MemoryMeter { budget: Some(10), ..Default::default() };
        m.reserve(6).unwrap();
        assert!(m.reserve(5).is_err());
        m.release(6);
        m.reserve(10).unwrap();
        assert_eq!(m.peak, 10);
    }
}
