//! Slice datasets as multi-zoom PNG tile pyramids.
//!
//! Layout under the output root:
//! `{id}/manifest.json` and `{id}/slices/{slice}/{zoom}/{tx}_{ty}.png`.

mod error;
mod manifest;
mod pyramid;
mod raster;
mod store;

pub use error::{Result, TilerError};
pub use manifest::{grid_size, level_dimensions, zoom_levels_for, DatasetManifest, TileAddress, DEFAULT_TILE_SIZE};
pub use pyramid::{ingest_dataset, list_slices, IngestConfig, IngestReport, SOURCE_EXTENSIONS};
pub use raster::Raster;
pub use store::{parse_tile_path, tile_relative_path, valid_id, TileStore, MANIFEST_FILE};
