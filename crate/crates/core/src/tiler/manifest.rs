use serde::{Deserialize, Serialize};

use super::error::{Result, TilerError};

pub const DEFAULT_TILE_SIZE: u32 = 256;

/// Dataset metadata written next to the tiles. Field order here is the JSON field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_id: String,
    pub slice_count: u32,
    pub slice_width_px: u32,
    pub slice_height_px: u32,
    /// mm per pixel
    pub pixel_spacing: f64,
    /// mm between slices
    pub slice_spacing: f64,
    pub tile_size: u32,
    pub zoom_levels: u32,
    /// Hex sha256 per slice over that slice's tile bytes, zoom-major then row-major.
    pub checksums: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TileAddress {
    pub slice: u32,
    /// 0 is full resolution.
    pub zoom: u32,
    pub tx: u32,
    pub ty: u32,
}

impl TileAddress {
    pub fn new(slice: u32, zoom: u32, tx: u32, ty: u32) -> Self {
        Self { slice, zoom, tx, ty }
    }
}

/// `floor(log2(max(w, h) / tile)) + 1`, at least 1.
pub fn zoom_levels_for(width: u32, height: u32, tile_size: u32) -> u32 {
    let longest = width.max(height);
    if tile_size == 0 || longest <= tile_size {
        return 1;
    }
    let mut levels = 1;
    while (tile_size as u64) << levels <= longest as u64 {
        levels += 1;
    }
    levels
}

/// Pixel dimensions of a slice at `zoom`: each level halves, rounding up.
pub fn level_dimensions(width: u32, height: u32, zoom: u32) -> (u32, u32) {
    let mut d = (width, height);
    for _ in 0..zoom {
        d = (d.0.div_ceil(2), d.1.div_ceil(2));
    }
    d
}

/// `(columns, rows)` of the tile grid at `zoom`.
pub fn grid_size(width: u32, height: u32, tile_size: u32, zoom: u32) -> (u32, u32) {
    let span = (tile_size as u64) << zoom;
    (
        (width as u64).div_ceil(span) as u32,
        (height as u64).div_ceil(span) as u32,
    )
}

impl DatasetManifest {
    pub fn grid(&self, zoom: u32) -> (u32, u32) {
        grid_size(self.slice_width_px, self.slice_height_px, self.tile_size, zoom)
    }

    pub fn tiles_per_slice(&self) -> u64 {
        (0..self.zoom_levels)
            .map(|z| {
                let (c, r) = self.grid(z);
                c as u64 * r as u64
            })
            .sum()
    }

    /// Every address of one slice in storage order: zoom, then row, then column.
    pub fn slice_addresses(&self, slice: u32) -> impl Iterator<Item = TileAddress> + '_ {
        (0..self.zoom_levels).flat_map(move |zoom| {
            let (cols, rows) = self.grid(zoom);
            (0..rows).flat_map(move |ty| (0..cols).map(move |tx| TileAddress { slice, zoom, tx, ty }))
        })
    }

    pub fn check(&self, addr: TileAddress) -> Result<()> {
        if addr.slice >= self.slice_count {
            return Err(TilerError::NotFound(format!(
                "slice {} of {}",
                addr.slice, self.slice_count
            )));
        }
        if addr.zoom >= self.zoom_levels {
            return Err(TilerError::NotFound(format!(
                "zoom {} of {}",
                addr.zoom, self.zoom_levels
            )));
        }
        let (cols, rows) = self.grid(addr.zoom);
        if addr.tx >= cols || addr.ty >= rows {
            return Err(TilerError::NotFound(format!(
                "tile {}_{} outside {cols}x{rows} grid",
                addr.tx, addr.ty
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zoom_levels() {
        assert_eq!(zoom_levels_for(256, 256, 256), 1);
        assert_eq!(zoom_levels_for(100, 30, 256), 1);
        assert_eq!(zoom_levels_for(511, 256, 256), 1);
        assert_eq!(zoom_levels_for(512, 10, 256), 2);
        assert_eq!(zoom_levels_for(1024, 1024, 256), 3);
        assert_eq!(zoom_levels_for(1000, 2048, 256), 4);
    }

    #[test]
    fn grid_matches_halved_dimensions() {
        for (w, h) in [(1024, 1024), (1000, 777), (257, 3000), (1, 1)] {
            for z in 0..6 {
                let (lw, lh) = level_dimensions(w, h, z);
                assert_eq!(grid_size(w, h, 256, z), (lw.div_ceil(256), lh.div_ceil(256)));
            }
        }
    }

    #[test]
    fn address_checks() {
        let m = DatasetManifest {
            dataset_id: "d".into(),
            slice_count: 2,
            slice_width_px: 1024,
            slice_height_px: 600,
            pixel_spacing: 0.33,
            slice_spacing: 1.0,
            tile_size: 256,
            zoom_levels: 3,
            checksums: vec![],
        };
        assert_eq!(m.grid(0), (4, 3));
        assert_eq!(m.grid(2), (1, 1));
        assert_eq!(m.tiles_per_slice(), 12 + 4 + 1);
        assert_eq!(m.slice_addresses(1).count(), 17);
        assert!(m.check(TileAddress::new(1, 0, 3, 2)).is_ok());
        assert!(m.check(TileAddress::new(2, 0, 0, 0)).is_err());
        assert!(m.check(TileAddress::new(0, 3, 0, 0)).is_err());
        assert!(m.check(TileAddress::new(0, 1, 2, 0)).is_err());
    }
}
