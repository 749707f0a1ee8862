//! Uncompressed pixel buffers with 8- or 16-bit channels.

use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ColorType, DynamicImage, ExtendedColorType, ImageEncoder};

use super::error::{Result, TilerError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub color: ColorType,
    /// One entry per channel sample, row-major.
    pub samples: Vec<u16>,
}

fn supported(color: ColorType) -> bool {
    matches!(
        color,
        ColorType::L8
            | ColorType::La8
            | ColorType::Rgb8
            | ColorType::Rgba8
            | ColorType::L16
            | ColorType::La16
            | ColorType::Rgb16
            | ColorType::Rgba16
    )
}

impl Raster {
    pub fn channels(&self) -> usize {
        self.color.channel_count() as usize
    }

    fn wide(&self) -> bool {
        self.color.bytes_per_pixel() as usize > self.channels()
    }

    /// Resident size in bytes as the source image would hold it.
    pub fn byte_len(&self) -> usize {
        self.samples.len() * if self.wide() { 2 } else { 1 }
    }

    pub fn from_image(img: &DynamicImage) -> Option<Self> {
        let color = img.color();
        if !supported(color) {
            return None;
        }
        let bytes = img.as_bytes();
        let samples = if color.bytes_per_pixel() as usize > color.channel_count() as usize {
            bytes.chunks_exact(2).map(|b| u16::from_ne_bytes([b[0], b[1]])).collect()
        } else {
            bytes.iter().map(|&b| b as u16).collect()
        };
        Some(Self { width: img.width(), height: img.height(), color, samples })
    }

    /// Pixel bytes in the layout `image` uses (16-bit samples native-endian).
    pub fn to_bytes(&self) -> Vec<u8> {
        if self.wide() {
            self.samples.iter().flat_map(|s| s.to_ne_bytes()).collect()
        } else {
            self.samples.iter().map(|&s| s as u8).collect()
        }
    }

    /// 2x box-filter downscale. Odd trailing rows/columns average the pixels that exist;
    /// means round half up.
    pub fn half(&self) -> Raster {
        let c = self.channels();
        let (w, h) = (self.width as usize, self.height as usize);
        let (ow, oh) = (w.div_ceil(2), h.div_ceil(2));
        let mut out = Vec::with_capacity(ow * oh * c);
        for oy in 0..oh {
            let ys = [2 * oy, 2 * oy + 1];
            for ox in 0..ow {
                let xs = [2 * ox, 2 * ox + 1];
                for ch in 0..c {
                    let (mut sum, mut n) = (0u32, 0u32);
                    for &y in ys.iter().filter(|&&y| y < h) {
                        for &x in xs.iter().filter(|&&x| x < w) {
                            sum += self.samples[(y * w + x) * c + ch] as u32;
                            n += 1;
                        }
                    }
                    out.push(((sum + n / 2) / n) as u16);
                }
            }
        }
        Raster { width: ow as u32, height: oh as u32, color: self.color, samples: out }
    }

    pub fn crop(&self, x: u32, y: u32, w: u32, h: u32) -> Raster {
        let c = self.channels();
        let mut samples = Vec::with_capacity(w as usize * h as usize * c);
        for row in y..y + h {
            let start = (row as usize * self.width as usize + x as usize) * c;
            samples.extend_from_slice(&self.samples[start..start + w as usize * c]);
        }
        Raster { width: w, height: h, color: self.color, samples }
    }

    /// Writes `tile` into this raster with its top-left corner at `(x, y)`.
    pub fn paste(&mut self, tile: &Raster, x: u32, y: u32) {
        let c = self.channels();
        for row in 0..tile.height {
            let dst = ((y + row) as usize * self.width as usize + x as usize) * c;
            let src = row as usize * tile.width as usize * c;
            let n = tile.width as usize * c;
            self.samples[dst..dst + n].copy_from_slice(&tile.samples[src..src + n]);
        }
    }

    pub fn blank(width: u32, height: u32, color: ColorType) -> Raster {
        let n = width as usize * height as usize * color.channel_count() as usize;
        Raster { width, height, color, samples: vec![0; n] }
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        let enc = PngEncoder::new_with_quality(&mut out, CompressionType::Default, FilterType::Adaptive);
        let ext: ExtendedColorType = self.color.into();
        enc.write_image(&self.to_bytes(), self.width, self.height, ext)
            .map_err(|e| TilerError::Encode(e.to_string()))?;
        Ok(out)
    }

    pub fn decode_png(bytes: &[u8]) -> Result<Raster> {
        let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
            .map_err(|e| TilerError::Encode(e.to_string()))?;
        Raster::from_image(&img).ok_or_else(|| TilerError::Encode("unsupported pixel format".into()))
    }
}
