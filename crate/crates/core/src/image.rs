//! The 8-bit single-channel raster everything else operates on.

use std::path::Path;

use crate::{Error, Result};

/// Smallest accepted side length; a 3x3 window must fit.
pub const MIN_SIDE: usize = 3;

/// Number of gray levels of an 8-bit image.
pub const LEVELS: usize = 256;

/// Row-major 8-bit gray-scale image with both sides at least [`MIN_SIDE`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(Error::TooSmall { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::Malformed(format!("{width}x{height} overflows")))?;
        if pixels.len() != expected {
            return Err(Error::Malformed(format!(
                "expected {expected} pixels for {width}x{height}, got {}",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image filled with a single gray level.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width.saturating_mul(height));
        for row in 0..height {
            for col in 0..width {
                pixels.push(f(row, col));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    /// Always false; a valid image has at least nine pixels.
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    /// Pixel lookup with clamp-to-edge replication for out-of-range coordinates.
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize) -> u8 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.pixels[r * self.width + c]
    }

    /// Mean intensity over the whole image.
    pub fn global_mean(&self) -> f64 {
        let sum: u64 = self.pixels.iter().map(|&p| u64::from(p)).sum();
        sum as f64 / self.pixels.len() as f64
    }

    /// Count of pixels at each of the 256 gray levels.
    pub fn histogram(&self) -> [u64; LEVELS] {
        let mut counts = [0u64; LEVELS];
        for &p in &self.pixels {
            counts[p as usize] += 1;
        }
        counts
    }

    /// Applies a gray-level lookup table to every pixel.
    pub fn map_levels(&self, lut: &[u8; LEVELS]) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| lut[p as usize]).collect(),
        }
    }

    /// Extracts the `width` x `height` sub-image whose top-left corner is (`row`, `col`).
    pub fn crop(&self, row: usize, col: usize, width: usize, height: usize) -> Result<GrayImage> {
        if row + height > self.height || col + width > self.width {
            return Err(Error::InvalidConfig(format!(
                "crop {width}x{height}+{col}+{row} exceeds {}x{}",
                self.width, self.height
            )));
        }
        Self::from_fn(width, height, |r, c| self.get(row + r, col + c))
    }

    /// Reads a binary PGM (P5, maxval 255) or 8-bit gray PNG file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        crate::codec::load_image(path)
    }

    /// Writes the image as binary PGM (P5).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::codec::save_image(self, path)
    }
}

/// Mean intensity over the whole image.
pub fn global_mean(img: &GrayImage) -> f64 {
    img.global_mean()
}

/// Count of pixels at each of the 256 gray levels.
pub fn histogram(img: &GrayImage) -> [u64; LEVELS] {
    img.histogram()
}
