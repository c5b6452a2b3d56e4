//! The four-parameter local enhancement transform.
//!
//! Each output pixel is
//!
//! ```text
//! v = k * M / (sigma + b) * (u - c * mu) + mu^a
//! ```
//!
//! where `M` is the global mean and `mu`, `sigma` the local window mean and
//! standard deviation. The result is clamped to `[0, 255]` and rounded half
//! up to an 8-bit level.

use serde::{Deserialize, Serialize};

use crate::image::GrayImage;
use crate::window::StatMaps;
use crate::{Error, Result};

/// Floor applied to `sigma + b` so the transform is total at `sigma = b = 0`.
pub const DENOMINATOR_FLOOR: f64 = 1e-6;

/// Transform parameters `(a, b, c, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnhanceParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k: f64,
}

impl EnhanceParams {
    pub fn new(a: f64, b: f64, c: f64, k: f64) -> Self {
        Self { a, b, c, k }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.k]
    }

    pub fn from_array([a, b, c, k]: [f64; 4]) -> Self {
        Self { a, b, c, k }
    }
}

/// Axis-aligned search box over `(a, b, c, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub lo: [f64; 4],
    pub hi: [f64; 4],
}

impl Default for ParamBounds {
    /// a in [0, 1.5], b in [0, 1], c in [0, 0.5], k in [0.5, 1.5].
    fn default() -> Self {
        Self {
            lo: [0.0, 0.0, 0.0, 0.5],
            hi: [1.5, 1.0, 0.5, 1.5],
        }
    }
}

impl ParamBounds {
    pub fn new(lo: [f64; 4], hi: [f64; 4]) -> Result<Self> {
        let b = Self { lo, hi };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        for d in 0..4 {
            if !(self.lo[d].is_finite() && self.hi[d].is_finite() && self.lo[d] < self.hi[d]) {
                return Err(Error::InvalidConfig(format!(
                    "bounds for dimension {d} must satisfy lo < hi, got [{}, {}]",
                    self.lo[d], self.hi[d]
                )));
            }
        }
        Ok(())
    }

    /// Projects a point onto the box coordinate-wise.
    pub fn clamp(&self, mut x: [f64; 4]) -> [f64; 4] {
        for (d, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lo[d], self.hi[d]);
        }
        x
    }

    pub fn contains(&self, x: &[f64; 4]) -> bool {
        x.iter()
            .enumerate()
            .all(|(d, &v)| self.lo[d] <= v && v <= self.hi[d])
    }
}

/// Real-valued transform output for one pixel, before clamping and rounding.
#[inline]
pub fn transform_value(u: f64, mean: f64, std: f64, global_mean: f64, p: &EnhanceParams) -> f64 {
    let denom = (std + p.b).max(DENOMINATOR_FLOOR);
    // powf gives 0^0 = 1 and 0^a = 0 for a > 0.
    p.k * global_mean / denom * (u - p.c * mean) + mean.powf(p.a)
}

/// Clamps to `[0, 255]` and rounds half up.
#[inline]
pub fn quantize(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    (v.clamp(0.0, 255.0) + 0.5).floor() as u8
}

/// Enhances `img` using precomputed statistics of that same image.
pub fn apply_transform(
    img: &GrayImage,
    params: &EnhanceParams,
    stats: &StatMaps,
) -> Result<GrayImage> {
    if img.dimensions() != stats.dimensions() {
        return Err(Error::DimensionMismatch {
            image: img.dimensions(),
            stats: stats.dimensions(),
        });
    }
    let pixels = img
        .pixels()
        .iter()
        .zip(stats.mean.iter().zip(&stats.std))
        .map(|(&u, (&m, &s))| {
            quantize(transform_value(
                f64::from(u),
                m,
                s,
                stats.global_mean,
                params,
            ))
        })
        .collect();
    GrayImage::new(img.width(), img.height(), pixels)
}
