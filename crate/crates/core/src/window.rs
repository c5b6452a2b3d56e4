//! Windowed mean and standard deviation maps.
//!
//! Windows are centered on each pixel and use clamp-to-edge replication, so
//! every pixel sees a full `n x n` neighbourhood. The standard deviation is
//! the population form (divisor `n * n`).

use crate::image::GrayImage;
use crate::{Error, Result};

/// Default window side for the enhancement transform statistics.
pub const DEFAULT_WINDOW: usize = 3;

/// Per-pixel local statistics plus the global mean of the source image.
#[derive(Debug, Clone, PartialEq)]
pub struct StatMaps {
    pub window: usize,
    pub width: usize,
    pub height: usize,
    /// Local mean, row-major.
    pub mean: Vec<f64>,
    /// Local population standard deviation, row-major.
    pub std: Vec<f64>,
    pub global_mean: f64,
}

impl StatMaps {
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

/// Exact integer window sums `(sum, sum of squares)` for every pixel.
fn window_sums(img: &GrayImage, n: usize) -> Result<(Vec<u64>, Vec<u64>)> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidWindow(n));
    }
    let (w, h) = img.dimensions();
    let r = (n / 2) as isize;

    // Horizontal pass over every source row (with clamped columns), then a
    // vertical pass over clamped rows of those partial sums.
    let mut row_sum = vec![0u64; w * h];
    let mut row_sq = vec![0u64; w * h];
    for row in 0..h {
        let line = &img.pixels()[row * w..(row + 1) * w];
        let at = |c: isize| u64::from(line[c.clamp(0, w as isize - 1) as usize]);
        let (mut s, mut q) = (0u64, 0u64);
        for c in -r..=r {
            let v = at(c);
            s += v;
            q += v * v;
        }
        for col in 0..w {
            row_sum[row * w + col] = s;
            row_sq[row * w + col] = q;
            let (out, inn) = (at(col as isize - r), at(col as isize + r + 1));
            s = s + inn - out;
            q = q + inn * inn - out * out;
        }
    }

    let mut sum = vec![0u64; w * h];
    let mut sq = vec![0u64; w * h];
    for col in 0..w {
        let at = |row: isize| (row.clamp(0, h as isize - 1) as usize) * w + col;
        let (mut s, mut q) = (0u64, 0u64);
        for row in -r..=r {
            s += row_sum[at(row)];
            q += row_sq[at(row)];
        }
        for row in 0..h {
            sum[row * w + col] = s;
            sq[row * w + col] = q;
            let (out, inn) = (at(row as isize - r), at(row as isize + r + 1));
            s = s + row_sum[inn] - row_sum[out];
            q = q + row_sq[inn] - row_sq[out];
        }
    }
    Ok((sum, sq))
}

fn variance_from_sums(sum: u64, sq: u64, count: u64) -> f64 {
    // count * sq - sum^2 is exact and non-negative in integer arithmetic.
    let num = u128::from(count) * u128::from(sq) - u128::from(sum) * u128::from(sum);
    num as f64 / (count as f64 * count as f64)
}

/// Local mean and standard deviation maps over centered `n x n` windows.
pub fn local_stats(img: &GrayImage, n: usize) -> Result<StatMaps> {
    let (sum, sq) = window_sums(img, n)?;
    let count = (n * n) as u64;
    let mean = sum.iter().map(|&s| s as f64 / count as f64).collect();
    let std = sum
        .iter()
        .zip(&sq)
        .map(|(&s, &q)| variance_from_sums(s, q, count).sqrt())
        .collect();
    Ok(StatMaps {
        window: n,
        width: img.width(),
        height: img.height(),
        mean,
        std,
        global_mean: img.global_mean(),
    })
}

/// Local population variance over centered `n x n` windows.
pub fn local_variance(img: &GrayImage, n: usize) -> Result<Vec<f64>> {
    let (sum, sq) = window_sums(img, n)?;
    let count = (n * n) as u64;
    Ok(sum
        .iter()
        .zip(&sq)
        .map(|(&s, &q)| variance_from_sums(s, q, count))
        .collect())
}
