//! Objective fitness and image-quality metrics.
//!
//! The fitness of an enhanced image `I` is
//!
//! ```text
//! F = ln(ln(E)) * n_ep / (W * H) * exp(H(I))
//! ```
//!
//! with `E` the sum of Sobel magnitudes, `n_ep` the number of pixels whose
//! magnitude exceeds an Otsu threshold, and `H(I)` the natural-log entropy of
//! the gray-level histogram. When `E <= e` or `n_ep == 0` the fitness is
//! pinned to 0.

use serde::{Deserialize, Serialize};

use crate::image::{GrayImage, LEVELS};
use crate::window::local_variance;

/// Local-variance cut separating detail from background pixels.
pub const DETAIL_VARIANCE_THRESHOLD: f64 = 150.0;

/// Number of equal-width bins used by [`auto_threshold`].
pub const THRESHOLD_BINS: usize = 256;

/// Fitness together with the factors it was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessBreakdown {
    pub fitness: f64,
    /// Sum of unthresholded Sobel magnitudes.
    pub edge_energy: f64,
    /// `ln(ln(edge_energy))`; absent when `edge_energy <= e`.
    pub log_log_term: Option<f64>,
    pub edge_count: u64,
    pub edge_fraction: f64,
    pub entropy: f64,
    pub threshold: f64,
    /// True when the degenerate-input guard forced the fitness to 0.
    pub guarded: bool,
}

/// Detail variance / background variance of an image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DvBv {
    pub dv: f64,
    pub bv: f64,
    pub foreground_count: u64,
    pub background_count: u64,
}

/// Sobel gradient magnitude per pixel, row-major, with clamp-to-edge borders.
pub fn sobel_magnitude(img: &GrayImage) -> Vec<f64> {
    let (w, h) = img.dimensions();
    let pw = w + 2;
    // One-pixel replicated border.
    let mut padded = vec![0i32; pw * (h + 2)];
    for row in 0..h + 2 {
        for col in 0..pw {
            padded[row * pw + col] = i32::from(img.get_clamped(row as isize - 1, col as isize - 1));
        }
    }
    let mut out = Vec::with_capacity(w * h);
    for row in 1..=h {
        let up = &padded[(row - 1) * pw..row * pw];
        let mid = &padded[row * pw..(row + 1) * pw];
        let down = &padded[(row + 1) * pw..(row + 2) * pw];
        for col in 1..=w {
            let (l, r) = (col - 1, col + 1);
            // Horizontal difference (right column minus left column).
            let dg = up[r] + 2 * mid[r] + down[r] - up[l] - 2 * mid[l] - down[l];
            // Vertical difference (row below minus row above).
            let dh = down[r] + 2 * down[col] + down[l] - up[r] - 2 * up[col] - up[l];
            out.push(f64::from(dh * dh + dg * dg).sqrt());
        }
    }
    out
}

fn bin_index(v: f64, max: f64) -> usize {
    ((v / max * THRESHOLD_BINS as f64) as usize).min(THRESHOLD_BINS - 1)
}

/// Otsu threshold over the magnitudes binned into 256 equal-width bins on `[0, max]`.
///
/// The cut after bin `k` maximizing the between-class variance is returned as
/// the real value `(k + 1) * max / 256`. Returns 0 for an all-zero map and
/// `max` when every value falls in one bin.
pub fn auto_threshold(grad: &[f64]) -> f64 {
    let max = grad.iter().copied().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return 0.0;
    }
    let mut hist = [0u64; THRESHOLD_BINS];
    for &v in grad {
        hist[bin_index(v, max)] += 1;
    }
    let total = grad.len() as f64;
    let total_sum: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &n)| i as f64 * n as f64)
        .sum();

    let (mut w0, mut s0) = (0.0f64, 0.0f64);
    let mut best: Option<(usize, f64)> = None;
    for (k, &n) in hist.iter().enumerate().take(THRESHOLD_BINS - 1) {
        if n == 0 {
            continue;
        }
        w0 += n as f64;
        s0 += k as f64 * n as f64;
        let w1 = total - w0;
        if w1 <= 0.0 {
            break;
        }
        let diff = s0 / w0 - (total_sum - s0) / w1;
        let between = w0 * w1 * diff * diff;
        if best.is_none_or(|(_, b)| between > b) {
            best = Some((k, between));
        }
    }
    match best {
        Some((k, _)) => (k + 1) as f64 * max / THRESHOLD_BINS as f64,
        None => max,
    }
}

/// Number of magnitudes strictly greater than `threshold`.
pub fn edge_pixel_count(grad: &[f64], threshold: f64) -> u64 {
    grad.iter().filter(|&&v| v > threshold).count() as u64
}

/// Natural-log Shannon entropy of the gray-level histogram, in `[0, ln 256]`.
pub fn entropy(img: &GrayImage) -> f64 {
    entropy_of_histogram(&img.histogram())
}

pub(crate) fn entropy_of_histogram(hist: &[u64; LEVELS]) -> f64 {
    let total: u64 = hist.iter().sum();
    let total = total as f64;
    -hist
        .iter()
        .filter(|&&n| n > 0)
        .map(|&n| {
            let p = n as f64 / total;
            p * p.ln()
        })
        .sum::<f64>()
}

/// Combines precomputed factors into a [`FitnessBreakdown`], applying the guard.
pub fn combine(
    edge_energy: f64,
    edge_count: u64,
    pixels: usize,
    entropy: f64,
    threshold: f64,
) -> FitnessBreakdown {
    let edge_fraction = edge_count as f64 / pixels as f64;
    let log_log_term = (edge_energy > std::f64::consts::E).then(|| edge_energy.ln().ln());
    let guarded = log_log_term.is_none() || edge_count == 0;
    let fitness = match log_log_term {
        Some(ll) if edge_count > 0 => ll * edge_fraction * entropy.exp(),
        _ => 0.0,
    };
    FitnessBreakdown {
        fitness,
        edge_energy,
        log_log_term,
        edge_count,
        edge_fraction,
        entropy,
        threshold,
        guarded,
    }
}

/// Fitness of an (enhanced) image.
pub fn fitness(img: &GrayImage) -> FitnessBreakdown {
    let grad = sobel_magnitude(img);
    let edge_energy: f64 = grad.iter().sum();
    let threshold = auto_threshold(&grad);
    let edge_count = edge_pixel_count(&grad, threshold);
    combine(edge_energy, edge_count, img.len(), entropy(img), threshold)
}

/// Splits pixels by 3x3 local variance at [`DETAIL_VARIANCE_THRESHOLD`] and
/// averages the variance within each class.
pub fn dv_bv(img: &GrayImage) -> DvBv {
    let var = local_variance(img, 3).expect("3 is a valid window");
    let (mut fg_sum, mut fg_n, mut bg_sum, mut bg_n) = (0.0, 0u64, 0.0, 0u64);
    for v in var {
        if v > DETAIL_VARIANCE_THRESHOLD {
            fg_sum += v;
            fg_n += 1;
        } else {
            bg_sum += v;
            bg_n += 1;
        }
    }
    let mean = |s: f64, n: u64| if n == 0 { 0.0 } else { s / n as f64 };
    DvBv {
        dv: mean(fg_sum, fg_n),
        bv: mean(bg_sum, bg_n),
        foreground_count: fg_n,
        background_count: bg_n,
    }
}
