//! Brute-force reference implementations shared by the integration tests.
//! These deliberately avoid the library's code paths.

#![allow(dead_code)]

use evoenhance::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const QUADRATIC_OPTIMUM: [f64; 4] = [0.9, 0.35, 0.2, 1.1];

/// `-sum (x_d - m_d)^2`, maximized at [`QUADRATIC_OPTIMUM`].
pub fn concave_quadratic(x: &[f64; 4]) -> f64 {
    -x.iter()
        .zip(QUADRATIC_OPTIMUM)
        .map(|(v, m)| (v - m).powi(2))
        .sum::<f64>()
}

pub fn random_image(rng: &mut ChaCha8Rng, max_side: usize) -> GrayImage {
    let w = rng.random_range(3..=max_side);
    let h = rng.random_range(3..=max_side);
    let px = (0..w * h).map(|_| rng.random::<u8>()).collect();
    GrayImage::new(w, h, px).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn window(img: &GrayImage, row: usize, col: usize, n: usize) -> Vec<f64> {
    let r = (n / 2) as isize;
    let mut vals = Vec::with_capacity(n * n);
    for dr in -r..=r {
        for dc in -r..=r {
            let rr = (row as isize + dr).clamp(0, img.height() as isize - 1) as usize;
            let cc = (col as isize + dc).clamp(0, img.width() as isize - 1) as usize;
            vals.push(img.pixels()[rr * img.width() + cc] as f64);
        }
    }
    vals
}

/// Per-pixel window mean and two-pass population variance.
pub fn window_mean_var(img: &GrayImage, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut means = Vec::new();
    let mut vars = Vec::new();
    for row in 0..img.height() {
        for col in 0..img.width() {
            let v = window(img, row, col, n);
            let m = v.iter().sum::<f64>() / v.len() as f64;
            means.push(m);
            vars.push(v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64);
        }
    }
    (means, vars)
}

/// 3x3 Sobel by explicit kernel convolution.
pub fn sobel(img: &GrayImage) -> Vec<f64> {
    const GX: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
    const GY: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
    let mut out = Vec::new();
    for row in 0..img.height() {
        for col in 0..img.width() {
            let v = window(img, row, col, 3);
            let (mut gx, mut gy) = (0.0, 0.0);
            for k in 0..9 {
                gx += GX[k / 3][k % 3] * v[k];
                gy += GY[k / 3][k % 3] * v[k];
            }
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

/// Otsu by scoring every one of the 256 cut points from the raw values.
pub fn otsu(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let bins: Vec<usize> = values
        .iter()
        .map(|&v| ((v / max * 256.0) as usize).min(255))
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for k in 0..256 {
        let lo: Vec<f64> = bins
            .iter()
            .filter(|&&b| b <= k)
            .map(|&b| b as f64)
            .collect();
        let hi: Vec<f64> = bins.iter().filter(|&&b| b > k).map(|&b| b as f64).collect();
        if lo.is_empty() || hi.is_empty() {
            continue;
        }
        let m0 = lo.iter().sum::<f64>() / lo.len() as f64;
        let m1 = hi.iter().sum::<f64>() / hi.len() as f64;
        let score = lo.len() as f64 * hi.len() as f64 * (m0 - m1).powi(2);
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((k, score));
        }
    }
    best.map_or(max, |(k, _)| (k + 1) as f64 * max / 256.0)
}

/// DV/BV from the naive window variance: (dv, bv, foreground, background).
pub fn dv_bv(img: &GrayImage) -> (f64, f64, u64, u64) {
    let (_, vars) = window_mean_var(img, 3);
    let fg: Vec<f64> = vars.iter().copied().filter(|&v| v > 150.0).collect();
    let bg: Vec<f64> = vars.iter().copied().filter(|&v| v <= 150.0).collect();
    let avg = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    (avg(&fg), avg(&bg), fg.len() as u64, bg.len() as u64)
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}
