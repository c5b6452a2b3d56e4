//! Global histogram equalization baseline.

use crate::image::{GrayImage, LEVELS};

/// Lookup table mapping each level `v` to `round_half_up(255 * cdf(v))`.
pub fn equalization_lut(img: &GrayImage) -> [u8; LEVELS] {
    let hist = img.histogram();
    let total = img.len() as u64;
    let mut lut = [0u8; LEVELS];
    let mut cum = 0u64;
    for (level, &count) in hist.iter().enumerate() {
        cum += count;
        // floor(255 * cum / total + 1/2) in exact integer arithmetic.
        lut[level] = ((510 * cum + total) / (2 * total)) as u8;
    }
    lut
}

/// Plain global histogram equalization.
pub fn equalize(img: &GrayImage) -> GrayImage {
    img.map_levels(&equalization_lut(img))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_goes_to_white() {
        for v in [0u8, 17, 255] {
            let out = equalize(&GrayImage::filled(4, 3, v).unwrap());
            assert!(out.pixels().iter().all(|&p| p == 255));
        }
    }

    #[test]
    fn two_levels() {
        let img = GrayImage::from_fn(4, 4, |r, _| if r < 2 { 10 } else { 20 }).unwrap();
        let lut = equalization_lut(&img);
        assert_eq!((lut[10], lut[20]), (128, 255));
        let out = equalize(&img);
        assert_eq!(out.histogram()[128], 8);
        assert_eq!(out.histogram()[255], 8);
    }

    proptest! {
        #[test]
        fn lut_is_monotone_and_idempotent_in_histogram(
            px in proptest::collection::vec(any::<u8>(), 30),
        ) {
            let img = GrayImage::new(5, 6, px).unwrap();
            let lut = equalization_lut(&img);
            prop_assert!(lut.windows(2).all(|w| w[0] <= w[1]));
            let once = equalize(&img);
            prop_assert_eq!(once.len(), img.len());
            // Equalizing again may only merge levels, never split them.
            let twice = equalize(&once);
            let distinct = |i: &GrayImage| i.histogram().iter().filter(|&&n| n > 0).count();
            prop_assert!(distinct(&twice) <= distinct(&once));
            prop_assert!(distinct(&once) <= distinct(&img));
        }
    }
}
