//! PGM (P5) reading/writing and 8-bit gray PNG reading.
//!
//! PGM is the canonical on-disk format: [`encode_pgm`] always emits the
//! header `P5\n<width> <height>\n255\n` followed by the raw raster, so a
//! save/load round trip is bit-exact.

use std::io::Cursor;
use std::path::Path;

use crate::image::GrayImage;
use crate::{Error, Result};

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

/// Decodes an image from memory, choosing the codec from the leading bytes.
pub fn decode(data: &[u8]) -> Result<GrayImage> {
    if data.starts_with(b"P5") {
        decode_pgm(data)
    } else if data.starts_with(&PNG_SIGNATURE) {
        decode_png(data)
    } else if data.len() >= 2 && data[0] == b'P' && data[1].is_ascii_digit() {
        Err(Error::UnsupportedFormat(format!(
            "netpbm variant P{} (only binary P5 is supported)",
            data[1] as char
        )))
    } else {
        Err(Error::UnsupportedFormat(
            "neither binary PGM nor PNG".to_string(),
        ))
    }
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Malformed(format!("missing {what} in PGM header")));
        }
        // Digits only, so from_utf8 cannot fail; parse fails on overflow.
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Malformed(format!("{what} out of range in PGM header")))
    }
}

/// Decodes a binary PGM (P5) with maxval 255.
pub fn decode_pgm(data: &[u8]) -> Result<GrayImage> {
    if !data.starts_with(b"P5") {
        return Err(Error::UnsupportedFormat("missing P5 magic".to_string()));
    }
    let mut cur = HeaderCursor { data, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    // Exactly one whitespace byte separates the header from the raster.
    match data.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::Malformed("no whitespace after maxval".to_string())),
    }
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    if width < crate::image::MIN_SIDE || height < crate::image::MIN_SIDE {
        return Err(Error::TooSmall { width, height });
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::Malformed("image dimensions overflow".to_string()))?;
    let raster = &data[cur.pos..];
    if raster.len() < n {
        return Err(Error::Malformed(format!(
            "raster truncated: {} of {n} bytes",
            raster.len()
        )));
    }
    GrayImage::new(width, height, raster[..n].to_vec())
}

/// Serializes as binary PGM: `P5\n<w> <h>\n255\n` and the raw raster.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.pixels());
    out
}

/// Decodes an 8-bit single-channel PNG. Color, alpha and other bit depths are rejected.
pub fn decode_png(data: &[u8]) -> Result<GrayImage> {
    let png_err = |e: png::DecodingError| Error::Malformed(format!("PNG: {e}"));
    let decoder = png::Decoder::new(Cursor::new(data));
    let mut reader = decoder.read_info().map_err(png_err)?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "PNG {:?} at {:?} bits (need 8-bit grayscale)",
            info.color_type, info.bit_depth
        )));
    }
    let (width, height) = (info.width as usize, info.height as usize);
    if width < crate::image::MIN_SIDE || height < crate::image::MIN_SIDE {
        return Err(Error::TooSmall { width, height });
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Malformed("PNG too large".to_string()))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(png_err)?;
    let line = frame.line_size;
    let mut pixels = Vec::with_capacity(width * height);
    for row in buf.chunks(line).take(height) {
        pixels.extend_from_slice(&row[..width]);
    }
    GrayImage::new(width, height, pixels)
}

/// Reads an image file (binary PGM or 8-bit gray PNG).
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    decode(&data)
}

/// Writes an image as binary PGM.
pub fn save_image(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_pgm(img)).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn png_bytes(width: u32, height: u32, color: png::ColorType, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, width, height);
            enc.set_color(color);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().unwrap();
            w.write_image_data(data).unwrap();
        }
        out
    }

    #[test]
    fn decodes_3x3_p5() {
        let mut data = b"P5\n3 3\n255\n".to_vec();
        data.extend(0u8..9);
        let img = decode(&data).unwrap();
        assert_eq!(img.dimensions(), (3, 3));
        assert_eq!(img.pixels(), &[0, 1, 2, 3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut data = b"P5 # made by hand\n3\n# h\n3 255 ".to_vec();
        data.extend([9u8; 9]);
        assert_eq!(decode_pgm(&data).unwrap().pixels(), &[9; 9]);
    }

    #[test]
    fn rejects_wide_maxval() {
        let mut data = b"P5\n3 3\n65535\n".to_vec();
        data.extend([0u8; 18]);
        assert!(matches!(
            decode(&data),
            Err(Error::UnsupportedMaxval(65535))
        ));
    }

    #[test]
    fn rejects_tiny_and_truncated() {
        let mut data = b"P5\n2 3\n255\n".to_vec();
        data.extend([0u8; 6]);
        assert!(matches!(decode(&data), Err(Error::TooSmall { .. })));

        let mut data = b"P5\n3 3\n255\n".to_vec();
        data.extend([0u8; 5]);
        assert!(matches!(decode(&data), Err(Error::Malformed(_))));

        assert!(matches!(
            decode(b"P5\n99999999999 3\n255\n"),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            decode(b"P2\n3 3\n255\n"),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            decode(b"GIF89a"),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn encodes_expected_header() {
        let img = GrayImage::new(3, 3, vec![0, 255, 0, 255, 0, 255, 0, 255, 0]).unwrap();
        let bytes = encode_pgm(&img);
        assert!(bytes.starts_with(b"P5\n3 3\n255\n"));
        assert_eq!(bytes.len(), 11 + 9);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let img = GrayImage::filled(3, 3, 0).unwrap();
        let err = save_image(&img, "/nonexistent-dir/x/out.pgm").unwrap_err();
        assert!(matches!(err, Error::Write { .. }));
        let err = load_image("/nonexistent-dir/in.pgm").unwrap_err();
        assert!(matches!(err, Error::Read { .. }));
    }

    #[test]
    fn png_gray8_is_read_and_color_rejected() {
        let raster: Vec<u8> = (0..20).collect();
        let img = decode(&png_bytes(5, 4, png::ColorType::Grayscale, &raster)).unwrap();
        assert_eq!(img.dimensions(), (5, 4));
        assert_eq!(img.pixels(), &raster[..]);

        let rgb = vec![0u8; 3 * 3 * 3];
        assert!(matches!(
            decode(&png_bytes(3, 3, png::ColorType::Rgb, &rgb)),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    proptest! {
        #[test]
        fn pgm_round_trip((w, h, px) in (3usize..20, 3usize..20)
            .prop_flat_map(|(w, h)| (Just(w), Just(h), proptest::collection::vec(any::<u8>(), w * h))))
        {
            let img = GrayImage::new(w, h, px).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("img.pgm");
            save_image(&img, &path).unwrap();
            prop_assert_eq!(load_image(&path).unwrap(), img);
        }

        #[test]
        fn decode_never_panics(data in proptest::collection::vec(any::<u8>(), 0..64)) {
            let mut bytes = b"P5".to_vec();
            bytes.extend(data);
            let _ = decode(&bytes);
        }
    }
}
