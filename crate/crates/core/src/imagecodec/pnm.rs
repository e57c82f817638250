//! Binary Netpbm: PGM `P5` (gray) and PPM `P6` (RGB), maxval 255.
//!
//! Comments (`#` to end of line) are accepted between header tokens on read
//! and never written. The writer emits `P5\n<w> <h>\n255\n` followed by the
//! raster.

use std::path::Path;

use super::PixelImage;
use crate::error::{Error, Result};

struct Header {
    channels: usize,
    width: usize,
    height: usize,
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(Error::Format("missing P5/P6 magic number".into())),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // Whitespace and comments before each token.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::Format("truncated header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format(format!("expected a number at byte {start}")));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format("header number out of range".into()))?;
    }
    // Exactly one whitespace byte separates maxval from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Format("missing whitespace after maxval".into())),
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::Format(format!(
            "maxval {maxval} unsupported (only 255)"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("empty image {width}x{height}")));
    }
    Ok(Header {
        channels,
        width,
        height,
        data_start: pos,
    })
}

pub fn decode(bytes: &[u8]) -> Result<PixelImage> {
    let h = parse_header(bytes)?;
    let len = h
        .width
        .checked_mul(h.height)
        .and_then(|n| n.checked_mul(h.channels))
        .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;
    let raster = bytes.get(h.data_start..h.data_start + len).ok_or_else(|| {
        Error::Format(format!(
            "truncated raster: expected {len} bytes, found {}",
            bytes.len() - h.data_start
        ))
    })?;
    PixelImage::new(h.width, h.height, h.channels, raster.to_vec())
}

pub fn encode(img: &PixelImage) -> Result<Vec<u8>> {
    if img.pixel_count() == 0 {
        return Err(Error::Format("cannot encode an empty image".into()));
    }
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.samples());
    Ok(out)
}

pub fn read_image(path: impl AsRef<Path>) -> Result<PixelImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub fn write_image(img: &PixelImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(img)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
