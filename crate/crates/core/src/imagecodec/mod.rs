//! Pixel images, binary PGM/PPM I/O, and bit-plane views of pixel planes.

mod bitplane;
mod pnm;

pub use bitplane::{
    binarize, debinarize, from_blocks, padded_dims, to_blocks, BitPlaneImage, BlockGrid,
};
pub use pnm::{decode, encode, read_image, write_image};

use crate::error::{Error, Result};

/// An 8-bit image with 1 (gray) or 3 (RGB) interleaved channels, rows top to
/// bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelImage {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

impl PixelImage {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::Format(format!(
                "unsupported channel count {channels}"
            )));
        }
        if samples.len() != width * height * channels {
            return Err(Error::Format(format!(
                "{} samples cannot fill {width}x{height}x{channels}",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn gray(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 1, samples)
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Self::new(
            width,
            height,
            channels,
            vec![value; width * height * channels],
        )
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            channels: 1,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, channel: usize) -> u8 {
        self.samples[(y * self.width + x) * self.channels + channel]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, channel: usize, value: u8) {
        self.samples[(y * self.width + x) * self.channels + channel] = value;
    }

    /// One channel as a gray image.
    pub fn channel(&self, channel: usize) -> Result<PixelImage> {
        if channel >= self.channels {
            return Err(Error::Geometry(format!(
                "channel {channel} requested from a {}-channel image",
                self.channels
            )));
        }
        let samples = self
            .samples
            .iter()
            .skip(channel)
            .step_by(self.channels)
            .copied()
            .collect();
        PixelImage::gray(self.width, self.height, samples)
    }

    pub fn planes(&self) -> Vec<PixelImage> {
        (0..self.channels)
            .map(|c| self.channel(c).expect("channel index in range"))
            .collect()
    }

    /// Interleaves 1 or 3 gray planes of equal size.
    pub fn from_planes(planes: &[PixelImage]) -> Result<PixelImage> {
        let first = planes
            .first()
            .ok_or_else(|| Error::Geometry("no planes to merge".into()))?;
        let (w, h) = (first.width, first.height);
        if planes
            .iter()
            .any(|p| p.channels != 1 || p.width != w || p.height != h)
        {
            return Err(Error::Geometry(
                "planes must be single-channel and equally sized".into(),
            ));
        }
        let channels = planes.len();
        let mut samples = Vec::with_capacity(w * h * channels);
        for i in 0..w * h {
            for p in planes {
                samples.push(p.samples[i]);
            }
        }
        PixelImage::new(w, h, channels, samples)
    }

    /// The `width x height` window whose top-left corner is `(x, y)`.
    pub fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<PixelImage> {
        if x + width > self.width || y + height > self.height {
            return Err(Error::Geometry(format!(
                "crop {width}x{height}+{x}+{y} exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut samples = Vec::with_capacity(width * height * self.channels);
        for row in y..y + height {
            let start = (row * self.width + x) * self.channels;
            samples.extend_from_slice(&self.samples[start..start + width * self.channels]);
        }
        PixelImage::new(width, height, self.channels, samples)
    }
}
