//! Statistical checks for ciphertexts: histograms and a chi-square
//! uniformity test, adjacent-pixel correlation, and difference images for
//! key sensitivity.

use std::fmt;
use std::io::{self, Write};

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::cipher::{ciphertext_footprint, decrypt_image, encrypt_image, CipherKey};
use crate::error::{Error, Result};
use crate::imagecodec::PixelImage;
use crate::keystream::SplitMix64;
pub use crate::randtest::Direction;

pub const DEFAULT_PAIRS: usize = 1000;

/// 256 counts per channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bins: Vec<[u64; 256]>,
}

impl Histogram {
    pub fn total(&self, channel: usize) -> u64 {
        self.bins[channel].iter().sum()
    }

    /// `channel,bin,count` rows; the channel column is omitted for gray images.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        if self.bins.len() == 1 {
            writeln!(out, "bin,count")?;
            for (b, c) in self.bins[0].iter().enumerate() {
                writeln!(out, "{b},{c}")?;
            }
        } else {
            writeln!(out, "channel,bin,count")?;
            for (ch, bins) in self.bins.iter().enumerate() {
                for (b, c) in bins.iter().enumerate() {
                    writeln!(out, "{ch},{b},{c}")?;
                }
            }
        }
        Ok(())
    }
}

pub fn histogram(img: &PixelImage) -> Histogram {
    let ch = img.channels();
    let mut bins = vec![[0u64; 256]; ch];
    for (i, &v) in img.samples().iter().enumerate() {
        bins[i % ch][v as usize] += 1;
    }
    Histogram { bins }
}

/// Pearson statistic of 256 counts against the uniform distribution.
pub fn chi_square_uniform(bins: &[u64; 256]) -> f64 {
    let total: u64 = bins.iter().sum();
    let expected = total as f64 / 256.0;
    bins.iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum()
}

/// Upper `alpha` quantile of chi-square with `dof` degrees of freedom.
pub fn chi_square_critical(dof: u32, alpha: f64) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub direction: Direction,
    pub seed: u64,
    pub pairs: Vec<(u8, u8)>,
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov: f64,
    pub gamma: f64,
}

impl CorrelationReport {
    pub fn write_pairs_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "x,y")?;
        for (x, y) in &self.pairs {
            writeln!(out, "{x},{y}")?;
        }
        Ok(())
    }
}

impl fmt::Display for CorrelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "direction={}", self.direction)?;
        writeln!(f, "pairs={}", self.pairs.len())?;
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "mean_x={}", self.mean_x)?;
        writeln!(f, "mean_y={}", self.mean_y)?;
        writeln!(f, "var_x={}", self.var_x)?;
        writeln!(f, "var_y={}", self.var_y)?;
        writeln!(f, "cov={}", self.cov)?;
        write!(f, "gamma={}", self.gamma)
    }
}

/// Population (1/N) correlation coefficient of `(x, y)` samples.
pub fn correlation(pairs: &[(f64, f64)]) -> Result<(f64, f64, f64, f64, f64, f64)> {
    let n = pairs.len() as f64;
    let ex = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let ey = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let dx = pairs.iter().map(|p| (p.0 - ex).powi(2)).sum::<f64>() / n;
    let dy = pairs.iter().map(|p| (p.1 - ey).powi(2)).sum::<f64>() / n;
    let cov = pairs.iter().map(|p| (p.0 - ex) * (p.1 - ey)).sum::<f64>() / n;
    if dx == 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    if dy == 0.0 {
        return Err(Error::ZeroVariance("y"));
    }
    Ok((ex, ey, dx, dy, cov, cov / (dx.sqrt() * dy.sqrt())))
}

/// Correlation of `pairs` randomly chosen (with replacement) pixels and their
/// right / lower / lower-right neighbors in a single-channel plane.
pub fn adjacent_correlation(
    plane: &PixelImage,
    direction: Direction,
    pairs: usize,
    seed: u64,
) -> Result<CorrelationReport> {
    if plane.channels() != 1 {
        return Err(Error::InvalidConfig(format!(
            "expected a single-channel plane, got {} channels",
            plane.channels()
        )));
    }
    if pairs < 2 {
        return Err(Error::InvalidConfig("need at least 2 pairs".into()));
    }
    let (dr, dc) = direction.step();
    let rows = plane.height().saturating_sub(dr);
    let cols = plane.width().saturating_sub(dc);
    if rows == 0 || cols == 0 {
        return Err(Error::ImageTooSmall(format!(
            "{}x{} image has no {direction} neighbors",
            plane.width(),
            plane.height()
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let sampled: Vec<(u8, u8)> = (0..pairs)
        .map(|_| {
            let r = rng.below(rows as u64) as usize;
            let c = rng.below(cols as u64) as usize;
            (plane.get(c, r, 0), plane.get(c + dc, r + dr, 0))
        })
        .collect();
    let xy: Vec<(f64, f64)> = sampled.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
    let (mean_x, mean_y, var_x, var_y, cov, gamma) = correlation(&xy)?;
    Ok(CorrelationReport {
        direction,
        seed,
        pairs: sampled,
        mean_x,
        mean_y,
        var_x,
        var_y,
        cov,
        gamma,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceReport {
    /// Per-sample absolute difference.
    pub image: PixelImage,
    /// Share of pixels where any channel differs.
    pub differing_fraction: f64,
}

impl fmt::Display for DifferenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "width={}", self.image.width())?;
        writeln!(f, "height={}", self.image.height())?;
        write!(f, "differing_fraction={}", self.differing_fraction)
    }
}

pub fn difference_image(a: &PixelImage, b: &PixelImage) -> Result<DifferenceReport> {
    let dims = |i: &PixelImage| (i.width(), i.height(), i.channels());
    if dims(a) != dims(b) {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?} (width, height, channels)",
            dims(a),
            dims(b)
        )));
    }
    let samples: Vec<u8> = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| x.abs_diff(*y))
        .collect();
    let ch = a.channels();
    let differing = samples
        .chunks(ch)
        .filter(|px| px.iter().any(|&d| d != 0))
        .count();
    let total = a.pixel_count();
    Ok(DifferenceReport {
        image: PixelImage::new(a.width(), a.height(), ch, samples)?,
        differing_fraction: if total == 0 {
            0.0
        } else {
            differing as f64 / total as f64
        },
    })
}

/// `(E(img, k1) vs E(img, k2), img vs D(E(img, k1), k2))`. Ciphertexts are
/// compared on the plaintext footprint.
pub fn key_sensitivity_harness(
    img: &PixelImage,
    k1: &CipherKey,
    k2: &CipherKey,
) -> Result<(DifferenceReport, DifferenceReport)> {
    let c1 = encrypt_image(img, k1)?;
    let c2 = encrypt_image(img, k2)?;
    let enc = difference_image(
        &ciphertext_footprint(&c1, k1)?,
        &ciphertext_footprint(&c2, k2)?,
    )?;
    let dec = difference_image(img, &decrypt_image(&c1, k2)?)?;
    Ok((enc, dec))
}
