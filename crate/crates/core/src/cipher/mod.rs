//! Block-wise 2D-CA encryption of binarized images.
//!
//! A plane is binarized, its bit columns and then its bit rows are permuted
//! with a keyed shuffle, and every `b x b` block (row-major vector `v`) is
//! replaced by `R^steps * v` for the rule matrix `R` the schedule assigns to
//! it. Decryption applies the inverse matrices and then the inverse shuffle.
//!
//! The transform is linear over GF(2): for a fixed key without scrambling,
//! `E(x ^ y) = E(x) ^ E(y)`. It is a research construction, not a hardened
//! cipher.
//!
//! Ciphertexts keep the zero padding added by binarization, so a ciphertext
//! plane is stored as its full padded bit matrix packed into bytes (see
//! [`BitPlaneImage::to_canvas`]); it is slightly larger than the plaintext.

mod keyfile;
mod schedule;

pub use schedule::{derive_schedule, schedule_space_log2, slot_count, RuleSchedule, Scope};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::ca_rules::RuleId;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::imagecodec::{binarize, debinarize, BitPlaneImage, PixelImage};
use crate::keystream::{derive_seed, SplitMix64};

pub const KEY_VERSION: u32 = 1;
pub const DEFAULT_BLOCK_SIZE: usize = 5;
/// Largest block edge whose vectors fit one 64-bit word.
pub const MAX_BLOCK_SIZE: usize = 8;

const SCRAMBLE_TAG: u64 = 0x5343_5241_4d42_4c45;
const KEYGEN_SCRAMBLE_TAG: u64 = 1;
const KEYGEN_SCHEDULE_TAG: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CipherMode {
    W1,
    W2,
    W3,
    W4,
    W5,
    W6,
}

impl CipherMode {
    pub const ALL: [CipherMode; 6] = [
        CipherMode::W1,
        CipherMode::W2,
        CipherMode::W3,
        CipherMode::W4,
        CipherMode::W5,
        CipherMode::W6,
    ];

    /// W4–W6 use hybrid (arbitrary nonsingular) rule matrices.
    pub fn is_hybrid(self) -> bool {
        matches!(self, CipherMode::W4 | CipherMode::W5 | CipherMode::W6)
    }
}

impl fmt::Display for CipherMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = CipherMode::ALL.iter().position(|m| m == self).unwrap() + 1;
        f.pad(&format!("W{n}"))
    }
}

impl FromStr for CipherMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "W1" => Ok(CipherMode::W1),
            "W2" => Ok(CipherMode::W2),
            "W3" => Ok(CipherMode::W3),
            "W4" => Ok(CipherMode::W4),
            "W5" => Ok(CipherMode::W5),
            "W6" => Ok(CipherMode::W6),
            other => Err(Error::Key(format!("unknown mode {other:?}"))),
        }
    }
}

/// Which block lines share a rule in W2 / W5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LineAxis {
    #[default]
    Row,
    Column,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleSpec {
    /// Rules (or hybrid seeds) are drawn from a keyed generator.
    Seeded(u64),
    /// One uniform rule per schedule slot.
    Rules(Vec<RuleId>),
    /// One hybrid-matrix seed per schedule slot.
    HybridSeeds(Vec<u64>),
}

/// Size of one channel: pixels `rows x cols`, padded bits `padded_rows x padded_cols`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaneGeometry {
    pub rows: usize,
    pub cols: usize,
    pub padded_rows: usize,
    pub padded_cols: usize,
}

impl PlaneGeometry {
    pub fn for_plane(rows: usize, cols: usize, block_size: usize) -> Self {
        let (p1, p2) = crate::imagecodec::padded_dims(rows, cols, block_size);
        Self {
            rows,
            cols,
            padded_rows: p1,
            padded_cols: p2,
        }
    }

    pub fn grid(&self, block_size: usize) -> (usize, usize) {
        (self.padded_rows / block_size, self.padded_cols / block_size)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherKey {
    pub mode: CipherMode,
    pub block_size: usize,
    /// `None` disables scrambling.
    pub scramble_seed: Option<u64>,
    pub rules: RuleSpec,
    pub axis: LineAxis,
    /// CA evolution steps per block.
    pub steps: u32,
    /// One entry per channel.
    pub geometry: Vec<PlaneGeometry>,
}

impl CipherKey {
    /// A seeded key for `channels` planes of `rows x cols` pixels with 5x5 blocks.
    pub fn generate(
        mode: CipherMode,
        seed: u64,
        rows: usize,
        cols: usize,
        channels: usize,
    ) -> Self {
        Self {
            mode,
            block_size: DEFAULT_BLOCK_SIZE,
            scramble_seed: Some(derive_seed(seed, &[KEYGEN_SCRAMBLE_TAG])),
            rules: RuleSpec::Seeded(derive_seed(seed, &[KEYGEN_SCHEDULE_TAG])),
            axis: LineAxis::Row,
            steps: 1,
            geometry: vec![PlaneGeometry::for_plane(rows, cols, DEFAULT_BLOCK_SIZE); channels],
        }
    }

    pub fn generate_for(mode: CipherMode, seed: u64, img: &PixelImage) -> Self {
        Self::generate(mode, seed, img.height(), img.width(), img.channels())
    }

    /// Changes the block size, recomputing the padded geometry.
    pub fn with_block_size(mut self, block_size: usize) -> Self {
        self.block_size = block_size;
        for g in &mut self.geometry {
            *g = PlaneGeometry::for_plane(g.rows, g.cols, block_size);
        }
        self
    }

    /// Structural checks that do not need the rule schedule.
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_BLOCK_SIZE).contains(&self.block_size) {
            return Err(Error::Key(format!(
                "block_size {} outside 1..={MAX_BLOCK_SIZE}",
                self.block_size
            )));
        }
        if self.steps == 0 {
            return Err(Error::Key("steps must be at least 1".into()));
        }
        let first = self
            .geometry
            .first()
            .ok_or_else(|| Error::Key("key has no geometry".into()))?;
        if self.geometry.len() != 1 && self.geometry.len() != 3 {
            return Err(Error::Key(format!(
                "key lists {} channels; expected 1 or 3",
                self.geometry.len()
            )));
        }
        for g in &self.geometry {
            if g.rows == 0 || g.cols == 0 {
                return Err(Error::Key("geometry has an empty plane".into()));
            }
            if *g != PlaneGeometry::for_plane(g.rows, g.cols, self.block_size) {
                return Err(Error::Key(format!(
                    "padded size {}x{} does not match {}x{} pixels with block size {}",
                    g.padded_rows, g.padded_cols, g.rows, g.cols, self.block_size
                )));
            }
            if g != first {
                return Err(Error::Key("channel geometries differ".into()));
            }
        }
        Ok(())
    }

    fn plane_geometry(&self) -> Result<PlaneGeometry> {
        self.validate()?;
        Ok(self.geometry[0])
    }

    fn check_plane(&self, bp: &BitPlaneImage) -> Result<PlaneGeometry> {
        let g = self.plane_geometry()?;
        if bp.block_size() != self.block_size
            || bp.original() != (g.rows, g.cols)
            || bp.padded() != (g.padded_rows, g.padded_cols)
        {
            let (m, n) = bp.original();
            return Err(Error::Geometry(format!(
                "key expects {}x{} pixels (rows x cols), plane is {m}x{n}",
                g.rows, g.cols
            )));
        }
        Ok(g)
    }
}

/// Keyed column and row permutations of a padded bit plane.
///
/// `apply` maps `out[i][k] = in[rows[i]][columns[k]]`: columns are permuted
/// first, then rows. The generator is `SplitMix64(derive_seed(seed, [SCRAMBLE_TAG]))`;
/// the column permutation is drawn before the row permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScramblePermutation {
    pub columns: Vec<usize>,
    pub rows: Vec<usize>,
}

impl ScramblePermutation {
    pub fn from_seed(padded_rows: usize, padded_cols: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(derive_seed(seed, &[SCRAMBLE_TAG]));
        let columns = rng.permutation(padded_cols);
        let rows = rng.permutation(padded_rows);
        Self { columns, rows }
    }

    pub fn identity(padded_rows: usize, padded_cols: usize) -> Self {
        Self {
            columns: (0..padded_cols).collect(),
            rows: (0..padded_rows).collect(),
        }
    }

    fn check(&self, bp: &BitPlaneImage) -> Result<()> {
        if (self.rows.len(), self.columns.len()) != bp.padded() {
            return Err(Error::Geometry(format!(
                "permutation is for {}x{} bits, plane is {:?}",
                self.rows.len(),
                self.columns.len(),
                bp.padded()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, bp: &BitPlaneImage) -> Result<BitPlaneImage> {
        self.check(bp)?;
        let src = bp.bits();
        let bits = BitMatrix::from_fn(self.rows.len(), self.columns.len(), |i, k| {
            src.get(self.rows[i], self.columns[k])
        });
        let (m, n) = bp.original();
        BitPlaneImage::from_bits(bits, m, n, bp.block_size())
    }

    pub fn invert(&self, bp: &BitPlaneImage) -> Result<BitPlaneImage> {
        self.check(bp)?;
        let src = bp.bits();
        let mut bits = BitMatrix::zeros(self.rows.len(), self.columns.len());
        for (i, &r) in self.rows.iter().enumerate() {
            for (k, &c) in self.columns.iter().enumerate() {
                if src.get(i, k) {
                    bits.set(r, c, true);
                }
            }
        }
        let (m, n) = bp.original();
        BitPlaneImage::from_bits(bits, m, n, bp.block_size())
    }
}

pub fn scramble(bp: &BitPlaneImage, seed: u64) -> Result<BitPlaneImage> {
    let (p1, p2) = bp.padded();
    ScramblePermutation::from_seed(p1, p2, seed).apply(bp)
}

pub fn unscramble(bp: &BitPlaneImage, seed: u64) -> Result<BitPlaneImage> {
    let (p1, p2) = bp.padded();
    ScramblePermutation::from_seed(p1, p2, seed).invert(bp)
}

/// Multiplies every block vector by its scheduled matrix from `matrices`.
fn transform_blocks(
    bp: &BitPlaneImage,
    schedule: &RuleSchedule,
    matrices: &[BitMatrix],
) -> Result<BitPlaneImage> {
    let b = bp.block_size();
    let (gr, gc) = bp.grid_dims();
    let src = bp.bits();
    let out: Vec<BitVector> = (0..gr * gc)
        .into_par_iter()
        .map(|k| {
            let (r, c) = (k / gc, k % gc);
            let mut word = 0u64;
            for i in 0..b {
                for j in 0..b {
                    word |= (src.get(r * b + i, c * b + j) as u64) << (i * b + j);
                }
            }
            matrices[schedule.matrix_index(r, c)].multiply_vec(&BitVector::from_word(b * b, word))
        })
        .collect::<Result<_>>()?;

    let (p1, p2) = bp.padded();
    let mut bits = BitMatrix::zeros(p1, p2);
    for (k, v) in out.iter().enumerate() {
        let (r, c) = (k / gc, k % gc);
        let word = v.to_word();
        for i in 0..b {
            for j in 0..b {
                if word >> (i * b + j) & 1 == 1 {
                    bits.set(r * b + i, c * b + j, true);
                }
            }
        }
    }
    let (m, n) = bp.original();
    BitPlaneImage::from_bits(bits, m, n, b)
}

/// Scramble, then replace each block vector `v` with `R^steps * v`.
pub fn encrypt_plane(bp: &BitPlaneImage, key: &CipherKey) -> Result<BitPlaneImage> {
    let g = key.check_plane(bp)?;
    let schedule = derive_schedule(key, g.grid(key.block_size))?;
    let forward = schedule
        .matrices()
        .iter()
        .map(|rm| rm.matrix.pow(key.steps))
        .collect::<Result<Vec<_>>>()?;
    let scrambled = match key.scramble_seed {
        Some(seed) => scramble(bp, seed)?,
        None => bp.clone(),
    };
    transform_blocks(&scrambled, &schedule, &forward)
}

/// Exact inverse of [`encrypt_plane`].
pub fn decrypt_plane(bp: &BitPlaneImage, key: &CipherKey) -> Result<BitPlaneImage> {
    let g = key.check_plane(bp)?;
    let schedule = derive_schedule(key, g.grid(key.block_size))?;
    let inverse = schedule
        .matrices()
        .par_iter()
        .map(|rm| rm.matrix.invert()?.pow(key.steps))
        .collect::<Result<Vec<_>>>()?;
    let plain = transform_blocks(bp, &schedule, &inverse)?;
    match key.scramble_seed {
        Some(seed) => unscramble(&plain, seed),
        None => Ok(plain),
    }
}

fn check_image(img: &PixelImage, key: &CipherKey, expect: (usize, usize)) -> Result<()> {
    key.validate()?;
    if img.channels() != key.geometry.len() {
        return Err(Error::Geometry(format!(
            "key is for {} channel(s), image has {}",
            key.geometry.len(),
            img.channels()
        )));
    }
    if (img.height(), img.width()) != expect {
        return Err(Error::Geometry(format!(
            "key expects {}x{} pixels (rows x cols), image is {}x{}",
            expect.0,
            expect.1,
            img.height(),
            img.width()
        )));
    }
    Ok(())
}

/// Encrypts every channel independently. The result holds each channel's
/// padded ciphertext plane packed 8 bits per pixel.
pub fn encrypt_image(img: &PixelImage, key: &CipherKey) -> Result<PixelImage> {
    let g = key.plane_geometry()?;
    check_image(img, key, (g.rows, g.cols))?;
    let planes = img
        .planes()
        .iter()
        .map(|p| Ok(encrypt_plane(&binarize(p, key.block_size)?, key)?.to_canvas()))
        .collect::<Result<Vec<_>>>()?;
    PixelImage::from_planes(&planes)
}

pub fn decrypt_image(cipher: &PixelImage, key: &CipherKey) -> Result<PixelImage> {
    let g = key.plane_geometry()?;
    check_image(cipher, key, (g.padded_rows, g.padded_cols.div_ceil(8))).map_err(|e| match e {
        Error::Geometry(msg) => Error::Geometry(format!("ciphertext: {msg}")),
        other => other,
    })?;
    let planes = cipher
        .planes()
        .iter()
        .map(|c| {
            let bp = BitPlaneImage::from_canvas(c, g.rows, g.cols, key.block_size)?;
            debinarize(&decrypt_plane(&bp, key)?)
        })
        .collect::<Result<Vec<_>>>()?;
    PixelImage::from_planes(&planes)
}

/// The part of a ciphertext canvas that covers the plaintext's pixel
/// footprint (top-left `rows x cols`); used for like-for-like statistics.
pub fn ciphertext_footprint(cipher: &PixelImage, key: &CipherKey) -> Result<PixelImage> {
    let g = key.plane_geometry()?;
    cipher.crop(0, 0, g.cols, g.rows)
}

#[cfg(test)]
mod tests;
