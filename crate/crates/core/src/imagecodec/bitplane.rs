use super::PixelImage;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// A gray plane expanded to bits (MSB first, `m x 8n`) and zero-padded at the
/// bottom and right to multiples of the block size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitPlaneImage {
    original_rows: usize,
    original_cols: usize,
    block_size: usize,
    bits: BitMatrix,
}

fn round_up(v: usize, to: usize) -> usize {
    v.div_ceil(to) * to
}

/// Padded bit dimensions `(p1, p2)` of an `rows x cols` pixel plane.
pub fn padded_dims(rows: usize, cols: usize, block_size: usize) -> (usize, usize) {
    (round_up(rows, block_size), round_up(8 * cols, block_size))
}

impl BitPlaneImage {
    pub fn from_bits(
        bits: BitMatrix,
        original_rows: usize,
        original_cols: usize,
        block_size: usize,
    ) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::Geometry("block size must be positive".into()));
        }
        let (p1, p2) = bits.dims();
        if p1 % block_size != 0 || p2 % block_size != 0 {
            return Err(Error::Geometry(format!(
                "{p1}x{p2} bits are not a multiple of block size {block_size}"
            )));
        }
        if original_rows > p1 || 8 * original_cols > p2 {
            return Err(Error::Geometry(format!(
                "original {original_rows}x{original_cols} pixels do not fit in {p1}x{p2} bits"
            )));
        }
        Ok(Self {
            original_rows,
            original_cols,
            block_size,
            bits,
        })
    }

    /// Original plane size in pixels, `(rows, cols)`.
    pub fn original(&self) -> (usize, usize) {
        (self.original_rows, self.original_cols)
    }

    /// Padded size in bits, `(p1, p2)`.
    pub fn padded(&self) -> (usize, usize) {
        self.bits.dims()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn bits(&self) -> &BitMatrix {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut BitMatrix {
        &mut self.bits
    }

    pub fn into_bits(self) -> BitMatrix {
        self.bits
    }

    /// Block-grid dimensions `(p1 / b, p2 / b)`.
    pub fn grid_dims(&self) -> (usize, usize) {
        let (p1, p2) = self.padded();
        (p1 / self.block_size, p2 / self.block_size)
    }

    /// Packs every padded bit row, MSB first, into `ceil(p2 / 8)` bytes; the
    /// slack bits of the last byte are zero. This is the on-disk form of a
    /// ciphertext plane, which cannot drop the padding.
    pub fn to_canvas(&self) -> PixelImage {
        let (p1, p2) = self.padded();
        let width = p2.div_ceil(8);
        let mut samples = vec![0u8; width * p1];
        for i in 0..p1 {
            for j in 0..p2 {
                if self.bits.get(i, j) {
                    samples[i * width + j / 8] |= 0x80 >> (j % 8);
                }
            }
        }
        PixelImage::gray(width, p1, samples).expect("sample count matches canvas")
    }

    /// Inverse of [`to_canvas`](Self::to_canvas) for a plane of the given
    /// original size.
    pub fn from_canvas(
        canvas: &PixelImage,
        original_rows: usize,
        original_cols: usize,
        block_size: usize,
    ) -> Result<Self> {
        if block_size == 0 || original_rows == 0 || original_cols == 0 {
            return Err(Error::Geometry("empty plane or zero block size".into()));
        }
        let (p1, p2) = padded_dims(original_rows, original_cols, block_size);
        let expected = (p2.div_ceil(8), p1);
        if canvas.channels() != 1 || (canvas.width(), canvas.height()) != expected {
            return Err(Error::Geometry(format!(
                "expected a {}x{} single-channel canvas, got {}x{} with {} channel(s)",
                expected.0,
                expected.1,
                canvas.width(),
                canvas.height(),
                canvas.channels()
            )));
        }
        let bits = BitMatrix::from_fn(p1, p2, |i, j| {
            canvas.get(j / 8, i, 0) & (0x80 >> (j % 8)) != 0
        });
        Self::from_bits(bits, original_rows, original_cols, block_size)
    }
}

/// Expands each pixel to 8 bits MSB first and zero-pads to block multiples.
pub fn binarize(plane: &PixelImage, block_size: usize) -> Result<BitPlaneImage> {
    if plane.channels() != 1 {
        return Err(Error::Geometry(format!(
            "binarize needs a single-channel plane, got {} channels",
            plane.channels()
        )));
    }
    if block_size == 0 || plane.pixel_count() == 0 {
        return Err(Error::Geometry("empty plane or zero block size".into()));
    }
    let (m, n) = (plane.height(), plane.width());
    let (p1, p2) = padded_dims(m, n, block_size);
    let mut bits = BitMatrix::zeros(p1, p2);
    for y in 0..m {
        for x in 0..n {
            let v = plane.get(x, y, 0);
            for b in 0..8 {
                if v & (0x80 >> b) != 0 {
                    bits.set(y, 8 * x + b, true);
                }
            }
        }
    }
    BitPlaneImage::from_bits(bits, m, n, block_size)
}

/// Crops the padding and repacks 8 bits per pixel, MSB first.
pub fn debinarize(bp: &BitPlaneImage) -> Result<PixelImage> {
    let (m, n) = bp.original();
    let (p1, p2) = bp.padded();
    if m > p1 || 8 * n > p2 {
        return Err(Error::Geometry(format!(
            "original {m}x{n} exceeds padded {p1}x{p2}"
        )));
    }
    Ok(PixelImage::from_fn(n, m, |x, y| {
        (0..8).fold(0u8, |acc, b| acc << 1 | bp.bits.get(y, 8 * x + b) as u8)
    }))
}

/// Square blocks tiling a bit plane in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGrid {
    pub block_size: usize,
    pub grid_rows: usize,
    pub grid_cols: usize,
    /// Original pixel size carried through so the plane can be rebuilt.
    pub original: (usize, usize),
    pub blocks: Vec<BitMatrix>,
}

impl BlockGrid {
    pub fn block(&self, r: usize, c: usize) -> &BitMatrix {
        &self.blocks[r * self.grid_cols + c]
    }
}

pub fn to_blocks(bp: &BitPlaneImage) -> Result<BlockGrid> {
    let b = bp.block_size;
    let (p1, p2) = bp.padded();
    if p1 % b != 0 || p2 % b != 0 {
        return Err(Error::Geometry(format!(
            "{p1}x{p2} is not divisible into {b}x{b} blocks"
        )));
    }
    let (gr, gc) = (p1 / b, p2 / b);
    let mut blocks = Vec::with_capacity(gr * gc);
    for r in 0..gr {
        for c in 0..gc {
            blocks.push(BitMatrix::from_fn(b, b, |i, j| {
                bp.bits.get(r * b + i, c * b + j)
            }));
        }
    }
    Ok(BlockGrid {
        block_size: b,
        grid_rows: gr,
        grid_cols: gc,
        original: bp.original(),
        blocks,
    })
}

pub fn from_blocks(grid: &BlockGrid) -> Result<BitPlaneImage> {
    let b = grid.block_size;
    if grid.blocks.len() != grid.grid_rows * grid.grid_cols
        || grid.blocks.iter().any(|m| m.dims() != (b, b))
        || grid.blocks.is_empty()
    {
        return Err(Error::Geometry("block grid is inconsistent".into()));
    }
    let mut bits = BitMatrix::zeros(grid.grid_rows * b, grid.grid_cols * b);
    for r in 0..grid.grid_rows {
        for c in 0..grid.grid_cols {
            let block = grid.block(r, c);
            for i in 0..b {
                for j in 0..b {
                    if block.get(i, j) {
                        bits.set(r * b + i, c * b + j, true);
                    }
                }
            }
        }
    }
    BitPlaneImage::from_bits(bits, grid.original.0, grid.original.1, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keystream::SplitMix64;

    fn noise(w: usize, h: usize, seed: u64) -> PixelImage {
        let mut g = SplitMix64::new(seed);
        PixelImage::from_fn(w, h, |_, _| g.next_u64() as u8)
    }

    #[test]
    fn msb_first_expansion() {
        let bp = binarize(&PixelImage::gray(1, 1, vec![173]).unwrap(), 5).unwrap();
        let run: Vec<u8> = (0..8).map(|j| bp.bits().get(0, j) as u8).collect();
        assert_eq!(run, vec![1, 0, 1, 0, 1, 1, 0, 1]);
        assert_eq!(bp.padded(), (5, 10));
    }

    #[test]
    fn padding_geometry() {
        let bp = binarize(&PixelImage::filled(256, 256, 1, 0).unwrap(), 5).unwrap();
        assert_eq!(bp.original(), (256, 256));
        assert_eq!(bp.padded(), (260, 2050));
        assert!(bp.bits().is_zero());
        assert_eq!(bp.grid_dims(), (52, 410));
    }

    #[test]
    fn padding_is_zero() {
        let img = PixelImage::filled(3, 2, 1, 255).unwrap();
        let bp = binarize(&img, 5).unwrap();
        assert_eq!(bp.padded(), (5, 25));
        assert_eq!(bp.bits().count_ones(), 2 * 24);
        for j in 24..25 {
            assert!(!bp.bits().get(0, j));
        }
    }

    #[test]
    fn debinarize_values() {
        let mut bits = BitMatrix::zeros(5, 10);
        bits.set(0, 7, true);
        let bp = BitPlaneImage::from_bits(bits, 1, 1, 5).unwrap();
        assert_eq!(debinarize(&bp).unwrap().samples(), &[1]);
        let bp = binarize(&PixelImage::gray(1, 1, vec![255]).unwrap(), 5).unwrap();
        assert_eq!(debinarize(&bp).unwrap().samples(), &[255]);
    }

    #[test]
    fn binarize_round_trip() {
        for (w, h, seed) in [(1, 1, 1), (7, 3, 2), (33, 17, 3)] {
            let img = noise(w, h, seed);
            assert_eq!(debinarize(&binarize(&img, 5).unwrap()).unwrap(), img);
        }
    }

    #[test]
    fn geometry_errors() {
        let rgb = PixelImage::filled(2, 2, 3, 0).unwrap();
        assert!(matches!(binarize(&rgb, 5), Err(Error::Geometry(_))));
        assert!(BitPlaneImage::from_bits(BitMatrix::zeros(5, 10), 6, 1, 5).is_err());
        assert!(BitPlaneImage::from_bits(BitMatrix::zeros(5, 10), 1, 2, 5).is_err());
        assert!(BitPlaneImage::from_bits(BitMatrix::zeros(6, 10), 1, 1, 5).is_err());
    }

    #[test]
    fn block_tiling() {
        let bits = BitMatrix::from_fn(10, 15, |i, j| (i * 15 + j) % 3 == 0);
        let bp = BitPlaneImage::from_bits(bits.clone(), 10, 1, 5).unwrap();
        let grid = to_blocks(&bp).unwrap();
        assert_eq!((grid.grid_rows, grid.grid_cols), (2, 3));
        let b01 = grid.block(0, 1);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(b01.get(i, j), bits.get(i, 5 + j));
            }
        }
        assert_eq!(from_blocks(&grid).unwrap(), bp);

        let single = BitPlaneImage::from_bits(BitMatrix::identity(5), 5, 0, 5).unwrap();
        let g = to_blocks(&single).unwrap();
        assert_eq!(g.blocks, vec![BitMatrix::identity(5)]);
    }

    #[test]
    fn canvas_round_trip() {
        let img = noise(13, 9, 4);
        let bp = binarize(&img, 5).unwrap();
        let canvas = bp.to_canvas();
        assert_eq!((canvas.width(), canvas.height()), (14, 10));
        assert_eq!(BitPlaneImage::from_canvas(&canvas, 9, 13, 5).unwrap(), bp);
        assert!(BitPlaneImage::from_canvas(&canvas, 9, 12, 5).is_err());
    }
}
