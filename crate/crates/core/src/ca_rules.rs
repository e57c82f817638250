//! Linear 2D cellular-automaton rules on a Moore neighborhood with null
//! boundary, and their rule matrices over GF(2).
//!
//! A rule number is a sum of neighbor weights laid out around the cell:
//!
//! ```text
//!  64 128 256
//!  32   1   2
//!  16   8   4
//! ```
//!
//! A state `S` of size `m x n` is vectorized row-major (`k = i * n + j`); the
//! rule matrix `R` of size `mn x mn` advances it one step as `R * vec(S)`.

use crate::error::{Error, Result};
use crate::gf2::{random_nonsingular, BitMatrix, BitVector};

/// The nine fundamental weights and the `(row, col)` offset of the neighbor each
/// one reads.
pub const NEIGHBOR_OFFSETS: [(u16, isize, isize); 9] = [
    (1, 0, 0),
    (2, 0, 1),
    (4, 1, 1),
    (8, 1, 0),
    (16, 1, -1),
    (32, 0, -1),
    (64, -1, -1),
    (128, -1, 0),
    (256, -1, 1),
];

pub const RULE_COUNT: u16 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId(u16);

impl RuleId {
    pub fn new(value: u32) -> Result<Self> {
        if value < RULE_COUNT as u32 {
            Ok(Self(value as u16))
        } else {
            Err(Error::InvalidRule(value))
        }
    }

    pub fn value(self) -> u16 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = RuleId> {
        (0..RULE_COUNT).map(RuleId)
    }

    /// Fundamental weights present in this rule, ascending.
    pub fn fundamental_bits(self) -> impl Iterator<Item = u16> {
        NEIGHBOR_OFFSETS
            .iter()
            .map(|&(bit, _, _)| bit)
            .filter(move |bit| self.0 & bit != 0)
    }

    pub fn group(self) -> RuleGroup {
        classify_group(self)
    }
}

impl std::fmt::Display for RuleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number of neighbors a rule depends on: the popcount of the rule number,
/// 0 for the zero-dependency rule up to 9 for rule 511.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleGroup(pub u8);

pub fn classify_group(rule: RuleId) -> RuleGroup {
    RuleGroup(rule.0.count_ones() as u8)
}

/// Problem-matrix geometry `(m rows, n cols)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Geometry {
    pub rows: usize,
    pub cols: usize,
}

impl Geometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Geometry(format!(
                "problem matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Uniform(RuleId),
    /// A per-cell rule set; carries the seed when it was generated from one.
    Hybrid(Option<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleMatrix {
    pub kind: RuleKind,
    pub geometry: Geometry,
    pub matrix: BitMatrix,
}

impl RuleMatrix {
    /// One evolution step of a state.
    pub fn apply(&self, state: &BitMatrix) -> Result<BitMatrix> {
        if state.dims() != (self.geometry.rows, self.geometry.cols) {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{} but rule is for {}x{}",
                state.rows(),
                state.cols(),
                self.geometry.rows,
                self.geometry.cols
            )));
        }
        let next = self.matrix.multiply_vec(&vectorize(state))?;
        devectorize(&next, self.geometry.rows, self.geometry.cols)
    }
}

/// A nonsingular per-cell rule matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridRule {
    geometry: Geometry,
    matrix: BitMatrix,
}

impl HybridRule {
    /// Wraps an explicit matrix, rejecting wrong sizes and singular matrices.
    pub fn new(geometry: Geometry, matrix: BitMatrix) -> Result<Self> {
        let dim = geometry.cells();
        if matrix.dims() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "hybrid rule for {}x{} needs a {dim}x{dim} matrix, got {}x{}",
                geometry.rows,
                geometry.cols,
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_nonsingular()? {
            return Err(Error::SingularMatrix);
        }
        Ok(Self { geometry, matrix })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn into_rule_matrix(self, seed: Option<u64>) -> RuleMatrix {
        RuleMatrix {
            kind: RuleKind::Hybrid(seed),
            geometry: self.geometry,
            matrix: self.matrix,
        }
    }
}

pub fn build_hybrid_rule(geometry: Geometry, seed: u64) -> HybridRule {
    HybridRule {
        geometry,
        matrix: random_nonsingular(geometry.cells(), seed),
    }
}

/// Row-major vectorization of a state.
pub fn vectorize(state: &BitMatrix) -> BitVector {
    let (m, n) = state.dims();
    let mut v = BitVector::zeros(m * n);
    for i in 0..m {
        for j in 0..n {
            if state.get(i, j) {
                v.set(i * n + j, true);
            }
        }
    }
    v
}

pub fn devectorize(v: &BitVector, rows: usize, cols: usize) -> Result<BitMatrix> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot fill {rows}x{cols}",
            v.len()
        )));
    }
    Ok(BitMatrix::from_fn(rows, cols, |i, j| v.get(i * cols + j)))
}

fn offset_of(bit: u16) -> Result<(isize, isize)> {
    NEIGHBOR_OFFSETS
        .iter()
        .find(|&&(b, _, _)| b == bit)
        .map(|&(_, di, dj)| (di, dj))
        .ok_or(Error::InvalidBit(bit))
}

/// The matrix of a single-neighbor rule: row `k` holds a 1 at the vector index
/// of cell `k`'s neighbor, or nothing when the neighbor is off the grid.
pub fn build_fundamental_matrix(bit: u16, rows: usize, cols: usize) -> Result<BitMatrix> {
    let (di, dj) = offset_of(bit)?;
    let geometry = Geometry::new(rows, cols)?;
    let mut m = BitMatrix::zeros(geometry.cells(), geometry.cells());
    for i in 0..rows {
        for j in 0..cols {
            let (ni, nj) = (i as isize + di, j as isize + dj);
            if (0..rows as isize).contains(&ni) && (0..cols as isize).contains(&nj) {
                m.set(i * cols + j, ni as usize * cols + nj as usize, true);
            }
        }
    }
    Ok(m)
}

/// XOR-sum of the fundamental matrices of every set bit; rule 0 is the zero matrix.
pub fn build_rule_matrix(rule: RuleId, rows: usize, cols: usize) -> Result<RuleMatrix> {
    let geometry = Geometry::new(rows, cols)?;
    let mut matrix = BitMatrix::zeros(geometry.cells(), geometry.cells());
    for bit in rule.fundamental_bits() {
        matrix = matrix.add(&build_fundamental_matrix(bit, rows, cols)?)?;
    }
    Ok(RuleMatrix {
        kind: RuleKind::Uniform(rule),
        geometry,
        matrix,
    })
}

/// One step computed cell by cell from neighborhood semantics, without a
/// rule matrix.
pub fn evolve_direct(state: &BitMatrix, rule: RuleId) -> BitMatrix {
    let (m, n) = state.dims();
    let read = |i: isize, j: isize| -> bool {
        (0..m as isize).contains(&i)
            && (0..n as isize).contains(&j)
            && state.get(i as usize, j as usize)
    };
    BitMatrix::from_fn(m, n, |i, j| {
        NEIGHBOR_OFFSETS
            .iter()
            .filter(|&&(bit, _, _)| rule.0 & bit != 0)
            .fold(false, |acc, &(_, di, dj)| {
                acc ^ read(i as isize + di, j as isize + dj)
            })
    })
}

/// All rules whose matrix is nonsingular for an `m x n` problem, ascending.
pub fn enumerate_invertible_uniform_rules(rows: usize, cols: usize) -> Result<Vec<RuleId>> {
    Geometry::new(rows, cols)?;
    let fundamentals = NEIGHBOR_OFFSETS
        .iter()
        .map(|&(bit, _, _)| build_fundamental_matrix(bit, rows, cols))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for rule in RuleId::all() {
        let matrix = NEIGHBOR_OFFSETS
            .iter()
            .zip(&fundamentals)
            .filter(|((bit, _, _), _)| rule.0 & bit != 0)
            .try_fold(BitMatrix::zeros(rows * cols, rows * cols), |acc, (_, f)| {
                acc.add(f)
            })?;
        if matrix.rank() == rows * cols {
            out.push(rule);
        }
    }
    Ok(out)
}
