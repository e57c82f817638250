use std::collections::HashMap;

use super::{CipherKey, CipherMode, LineAxis, RuleSpec};
use crate::ca_rules::{
    build_hybrid_rule, build_rule_matrix, enumerate_invertible_uniform_rules, Geometry, RuleId,
    RuleMatrix,
};
use crate::error::{Error, Result};
use crate::keystream::{derive_seed, SplitMix64};

pub(crate) const SCHEDULE_TAG: u64 = 0x5343_4845_4455_4c45;

/// How many blocks share one rule under a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// W1 / W4: one rule for the whole plane.
    Global,
    /// W2 / W5: one rule per block-row (or block-column).
    Line,
    /// W3 / W6: one rule per block.
    Block,
}

impl CipherMode {
    pub fn scope(self) -> Scope {
        match self {
            CipherMode::W1 | CipherMode::W4 => Scope::Global,
            CipherMode::W2 | CipherMode::W5 => Scope::Line,
            CipherMode::W3 | CipherMode::W6 => Scope::Block,
        }
    }
}

/// Number of independently chosen rules for a grid.
pub fn slot_count(mode: CipherMode, axis: LineAxis, grid: (usize, usize)) -> usize {
    match (mode.scope(), axis) {
        (Scope::Global, _) => 1,
        (Scope::Line, LineAxis::Row) => grid.0,
        (Scope::Line, LineAxis::Column) => grid.1,
        (Scope::Block, _) => grid.0 * grid.1,
    }
}

/// `log2` of the number of distinct schedules a mode can produce on a grid:
/// `|rules|^slots` for uniform modes, `|GL(b², 2)|^slots` for hybrid modes.
pub fn schedule_space_log2(
    mode: CipherMode,
    axis: LineAxis,
    grid: (usize, usize),
    block_size: usize,
) -> Result<f64> {
    let per_slot = if mode.is_hybrid() {
        let d = block_size * block_size;
        // |GL(d, 2)| = prod_{i<d} (2^d - 2^i) = prod_i 2^i (2^(d-i) - 1)
        (0..d)
            .map(|i| i as f64 + ((2f64).powi((d - i) as i32) - 1.0).log2())
            .sum()
    } else {
        (enumerate_invertible_uniform_rules(block_size, block_size)?.len() as f64).log2()
    };
    Ok(per_slot * slot_count(mode, axis, grid) as f64)
}

/// Rule assignment for every block of a plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSchedule {
    mode: CipherMode,
    axis: LineAxis,
    grid: (usize, usize),
    matrices: Vec<RuleMatrix>,
    slot_matrix: Vec<usize>,
}

impl RuleSchedule {
    pub fn grid(&self) -> (usize, usize) {
        self.grid
    }

    pub fn slot_count(&self) -> usize {
        self.slot_matrix.len()
    }

    /// Distinct rule matrices referenced by the schedule.
    pub fn matrices(&self) -> &[RuleMatrix] {
        &self.matrices
    }

    pub fn slot_of_block(&self, r: usize, c: usize) -> usize {
        match (self.mode.scope(), self.axis) {
            (Scope::Global, _) => 0,
            (Scope::Line, LineAxis::Row) => r,
            (Scope::Line, LineAxis::Column) => c,
            (Scope::Block, _) => r * self.grid.1 + c,
        }
    }

    /// Index into [`matrices`](Self::matrices) used by block `(r, c)`.
    pub fn matrix_index(&self, r: usize, c: usize) -> usize {
        self.slot_matrix[self.slot_of_block(r, c)]
    }

    pub fn rule_at(&self, r: usize, c: usize) -> &RuleMatrix {
        &self.matrices[self.matrix_index(r, c)]
    }
}

pub fn derive_schedule(key: &CipherKey, grid: (usize, usize)) -> Result<RuleSchedule> {
    let b = key.block_size;
    let geometry = Geometry::new(b, b)?;
    let slots = slot_count(key.mode, key.axis, grid);
    let mut matrices = Vec::new();
    let mut slot_matrix = Vec::with_capacity(slots);

    let check_len = |len: usize, what: &str| -> Result<()> {
        if len != slots {
            return Err(Error::Key(format!(
                "mode {} on a {}x{} block grid needs {slots} {what}, key lists {len}",
                key.mode, grid.0, grid.1
            )));
        }
        Ok(())
    };

    match (&key.rules, key.mode.is_hybrid()) {
        (RuleSpec::Seeded(seed), false) => {
            let pool = enumerate_invertible_uniform_rules(b, b)?;
            let mut rng = SplitMix64::new(derive_seed(*seed, &[SCHEDULE_TAG]));
            let picks: Vec<RuleId> = (0..slots)
                .map(|_| pool[rng.below(pool.len() as u64) as usize])
                .collect();
            intern_uniform(&picks, b, &mut matrices, &mut slot_matrix)?;
        }
        (RuleSpec::Rules(list), false) => {
            check_len(list.len(), "rules")?;
            let pool = enumerate_invertible_uniform_rules(b, b)?;
            if let Some(bad) = list.iter().find(|r| pool.binary_search(r).is_err()) {
                return Err(Error::Key(format!(
                    "rule {bad} is not invertible on {b}x{b} blocks"
                )));
            }
            intern_uniform(list, b, &mut matrices, &mut slot_matrix)?;
        }
        (RuleSpec::Seeded(seed), true) => {
            let mut rng = SplitMix64::new(derive_seed(*seed, &[SCHEDULE_TAG]));
            for _ in 0..slots {
                let hseed = rng.next_u64();
                slot_matrix.push(matrices.len());
                matrices.push(build_hybrid_rule(geometry, hseed).into_rule_matrix(Some(hseed)));
            }
        }
        (RuleSpec::HybridSeeds(seeds), true) => {
            check_len(seeds.len(), "hybrid seeds")?;
            for &hseed in seeds {
                slot_matrix.push(matrices.len());
                matrices.push(build_hybrid_rule(geometry, hseed).into_rule_matrix(Some(hseed)));
            }
        }
        (RuleSpec::Rules(_), true) => {
            return Err(Error::Key(format!(
                "mode {} is hybrid but the key lists uniform rules",
                key.mode
            )))
        }
        (RuleSpec::HybridSeeds(_), false) => {
            return Err(Error::Key(format!(
                "mode {} is uniform but the key lists hybrid seeds",
                key.mode
            )))
        }
    }

    Ok(RuleSchedule {
        mode: key.mode,
        axis: key.axis,
        grid,
        matrices,
        slot_matrix,
    })
}

fn intern_uniform(
    picks: &[RuleId],
    b: usize,
    matrices: &mut Vec<RuleMatrix>,
    slot_matrix: &mut Vec<usize>,
) -> Result<()> {
    let mut index: HashMap<RuleId, usize> = HashMap::new();
    for &rule in picks {
        let i = match index.get(&rule) {
            Some(&i) => i,
            None => {
                matrices.push(build_rule_matrix(rule, b, b)?);
                index.insert(rule, matrices.len() - 1);
                matrices.len() - 1
            }
        };
        slot_matrix.push(i);
    }
    Ok(())
}
