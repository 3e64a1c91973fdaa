use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEPTH: u32 = 6;

/// Axis-aligned removed square of level `level`, side `3^{-level}`, stored
/// with its lower-left corner in units of that side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RemovedSquare {
    pub level: u32,
    pub col: u64,
    pub row: u64,
}

impl RemovedSquare {
    pub fn side(&self) -> f64 {
        3f64.powi(-(self.level as i32))
    }

    pub fn corner(&self) -> (f64, f64) {
        let s = self.side();
        (self.col as f64 * s, self.row as f64 * s)
    }
}

/// The standard Sierpiński carpet truncated at a finite depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareCarpet {
    pub depth: u32,
    /// Construction order: level by level, and within each level by parent then row-major.
    pub removed: Vec<RemovedSquare>,
}

/// Removes middle squares from the unit square `depth` times.
pub fn standard_carpet(depth: u32) -> Result<SquareCarpet> {
    if depth > MAX_DEPTH {
        return Err(Error::Resource(format!("carpet depth {depth} exceeds the cap {MAX_DEPTH}")));
    }
    let mut removed = Vec::new();
    // kept squares of the previous level, as (col, row) in units of 3^{-level}
    let mut kept: Vec<(u64, u64)> = vec![(0, 0)];
    for level in 1..=depth {
        let mut next = Vec::with_capacity(kept.len() * 8);
        for &(c, r) in &kept {
            for dr in 0..3 {
                for dc in 0..3 {
                    let (col, row) = (3 * c + dc, 3 * r + dr);
                    if dc == 1 && dr == 1 {
                        removed.push(RemovedSquare { level, col, row });
                    } else {
                        next.push((col, row));
                    }
                }
            }
        }
        kept = next;
    }
    Ok(SquareCarpet { depth, removed })
}

impl SquareCarpet {
    pub fn count(&self) -> usize {
        self.removed.len()
    }

    /// Removed area as an exact fraction `num / 9^depth`.
    pub fn removed_area_fraction(&self) -> (u128, u128) {
        let den = 9u128.pow(self.depth);
        let num = self
            .removed
            .iter()
            .map(|q| 9u128.pow(self.depth - q.level))
            .sum();
        (num, den)
    }
}
