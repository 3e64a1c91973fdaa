//! Consistency checks relating modulus values of related families and modes.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::family::{Convention, Mode, PathFamily, Selector};
use super::graph::Problem;
use super::grid::{Cell, Grid};
use super::qp::{self, QpOptions};
use super::solver::{solve, SolverOptions, Status};
use crate::error::{domain, Result};

/// Paths kept for the subfamily check.
pub const SUBFAMILY_PATHS: usize = 10;
/// Slack for comparisons between separately converged runs.
const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    /// Expected to be at most `larger`.
    pub smaller: f64,
    pub larger: f64,
    pub holds: bool,
}

impl Comparison {
    fn new(name: &str, smaller: f64, larger: f64, slack: f64) -> Self {
        Comparison { name: name.to_string(), smaller, larger, holds: smaller <= larger + slack }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub comparisons: Vec<Comparison>,
    pub deterministic: bool,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.deterministic && self.comparisons.iter().all(|c| c.holds)
    }
}

/// The family the suite uses when none is given: between the two smallest
/// hole labels, or else between the leftmost and rightmost interior columns.
pub fn default_family(g: &Grid) -> Result<PathFamily> {
    let labels = g.labels();
    if labels.len() >= 2 {
        return Ok(PathFamily::between(labels[0], labels[1], Convention::Closed));
    }
    let interior: Vec<usize> = (0..g.len()).filter(|&k| g.cells[k] == Cell::Interior).collect();
    let col = |k: usize| g.row_col(k).1;
    let (Some(lo), Some(hi)) = (interior.iter().map(|&k| col(k)).min(), interior.iter().map(|&k| col(k)).max()) else {
        return domain("grid has no interior");
    };
    if lo == hi {
        return domain("grid interior is a single column");
    }
    let pick = |c: usize| interior.iter().copied().filter(|&k| col(k) == c).collect();
    Ok(PathFamily::new(Selector::Cells(pick(lo)), Selector::Cells(pick(hi)), Convention::Closed))
}

/// Modulus of the finite family made of the given cell paths.
pub fn finite_family_modulus(g: &Grid, fam: &PathFamily, mode: &Mode, paths: &[Vec<usize>]) -> Result<f64> {
    let p = Problem::new(g, fam, mode)?;
    let rows: Vec<Vec<u32>> = paths
        .iter()
        .map(|path| {
            let nodes: Vec<usize> = path.iter().filter_map(|&c| p.graph.cell_node[c]).collect();
            p.path_vars(&nodes)
        })
        .collect();
    if rows.is_empty() {
        return Ok(0.0);
    }
    if rows.iter().any(|r| r.is_empty()) {
        return Ok(f64::INFINITY);
    }
    let mut lambda = Vec::new();
    let out = qp::solve(p.var_count(), &rows, &mut lambda, &QpOptions { tol: 1e-13, max_sweeps: 1_000_000, seed: 0 });
    let low = rows.iter().map(|r| r.iter().map(|&v| out.x[v as usize]).sum::<f64>()).fold(f64::INFINITY, f64::min);
    Ok(out.x.iter().map(|v| v * v).sum::<f64>() / (low * low))
}

/// Runs the suite on [`default_family`].
pub fn modulus_monotonicity_suite(g: &Grid, opts: &SolverOptions) -> Result<MonotonicityReport> {
    monotonicity_suite_for(g, &default_family(g)?, opts)
}

/// Checks, for the family `fam`:
/// - a family of [`SUBFAMILY_PATHS`] generated paths has modulus at most that of the whole family;
/// - restricted to paths avoiding every hole, letting all holes carry weight
///   gives at most the classical value, and growing the weighted set one
///   label at a time never increases the value;
/// - solving twice gives identical results.
pub fn monotonicity_suite_for(g: &Grid, fam: &PathFamily, opts: &SolverOptions) -> Result<MonotonicityReport> {
    let mut comparisons = Vec::new();
    let full = solve(g, fam, &Mode::Classical, opts)?;
    let again = solve(g, fam, &Mode::Classical, opts)?;
    let deterministic = full.value.to_bits() == again.value.to_bits() && full.distribution == again.distribution;
    if full.status == Status::Converged {
        let sub: Vec<Vec<usize>> = full.paths.iter().take(SUBFAMILY_PATHS).cloned().collect();
        let v = finite_family_modulus(g, fam, &Mode::Classical, &sub)?;
        comparisons.push(Comparison::new("subfamily ≤ family", v, full.value, SLACK * (1.0 + full.value)));
    }

    let region: Vec<bool> = g.cells.iter().map(|c| *c == Cell::Interior).collect();
    let avoiding = fam.clone().with_region(region);
    let labels = g.labels();
    let mut weighted = BTreeSet::new();
    let mut prev = solve(g, &avoiding, &Mode::Transboundary(weighted.clone()), opts)?;
    let classical = solve(g, &avoiding, &Mode::Classical, opts)?;
    let tol = |a: f64, b: f64| 2.0 * opts.eps * (a.abs() + b.abs()) + SLACK;
    comparisons.push(Comparison::new(
        "no weighted holes ≤ classical",
        prev.value,
        classical.value,
        tol(prev.value, classical.value),
    ));
    for l in labels {
        weighted.insert(l);
        let next = solve(g, &avoiding, &Mode::Transboundary(weighted.clone()), opts)?;
        comparisons.push(Comparison::new(&format!("weighting hole {l}"), next.value, prev.value, tol(next.value, prev.value)));
        prev = next;
    }
    comparisons.push(Comparison::new("all holes weighted ≤ classical", prev.value, classical.value, tol(prev.value, classical.value)));
    Ok(MonotonicityReport { comparisons, deterministic })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block_with_hole() -> Grid {
        // end holes 0 and 1 in the side columns, hole 2 in the middle
        let (nx, ny) = (8, 6);
        let cells = (0..nx * ny)
            .map(|k| match (k / nx, k % nx) {
                (_, 0) => Cell::Hole(0),
                (_, 7) => Cell::Hole(1),
                (2..=3, 3..=4) => Cell::Hole(2),
                _ => Cell::Interior,
            })
            .collect();
        Grid::from_cells(nx, ny, cells).unwrap()
    }

    #[test]
    fn suite_passes_on_block() {
        let r = modulus_monotonicity_suite(&block_with_hole(), &SolverOptions::default()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.comparisons.len(), 6);
    }

    #[test]
    fn weighted_ends_lower_the_value() {
        // under the closed convention, weighting the end holes lets every path pay there
        let r = modulus_monotonicity_suite(&block_with_hole(), &SolverOptions::default()).unwrap();
        let last = r.comparisons.last().unwrap();
        assert!(last.smaller < last.larger - 0.1, "{last:?}");
    }

    #[test]
    fn finite_family_single_path() {
        let g = Grid::from_cells(4, 1, vec![Cell::Hole(0), Cell::Interior, Cell::Interior, Cell::Hole(1)]).unwrap();
        let fam = PathFamily::between(0, 1, Convention::Open);
        let v = finite_family_modulus(&g, &fam, &Mode::Classical, &[vec![0, 1, 2, 3]]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn default_family_without_holes() {
        let g = Grid::from_cells(3, 2, vec![Cell::Interior; 6]).unwrap();
        let f = default_family(&g).unwrap();
        assert_eq!(f.e, Selector::Cells(vec![0, 3]));
        assert_eq!(f.f, Selector::Cells(vec![2, 5]));
    }
}
