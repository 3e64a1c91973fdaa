//! Exhaustive reference solver for tiny grids: enumerate the family, then
//! solve the quadratic program over every path at once.

use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

use super::family::{Convention, Mode, PathFamily};
use super::grid::{Cell, Grid};
use super::solver::{MassDistribution, ModulusResult, Status};
use crate::carpets::scene::Label;
use crate::error::{domain, Error, Result};

/// Most cells the oracle accepts.
pub const MAX_CELLS: usize = 144;
/// Most paths enumerated before giving up.
pub const MAX_PATHS: usize = 100_000;
const MAX_VARS: usize = 128;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Cell(usize),
    Hole(Label),
}

struct Instance {
    keys: Vec<Key>,
    adj: Vec<Vec<usize>>,
    start: Vec<bool>,
    end: Vec<bool>,
    blocked: Vec<bool>,
    /// Bit of the counted variable, if any.
    bit: Vec<Option<usize>>,
    var_key: Vec<Key>,
}

fn instance(g: &Grid, fam: &PathFamily, mode: &Mode) -> Result<Instance> {
    let mut index: BTreeMap<Key, usize> = BTreeMap::new();
    let mut keys = Vec::new();
    let mut of_cell = vec![usize::MAX; g.len()];
    for k in 0..g.len() {
        let key = match g.cells[k] {
            Cell::Interior => Key::Cell(k),
            Cell::Hole(l) => Key::Hole(l),
            Cell::Exterior => continue,
        };
        of_cell[k] = *index.entry(key).or_insert_with(|| {
            keys.push(key);
            keys.len() - 1
        });
    }
    let n = keys.len();
    let mut adj = vec![Vec::new(); n];
    for k in 0..g.len() {
        if of_cell[k] == usize::MAX {
            continue;
        }
        for m in g.neighbors(k) {
            let (a, b) = (of_cell[k], of_cell[m]);
            if b != usize::MAX && a != b && !adj[a].contains(&b) {
                adj[a].push(b);
            }
        }
    }
    let mut start = vec![false; n];
    let mut end = vec![false; n];
    for c in fam.e.cells(g)? {
        start[of_cell[c]] = true;
    }
    for c in fam.f.cells(g)? {
        end[of_cell[c]] = true;
    }
    if start.iter().zip(&end).any(|(a, b)| *a && *b) {
        return domain("the two ends of the family overlap");
    }
    let mut in_region = vec![true; n];
    if let Some(r) = &fam.region {
        in_region = vec![false; n];
        for (k, &ok) in r.iter().enumerate() {
            if ok && of_cell[k] != usize::MAX {
                in_region[of_cell[k]] = true;
            }
        }
    }
    let open = *mode == Mode::Carpet || fam.convention == Convention::Open;
    let mut blocked = vec![false; n];
    let mut bit = vec![None; n];
    let mut var_key = Vec::new();
    for v in 0..n {
        let endpoint = start[v] || end[v];
        let (passable, weighted) = match (keys[v], mode) {
            (Key::Cell(_), Mode::Carpet) => (true, false),
            (Key::Cell(_), _) => (true, true),
            (Key::Hole(_), Mode::Classical) => (false, false),
            (Key::Hole(l), Mode::Transboundary(w)) => (w.contains(&l), w.contains(&l)),
            (Key::Hole(_), Mode::Carpet) => (true, true),
        };
        blocked[v] = !endpoint && (!passable || !in_region[v]);
        let counted = if endpoint { !open && weighted } else { weighted && !blocked[v] };
        if counted {
            bit[v] = Some(var_key.len());
            var_key.push(keys[v]);
        }
    }
    if var_key.len() > MAX_VARS {
        return Err(Error::Resource(format!("{} variables exceed the oracle's limit {MAX_VARS}", var_key.len())));
    }
    Ok(Instance { keys, adj, start, end, blocked, bit, var_key })
}

struct Search<'a> {
    inst: &'a Instance,
    on_path: Vec<bool>,
    /// Minimal variable sets found so far.
    found: Vec<u128>,
    visited: usize,
}

impl Search<'_> {
    fn var(&self, v: usize) -> u128 {
        self.inst.bit[v].map_or(0, |b| 1u128 << b)
    }

    fn dominated(&self, mask: u128) -> bool {
        self.found.iter().any(|&f| f & mask == f)
    }

    /// `w` may follow `last` only if it touches no earlier path node.
    fn chordless(&self, w: usize, last: usize) -> bool {
        self.inst.adj[w].iter().all(|&z| z == last || !self.on_path[z])
    }

    fn record(&mut self, mask: u128) {
        if self.dominated(mask) {
            return;
        }
        self.found.retain(|&f| f & mask != mask);
        self.found.push(mask);
    }

    fn extend(&mut self, last: usize, mask: u128) -> Result<()> {
        self.visited += 1;
        if self.visited > MAX_PATHS {
            return Err(Error::Resource(format!("more than {MAX_PATHS} partial paths")));
        }
        let inst = self.inst;
        for &w in &inst.adj[last] {
            if inst.start[w] || self.on_path[w] || !self.chordless(w, last) {
                continue;
            }
            let m = mask | self.var(w);
            if inst.end[w] {
                self.record(m);
                continue;
            }
            if inst.blocked[w] || self.dominated(m) {
                continue;
            }
            self.on_path[w] = true;
            self.extend(w, m)?;
            self.on_path[w] = false;
        }
        Ok(())
    }
}

/// Lawson–Hanson non-negative least squares: `min |A u − b|` over `u ≥ 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let m = a.ncols();
    let mut u = DVector::<f64>::zeros(m);
    let mut passive = vec![false; m];
    let tol = 1e-13 * (1.0 + a.amax() * b.amax()) * (a.nrows().max(m) as f64);
    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let cols: Vec<usize> = (0..m).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, t| a[(i, cols[t])]);
        let z = sub.svd(true, true).solve(b, 1e-14).expect("svd with vectors");
        let mut full = DVector::zeros(m);
        for (t, &j) in cols.iter().enumerate() {
            full[j] = z[t];
        }
        full
    };
    for _ in 0..3 * m + 10 {
        let w = a.transpose() * (b - a * &u);
        let pick = (0..m).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| w[i].total_cmp(&w[j]).then(j.cmp(&i)));
        let Some(j) = pick else { break };
        passive[j] = true;
        loop {
            let z = solve_passive(&passive);
            if (0..m).all(|k| !passive[k] || z[k] > 0.0) {
                u = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for k in 0..m {
                if passive[k] && z[k] <= 0.0 {
                    alpha = alpha.min(u[k] / (u[k] - z[k]));
                }
            }
            u += (z - &u) * alpha;
            for k in 0..m {
                if passive[k] && u[k] <= 1e-15 {
                    passive[k] = false;
                    u[k] = 0.0;
                }
            }
        }
    }
    u
}

/// `min |x|²` subject to `G x ≥ 1`, through the dual least-squares problem.
fn least_distance(rows: &[u128], n: usize) -> Option<Vec<f64>> {
    let m = rows.len();
    let e = DMatrix::from_fn(n + 1, m, |i, k| if i == n || rows[k] >> i & 1 == 1 { 1.0 } else { 0.0 });
    let mut f = DVector::zeros(n + 1);
    f[n] = 1.0;
    let u = nnls(&e, &f);
    let r = &e * u - f;
    if r.norm() < 1e-12 {
        return None;
    }
    Some((0..n).map(|i| -r[i] / r[n]).collect())
}

/// Modulus by enumerating every chordless path of the family and solving the
/// full quadratic program. Paths with a chord are implied by a shorter path
/// through a subset of their nodes, so they add no constraint.
pub fn brute_force_modulus(g: &Grid, fam: &PathFamily, mode: &Mode) -> Result<ModulusResult> {
    if g.len() > MAX_CELLS {
        return Err(Error::Resource(format!("{} cells exceed the oracle's limit {MAX_CELLS}", g.len())));
    }
    let inst = instance(g, fam, mode)?;
    let mut search = Search { inst: &inst, on_path: vec![false; inst.keys.len()], found: Vec::new(), visited: 0 };
    for s in 0..inst.keys.len() {
        if inst.start[s] {
            search.on_path[s] = true;
            let m = search.var(s);
            search.extend(s, m)?;
            search.on_path[s] = false;
        }
    }
    let mut found = search.found;
    found.sort_unstable();
    let n = inst.var_key.len();
    let mut dist = MassDistribution::zero(g);
    let result = |value: f64, dist: MassDistribution, status: Status, constraints: usize| ModulusResult {
        value,
        distribution: dist,
        active_constraints: constraints,
        constraints,
        gap_estimate: 0.0,
        iterations: 0,
        status,
        mode: mode.name().to_string(),
        paths: Vec::new(),
    };
    if found.is_empty() {
        return Ok(result(0.0, dist, Status::EmptyFamily, 0));
    }
    if found.contains(&0) {
        return Ok(result(f64::INFINITY, dist, Status::Infeasible, found.len()));
    }
    let x = least_distance(&found, n).ok_or_else(|| Error::Internal("least-distance problem reported infeasible".into()))?;
    for (k, key) in inst.var_key.iter().enumerate() {
        match *key {
            Key::Cell(c) => dist.density[c] = x[k] / g.lengths[c],
            Key::Hole(l) => {
                dist.weights.insert(l, x[k]);
            }
        }
    }
    let value = x.iter().map(|v| v * v).sum();
    Ok(result(value, dist, Status::Converged, found.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(w: usize, hgt: usize) -> Grid {
        let nx = w + 2;
        let cells = (0..nx * hgt)
            .map(|k| match k % nx {
                0 => Cell::Hole(0),
                j if j == nx - 1 => Cell::Hole(1),
                _ => Cell::Interior,
            })
            .collect();
        Grid::from_cells(nx, hgt, cells).unwrap()
    }

    #[test]
    fn square_block_is_one() {
        let r = brute_force_modulus(&block(3, 3), &PathFamily::between(0, 1, Convention::Open), &Mode::Classical).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn single_blocking_hole() {
        let g = Grid::from_cells(3, 1, vec![Cell::Hole(0), Cell::Hole(5), Cell::Hole(1)]).unwrap();
        let r = brute_force_modulus(&g, &PathFamily::between(0, 1, Convention::Open), &Mode::Carpet).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!((r.distribution.weight(5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nnls_known_solution() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_row_slice(&[1.0, -1.0, 0.0]);
        let u = nnls(&a, &b);
        // the second coordinate is pushed to zero; then u₀ minimizes (u−1)² + u²
        assert!((u[0] - 0.5).abs() < 1e-12 && u[1] == 0.0, "{u}");
    }

    #[test]
    fn too_large_rejected() {
        assert!(matches!(
            brute_force_modulus(&block(12, 12), &PathFamily::between(0, 1, Convention::Open), &Mode::Classical),
            Err(Error::Resource(_))
        ));
    }
}
