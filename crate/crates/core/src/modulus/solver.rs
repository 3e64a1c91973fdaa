use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};

use super::family::{Mode, PathFamily};
use super::graph::{Node, Problem, Role};
use super::grid::{Cell, Grid};
use super::qp::{self, QpOptions};
use crate::carpets::scene::Label;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop once the relative gap between the certified lower bound and the
    /// value of the returned admissible distribution is at most `eps`.
    pub eps: f64,
    /// Cap on constraint-generation rounds.
    pub iteration_cap: usize,
    /// Most paths added per round.
    pub batch: usize,
    /// KKT tolerance of the inner quadratic program.
    pub qp_tol: f64,
    pub qp_max_sweeps: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { eps: 1e-3, iteration_cap: 10_000, batch: 64, qp_tol: 1e-7, qp_max_sweeps: 20_000, seed: 0 }
    }
}

impl SolverOptions {
    /// Settings tight enough to compare against the exhaustive oracle.
    pub fn precise() -> Self {
        SolverOptions { eps: 1e-10, qp_tol: 1e-13, qp_max_sweeps: 1_000_000, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    /// Some path meets no weighted cell or hole; no finite distribution is admissible.
    Infeasible,
    /// No path joins the two ends.
    EmptyFamily,
    IterationCap,
}

/// Density on cells plus one weight per hole label.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MassDistribution {
    /// `ρ` per cell, zero off the interior.
    pub density: Vec<f64>,
    pub weights: BTreeMap<Label, f64>,
}

impl MassDistribution {
    pub fn zero(g: &Grid) -> Self {
        MassDistribution { density: vec![0.0; g.len()], weights: g.labels().into_iter().map(|l| (l, 0.0)).collect() }
    }

    /// `Σ ρ² · area + Σ ρᵢ²`.
    pub fn total_mass(&self, g: &Grid) -> f64 {
        self.density_mass(g) + self.weights.values().map(|w| w * w).sum::<f64>()
    }

    pub fn density_mass(&self, g: &Grid) -> f64 {
        self.density.iter().enumerate().map(|(k, r)| r * r * g.cell_area(k)).sum()
    }

    pub fn weight(&self, label: Label) -> f64 {
        self.weights.get(&label).copied().unwrap_or(0.0)
    }
}

/// `Σ ρ·length` over interior cells visited plus each touched hole's weight once.
pub fn admissibility_sum(g: &Grid, d: &MassDistribution, path: &[usize]) -> f64 {
    let mut holes = BTreeSet::new();
    let mut s = 0.0;
    for &c in path {
        match g.cells[c] {
            Cell::Interior => s += d.density[c] * g.lengths[c],
            Cell::Hole(l) => {
                holes.insert(l);
            }
            Cell::Exterior => {}
        }
    }
    s + holes.into_iter().map(|l| d.weight(l)).sum::<f64>()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulusResult {
    pub value: f64,
    pub distribution: MassDistribution,
    /// Stored paths with a positive multiplier at the end.
    pub active_constraints: usize,
    /// Paths stored at the end.
    pub constraints: usize,
    /// Relative gap `(value − lower bound) / value` at the end.
    pub gap_estimate: f64,
    pub iterations: usize,
    pub status: Status,
    pub mode: String,
    /// Stored paths, as cell sequences with one representative cell per hole.
    #[serde(skip)]
    pub paths: Vec<Vec<usize>>,
}

impl ModulusResult {
    /// Turns a run stopped by the iteration cap into an error.
    pub fn checked(self) -> Result<Self> {
        match self.status {
            Status::IterationCap => Err(Error::Convergence { iterations: self.iterations, gap: self.gap_estimate }),
            _ => Ok(self),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Key {
    dist: f64,
    hops: u32,
    node: u32,
}

impl Eq for Key {}

impl Ord for Key {
    // reversed so that the max-heap pops the smallest key
    fn cmp(&self, o: &Self) -> Ordering {
        o.dist.total_cmp(&self.dist).then(o.hops.cmp(&self.hops)).then(o.node.cmp(&self.node))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Inner tolerance as a fraction of the current duality gap.
const LOOSE_QP_FACTOR: f64 = 0.05;
/// Inner tolerance of the first round.
const LOOSE_QP_START: f64 = 1e-2;
/// Rounds a path may go without a multiplier before it is dropped.
const IDLE_ROUNDS: usize = 5;

/// Outcome of one search for the least admissible paths.
pub(crate) struct Separation {
    /// Least admissibility sum, `None` when no path exists.
    pub min: Option<f64>,
    /// `(sum, node path)` in increasing order of sum.
    pub paths: Vec<(f64, Vec<usize>)>,
}

/// Node-cost shortest paths from the first end to the second. Candidates are
/// the tree paths into each second-end node from each of its neighbors.
pub(crate) fn separate(p: &Problem, x: &[f64], want: usize, below: f64) -> Separation {
    let n = p.graph.len();
    let cost = |v: usize| match p.role[v] {
        Role::Var(k) => x[k],
        _ => 0.0,
    };
    let mut dist = vec![f64::INFINITY; n];
    let mut hops = vec![u32::MAX; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for v in 0..n {
        if p.in_e[v] {
            dist[v] = cost(v);
            hops[v] = 0;
            heap.push(Key { dist: dist[v], hops: 0, node: v as u32 });
        }
    }
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    while let Some(Key { dist: d, hops: hp, node }) = heap.pop() {
        let u = node as usize;
        if done[u] || d > dist[u] || (d == dist[u] && hp > hops[u]) {
            continue;
        }
        done[u] = true;
        for &w in &p.graph.adj[u] {
            if p.in_f[w] {
                cands.push((d + cost(w), u, w));
                continue;
            }
            if p.in_e[w] || p.role[w] == Role::Blocked || done[w] {
                continue;
            }
            let nd = d + cost(w);
            let nh = hp + 1;
            if nd < dist[w] || (nd == dist[w] && nh < hops[w]) {
                dist[w] = nd;
                hops[w] = nh;
                pred[w] = u;
                heap.push(Key { dist: nd, hops: nh, node: w as u32 });
            }
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let min = cands.first().map(|c| c.0);
    let mut paths = Vec::new();
    for &(s, u, f) in &cands {
        if paths.len() >= want || s >= below {
            break;
        }
        let mut path = vec![f, u];
        let mut v = u;
        while pred[v] != usize::MAX {
            v = pred[v];
            path.push(v);
        }
        path.reverse();
        paths.push((s, path));
    }
    Separation { min, paths }
}

/// A path meeting no variable, found by breadth-first search.
pub(crate) fn free_path(p: &Problem) -> Option<Vec<usize>> {
    let n = p.graph.len();
    let free = |v: usize| p.role[v] == Role::Free;
    let mut pred = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for v in 0..n {
        if p.in_e[v] && free(v) {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &w in &p.graph.adj[u] {
            if seen[w] || !free(w) || p.in_e[w] {
                continue;
            }
            seen[w] = true;
            pred[w] = u;
            if p.in_f[w] {
                let mut path = vec![w];
                let mut v = w;
                while pred[v] != usize::MAX {
                    v = pred[v];
                    path.push(v);
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(w);
        }
    }
    None
}

fn distribution(g: &Grid, p: &Problem, x: &[f64]) -> MassDistribution {
    let mut d = MassDistribution::zero(g);
    for (k, &n) in p.var_node.iter().enumerate() {
        match p.graph.nodes[n] {
            Node::Cell(c) => d.density[c] = x[k] / p.var_length[k],
            Node::Hole(l) => {
                d.weights.insert(l, x[k]);
            }
        }
    }
    d
}

/// Constraint generation: alternate an exact least-admissible-path search with
/// the quadratic program over the paths found so far. The final variables are
/// divided by the least admissibility sum over the whole family, so the
/// reported distribution is admissible for every path.
pub fn solve(g: &Grid, fam: &PathFamily, mode: &Mode, opts: &SolverOptions) -> Result<ModulusResult> {
    let p = Problem::new(g, fam, mode)?;
    let nv = p.var_count();
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut node_paths: Vec<Vec<usize>> = Vec::new();
    let mut idle: Vec<usize> = Vec::new();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut lambda: Vec<f64> = Vec::new();
    let mut x = vec![0.0; nv];
    let mut iterations = 0;
    let mut qp_tol = LOOSE_QP_START;
    let finish = |x: Vec<f64>, status: Status, min: f64, gap: f64, iterations: usize, lambda: &[f64], node_paths: &[Vec<usize>]| {
        let scale = if min > 0.0 && min.is_finite() { 1.0 / min } else { 1.0 };
        let x: Vec<f64> = x.into_iter().map(|v| v * scale).collect();
        let value = match status {
            Status::Infeasible => f64::INFINITY,
            Status::EmptyFamily => 0.0,
            _ => x.iter().map(|v| v * v).sum(),
        };
        ModulusResult {
            value,
            distribution: distribution(g, &p, &x),
            active_constraints: lambda.iter().filter(|&&l| l > 0.0).count(),
            constraints: node_paths.len(),
            gap_estimate: gap,
            iterations,
            status,
            mode: mode.name().to_string(),
            paths: node_paths.iter().map(|np| np.iter().map(|&n| p.graph.representative(n)).collect()).collect(),
        }
    };
    if let Some(path) = free_path(&p) {
        node_paths.push(path);
        return Ok(finish(x, Status::Infeasible, f64::NAN, 0.0, iterations, &lambda, &node_paths));
    }
    loop {
        let sep = separate(&p, &x, opts.batch.max(1) * 4, 1.0);
        let Some(min) = sep.min else {
            return Ok(finish(vec![0.0; nv], Status::EmptyFamily, f64::INFINITY, 0.0, iterations, &lambda, &node_paths));
        };
        // any multipliers on stored paths bound the modulus from below, the
        // rescaled point from above
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        let lower = 2.0 * lambda.iter().sum::<f64>() - norm2;
        let upper = if min > 0.0 { norm2 / (min * min) } else { f64::INFINITY };
        let gap = if upper.is_finite() && upper > 0.0 { ((upper - lower) / upper).max(0.0) } else { 1.0 };
        if gap <= opts.eps {
            return Ok(finish(x, Status::Converged, min, gap, iterations, &lambda, &node_paths));
        }
        if iterations >= opts.iteration_cap {
            return Ok(finish(x, Status::IterationCap, min, gap, iterations, &lambda, &node_paths));
        }
        let mut added = 0;
        for (_, path) in sep.paths {
            let vars = p.path_vars(&path);
            if seen.insert(vars.clone()) {
                rows.push(vars);
                node_paths.push(path);
                idle.push(0);
                lambda.push(0.0);
                added += 1;
                if added == opts.batch {
                    break;
                }
            }
        }
        if added == 0 {
            // the stored paths are what falls short: solve them more exactly
            if qp_tol <= opts.qp_tol {
                return Ok(finish(x, Status::IterationCap, min, gap, iterations, &lambda, &node_paths));
            }
            qp_tol = (qp_tol * 1e-2).max(opts.qp_tol);
        }
        qp_tol = qp_tol.min(LOOSE_QP_FACTOR * gap).max(opts.qp_tol);
        let qp_opts = QpOptions { tol: qp_tol, max_sweeps: opts.qp_max_sweeps, seed: opts.seed.wrapping_add(iterations as u64) };
        let out = qp::solve(nv, &rows, &mut lambda, &qp_opts);
        x = out.x;
        iterations += 1;
        // forget paths that have carried no multiplier for a while
        for (k, l) in lambda.iter().enumerate() {
            idle[k] = if *l > 0.0 { 0 } else { idle[k] + 1 };
        }
        if idle.iter().any(|&i| i > IDLE_ROUNDS) {
            let keep: Vec<bool> = idle.iter().map(|&i| i <= IDLE_ROUNDS).collect();
            for (k, row) in rows.iter().enumerate() {
                if !keep[k] {
                    seen.remove(row);
                }
            }
            let mut it = keep.iter();
            rows.retain(|_| *it.next().expect("one flag per row"));
            let mut it = keep.iter();
            node_paths.retain(|_| *it.next().expect("one flag per row"));
            let mut it = keep.iter();
            lambda.retain(|_| *it.next().expect("one flag per row"));
            idle.retain(|&i| i <= IDLE_ROUNDS);
        }
    }
}

pub fn classical_modulus(g: &Grid, fam: &PathFamily, opts: &SolverOptions) -> Result<ModulusResult> {
    solve(g, fam, &Mode::Classical, opts)
}

pub fn transboundary_modulus(g: &Grid, fam: &PathFamily, hole_labels: &BTreeSet<Label>, opts: &SolverOptions) -> Result<ModulusResult> {
    solve(g, fam, &Mode::Transboundary(hole_labels.clone()), opts)
}

pub fn carpet_modulus(g: &Grid, fam: &PathFamily, opts: &SolverOptions) -> Result<ModulusResult> {
    solve(g, fam, &Mode::Carpet, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulus::family::{Convention, Selector};

    /// `w × hgt` interior block between a left column hole 0 and a right column hole 1.
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
    fn rectangle_ratio() {
        let g = block(4, 3);
        let fam = PathFamily::between(0, 1, Convention::Open);
        let r = classical_modulus(&g, &fam, &SolverOptions::precise()).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!((r.value - 0.75).abs() < 1e-9, "{}", r.value);
        for path in &r.paths {
            assert!(admissibility_sum(&g, &r.distribution, path) >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn admissibility_counts_holes_once() {
        let g = Grid::from_cells(3, 1, vec![Cell::Hole(4), Cell::Interior, Cell::Hole(4)]).unwrap();
        let mut d = MassDistribution::zero(&g);
        d.weights.insert(4, 0.7);
        assert!((admissibility_sum(&g, &d, &[0, 1, 2]) - 0.7).abs() < 1e-15);
        assert_eq!(admissibility_sum(&g, &MassDistribution::zero(&g), &[0, 1, 2]), 0.0);
    }

    #[test]
    fn separated_ends_give_empty_family() {
        let g = Grid::from_cells(3, 1, vec![Cell::Hole(0), Cell::Exterior, Cell::Hole(1)]).unwrap();
        let r = classical_modulus(&g, &PathFamily::between(0, 1, Convention::Open), &SolverOptions::default()).unwrap();
        assert_eq!(r.status, Status::EmptyFamily);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn carpet_needs_a_hole_on_every_path() {
        let g = block(3, 2);
        let r = carpet_modulus(&g, &PathFamily::between(0, 1, Convention::Open), &SolverOptions::default()).unwrap();
        assert_eq!(r.status, Status::Infeasible);
    }

    #[test]
    fn two_holes_on_every_path() {
        let g = Grid::from_cells(4, 1, vec![Cell::Hole(0), Cell::Hole(2), Cell::Hole(3), Cell::Hole(1)]).unwrap();
        let r = carpet_modulus(&g, &PathFamily::between(0, 1, Convention::Open), &SolverOptions::precise()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
        assert!((r.distribution.weight(2) - 0.5).abs() < 1e-9);
        assert_eq!(r.distribution.weight(0), 0.0);
    }

    #[test]
    fn rect_selectors_closed_convention() {
        let g = block(5, 5);
        let fam = PathFamily::new(Selector::Cells((0..5).map(|i| i * 7 + 1).collect()), Selector::Cells((0..5).map(|i| i * 7 + 5).collect()), Convention::Closed);
        let r = classical_modulus(&g, &fam, &SolverOptions::precise()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
    }
}
