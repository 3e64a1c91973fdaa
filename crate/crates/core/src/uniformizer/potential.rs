//! Discrete harmonic potential on the hole-contracted grid and the angular
//! coordinate read off its flux.

use num_complex::Complex64;
use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::TAU;

use crate::carpets::scene::{polar_angle, Label};
use crate::error::{domain, Error, Result};
use crate::modulus::graph::NodeGraph;
use crate::modulus::{Cell, Chart, Grid};

/// Conductance of the face between two grid cells: face length over the
/// distance it spans. A hole holds its potential up to its own boundary, so
/// an edge leaving a hole spans half a cell.
fn conductance(g: &Grid, a: usize, b: usize) -> f64 {
    let base = match g.chart {
        Chart::Log(c) if a / g.nx == b / g.nx => c.h_u / c.h_theta,
        Chart::Log(c) => c.h_theta / c.h_u,
        _ => 1.0,
    };
    let hole = |k: usize| matches!(g.cells[k], Cell::Hole(_));
    if hole(a) || hole(b) {
        2.0 * base
    } else {
        base
    }
}

/// `u = 0` on one hole, `u = 1` on another, harmonic elsewhere, with every
/// other hole a single node of unknown potential.
#[derive(Clone, Debug)]
pub struct Potential {
    pub graph: NodeGraph,
    /// Potential per node; nodes cut off from both boundaries get 0.
    pub u: Vec<f64>,
    /// Weighted node adjacency.
    pub edges: Vec<Vec<(usize, f64)>>,
    pub low: usize,
    pub high: usize,
    pub cg_iterations: usize,
    pub relative_residual: f64,
}

impl Potential {
    /// Net flow out of the low node.
    pub fn total_flux(&self) -> f64 {
        self.edges[self.low].iter().map(|&(b, w)| w * (self.u[b] - self.u[self.low])).sum()
    }

    pub fn hole_value(&self, label: Label) -> Option<f64> {
        self.graph.hole_node.get(&label).map(|&n| self.u[n])
    }
}

/// Jacobi-preconditioned conjugate gradients on the free nodes.
pub fn dirichlet_potential(g: &Grid, low: Label, high: Label, tol: f64) -> Result<Potential> {
    let graph = NodeGraph::new(g);
    let (Some(&lo), Some(&hi)) = (graph.hole_node.get(&low), graph.hole_node.get(&high)) else {
        return domain(format!("holes {low} and {high} must both be on the grid"));
    };
    if lo == hi {
        return domain("the two boundary holes must differ");
    }
    let n = graph.len();
    let mut acc: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for k in 0..g.len() {
        let Some(a) = graph.cell_node[k] else { continue };
        for m in g.neighbors(k) {
            if let Some(b) = graph.cell_node[m] {
                if a != b {
                    *acc[a].entry(b).or_insert(0.0) += conductance(g, k, m);
                }
            }
        }
    }
    let edges: Vec<Vec<(usize, f64)>> = acc.into_iter().map(|m| m.into_iter().collect()).collect();

    // nodes reachable from a boundary take part in the solve
    let mut reach = vec![false; n];
    let mut queue = VecDeque::from([lo, hi]);
    reach[lo] = true;
    reach[hi] = true;
    while let Some(a) = queue.pop_front() {
        for &(b, _) in &edges[a] {
            if !reach[b] {
                reach[b] = true;
                queue.push_back(b);
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|&a| reach[a] && a != lo && a != hi).collect();
    let mut slot = vec![usize::MAX; n];
    for (i, &a) in free.iter().enumerate() {
        slot[a] = i;
    }
    let diag: Vec<f64> = free.iter().map(|&a| edges[a].iter().map(|e| e.1).sum()).collect();
    let rhs: Vec<f64> = free.iter().map(|&a| edges[a].iter().filter(|e| e.0 == hi).map(|e| e.1).sum()).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        for (i, &a) in free.iter().enumerate() {
            let mut s = diag[i] * x[i];
            for &(b, w) in &edges[a] {
                if slot[b] != usize::MAX {
                    s -= w * x[slot[b]];
                }
            }
            out[i] = s;
        }
    };
    let m = free.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; m];
    let mut r = rhs.clone();
    let bnorm = dot(&rhs, &rhs).sqrt().max(f64::MIN_POSITIVE);
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(v, d)| v / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; m];
    let mut iterations = 0;
    let mut rel = dot(&r, &r).sqrt() / bnorm;
    while rel > tol {
        if iterations >= 10 * m + 100 {
            return Err(Error::Convergence { iterations, gap: rel });
        }
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        let next = dot(&r, &z);
        let beta = next / rz;
        rz = next;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
        iterations += 1;
        rel = dot(&r, &r).sqrt() / bnorm;
    }
    let mut u = vec![0.0; n];
    u[hi] = 1.0;
    for (i, &a) in free.iter().enumerate() {
        u[a] = x[i];
    }
    Ok(Potential { graph, u, edges, low: lo, high: hi, cg_iterations: iterations, relative_residual: rel })
}

/// Angle of a cell next to the low hole, seen from that hole.
fn boundary_key(g: &Grid, p: &Potential, cell: usize) -> f64 {
    if let Some((_, t)) = g.log_center(cell) {
        return t;
    }
    let cells: Vec<usize> = (0..g.len()).filter(|&k| p.graph.cell_node[k] == Some(p.low)).collect();
    let mid: Complex64 = cells.iter().map(|&k| g.center(k)).sum::<Complex64>() / cells.len() as f64;
    polar_angle(g.center(cell) - mid)
}

/// Angular coordinate of every node reached by the flow. Grid edges leaving
/// the low hole are ordered by angle around it and assigned angles in
/// proportion to the flux they carry, so the whole flux spans `2π`, then
/// turned to agree with the cells' own angles on average; every other node takes the flux-weighted circular mean of the angles flowing
/// into it from lower potential.
pub fn flux_angles(g: &Grid, p: &Potential) -> Vec<Option<f64>> {
    let node = |k: usize| p.graph.cell_node[k];
    let mut boundary: Vec<(f64, usize, f64)> = Vec::new();
    for k in 0..g.len() {
        if node(k) != Some(p.low) {
            continue;
        }
        for m in g.neighbors(k) {
            if let Some(b) = node(m) {
                if b != p.low {
                    let f = conductance(g, k, m) * (p.u[b] - p.u[p.low]);
                    if f > 0.0 {
                        boundary.push((boundary_key(g, p, m), m, f));
                    }
                }
            }
        }
    }
    boundary.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let total: f64 = boundary.iter().map(|e| e.2).sum();
    let n = p.graph.len();
    let mut sum = vec![Complex64::new(0.0, 0.0); n];
    let mut cum = 0.0;
    let mut flux_theta = Vec::with_capacity(boundary.len());
    for &(_, _, f) in &boundary {
        flux_theta.push(TAU * (cum + f / 2.0) / total);
        cum += f;
    }
    // remove the mean turn between flux angles and the cells' own angles, so
    // that the result does not depend on where the count starts
    let turn: Complex64 = boundary.iter().zip(&flux_theta).map(|(e, t)| Complex64::from_polar(1.0, t - e.0)).sum();
    let offset = if turn.norm() > 0.0 { turn.arg() } else { 0.0 };
    for (&(_, m, f), t) in boundary.iter().zip(&flux_theta) {
        let b = node(m).expect("interior or hole cell");
        sum[b] += Complex64::from_polar(f, t - offset);
    }
    let mut order: Vec<usize> = (0..n).filter(|&a| a != p.low).collect();
    order.sort_by(|&a, &b| p.u[a].total_cmp(&p.u[b]).then(a.cmp(&b)));
    let mut angle = vec![None; n];
    for a in order {
        // contributions from every lower neighbor are final by now
        for &(b, w) in &p.edges[a] {
            if b != p.low && p.u[b] < p.u[a] {
                if let Some(t) = angle[b] {
                    sum[a] += Complex64::from_polar(w * (p.u[a] - p.u[b]), t);
                }
            }
        }
        if sum[a].norm() > 0.0 {
            angle[a] = Some(polar_angle(sum[a]));
        }
    }
    angle
}

/// Hole labels with their node, excluding the two boundary holes.
pub fn inner_holes(p: &Potential) -> Vec<(Label, usize)> {
    p.graph.hole_node.iter().filter(|(_, &n)| n != p.low && n != p.high).map(|(&l, &n)| (l, n)).collect()
}
