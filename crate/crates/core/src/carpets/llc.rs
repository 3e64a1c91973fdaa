use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::VecDeque;

use super::scene::{is_round, Outer, Scene};
use crate::error::{domain, Result};

/// Cells across the longer side of the search grid.
const SEARCH_CELLS: usize = 160;
/// Relative roundness tolerance for polygonal holes treated as disks.
const ROUND_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct LlcReport {
    pub lambda: f64,
    pub trials: usize,
    pub checked_inner: usize,
    pub checked_outer: usize,
    pub failures_inner: usize,
    pub failures_outer: usize,
    /// `(a, r, x, y)` of the first failing trial.
    pub witness: Option<[(f64, f64); 4]>,
    pub slack: f64,
    pub pass: bool,
}

/// Samples balls `B(a, r)` and point pairs, checking both linear local
/// connectivity conditions with factor `λ` by breadth-first search on a grid.
///
/// Inner condition: `x, y ∈ B(a,r) ∩ Ω` joined inside `B(a, λr)`. Outer
/// condition: `x, y ∈ Ω \ B(a,r)` joined outside `B(a, r/λ)`. Both radii are
/// widened by two cell diagonals to absorb the discretization.
pub fn llc_check(scene: &Scene, lambda: f64, trials: usize, seed: u64) -> Result<LlcReport> {
    if !(lambda >= 1.0) {
        return domain(format!("LLC factor {lambda} must be at least 1"));
    }
    let round = scene.holes.iter().all(|h| is_round(&h.shape, ROUND_TOL))
        && match &scene.outer {
            Outer::Annulus { .. } => true,
            Outer::Curve { curve, .. } => is_round(&super::scene::Shape::Polygon(curve.clone()), ROUND_TOL),
        };
    if lambda < 1.0 + 1e-12 && !round {
        return domain("factor 1 is only available for round boundaries");
    }
    let (lo, hi) = scene.bbox()?;
    let span = (hi.re - lo.re).max(hi.im - lo.im);
    let h = span / SEARCH_CELLS as f64;
    let nx = ((hi.re - lo.re) / h).ceil() as usize + 1;
    let ny = ((hi.im - lo.im) / h).ceil() as usize + 1;
    let center = |i: usize, j: usize| Complex64::new(lo.re + (i as f64 + 0.5) * h, lo.im + (j as f64 + 0.5) * h);
    let inside: Vec<bool> = (0..nx * ny).map(|k| scene.in_domain(center(k % nx, k / nx))).collect();
    let cells: Vec<usize> = (0..nx * ny).filter(|&k| inside[k]).collect();
    if cells.is_empty() {
        return domain("domain has no grid cells");
    }
    let slack = 2.0 * h * 2f64.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LlcReport {
        lambda,
        trials,
        checked_inner: 0,
        checked_outer: 0,
        failures_inner: 0,
        failures_outer: 0,
        witness: None,
        slack,
        pass: true,
    };
    let connected = |from: usize, to: usize, allow: &dyn Fn(Complex64) -> bool| -> bool {
        let mut seen = vec![false; nx * ny];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(k) = queue.pop_front() {
            if k == to {
                return true;
            }
            let (i, j) = (k % nx, k / nx);
            let mut push = |ii: usize, jj: usize| {
                let n = jj * nx + ii;
                if !seen[n] && inside[n] && allow(center(ii, jj)) {
                    seen[n] = true;
                    queue.push_back(n);
                }
            };
            if i > 0 {
                push(i - 1, j);
            }
            if i + 1 < nx {
                push(i + 1, j);
            }
            if j > 0 {
                push(i, j - 1);
            }
            if j + 1 < ny {
                push(i, j + 1);
            }
        }
        false
    };
    for _ in 0..trials {
        let a = center(rng.gen_range(0..nx), rng.gen_range(0..ny));
        let r = span * rng.gen_range(0.05..0.8);
        let near: Vec<usize> = cells.iter().copied().filter(|&k| (center(k % nx, k / nx) - a).norm() < r).collect();
        let far: Vec<usize> = cells.iter().copied().filter(|&k| (center(k % nx, k / nx) - a).norm() > r).collect();
        let whole = |_: Complex64| true;
        if near.len() >= 2 {
            let x = near[rng.gen_range(0..near.len())];
            let y = near[rng.gen_range(0..near.len())];
            // pairs the grid cannot join at all say nothing about the condition
            if connected(x, y, &whole) {
                report.checked_inner += 1;
                let limit = lambda * r + slack;
                if !connected(x, y, &|z| (z - a).norm() < limit) {
                    report.failures_inner += 1;
                    record(&mut report, a, r, center(x % nx, x / nx), center(y % nx, y / nx));
                }
            }
        }
        if far.len() >= 2 {
            let x = far[rng.gen_range(0..far.len())];
            let y = far[rng.gen_range(0..far.len())];
            if connected(x, y, &whole) {
                report.checked_outer += 1;
                let limit = r / lambda - slack;
                if !connected(x, y, &|z| (z - a).norm() > limit) {
                    report.failures_outer += 1;
                    record(&mut report, a, r, center(x % nx, x / nx), center(y % nx, y / nx));
                }
            }
        }
    }
    report.pass = report.failures_inner == 0 && report.failures_outer == 0;
    Ok(report)
}

fn record(report: &mut LlcReport, a: Complex64, r: f64, x: Complex64, y: Complex64) {
    if report.witness.is_none() {
        report.witness = Some([(a.re, a.im), (r, 0.0), (x.re, x.im), (y.re, y.im)]);
    }
}
