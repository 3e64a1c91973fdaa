//! Empirical Loewner profile: relative distance against classical modulus for
//! random pairs of connected cell sets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::family::{Convention, Mode, PathFamily, Selector};
use super::grid::{Cell, Grid};
use super::solver::{solve, SolverOptions};
use crate::error::{domain, Result};
use crate::geometry::{relative_distance, PointSet, SpherePoint};

/// Tries per requested sample before giving up on finding disjoint sets.
const DRAWS_PER_TRIAL: usize = 50;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileSample {
    pub delta: f64,
    pub modulus: f64,
    pub e_cells: usize,
    pub f_cells: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoewnerProfile {
    pub samples: Vec<ProfileSample>,
    /// `(t, min modulus over samples with Δ ≤ t)` at every sampled `t`, ascending.
    pub envelope: Vec<(f64, f64)>,
}

impl LoewnerProfile {
    /// Rank correlation between relative distance and modulus.
    pub fn spearman(&self) -> f64 {
        let d: Vec<f64> = self.samples.iter().map(|s| s.delta).collect();
        let m: Vec<f64> = self.samples.iter().map(|s| s.modulus).collect();
        spearman(&d, &m)
    }

    /// Envelope value at `t`: the smallest modulus seen at relative distance ≤ `t`.
    pub fn envelope_at(&self, t: f64) -> Option<f64> {
        self.envelope.iter().take_while(|(d, _)| *d <= t).last().map(|(_, m)| *m)
    }
}

/// Ranks with ties sharing their average rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; 0 when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// A connected set of `size` interior cells grown from a random seed cell.
fn grow(g: &Grid, interior: &[usize], size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut set = vec![*interior.choose(rng).expect("nonempty interior")];
    let mut frontier: Vec<usize> = Vec::new();
    while set.len() < size {
        frontier.clear();
        for &c in &set {
            for n in g.neighbors(c) {
                if g.cells[n] == Cell::Interior && !set.contains(&n) && !frontier.contains(&n) {
                    frontier.push(n);
                }
            }
        }
        let Some(&next) = frontier.choose(rng) else { break };
        set.push(next);
    }
    set.sort_unstable();
    set
}

fn touching(g: &Grid, a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|&c| b.contains(&c) || g.neighbors(c).any(|n| b.contains(&n)))
}

fn centers(g: &Grid, cells: &[usize]) -> PointSet {
    PointSet::points(cells.iter().map(|&c| SpherePoint::from_complex(g.center(c))).collect())
}

/// Samples `trials` pairs of disjoint, non-adjacent connected interior cell
/// sets, and records the relative distance of their cell centers against the
/// classical modulus of the closed family joining them.
pub fn loewner_profile(g: &Grid, trials: usize, seed: u64) -> Result<LoewnerProfile> {
    let interior: Vec<usize> = (0..g.len()).filter(|&k| g.cells[k] == Cell::Interior).collect();
    if interior.len() < 6 {
        return domain("too few interior cells to sample continua");
    }
    if g.components(|k| g.cells[k] == Cell::Interior) != 1 {
        return domain("the interior must be connected");
    }
    let max_size = (interior.len() / 8).clamp(2, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = SolverOptions { seed, ..Default::default() };
    let mut samples = Vec::with_capacity(trials);
    let mut draws = 0;
    while samples.len() < trials {
        draws += 1;
        if draws > trials * DRAWS_PER_TRIAL {
            return domain("could not draw disjoint continua in this grid");
        }
        let e = grow(g, &interior, rng.gen_range(2..=max_size), &mut rng);
        let f = grow(g, &interior, rng.gen_range(2..=max_size), &mut rng);
        if e.len() < 2 || f.len() < 2 || touching(g, &e, &f) {
            continue;
        }
        let delta = relative_distance(&centers(g, &e), &centers(g, &f), g.metric)?;
        let fam = PathFamily::new(Selector::Cells(e.clone()), Selector::Cells(f.clone()), Convention::Closed);
        let r = solve(g, &fam, &Mode::Classical, &opts)?;
        samples.push(ProfileSample { delta, modulus: r.value, e_cells: e.len(), f_cells: f.len() });
    }
    let mut order: Vec<&ProfileSample> = samples.iter().collect();
    order.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    let mut envelope = Vec::with_capacity(order.len());
    let mut low = f64::INFINITY;
    for s in order {
        low = low.min(s.modulus);
        envelope.push((s.delta, low));
    }
    Ok(LoewnerProfile { samples, envelope })
}
