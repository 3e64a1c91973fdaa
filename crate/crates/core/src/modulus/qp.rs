//! `min |x|²` subject to `Σ_{v ∈ P_k} x_v ≥ 1` for a list of index sets `P_k`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest active set handed to the direct solve.
pub const POLISH_LIMIT: usize = 150;
/// Steps before the first attempt at the direct solve; the wait doubles after each failure.
const POLISH_FIRST: usize = 25;

#[derive(Clone, Debug)]
pub struct QpOptions {
    /// Target for the largest violation and the largest complementarity product.
    pub tol: f64,
    /// Cap on solver steps, each one pass over the rows.
    pub max_sweeps: usize,
    /// Order of the warm-up passes.
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct QpOutcome {
    pub x: Vec<f64>,
    pub sweeps: usize,
    pub polished: bool,
    pub converged: bool,
    pub violation: f64,
}

fn row_sum(x: &[f64], row: &[u32]) -> f64 {
    row.iter().map(|&v| x[v as usize]).sum()
}

fn primal(n: usize, rows: &[Vec<u32>], lambda: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (row, &l) in rows.iter().zip(lambda) {
        if l != 0.0 {
            for &v in row {
                x[v as usize] += l;
            }
        }
    }
    x
}

/// `(largest violation, largest complementarity product)`.
fn kkt(x: &[f64], rows: &[Vec<u32>], lambda: &[f64]) -> (f64, f64) {
    let mut viol: f64 = 0.0;
    let mut comp: f64 = 0.0;
    for (row, &l) in rows.iter().zip(lambda) {
        let s = 1.0 - row_sum(x, row);
        viol = viol.max(s);
        comp = comp.max(l * s.abs());
    }
    (viol, comp)
}

/// Rows with positive multipliers, largest first, keeping only those
/// linearly independent of the rows already kept. Returns the kept rows and
/// the Cholesky factor of their overlap matrix `|P_a ∩ P_b|`.
fn independent_rows(n: usize, rows: &[Vec<u32>], order: &[usize]) -> (Vec<usize>, Vec<Vec<f64>>) {
    let mut kept: Vec<usize> = Vec::new();
    let mut chol: Vec<Vec<f64>> = Vec::new();
    let mut mark = vec![false; n];
    for &c in order {
        for &v in &rows[c] {
            mark[v as usize] = true;
        }
        let col: Vec<f64> = kept.iter().map(|&j| rows[j].iter().filter(|&&v| mark[v as usize]).count() as f64).collect();
        for &v in &rows[c] {
            mark[v as usize] = false;
        }
        let mut y = vec![0.0; kept.len()];
        for i in 0..kept.len() {
            let s: f64 = (0..i).map(|t| chol[i][t] * y[t]).sum();
            y[i] = (col[i] - s) / chol[i][i];
        }
        let diag = rows[c].len() as f64;
        let d = diag - y.iter().map(|v| v * v).sum::<f64>();
        if d > 1e-9 * diag {
            y.push(d.sqrt());
            chol.push(y);
            kept.push(c);
        }
    }
    (kept, chol)
}

/// Solves `G_SS λ_S = 1` on an independent subset of the rows with positive
/// multipliers, dropping rows whose multiplier comes out negative, and accepts
/// the result when it is feasible for every row.
fn polish(n: usize, rows: &[Vec<u32>], lambda: &[f64], tol: f64) -> Option<Vec<f64>> {
    let mut order: Vec<usize> = (0..rows.len()).filter(|&k| lambda[k] > 0.0).collect();
    if order.is_empty() || order.len() > POLISH_LIMIT {
        return None;
    }
    order.sort_by(|&a, &b| lambda[b].total_cmp(&lambda[a]).then(a.cmp(&b)));
    for _ in 0..16 {
        let (kept, l) = independent_rows(n, rows, &order);
        let m = kept.len();
        // forward then backward substitution with the factor
        let mut y = vec![0.0; m];
        for i in 0..m {
            let s: f64 = (0..i).map(|t| l[i][t] * y[t]).sum();
            y[i] = (1.0 - s) / l[i][i];
        }
        let mut sol = vec![0.0; m];
        for i in (0..m).rev() {
            let s: f64 = ((i + 1)..m).map(|t| l[t][i] * sol[t]).sum();
            sol[i] = (y[i] - s) / l[i][i];
        }
        if sol.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let (worst, &low) = sol.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
        if low < -1e-12 {
            order.retain(|&k| k != kept[worst]);
            if order.is_empty() {
                return None;
            }
            continue;
        }
        let mut full = vec![0.0; rows.len()];
        for (a, &k) in kept.iter().enumerate() {
            full[k] = sol[a].max(0.0);
        }
        let x = primal(n, rows, &full);
        let (viol, _) = kkt(&x, rows, &full);
        return (viol <= tol).then_some(full);
    }
    None
}

/// Randomized passes of dual coordinate ascent, each row in turn raised or
/// lowered until it is tight or its multiplier is zero.
fn sweep(x: &mut [f64], rows: &[Vec<u32>], lambda: &mut [f64], order: &[usize]) {
    for &k in order {
        let row = &rows[k];
        let step = (1.0 - row_sum(x, row)) / row.len() as f64;
        let delta = step.max(-lambda[k]);
        if delta != 0.0 {
            lambda[k] += delta;
            for &v in row {
                x[v as usize] += delta;
            }
        }
    }
}

/// `G p = A Aᵀ p`, also returning `Aᵀ p`.
fn gram_times(n: usize, rows: &[Vec<u32>], p: &[f64], out: &mut [f64]) -> Vec<f64> {
    let at = primal(n, rows, p);
    for (o, row) in out.iter_mut().zip(rows) {
        *o = row_sum(&at, row);
    }
    at
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Upper estimate of the largest eigenvalue of `A Aᵀ` by power iteration.
fn gram_norm(n: usize, rows: &[Vec<u32>]) -> f64 {
    let m = rows.len();
    let mut v = vec![1.0 / (m as f64).sqrt(); m];
    let mut w = vec![0.0; m];
    let mut est: f64 = 0.0;
    for _ in 0..30 {
        gram_times(n, rows, &v, &mut w);
        let norm = dot(&w, &w).sqrt();
        if norm == 0.0 {
            return 1.0;
        }
        est = norm;
        v.iter_mut().zip(&w).for_each(|(a, b)| *a = b / norm);
    }
    // power iteration approaches from below
    1.05 * est
}

/// Gradient `A Aᵀ λ − 1` and primal point `Aᵀ λ`, computed afresh.
fn refresh(n: usize, rows: &[Vec<u32>], lambda: &[f64], g: &mut [f64]) -> Vec<f64> {
    let x = primal(n, rows, lambda);
    for (gi, row) in g.iter_mut().zip(rows) {
        *gi = row_sum(&x, row) - 1.0;
    }
    x
}

fn free_gradient(lambda: &[f64], g: &[f64]) -> Vec<f64> {
    lambda.iter().zip(g).map(|(&l, &gi)| if l > 0.0 { gi } else { 0.0 }).collect()
}

/// Dual problem `min ½ λᵀ A Aᵀ λ − Σλ` over `λ ≥ 0`, by conjugate gradients
/// on the free multipliers with gradient projection steps that change the
/// active set (modified proportioning with reduced gradient projections).
/// The primal point is `x = Aᵀ λ`; every row with `λ > 0` ends tight.
pub fn solve(n: usize, rows: &[Vec<u32>], lambda: &mut Vec<f64>, opts: &QpOptions) -> QpOutcome {
    const WARM_SWEEPS: usize = 3;
    const REFRESH_EVERY: usize = 50;
    lambda.resize(rows.len(), 0.0);
    let m = rows.len();
    let mut x = primal(n, rows, lambda);
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..WARM_SWEEPS {
        order.shuffle(&mut rng);
        sweep(&mut x, rows, lambda, &order);
    }
    let step = 1.9 / gram_norm(n, rows);
    let mut g = vec![0.0; m];
    x = refresh(n, rows, lambda, &mut g);
    let mut phi = free_gradient(lambda, &g);
    let mut p = phi.clone();
    let mut gp = vec![0.0; m];
    let mut steps = 0;
    let mut next_polish = POLISH_FIRST;
    loop {
        if steps % REFRESH_EVERY == 0 && steps > 0 {
            x = refresh(n, rows, lambda, &mut g);
            phi = free_gradient(lambda, &g);
        }
        let viol = g.iter().fold(0.0f64, |a, &v| a.max(-v));
        let comp = lambda.iter().zip(&g).fold(0.0f64, |a, (&l, &v)| a.max(l * v.abs()));
        if viol <= opts.tol && comp <= opts.tol {
            return QpOutcome { x, sweeps: steps, polished: false, converged: true, violation: viol };
        }
        if steps >= opts.max_sweeps {
            return QpOutcome { x, sweeps: steps, polished: false, converged: false, violation: viol };
        }
        if steps == next_polish {
            next_polish *= 2;
            if let Some(l) = polish(n, rows, lambda, opts.tol) {
                *lambda = l;
                let x = primal(n, rows, lambda);
                let (viol, _) = kkt(&x, rows, lambda);
                return QpOutcome { x, sweeps: steps, polished: true, converged: true, violation: viol };
            }
        }
        steps += 1;
        // chopped gradient on the bound, and the part of the free gradient
        // that a projected step could actually use
        let chopped: Vec<f64> = lambda.iter().zip(&g).map(|(&l, &gi)| if l > 0.0 { 0.0 } else { gi.min(0.0) }).collect();
        let chopped2 = dot(&chopped, &chopped);
        let reduced: f64 = lambda.iter().zip(&phi).map(|(&l, &f)| if l > 0.0 { (l / step).min(f) * f } else { 0.0 }).sum();
        if chopped2 > reduced {
            // proportioning: release multipliers whose rows are violated
            let at = gram_times(n, rows, &chopped, &mut gp);
            let dgd = dot(&chopped, &gp);
            if dgd <= 0.0 {
                x = refresh(n, rows, lambda, &mut g);
                phi = free_gradient(lambda, &g);
                p = phi.clone();
                continue;
            }
            let a = dot(&g, &chopped) / dgd;
            for i in 0..m {
                lambda[i] = (lambda[i] - a * chopped[i]).max(0.0);
                g[i] -= a * gp[i];
            }
            x.iter_mut().zip(&at).for_each(|(xv, d)| *xv -= a * d);
            phi = free_gradient(lambda, &g);
            p = phi.clone();
            continue;
        }
        let at = gram_times(n, rows, &p, &mut gp);
        let pgp = dot(&p, &gp);
        let a_cg = if pgp > 0.0 { dot(&g, &p) / pgp } else { f64::INFINITY };
        let a_feasible = lambda.iter().zip(&p).filter(|(_, &pi)| pi > 0.0).map(|(&l, &pi)| l / pi).fold(f64::INFINITY, f64::min);
        if a_cg <= a_feasible {
            for i in 0..m {
                lambda[i] -= a_cg * p[i];
                g[i] -= a_cg * gp[i];
            }
            x.iter_mut().zip(&at).for_each(|(xv, d)| *xv -= a_cg * d);
            phi = free_gradient(lambda, &g);
            let b = dot(&phi, &gp) / pgp;
            for i in 0..m {
                p[i] = phi[i] - b * p[i];
            }
        } else {
            // expansion: go to the boundary, then a projected gradient step
            let a = if a_feasible.is_finite() { a_feasible } else { 0.0 };
            for i in 0..m {
                lambda[i] = (lambda[i] - a * p[i]).max(0.0);
                g[i] -= a * gp[i];
            }
            let f = free_gradient(lambda, &g);
            for i in 0..m {
                lambda[i] = (lambda[i] - step * f[i]).max(0.0);
            }
            x = refresh(n, rows, lambda, &mut g);
            phi = free_gradient(lambda, &g);
            p = phi.clone();
        }
    }
}
