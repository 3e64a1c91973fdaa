use serde::Serialize;

use crate::error::{domain, Result};
use crate::geometry::{distance, MetricKind, PolyCurve, SpherePoint};

/// Largest sample count accepted; the subarc table is quadratic in memory.
pub const MAX_SAMPLES: usize = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct QuasicircleReport {
    pub k: f64,
    pub witness: (SpherePoint, SpherePoint),
    pub sample_count: usize,
}

/// Sample points in cyclic order: `samples` points evenly spaced by arclength
/// merged with every vertex.
pub fn cyclic_samples(curve: &PolyCurve, samples: usize) -> Result<Vec<SpherePoint>> {
    let segs = curve.finite_segments()?;
    let lens: Vec<f64> = segs.iter().map(|(a, b)| (b - a).norm()).collect();
    let total: f64 = lens.iter().sum();
    let mut out = Vec::with_capacity(samples + segs.len());
    let mut acc = 0.0;
    let mut next = 0usize;
    for (i, &(a, b)) in segs.iter().enumerate() {
        out.push(SpherePoint::from_complex(a));
        while next < samples {
            let s = total * next as f64 / samples as f64;
            let tol = 1e-9 * total;
            if s >= acc + lens[i] - tol {
                if s >= acc + lens[i] + tol {
                    break;
                }
                // lands on the next vertex
                next += 1;
                continue;
            }
            if s > acc + tol {
                out.push(SpherePoint::from_complex(a + (b - a) * ((s - acc) / lens[i])));
            }
            next += 1;
        }
        acc += lens[i];
    }
    Ok(out)
}

/// Smallest `k` such that one of the two subarcs between any two sampled
/// points has diameter at most `k` times their distance.
pub fn quasicircle_constant(curve: &PolyCurve, m: MetricKind, samples: usize) -> Result<QuasicircleReport> {
    if !curve.is_closed() {
        return domain("quasicircle constant needs a closed curve");
    }
    if !curve.is_simple()? {
        return domain("quasicircle constant needs a simple curve");
    }
    if samples < 8 {
        return domain(format!("at least 8 samples required, got {samples}"));
    }
    let pts = cyclic_samples(curve, samples)?;
    let n = pts.len();
    if n > MAX_SAMPLES {
        return domain(format!("{n} sample points exceed the cap {MAX_SAMPLES}"));
    }
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distance(&pts[i], &pts[j], m)?;
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    // diam[len][i]: diameter of the cyclic run i, i+1, ..., i+len
    let mut diam = vec![0.0f64; n * n];
    for len in 1..n {
        for i in 0..n {
            let j = (i + len) % n;
            let a = diam[(len - 1) * n + i];
            let b = diam[(len - 1) * n + (i + 1) % n];
            diam[len * n + i] = a.max(b).max(dist[i * n + j]);
        }
    }
    let mut k: f64 = 1.0;
    let mut witness = (pts[0], pts[1 % n]);
    for i in 0..n {
        for len in 1..n {
            let j = (i + len) % n;
            if j < i {
                continue;
            }
            let d = dist[i * n + j];
            let arc = diam[len * n + i].min(diam[(n - len) * n + j]);
            let ratio = arc / d;
            if ratio > k {
                k = ratio;
                witness = (pts[i], pts[j]);
            }
        }
    }
    Ok(QuasicircleReport { k, witness, sample_count: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn square(x: f64, y: f64, s: f64) -> PolyCurve {
        PolyCurve::from_xy(&[(x, y), (x + s, y), (x + s, y + s), (x, y + s)], true).unwrap()
    }

    /// Direct evaluation over every pair and both arcs, no table.
    fn brute(curve: &PolyCurve, samples: usize) -> f64 {
        let pts = cyclic_samples(curve, samples).unwrap();
        let n = pts.len();
        let d = |a: usize, b: usize| distance(&pts[a], &pts[b], MetricKind::Euclidean).unwrap();
        let arc_diam = |from: usize, len: usize| {
            let idx: Vec<usize> = (0..=len).map(|t| (from + t) % n).collect();
            let mut best: f64 = 0.0;
            for &p in &idx {
                for &q in &idx {
                    best = best.max(d(p, q));
                }
            }
            best
        };
        let mut k: f64 = 1.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let a = arc_diam(i, j - i);
                let b = arc_diam(j, n - (j - i));
                k = k.max(a.min(b) / d(i, j));
            }
        }
        k
    }

    /// Supremum for the unit square: points `(1/2 + δ, 0)` and `(1/2 − δ, 1)`
    /// with `4δ² + 8δ − 1 = 0`, each subarc reaching a far corner.
    fn square_sup() -> f64 {
        let d = (-8.0 + 80f64.sqrt()) / 8.0;
        ((1.25 + d + d * d) / (1.0 + 4.0 * d * d)).sqrt()
    }

    #[test]
    fn unit_square_constant() {
        let exact = square_sup();
        assert!(exact > 5f64.sqrt() / 2.0);
        let r = quasicircle_constant(&square(0.0, 0.0, 1.0), MetricKind::Euclidean, 64).unwrap();
        assert!((r.k - exact).abs() < 0.02 * exact, "{}", r.k);
        assert!(r.k <= exact + 1e-12);
        let fine = quasicircle_constant(&square(0.0, 0.0, 1.0), MetricKind::Euclidean, 800).unwrap();
        assert!((fine.k - exact).abs() < 1e-4, "{}", fine.k);
        // nested samples: doubling never lowers the estimate
        assert!(brute(&square(0.0, 0.0, 1.0), 32) <= r.k + 1e-12);
    }

    #[test]
    fn table_matches_brute_force() {
        let c = PolyCurve::from_xy(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 0.3), (0.0, 1.0)], true).unwrap();
        let r = quasicircle_constant(&c, MetricKind::Euclidean, 24).unwrap();
        assert!((r.k - brute(&c, 24)).abs() < 1e-12);
    }

    #[test]
    fn circle_is_one() {
        let n = 512;
        let v: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let c = PolyCurve::from_xy(&v, true).unwrap();
        let r = quasicircle_constant(&c, MetricKind::Euclidean, 64).unwrap();
        assert!((r.k - 1.0).abs() < 1e-3, "{}", r.k);
    }

    #[test]
    fn similarity_invariance() {
        let c = square(0.0, 0.0, 1.0);
        let base = quasicircle_constant(&c, MetricKind::Euclidean, 40).unwrap().k;
        let a = Complex64::from_polar(3.7, 0.9);
        let moved = c.map(|z| a * z + Complex64::new(-2.0, 5.0)).unwrap();
        let k = quasicircle_constant(&moved, MetricKind::Euclidean, 40).unwrap().k;
        assert!((k - base).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let open = PolyCurve::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)], false).unwrap();
        assert!(quasicircle_constant(&open, MetricKind::Euclidean, 16).is_err());
        let bowtie = PolyCurve::from_xy(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)], true).unwrap();
        assert!(quasicircle_constant(&bowtie, MetricKind::Euclidean, 16).is_err());
        assert!(quasicircle_constant(&square(0.0, 0.0, 1.0), MetricKind::Euclidean, 4).is_err());
    }
}
