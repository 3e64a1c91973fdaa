use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::geometry::sets::sampled_relative_distance;
use crate::geometry::{relative_distance, separation_cross_ratio, set_diameter, MetricKind, PointSet, PolyCurve, SpherePoint};

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub s: f64,
    /// Indices of the pair attaining the minimum.
    pub witness: (usize, usize),
}

/// Minimum relative distance over all pairs of curves.
pub fn family_separation(curves: &[PolyCurve], m: MetricKind) -> Result<SeparationReport> {
    if curves.len() < 2 {
        return domain("separation needs at least two curves");
    }
    let sets: Vec<PointSet> = curves.iter().cloned().map(PointSet::Curve).collect();
    let diams = sets.iter().map(|s| set_diameter(s, m)).collect::<Result<Vec<_>>>()?;
    let boxes = curves.iter().map(euclidean_box).collect::<Result<Vec<_>>>()?;
    let n = curves.len();
    // per-row minima in parallel, combined in index order
    let rows: Vec<Result<Option<(f64, usize, usize)>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(f64, usize, usize)> = None;
            for j in (i + 1)..n {
                let min_diam = diams[i].min(diams[j]);
                if m == MetricKind::Euclidean {
                    // cheap lower bound from the boxes
                    let gap = box_gap(&boxes[i], &boxes[j]);
                    if let Some((b, _, _)) = best {
                        if gap / min_diam >= b {
                            continue;
                        }
                    }
                }
                let r = relative_distance(&sets[i], &sets[j], m).map_err(|e| match e {
                    crate::Error::Domain(msg) => crate::Error::Domain(format!("curves {i} and {j}: {msg}")),
                    other => other,
                })?;
                if best.map_or(true, |(b, _, _)| r < b) {
                    best = Some((r, i, j));
                }
            }
            Ok(best)
        })
        .collect();
    let mut best: Option<(f64, usize, usize)> = None;
    for row in rows {
        if let Some(c) = row? {
            if best.map_or(true, |(b, _, _)| c.0 < b) {
                best = Some(c);
            }
        }
    }
    let (s, i, j) = best.expect("at least one pair");
    Ok(SeparationReport { s, witness: (i, j) })
}

fn euclidean_box(c: &PolyCurve) -> Result<(Complex64, Complex64)> {
    let v = c.finite_vertices()?;
    let mut lo = v[0];
    let mut hi = v[0];
    for z in &v {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    Ok((lo, hi))
}

fn box_gap(a: &(Complex64, Complex64), b: &(Complex64, Complex64)) -> f64 {
    let dx = (b.0.re - a.1.re).max(a.0.re - b.1.re).max(0.0);
    let dy = (b.0.im - a.1.im).max(a.0.im - b.1.im).max(0.0);
    dx.hypot(dy)
}

/// `(Δ, D)` evaluated on the same finite samples; `Δ ≤ D ≤ 2Δ` holds exactly there.
pub fn separation_sandwich(e: &[SpherePoint], f: &[SpherePoint], m: MetricKind) -> Result<(f64, f64)> {
    let delta = sampled_relative_distance(e, f, m)?;
    let d = separation_cross_ratio(e, f, m)?;
    Ok((delta, d))
}
