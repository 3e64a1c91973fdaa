use serde::{Deserialize, Serialize};

use crate::carpets::scene::Label;
use crate::error::{domain, Error, Result};
use crate::geometry::{distance, Annulus, MetricKind, SpherePoint};

/// A compact set whose distance range from a point is known in closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CompactSet {
    /// Closed ball of radius `radius` in the annulus metric (euclidean or chordal).
    Disk { center: SpherePoint, radius: f64 },
    Points(Vec<SpherePoint>),
}

impl CompactSet {
    /// `[inf, sup]` of `d(y, x)` over `y` in the set. For a ball the range is an
    /// interval because the set is connected.
    pub fn distance_range(&self, x: &SpherePoint, m: MetricKind) -> Result<(f64, f64)> {
        match self {
            CompactSet::Points(p) => {
                if p.is_empty() {
                    return domain("empty point set");
                }
                let mut lo = f64::INFINITY;
                let mut hi: f64 = 0.0;
                for q in p {
                    let d = distance(q, x, m)?;
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
                Ok((lo, hi))
            }
            CompactSet::Disk { center, radius } => {
                let dc = distance(center, x, m)?;
                match m {
                    MetricKind::Euclidean => Ok(((dc - radius).max(0.0), dc + radius)),
                    MetricKind::Chordal => {
                        // spherical cap: compare angles seen from the sphere's center
                        let alpha = 2.0 * (radius / 2.0).min(1.0).asin();
                        let beta = 2.0 * (dc / 2.0).min(1.0).asin();
                        let lo = (beta - alpha).max(0.0);
                        let hi = (beta + alpha).min(std::f64::consts::PI);
                        Ok((2.0 * (lo / 2.0).sin(), 2.0 * (hi / 2.0).sin()))
                    }
                    MetricKind::Flat => domain("disk distance ranges are not available in the flat metric"),
                }
            }
        }
    }

    pub fn diameter(&self, m: MetricKind) -> Result<f64> {
        match self {
            CompactSet::Disk { radius, .. } => match m {
                MetricKind::Chordal => {
                    let alpha = 2.0 * (radius / 2.0).min(1.0).asin();
                    Ok(2.0 * (alpha.min(std::f64::consts::FRAC_PI_2)).sin())
                }
                _ => Ok(2.0 * radius),
            },
            CompactSet::Points(p) => {
                let mut best: f64 = 0.0;
                for i in 0..p.len() {
                    for j in (i + 1)..p.len() {
                        best = best.max(distance(&p[i], &p[j], m)?);
                    }
                }
                Ok(best)
            }
        }
    }

    /// Distance between two sets; exact for two disks, by sampling otherwise.
    pub fn distance_to(&self, other: &CompactSet, m: MetricKind) -> Result<f64> {
        match (self, other) {
            (CompactSet::Disk { center: a, radius: ra }, CompactSet::Disk { center: b, radius: rb }) if m == MetricKind::Euclidean => {
                Ok((distance(a, b, m)? - ra - rb).max(0.0))
            }
            (CompactSet::Disk { .. }, CompactSet::Points(p)) | (CompactSet::Points(p), CompactSet::Disk { .. }) => {
                let disk = if matches!(self, CompactSet::Disk { .. }) { self } else { other };
                let mut best = f64::INFINITY;
                for q in p {
                    best = best.min(disk.distance_range(q, m)?.0);
                }
                Ok(best)
            }
            (CompactSet::Points(a), CompactSet::Points(b)) => {
                let mut best = f64::INFINITY;
                for p in a {
                    for q in b {
                        best = best.min(distance(p, q, m)?);
                    }
                }
                Ok(best)
            }
            _ => domain("set distance not available for this combination"),
        }
    }
}

/// `(r_A(K), R_A(K))`, or `None` when `K` misses `A`.
pub fn annulus_range(a: &Annulus, k: &CompactSet) -> Result<Option<(f64, f64)>> {
    let (lo, hi) = k.distance_range(&a.center, a.metric)?;
    // K ∩ A has distances [lo, hi] ∩ (r, R)
    if hi <= a.inner || lo >= a.outer {
        return Ok(None);
    }
    Ok(Some((lo.max(a.inner), hi.min(a.outer))))
}

/// `w_A(K) = log(R_A(K) / r_A(K))`, zero when `K` misses `A`.
pub fn annulus_relative_width(a: &Annulus, k: &CompactSet) -> Result<f64> {
    Ok(match annulus_range(a, k)? {
        Some((lo, hi)) => (hi / lo).ln(),
        None => 0.0,
    })
}

/// `⌈4/μ²⌉`.
pub fn ring_fat_bound(mu: f64) -> Result<usize> {
    if !(mu > 0.0 && mu <= 1.0) {
        return domain(format!("fatness {mu} outside (0, 1]"));
    }
    let v = 4.0 / (mu * mu);
    // guard against 4/μ² landing a hair above an integer
    let r = v.round();
    Ok(if (v - r).abs() <= 1e-9 * v { r as usize } else { v.ceil() as usize })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubannulusResult {
    pub annulus: Annulus,
    /// Labels removed, in the order they were chosen.
    pub removed: Vec<Label>,
    pub steps: usize,
    pub bound: usize,
}

/// Shrinks `A` while some remaining set is thick in the current annulus,
/// each time to the radial range of the thickest such set.
pub fn select_subannulus(a: &Annulus, sets: &[(Label, CompactSet)], mu: f64) -> Result<SubannulusResult> {
    let bound = ring_fat_bound(mu)?;
    if a.width() < 1.0 {
        return domain(format!("annulus width {} below 1", a.width()));
    }
    let mut current = *a;
    let mut removed: Vec<Label> = Vec::new();
    loop {
        let w = current.width();
        let threshold = w.powf(1.0 / 3.0);
        let mut pick: Option<(f64, Label, (f64, f64))> = None;
        for (label, k) in sets {
            if removed.contains(label) {
                continue;
            }
            if let Some((lo, hi)) = annulus_range(&current, k)? {
                let wk = (hi / lo).ln();
                if wk >= threshold && pick.map_or(true, |(b, l, _)| wk > b || (wk == b && *label < l)) {
                    pick = Some((wk, *label, (lo, hi)));
                }
            }
        }
        let Some((_, label, (lo, hi))) = pick else {
            break;
        };
        if removed.len() == bound {
            return Err(Error::Internal(format!("subannulus selection exceeded {bound} steps")));
        }
        current = current.with_radii(lo, hi)?;
        removed.push(label);
    }
    let steps = removed.len();
    Ok(SubannulusResult { annulus: current, removed, steps, bound })
}
