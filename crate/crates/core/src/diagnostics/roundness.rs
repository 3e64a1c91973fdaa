use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::geometry::curve::point_segment_distance;
use crate::geometry::{distance, MetricKind, PointSet, PolyCurve, SpherePoint};

#[derive(Clone, Debug, Serialize)]
pub struct RoundnessFit {
    pub center: SpherePoint,
    /// Largest boundary distance from the center.
    pub r: f64,
    pub lambda: f64,
}

fn radii(center: Complex64, boundary: &PolyCurve, samples: &[SpherePoint], m: MetricKind) -> Result<(f64, f64)> {
    if m == MetricKind::Euclidean {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for (a, b) in boundary.finite_segments()? {
            lo = lo.min(point_segment_distance(center, a, b));
            hi = hi.max((a - center).norm());
        }
        return Ok((lo, hi));
    }
    let c = SpherePoint::from_complex(center);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for p in samples {
        let d = distance(&c, p, m)?;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok((lo, hi))
}

/// Center minimizing circumradius over inradius, found by pattern search from
/// the centroid. The center is kept inside the region.
pub fn quasi_round_fit(boundary: &PolyCurve, m: MetricKind) -> Result<RoundnessFit> {
    if !boundary.is_closed() || !boundary.is_simple()? {
        return domain("roundness fit needs a simple closed curve");
    }
    let v = boundary.finite_vertices()?;
    let mut center = boundary.centroid()?;
    if !boundary.contains(center) {
        return domain("centroid outside the region; roundness fit needs a star-shaped seed");
    }
    let samples = if m == MetricKind::Euclidean { Vec::new() } else { PointSet::Curve(boundary.clone()).samples(m)? };
    let score = |c: Complex64| -> Result<f64> {
        if !boundary.contains(c) {
            return Ok(f64::INFINITY);
        }
        let (lo, hi) = radii(c, boundary, &samples, m)?;
        Ok(if lo > 0.0 { hi / lo } else { f64::INFINITY })
    };
    let span = v.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    if span == 0.0 {
        return domain("degenerate boundary");
    }
    let mut best = score(center)?;
    let mut step = span / 4.0;
    let dirs: Vec<Complex64> = (0..8).map(|k| Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * k as f64)).collect();
    while step > 1e-10 * span {
        let mut moved = false;
        for d in &dirs {
            let c = center + d * step;
            let s = score(c)?;
            if s < best - 1e-15 * best {
                best = s;
                center = c;
                moved = true;
                break;
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    let (lo, hi) = radii(center, boundary, &samples, m)?;
    if !(lo > 0.0) {
        return domain("degenerate boundary");
    }
    Ok(RoundnessFit { center: SpherePoint::from_complex(center), r: hi, lambda: hi / lo })
}
