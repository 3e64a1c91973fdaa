use rayon::prelude::*;

use super::curve::{segment_segment_distance, PolyCurve};
use super::metric::{distance, MetricKind, SPHERE_DIAMETER};
use super::point::SpherePoint;
use crate::error::{domain, Result};

/// Relative piece length used when curves are sampled in a non-euclidean metric.
pub const DENSIFY_FRACTION: f64 = 1e-3;

/// A compact set in one of the representations the set functionals accept.
#[derive(Clone, Debug)]
pub enum PointSet {
    /// The whole extended plane.
    Sphere,
    Points(Vec<SpherePoint>),
    Curve(PolyCurve),
}

impl PointSet {
    pub fn points(points: Vec<SpherePoint>) -> Self {
        PointSet::Points(points)
    }

    pub fn curve(c: PolyCurve) -> Self {
        PointSet::Curve(c)
    }

    /// Finite sample used for sup/inf evaluation. Curves are refined so that
    /// consecutive samples are within `DENSIFY_FRACTION` of the vertex diameter.
    pub fn samples(&self, m: MetricKind) -> Result<Vec<SpherePoint>> {
        match self {
            PointSet::Sphere => domain("the sphere has no finite sample"),
            PointSet::Points(p) => Ok(p.clone()),
            PointSet::Curve(c) => {
                let d = pairwise_max(c.vertices(), m)?;
                if d == 0.0 {
                    return Ok(c.vertices().to_vec());
                }
                c.densify(m, DENSIFY_FRACTION * d)
            }
        }
    }
}

fn pairwise_max(p: &[SpherePoint], m: MetricKind) -> Result<f64> {
    let rows: Result<Vec<f64>> = (0..p.len())
        .into_par_iter()
        .map(|i| {
            let mut best: f64 = 0.0;
            for j in (i + 1)..p.len() {
                best = best.max(distance(&p[i], &p[j], m)?);
            }
            Ok(best)
        })
        .collect();
    Ok(rows?.into_iter().fold(0.0, f64::max))
}

fn pairwise_min(a: &[SpherePoint], b: &[SpherePoint], m: MetricKind) -> Result<f64> {
    let rows: Result<Vec<f64>> = a
        .par_iter()
        .map(|p| {
            let mut best = f64::INFINITY;
            for q in b {
                best = best.min(distance(p, q, m)?);
            }
            Ok(best)
        })
        .collect();
    Ok(rows?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Diameter of a nonempty set.
pub fn set_diameter(s: &PointSet, m: MetricKind) -> Result<f64> {
    match s {
        PointSet::Sphere => {
            if m == MetricKind::Chordal {
                Ok(SPHERE_DIAMETER)
            } else {
                domain(format!("the sphere is unbounded under the {} metric", m.name()))
            }
        }
        PointSet::Points(p) if p.is_empty() => domain("diameter of an empty set"),
        // a polygon's euclidean diameter is attained at vertices
        PointSet::Curve(c) if m == MetricKind::Euclidean => pairwise_max(c.vertices(), m),
        _ => pairwise_max(&s.samples(m)?, m),
    }
}

/// `dist(E, F)`, the infimum of pointwise distances.
pub fn set_distance(e: &PointSet, f: &PointSet, m: MetricKind) -> Result<f64> {
    if let (PointSet::Curve(a), PointSet::Curve(b), MetricKind::Euclidean) = (e, f, m) {
        let sa = a.finite_segments()?;
        let sb = b.finite_segments()?;
        let best = sa
            .par_iter()
            .map(|&(p, q)| sb.iter().map(|&(r, s)| segment_segment_distance(p, q, r, s)).fold(f64::INFINITY, f64::min))
            .reduce(|| f64::INFINITY, f64::min);
        return Ok(best);
    }
    let a = e.samples(m)?;
    let b = f.samples(m)?;
    if a.is_empty() || b.is_empty() {
        return domain("distance to an empty set");
    }
    pairwise_min(&a, &b, m)
}

/// `Δ(E,F) = dist(E,F) / min(diam E, diam F)`.
pub fn relative_distance(e: &PointSet, f: &PointSet, m: MetricKind) -> Result<f64> {
    let de = set_diameter(e, m)?;
    let df = set_diameter(f, m)?;
    if de == 0.0 || df == 0.0 {
        return domain("relative distance of a degenerate set");
    }
    let d = set_distance(e, f, m)?;
    if d == 0.0 {
        return domain("relative distance of intersecting sets");
    }
    Ok(d / de.min(df))
}

/// Relative distance of two finite samples with the functionals evaluated on
/// exactly those samples.
pub fn sampled_relative_distance(e: &[SpherePoint], f: &[SpherePoint], m: MetricKind) -> Result<f64> {
    relative_distance(&PointSet::Points(e.to_vec()), &PointSet::Points(f.to_vec()), m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: (f64, f64), b: (f64, f64)) -> PointSet {
        PointSet::Curve(PolyCurve::from_xy(&[a, b], false).unwrap())
    }

    fn square(x: f64, y: f64, s: f64) -> PointSet {
        PointSet::Curve(PolyCurve::from_xy(&[(x, y), (x + s, y), (x + s, y + s), (x, y + s)], true).unwrap())
    }

    #[test]
    fn real_intervals() {
        let e = seg((0.0, 0.0), (1.0, 0.0));
        let f = seg((2.0, 0.0), (3.0, 0.0));
        assert!((relative_distance(&e, &f, MetricKind::Euclidean).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_separation() {
        let e = seg((0.0, 0.0), (1.0, 0.0));
        let f = seg((11.0, 0.0), (12.0, 0.0));
        assert!((relative_distance(&e, &f, MetricKind::Euclidean).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn carpet_depth_one_pair() {
        // oracle: exhaustive minimum over densely subdivided boundaries
        let boundary = |x: f64, y: f64, s: f64, n: usize| -> Vec<(f64, f64)> {
            let mut v = Vec::new();
            for k in 0..n {
                let t = s * k as f64 / n as f64;
                v.extend([(x + t, y), (x + s, y + t), (x + s - t, y + s), (x, y + s - t)]);
            }
            v
        };
        let third = 1.0 / 3.0;
        let a = boundary(0.0, 0.0, 1.0, 300);
        let b = boundary(third, third, third, 100);
        let mut dist = f64::INFINITY;
        for p in &a {
            for q in &b {
                dist = dist.min((p.0 - q.0).hypot(p.1 - q.1));
            }
        }
        let mut diam: f64 = 0.0;
        for p in &b {
            for q in &b {
                diam = diam.max((p.0 - q.0).hypot(p.1 - q.1));
            }
        }
        let got = relative_distance(&square(0.0, 0.0, 1.0), &square(third, third, third), MetricKind::Euclidean).unwrap();
        assert!((got - dist / diam).abs() < 1e-9);
        assert!((got - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sphere_diameter() {
        assert_eq!(set_diameter(&PointSet::Sphere, MetricKind::Chordal).unwrap(), 2.0);
        assert!(set_diameter(&PointSet::Sphere, MetricKind::Euclidean).is_err());
        assert!(set_diameter(&PointSet::Points(vec![]), MetricKind::Euclidean).is_err());
        let single = PointSet::Points(vec![SpherePoint::new(1.0, 2.0)]);
        assert_eq!(set_diameter(&single, MetricKind::Chordal).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_and_touching_inputs_rejected() {
        let p = PointSet::Points(vec![SpherePoint::new(0.0, 0.0)]);
        let e = seg((1.0, 0.0), (2.0, 0.0));
        assert!(relative_distance(&p, &e, MetricKind::Euclidean).is_err());
        let f = seg((2.0, 0.0), (3.0, 0.0));
        assert!(relative_distance(&e, &f, MetricKind::Euclidean).is_err());
    }

    #[test]
    fn unit_circle_diameter() {
        let n = 64;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let c = PointSet::Curve(PolyCurve::from_xy(&pts, true).unwrap());
        assert!((set_diameter(&c, MetricKind::Euclidean).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cstar_square_flat_diameter() {
        let l: f64 = 0.5;
        let n = 40;
        let mut pts = Vec::new();
        // boundary of {u ∈ [0, l], θ ∈ [0, l]} mapped through exp
        for k in 0..n {
            pts.push((k as f64 * l / n as f64, 0.0));
        }
        for k in 0..n {
            pts.push((l, k as f64 * l / n as f64));
        }
        for k in 0..n {
            pts.push((l - k as f64 * l / n as f64, l));
        }
        for k in 0..n {
            pts.push((0.0, l - k as f64 * l / n as f64));
        }
        let v: Vec<SpherePoint> = pts.iter().map(|&(u, t)| SpherePoint::from_log(u, t)).collect();
        let d = set_diameter(&PointSet::Points(v), MetricKind::Flat).unwrap();
        assert!(d >= l - 1e-12 && d <= 2f64.sqrt() * l + 1e-12, "{d}");
    }
}
