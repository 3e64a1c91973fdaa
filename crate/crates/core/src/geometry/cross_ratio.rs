use super::metric::{distance, MetricKind};
use super::point::SpherePoint;
use crate::error::{domain, Result};

fn six_distances(x: [&SpherePoint; 4], m: MetricKind) -> Result<[f64; 4]> {
    let d13 = distance(x[0], x[2], m)?;
    let d24 = distance(x[1], x[3], m)?;
    let d14 = distance(x[0], x[3], m)?;
    let d23 = distance(x[1], x[2], m)?;
    let d12 = distance(x[0], x[1], m)?;
    let d34 = distance(x[2], x[3], m)?;
    if [d13, d24, d14, d23, d12, d34].iter().any(|&d| d == 0.0) {
        return domain("cross ratio needs four distinct points");
    }
    Ok([d13, d24, d14, d23])
}

/// `[x1,x2,x3,x4] = d(x1,x3)·d(x2,x4) / (d(x1,x4)·d(x2,x3))`.
pub fn cross_ratio(x1: &SpherePoint, x2: &SpherePoint, x3: &SpherePoint, x4: &SpherePoint, m: MetricKind) -> Result<f64> {
    let [d13, d24, d14, d23] = six_distances([x1, x2, x3, x4], m)?;
    Ok(d13 * d24 / (d14 * d23))
}

/// `⟨x1,x2,x3,x4⟩ = (d(x1,x3) ∧ d(x2,x4)) / (d(x1,x4) ∧ d(x2,x3))`.
pub fn modified_cross_ratio(
    x1: &SpherePoint,
    x2: &SpherePoint,
    x3: &SpherePoint,
    x4: &SpherePoint,
    m: MetricKind,
) -> Result<f64> {
    let [d13, d24, d14, d23] = six_distances([x1, x2, x3, x4], m)?;
    Ok(d13.min(d24) / d14.min(d23))
}

/// Lower distortion `t ↦ ⅓ min(t, √t)`.
pub fn eta_lower(t: f64) -> f64 {
    t.min(t.sqrt()) / 3.0
}

/// Upper distortion `t ↦ 3 max(t, √t)`.
pub fn eta_upper(t: f64) -> f64 {
    3.0 * t.max(t.sqrt())
}

/// Infimum of `⟨x1,x2,x3,x4⟩` over `x1,x4 ∈ E` and `x2,x3 ∈ F`, over the given samples.
/// Pairs with `x1 = x4` or `x2 = x3` are skipped (the ratio is infinite there).
pub fn separation_cross_ratio(e: &[SpherePoint], f: &[SpherePoint], m: MetricKind) -> Result<f64> {
    if e.len() < 2 || f.len() < 2 {
        return domain("each set needs at least two sample points");
    }
    let dee = matrix(e, e, m)?;
    let dff = matrix(f, f, m)?;
    let def = matrix(e, f, m)?;
    let mut best = f64::INFINITY;
    for i1 in 0..e.len() {
        for i4 in 0..e.len() {
            let d14 = dee[i1][i4];
            if d14 == 0.0 {
                continue;
            }
            for j2 in 0..f.len() {
                let d24 = def[i4][j2];
                for j3 in 0..f.len() {
                    let d23 = dff[j2][j3];
                    if d23 == 0.0 {
                        continue;
                    }
                    let num = def[i1][j3].min(d24);
                    let v = num / d14.min(d23);
                    if v < best {
                        best = v;
                    }
                }
            }
        }
    }
    Ok(best)
}

fn matrix(a: &[SpherePoint], b: &[SpherePoint], m: MetricKind) -> Result<Vec<Vec<f64>>> {
    a.iter().map(|p| b.iter().map(|q| distance(p, q, m)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> SpherePoint {
        SpherePoint::new(x, 0.0)
    }

    #[test]
    fn line_values() {
        let e = MetricKind::Euclidean;
        let c = cross_ratio(&r(0.0), &r(1.0), &r(2.0), &r(3.0), e).unwrap();
        assert!((c - 4.0 / 3.0).abs() < 1e-15);
        let c = cross_ratio(&r(1.0), &r(0.0), &r(2.0), &r(3.0), e).unwrap();
        assert!((c - 0.75).abs() < 1e-15);
        let t = 0.37;
        let c = cross_ratio(&r(0.0), &r(t), &r(2.0 * t), &r(3.0 * t), e).unwrap();
        assert!((c - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn modified_values() {
        let e = MetricKind::Euclidean;
        let v = modified_cross_ratio(&r(0.0), &r(1.0), &r(2.0), &r(3.0), e).unwrap();
        assert_eq!(v, 2.0);
        let w = modified_cross_ratio(&r(1.0), &r(0.0), &r(2.0), &r(3.0), e).unwrap();
        assert_eq!(w, 0.5);
        let t = 4.0 / 3.0;
        assert!(eta_lower(t) <= v && v <= eta_upper(t));
        assert!((eta_lower(t) - 0.3849).abs() < 1e-4);
        assert_eq!(eta_upper(t), 4.0);
    }

    #[test]
    fn coincident_points_rejected() {
        assert!(cross_ratio(&r(0.0), &r(0.0), &r(2.0), &r(3.0), MetricKind::Euclidean).is_err());
        assert!(modified_cross_ratio(&r(0.0), &r(1.0), &r(2.0), &r(2.0), MetricKind::Chordal).is_err());
    }

    #[test]
    fn infinity_in_cross_ratio() {
        let v = cross_ratio(&r(0.0), &r(1.0), &r(2.0), &SpherePoint::Infinity, MetricKind::Chordal).unwrap();
        // chordal cross ratio equals the euclidean one with the factors at ∞ cancelling
        assert!((v - 2.0).abs() < 1e-12);
    }
}
