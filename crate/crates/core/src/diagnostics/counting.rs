use crate::carpets::scene::Label;
use crate::error::{domain, Result};
use crate::geometry::MetricKind;

use super::annulus_width::{ring_fat_bound, CompactSet};

/// Default constant in the bound `C/(st)²` on large sets meeting a set.
pub const DEFAULT_COUNTING_C: f64 = 16.0;

/// Default constant of the modulus decay bound; see the calibration test in
/// `tests/diagnostics.rs`.
pub const DEFAULT_DECAY_C: f64 = 20.0;

/// Number of family members that meet `a` and have diameter at least
/// `t·diam(a)`.
pub fn count_large_meeting_sets(a: &CompactSet, sets: &[(Label, CompactSet)], t: f64, m: MetricKind) -> Result<usize> {
    if !(t > 0.0) {
        return domain(format!("size ratio {t} must be positive"));
    }
    let da = a.diameter(m)?;
    let mut count = 0;
    for (_, k) in sets {
        if k.diameter(m)? >= t * da && k.distance_to(a, m)? <= 0.0 {
            count += 1;
        }
    }
    Ok(count)
}

/// `C/(st)²`.
pub fn counting_bound(s: f64, t: f64, c: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0 && c > 0.0) {
        return domain("counting bound needs positive s, t and C");
    }
    Ok(c / (s * t).powi(2))
}

/// `C · log(t/4)^(−1/3^(N+1))` with `N = ⌈4/μ²⌉`.
pub fn decay_bound(t: f64, mu: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return domain(format!("decay constant {c} must be positive"));
    }
    let n = ring_fat_bound(mu)?;
    let l = (t / 4.0).ln();
    // t = 4e itself may round to a logarithm a hair below 1
    if !(l > 1.0 - 1e-12) {
        return domain(format!("decay bound needs t > 4e, got {t}"));
    }
    let exponent = 3f64.powi(-(n.min(i32::MAX as usize - 1) as i32 + 1));
    Ok(c * l.max(1.0).powf(-exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SpherePoint;
    use std::f64::consts::E;

    fn disk(x: f64, y: f64, r: f64) -> CompactSet {
        CompactSet::Disk { center: SpherePoint::new(x, y), radius: r }
    }

    #[test]
    fn trivial_counts() {
        let a = disk(0.0, 0.0, 1.0);
        let far = vec![(2, disk(10.0, 0.0, 1.0))];
        assert_eq!(count_large_meeting_sets(&a, &far, 0.5, MetricKind::Euclidean).unwrap(), 0);
        let through = vec![(2, disk(1.5, 0.0, 2.0)), (3, disk(0.0, 1.05, 0.1))];
        assert_eq!(count_large_meeting_sets(&a, &through, 0.5, MetricKind::Euclidean).unwrap(), 1);
    }

    #[test]
    fn decay_values() {
        assert!((decay_bound(4.0 * E, 0.25, 3.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(decay_bound(4.0 * E * 0.999, 0.25, 3.0).is_err());
        let mut prev = f64::INFINITY;
        for k in 1..=40 {
            let t = 4.0 * E * 1.4f64.powi(k);
            let v = decay_bound(t, 1.0, 1.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }
}
