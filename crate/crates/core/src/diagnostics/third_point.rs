use crate::error::{domain, Result};
use crate::geometry::{distance, MetricKind, SpherePoint};

/// First index `l` in `1..=3` with `d(x, xs[l]) ≥ a/2` and `d(y, ys[l]) ≥ b/2`.
///
/// The points of `xs` must be pairwise at least `a` apart and those of `ys`
/// at least `b` apart; then `x` is within `a/2` of at most one `xs[l]`, and
/// likewise for `y`, so some index is left over.
pub fn third_point_select(
    x: &SpherePoint,
    y: &SpherePoint,
    xs: &[SpherePoint; 3],
    ys: &[SpherePoint; 3],
    a: f64,
    b: f64,
    m: MetricKind,
) -> Result<usize> {
    if !(a > 0.0 && b > 0.0) {
        return domain("separations must be positive");
    }
    for (pts, sep, name) in [(xs, a, "first"), (ys, b, "second")] {
        for i in 0..3 {
            for j in (i + 1)..3 {
                if distance(&pts[i], &pts[j], m)? < sep {
                    return domain(format!("{name} triple has points {} and {} closer than {sep}", i + 1, j + 1));
                }
            }
        }
    }
    for l in 0..3 {
        if distance(x, &xs[l], m)? >= a / 2.0 && distance(y, &ys[l], m)? >= b / 2.0 {
            return Ok(l + 1);
        }
    }
    Err(crate::Error::Internal("no admissible index among three separated points".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> SpherePoint {
        SpherePoint::new(x, 0.0)
    }

    #[test]
    fn picks_the_free_index() {
        let xs = [p(0.0), p(1.0), p(2.0)];
        let ys = [p(10.0), p(11.0), p(12.0)];
        assert_eq!(third_point_select(&p(0.1), &p(11.1), &xs, &ys, 1.0, 1.0, MetricKind::Euclidean).unwrap(), 3);
        assert_eq!(third_point_select(&p(100.0), &p(10.0), &xs, &ys, 1.0, 1.0, MetricKind::Euclidean).unwrap(), 2);
    }

    #[test]
    fn rejects_crowded_triples() {
        let xs = [p(0.0), p(0.5), p(2.0)];
        let ys = [p(10.0), p(11.0), p(12.0)];
        assert!(third_point_select(&p(0.0), &p(0.0), &xs, &ys, 1.0, 1.0, MetricKind::Euclidean).is_err());
    }
}
