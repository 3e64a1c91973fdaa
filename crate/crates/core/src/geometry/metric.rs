use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::point::{angle_diff, SpherePoint};
use crate::error::{domain, Result};

/// Diameter of the sphere under the chordal metric.
pub const SPHERE_DIAMETER: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Chordal,
    Euclidean,
    /// `|dz|/|z|` on `ℂ*`, the cylinder metric.
    #[serde(alias = "flat-cylinder")]
    Flat,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Chordal, MetricKind::Euclidean, MetricKind::Flat];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Chordal => "chordal",
            MetricKind::Euclidean => "euclidean",
            MetricKind::Flat => "flat",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "chordal" => Ok(MetricKind::Chordal),
            "euclidean" => Ok(MetricKind::Euclidean),
            "flat" | "flat-cylinder" => Ok(MetricKind::Flat),
            other => domain(format!("unknown metric '{other}'")),
        }
    }

    /// Length element relative to `|dz|` at a finite point.
    pub fn density(self, z: Complex64) -> f64 {
        match self {
            MetricKind::Euclidean => 1.0,
            MetricKind::Chordal => 2.0 / (1.0 + z.norm_sqr()),
            MetricKind::Flat => 1.0 / z.norm(),
        }
    }

    /// Distance between finite points; callers guarantee `Flat` inputs are nonzero.
    #[inline]
    pub fn dist_finite(self, a: Complex64, b: Complex64) -> f64 {
        match self {
            MetricKind::Euclidean => (a - b).norm(),
            MetricKind::Chordal => chordal(a, b),
            MetricKind::Flat => flat(a, b),
        }
    }

    /// Measure of an open ball of radius `r` when it is a round disk in the
    /// natural chart (always for euclidean and chordal; for the cylinder the
    /// ball wraps once `r > π`).
    pub fn ball_area(self, r: f64) -> f64 {
        match self {
            MetricKind::Euclidean | MetricKind::Chordal => PI * r * r,
            MetricKind::Flat => cylinder_ball_area(r),
        }
    }
}

#[inline]
pub fn chordal(a: Complex64, b: Complex64) -> f64 {
    2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
}

#[inline]
pub fn flat(a: Complex64, b: Complex64) -> f64 {
    // fixed argument order keeps the angle wrap, and so the result, symmetric
    let (a, b) = if (a.re, a.im) <= (b.re, b.im) { (a, b) } else { (b, a) };
    let du = a.norm().ln() - b.norm().ln();
    let dt = angle_diff(a.arg(), b.arg());
    du.hypot(dt)
}

/// Distance in the chosen metric.
pub fn distance(p: &SpherePoint, q: &SpherePoint, m: MetricKind) -> Result<f64> {
    match (p, q, m) {
        (SpherePoint::Infinity, SpherePoint::Infinity, MetricKind::Chordal) => Ok(0.0),
        (SpherePoint::Finite(z), SpherePoint::Infinity, MetricKind::Chordal)
        | (SpherePoint::Infinity, SpherePoint::Finite(z), MetricKind::Chordal) => {
            Ok(2.0 / (1.0 + z.norm_sqr()).sqrt())
        }
        (SpherePoint::Infinity, _, _) | (_, SpherePoint::Infinity, _) => {
            domain(format!("point at infinity under the {} metric", m.name()))
        }
        (SpherePoint::Finite(a), SpherePoint::Finite(b), MetricKind::Flat) => {
            if a.norm() == 0.0 || b.norm() == 0.0 {
                return domain("the origin is not a point of the cylinder");
            }
            Ok(flat(*a, *b))
        }
        (SpherePoint::Finite(a), SpherePoint::Finite(b), _) => Ok(m.dist_finite(*a, *b)),
    }
}

/// Spherical measure of a chordal ball of radius `r`.
pub fn disk_area(r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= SPHERE_DIAMETER) {
        return domain(format!("disk radius {r} outside (0, 2]"));
    }
    Ok(PI * r * r)
}

/// Area of `{(u,θ): u² + θ² < r²}` on the cylinder `ℝ × (ℝ/2πℤ)`.
pub fn cylinder_ball_area(r: f64) -> f64 {
    if r <= PI {
        return PI * r * r;
    }
    // ∫_{-π}^{π} 2·sqrt(r² − θ²) dθ, closed form.
    let a = PI;
    2.0 * (a * (r * r - a * a).sqrt() + r * r * (a / r).asin())
}

/// Spherical area density `4/(1+|z|²)²` so that the whole sphere has area 4π.
pub fn chordal_area_density(z: Complex64) -> f64 {
    let s = 1.0 + z.norm_sqr();
    4.0 / (s * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> SpherePoint {
        SpherePoint::new(x, y)
    }

    #[test]
    fn chordal_reference_values() {
        let d = distance(&p(0.0, 0.0), &SpherePoint::Infinity, MetricKind::Chordal).unwrap();
        assert_eq!(d, 2.0);
        let d = distance(&p(0.0, 0.0), &p(1.0, 0.0), MetricKind::Chordal).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        for m in MetricKind::ALL {
            assert_eq!(distance(&p(0.3, -2.0), &p(0.3, -2.0), m).unwrap(), 0.0);
        }
    }

    #[test]
    fn infinity_rejected_outside_chordal() {
        assert!(distance(&p(1.0, 0.0), &SpherePoint::Infinity, MetricKind::Euclidean).is_err());
        assert!(distance(&SpherePoint::Infinity, &p(1.0, 0.0), MetricKind::Flat).is_err());
        assert!(distance(&p(0.0, 0.0), &p(1.0, 0.0), MetricKind::Flat).is_err());
    }

    #[test]
    fn disk_area_values() {
        assert!((disk_area(2.0).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!((disk_area(1.0).unwrap() - PI).abs() < 1e-12);
        assert!((disk_area(0.5).unwrap() - PI / 4.0).abs() < 1e-12);
        assert!(disk_area(2.5).is_err());
        assert!(disk_area(0.0).is_err());
        assert!(disk_area(-1.0).is_err());
    }

    #[test]
    fn flat_metric_wraps_angle() {
        let a = p(1.0, 0.0);
        let b = SpherePoint::from_log(0.0, 2.0 * PI - 0.1);
        let d = distance(&a, &b, MetricKind::Flat).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
    }

    #[test]
    fn cylinder_ball_area_continuous_at_pi() {
        let below = cylinder_ball_area(PI - 1e-9);
        let above = cylinder_ball_area(PI + 1e-9);
        assert!((below - above).abs() < 1e-6);
        // far out the ball is a band of height ≈ 2r around the circumference 2π
        let r = 1e4;
        assert!((cylinder_ball_area(r) / (4.0 * PI * r) - 1.0).abs() < 1e-6);
    }
}
