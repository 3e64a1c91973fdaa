use serde::{Deserialize, Serialize};

use super::metric::{distance, MetricKind, SPHERE_DIAMETER};
use super::point::SpherePoint;
use crate::error::{domain, Result};

/// `A(x; r, R) = {y : r < d(y, x) < R}` in a chosen metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub center: SpherePoint,
    pub inner: f64,
    pub outer: f64,
    pub metric: MetricKind,
}

impl Annulus {
    pub fn new(center: SpherePoint, inner: f64, outer: f64, metric: MetricKind) -> Result<Self> {
        if !(inner > 0.0 && inner < outer && outer.is_finite()) {
            return domain(format!("annulus radii must satisfy 0 < r < R, got r={inner}, R={outer}"));
        }
        if metric == MetricKind::Chordal && outer >= SPHERE_DIAMETER / 2.0 {
            return domain(format!("chordal annulus outer radius {outer} must be below 1"));
        }
        if metric != MetricKind::Chordal && center.is_infinite() {
            return domain("annulus centered at infinity outside the chordal metric");
        }
        Ok(Annulus { center, inner, outer, metric })
    }

    /// `w_A = log(R/r)`.
    pub fn width(&self) -> f64 {
        (self.outer / self.inner).ln()
    }

    pub fn contains(&self, p: &SpherePoint) -> Result<bool> {
        let d = distance(p, &self.center, self.metric)?;
        Ok(d > self.inner && d < self.outer)
    }

    pub fn with_radii(&self, inner: f64, outer: f64) -> Result<Self> {
        Annulus::new(self.center, inner, outer, self.metric)
    }
}
