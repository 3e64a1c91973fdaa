use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A point of the extended plane. Infinity is its own variant and never a
/// large float.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    /// Panics if either coordinate is not finite.
    pub fn new(x: f64, y: f64) -> Self {
        assert!(x.is_finite() && y.is_finite(), "non-finite coordinate");
        SpherePoint::Finite(Complex64::new(x, y))
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(SpherePoint::Finite(Complex64::new(x, y)))
        } else {
            Err(Error::Domain(format!("non-finite coordinate ({x}, {y})")))
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn origin() -> Self {
        Self::new(0.0, 0.0)
    }

    /// The point `exp(u + iθ)` of `ℂ*`, i.e. the inverse of [`SpherePoint::log_coords`].
    pub fn from_log(u: f64, theta: f64) -> Self {
        let rho = u.exp();
        Self::new(rho * theta.cos(), rho * theta.sin())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn expect_finite(&self, what: &str) -> Result<Complex64> {
        self.finite()
            .ok_or_else(|| Error::Domain(format!("{what}: point at infinity not allowed")))
    }

    /// `(log|z|, arg z)` with the angle in `[0, 2π)`.
    pub fn log_coords(&self) -> Result<(f64, f64)> {
        let z = self.expect_finite("log coordinates")?;
        let r = z.norm();
        if r == 0.0 {
            return Err(Error::Domain("log coordinates of the origin".into()));
        }
        Ok((r.ln(), wrap_angle(z.arg())))
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::from_complex(z)
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// Signed angular difference reduced to `[-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}
