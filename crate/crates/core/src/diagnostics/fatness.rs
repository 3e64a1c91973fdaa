use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{domain, Result};
use crate::geometry::curve::point_in_polygon;
use crate::geometry::metric::chordal_area_density;
use crate::geometry::point::angle_diff;
use crate::geometry::{set_diameter, MetricKind, PointSet, PolyCurve, SpherePoint};

/// Radial and angular nodes of the ball quadrature.
const QUAD_RADIAL: usize = 48;
const QUAD_ANGULAR: usize = 96;
/// Radii tried per center, log-spaced up to the diameter.
const RADII: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct FatnessReport {
    pub mu: f64,
    /// `(center, radius)` of the ball with the smallest mass ratio.
    pub witness: (SpherePoint, f64),
    pub balls: usize,
}

/// Estimate of `inf ν(M ∩ B(x,r)) / ν(B(x,r))` over `x ∈ M`, `0 < r ≤ diam M`.
///
/// Centers are the vertices, evenly spaced boundary points and an interior
/// lattice, about `trials` in total. Euclidean ratios use the exact area of
/// polygon ∩ disk; the other metrics integrate both masses with one
/// quadrature in a chart where the ball is round, so that the rule's error
/// largely cancels in the ratio.
pub fn fatness_estimate(region: &PolyCurve, m: MetricKind, trials: usize) -> Result<FatnessReport> {
    if !region.is_closed() {
        return domain("fatness needs a closed boundary");
    }
    let v = region.finite_vertices()?;
    let area = region.signed_area()?.abs();
    if area == 0.0 {
        return domain("region has zero area");
    }
    if m == MetricKind::Flat && (point_in_polygon(&v, Complex64::new(0.0, 0.0)) || v.iter().any(|z| z.norm() == 0.0)) {
        return domain("region contains the origin under the flat metric");
    }
    let diam = set_diameter(&PointSet::Curve(region.clone()), m)?;
    let centers = centers(region, trials.max(8))?;
    let radii: Vec<f64> = (0..RADII)
        .map(|k| diam * 10f64.powf(-2.0 * (1.0 - k as f64 / (RADII - 1) as f64)))
        .map(|r| if m == MetricKind::Chordal { r.min(1.999) } else { r })
        .collect();
    let results: Vec<(f64, Complex64, f64)> = centers
        .par_iter()
        .flat_map_iter(|&x| radii.iter().map(move |&r| (x, r)))
        .map(|(x, r)| (mass_ratio(&v, x, r, m), x, r))
        .collect();
    let (mu, x, r) = results
        .into_iter()
        .fold((f64::INFINITY, Complex64::new(0.0, 0.0), 0.0), |best, c| if c.0 < best.0 { c } else { best });
    Ok(FatnessReport { mu: mu.min(1.0), witness: (SpherePoint::from_complex(x), r), balls: centers.len() * RADII })
}

fn centers(region: &PolyCurve, trials: usize) -> Result<Vec<Complex64>> {
    let v = region.finite_vertices()?;
    let mut out: Vec<Complex64> = Vec::new();
    let stride = (v.len() / (trials / 4).max(1)).max(1);
    out.extend(v.iter().step_by(stride));
    out.extend(region.sample_uniform(trials / 4)?);
    let (mut lo, mut hi) = (v[0], v[0]);
    for z in &v {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let side = ((trials / 2) as f64).sqrt().ceil() as usize;
    for i in 0..side {
        for j in 0..side {
            let z = Complex64::new(
                lo.re + (hi.re - lo.re) * (i as f64 + 0.5) / side as f64,
                lo.im + (hi.im - lo.im) * (j as f64 + 0.5) / side as f64,
            );
            if point_in_polygon(&v, z) {
                out.push(z);
            }
        }
    }
    Ok(out)
}

fn mass_ratio(v: &[Complex64], x: Complex64, r: f64, m: MetricKind) -> f64 {
    match m {
        MetricKind::Euclidean => polygon_disk_area(v, x, r) / (PI * r * r),
        MetricKind::Chordal => {
            // move x to 0 by a rotation of the sphere; the ball becomes |w| < r/√(4−r²)
            let rho = r / (4.0 - r * r).sqrt();
            let xc = x.conj();
            let inv = |w: Complex64| (w + x) / (Complex64::new(1.0, 0.0) - xc * w);
            polar_ratio(rho, |w| point_in_polygon(v, inv(w)), chordal_area_density)
        }
        MetricKind::Flat => {
            // log chart: |dz|/|z| is euclidean in (log|z|, arg z) with the angle periodic
            let u0 = x.norm().ln();
            let t0 = x.arg();
            let inside = |du: f64, dt: f64| point_in_polygon(v, Complex64::from_polar((u0 + du).exp(), t0 + dt));
            if r <= PI {
                polar_ratio(r, |w| inside(w.re, w.im), |_| 1.0)
            } else {
                // the ball wraps: integrate over one period of angle
                let n = 2 * QUAD_RADIAL;
                let (mut inner, mut total) = (0.0, 0.0);
                for a in 0..n {
                    let du = -r + 2.0 * r * (a as f64 + 0.5) / n as f64;
                    for b in 0..n {
                        let dt = -PI + TAU * (b as f64 + 0.5) / n as f64;
                        if du * du + angle_diff(dt, 0.0).powi(2) < r * r {
                            total += 1.0;
                            if inside(du, dt) {
                                inner += 1.0;
                            }
                        }
                    }
                }
                inner / total
            }
        }
    }
}

/// Midpoint rule in polar coordinates on `|w| < rho` with area density `dens`.
fn polar_ratio(rho: f64, inside: impl Fn(Complex64) -> bool, dens: impl Fn(Complex64) -> f64) -> f64 {
    let (mut inner, mut total) = (0.0, 0.0);
    for a in 0..QUAD_RADIAL {
        let s = rho * (a as f64 + 0.5) / QUAD_RADIAL as f64;
        for b in 0..QUAD_ANGULAR {
            let w = Complex64::from_polar(s, TAU * (b as f64 + 0.5) / QUAD_ANGULAR as f64);
            let wt = s * dens(w);
            total += wt;
            if inside(w) {
                inner += wt;
            }
        }
    }
    inner / total
}

/// Exact area of a simple polygon intersected with the disk `|z − c| ≤ r`.
pub fn polygon_disk_area(v: &[Complex64], c: Complex64, r: f64) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        s += triangle_disk_area(v[i] - c, v[(i + 1) % n] - c, r);
    }
    s.abs()
}

/// Signed area of the triangle `(0, a, b)` intersected with `|z| ≤ r`.
fn triangle_disk_area(a: Complex64, b: Complex64, r: f64) -> f64 {
    let cross = a.re * b.im - a.im * b.re;
    if cross == 0.0 {
        return 0.0;
    }
    let sector = |p: Complex64, q: Complex64| {
        let ang = (p.re * q.im - p.im * q.re).atan2(p.re * q.re + p.im * q.im);
        0.5 * r * r * ang
    };
    let tri = |p: Complex64, q: Complex64| 0.5 * (p.re * q.im - p.im * q.re);
    let ra = a.norm();
    let rb = b.norm();
    // points where the segment a→b crosses the circle, parameter t ∈ (0,1)
    let d = b - a;
    let qa = d.norm_sqr();
    let qb = 2.0 * (a.re * d.re + a.im * d.im);
    let qc = a.norm_sqr() - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    let roots = if disc > 0.0 {
        let sq = disc.sqrt();
        let t1 = (-qb - sq) / (2.0 * qa);
        let t2 = (-qb + sq) / (2.0 * qa);
        Some((t1, t2))
    } else {
        None
    };
    match (ra <= r, rb <= r) {
        (true, true) => tri(a, b),
        (true, false) => {
            let t = roots.map(|(_, t2)| t2).unwrap_or(1.0).clamp(0.0, 1.0);
            let p = a + d * t;
            tri(a, p) + sector(p, b)
        }
        (false, true) => {
            let t = roots.map(|(t1, _)| t1).unwrap_or(0.0).clamp(0.0, 1.0);
            let p = a + d * t;
            sector(a, p) + tri(p, b)
        }
        (false, false) => match roots {
            Some((t1, t2)) if t1 < 1.0 && t2 > 0.0 && t1 > 0.0 && t2 < 1.0 => {
                let p = a + d * t1;
                let q = a + d * t2;
                sector(a, p) + tri(p, q) + sector(q, b)
            }
            _ => sector(a, b),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpets::scene::circle_polygon;

    fn rect(w: f64, h: f64) -> PolyCurve {
        PolyCurve::from_xy(&[(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)], true).unwrap()
    }

    /// Cell-count oracle for polygon ∩ disk.
    fn counted_area(v: &[Complex64], c: Complex64, r: f64, n: usize) -> f64 {
        let h = 2.0 * r / n as f64;
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..n {
                let z = c + Complex64::new(-r + (i as f64 + 0.5) * h, -r + (j as f64 + 0.5) * h);
                if (z - c).norm() <= r && point_in_polygon(v, z) {
                    count += 1;
                }
            }
        }
        count as f64 * h * h
    }

    #[test]
    fn exact_intersection_matches_counting() {
        let v = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, 0.2),
            Complex64::new(1.5, 1.7),
            Complex64::new(0.4, 1.0),
        ];
        for &(c, r) in &[(Complex64::new(1.0, 0.8), 0.6), (Complex64::new(0.0, 0.0), 1.2), (Complex64::new(2.5, 2.5), 1.5)] {
            let exact = polygon_disk_area(&v, c, r);
            let count = counted_area(&v, c, r, 1500);
            assert!((exact - count).abs() < 2e-3 * r * r, "{exact} {count}");
        }
        // disk entirely inside and polygon entirely inside
        let sq = rect(1.0, 1.0).finite_vertices().unwrap();
        assert!((polygon_disk_area(&sq, Complex64::new(0.5, 0.5), 0.3) - PI * 0.09).abs() < 1e-12);
        assert!((polygon_disk_area(&sq, Complex64::new(0.5, 0.5), 10.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chordal_disk_is_quarter_fat() {
        let d = circle_polygon(Complex64::new(0.2, 0.1), 0.5, 256).unwrap();
        let f = fatness_estimate(&d, MetricKind::Chordal, 64).unwrap();
        assert!(f.mu >= 0.25 - 0.02 && f.mu <= 1.0, "{}", f.mu);
    }

    #[test]
    fn thin_rectangle_is_not_fat() {
        let f = fatness_estimate(&rect(1.0, 0.01), MetricKind::Euclidean, 64).unwrap();
        assert!(f.mu > 0.0 && f.mu < 0.02, "{}", f.mu);
    }

    #[test]
    fn zero_area_rejected() {
        let flat = PolyCurve::from_xy(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], true).unwrap();
        assert!(fatness_estimate(&flat, MetricKind::Euclidean, 16).is_err());
    }
}
