use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::scene::{Hole, Label, Scene, Shape};
use crate::error::{domain, Result};
use crate::geometry::point::{angle_diff, wrap_angle};
use crate::geometry::{PolyCurve, SpherePoint};

/// A ℂ*-square stored in log coordinates: center `exp(u + iθ)`, side `side`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogSquare {
    pub label: Label,
    pub u: f64,
    pub theta: f64,
    pub side: f64,
}

impl LogSquare {
    pub fn flat_area(&self) -> f64 {
        self.side * self.side
    }

    pub fn shape(&self) -> Result<Shape> {
        Shape::cstar_square(self.u, self.theta, self.side)
    }

    pub fn center(&self) -> SpherePoint {
        SpherePoint::from_log(self.u, self.theta)
    }
}

/// Annulus `r < |z| < R` with disjoint ℂ*-squares inside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderDomain {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub squares: Vec<LogSquare>,
}

/// Builds and validates a cylinder domain. Squares are given as `(center, side)`
/// and labeled 2, 3, ... in order.
pub fn cylinder_domain(inner_radius: f64, outer_radius: f64, squares: &[(SpherePoint, f64)]) -> Result<CylinderDomain> {
    let sq = squares
        .iter()
        .enumerate()
        .map(|(i, (p, side))| {
            let (u, theta) = p.log_coords()?;
            Ok(LogSquare { label: i as Label + 2, u, theta, side: *side })
        })
        .collect::<Result<Vec<_>>>()?;
    CylinderDomain::new(inner_radius, outer_radius, sq)
}

impl CylinderDomain {
    pub fn new(inner_radius: f64, outer_radius: f64, squares: Vec<LogSquare>) -> Result<Self> {
        if !(inner_radius > 0.0 && inner_radius < outer_radius && outer_radius.is_finite()) {
            return domain(format!("cylinder radii {inner_radius}, {outer_radius} invalid"));
        }
        let (lo, hi) = (inner_radius.ln(), outer_radius.ln());
        for (i, q) in squares.iter().enumerate() {
            if !(q.side > 0.0 && q.side < TAU) {
                return domain(format!("square {} side {} outside (0, 2π)", q.label, q.side));
            }
            if q.u - q.side / 2.0 <= lo || q.u + q.side / 2.0 >= hi {
                return domain(format!("square {} leaves the annulus", q.label));
            }
            if q.label <= 1 {
                return domain("square labels 0 and 1 are reserved for the boundary circles");
            }
            for p in &squares[..i] {
                if p.label == q.label {
                    return domain(format!("duplicate square label {}", q.label));
                }
                // closed squares: touching counts as overlap
                let du = (p.u - q.u).abs();
                let dt = angle_diff(p.theta, q.theta).abs();
                let reach = (p.side + q.side) / 2.0;
                if du <= reach && dt <= reach {
                    return domain(format!("squares {} and {} overlap", p.label, q.label));
                }
            }
        }
        let squares = squares
            .into_iter()
            .map(|q| LogSquare { theta: wrap_angle(q.theta), ..q })
            .collect();
        Ok(CylinderDomain { inner_radius, outer_radius, squares })
    }

    /// `h_A = log(R/r)`.
    pub fn height(&self) -> f64 {
        (self.outer_radius / self.inner_radius).ln()
    }

    pub fn log_inner(&self) -> f64 {
        self.inner_radius.ln()
    }

    pub fn squares_area(&self) -> f64 {
        self.squares.iter().map(LogSquare::flat_area).sum()
    }

    pub fn to_scene(&self) -> Result<Scene> {
        let holes = self
            .squares
            .iter()
            .map(|q| Ok(Hole { label: q.label, shape: q.shape()? }))
            .collect::<Result<Vec<_>>>()?;
        Scene::annulus(self.inner_radius, self.outer_radius, holes)
    }

    /// Reads the squares back from a cylindrical scene whose holes are all ℂ*-squares.
    pub fn from_scene(scene: &Scene) -> Result<Self> {
        let super::scene::Outer::Annulus { inner_radius, outer_radius, .. } = scene.outer else {
            return domain("scene is not cylindrical");
        };
        let squares = scene
            .holes
            .iter()
            .map(|h| match h.shape.log_extent() {
                Some((u, theta, _, width)) if h.shape.is_cstar_square() => {
                    Ok(LogSquare { label: h.label, u, theta, side: width })
                }
                _ => domain(format!("hole {} is not a ℂ*-square", h.label)),
            })
            .collect::<Result<Vec<_>>>()?;
        CylinderDomain::new(inner_radius, outer_radius, squares)
    }

    /// Whether `exp(u + iθ)` lies in the closed annulus minus the open squares.
    pub fn in_complement(&self, u: f64, theta: f64) -> bool {
        let tol = 1e-12;
        if u < self.log_inner() - tol || u > self.outer_radius.ln() + tol {
            return false;
        }
        !self.squares.iter().any(|q| {
            (u - q.u).abs() < q.side / 2.0 - tol && angle_diff(theta, q.theta).abs() < q.side / 2.0 - tol
        })
    }
}

/// Uniform log-polar grid on an annulus: periodic in angle, `n_u` rows across.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogChart {
    pub u0: f64,
    pub h_u: f64,
    pub h_theta: f64,
    pub n_u: usize,
    pub n_theta: usize,
}

impl LogChart {
    pub fn new(inner_radius: f64, outer_radius: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return domain(format!("resolution {h} must be positive"));
        }
        let height = (outer_radius / inner_radius).ln();
        let n_theta = (TAU / h).round().max(4.0) as usize;
        let n_u = (height / h).round().max(1.0) as usize;
        Ok(LogChart { u0: inner_radius.ln(), h_u: height / n_u as f64, h_theta: TAU / n_theta as f64, n_u, n_theta })
    }

    pub fn row_center(&self, i: usize) -> f64 {
        self.u0 + (i as f64 + 0.5) * self.h_u
    }

    pub fn col_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.h_theta
    }
}

/// Path produced by the factor-2 router together with its lengths.
#[derive(Clone, Debug)]
pub struct LlcRoute {
    pub path: PolyCurve,
    /// Vertices in log coordinates, angle unwrapped along the path.
    pub lifted: Vec<(f64, f64)>,
    pub length: f64,
    pub distance: f64,
    pub factor: f64,
}

/// Longest straight piece, in log coordinates, of the returned polyline.
const ROUTE_PIECE: f64 = 0.01;

/// Flat geodesic from `x` to `y` with every square crossing replaced by the
/// shorter way around that square's boundary.
pub fn llc_route(d: &CylinderDomain, x: &SpherePoint, y: &SpherePoint) -> Result<LlcRoute> {
    let (ux, tx) = x.log_coords()?;
    let (uy, ty) = y.log_coords()?;
    if !d.in_complement(ux, tx) || !d.in_complement(uy, ty) {
        return domain("route endpoint outside the square complement");
    }
    let p = (ux, tx);
    let q = (uy, tx + angle_diff(ty, tx));
    let distance = (q.0 - p.0).hypot(q.1 - p.1);
    // crossings as (s_in, s_out, square lifted center, side)
    let mut crossings: Vec<(f64, f64, (f64, f64), f64)> = Vec::new();
    for sq in &d.squares {
        for k in [-1.0, 0.0, 1.0] {
            let c = (sq.u, sq.theta + k * TAU);
            let a = sq.side / 2.0;
            if let Some((s0, s1)) = clip(p, q, (c.0 - a, c.0 + a), (c.1 - a, c.1 + a)) {
                if (s1 - s0) * distance > 1e-12 {
                    crossings.push((s0, s1, c, sq.side));
                }
            }
        }
    }
    crossings.sort_by(|a, b| a.0.total_cmp(&b.0));
    let at = |s: f64| (p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1));
    let mut lifted = vec![p];
    for &(s0, s1, c, side) in &crossings {
        let entry = at(s0);
        let exit = at(s1);
        lifted.push(entry);
        lifted.extend(boundary_detour(entry, exit, c, side));
        lifted.push(exit);
    }
    lifted.push(q);
    lifted.dedup_by(|a, b| (a.0 - b.0).hypot(a.1 - b.1) < 1e-15);
    let length: f64 = lifted.windows(2).map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1)).sum();
    let mut fine = vec![lifted[0]];
    for w in lifted.windows(2) {
        let len = (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
        let k = (len / ROUTE_PIECE).ceil().max(1.0) as usize;
        for j in 1..=k {
            let t = j as f64 / k as f64;
            fine.push((w[0].0 + t * (w[1].0 - w[0].0), w[0].1 + t * (w[1].1 - w[0].1)));
        }
    }
    let verts: Vec<SpherePoint> = fine.iter().map(|&(u, t)| SpherePoint::from_log(u, t)).collect();
    let path = if verts.len() >= 2 {
        PolyCurve::open(verts)?
    } else {
        PolyCurve::open(vec![*x, *x])?
    };
    let factor = if distance > 0.0 { length / distance } else { 1.0 };
    Ok(LlcRoute { path, lifted, length, distance, factor })
}

/// Parameter interval of the segment `p→q` inside an axis-aligned box (Liang–Barsky).
fn clip(p: (f64, f64), q: (f64, f64), ur: (f64, f64), tr: (f64, f64)) -> Option<(f64, f64)> {
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 1.0;
    let d = (q.0 - p.0, q.1 - p.1);
    for (start, delta, min, max) in [(p.0, d.0, ur.0, ur.1), (p.1, d.1, tr.0, tr.1)] {
        if delta.abs() < 1e-300 {
            if start <= min || start >= max {
                return None;
            }
            continue;
        }
        let a = (min - start) / delta;
        let b = (max - start) / delta;
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        lo = lo.max(a);
        hi = hi.min(b);
    }
    (lo < hi).then_some((lo, hi))
}

/// Corners visited when walking the square boundary the short way from `entry` to `exit`.
fn boundary_detour(entry: (f64, f64), exit: (f64, f64), c: (f64, f64), side: f64) -> Vec<(f64, f64)> {
    let a = side / 2.0;
    let corners = [(c.0 - a, c.1 - a), (c.0 + a, c.1 - a), (c.0 + a, c.1 + a), (c.0 - a, c.1 + a)];
    let per = 4.0 * side;
    // perimeter coordinate measured counterclockwise from corner 0
    let pos = |pt: (f64, f64)| -> f64 {
        let (du, dt) = (pt.0 - corners[0].0, pt.1 - corners[0].1);
        let e = 1e-9 * side.max(1e-300);
        if dt.abs() <= e {
            du.clamp(0.0, side)
        } else if (pt.0 - corners[1].0).abs() <= e {
            side + dt.clamp(0.0, side)
        } else if (pt.1 - corners[2].1).abs() <= e {
            2.0 * side + (corners[2].0 - pt.0).clamp(0.0, side)
        } else {
            3.0 * side + (corners[3].1 - pt.1).clamp(0.0, side)
        }
    };
    let s0 = pos(entry);
    let s1 = pos(exit);
    let forward = (s1 - s0).rem_euclid(per);
    let (dir, len) = if forward <= per - forward { (1.0, forward) } else { (-1.0, per - forward) };
    let mut out = Vec::new();
    // corners strictly between s0 and s1 along the chosen direction
    let mut k_positions: Vec<(f64, usize)> = (0..4)
        .map(|k| {
            let ck = k as f64 * side;
            let off = if dir > 0.0 { (ck - s0).rem_euclid(per) } else { (s0 - ck).rem_euclid(per) };
            (off, k)
        })
        .filter(|&(off, _)| off > 1e-12 * side && off < len - 1e-12 * side)
        .collect();
    k_positions.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, k) in k_positions {
        out.push(corners[k]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};
    use crate::carpets::scene::shapes_disjoint;

    #[test]
    fn plain_cylinder_height() {
        let d = cylinder_domain(1.0, E, &[]).unwrap();
        assert!((d.height() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn square_validation() {
        let c = SpherePoint::from_log(0.5, 0.0);
        let d = cylinder_domain(1.0, E, &[(c, 0.5)]).unwrap();
        assert!((d.squares[0].flat_area() - 0.25).abs() < 1e-15);
        assert!(cylinder_domain(1.0, 1e4, &[(SpherePoint::from_log(4.0, 0.0), TAU)]).is_err());
        assert!(cylinder_domain(1.0, E, &[(c, 1.2)]).is_err());
        let c2 = SpherePoint::from_log(0.5, 0.4);
        assert!(cylinder_domain(1.0, E, &[(c, 0.5), (c2, 0.4)]).is_err());
        let c3 = SpherePoint::from_log(0.5, TAU - 0.4);
        assert!(cylinder_domain(1.0, E, &[(c, 0.5), (c3, 0.4)]).is_err());
    }

    #[test]
    fn route_without_obstacle_is_geodesic() {
        let d = cylinder_domain(1.0, E, &[(SpherePoint::from_log(0.5, PI), 0.3)]).unwrap();
        let r = llc_route(&d, &SpherePoint::from_log(0.1, 0.2), &SpherePoint::from_log(0.9, 0.6)).unwrap();
        assert!((r.factor - 1.0).abs() < 1e-12);
        assert!((r.distance - 0.8f64.hypot(0.4)).abs() < 1e-12);
    }

    #[test]
    fn central_crossing_detour() {
        let side = 0.5;
        let d = cylinder_domain(1.0, E, &[(SpherePoint::from_log(0.5, 1.0), side)]).unwrap();
        // horizontal chord through the center: entering mid-side, leaving mid-side
        let x = SpherePoint::from_log(0.5, 0.6);
        let y = SpherePoint::from_log(0.5, 1.4);
        let r = llc_route(&d, &x, &y).unwrap();
        // straight parts 0.15 + 0.15, detour ℓ/2 + ℓ + ℓ/2 = 2ℓ instead of chord ℓ
        let expected = 0.3 + 2.0 * side;
        assert!((r.length - expected).abs() < 1e-12, "{}", r.length);
        assert!(r.factor <= 2.0);
        for &(u, t) in &r.lifted {
            assert!(d.in_complement(u, t));
        }
    }

    #[test]
    fn route_across_the_seam() {
        let d = cylinder_domain(1.0, E, &[(SpherePoint::from_log(0.5, 0.0), 0.4)]).unwrap();
        let x = SpherePoint::from_log(0.5, TAU - 0.5);
        let y = SpherePoint::from_log(0.5, 0.5);
        let r = llc_route(&d, &x, &y).unwrap();
        assert!((r.distance - 1.0).abs() < 1e-12);
        assert!(r.factor > 1.0 && r.factor <= 2.0);
    }

    #[test]
    fn endpoint_inside_square_rejected() {
        let d = cylinder_domain(1.0, E, &[(SpherePoint::from_log(0.5, 0.0), 0.4)]).unwrap();
        assert!(llc_route(&d, &SpherePoint::from_log(0.5, 0.0), &SpherePoint::from_log(0.1, 2.0)).is_err());
    }

    #[test]
    fn chart_dimensions() {
        let c = LogChart::new(1.0, E, 1.0 / 64.0).unwrap();
        assert_eq!(c.n_u, 64);
        assert_eq!(c.n_theta, 402);
        assert!((c.h_theta * c.n_theta as f64 - TAU).abs() < 1e-12);
    }

    #[test]
    fn scene_round_trip() {
        let d = cylinder_domain(
            1.0,
            E,
            &[(SpherePoint::from_log(0.5, 0.0), 0.4), (SpherePoint::from_log(0.5, PI), 0.6)],
        )
        .unwrap();
        let s = d.to_scene().unwrap();
        let back = CylinderDomain::from_scene(&s).unwrap();
        assert_eq!(back.squares.len(), 2);
        for (a, b) in d.squares.iter().zip(&back.squares) {
            assert_eq!(a.label, b.label);
            assert!((a.u - b.u).abs() < 1e-12 && (a.side - b.side).abs() < 1e-12);
            assert!(angle_diff(a.theta, b.theta).abs() < 1e-12);
        }
        assert!(shapes_disjoint(&s.holes[0].shape, &s.holes[1].shape).unwrap());
    }
}
