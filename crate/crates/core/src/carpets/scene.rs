use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::TAU;

use crate::error::{domain, Result};
use crate::geometry::curve::{point_in_polygon, point_segment_distance, segment_segment_distance};
use crate::geometry::point::{angle_diff, wrap_angle};
use crate::geometry::{MetricKind, PolyCurve, SpherePoint};

/// Vertices per full turn when round boundaries are polygonized.
pub const CIRCLE_VERTICES: usize = 256;

pub type Label = u32;

/// Region removed from the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Polygon(PolyCurve),
    /// Closed euclidean disk.
    Disk { center: Complex64, radius: f64 },
    /// `{exp(u + iθ) : u0 ≤ u ≤ u1, θ ∈ [t0, t0 + width]}`; a ℂ*-square when `u1 − u0 = width`.
    LogRect { u0: f64, u1: f64, t0: f64, width: f64 },
}

impl Shape {
    /// ℂ*-square centered at `exp(u + iθ)` with side `side`.
    pub fn cstar_square(u: f64, theta: f64, side: f64) -> Result<Shape> {
        Shape::log_rect(u - side / 2.0, u + side / 2.0, theta - side / 2.0, side)
    }

    pub fn log_rect(u0: f64, u1: f64, t0: f64, width: f64) -> Result<Shape> {
        if !(u1 > u0) || !(width > 0.0 && width < TAU) || !u0.is_finite() || !u1.is_finite() {
            return domain(format!("invalid log rectangle u∈[{u0},{u1}], width {width}"));
        }
        Ok(Shape::LogRect { u0, u1, t0: wrap_angle(t0), width })
    }

    pub fn disk(center: Complex64, radius: f64) -> Result<Shape> {
        if !(radius > 0.0 && radius.is_finite()) {
            return domain(format!("disk radius {radius} must be positive"));
        }
        Ok(Shape::Disk { center, radius })
    }

    pub fn polygon(curve: PolyCurve) -> Result<Shape> {
        if !curve.is_closed() {
            return domain("hole boundary must be closed");
        }
        if !curve.is_simple()? {
            return domain("hole boundary is self-intersecting");
        }
        // domain on the left: holes run clockwise
        let c = if curve.signed_area()? > 0.0 { curve.reversed() } else { curve };
        Ok(Shape::Polygon(c))
    }

    pub fn is_cstar_square(&self) -> bool {
        matches!(self, Shape::LogRect { u0, u1, width, .. } if ((u1 - u0) - width).abs() <= 1e-12 * width.max(1.0))
    }

    /// `(u-center, θ-center, radial height, angular width)` for log rectangles.
    pub fn log_extent(&self) -> Option<(f64, f64, f64, f64)> {
        match *self {
            Shape::LogRect { u0, u1, t0, width } => Some((0.5 * (u0 + u1), wrap_angle(t0 + width / 2.0), u1 - u0, width)),
            _ => None,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Shape::Polygon(c) => c.contains(z),
            Shape::Disk { center, radius } => (z - center).norm() <= *radius,
            Shape::LogRect { .. } => {
                let r = z.norm();
                r > 0.0 && self.contains_log(r.ln(), z.arg())
            }
        }
    }

    /// Membership of `exp(u + iθ)`.
    pub fn contains_log(&self, u: f64, theta: f64) -> bool {
        match *self {
            Shape::LogRect { u0, u1, t0, width } => {
                u >= u0 && u <= u1 && angle_diff(theta, t0 + width / 2.0).abs() <= width / 2.0
            }
            _ => {
                let z = Complex64::from_polar(u.exp(), theta);
                self.contains(z)
            }
        }
    }

    /// Boundary polygon, clockwise so that the domain lies on its left.
    pub fn boundary(&self) -> Result<PolyCurve> {
        match self {
            Shape::Polygon(c) => Ok(c.clone()),
            Shape::Disk { center, radius } => circle_polygon(*center, *radius, CIRCLE_VERTICES).map(|c| c.reversed()),
            Shape::LogRect { u0, u1, t0, width } => {
                let arc = ((width / TAU) * CIRCLE_VERTICES as f64).ceil().max(4.0) as usize;
                let mut v = Vec::with_capacity(2 * arc + 2);
                for k in 0..=arc {
                    let t = t0 + width * k as f64 / arc as f64;
                    v.push(SpherePoint::from_log(*u0, t));
                }
                for k in 0..=arc {
                    let t = t0 + width - width * k as f64 / arc as f64;
                    v.push(SpherePoint::from_log(*u1, t));
                }
                // ccw around the rectangle's image is inner arc forward then outer arc backward
                let c = PolyCurve::new(v, true)?;
                Ok(if c.signed_area()? > 0.0 { c.reversed() } else { c })
            }
        }
    }

    /// Euclidean bounding box `(min, max)`.
    pub fn bbox(&self) -> Result<(Complex64, Complex64)> {
        let b = self.boundary()?;
        bbox_of(&b.finite_vertices()?)
    }
}

pub fn circle_polygon(center: Complex64, radius: f64, n: usize) -> Result<PolyCurve> {
    let v = (0..n)
        .map(|k| SpherePoint::from_complex(center + Complex64::from_polar(radius, TAU * k as f64 / n as f64)))
        .collect();
    PolyCurve::new(v, true)
}

fn bbox_of(v: &[Complex64]) -> Result<(Complex64, Complex64)> {
    if v.is_empty() {
        return domain("bounding box of an empty set");
    }
    let mut lo = v[0];
    let mut hi = v[0];
    for z in v {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub label: Label,
    pub shape: Shape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Outer {
    /// Jordan polygon; when labeled, its outside counts as a hole.
    Curve { curve: PolyCurve, label: Option<Label> },
    /// Round annulus `r < |z| < R`; the inner disk and the outside of the outer circle are holes.
    Annulus { inner_radius: f64, outer_radius: f64, inner_label: Label, outer_label: Label },
}

/// Domain bounded by an outer boundary with labeled holes removed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub outer: Outer,
    pub holes: Vec<Hole>,
    pub metric: MetricKind,
}

impl Scene {
    pub fn new(outer: Outer, holes: Vec<Hole>, metric: MetricKind) -> Result<Scene> {
        let outer = match outer {
            Outer::Curve { curve, label } => {
                if !curve.is_closed() || !curve.is_simple()? {
                    return domain("outer boundary must be a simple closed polyline");
                }
                Outer::Curve { curve: curve.oriented_ccw()?, label }
            }
            Outer::Annulus { inner_radius, outer_radius, inner_label, outer_label } => {
                if !(inner_radius > 0.0 && inner_radius < outer_radius && outer_radius.is_finite()) {
                    return domain(format!("annulus radii {inner_radius}, {outer_radius} invalid"));
                }
                if inner_label == outer_label {
                    return domain("annulus boundary labels must differ");
                }
                Outer::Annulus { inner_radius, outer_radius, inner_label, outer_label }
            }
        };
        let holes = holes
            .into_iter()
            .map(|h| {
                let shape = match h.shape {
                    Shape::Polygon(c) => Shape::polygon(c)?,
                    s => s,
                };
                Ok(Hole { label: h.label, shape })
            })
            .collect::<Result<Vec<_>>>()?;
        let scene = Scene { outer, holes, metric };
        scene.validate()?;
        Ok(scene)
    }

    /// Cylinder `r < |z| < R` in the flat metric with holes 0 (inner) and 1 (outer).
    pub fn annulus(inner_radius: f64, outer_radius: f64, holes: Vec<Hole>) -> Result<Scene> {
        Scene::new(
            Outer::Annulus { inner_radius, outer_radius, inner_label: 0, outer_label: 1 },
            holes,
            MetricKind::Flat,
        )
    }

    pub fn is_cylindrical(&self) -> bool {
        matches!(self.outer, Outer::Annulus { .. })
    }

    /// `log(R/r)` for cylindrical scenes.
    pub fn cylinder_height(&self) -> Option<f64> {
        match self.outer {
            Outer::Annulus { inner_radius, outer_radius, .. } => Some((outer_radius / inner_radius).ln()),
            _ => None,
        }
    }

    pub fn outer_labels(&self) -> Vec<Label> {
        match self.outer {
            Outer::Curve { label, .. } => label.into_iter().collect(),
            Outer::Annulus { inner_label, outer_label, .. } => vec![inner_label, outer_label],
        }
    }

    /// Every hole label, including labeled outer components, sorted.
    pub fn labels(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self.holes.iter().map(|h| h.label).chain(self.outer_labels()).collect();
        v.sort_unstable();
        v
    }

    pub fn hole(&self, label: Label) -> Option<&Hole> {
        self.holes.iter().find(|h| h.label == label)
    }

    pub fn has_label(&self, label: Label) -> bool {
        self.labels().contains(&label)
    }

    /// Outer boundary as a counterclockwise polyline.
    pub fn outer_curve(&self) -> Result<PolyCurve> {
        match &self.outer {
            Outer::Curve { curve, .. } => Ok(curve.clone()),
            Outer::Annulus { outer_radius, .. } => circle_polygon(Complex64::new(0.0, 0.0), *outer_radius, CIRCLE_VERTICES),
        }
    }

    /// Boundary curve of any labeled component, oriented with the domain on its left.
    pub fn boundary_of(&self, label: Label) -> Result<PolyCurve> {
        if let Some(h) = self.hole(label) {
            return h.shape.boundary();
        }
        match &self.outer {
            Outer::Curve { curve, label: Some(l) } if *l == label => Ok(curve.clone()),
            Outer::Annulus { inner_radius, inner_label, .. } if *inner_label == label => {
                Ok(circle_polygon(Complex64::new(0.0, 0.0), *inner_radius, CIRCLE_VERTICES)?.reversed())
            }
            Outer::Annulus { outer_radius, outer_label, .. } if *outer_label == label => {
                circle_polygon(Complex64::new(0.0, 0.0), *outer_radius, CIRCLE_VERTICES)
            }
            _ => domain(format!("no boundary component with label {label}")),
        }
    }

    /// All peripheral curves: the outer boundary then every hole, with their labels.
    pub fn peripheral_curves(&self) -> Result<Vec<(Option<Label>, PolyCurve)>> {
        let mut out = Vec::new();
        match &self.outer {
            Outer::Curve { curve, label } => out.push((*label, curve.clone())),
            Outer::Annulus { inner_label, outer_label, .. } => {
                out.push((Some(*inner_label), self.boundary_of(*inner_label)?));
                out.push((Some(*outer_label), self.boundary_of(*outer_label)?));
            }
        }
        for h in &self.holes {
            out.push((Some(h.label), h.shape.boundary()?));
        }
        Ok(out)
    }

    /// Whether a point lies in the open domain.
    pub fn in_domain(&self, z: Complex64) -> bool {
        let inside_outer = match &self.outer {
            Outer::Curve { curve, .. } => curve.contains(z),
            Outer::Annulus { inner_radius, outer_radius, .. } => {
                let r = z.norm();
                r > *inner_radius && r < *outer_radius
            }
        };
        inside_outer && !self.holes.iter().any(|h| h.shape.contains(z))
    }

    /// Label of the component containing `z`, if `z` is not in the domain.
    pub fn component_at(&self, z: Complex64) -> Option<Label> {
        if let Some(h) = self.holes.iter().find(|h| h.shape.contains(z)) {
            return Some(h.label);
        }
        match &self.outer {
            Outer::Curve { curve, label } => {
                if curve.contains(z) {
                    None
                } else {
                    *label
                }
            }
            Outer::Annulus { inner_radius, outer_radius, inner_label, outer_label } => {
                let r = z.norm();
                if r <= *inner_radius {
                    Some(*inner_label)
                } else if r >= *outer_radius {
                    Some(*outer_label)
                } else {
                    None
                }
            }
        }
    }

    /// Euclidean bounding box of the outer boundary.
    pub fn bbox(&self) -> Result<(Complex64, Complex64)> {
        bbox_of(&self.outer_curve()?.finite_vertices()?)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for l in self.labels() {
            if !seen.insert(l) {
                return domain(format!("duplicate hole label {l}"));
            }
        }
        if self.metric == MetricKind::Flat {
            for h in &self.holes {
                if let Shape::Polygon(_) | Shape::Disk { .. } = h.shape {
                    let b = h.shape.boundary()?;
                    if h.shape.contains(Complex64::new(0.0, 0.0)) || b.finite_vertices()?.iter().any(|z| z.norm() == 0.0) {
                        return domain(format!("hole {} contains the origin under the flat metric", h.label));
                    }
                }
            }
            if let Outer::Curve { curve, .. } = &self.outer {
                if curve.contains(Complex64::new(0.0, 0.0))
                    && !self.holes.iter().any(|h| h.shape.contains(Complex64::new(0.0, 0.0)))
                {
                    return domain("flat-metric domain contains the origin");
                }
            }
        }
        for h in &self.holes {
            self.check_inside_outer(h)?;
        }
        // sweep over x-sorted bounding boxes, exact tests only where boxes meet
        let mut boxes = Vec::with_capacity(self.holes.len());
        for (i, h) in self.holes.iter().enumerate() {
            let (lo, hi) = h.shape.bbox()?;
            let pad = 1e-3 * (hi - lo).norm();
            boxes.push((lo.re - pad, hi.re + pad, lo.im - pad, hi.im + pad, i));
        }
        boxes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.4.cmp(&b.4)));
        for a in 0..boxes.len() {
            for b in (a + 1)..boxes.len() {
                if boxes[b].0 > boxes[a].1 {
                    break;
                }
                if boxes[b].3 < boxes[a].2 || boxes[b].2 > boxes[a].3 {
                    continue;
                }
                let (i, j) = (boxes[a].4, boxes[b].4);
                if !shapes_disjoint(&self.holes[i].shape, &self.holes[j].shape)? {
                    return domain(format!("holes {} and {} intersect", self.holes[i].label, self.holes[j].label));
                }
            }
        }
        Ok(())
    }

    fn check_inside_outer(&self, h: &Hole) -> Result<()> {
        let fail = || domain(format!("hole {} is not inside the outer boundary", h.label));
        match &self.outer {
            Outer::Annulus { inner_radius, outer_radius, .. } => {
                let (lo, hi) = (inner_radius.ln(), outer_radius.ln());
                match h.shape {
                    // log rectangles may tile up to the boundary circles
                    Shape::LogRect { u0, u1, .. } => {
                        let tol = 1e-12 * (hi - lo);
                        if u0 < lo - tol || u1 > hi + tol {
                            return fail();
                        }
                    }
                    _ => {
                        for z in h.shape.boundary()?.finite_vertices()? {
                            let r = z.norm();
                            if r <= *inner_radius || r >= *outer_radius {
                                return fail();
                            }
                        }
                    }
                }
            }
            Outer::Curve { curve, .. } => {
                let b = h.shape.boundary()?;
                let v = b.finite_vertices()?;
                if !v.iter().all(|&z| curve.contains(z)) {
                    return fail();
                }
                if !polygons_disjoint_boundaries(curve, &b)? {
                    return fail();
                }
            }
        }
        Ok(())
    }
}

fn polygons_disjoint_boundaries(a: &PolyCurve, b: &PolyCurve) -> Result<bool> {
    let sa = a.finite_segments()?;
    let sb = b.finite_segments()?;
    for &(p, q) in &sa {
        for &(r, s) in &sb {
            if segment_segment_distance(p, q, r, s) == 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Disjointness of closed shapes; log rectangles only need disjoint interiors.
pub fn shapes_disjoint(a: &Shape, b: &Shape) -> Result<bool> {
    match (a, b) {
        (Shape::LogRect { .. }, Shape::LogRect { .. }) => {
            let (ua, ta, ha, wa) = a.log_extent().unwrap();
            let (ub, tb, hb, wb) = b.log_extent().unwrap();
            let tol = 1e-12;
            let u_overlap = (ua - ub).abs() < (ha + hb) / 2.0 - tol;
            let t_overlap = angle_diff(ta, tb).abs() < (wa + wb) / 2.0 - tol;
            Ok(!(u_overlap && t_overlap))
        }
        (Shape::Disk { center: c1, radius: r1 }, Shape::Disk { center: c2, radius: r2 }) => Ok((c1 - c2).norm() > r1 + r2),
        (Shape::Disk { center, radius }, other) | (other, Shape::Disk { center, radius }) => {
            let b = other.boundary()?;
            if other.contains(*center) {
                return Ok(false);
            }
            let d = b
                .finite_segments()?
                .iter()
                .map(|&(p, q)| point_segment_distance(*center, p, q))
                .fold(f64::INFINITY, f64::min);
            Ok(d > *radius)
        }
        _ => {
            let ba = a.boundary()?;
            let bb = b.boundary()?;
            if !polygons_disjoint_boundaries(&ba, &bb)? {
                return Ok(false);
            }
            let va = ba.finite_vertices()?;
            let vb = bb.finite_vertices()?;
            Ok(!point_in_polygon(&va, vb[0]) && !point_in_polygon(&vb, va[0]))
        }
    }
}

/// Whether a polygon hole is round enough to count as a disk: all vertices
/// equidistant from the centroid to relative tolerance `tol`.
pub fn is_round(shape: &Shape, tol: f64) -> bool {
    match shape {
        Shape::Disk { .. } => true,
        Shape::Polygon(c) => {
            let (Ok(v), Ok(z0)) = (c.finite_vertices(), c.centroid()) else {
                return false;
            };
            let d: Vec<f64> = v.iter().map(|z| (z - z0).norm()).collect();
            let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = d.iter().cloned().fold(0.0, f64::max);
            v.len() >= 16 && hi - lo <= tol * hi
        }
        Shape::LogRect { .. } => false,
    }
}

/// Angle of `z` reduced to `[0, 2π)`.
pub fn polar_angle(z: Complex64) -> f64 {
    wrap_angle(z.arg())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x: f64, y: f64, s: f64) -> PolyCurve {
        PolyCurve::from_xy(&[(x, y), (x + s, y), (x + s, y + s), (x, y + s)], true).unwrap()
    }

    #[test]
    fn orientation_is_normalized() {
        let scene = Scene::new(
            Outer::Curve { curve: square(0.0, 0.0, 1.0).reversed(), label: None },
            vec![Hole { label: 0, shape: Shape::Polygon(square(0.4, 0.4, 0.2)) }],
            MetricKind::Euclidean,
        )
        .unwrap();
        assert!(scene.outer_curve().unwrap().signed_area().unwrap() > 0.0);
        assert!(scene.boundary_of(0).unwrap().signed_area().unwrap() < 0.0);
    }

    #[test]
    fn overlapping_holes_rejected() {
        let r = Scene::new(
            Outer::Curve { curve: square(0.0, 0.0, 1.0), label: None },
            vec![
                Hole { label: 0, shape: Shape::Polygon(square(0.1, 0.1, 0.3)) },
                Hole { label: 1, shape: Shape::Polygon(square(0.3, 0.3, 0.3)) },
            ],
            MetricKind::Euclidean,
        );
        assert!(r.is_err());
        let r = Scene::new(
            Outer::Curve { curve: square(0.0, 0.0, 1.0), label: None },
            vec![Hole { label: 0, shape: Shape::Polygon(square(0.8, 0.8, 0.3)) }],
            MetricKind::Euclidean,
        );
        assert!(r.is_err());
    }

    #[test]
    fn log_rect_membership_wraps() {
        let s = Shape::cstar_square(0.5, 0.0, 0.4).unwrap();
        assert!(s.contains_log(0.5, 6.2));
        assert!(s.contains_log(0.5, 0.19));
        assert!(!s.contains_log(0.5, 0.21));
        assert!(!s.contains_log(0.75, 0.0));
        assert!(s.is_cstar_square());
        let z = Complex64::from_polar(0.5f64.exp(), -0.1);
        assert!(s.contains(z));
    }

    #[test]
    fn log_rects_may_touch_but_not_overlap() {
        let a = Shape::log_rect(0.0, 0.5, 0.0, 1.0).unwrap();
        let b = Shape::log_rect(0.5, 1.0, 0.0, 1.0).unwrap();
        let c = Shape::log_rect(0.4, 1.0, 0.9, 1.0).unwrap();
        assert!(shapes_disjoint(&a, &b).unwrap());
        assert!(!shapes_disjoint(&a, &c).unwrap());
        let d = Shape::log_rect(0.0, 0.5, 6.0, 0.5).unwrap();
        assert!(!shapes_disjoint(&a, &d).unwrap());
    }

    #[test]
    fn annulus_components() {
        let s = Scene::annulus(1.0, std::f64::consts::E, vec![]).unwrap();
        assert_eq!(s.labels(), vec![0, 1]);
        assert!((s.cylinder_height().unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(s.component_at(Complex64::new(0.5, 0.0)), Some(0));
        assert_eq!(s.component_at(Complex64::new(3.0, 0.0)), Some(1));
        assert_eq!(s.component_at(Complex64::new(2.0, 0.0)), None);
        assert!(s.boundary_of(0).unwrap().signed_area().unwrap() < 0.0);
    }

    #[test]
    fn round_detection() {
        let disk = Shape::disk(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let poly = Shape::polygon(disk.boundary().unwrap()).unwrap();
        assert!(is_round(&poly, 1e-9));
        assert!(!is_round(&Shape::Polygon(square(0.0, 0.0, 1.0)), 1e-3));
    }
}
