use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::metric::MetricKind;
use super::point::SpherePoint;
use crate::error::{domain, Error, Result};

/// Polyline through points of the extended plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyCurve {
    vertices: Vec<SpherePoint>,
    closed: bool,
}

impl PolyCurve {
    pub fn new(vertices: Vec<SpherePoint>, closed: bool) -> Result<Self> {
        let min = if closed { 3 } else { 2 };
        if vertices.len() < min {
            return domain(format!("polyline needs at least {min} vertices, got {}", vertices.len()));
        }
        let n = vertices.len();
        let pairs = if closed { n } else { n - 1 };
        for i in 0..pairs {
            if vertices[i] == vertices[(i + 1) % n] {
                return domain(format!("consecutive vertices {i} and {} coincide", (i + 1) % n));
            }
        }
        Ok(PolyCurve { vertices, closed })
    }

    pub fn open(vertices: Vec<SpherePoint>) -> Result<Self> {
        Self::new(vertices, false)
    }

    /// Closed polyline, verified to be simple.
    pub fn jordan(vertices: Vec<SpherePoint>) -> Result<Self> {
        let c = Self::new(vertices, true)?;
        if !c.is_simple()? {
            return domain("closed polyline is self-intersecting");
        }
        Ok(c)
    }

    pub fn from_xy(points: &[(f64, f64)], closed: bool) -> Result<Self> {
        let v = points
            .iter()
            .map(|&(x, y)| SpherePoint::try_new(x, y))
            .collect::<Result<Vec<_>>>()?;
        Self::new(v, closed)
    }

    pub fn vertices(&self) -> &[SpherePoint] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = (SpherePoint, SpherePoint)> + '_ {
        let n = self.vertices.len();
        (0..self.segment_count()).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Finite vertex coordinates, or an error if the curve passes through infinity.
    pub fn finite_vertices(&self) -> Result<Vec<Complex64>> {
        self.vertices.iter().map(|v| v.expect_finite("polyline vertex")).collect()
    }

    pub fn finite_segments(&self) -> Result<Vec<(Complex64, Complex64)>> {
        let v = self.finite_vertices()?;
        let n = v.len();
        Ok((0..self.segment_count()).map(|i| (v[i], v[(i + 1) % n])).collect())
    }

    /// Segment-intersection test over all non-adjacent segment pairs.
    pub fn is_simple(&self) -> Result<bool> {
        let segs = self.finite_segments()?;
        let n = segs.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (self.closed && i == 0 && j == n - 1);
                if adjacent {
                    // adjacent segments may only share their common vertex
                    if collinear_overlap(segs[i], segs[j]) {
                        return Ok(false);
                    }
                    continue;
                }
                if segments_intersect(segs[i].0, segs[i].1, segs[j].0, segs[j].1) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Twice the signed Euclidean area (positive for counterclockwise).
    pub fn signed_area(&self) -> Result<f64> {
        let v = self.finite_vertices()?;
        let n = v.len();
        let mut s = 0.0;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            s += a.re * b.im - a.im * b.re;
        }
        Ok(0.5 * s)
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        PolyCurve { vertices: v, closed: self.closed }
    }

    /// Same curve with counterclockwise orientation (closed curves only).
    pub fn oriented_ccw(&self) -> Result<Self> {
        if self.signed_area()? < 0.0 {
            Ok(self.reversed())
        } else {
            Ok(self.clone())
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        let v = self
            .finite_vertices()?
            .into_iter()
            .map(|z| SpherePoint::from_complex(f(z)))
            .collect();
        PolyCurve::new(v, self.closed)
    }

    /// Even-odd point-in-polygon test for closed curves.
    pub fn contains(&self, p: Complex64) -> bool {
        let Ok(v) = self.finite_vertices() else {
            return false;
        };
        point_in_polygon(&v, p)
    }

    /// Euclidean area-weighted centroid of a closed curve.
    pub fn centroid(&self) -> Result<Complex64> {
        let v = self.finite_vertices()?;
        let n = v.len();
        let mut a = 0.0;
        let mut c = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let p = v[i];
            let q = v[(i + 1) % n];
            let cross = p.re * q.im - q.re * p.im;
            a += cross;
            c += (p + q) * cross;
        }
        if a.abs() < 1e-300 {
            return domain("degenerate polygon has no centroid");
        }
        Ok(c / (3.0 * a))
    }

    /// Points along the curve such that consecutive samples are at most
    /// `max_step` apart in the given metric. Vertices are always included.
    pub fn densify(&self, m: MetricKind, max_step: f64) -> Result<Vec<SpherePoint>> {
        if max_step <= 0.0 {
            return domain("densify step must be positive");
        }
        let mut out = Vec::new();
        for (a, b) in self.segments() {
            out.push(a);
            let (za, zb) = match (a.finite(), b.finite()) {
                (Some(za), Some(zb)) => (za, zb),
                _ => continue,
            };
            let len = segment_length(za, zb, m)?;
            let k = (len / max_step).ceil() as usize;
            for j in 1..k {
                let t = j as f64 / k as f64;
                out.push(SpherePoint::from_complex(za + (zb - za) * t));
            }
        }
        if !self.closed {
            out.push(*self.vertices.last().unwrap());
        }
        Ok(out)
    }

    /// `n` points spaced evenly by Euclidean arclength starting at vertex 0.
    pub fn sample_uniform(&self, n: usize) -> Result<Vec<Complex64>> {
        let segs = self.finite_segments()?;
        let lens: Vec<f64> = segs.iter().map(|(a, b)| (b - a).norm()).collect();
        let total: f64 = lens.iter().sum();
        let count = if self.closed { n } else { n.max(2) - 1 };
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        let mut acc = 0.0;
        for j in 0..n {
            let s = total * j as f64 / count as f64;
            while seg + 1 < segs.len() && acc + lens[seg] < s - 1e-15 * total {
                acc += lens[seg];
                seg += 1;
            }
            let t = if lens[seg] > 0.0 { ((s - acc) / lens[seg]).clamp(0.0, 1.0) } else { 0.0 };
            let (a, b) = segs[seg];
            out.push(a + (b - a) * t);
        }
        Ok(out)
    }
}

pub fn point_in_polygon(v: &[Complex64], p: Complex64) -> bool {
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a.im > p.im) != (b.im > p.im) {
            let x = (b.re - a.re) * (p.im - a.im) / (b.im - a.im) + a.re;
            if p.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    cross(b - a, c - a)
}

fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed-segment intersection test.
pub fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

fn collinear_overlap(s: (Complex64, Complex64), t: (Complex64, Complex64)) -> bool {
    // adjacent segments share one endpoint; they overlap iff they fold back onto each other
    let (shared, p, q) = if s.1 == t.0 {
        (s.1, s.0, t.1)
    } else if s.0 == t.1 {
        (s.0, s.1, t.0)
    } else if s.0 == t.0 {
        (s.0, s.1, t.1)
    } else if s.1 == t.1 {
        (s.1, s.0, t.0)
    } else {
        return segments_intersect(s.0, s.1, t.0, t.1);
    };
    let u = p - shared;
    let v = q - shared;
    cross(u, v).abs() <= 1e-14 * u.norm() * v.norm() && (u.re * v.re + u.im * v.im) > 0.0
}

pub fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / l2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

pub fn segment_segment_distance(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Length of the straight Euclidean segment from `a` to `b` measured in the metric `m`.
pub fn segment_length(a: Complex64, b: Complex64, m: MetricKind) -> Result<f64> {
    let l = (b - a).norm();
    if l == 0.0 {
        return Ok(0.0);
    }
    // |a + s·(b−a)/l|² = (s+p)² + q², s ∈ [0, l]
    let dir = (b - a) / l;
    let p = a.re * dir.re + a.im * dir.im;
    let q = (a.re * dir.im - a.im * dir.re).abs();
    match m {
        MetricKind::Euclidean => Ok(l),
        MetricKind::Chordal => {
            let c = (1.0 + q * q).sqrt();
            Ok(2.0 / c * (((l + p) / c).atan() - (p / c).atan()))
        }
        MetricKind::Flat => {
            let x1 = p;
            let x2 = l + p;
            let s1 = x1.hypot(q);
            let s2 = x2.hypot(q);
            if x1 >= 0.0 {
                if s1 == 0.0 {
                    return domain("segment starts at the origin under the flat metric");
                }
                Ok(((x2 + s2) / (x1 + s1)).ln())
            } else if x2 <= 0.0 {
                if s2 == 0.0 {
                    return domain("segment ends at the origin under the flat metric");
                }
                Ok(((s1 - x1) / (s2 - x2)).ln())
            } else {
                if q == 0.0 {
                    return domain("segment passes through the origin under the flat metric");
                }
                Ok(((x2 + s2) * (s1 - x1) / (q * q)).ln())
            }
        }
    }
}

/// Total length of the polyline, each segment integrated exactly along the straight piece.
pub fn path_length(curve: &PolyCurve, m: MetricKind) -> Result<f64> {
    let mut total = 0.0;
    for (a, b) in curve.segments() {
        let (za, zb) = match (a.finite(), b.finite()) {
            (Some(za), Some(zb)) => (za, zb),
            _ => return Err(Error::Domain("segment through infinity has no length".into())),
        };
        total += segment_length(za, zb, m)?;
    }
    Ok(total)
}
