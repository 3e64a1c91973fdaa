use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use crate::carpets::scene::Label;
use crate::error::{domain, Result};
use crate::geometry::point::{angle_diff, wrap_angle};

/// Squares below this fraction of the height are degenerate markers.
pub const DEFAULT_MIN_SIDE_RATIO: f64 = 1e-3;
/// Relative tolerance on `Σℓ² + residual·h² = 2πh`.
pub const AREA_TOLERANCE: f64 = 0.1;

/// A ℂ*-square in cylinder coordinates: log-height `u` above the inner
/// circle, angle `theta`, side `side`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutSquare {
    pub label: Label,
    pub u: f64,
    pub theta: f64,
    pub side: f64,
    #[serde(default)]
    pub degenerate: bool,
}

impl LayoutSquare {
    /// Sup-norm gap to another square in `(u, θ)` with angles mod 2π; negative
    /// when the open squares overlap.
    pub fn gap(&self, o: &LayoutSquare) -> f64 {
        let reach = (self.side + o.side) / 2.0;
        ((self.u - o.u).abs() - reach).max(angle_diff(self.theta, o.theta).abs() - reach)
    }
}

/// Which heuristic stages shaped the layout.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LayoutFlags {
    /// Angles come from the flux of the discrete potential, not from a formula.
    pub heuristic_angles: bool,
    /// Some square was moved to remove an overlap or to fit the band.
    pub relaxed: bool,
    /// Overlaps remained when the relaxation budget ran out.
    pub overlap_unresolved: bool,
}

/// Finite cylinder of height `h_a` over the unit circle with one ℂ*-square per hole.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub version: String,
    pub h_a: f64,
    pub inner: Label,
    pub outer: Label,
    /// Sorted by label.
    pub squares: Vec<LayoutSquare>,
    /// Density part of the extremal mass, `M − Σρᵢ²`.
    pub residual_density_mass: f64,
    pub modulus: f64,
    /// Largest displacement of a square during relaxation.
    pub relaxation_distance: f64,
    pub flags: LayoutFlags,
}

pub const LAYOUT_VERSION: &str = "1";

impl Layout {
    pub fn square(&self, label: Label) -> Option<&LayoutSquare> {
        self.squares.iter().find(|s| s.label == label)
    }

    /// `Σℓ²`.
    pub fn squares_area(&self) -> f64 {
        self.squares.iter().map(|s| s.side * s.side).sum()
    }

    /// Share of `2π h_A` carried by the density rather than the squares.
    pub fn residual_fraction(&self) -> f64 {
        self.residual_density_mass * self.h_a * self.h_a / (TAU * self.h_a)
    }

    /// The same layout turned by `alpha`.
    pub fn rotated(&self, alpha: f64) -> Layout {
        let mut l = self.clone();
        for s in &mut l.squares {
            s.theta = wrap_angle(s.theta + alpha);
        }
        l
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutReport {
    /// `|Σℓ² + residual·h² − 2πh| / 2πh`.
    pub area_residual: f64,
    /// Smallest pairwise gap among non-degenerate squares, if there are two.
    pub min_gap: Option<f64>,
    pub degenerate: usize,
    /// A pair of overlapping squares, if any.
    pub overlap: Option<(Label, Label)>,
    /// Squares not inside the open band `0 < u ± ℓ/2 < h`.
    pub outside_band: Vec<Label>,
    pub negative_sides: Vec<Label>,
    pub passed: bool,
}

/// Checks the layout invariants and audits the area identity.
pub fn layout_validate(l: &Layout) -> LayoutReport {
    let two_pi_h = TAU * l.h_a;
    let area_residual = if two_pi_h > 0.0 {
        (l.squares_area() + l.residual_density_mass * l.h_a * l.h_a - two_pi_h).abs() / two_pi_h
    } else {
        f64::INFINITY
    };
    let solid: Vec<&LayoutSquare> = l.squares.iter().filter(|s| !s.degenerate).collect();
    let mut min_gap: Option<f64> = None;
    let mut overlap = None;
    for (i, a) in solid.iter().enumerate() {
        for b in &solid[i + 1..] {
            let gap = a.gap(b);
            min_gap = Some(min_gap.map_or(gap, |m| m.min(gap)));
            if gap < -1e-12 && overlap.is_none() {
                overlap = Some((a.label, b.label));
            }
        }
    }
    let slack = 1e-12 * l.h_a.max(1.0);
    let outside_band: Vec<Label> = l
        .squares
        .iter()
        .filter(|s| s.u - s.side / 2.0 < -slack || s.u + s.side / 2.0 > l.h_a + slack || !(s.u > 0.0 && s.u < l.h_a))
        .map(|s| s.label)
        .collect();
    let negative_sides: Vec<Label> = l.squares.iter().filter(|s| !(s.side >= 0.0)).map(|s| s.label).collect();
    let passed = l.h_a > 0.0
        && area_residual <= AREA_TOLERANCE
        && overlap.is_none()
        && outside_band.is_empty()
        && negative_sides.is_empty();
    LayoutReport {
        area_residual,
        min_gap,
        degenerate: l.squares.iter().filter(|s| s.degenerate).count(),
        overlap,
        outside_band,
        negative_sides,
        passed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    /// Angle added to the first layout to align it with the second.
    pub rotation: f64,
    /// Mean log-height offset of the second layout's squares; near zero for
    /// layouts normalized to the unit inner circle.
    pub log_offset: f64,
    pub height_difference: f64,
    /// `max(|Δu|, ℓ·|Δθ|, |Δℓ|)` per label after alignment, with `ℓ` the mean side.
    pub per_label: BTreeMap<Label, f64>,
    /// Largest per-label discrepancy.
    pub discrepancy: f64,
    pub worst_label: Option<Label>,
}

fn discrepancies(a: &Layout, b: &Layout, alpha: f64) -> BTreeMap<Label, f64> {
    a.squares
        .iter()
        .map(|s| {
            let t = b.square(s.label).expect("labels checked");
            let side = (s.side + t.side) / 2.0;
            let d = (s.u - t.u).abs().max(side * angle_diff(t.theta, s.theta + alpha).abs()).max((s.side - t.side).abs());
            (s.label, d)
        })
        .collect()
}

fn worst(a: &Layout, b: &Layout, alpha: f64) -> f64 {
    discrepancies(a, b, alpha).values().copied().fold(0.0, f64::max)
}

/// Aligns two layouts of the same holes by a rotation and reports how far
/// apart their squares remain.
pub fn layout_compare(a: &Layout, b: &Layout) -> Result<CompareReport> {
    let la: BTreeSet<Label> = a.squares.iter().map(|s| s.label).collect();
    let lb: BTreeSet<Label> = b.squares.iter().map(|s| s.label).collect();
    if la != lb || la.len() != a.squares.len() || lb.len() != b.squares.len() {
        return domain(format!("layouts have different hole labels: {la:?} and {lb:?}"));
    }
    // coarse scan, then golden-section refinement around the best sample
    const SAMPLES: usize = 1440;
    let step = TAU / SAMPLES as f64;
    let mut best = (0.0, worst(a, b, 0.0));
    if !a.squares.is_empty() {
        // candidates also include each square's own alignment
        let exact = a.squares.iter().map(|s| angle_diff(b.square(s.label).expect("labels checked").theta, s.theta));
        for alpha in (0..SAMPLES).map(|k| k as f64 * step).chain(exact) {
            let w = worst(a, b, alpha);
            if w < best.1 {
                best = (alpha, w);
            }
        }
        let (mut lo, mut hi) = (best.0 - step, best.0 + step);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if worst(a, b, m1) <= worst(a, b, m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let mid = (lo + hi) / 2.0;
        let w = worst(a, b, mid);
        if w < best.1 {
            best = (mid, w);
        }
    }
    let rotation = angle_diff(best.0, 0.0);
    let per_label = discrepancies(a, b, rotation);
    let worst_label = per_label.iter().max_by(|x, y| x.1.total_cmp(y.1).then(y.0.cmp(x.0))).map(|(l, _)| *l);
    let log_offset = if a.squares.is_empty() {
        0.0
    } else {
        a.squares.iter().map(|s| b.square(s.label).expect("labels checked").u - s.u).sum::<f64>() / a.squares.len() as f64
    };
    Ok(CompareReport {
        rotation,
        log_offset,
        height_difference: b.h_a - a.h_a,
        discrepancy: per_label.values().copied().fold(0.0, f64::max),
        per_label,
        worst_label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(squares: &[(Label, f64, f64, f64)]) -> Layout {
        Layout {
            version: LAYOUT_VERSION.into(),
            h_a: 1.0,
            inner: 0,
            outer: 1,
            squares: squares.iter().map(|&(label, u, theta, side)| LayoutSquare { label, u, theta, side, degenerate: false }).collect(),
            residual_density_mass: TAU - squares.iter().map(|s| s.3 * s.3).sum::<f64>(),
            modulus: TAU,
            relaxation_distance: 0.0,
            flags: LayoutFlags::default(),
        }
    }

    #[test]
    fn empty_layout_is_all_density() {
        let r = layout_validate(&layout(&[]));
        assert!(r.passed && r.area_residual < 1e-15 && r.min_gap.is_none());
    }

    #[test]
    fn overlap_reported_with_witness() {
        let r = layout_validate(&layout(&[(2, 0.5, 0.0, 0.4), (3, 0.5, 0.3, 0.4), (4, 0.5, 3.0, 0.2)]));
        assert!(!r.passed);
        assert_eq!(r.overlap, Some((2, 3)));
        // overlap across the seam counts too
        let r = layout_validate(&layout(&[(2, 0.5, 0.1, 0.4), (3, 0.5, TAU - 0.1, 0.4)]));
        assert_eq!(r.overlap, Some((2, 3)));
    }

    #[test]
    fn band_violation() {
        let r = layout_validate(&layout(&[(2, 0.1, 0.0, 0.4)]));
        assert_eq!(r.outside_band, vec![2]);
    }

    #[test]
    fn rotation_recovered() {
        let a = layout(&[(2, 0.3, 0.5, 0.4), (3, 0.7, 2.0, 0.3), (4, 0.5, 5.0, 0.2)]);
        let r = layout_compare(&a, &a.rotated(1.0)).unwrap();
        assert!((r.rotation - 1.0).abs() < 1e-9, "{}", r.rotation);
        assert!(r.discrepancy < 1e-9);
    }

    #[test]
    fn perturbation_is_localized() {
        let a = layout(&[(2, 0.3, 0.5, 0.4), (3, 0.7, 2.0, 0.3), (4, 0.5, 5.0, 0.2)]);
        let mut b = a.clone();
        b.squares[1].side = 0.25;
        let r = layout_compare(&a, &b).unwrap();
        assert_eq!(r.worst_label, Some(3));
        assert!((r.discrepancy - 0.05).abs() < 1e-9);
        assert!(r.per_label[&2] < 1e-9 && r.per_label[&4] < 1e-9);
    }

    #[test]
    fn label_mismatch_rejected() {
        let a = layout(&[(2, 0.3, 0.5, 0.4)]);
        let b = layout(&[(5, 0.3, 0.5, 0.4)]);
        assert!(layout_compare(&a, &b).is_err());
    }
}
