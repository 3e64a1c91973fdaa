//! Concrete domains: the standard square carpet, cylinders with ℂ*-squares,
//! general hole scenes, and the LLC checks and router on them.

pub mod cylinder;
pub mod fill;
pub mod llc;
pub mod scene;
pub mod square_carpet;
pub mod stats;

pub use cylinder::{cylinder_domain, llc_route, CylinderDomain, LlcRoute, LogChart, LogSquare};
pub use fill::tile_fill;
pub use llc::{llc_check, LlcReport};
pub use scene::{circle_polygon, Hole, Label, Outer, Scene, Shape};
pub use square_carpet::{standard_carpet, RemovedSquare, SquareCarpet, MAX_DEPTH};
pub use stats::{peripheral_stats, PeripheralStats};

use crate::error::Result;
use crate::geometry::{MetricKind, PolyCurve};

/// Label of the unit-square boundary in a carpet scene.
pub const CARPET_OUTER_LABEL: Label = 1;

/// Label of the removed square with construction index `j`: the middle square
/// is 0, the outer boundary takes 1, and later squares follow from 2.
pub fn carpet_hole_label(j: usize) -> Label {
    if j == 0 {
        0
    } else {
        j as Label + 1
    }
}

/// The carpet as a euclidean scene: the unit square with every removed square
/// as a hole, in construction order.
pub fn carpet_to_scene(c: &SquareCarpet) -> Result<Scene> {
    let outer = PolyCurve::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], true)?;
    let holes = c
        .removed
        .iter()
        .enumerate()
        .map(|(j, q)| {
            let (x, y) = q.corner();
            let s = q.side();
            let curve = PolyCurve::from_xy(&[(x, y), (x + s, y), (x + s, y + s), (x, y + s)], true)?;
            Ok(Hole { label: carpet_hole_label(j), shape: Shape::polygon(curve)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Scene::new(Outer::Curve { curve: outer, label: Some(CARPET_OUTER_LABEL) }, holes, MetricKind::Euclidean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carpet_scene_labels() {
        let s = carpet_to_scene(&standard_carpet(2).unwrap()).unwrap();
        assert_eq!(s.holes.len(), 9);
        assert_eq!(s.holes[0].label, 0);
        assert_eq!(s.holes[1].label, 2);
        assert_eq!(s.labels(), (0..=9).collect::<Vec<_>>());
        assert_eq!(carpet_to_scene(&standard_carpet(1).unwrap()).unwrap().holes.len(), 1);
    }
}
