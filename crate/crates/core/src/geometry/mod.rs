//! Metrics on the extended plane, polyline curves and the set functionals
//! built on top of them.

pub mod annulus;
pub mod cross_ratio;
pub mod curve;
pub mod metric;
pub mod point;
pub mod sets;

pub use annulus::Annulus;
pub use cross_ratio::{cross_ratio, eta_lower, eta_upper, modified_cross_ratio, separation_cross_ratio};
pub use curve::{path_length, PolyCurve};
pub use metric::{disk_area, distance, MetricKind};
pub use point::SpherePoint;
pub use sets::{relative_distance, set_diameter, set_distance, PointSet};
