//! Estimators for quasicircle, separation, roundness and fatness constants,
//! and the annulus width algorithms used in decay estimates.

pub mod annulus_width;
pub mod counting;
pub mod fatness;
pub mod quasicircle;
pub mod roundness;
pub mod separation;
pub mod third_point;

pub use annulus_width::{annulus_relative_width, ring_fat_bound, select_subannulus, CompactSet, SubannulusResult};
pub use counting::{count_large_meeting_sets, counting_bound, decay_bound, DEFAULT_COUNTING_C, DEFAULT_DECAY_C};
pub use fatness::{fatness_estimate, FatnessReport};
pub use quasicircle::{quasicircle_constant, QuasicircleReport};
pub use roundness::{quasi_round_fit, RoundnessFit};
pub use separation::{family_separation, separation_sandwich, SeparationReport};
pub use third_point::third_point_select;
