//! Discrete classical, transboundary and carpet modulus of path families on
//! a grid, by constraint generation over a quadratic program, with an
//! exhaustive oracle for small grids.

pub mod family;
pub mod graph;
pub mod grid;
pub mod monotonicity;
pub mod oracle;
pub mod profile;
pub mod qp;
pub mod solver;

pub use family::{Convention, Mode, PathFamily, Selector};
pub use grid::{discretize, Cell, Chart, Grid};
pub use monotonicity::{modulus_monotonicity_suite, monotonicity_suite_for, MonotonicityReport};
pub use oracle::brute_force_modulus;
pub use profile::{loewner_profile, spearman, LoewnerProfile};
pub use solver::{
    admissibility_sum, carpet_modulus, classical_modulus, solve, transboundary_modulus, MassDistribution, ModulusResult,
    SolverOptions, Status,
};
