//! Extremal length on planar domains with holes: classical, transboundary and
//! carpet modulus, quantitative diagnostics for the peripheral curves of
//! Sierpiński carpets, and discrete cylinder-with-squares layouts.

pub mod carpets;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod modulus;
pub mod uniformizer;
pub mod validation;

pub use error::{Error, Result};
