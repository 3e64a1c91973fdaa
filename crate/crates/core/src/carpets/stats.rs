use serde::Serialize;

use super::carpet_to_scene;
use super::square_carpet::SquareCarpet;
use crate::diagnostics::{family_separation, quasicircle_constant};
use crate::error::Result;
use crate::geometry::MetricKind;

/// Boundary samples per curve for the quasicircle constant.
pub const STATS_SAMPLES: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct PeripheralStats {
    /// Largest quasicircle constant over all peripheral curves.
    pub k: f64,
    /// Smallest pairwise relative distance; absent with a single curve.
    pub s: Option<f64>,
    pub curves: usize,
}

pub fn peripheral_stats(c: &SquareCarpet) -> Result<PeripheralStats> {
    let scene = carpet_to_scene(c)?;
    let curves: Vec<_> = scene.peripheral_curves()?.into_iter().map(|(_, c)| c).collect();
    let mut k: f64 = 1.0;
    for curve in &curves {
        k = k.max(quasicircle_constant(curve, MetricKind::Euclidean, STATS_SAMPLES)?.k);
    }
    let s = if curves.len() >= 2 { Some(family_separation(&curves, MetricKind::Euclidean)?.s) } else { None };
    Ok(PeripheralStats { k, s, curves: curves.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpets::standard_carpet;

    #[test]
    fn depth_zero_has_no_separation() {
        let st = peripheral_stats(&standard_carpet(0).unwrap()).unwrap();
        assert!(st.s.is_none());
        assert_eq!(st.curves, 1);
    }

    #[test]
    fn self_similar_across_depths() {
        let a = peripheral_stats(&standard_carpet(1).unwrap()).unwrap();
        let b = peripheral_stats(&standard_carpet(2).unwrap()).unwrap();
        assert!((a.s.unwrap() - 0.5f64.sqrt()).abs() < 1e-6);
        assert!((a.s.unwrap() - b.s.unwrap()).abs() < 1e-6);
        assert!((a.k - b.k).abs() < 1e-6);
    }
}
