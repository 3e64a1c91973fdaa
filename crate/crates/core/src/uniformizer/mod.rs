//! Discrete cylinder-with-squares layouts. The extremal transboundary
//! distribution of the family joining two boundary holes gives the height and
//! the square sides; a harmonic potential and its flux place the squares.

pub mod layout;
pub mod potential;

pub use layout::{
    layout_compare, layout_validate, CompareReport, Layout, LayoutFlags, LayoutReport, LayoutSquare, DEFAULT_MIN_SIDE_RATIO,
    LAYOUT_VERSION,
};
pub use potential::{dirichlet_potential, flux_angles, Potential};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::TAU;

use crate::carpets::scene::{Label, Scene};
use crate::error::{domain, Error, Result};
use crate::geometry::point::{angle_diff, wrap_angle};
use crate::modulus::{discretize, solve, Convention, Grid, Mode, PathFamily, SolverOptions, Status};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformizeOptions {
    pub solver: SolverOptions,
    pub convention: Convention,
    /// Relative residual for the potential solve.
    pub cg_tol: f64,
    /// Degenerate squares are those with side below this fraction of `h_A`.
    pub min_side_ratio: f64,
    pub relax_sweeps: usize,
    /// Largest displacement allowed for one square, as a fraction of `h_A`.
    pub relax_budget: f64,
}

impl Default for UniformizeOptions {
    fn default() -> Self {
        UniformizeOptions {
            solver: SolverOptions::default(),
            convention: Convention::Open,
            cg_tol: 1e-8,
            min_side_ratio: DEFAULT_MIN_SIDE_RATIO,
            relax_sweeps: 500,
            relax_budget: 0.25,
        }
    }
}

/// Discretizes the scene at resolution `h` and lays it out; see [`uniformize_grid`].
pub fn uniformize(scene: &Scene, inner: Label, outer: Label, h: f64, opts: &UniformizeOptions) -> Result<Layout> {
    for l in [inner, outer] {
        if !scene.has_label(l) {
            return domain(format!("scene has no hole {l}"));
        }
    }
    uniformize_grid(&discretize(scene, h)?, inner, outer, opts)
}

/// Height from the transboundary modulus `M` of the family joining `inner`
/// to `outer` with every other hole carrying weight, `h_A = 2π/M`; sides
/// `ℓᵢ = h_A ρᵢ`; log-heights `h_A u` from the harmonic potential with
/// `u = 0` on `inner` and `u = 1` on `outer`; angles from its flux. Overlaps
/// left by the heuristic placement are then relaxed.
pub fn uniformize_grid(g: &Grid, inner: Label, outer: Label, opts: &UniformizeOptions) -> Result<Layout> {
    if inner == outer {
        return domain("inner and outer holes must differ");
    }
    let labels = g.labels();
    for l in [inner, outer] {
        if !labels.contains(&l) {
            return domain(format!("hole {l} has no cells"));
        }
    }
    let weighted: BTreeSet<Label> = labels.iter().copied().filter(|&l| l != inner && l != outer).collect();
    let fam = PathFamily::between(inner, outer, opts.convention);
    let r = solve(g, &fam, &Mode::Transboundary(weighted.clone()), &opts.solver)?.checked()?;
    match r.status {
        Status::EmptyFamily => return Err(Error::Topology(format!("holes {inner} and {outer} are not connected"))),
        Status::Infeasible => return Err(Error::Topology(format!("holes {inner} and {outer} touch"))),
        _ => {}
    }
    let h_a = TAU / r.value;

    let p = dirichlet_potential(g, inner, outer, opts.cg_tol)?;
    let angles = flux_angles(g, &p);
    let min_side = opts.min_side_ratio * h_a;
    let mut squares = Vec::with_capacity(weighted.len());
    for &l in &weighted {
        let node = p.graph.hole_node[&l];
        let side = h_a * r.distribution.weight(l);
        squares.push(LayoutSquare {
            label: l,
            u: h_a * p.u[node],
            theta: angles[node].unwrap_or(0.0),
            side,
            degenerate: side < min_side,
        });
    }
    let (distance, unresolved) = relax(&mut squares, h_a, opts);
    Ok(Layout {
        version: LAYOUT_VERSION.into(),
        h_a,
        inner,
        outer,
        squares,
        residual_density_mass: r.distribution.density_mass(g),
        modulus: r.value,
        relaxation_distance: distance,
        flags: LayoutFlags { heuristic_angles: true, relaxed: distance > 0.0, overlap_unresolved: unresolved },
    })
}

/// Moves squares into the band and pushes overlapping pairs apart along the
/// axis of least penetration. Returns the largest displacement and whether
/// overlaps remain.
fn relax(squares: &mut [LayoutSquare], h_a: f64, opts: &UniformizeOptions) -> (f64, bool) {
    let start: Vec<(f64, f64)> = squares.iter().map(|s| (s.u, s.theta)).collect();
    let budget = opts.relax_budget * h_a;
    let fit = |s: &mut LayoutSquare| {
        let half = (s.side / 2.0).min(h_a / 2.0);
        s.u = s.u.clamp(half, h_a - half);
    };
    squares.iter_mut().for_each(fit);
    let mut clear = false;
    for _ in 0..opts.relax_sweeps {
        clear = true;
        for i in 0..squares.len() {
            for j in i + 1..squares.len() {
                let (a, b) = (squares[i], squares[j]);
                if a.degenerate || b.degenerate || a.gap(&b) >= 0.0 {
                    continue;
                }
                clear = false;
                let reach = (a.side + b.side) / 2.0;
                let du = b.u - a.u;
                let dt = angle_diff(b.theta, a.theta);
                let pen_u = reach - du.abs();
                let pen_t = reach - dt.abs();
                // a small margin so the pair ends strictly apart
                let margin = 1e-9 * h_a;
                if pen_t <= pen_u {
                    let push = (pen_t + margin) / 2.0 * if dt >= 0.0 { 1.0 } else { -1.0 };
                    squares[i].theta = wrap_angle(a.theta - push);
                    squares[j].theta = wrap_angle(b.theta + push);
                } else {
                    let push = (pen_u + margin) / 2.0 * if du >= 0.0 { 1.0 } else { -1.0 };
                    squares[i].u -= push;
                    squares[j].u += push;
                    fit(&mut squares[i]);
                    fit(&mut squares[j]);
                }
            }
        }
        if clear {
            break;
        }
    }
    let moved = squares
        .iter()
        .zip(&start)
        .map(|(s, &(u, t))| (s.u - u).abs().max(angle_diff(s.theta, t).abs()))
        .fold(0.0, f64::max);
    (moved, !clear || moved > budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpets::cylinder::{CylinderDomain, LogSquare};

    #[test]
    fn plain_annulus_height() {
        let scene = Scene::annulus(1.0, 2.0, vec![]).unwrap();
        let l = uniformize(&scene, 0, 1, 1.0 / 32.0, &UniformizeOptions::default()).unwrap();
        assert!((l.h_a - 2f64.ln()).abs() < 0.03 * 2f64.ln(), "{}", l.h_a);
        assert!(l.squares.is_empty());
        assert!(layout_validate(&l).passed);
    }

    #[test]
    fn single_square_round_trip() {
        let d = CylinderDomain::new(1.0, 1f64.exp(), vec![LogSquare { label: 2, u: 0.5, theta: 1.0, side: 0.5 }]).unwrap();
        let l = uniformize(&d.to_scene().unwrap(), 0, 1, 1.0 / 32.0, &UniformizeOptions::default()).unwrap();
        let s = l.square(2).unwrap();
        assert!((l.h_a - 1.0).abs() < 0.05, "{}", l.h_a);
        assert!((s.side - 0.5).abs() < 0.05, "{}", s.side);
        assert!((s.u - 0.5).abs() < 0.05, "{}", s.u);
        assert!(angle_diff(s.theta, 1.0).abs() < 0.1, "{}", s.theta);
        assert!(layout_validate(&l).passed);
    }

    #[test]
    fn relaxation_separates_overlap() {
        let mut sq = vec![
            LayoutSquare { label: 2, u: 0.5, theta: 1.0, side: 0.4, degenerate: false },
            LayoutSquare { label: 3, u: 0.5, theta: 1.1, side: 0.4, degenerate: false },
        ];
        let (moved, unresolved) = relax(&mut sq, 1.0, &UniformizeOptions::default());
        assert!(!unresolved && moved > 0.1 && sq[0].gap(&sq[1]) >= 0.0);
    }

    #[test]
    fn same_hole_twice_rejected() {
        let scene = Scene::annulus(1.0, 2.0, vec![]).unwrap();
        assert!(uniformize(&scene, 0, 0, 0.1, &UniformizeOptions::default()).is_err());
    }
}
