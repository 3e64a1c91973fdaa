use carpet_modulus::carpets::{CylinderDomain, LogSquare, Scene};
use carpet_modulus::modulus::{discretize, Cell, Grid, transboundary_modulus, Convention, PathFamily, SolverOptions};
use carpet_modulus::uniformizer::{layout_compare, layout_validate, uniformize, uniformize_grid, UniformizeOptions};
use carpet_modulus::validation::reference_cylinder;
use carpet_modulus::Error;
use std::collections::BTreeSet;
use std::f64::consts::TAU;

const H: f64 = 1.0 / 32.0;

fn precise() -> UniformizeOptions {
    UniformizeOptions { solver: SolverOptions::precise(), ..UniformizeOptions::default() }
}

#[test]
fn plain_annulus_height_is_log_ratio() {
    for big_r in [2.0, 3.0, 6.0] {
        let scene = Scene::annulus(1.0, big_r, vec![]).unwrap();
        let l = uniformize(&scene, 0, 1, H, &UniformizeOptions::default()).unwrap();
        let want = f64::ln(big_r);
        assert!((l.h_a - want).abs() <= 0.02 * want, "R = {big_r}: h_A = {} vs {want}", l.h_a);
        assert!((l.h_a * l.modulus - TAU).abs() < 1e-12);
        assert!(l.squares.is_empty());
    }
}

#[test]
fn sides_are_scaled_weights() {
    let scene = reference_cylinder().unwrap().to_scene().unwrap();
    let g = discretize(&scene, H).unwrap();
    let opts = UniformizeOptions::default();
    let l = uniformize_grid(&g, 0, 1, &opts).unwrap();
    let weighted: BTreeSet<u32> = [2, 3].into();
    let r = transboundary_modulus(&g, &PathFamily::between(0, 1, opts.convention), &weighted, &opts.solver).unwrap();
    assert_eq!(l.modulus, r.value);
    for s in &l.squares {
        assert!(s.side >= 0.0);
        assert_eq!(s.side, l.h_a * r.distribution.weight(s.label));
    }
}

#[test]
fn reference_layout_is_valid() {
    let d = reference_cylinder().unwrap();
    let l = uniformize(&d.to_scene().unwrap(), 0, 1, 1.0 / 64.0, &UniformizeOptions::default()).unwrap();
    let report = layout_validate(&l);
    assert!(report.passed, "{report:?}");
    assert!(report.area_residual < 1e-6);
    assert!((l.h_a - d.height()).abs() <= 0.05 * d.height());
    for q in &d.squares {
        let s = l.square(q.label).unwrap();
        assert!((s.side - q.side).abs() <= 0.1 * q.side, "square {}: {} vs {}", q.label, s.side, q.side);
    }
}

fn rotated(d: &CylinderDomain, alpha: f64) -> CylinderDomain {
    let squares = d.squares.iter().map(|q| LogSquare { theta: (q.theta + alpha).rem_euclid(TAU), ..*q }).collect();
    CylinderDomain::new(d.inner_radius, d.outer_radius, squares).unwrap()
}

#[test]
fn rotation_rotates_the_layout() {
    let d = reference_cylinder().unwrap();
    let base = uniformize(&d.to_scene().unwrap(), 0, 1, H, &precise()).unwrap();
    let columns = discretize(&d.to_scene().unwrap(), H).unwrap().nx as f64;
    // whole columns keep the grid aligned with the squares
    for k in [7.0, 50.0] {
        let alpha = k * TAU / columns;
        let turned = uniformize(&rotated(&d, alpha).to_scene().unwrap(), 0, 1, H, &precise()).unwrap();
        let c = layout_compare(&base, &turned).unwrap();
        assert!(c.discrepancy <= 1e-6, "rotation by {alpha}: {c:?}");
        assert!((c.rotation - alpha).abs() < 1e-6 || (c.rotation - alpha).abs() > TAU - 1e-6, "{} vs {alpha}", c.rotation);
    }
}

#[test]
fn relabeling_permutes_squares() {
    let d = reference_cylinder().unwrap();
    let swapped: Vec<LogSquare> =
        d.squares.iter().map(|q| LogSquare { label: if q.label == 2 { 3 } else { 2 }, ..*q }).collect();
    let e = CylinderDomain::new(d.inner_radius, d.outer_radius, swapped).unwrap();
    let a = uniformize(&d.to_scene().unwrap(), 0, 1, H, &precise()).unwrap();
    let b = uniformize(&e.to_scene().unwrap(), 0, 1, H, &precise()).unwrap();
    let mut pa: Vec<(f64, f64)> = a.squares.iter().map(|s| (s.u, s.side)).collect();
    let mut pb: Vec<(f64, f64)> = b.squares.iter().map(|s| (s.u, s.side)).collect();
    pa.sort_by(|x, y| x.1.total_cmp(&y.1));
    pb.sort_by(|x, y| x.1.total_cmp(&y.1));
    for (x, y) in pa.iter().zip(&pb) {
        assert!((x.0 - y.0).abs() <= 1e-9 && (x.1 - y.1).abs() <= 1e-9, "{x:?} vs {y:?}");
    }
}

#[test]
fn unknown_or_equal_boundary_labels_rejected() {
    let scene = reference_cylinder().unwrap().to_scene().unwrap();
    assert!(matches!(uniformize(&scene, 0, 9, H, &UniformizeOptions::default()), Err(Error::Domain(_))));
    assert!(matches!(uniformize(&scene, 1, 1, H, &UniformizeOptions::default()), Err(Error::Domain(_))));
}

#[test]
fn separated_or_touching_boundaries_are_topology_errors() {
    let opts = UniformizeOptions::default();
    let walled = Grid::from_cells(3, 2, vec![Cell::Hole(0), Cell::Exterior, Cell::Hole(1), Cell::Hole(0), Cell::Exterior, Cell::Hole(1)]).unwrap();
    assert!(matches!(uniformize_grid(&walled, 0, 1, &opts), Err(Error::Topology(_))));
    let touching = Grid::from_cells(3, 1, vec![Cell::Hole(0), Cell::Hole(1), Cell::Interior]).unwrap();
    assert!(matches!(uniformize_grid(&touching, 0, 1, &opts), Err(Error::Topology(_))));
}

#[test]
fn open_convention_is_the_default() {
    assert_eq!(UniformizeOptions::default().convention, Convention::Open);
}
