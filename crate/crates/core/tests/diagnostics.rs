use carpet_modulus::carpets::{carpet_to_scene, circle_polygon, standard_carpet, Hole, Outer, Scene, Shape};
use carpet_modulus::diagnostics::{
    annulus_relative_width, count_large_meeting_sets, counting_bound, decay_bound, family_separation, fatness_estimate,
    quasi_round_fit, quasicircle_constant, ring_fat_bound, select_subannulus, CompactSet, DEFAULT_COUNTING_C, DEFAULT_DECAY_C,
};
use carpet_modulus::geometry::{distance, Annulus, MetricKind, PolyCurve, SpherePoint};
use carpet_modulus::modulus::{discretize, transboundary_modulus, Convention, PathFamily, SolverOptions};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::f64::consts::{E, TAU};

fn ellipse(c: Complex64, a: f64, b: f64, tilt: f64, n: usize) -> PolyCurve {
    let rot = Complex64::from_polar(1.0, tilt);
    let v = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            SpherePoint::from_complex(c + rot * Complex64::new(a * t.cos(), b * t.sin()))
        })
        .collect();
    PolyCurve::jordan(v).unwrap()
}

/// Star-shaped polygon with radii in `[1, 2]` around `c`.
fn star(c: Complex64, radii: &[f64]) -> PolyCurve {
    let n = radii.len();
    let v = radii
        .iter()
        .enumerate()
        .map(|(k, r)| SpherePoint::from_complex(c + Complex64::from_polar(*r, TAU * k as f64 / n as f64)))
        .collect();
    PolyCurve::jordan(v).unwrap()
}

fn on_curve(p: &SpherePoint, c: &PolyCurve) -> bool {
    let z = p.finite().unwrap();
    c.finite_segments().unwrap().iter().any(|&(a, b)| carpet_modulus::geometry::curve::point_segment_distance(z, a, b) < 1e-9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quasicircle_constant_at_least_one(radii in prop::collection::vec(1.0f64..2.0, 5..12)) {
        let c = star(Complex64::new(0.3, -0.2), &radii);
        let r = quasicircle_constant(&c, MetricKind::Euclidean, 64).unwrap();
        prop_assert!(r.k >= 1.0);
        prop_assert!(on_curve(&r.witness.0, &c) && on_curve(&r.witness.1, &c));
    }

    #[test]
    fn quasicircle_similarity_invariant(radii in prop::collection::vec(1.0f64..2.0, 5..10), scale in 0.1f64..10.0, angle in 0.0f64..TAU, shift in (-5.0f64..5.0, -5.0f64..5.0)) {
        let c = star(Complex64::new(0.0, 0.0), &radii);
        let a = Complex64::from_polar(scale, angle);
        let moved = c.map(|z| a * z + Complex64::new(shift.0, shift.1)).unwrap();
        let k0 = quasicircle_constant(&c, MetricKind::Euclidean, 48).unwrap().k;
        let k1 = quasicircle_constant(&moved, MetricKind::Euclidean, 48).unwrap().k;
        prop_assert!((k0 - k1).abs() <= 1e-9 * k0, "{} vs {}", k0, k1);
    }

    #[test]
    fn round_fit_sandwiches_the_boundary(radii in prop::collection::vec(1.0f64..2.0, 5..12)) {
        let c = star(Complex64::new(1.0, 2.0), &radii);
        let fit = quasi_round_fit(&c, MetricKind::Euclidean).unwrap();
        prop_assert!(fit.lambda >= 1.0);
        for v in c.vertices() {
            let d = distance(v, &fit.center, MetricKind::Euclidean).unwrap();
            prop_assert!(d <= fit.r * (1.0 + 1e-9));
            prop_assert!(d >= fit.r / fit.lambda * (1.0 - 1e-9));
        }
    }

    #[test]
    fn ellipse_fatness_bounded_below(ratio in 1.0f64..4.0, tilt in 0.0f64..TAU) {
        let c = ellipse(Complex64::new(0.5, -0.5), ratio, 1.0, tilt, 96);
        let mu = fatness_estimate(&c, MetricKind::Euclidean, 32).unwrap().mu;
        prop_assert!(mu > 0.0 && mu <= 1.0);
        prop_assert!(mu >= 0.2 / ratio, "μ = {} for axis ratio {}", mu, ratio);
    }

    #[test]
    fn disjoint_circles_are_separated(gap in 0.01f64..3.0, r in 0.1f64..2.0) {
        let a = circle_polygon(Complex64::new(0.0, 0.0), 1.0, 64).unwrap();
        let b = circle_polygon(Complex64::new(1.0 + gap + r, 0.0), r, 64).unwrap();
        prop_assert!(family_separation(&[a, b], MetricKind::Euclidean).unwrap().s > 0.0);
    }

    #[test]
    fn fat_disks_across_an_annulus(seed in any::<u64>(), w in 1.0f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Annulus::new(SpherePoint::origin(), 1.0, w.exp(), MetricKind::Euclidean).unwrap();
        let sets = random_disks(&mut rng, w, 40);
        // a set meets both complementary components when it reaches inside r and outside R
        let crossing = sets
            .iter()
            .filter(|(_, k)| {
                let (lo, hi) = k.distance_range(&SpherePoint::origin(), MetricKind::Euclidean).unwrap();
                lo <= a.inner && hi >= a.outer
            })
            .count();
        prop_assert!(crossing <= ring_fat_bound(0.25).unwrap());
    }

    #[test]
    fn subannulus_clauses(seed in any::<u64>(), w in 1.0f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Annulus::new(SpherePoint::origin(), 1.0, w.exp(), MetricKind::Euclidean).unwrap();
        let sets = random_disks(&mut rng, w, 30);
        let r = select_subannulus(&a, &sets, 0.25).unwrap();
        prop_assert!(r.annulus.inner >= a.inner && r.annulus.outer <= a.outer);
        prop_assert!(r.steps <= r.bound && r.steps == r.removed.len());
        let w2 = r.annulus.width();
        prop_assert!(w2 >= (0..r.steps).fold(w, |x, _| x.powf(1.0 / 3.0)));
        for (label, k) in &sets {
            if !r.removed.contains(label) {
                prop_assert!(annulus_relative_width(&r.annulus, k).unwrap() <= w2.powf(1.0 / 3.0));
            }
        }
    }
}

fn random_disks(rng: &mut ChaCha8Rng, w: f64, count: usize) -> Vec<(u32, CompactSet)> {
    let mut disks: Vec<(Complex64, f64)> = Vec::new();
    for _ in 0..count * 20 {
        if disks.len() == count {
            break;
        }
        let rho = rng.gen_range(-1.0..w + 1.0f64).exp();
        let c = Complex64::from_polar(rho, rng.gen_range(0.0..TAU));
        let r = rho * rng.gen_range(0.05..1.5);
        if disks.iter().all(|&(c2, r2)| (c - c2).norm() > r + r2) {
            disks.push((c, r));
        }
    }
    disks
        .into_iter()
        .enumerate()
        .map(|(i, (c, r))| (i as u32 + 2, CompactSet::Disk { center: SpherePoint::from_complex(c), radius: r }))
        .collect()
}

#[test]
fn circle_constant_near_one() {
    let c = circle_polygon(Complex64::new(2.0, 1.0), 3.0, 512).unwrap();
    let k = quasicircle_constant(&c, MetricKind::Euclidean, 256).unwrap().k;
    assert!((k - 1.0).abs() < 1e-3, "k = {k}");
}

#[test]
fn carpet_squares_obey_the_counting_bound() {
    let scene = carpet_to_scene(&standard_carpet(3).unwrap()).unwrap();
    let curves: Vec<PolyCurve> = scene.holes.iter().map(|h| h.shape.boundary().unwrap()).collect();
    let m = MetricKind::Euclidean;
    let s = family_separation(&curves, m).unwrap().s;
    let sets: Vec<(u32, CompactSet)> = scene
        .holes
        .iter()
        .map(|h| (h.label, CompactSet::Points(h.shape.boundary().unwrap().densify(m, 1e-2).unwrap())))
        .collect();
    for t in [0.5, 1.0, 2.0] {
        let bound = counting_bound(s, t, DEFAULT_COUNTING_C).unwrap();
        for (_, a) in &sets {
            let n = count_large_meeting_sets(a, &sets, t, m).unwrap() as f64;
            assert!(n <= bound, "{n} sets above {bound} at t = {t}");
        }
    }
}

/// A small disk and a disk of any size at opposite ends of a 3×1.5 box, at
/// relative distance beyond `4e`, with a few fat disks around them carrying
/// weights.
fn separated_configuration(rng: &mut ChaCha8Rng) -> (Scene, f64) {
    let outer = PolyCurve::from_xy(&[(0.0, 0.0), (3.0, 0.0), (3.0, 1.5), (0.0, 1.5)], true).unwrap();
    loop {
        let (ra, rb) = (rng.gen_range(0.0625..0.08), rng.gen_range(0.0625..0.45));
        let ca = Complex64::new(rng.gen_range(0.2..0.6), rng.gen_range(0.3..1.2));
        let cb = Complex64::new(rng.gen_range(2.2..2.5), rng.gen_range(0.6..0.9));
        let t = ((ca - cb).norm() - ra - rb) / (2.0 * ra.min(rb));
        if t <= 4.0 * E * 1.02 {
            continue;
        }
        let mut disks = vec![(ca, ra), (cb, rb)];
        let extra = rng.gen_range(0..=5);
        for _ in 0..200 {
            if disks.len() == 2 + extra {
                break;
            }
            let r = rng.gen_range(0.07..0.2);
            let c = Complex64::new(rng.gen_range(r + 0.1..3.0 - r - 0.1), rng.gen_range(r + 0.1..1.5 - r - 0.1));
            if disks.iter().all(|&(c2, r2)| (c - c2).norm() > r + r2 + 0.1) {
                disks.push((c, r));
            }
        }
        let holes = disks.iter().enumerate().map(|(i, &(c, r))| Hole { label: i as u32, shape: Shape::disk(c, r).unwrap() }).collect();
        let outer = Outer::Curve { curve: outer.clone(), label: None };
        return (Scene::new(outer, holes, MetricKind::Euclidean).unwrap(), t);
    }
}

/// Freezes the default decay constant: it must dominate the transboundary
/// modulus of the family joining two separated holes on random configurations.
#[test]
fn decay_constant_calibration() {
    const CONFIGURATIONS: usize = 50;
    const H: f64 = 1.0 / 32.0;
    const MU: f64 = 0.25;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..CONFIGURATIONS {
        let (scene, t) = separated_configuration(&mut rng);
        let g = discretize(&scene, H).unwrap();
        let weighted: BTreeSet<u32> = g.labels().into_iter().filter(|&l| l >= 2).collect();
        let fam = PathFamily::between(0, 1, Convention::Open);
        // the reported value is admissible, so a loose gap only overestimates
        let opts = SolverOptions { eps: 1e-2, ..SolverOptions::default() };
        let m = transboundary_modulus(&g, &fam, &weighted, &opts).unwrap().checked().unwrap();
        let shape = decay_bound(t, MU, 1.0).unwrap();
        worst = worst.max(m.value / shape);
    }
    println!("largest modulus / decay shape: {worst:.4}, constant {DEFAULT_DECAY_C}");
    assert!(worst > 0.5, "calibration configurations too weak: {worst}");
    assert!(worst <= DEFAULT_DECAY_C, "constant {DEFAULT_DECAY_C} below observed {worst}");
}

#[test]
fn fat_bound_values() {
    assert_eq!(ring_fat_bound(0.25).unwrap(), 64);
    assert_eq!(ring_fat_bound(1.0).unwrap(), 4);
    assert!(ring_fat_bound(0.0).is_err());
    assert!(decay_bound(4.0 * E * 2.0, 1.0, DEFAULT_DECAY_C).unwrap() < DEFAULT_DECAY_C);
}
