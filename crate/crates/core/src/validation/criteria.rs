use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{E, TAU};
use std::time::Instant;

use super::cases::random_case;
use crate::carpets::cylinder::{llc_route, CylinderDomain, LogSquare};
use crate::carpets::scene::{circle_polygon, Outer, Scene, Shape};
use crate::carpets::{carpet_to_scene, standard_carpet, tile_fill, CARPET_OUTER_LABEL};
use crate::diagnostics::{annulus_relative_width, fatness_estimate, select_subannulus, separation_sandwich, CompactSet};
use crate::error::{domain, Error, Result};
use crate::geometry::{eta_lower, eta_upper, cross_ratio, modified_cross_ratio, Annulus, MetricKind, PolyCurve, SpherePoint};
use crate::modulus::{
    brute_force_modulus, carpet_modulus, classical_modulus, discretize, solve, transboundary_modulus, Convention, PathFamily, Selector,
    SolverOptions,
};
use crate::uniformizer::{layout_compare, uniformize, Layout, LayoutFlags, LayoutSquare, UniformizeOptions, LAYOUT_VERSION};

/// `fast` trims sample counts; `full` runs every criterion at its stated size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Fast,
    Full,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Suite> {
        match s {
            "fast" => Ok(Suite::Fast),
            "full" => Ok(Suite::Full),
            _ => domain(format!("unknown suite '{s}', expected 'fast' or 'full'")),
        }
    }

    fn pick(self, fast: usize, full: usize) -> usize {
        match self {
            Suite::Fast => fast,
            Suite::Full => full,
        }
    }
}

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "annulus modulus"),
    (2, "rectangle modulus"),
    (3, "transboundary extremal formula"),
    (4, "carpet modulus"),
    (5, "oracle equivalence"),
    (6, "cross-ratio sandwich"),
    (7, "separation sandwich"),
    (8, "subannulus selection"),
    (9, "fatness constants"),
    (10, "LLC router"),
    (11, "uniformizer round trip"),
    (12, "area-identity trend"),
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub detail: String,
    pub seconds: f64,
    /// Wall-clock limit, when the criterion has one.
    pub time_limit: Option<f64>,
}

impl CriterionReport {
    /// One line for terminal output.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {:>2} {:<32} {verdict}  {:.1}s  {}", self.id, self.name, self.seconds, self.detail)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub suite: Suite,
    pub seed: u64,
    pub criteria: Vec<CriterionReport>,
    pub passed: bool,
}

/// Checks and numbers gathered by one criterion.
#[derive(Default)]
struct Outcome {
    ok: bool,
    measured: BTreeMap<String, f64>,
    tolerances: BTreeMap<String, f64>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { ok: true, ..Default::default() }
    }

    fn measure(&mut self, name: &str, v: f64) {
        self.measured.insert(name.into(), v);
    }

    fn tolerance(&mut self, name: &str, v: f64) {
        self.tolerances.insert(name.into(), v);
    }

    fn require(&mut self, cond: bool, failure: impl FnOnce() -> String) {
        if !cond {
            self.ok = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&failure());
        }
    }

    /// `|got − want| ≤ rel·|want|`, recorded under `name`.
    fn within(&mut self, name: &str, got: f64, want: f64, rel: f64) {
        let err = (got - want).abs() / want.abs();
        self.measure(name, got);
        self.measure(&format!("{name}_rel_error"), err);
        self.tolerance(&format!("{name}_rel_error"), rel);
        self.require(err <= rel, || format!("{name} = {got:.6} off {want:.6} by {:.2}%", 100.0 * err));
    }
}

fn time_limit(id: u32, suite: Suite) -> Option<f64> {
    match id {
        1 => Some(if suite == Suite::Full { 180.0 } else { 30.0 }),
        2 => Some(30.0),
        3 | 4 => Some(120.0),
        5 | 11 => Some(300.0),
        12 => Some(600.0),
        _ => None,
    }
}

/// Runs one criterion; errors inside the run are reported as failures.
pub fn run_criterion(id: u32, suite: Suite, seed: u64) -> Result<CriterionReport> {
    let Some(&(_, name)) = CRITERIA.iter().find(|c| c.0 == id) else {
        return domain(format!("no criterion {id}"));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(id as u64));
    let start = Instant::now();
    let run = match id {
        1 => annulus_modulus(suite),
        2 => rectangle_modulus(),
        3 => transboundary_formula(),
        4 => carpet_formula(),
        5 => oracle_equivalence(suite, &mut rng),
        6 => cross_ratio_sandwich(suite, &mut rng),
        7 => continuum_sandwich(suite, &mut rng),
        8 => subannulus(suite, &mut rng),
        9 => fatness_constants(),
        10 => llc_router(suite, &mut rng),
        11 => round_trip(),
        _ => area_trend(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let limit = time_limit(id, suite);
    let mut out = run.unwrap_or_else(|e| Outcome { ok: false, detail: format!("error: {e}"), ..Default::default() });
    if let Some(l) = limit {
        out.require(seconds <= l, || format!("took {seconds:.1}s, limit {l}s"));
    }
    if out.ok && out.detail.is_empty() {
        out.detail = summary(&out.measured);
    }
    Ok(CriterionReport {
        id,
        name: name.into(),
        passed: out.ok,
        measured: out.measured,
        tolerances: out.tolerances,
        detail: out.detail,
        seconds,
        time_limit: limit,
    })
}

fn summary(m: &BTreeMap<String, f64>) -> String {
    m.iter().filter(|(k, _)| !k.ends_with("_rel_error")).map(|(k, v)| {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                format!("{k}={v}")
            } else {
                format!("{k}={v:.6}")
            }
        }).collect::<Vec<_>>().join(" ")
}

/// Runs the selected criteria, or all of them, in order.
pub fn run_suite(suite: Suite, seed: u64, only: Option<&[u32]>) -> Result<ValidationReport> {
    let ids: Vec<u32> = match only {
        Some(ids) => ids.to_vec(),
        None => CRITERIA.iter().map(|c| c.0).collect(),
    };
    let criteria = ids.iter().map(|&id| run_criterion(id, suite, seed)).collect::<Result<Vec<_>>>()?;
    let passed = criteria.iter().all(|c| c.passed);
    Ok(ValidationReport { suite, seed, criteria, passed })
}

fn annulus_modulus(suite: Suite) -> Result<Outcome> {
    let mut out = Outcome::new();
    let scene = Scene::annulus(1.0, E, vec![])?;
    let mut runs = vec![(64u32, 0.03)];
    if suite == Suite::Full {
        runs.push((128, 0.015));
    }
    for (n, tol) in runs {
        let g = discretize(&scene, 1.0 / n as f64)?;
        let r = classical_modulus(&g, &PathFamily::between(0, 1, Convention::Open), &SolverOptions::default())?.checked()?;
        out.within(&format!("modulus_h1_{n}"), r.value, TAU, tol);
    }
    Ok(out)
}

fn rectangle_modulus() -> Result<Outcome> {
    let mut out = Outcome::new();
    let h = 1.0 / 64.0;
    let square = PolyCurve::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], true)?;
    let scene = Scene::new(Outer::Curve { curve: square, label: None }, vec![], MetricKind::Euclidean)?;
    let g = discretize(&scene, h)?;
    let fam = PathFamily::new(
        Selector::Rect { min: (0.0, 0.0), max: (h, 1.0) },
        Selector::Rect { min: (1.0 - h, 0.0), max: (1.0, 1.0) },
        Convention::Closed,
    );
    let r = classical_modulus(&g, &fam, &SolverOptions::default())?.checked()?;
    out.within("modulus", r.value, 1.0, 0.03);
    Ok(out)
}

/// The cylinder of height 1 with two squares of sides 0.4 and 0.6.
pub fn reference_cylinder() -> Result<CylinderDomain> {
    CylinderDomain::new(
        1.0,
        E,
        vec![LogSquare { label: 2, u: 0.5, theta: 0.0, side: 0.4 }, LogSquare { label: 3, u: 0.5, theta: 3.14, side: 0.6 }],
    )
}

const CYLINDER_H: f64 = 1.0 / 64.0;

fn transboundary_formula() -> Result<Outcome> {
    let mut out = Outcome::new();
    let d = reference_cylinder()?;
    let g = discretize(&d.to_scene()?, CYLINDER_H)?;
    let weighted: BTreeSet<_> = d.squares.iter().map(|q| q.label).collect();
    let r = transboundary_modulus(&g, &PathFamily::between(0, 1, Convention::Open), &weighted, &SolverOptions::default())?.checked()?;
    out.within("modulus", r.value, TAU / d.height(), 0.05);
    for q in &d.squares {
        out.within(&format!("weight_{}", q.label), r.distribution.weight(q.label), q.side / d.height(), 0.10);
    }
    Ok(out)
}

fn carpet_formula() -> Result<Outcome> {
    let mut out = Outcome::new();
    let d = reference_cylinder()?;
    let filled = tile_fill(&d.to_scene()?, CYLINDER_H)?;
    let g = discretize(&filled, CYLINDER_H)?;
    let r = carpet_modulus(&g, &PathFamily::between(0, 1, Convention::Open), &SolverOptions::default())?.checked()?;
    out.within("modulus", r.value, TAU / d.height(), 0.10);
    out.measure("holes", filled.holes.len() as f64);
    for l in [0, 1] {
        let w = r.distribution.weight(l);
        out.measure(&format!("weight_{l}"), w);
        out.require(w == 0.0, || format!("boundary weight {l} is {w}"));
    }
    Ok(out)
}

fn oracle_equivalence(suite: Suite, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const MAX_SIDE: usize = 12;
    const TOL: f64 = 1e-6;
    let mut out = Outcome::new();
    let total = suite.pick(24, 50);
    let mut worst: f64 = 0.0;
    let mut redraws = 0;
    let mut per_mode = [0usize; 3];
    let mut k = 0;
    while k < total {
        let mode = k % 3;
        let case = random_case(rng, mode, MAX_SIDE);
        let oracle = match brute_force_modulus(&case.grid, &case.family, &case.mode) {
            Ok(r) => r,
            Err(Error::Resource(_)) => {
                redraws += 1;
                if redraws > 50 * total {
                    return Err(Error::Resource("too few enumerable cases".into()));
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let got = solve(&case.grid, &case.family, &case.mode, &SolverOptions::precise())?.checked()?;
        let diff = if oracle.value.is_infinite() && got.value.is_infinite() { 0.0 } else { (oracle.value - got.value).abs() };
        worst = worst.max(diff);
        out.require(diff <= TOL, || format!("{}: oracle {} solver {}", super::cases::describe(&case), oracle.value, got.value));
        per_mode[mode] += 1;
        k += 1;
    }
    out.measure("cases", total as f64);
    out.measure("redraws", redraws as f64);
    out.measure("worst_abs_diff", worst);
    for (m, name) in ["classical", "transboundary", "carpet"].iter().enumerate() {
        out.measure(&format!("cases_{name}"), per_mode[m] as f64);
    }
    out.tolerance("abs_diff", TOL);
    Ok(out)
}

/// A point spread over many scales around the origin; the chordal metric also
/// sees the point at infinity now and then.
fn random_point(rng: &mut ChaCha8Rng, m: MetricKind) -> SpherePoint {
    if m == MetricKind::Chordal && rng.gen_bool(0.01) {
        return SpherePoint::Infinity;
    }
    let r = 10f64.powf(rng.gen_range(-2.0..2.0));
    SpherePoint::from_complex(Complex64::from_polar(r, rng.gen_range(0.0..TAU)))
}

fn cross_ratio_sandwich(suite: Suite, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    // rounding slack on a comparison of two computed ratios
    const SLACK: f64 = 1e-12;
    let mut out = Outcome::new();
    let n = suite.pick(10_000, 100_000);
    for m in MetricKind::ALL {
        let mut violations = 0;
        let mut done = 0;
        while done < n {
            let x: Vec<SpherePoint> = (0..4).map(|_| random_point(rng, m)).collect();
            let (Ok(c), Ok(v)) = (cross_ratio(&x[0], &x[1], &x[2], &x[3], m), modified_cross_ratio(&x[0], &x[1], &x[2], &x[3], m)) else {
                continue;
            };
            if v < eta_lower(c) * (1.0 - SLACK) || v > eta_upper(c) * (1.0 + SLACK) {
                violations += 1;
            }
            done += 1;
        }
        out.measure(&format!("violations_{}", m.name()), violations as f64);
        out.require(violations == 0, || format!("{violations} violations in the {} metric", m.name()));
    }
    out.measure("tuples_per_metric", n as f64);
    out.tolerance("rounding_slack", SLACK);
    Ok(out)
}

/// A random polyline of two to four vertices inside a box at `center` of size `scale`.
fn random_continuum(rng: &mut ChaCha8Rng, center: Complex64, scale: f64) -> Result<PolyCurve> {
    let k = rng.gen_range(2..=4);
    let v: Vec<SpherePoint> = (0..k)
        .map(|_| SpherePoint::from_complex(center + scale * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    PolyCurve::open(v)
}

fn continuum_sandwich(suite: Suite, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const SAMPLES: usize = 16;
    const TOL: f64 = 1e-3;
    let mut out = Outcome::new();
    let n = suite.pick(200, 1000);
    let mut violations = 0;
    let mut worst_low: f64 = f64::INFINITY;
    let mut worst_high: f64 = 0.0;
    let mut done = 0;
    while done < n {
        let m = MetricKind::ALL[done % 3];
        // keep clear of 0 so that the flat metric stays finite
        let c1 = Complex64::from_polar(rng.gen_range(1.0..3.0), rng.gen_range(0.0..TAU));
        let c2 = Complex64::from_polar(rng.gen_range(1.0..3.0), rng.gen_range(0.0..TAU));
        let (s1, s2) = (rng.gen_range(0.05..0.5), rng.gen_range(0.05..0.5));
        let (Ok(a), Ok(b)) = (random_continuum(rng, c1, s1), random_continuum(rng, c2, s2)) else {
            continue;
        };
        let (Ok(e), Ok(f)) = (a.sample_uniform(SAMPLES), b.sample_uniform(SAMPLES)) else { continue };
        if e.iter().chain(&f).any(|z| z.norm() < 0.1) {
            continue;
        }
        let e: Vec<SpherePoint> = e.into_iter().map(SpherePoint::from_complex).collect();
        let f: Vec<SpherePoint> = f.into_iter().map(SpherePoint::from_complex).collect();
        let Ok((delta, d)) = separation_sandwich(&e, &f, m) else { continue };
        worst_low = worst_low.min(d / delta);
        worst_high = worst_high.max(d / delta);
        if d < delta * (1.0 - TOL) || d > 2.0 * delta * (1.0 + TOL) {
            violations += 1;
        }
        done += 1;
    }
    out.measure("pairs", n as f64);
    out.measure("violations", violations as f64);
    out.measure("min_ratio", worst_low);
    out.measure("max_ratio", worst_high);
    out.tolerance("sampling", TOL);
    out.require(violations == 0, || format!("{violations} pairs outside Δ ≤ D ≤ 2Δ"));
    Ok(out)
}

/// Disjoint disks spread over the scales of an annulus `1 < |z| < e^w`.
fn fat_disks(rng: &mut ChaCha8Rng, w: f64) -> Vec<(u32, CompactSet)> {
    let count = rng.gen_range(3..=30);
    let mut disks: Vec<(Complex64, f64)> = Vec::new();
    let mut tries = 0;
    while disks.len() < count && tries < 1000 {
        tries += 1;
        let rho = rng.gen_range(-1.0..w + 1.0f64).exp();
        let c = Complex64::from_polar(rho, rng.gen_range(0.0..TAU));
        let r = rho * rng.gen_range(0.05..0.95);
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

/// `w^(1/3)` applied `k` times.
fn cube_roots(w: f64, k: usize) -> f64 {
    (0..k).fold(w, |x, _| x.powf(1.0 / 3.0))
}

fn subannulus(suite: Suite, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const MU: f64 = 0.25;
    let mut out = Outcome::new();
    let n = suite.pick(30, 100);
    let mut most_steps = 0;
    for _ in 0..n {
        let w: f64 = rng.gen_range(1.0..=20.0);
        let a = Annulus::new(SpherePoint::origin(), 1.0, w.exp(), MetricKind::Euclidean)?;
        let sets = fat_disks(rng, w);
        let r = select_subannulus(&a, &sets, MU)?;
        most_steps = most_steps.max(r.steps);
        let w2 = r.annulus.width();
        out.require(r.steps <= r.bound, || format!("{} steps above {}", r.steps, r.bound));
        out.require(w2 >= cube_roots(w, r.bound), || format!("width {w2} below the bound for w = {w}"));
        out.require(w2 >= cube_roots(w, r.steps), || format!("width {w2} below w^(1/3^{}) for w = {w}", r.steps));
        let cap = w2.powf(1.0 / 3.0);
        for (label, k) in &sets {
            if r.removed.contains(label) {
                continue;
            }
            let wk = annulus_relative_width(&r.annulus, k)?;
            out.require(wk <= cap, || format!("set {label} keeps width {wk} > {cap}"));
        }
    }
    out.measure("configurations", n as f64);
    out.measure("most_steps", most_steps as f64);
    out.tolerance("steps_bound", 64.0);
    Ok(out)
}

fn fatness_constants() -> Result<Outcome> {
    const TRIALS: usize = 64;
    let mut out = Outcome::new();
    let mut disk_mu: f64 = f64::INFINITY;
    for (c, r) in [(Complex64::new(0.2, 0.1), 0.5), (Complex64::new(-1.0, 2.0), 1.5), (Complex64::new(3.0, 0.0), 0.2)] {
        let f = fatness_estimate(&circle_polygon(c, r, 256)?, MetricKind::Chordal, TRIALS)?;
        disk_mu = disk_mu.min(f.mu);
    }
    let mut square_mu: f64 = f64::INFINITY;
    for (u, t, s) in [(0.0, 0.0, 0.5), (1.0, 2.0, 1.0), (-0.5, 4.0, 0.2)] {
        let f = fatness_estimate(&Shape::cstar_square(u, t, s)?.boundary()?, MetricKind::Flat, TRIALS)?;
        square_mu = square_mu.min(f.mu);
    }
    out.measure("disk_mu", disk_mu);
    out.measure("cstar_square_mu", square_mu);
    out.tolerance("disk_mu_min", 0.25 - 0.02);
    out.tolerance("cstar_square_mu_min", 1.0 / 32.0 - 0.005);
    out.require(disk_mu >= 0.25 - 0.02, || format!("disk μ {disk_mu}"));
    out.require(square_mu >= 1.0 / 32.0 - 0.005, || format!("ℂ*-square μ {square_mu}"));
    Ok(out)
}

/// A cylinder `1 < |z| < e^H` with five disjoint squares.
fn five_square_cylinder(rng: &mut ChaCha8Rng) -> CylinderDomain {
    loop {
        let height = rng.gen_range(1.0..3.0);
        let squares: Vec<LogSquare> = (0..5)
            .map(|i| {
                let side = rng.gen_range(0.1..0.45 * height);
                let u = rng.gen_range(side / 2.0 + 0.02..height - side / 2.0 - 0.02);
                LogSquare { label: i + 2, u, theta: rng.gen_range(0.0..TAU), side }
            })
            .collect();
        if let Ok(d) = CylinderDomain::new(1.0, height.exp(), squares) {
            return d;
        }
    }
}

fn llc_router(suite: Suite, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const BOUND: f64 = 2.0 + 1e-3;
    const PAIRS_PER_DOMAIN: usize = 50;
    let mut out = Outcome::new();
    let n = suite.pick(200, 1000);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < n {
        let d = five_square_cylinder(rng);
        let h = d.height();
        let point = |rng: &mut ChaCha8Rng| loop {
            let (u, t) = (rng.gen_range(0.0..h), rng.gen_range(0.0..TAU));
            if u > 0.0 && d.in_complement(u, t) {
                return SpherePoint::from_log(u, t);
            }
        };
        for _ in 0..PAIRS_PER_DOMAIN.min(n - done) {
            let (x, y) = (point(rng), point(rng));
            let r = llc_route(&d, &x, &y)?;
            worst = worst.max(r.factor);
            out.require(r.factor <= BOUND, || format!("factor {} between {x:?} and {y:?}", r.factor));
            done += 1;
        }
    }
    out.measure("pairs", n as f64);
    out.measure("worst_factor", worst);
    out.tolerance("factor", BOUND);
    Ok(out)
}

/// The layout a cylinder domain already is.
pub fn layout_of(d: &CylinderDomain) -> Layout {
    let h = d.height();
    Layout {
        version: LAYOUT_VERSION.into(),
        h_a: h,
        inner: 0,
        outer: 1,
        squares: d
            .squares
            .iter()
            .map(|q| LayoutSquare { label: q.label, u: q.u - d.log_inner(), theta: q.theta, side: q.side, degenerate: false })
            .collect(),
        residual_density_mass: (TAU * h - d.squares_area()) / (h * h),
        modulus: TAU / h,
        relaxation_distance: 0.0,
        flags: LayoutFlags::default(),
    }
}

fn round_trip() -> Result<Outcome> {
    let mut out = Outcome::new();
    let d = CylinderDomain::new(
        1.0,
        E,
        vec![
            LogSquare { label: 2, u: 0.5, theta: 0.0, side: 0.4 },
            LogSquare { label: 3, u: 0.5, theta: 3.14, side: 0.6 },
            LogSquare { label: 4, u: 0.3, theta: 1.6, side: 0.3 },
        ],
    )?;
    let scene = d.to_scene()?;
    let want = layout_of(&d);
    let mut layouts = Vec::new();
    for seed in [0, 1] {
        let mut opts = UniformizeOptions::default();
        opts.solver.seed = seed;
        layouts.push(uniformize(&scene, 0, 1, CYLINDER_H, &opts)?);
    }
    let got = &layouts[0];
    out.within("h_a", got.h_a, want.h_a, 0.05);
    for q in &want.squares {
        let s = got.square(q.label).ok_or_else(|| Error::Internal(format!("square {} missing", q.label)))?;
        out.within(&format!("side_{}", q.label), s.side, q.side, 0.10);
    }
    let c = layout_compare(&want, got)?;
    out.measure("rotation", c.rotation);
    out.measure("discrepancy_to_input", c.discrepancy);
    let seeds = layout_compare(&layouts[0], &layouts[1])?;
    let spread = seeds.discrepancy.max(seeds.height_difference.abs());
    out.measure("seed_discrepancy", spread);
    out.tolerance("seed_discrepancy", 0.05 * got.h_a);
    out.require(spread <= 0.05 * got.h_a, || format!("seeds differ by {spread}"));
    Ok(out)
}

/// Finest resolution any depth needs: a third of the smallest depth-3 square.
const CARPET_H: f64 = 1.0 / 81.0;

fn area_trend() -> Result<Outcome> {
    let mut out = Outcome::new();
    let mut fractions = Vec::new();
    for depth in 1..=3 {
        let scene = carpet_to_scene(&standard_carpet(depth)?)?;
        let l = uniformize(&scene, 0, CARPET_OUTER_LABEL, CARPET_H, &UniformizeOptions::default())?;
        let f = l.residual_fraction();
        out.measure(&format!("residual_fraction_depth_{depth}"), f);
        out.measure(&format!("squares_depth_{depth}"), l.squares.len() as f64);
        fractions.push(f);
    }
    for w in fractions.windows(2) {
        out.require(w[1] < w[0], || format!("residual fractions {fractions:?} do not strictly decrease"));
    }
    Ok(out)
}
