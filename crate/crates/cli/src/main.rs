use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::io::Write;
use std::process::ExitCode;

use carpet_modulus::carpets::cylinder::{CylinderDomain, LogSquare};
use carpet_modulus::carpets::scene::{Label, Outer, Scene, Shape};
use carpet_modulus::carpets::{carpet_to_scene, standard_carpet};
use carpet_modulus::diagnostics::{
    fatness_estimate, family_separation, quasi_round_fit, quasicircle_constant, select_subannulus, CompactSet,
};
use carpet_modulus::geometry::{Annulus, MetricKind, SpherePoint};
use carpet_modulus::io::{emit_scene, layout_svg, parse_scene, to_canonical_json, to_canonical_value, to_csv, Config};
use carpet_modulus::modulus::{brute_force_modulus, discretize, solve, Convention, Mode, PathFamily, Selector, Status};
use carpet_modulus::uniformizer::{layout_validate, uniformize};
use carpet_modulus::validation::{run_suite, Suite};
use carpet_modulus::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_CONVERGENCE: u8 = 2;
const EXIT_TOPOLOGY: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser)]
#[command(name = "carpet-modulus", version, about = "Transboundary modulus, carpet diagnostics and cylinder uniformization")]
struct Cli {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a scene file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Modulus of a path family in a scene.
    Modulus(ModulusArgs),
    /// Cylinder-with-squares layout of a scene.
    Uniformize(UniformizeArgs),
    /// Quasicircle, roundness, fatness and separation estimates.
    Diagnose(DiagnoseArgs),
    /// Run the acceptance criteria.
    Validate(ValidateArgs),
}

#[derive(Subcommand)]
enum GenKind {
    /// Standard square carpet truncated at a depth.
    Carpet {
        #[arg(long)]
        depth: u32,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Round annulus `r < |z| < R` carrying ℂ*-squares, inner radius 1.
    Cylinder {
        /// Height `log(R/r)`.
        #[arg(long)]
        h: f64,
        /// Comma-separated `side@u:theta`, with `u` the log-height of the center.
        #[arg(long, default_value = "")]
        squares: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Round annulus without holes.
    Annulus {
        #[arg(long = "r")]
        inner: f64,
        #[arg(long = "R")]
        outer: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Classical,
    Transboundary,
    Carpet,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Open,
    Closed,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Open => Convention::Open,
            ConventionArg::Closed => Convention::Closed,
        }
    }
}

#[derive(Args)]
struct ModulusArgs {
    scene: PathBuf,
    #[arg(long, value_enum, default_value = "transboundary")]
    mode: ModeArg,
    /// Start set: `label:N`, `rect:x0,y0,x1,y1` or a bare label.
    #[arg(long, default_value = "0")]
    from: String,
    /// End set, same forms as `--from`.
    #[arg(long, default_value = "1")]
    to: String,
    /// Weight-bearing holes for the transboundary mode; all holes not used as ends by default.
    #[arg(long, value_delimiter = ',')]
    weighted: Option<Vec<Label>>,
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    /// Grid resolution; the configuration's by default.
    #[arg(long)]
    h: Option<f64>,
    /// Also run the exhaustive oracle and report the difference.
    #[arg(long)]
    oracle: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UniformizeArgs {
    scene: PathBuf,
    #[arg(long, default_value_t = 0)]
    inner: Label,
    #[arg(long, default_value_t = 1)]
    outer: Label,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct DiagnoseArgs {
    scene: PathBuf,
    /// Sample points per curve for the quasicircle constant.
    #[arg(long, default_value_t = 256)]
    samples: usize,
    /// Ball centers tried for the fatness estimate.
    #[arg(long, default_value_t = 64)]
    trials: usize,
    /// Run subannulus selection in `A(x; r, R)`: `x,r,R` with `x` real, or `cx,cy,r,R`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    annulus: Option<Vec<f64>>,
    /// Fatness of the holes for subannulus selection.
    #[arg(long, default_value_t = 0.25)]
    mu: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// `fast` or `full`.
    suite: String,
    #[arg(long)]
    json: bool,
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<u32>>,
    #[arg(long)]
    seed: Option<u64>,
}

/// An error together with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Topology(_)) => EXIT_TOPOLOGY,
            Some(Error::Convergence { .. }) => EXIT_CONVERGENCE,
            _ => EXIT_USAGE,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

/// Sizes the worker pool from `CARPET_MODULUS_THREADS` when it is set.
fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("CARPET_MODULUS_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("CARPET_MODULUS_THREADS = '{v}' is not a count"))?;
        if n == 0 {
            bail!("CARPET_MODULUS_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let config = match &cli.config {
        Some(p) => Config::parse(&read(p)?)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Gen { kind } => gen(kind),
        Command::Modulus(a) => modulus(a, &config),
        Command::Uniformize(a) => uniformize_cmd(a, &config),
        Command::Diagnose(a) => diagnose(a, &config),
        Command::Validate(a) => validate(a, &config),
    }
}

fn read(p: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn write_out(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut o = std::io::stdout().lock();
            match o.write_all(text.as_bytes()).and_then(|_| o.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.context("writing stdout"),
            }
        }
    }
}

fn load_scene(p: &Path) -> Result<Scene, Failure> {
    Ok(parse_scene(&read(p)?)?)
}

/// Parses `side@u:theta`.
fn parse_square(s: &str, label: Label) -> anyhow::Result<LogSquare> {
    let err = || anyhow!("square '{s}' must look like side@u:theta");
    let (side, rest) = s.split_once('@').ok_or_else(err)?;
    let (u, theta) = rest.split_once(':').ok_or_else(err)?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| err());
    Ok(LogSquare { label, u: num(u)?, theta: num(theta)?, side: num(side)? })
}

fn gen(kind: GenKind) -> Result<u8, Failure> {
    let (scene, out) = match kind {
        GenKind::Carpet { depth, out } => (carpet_to_scene(&standard_carpet(depth)?)?, out),
        GenKind::Cylinder { h, squares, out } => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(anyhow!("height {h} must be positive").into());
            }
            let squares = squares
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .enumerate()
                .map(|(i, s)| parse_square(s, i as Label + 2))
                .collect::<anyhow::Result<Vec<_>>>()?;
            (CylinderDomain::new(1.0, h.exp(), squares)?.to_scene()?, out)
        }
        GenKind::Annulus { inner, outer, out } => (Scene::annulus(inner, outer, vec![])?, out),
    };
    write_out(&out, &emit_scene(&scene)?)?;
    Ok(0)
}

fn selector(s: &str) -> anyhow::Result<Selector> {
    if let Ok(l) = s.trim().parse::<Label>() {
        return Ok(Selector::Label(l));
    }
    Ok(Selector::parse(s)?)
}

fn modulus(a: ModulusArgs, config: &Config) -> Result<u8, Failure> {
    let scene = load_scene(&a.scene)?;
    let g = discretize(&scene, a.h.unwrap_or(config.h))?;
    let (e, f) = (selector(&a.from)?, selector(&a.to)?);
    let ends: BTreeSet<Label> = [&e, &f].into_iter().filter_map(|s| if let Selector::Label(l) = s { Some(*l) } else { None }).collect();
    let mode = match a.mode {
        ModeArg::Classical => Mode::Classical,
        ModeArg::Carpet => Mode::Carpet,
        ModeArg::Transboundary => Mode::Transboundary(match a.weighted {
            Some(w) => w.into_iter().collect(),
            None => g.labels().into_iter().filter(|l| !ends.contains(l)).collect(),
        }),
    };
    let convention = a.convention.map(Convention::from).unwrap_or(config.convention);
    let fam = PathFamily::new(e, f, convention);
    let r = solve(&g, &fam, &mode, &config.solver())?;
    let mut report = to_canonical_value(&r)?;
    if a.oracle {
        let o = brute_force_modulus(&g, &fam, &mode)?;
        let delta = if o.value.is_infinite() && r.value.is_infinite() { 0.0 } else { (o.value - r.value).abs() };
        eprintln!("oracle {} solver {} delta {delta:e}", o.value, r.value);
        let obj = report.as_object_mut().ok_or_else(|| anyhow!("report is not an object"))?;
        obj.insert("oracle_value".into(), to_canonical_value(&o.value)?);
        obj.insert("oracle_delta".into(), to_canonical_value(&delta)?);
    }
    write_out(&a.out, &pretty(&report)?)?;
    if r.status == Status::IterationCap {
        eprintln!("warning: stopped at the iteration cap with relative gap {:e}", r.gap_estimate);
        return Ok(EXIT_CONVERGENCE);
    }
    Ok(0)
}

fn pretty(v: &Value) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn uniformize_cmd(a: UniformizeArgs, config: &Config) -> Result<u8, Failure> {
    let scene = load_scene(&a.scene)?;
    let layout = uniformize(&scene, a.inner, a.outer, a.h.unwrap_or(config.h), &config.uniformize())?;
    let validation = layout_validate(&layout);
    #[derive(Serialize)]
    struct Report<'a> {
        layout: &'a carpet_modulus::uniformizer::Layout,
        validation: &'a carpet_modulus::uniformizer::LayoutReport,
    }
    write_out(&a.out, &to_canonical_json(&Report { layout: &layout, validation: &validation })?)?;
    if let Some(p) = &a.svg {
        std::fs::write(p, layout_svg(&layout)).with_context(|| format!("writing {}", p.display()))?;
    }
    if layout.flags.overlap_unresolved {
        eprintln!("warning: overlaps remain after relaxation");
    }
    Ok(0)
}

#[derive(Serialize)]
struct CurveRow {
    label: Option<Label>,
    k: Option<f64>,
    lambda: Option<f64>,
    mu: Option<f64>,
    family_s: Option<f64>,
}

/// Whether the complementary component bounded by this curve can be measured: it must be the inside
/// of the curve, and under the flat metric it must avoid the origin.
fn measurable_component(scene: &Scene, label: Option<Label>) -> bool {
    match &scene.outer {
        Outer::Curve { label: outer, .. } => label.is_some() && label != *outer,
        Outer::Annulus { outer_label, inner_label, .. } => {
            label != Some(*outer_label) && !(scene.metric == MetricKind::Flat && label == Some(*inner_label))
        }
    }
}

fn hole_set(scene: &Scene, label: Label) -> anyhow::Result<CompactSet> {
    let h = scene.hole(label).ok_or_else(|| anyhow!("no hole {label}"))?;
    Ok(match h.shape {
        Shape::Disk { center, radius } => CompactSet::Disk { center: SpherePoint::from_complex(center), radius },
        _ => CompactSet::Points(h.shape.boundary()?.densify(MetricKind::Euclidean, 1e-3)?),
    })
}

fn diagnose(a: DiagnoseArgs, _config: &Config) -> Result<u8, Failure> {
    let scene = load_scene(&a.scene)?;
    let m = scene.metric;
    let curves = scene.peripheral_curves()?;
    let s = if curves.len() >= 2 {
        let only: Vec<_> = curves.iter().map(|c| c.1.clone()).collect();
        Some(family_separation(&only, m)?.s)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(curves.len());
    for (label, c) in &curves {
        let k = quasicircle_constant(c, m, a.samples)?.k;
        let (lambda, mu) = if measurable_component(&scene, *label) {
            (Some(quasi_round_fit(c, m)?.lambda), Some(fatness_estimate(c, m, a.trials)?.mu))
        } else {
            (None, None)
        };
        rows.push(CurveRow { label: *label, k: Some(k), lambda, mu, family_s: s });
    }
    let sub = match &a.annulus {
        None => None,
        Some(v) => {
            let (center, r, big_r) = match v[..] {
                [x, r, big_r] => (Complex64::new(x, 0.0), r, big_r),
                [cx, cy, r, big_r] => (Complex64::new(cx, cy), r, big_r),
                _ => return Err(anyhow!("--annulus takes x,r,R or cx,cy,r,R").into()),
            };
            let ann = Annulus::new(SpherePoint::from_complex(center), r, big_r, m)?;
            let sets = scene.holes.iter().map(|h| Ok((h.label, hole_set(&scene, h.label)?))).collect::<anyhow::Result<Vec<_>>>()?;
            Some(select_subannulus(&ann, &sets, a.mu)?)
        }
    };
    let text = match a.format {
        Format::Csv => to_csv(&rows)?,
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                metric: &'a str,
                curves: &'a [CurveRow],
                s: Option<f64>,
                subannulus: Option<carpet_modulus::diagnostics::SubannulusResult>,
            }
            to_canonical_json(&Report { metric: m.name(), curves: &rows, s, subannulus: sub })?
        }
    };
    write_out(&a.out, &text)?;
    Ok(0)
}

fn validate(a: ValidateArgs, config: &Config) -> Result<u8, Failure> {
    let suite = Suite::parse(&a.suite)?;
    let report = run_suite(suite, a.seed.unwrap_or(config.seed), a.only.as_deref())?;
    let text = if a.json {
        to_canonical_json(&report)?
    } else {
        let mut t: String = report.criteria.iter().map(|c| c.line() + "\n").collect();
        t += if report.passed { "all criteria passed\n" } else { "some criteria failed\n" };
        t
    };
    write_out(&None, &text)?;
    Ok(if report.passed { 0 } else { EXIT_VALIDATION })
}
