use carpet_modulus::carpets::{CylinderDomain, LogSquare};
use carpet_modulus::io::{emit_scene, layout_svg, parse_scene, round_sig, to_canonical_json, to_csv, Config};
use carpet_modulus::uniformizer::{uniformize, UniformizeOptions};
use carpet_modulus::Error;
use proptest::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

fn corpus() -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    assert!(files.len() >= 4, "corpus missing from {}", dir.display());
    files.into_iter().map(|p| (p.clone(), std::fs::read_to_string(p).unwrap())).collect()
}

#[test]
fn corpus_round_trips() {
    for (path, text) in corpus() {
        let scene = parse_scene(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let emitted = emit_scene(&scene).unwrap();
        assert_eq!(emitted, text, "{} is not in canonical form", path.display());
        assert_eq!(parse_scene(&emitted).unwrap(), scene);
    }
}

#[test]
fn malformed_scenes_are_parse_errors() {
    for text in [
        "",
        "{",
        r#"{"version": "1", "metric": "euclidean"}"#,
        r#"{"version": "1", "metric": "taxicab", "outer": [[0,0],[1,0],[0,1]]}"#,
        r#"{"version": "1", "metric": "euclidean", "outer": [[0,0],[1,0],[0,1]], "holes": [{"label": 2, "kind": "blob", "params": [0]}]}"#,
        r#"{"version": "1", "metric": "euclidean", "outer": [[0,0],[1,0],[0,1]], "extra": 1}"#,
    ] {
        assert!(matches!(parse_scene(text), Err(Error::Parse(_))), "accepted {text:?}");
    }
}

#[test]
fn overlapping_holes_rejected() {
    let text = r#"{"version": "1", "metric": "euclidean", "outer": [[0,0],[4,0],[4,4],[0,4]],
        "holes": [{"label": 0, "kind": "disk", "params": [1, 1, 0.5]}, {"label": 1, "kind": "disk", "params": [1.5, 1, 0.5]}]}"#;
    assert!(parse_scene(text).is_err());
}

fn cylinder_scene() -> impl Strategy<Value = CylinderDomain> {
    (0.5f64..3.0, prop::collection::vec((0.0f64..1.0, 0.0f64..6.28, 0.05f64..0.3), 0..5)).prop_filter_map(
        "disjoint squares",
        |(h, raw)| {
            let squares = raw
                .into_iter()
                .enumerate()
                .map(|(i, (u, t, s))| LogSquare { label: i as u32 + 2, u: s / 2.0 + u * (h - s), theta: t, side: s.min(h / 2.0) })
                .collect();
            CylinderDomain::new(1.0, h.exp(), squares).ok()
        },
    )
}

proptest! {
    #[test]
    fn emit_is_idempotent(d in cylinder_scene()) {
        let scene = d.to_scene().unwrap();
        let once = emit_scene(&scene).unwrap();
        let again = emit_scene(&parse_scene(&once).unwrap()).unwrap();
        prop_assert_eq!(once, again);
    }

    #[test]
    fn rounding_is_stable(x in prop::num::f64::NORMAL) {
        let r = round_sig(x);
        prop_assert_eq!(round_sig(r), r);
        prop_assert!((r - x).abs() <= 5e-12 * x.abs());
    }
}

#[test]
fn canonical_json_sorts_keys_and_rounds() {
    #[derive(Serialize)]
    struct Row {
        zeta: f64,
        alpha: BTreeMap<String, f64>,
        missing: f64,
    }
    let row = Row { zeta: 1.0 / 3.0, alpha: [("b".into(), 2.0f64.sqrt()), ("a".into(), 1e-20)].into(), missing: f64::NAN };
    let text = to_canonical_json(&row).unwrap();
    let a = text.find("\"alpha\"").unwrap();
    let z = text.find("\"zeta\"").unwrap();
    let m = text.find("\"missing\"").unwrap();
    assert!(a < m && m < z);
    assert!(text.contains("0.333333333333,") || text.contains("0.333333333333\n"));
    assert!(text.contains("1.41421356237"));
    assert!(text.contains("\"missing\": null"));
    assert!(text.ends_with('\n'));
}

#[test]
fn csv_has_a_header_row() {
    #[derive(Serialize)]
    struct Row {
        label: u32,
        k: f64,
    }
    let text = to_csv(&[Row { label: 2, k: 1.5 }, Row { label: 3, k: 2.0 }]).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["label,k", "2,1.5", "3,2.0"]);
}

#[test]
fn config_defaults_and_validation() {
    let c = Config::parse("{}").unwrap();
    assert_eq!(c, Config::default());
    assert_eq!(c.solver().eps, 1e-3);
    let c = Config::parse(r#"{"h": 0.01, "seed": 7, "convention": "closed"}"#).unwrap();
    assert_eq!((c.h, c.seed, c.solver().seed), (0.01, 7, 7));
    for bad in [r#"{"h": -1}"#, r#"{"iteration_cap": 0}"#, r#"{"version": "0"}"#, r#"{"colour": 1}"#, "[1]"] {
        assert!(matches!(Config::parse(bad), Err(Error::Parse(_))), "accepted {bad}");
    }
}

#[test]
fn layout_output_is_byte_identical_across_runs() {
    let text = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/cylinder_two_squares.json")).unwrap();
    let scene = parse_scene(&text).unwrap();
    let run = || {
        let l = uniformize(&scene, 0, 1, 1.0 / 32.0, &UniformizeOptions::default()).unwrap();
        (to_canonical_json(&l).unwrap(), layout_svg(&l))
    };
    let (json, svg) = run();
    assert_eq!(run(), (json.clone(), svg.clone()));
    assert!(json.contains("\"version\": \"1\""));
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}
