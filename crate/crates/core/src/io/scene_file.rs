//! JSON scene files.
//!
//! ```json
//! {
//!   "version": "1",
//!   "metric": "flat",
//!   "outer": {"annulus": [1.0, 2.718281828], "inner_label": 0, "outer_label": 1},
//!   "holes": [
//!     {"label": 2, "kind": "cstar-square", "params": [0.5, 0.0, 0.4]},
//!     {"label": 3, "vertices": [[0.1, 0.1], [0.2, 0.1], [0.2, 0.2]]}
//!   ]
//! }
//! ```
//!
//! The outer boundary is either a vertex list, optionally with `outer_label`
//! at the top level, or an annulus. Hole kinds and their parameters:
//! `square` `[x0, y0, side]` (lower-left corner), `disk` `[cx, cy, r]`,
//! `cstar-square` `[u, θ, side]` (center in log coordinates) and
//! `log-rect` `[u0, u1, θ0, width]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::carpets::scene::{Hole, Label, Outer, Scene, Shape};
use crate::error::{Error, Result};
use crate::geometry::{MetricKind, PolyCurve};

pub const SCENE_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OuterFile {
    Annulus {
        annulus: [f64; 2],
        #[serde(default)]
        inner_label: Label,
        #[serde(default = "default_outer_label")]
        outer_label: Label,
    },
    Vertices(Vec<[f64; 2]>),
}

fn default_outer_label() -> Label {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleFile {
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: String,
    pub metric: String,
    pub outer: OuterFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_label: Option<Label>,
    #[serde(default)]
    pub holes: Vec<HoleFile>,
}

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

fn curve(v: &[[f64; 2]]) -> Result<PolyCurve> {
    let pts: Vec<(f64, f64)> = v.iter().map(|p| (p[0], p[1])).collect();
    PolyCurve::from_xy(&pts, true)
}

fn vertices(c: &PolyCurve) -> Result<Vec<[f64; 2]>> {
    Ok(c.finite_vertices()?.into_iter().map(|z| [z.re, z.im]).collect())
}

impl HoleFile {
    fn shape(&self) -> Result<Shape> {
        match (&self.vertices, &self.kind, &self.params) {
            (Some(v), None, None) => Shape::polygon(curve(v)?),
            (None, Some(kind), Some(p)) => {
                let want = match kind.as_str() {
                    "square" | "disk" | "cstar-square" => 3,
                    "log-rect" => 4,
                    _ => return parse_err(format!("hole {}: unknown kind '{kind}'", self.label)),
                };
                if p.len() != want {
                    return parse_err(format!("hole {}: '{kind}' takes {want} parameters, got {}", self.label, p.len()));
                }
                match kind.as_str() {
                    "square" => {
                        let (x, y, s) = (p[0], p[1], p[2]);
                        Shape::polygon(curve(&[[x, y], [x + s, y], [x + s, y + s], [x, y + s]])?)
                    }
                    "disk" => Shape::disk(Complex64::new(p[0], p[1]), p[2]),
                    "cstar-square" => Shape::cstar_square(p[0], p[1], p[2]),
                    _ => Shape::log_rect(p[0], p[1], p[2], p[3]),
                }
            }
            _ => parse_err(format!("hole {} needs either 'vertices' or 'kind' with 'params'", self.label)),
        }
    }

    fn from_hole(h: &Hole) -> Result<HoleFile> {
        let (vertices, kind, params) = match &h.shape {
            Shape::Polygon(c) => (Some(vertices(c)?), None, None),
            Shape::Disk { center, radius } => (None, Some("disk"), Some(vec![center.re, center.im, *radius])),
            s @ Shape::LogRect { u0, u1, t0, width } => {
                if s.is_cstar_square() {
                    let (u, t, _, w) = s.log_extent().expect("log rectangle");
                    (None, Some("cstar-square"), Some(vec![u, t, w]))
                } else {
                    (None, Some("log-rect"), Some(vec![*u0, *u1, *t0, *width]))
                }
            }
        };
        Ok(HoleFile { label: h.label, vertices, kind: kind.map(String::from), params })
    }
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<SceneFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("scene file: {e}")))
    }

    pub fn to_scene(&self) -> Result<Scene> {
        if self.version != SCENE_VERSION {
            return parse_err(format!("unsupported scene version '{}'", self.version));
        }
        let mut seen = BTreeSet::new();
        for h in &self.holes {
            if !seen.insert(h.label) {
                return parse_err(format!("duplicate hole label {}", h.label));
            }
        }
        let metric = MetricKind::parse(&self.metric).map_err(|e| Error::Parse(e.to_string()))?;
        let outer = match &self.outer {
            OuterFile::Annulus { annulus, inner_label, outer_label } => {
                if self.outer_label.is_some() {
                    return parse_err("'outer_label' goes inside the annulus object");
                }
                Outer::Annulus { inner_radius: annulus[0], outer_radius: annulus[1], inner_label: *inner_label, outer_label: *outer_label }
            }
            OuterFile::Vertices(v) => Outer::Curve { curve: curve(v)?, label: self.outer_label },
        };
        let holes = self.holes.iter().map(|h| Ok(Hole { label: h.label, shape: h.shape()? })).collect::<Result<Vec<_>>>()?;
        Scene::new(outer, holes, metric)
    }

    pub fn from_scene(s: &Scene) -> Result<SceneFile> {
        let (outer, outer_label) = match &s.outer {
            Outer::Annulus { inner_radius, outer_radius, inner_label, outer_label } => (
                OuterFile::Annulus { annulus: [*inner_radius, *outer_radius], inner_label: *inner_label, outer_label: *outer_label },
                None,
            ),
            Outer::Curve { curve, label } => (OuterFile::Vertices(vertices(curve)?), *label),
        };
        let mut holes = s.holes.iter().map(HoleFile::from_hole).collect::<Result<Vec<_>>>()?;
        holes.sort_by_key(|h| h.label);
        Ok(SceneFile { version: SCENE_VERSION.into(), metric: s.metric.name().into(), outer, outer_label, holes })
    }
}

/// Reads a scene file from text.
pub fn parse_scene(text: &str) -> Result<Scene> {
    SceneFile::parse(text)?.to_scene()
}

/// Canonical JSON text of a scene.
pub fn emit_scene(s: &Scene) -> Result<String> {
    super::json::to_canonical_json(&SceneFile::from_scene(s)?)
}
