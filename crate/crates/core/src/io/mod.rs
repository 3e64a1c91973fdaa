//! Files in and out: scene files, canonical JSON reports, SVG and CSV.

pub mod config;
pub mod json;
pub mod scene_file;
pub mod svg;

pub use config::Config;
pub use json::{round_sig, to_canonical_json, to_canonical_value};
pub use scene_file::{emit_scene, parse_scene, SceneFile};
pub use svg::layout_svg;

use serde::Serialize;

use crate::error::{Error, Result};

/// CSV text with a header row taken from the field names of `rows`.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let err = |e: &dyn std::fmt::Display| Error::Internal(format!("csv: {e}"));
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| err(&e))?;
    }
    let raw = w.into_inner().map_err(|e| err(&e))?;
    // second pass rounds float fields; integer fields have no '.' or exponent
    let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(raw.as_slice());
    let mut out = csv::Writer::from_writer(Vec::new());
    for rec in rd.records() {
        let rec = rec.map_err(|e| err(&e))?;
        let fields: Vec<String> = rec.iter().map(round_field).collect();
        out.write_record(&fields).map_err(|e| err(&e))?;
    }
    let bytes = out.into_inner().map_err(|e| err(&e))?;
    String::from_utf8(bytes).map_err(|e| err(&e))
}

fn round_field(f: &str) -> String {
    if !f.contains(['.', 'e', 'E']) {
        return f.to_string();
    }
    match f.parse::<f64>() {
        Ok(x) if x.is_finite() && round_sig(x).fract() != 0.0 => serde_json::to_string(&round_sig(x)).unwrap_or_else(|_| f.to_string()),
        _ => f.to_string(),
    }
}
