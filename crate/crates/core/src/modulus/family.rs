use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::grid::{Cell, Grid};
use crate::carpets::scene::Label;
use crate::error::{domain, Result};

/// Whether the endpoint nodes of a path count toward its admissibility sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Only what the path meets strictly between its ends counts.
    #[default]
    Open,
    Closed,
}

impl Convention {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Convention::Open),
            "closed" => Ok(Convention::Closed),
            _ => domain(format!("unknown endpoint convention '{s}'")),
        }
    }
}

/// A set of non-exterior cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    /// Every cell of a hole.
    Label(Label),
    /// Cells whose centers lie in the closed box.
    Rect { min: (f64, f64), max: (f64, f64) },
    Cells(Vec<usize>),
}

impl Selector {
    pub fn cells(&self, g: &Grid) -> Result<Vec<usize>> {
        let out: Vec<usize> = match self {
            Selector::Label(l) => g.hole_cells(*l),
            Selector::Rect { min, max } => (0..g.len())
                .filter(|&k| g.cells[k] != Cell::Exterior)
                .filter(|&k| {
                    let z: Complex64 = g.center(k);
                    z.re >= min.0 && z.re <= max.0 && z.im >= min.1 && z.im <= max.1
                })
                .collect(),
            Selector::Cells(c) => {
                if let Some(&bad) = c.iter().find(|&&k| k >= g.len() || g.cells[k] == Cell::Exterior) {
                    return domain(format!("selected cell {bad} is outside the domain"));
                }
                let set: BTreeSet<usize> = c.iter().copied().collect();
                set.into_iter().collect()
            }
        };
        if out.is_empty() {
            return domain(format!("selector {self:?} matches no cell"));
        }
        Ok(out)
    }

    /// Parses `label:N` or `rect:x0,y0,x1,y1`.
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(l) = s.strip_prefix("label:") {
            return l.trim().parse().map(Selector::Label).or_else(|_| domain(format!("bad label selector '{s}'")));
        }
        if let Some(r) = s.strip_prefix("rect:") {
            let v: Vec<f64> = r
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .or_else(|_| domain(format!("bad rectangle selector '{s}'")))?;
            if v.len() != 4 || v[0] > v[2] || v[1] > v[3] {
                return domain(format!("rectangle selector '{s}' needs x0,y0,x1,y1 with x0 ≤ x1, y0 ≤ y1"));
            }
            return Ok(Selector::Rect { min: (v[0], v[1]), max: (v[2], v[3]) });
        }
        domain(format!("selector '{s}' must start with 'label:' or 'rect:'"))
    }
}

/// Paths from `e` to `f` whose intermediate cells avoid `e ∪ f` and, when a
/// region is given, stay inside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathFamily {
    pub e: Selector,
    pub f: Selector,
    pub convention: Convention,
    /// Cells allowed strictly between the endpoints; a hole is allowed when any of its cells is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<bool>>,
}

impl PathFamily {
    pub fn new(e: Selector, f: Selector, convention: Convention) -> Self {
        PathFamily { e, f, convention, region: None }
    }

    /// Family joining two holes.
    pub fn between(e: Label, f: Label, convention: Convention) -> Self {
        PathFamily::new(Selector::Label(e), Selector::Label(f), convention)
    }

    pub fn with_region(mut self, region: Vec<bool>) -> Self {
        self.region = Some(region);
        self
    }
}

/// How holes and interior cells enter the optimization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Density only; holes block paths.
    Classical,
    /// Density plus one weight for each listed hole; other holes block paths.
    Transboundary(BTreeSet<Label>),
    /// Hole weights only; interior cells cost nothing.
    Carpet,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Classical => "classical",
            Mode::Transboundary(_) => "transboundary",
            Mode::Carpet => "carpet",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_selectors() {
        assert_eq!(Selector::parse("label:3").unwrap(), Selector::Label(3));
        assert_eq!(Selector::parse("rect:0,0,1,2").unwrap(), Selector::Rect { min: (0.0, 0.0), max: (1.0, 2.0) });
        assert!(Selector::parse("rect:1,0,0,2").is_err());
        assert!(Selector::parse("box:1").is_err());
    }

    #[test]
    fn empty_selection_rejected() {
        let g = Grid::from_cells(2, 1, vec![Cell::Interior, Cell::Hole(4)]).unwrap();
        assert_eq!(Selector::Label(4).cells(&g).unwrap(), vec![1]);
        assert!(Selector::Label(5).cells(&g).is_err());
    }
}
