use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

use crate::carpets::cylinder::LogChart;
use crate::carpets::scene::{Label, Outer, Scene, Shape};
use crate::error::{domain, Error, Result};
use crate::geometry::{set_diameter, MetricKind, PointSet};

/// Classification of one grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Interior,
    Hole(Label),
    Exterior,
}

/// Placement of the cell array.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Chart {
    /// Square cells of side `h`; cell `(i, j)` has center `(x0 + (j+½)h, y0 + (i+½)h)`.
    Cartesian { x0: f64, y0: f64, h: f64 },
    /// Log-polar cells, periodic in angle. Row 0 and the last row are one-cell
    /// rings standing for the inner and outer boundary components.
    Log(LogChart),
    /// Cells given directly, without geometry.
    Abstract,
}

/// A discretized domain. Cells are stored row-major, `nx` per row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Grid {
    pub chart: Chart,
    pub metric: MetricKind,
    pub nx: usize,
    pub ny: usize,
    /// Rows wrap around in `x` (angular direction of a log chart).
    pub periodic: bool,
    pub cells: Vec<Cell>,
    /// Metric length of each cell: its side in the chosen metric.
    pub lengths: Vec<f64>,
}

impl Grid {
    /// Grid from an explicit cell array with unit cell lengths.
    pub fn from_cells(nx: usize, ny: usize, cells: Vec<Cell>) -> Result<Grid> {
        if nx == 0 || ny == 0 || cells.len() != nx * ny {
            return domain(format!("{} cells do not fill a {nx}×{ny} grid", cells.len()));
        }
        Ok(Grid { chart: Chart::Abstract, metric: MetricKind::Euclidean, nx, ny, periodic: false, cells, lengths: vec![1.0; nx * ny] })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nx + j
    }

    pub fn row_col(&self, idx: usize) -> (usize, usize) {
        (idx / self.nx, idx % self.nx)
    }

    /// Side length of the chart cells, before the metric density is applied.
    pub fn resolution(&self) -> f64 {
        match self.chart {
            Chart::Cartesian { h, .. } => h,
            Chart::Log(c) => (c.h_u * c.h_theta).sqrt(),
            Chart::Abstract => 1.0,
        }
    }

    pub fn cell_area(&self, idx: usize) -> f64 {
        self.lengths[idx] * self.lengths[idx]
    }

    /// Center of a cell in the plane.
    pub fn center(&self, idx: usize) -> Complex64 {
        let (i, j) = self.row_col(idx);
        match self.chart {
            Chart::Cartesian { x0, y0, h } => Complex64::new(x0 + (j as f64 + 0.5) * h, y0 + (i as f64 + 0.5) * h),
            Chart::Log(_) => {
                let (u, t) = self.log_center(idx).expect("log chart");
                Complex64::from_polar(u.exp(), t)
            }
            Chart::Abstract => Complex64::new(j as f64 + 0.5, i as f64 + 0.5),
        }
    }

    /// `(log|z|, arg z)` of a cell center on a log chart.
    pub fn log_center(&self, idx: usize) -> Option<(f64, f64)> {
        let Chart::Log(c) = self.chart else {
            return None;
        };
        let (i, j) = self.row_col(idx);
        Some((c.u0 + (i as f64 - 0.5) * c.h_u, c.col_center(j)))
    }

    /// 4-neighbors, wrapping in `x` on periodic grids.
    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.row_col(idx);
        let (nx, ny) = (self.nx, self.ny);
        let left = if j > 0 {
            Some(idx - 1)
        } else if self.periodic && nx > 1 {
            Some(idx + nx - 1)
        } else {
            None
        };
        let right = if j + 1 < nx {
            Some(idx + 1)
        } else if self.periodic && nx > 1 {
            Some(idx + 1 - nx)
        } else {
            None
        };
        let down = (i > 0).then(|| idx - nx);
        let up = (i + 1 < ny).then(|| idx + nx);
        [left, right, down, up].into_iter().flatten()
    }

    /// Every hole label present, with its cell count.
    pub fn hole_cell_counts(&self) -> BTreeMap<Label, usize> {
        let mut m = BTreeMap::new();
        for c in &self.cells {
            if let Cell::Hole(l) = c {
                *m.entry(*l).or_insert(0) += 1;
            }
        }
        m
    }

    pub fn labels(&self) -> Vec<Label> {
        self.hole_cell_counts().into_keys().collect()
    }

    pub fn interior_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == Cell::Interior).count()
    }

    /// Cells of one label.
    pub fn hole_cells(&self, label: Label) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.cells[k] == Cell::Hole(label)).collect()
    }

    /// Number of 4-connected components among cells satisfying `keep`.
    pub fn components(&self, keep: impl Fn(usize) -> bool) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for s in 0..self.len() {
            if seen[s] || !keep(s) {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbors(u) {
                    if !seen[v] && keep(v) {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        count
    }
}

/// Cells whose count along a side of length `w` at resolution `h` is `w/h`
/// rounded up, ignoring floating noise just above an integer.
fn cells_across(w: f64, h: f64) -> usize {
    ((w / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Smallest hole diameter, measured in the chart's own geometry.
fn min_hole_diameter(scene: &Scene) -> Result<Option<(Label, f64)>> {
    let mut best: Option<(Label, f64)> = None;
    for h in &scene.holes {
        let d = match &h.shape {
            Shape::LogRect { u0, u1, width, .. } => (u1 - u0).hypot(*width),
            Shape::Disk { radius, .. } if !scene.is_cylindrical() => 2.0 * radius,
            s => {
                let m = if scene.is_cylindrical() { MetricKind::Flat } else { MetricKind::Euclidean };
                set_diameter(&PointSet::Curve(s.boundary()?), m)?
            }
        };
        if best.map_or(true, |(_, b)| d < b) {
            best = Some((h.label, d));
        }
    }
    Ok(best)
}

/// Classifies cell centers of a grid laid over the scene.
///
/// Cylindrical scenes use a log-polar chart with cells of side about `h` in
/// the flat metric; other scenes use square cells of side `h` over the outer
/// bounding box plus a one-cell ring. Cell lengths are `h` times the metric
/// density at the center.
pub fn discretize(scene: &Scene, h: f64) -> Result<Grid> {
    if !(h > 0.0 && h.is_finite()) {
        return domain(format!("resolution {h} must be positive"));
    }
    if let Some((label, d)) = min_hole_diameter(scene)? {
        if h > d / 4.0 {
            return Err(Error::Resolution(format!("resolution {h} exceeds a quarter of hole {label}'s diameter {d}")));
        }
    }
    let grid = match &scene.outer {
        Outer::Annulus { inner_radius, outer_radius, inner_label, outer_label } => {
            let chart = LogChart::new(*inner_radius, *outer_radius, h)?;
            let (nx, ny) = (chart.n_theta, chart.n_u + 2);
            let mut cells = vec![Cell::Interior; nx * ny];
            let mut lengths = vec![0.0; nx * ny];
            let side = (chart.h_u * chart.h_theta).sqrt();
            for i in 0..ny {
                let u = chart.u0 + (i as f64 - 0.5) * chart.h_u;
                for j in 0..nx {
                    let t = chart.col_center(j);
                    let idx = i * nx + j;
                    cells[idx] = if i == 0 {
                        Cell::Hole(*inner_label)
                    } else if i == ny - 1 {
                        Cell::Hole(*outer_label)
                    } else {
                        scene.holes.iter().find(|hl| hl.shape.contains_log(u, t)).map_or(Cell::Interior, |hl| Cell::Hole(hl.label))
                    };
                    // the flat length element |dz|/|z| is du² + dθ² in log coordinates
                    let r = u.exp();
                    lengths[idx] = scene.metric.density(Complex64::from_polar(r, t)) * r * side;
                }
            }
            Grid { chart: Chart::Log(chart), metric: scene.metric, nx, ny, periodic: true, cells, lengths }
        }
        Outer::Curve { curve, label } => {
            let (lo, hi) = scene.bbox()?;
            let nx = cells_across(hi.re - lo.re, h) + 2;
            let ny = cells_across(hi.im - lo.im, h) + 2;
            let (x0, y0) = (lo.re - h, lo.im - h);
            let chart = Chart::Cartesian { x0, y0, h };
            let mut cells = vec![Cell::Exterior; nx * ny];
            let mut lengths = vec![0.0; nx * ny];
            for i in 0..ny {
                for j in 0..nx {
                    let idx = i * nx + j;
                    let z = Complex64::new(x0 + (j as f64 + 0.5) * h, y0 + (i as f64 + 0.5) * h);
                    cells[idx] = if let Some(hl) = scene.holes.iter().find(|hl| hl.shape.contains(z)) {
                        Cell::Hole(hl.label)
                    } else if curve.contains(z) {
                        Cell::Interior
                    } else {
                        label.map_or(Cell::Exterior, Cell::Hole)
                    };
                    lengths[idx] = scene.metric.density(z) * h;
                }
            }
            Grid { chart, metric: scene.metric, nx, ny, periodic: false, cells, lengths }
        }
    };
    let counts = grid.hole_cell_counts();
    for l in scene.labels() {
        if !counts.contains_key(&l) {
            return Err(Error::Resolution(format!("hole {l} covers no cell at resolution {h}")));
        }
        let comps = grid.components(|k| grid.cells[k] == Cell::Hole(l));
        if comps != 1 {
            return Err(Error::Resolution(format!("hole {l} splits into {comps} pieces at resolution {h}")));
        }
    }
    if grid.interior_count() > 0 {
        let comps = grid.components(|k| grid.cells[k] == Cell::Interior);
        if comps != 1 {
            return Err(Error::Topology(format!("interior splits into {comps} pieces at resolution {h}")));
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpets::{carpet_to_scene, standard_carpet};
    use std::f64::consts::{E, TAU};

    #[test]
    fn annulus_grid() {
        let g = discretize(&Scene::annulus(1.0, E, vec![]).unwrap(), 1.0 / 16.0).unwrap();
        assert_eq!(g.ny, 18);
        assert_eq!(g.nx, (TAU * 16.0).round() as usize);
        assert_eq!(g.labels(), vec![0, 1]);
        assert_eq!(g.interior_count(), 16 * g.nx);
        // flat cells are nearly square with area h_u·h_θ
        let idx = g.index(5, 3);
        let Chart::Log(c) = g.chart else { panic!() };
        assert!((g.cell_area(idx) - c.h_u * c.h_theta).abs() < 1e-15);
        assert_eq!(g.neighbors(g.index(3, 0)).count(), 4);
    }

    #[test]
    fn carpet_hole_cells() {
        let g = discretize(&carpet_to_scene(&standard_carpet(1).unwrap()).unwrap(), 1.0 / 30.0).unwrap();
        assert_eq!(g.hole_cell_counts()[&0], 100);
        assert_eq!(g.interior_count(), 900 - 100);
    }

    #[test]
    fn coarse_resolution_rejected() {
        let s = carpet_to_scene(&standard_carpet(3).unwrap()).unwrap();
        assert!(matches!(discretize(&s, 1.0 / 30.0), Err(Error::Resolution(_))));
    }
}
