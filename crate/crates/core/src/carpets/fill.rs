use super::cylinder::LogChart;
use super::scene::{Hole, Label, Outer, Scene, Shape};
use crate::error::{domain, Result};

/// Thinnest tile, in cells, the fill will emit.
pub const MIN_TILE_CELLS: usize = 3;

/// Covers the free part of a cylindrical scene with grid-aligned log rectangles
/// of roughly square shape, so that almost every cell belongs to some hole.
///
/// Existing log-rectangle holes are first snapped to the cells whose centers
/// they contain. The free region is then cut into bands at every row where the
/// covered pattern changes, and each band's free angular runs are split into
/// tiles whose width is close to the band height. New tiles get labels above
/// the largest existing one.
pub fn tile_fill(scene: &Scene, h: f64) -> Result<Scene> {
    let Outer::Annulus { inner_radius, outer_radius, .. } = scene.outer else {
        return domain("tile fill needs a cylindrical scene");
    };
    let chart = LogChart::new(inner_radius, outer_radius, h)?;
    let (nu, nt) = (chart.n_u, chart.n_theta);
    let mut covered = vec![vec![false; nt]; nu];
    let mut holes = Vec::with_capacity(scene.holes.len());
    for hole in &scene.holes {
        if !matches!(hole.shape, Shape::LogRect { .. }) {
            return domain(format!("hole {} is not a log rectangle", hole.label));
        }
        let mut rows = Vec::new();
        let mut cols = Vec::new();
        for (i, row) in covered.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if hole.shape.contains_log(chart.row_center(i), chart.col_center(j)) {
                    *cell = true;
                    rows.push(i);
                    cols.push(j);
                }
            }
        }
        if rows.is_empty() {
            return domain(format!("hole {} covers no cell at resolution {h}", hole.label));
        }
        let (i0, i1) = (*rows.iter().min().unwrap(), *rows.iter().max().unwrap() + 1);
        let (j0, width) = cyclic_span(&cols, nt);
        holes.push(Hole { label: hole.label, shape: cell_rect(&chart, i0, i1, j0, width)? });
    }
    let mut next_label: Label = scene.labels().into_iter().max().map_or(0, |l| l + 1);
    let mut start = 0;
    while start < nu {
        let mut end = start + 1;
        while end < nu && covered[end] == covered[start] {
            end += 1;
        }
        let height = end - start;
        if height < MIN_TILE_CELLS {
            return domain(format!("band of rows {start}..{end} is thinner than {MIN_TILE_CELLS} cells"));
        }
        for (j0, run) in free_runs(&covered[start], nt) {
            let aspect = chart.h_theta / chart.h_u;
            let mut count = ((run as f64 * aspect) / height as f64).round().max(1.0) as usize;
            if run == nt {
                count = count.max(2);
            }
            count = count.min(run / MIN_TILE_CELLS);
            if count == 0 {
                return domain(format!("free run of {run} cells in rows {start}..{end} is too narrow"));
            }
            let mut offset = 0;
            for k in 0..count {
                let w = run / count + usize::from(k < run % count);
                holes.push(Hole { label: next_label, shape: cell_rect(&chart, start, end, (j0 + offset) % nt, w)? });
                next_label += 1;
                offset += w;
            }
        }
        start = end;
    }
    Scene::new(scene.outer.clone(), holes, scene.metric)
}

fn cell_rect(chart: &LogChart, i0: usize, i1: usize, j0: usize, width: usize) -> Result<Shape> {
    Shape::log_rect(
        chart.u0 + i0 as f64 * chart.h_u,
        chart.u0 + i1 as f64 * chart.h_u,
        j0 as f64 * chart.h_theta,
        width as f64 * chart.h_theta,
    )
}

/// Smallest cyclic interval `(start, length)` containing every column.
fn cyclic_span(cols: &[usize], n: usize) -> (usize, usize) {
    let mut present = vec![false; n];
    for &c in cols {
        present[c] = true;
    }
    // the span starts right after the longest empty cyclic gap
    let (gap_start, gap_len) = free_runs(&present, n).into_iter().max_by_key(|&(s, l)| (l, usize::MAX - s)).unwrap_or((0, 0));
    if gap_len == 0 {
        return (0, n);
    }
    ((gap_start + gap_len) % n, n - gap_len)
}

/// Maximal cyclic runs of `false` as `(start, length)`.
fn free_runs(mask: &[bool], n: usize) -> Vec<(usize, usize)> {
    let Some(anchor) = mask.iter().position(|&c| c) else {
        return vec![(0, n)];
    };
    let mut runs = Vec::new();
    let mut k = 0;
    while k < n {
        let j = (anchor + k) % n;
        if mask[j] {
            k += 1;
            continue;
        }
        let s = j;
        let mut len = 0;
        while k < n && !mask[(anchor + k) % n] {
            len += 1;
            k += 1;
        }
        runs.push((s, len));
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpets::cylinder::cylinder_domain;
    use crate::geometry::SpherePoint;
    use std::f64::consts::{E, PI};

    #[test]
    fn runs_wrap_around() {
        let mask = [false, true, true, false, false];
        assert_eq!(free_runs(&mask, 5), vec![(3, 3)]);
        assert_eq!(free_runs(&[false; 4], 4), vec![(0, 4)]);
        assert_eq!(cyclic_span(&[0, 4, 3], 5), (3, 3));
    }

    #[test]
    fn fill_covers_every_cell_once() {
        let d = cylinder_domain(
            1.0,
            E,
            &[(SpherePoint::from_log(0.5, 0.0), 0.4), (SpherePoint::from_log(0.5, PI), 0.6)],
        )
        .unwrap();
        let h = 1.0 / 32.0;
        let filled = tile_fill(&d.to_scene().unwrap(), h).unwrap();
        let chart = LogChart::new(1.0, E, h).unwrap();
        for i in 0..chart.n_u {
            for j in 0..chart.n_theta {
                let hits = filled
                    .holes
                    .iter()
                    .filter(|hole| hole.shape.contains_log(chart.row_center(i), chart.col_center(j)))
                    .count();
                assert_eq!(hits, 1, "cell ({i}, {j})");
            }
        }
        // the two original squares keep their labels
        assert!(filled.hole(2).is_some() && filled.hole(3).is_some());
        let (_, _, hu, w) = filled.hole(3).unwrap().shape.log_extent().unwrap();
        assert!((hu - 0.6).abs() < 2.0 * h && (w - 0.6).abs() < 2.0 * h);
    }

    #[test]
    fn thin_band_rejected() {
        let d = cylinder_domain(1.0, E, &[(SpherePoint::from_log(0.5, 0.0), 0.9)]).unwrap();
        assert!(tile_fill(&d.to_scene().unwrap(), 1.0 / 32.0).is_err());
    }
}
