//! Random instances small enough for the exhaustive oracle.

use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;

use crate::carpets::scene::Label;
use crate::modulus::{Cell, Convention, Grid, Mode, PathFamily};

/// A grid, a family between its two end holes, and a mode.
#[derive(Clone, Debug)]
pub struct TinyCase {
    pub grid: Grid,
    pub family: PathFamily,
    pub mode: Mode,
}

pub const END_E: Label = 0;
pub const END_F: Label = 1;

/// Mode name and grid shape, for reporting.
pub fn describe(c: &TinyCase) -> String {
    format!("{} {}×{} {:?}", c.mode.name(), c.grid.nx, c.grid.ny, c.family.convention)
}

/// A grid of at most `max_side`² cells: the first and last columns are the
/// end holes, the rest is interior with some exterior cells and a few small
/// holes. Carpet cases have more holes and usually a middle column split into
/// holes, so that most paths pay something.
pub fn random_case<R: Rng>(rng: &mut R, mode_index: usize, max_side: usize) -> TinyCase {
    let max_side = max_side.max(4);
    let nx = rng.gen_range(4..=max_side);
    let ny = rng.gen_range(3..=max_side.min(6));
    let mut cells = vec![Cell::Interior; nx * ny];
    let mut next: Label = 2;
    for i in 0..ny {
        cells[i * nx] = Cell::Hole(END_E);
        cells[i * nx + nx - 1] = Cell::Hole(END_F);
    }
    if mode_index == 2 && rng.gen_bool(0.6) {
        let col = nx / 2;
        let mut i = 0;
        while i < ny {
            let len = rng.gen_range(1..=2).min(ny - i);
            for r in i..i + len {
                cells[r * nx + col] = Cell::Hole(next);
            }
            next += 1;
            i += len;
        }
    }
    let holes = if mode_index == 2 { rng.gen_range(2..=8) } else { rng.gen_range(0..=3) };
    for _ in 0..holes {
        let (hw, hh) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        if nx < hw + 3 || ny < hh {
            continue;
        }
        let j0 = rng.gen_range(1..=nx - 1 - hw);
        let i0 = rng.gen_range(0..=ny - hh);
        let spot: Vec<usize> = (i0..i0 + hh).flat_map(|i| (j0..j0 + hw).map(move |j| i * nx + j)).collect();
        if spot.iter().all(|&k| cells[k] == Cell::Interior) {
            for k in spot {
                cells[k] = Cell::Hole(next);
            }
            next += 1;
        }
    }
    for k in 0..cells.len() {
        if cells[k] == Cell::Interior && rng.gen_bool(0.08) {
            cells[k] = Cell::Exterior;
        }
    }
    let grid = Grid::from_cells(nx, ny, cells).expect("consistent shape");
    let convention = if rng.gen_bool(0.5) { Convention::Open } else { Convention::Closed };
    let family = PathFamily::between(END_E, END_F, convention);
    let mode = match mode_index {
        0 => Mode::Classical,
        1 => {
            let mut labels: Vec<Label> = (0..next).collect();
            labels.shuffle(rng);
            let keep = rng.gen_range(0..=labels.len());
            Mode::Transboundary(labels[..keep].iter().copied().collect::<BTreeSet<_>>())
        }
        _ => Mode::Carpet,
    };
    TinyCase { grid, family, mode }
}
