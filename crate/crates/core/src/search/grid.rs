use crate::error::{Error, Result};
use crate::sets::GridSet;

/// The square `{(a₁+xq, a₂+yq) : 0 ≤ x,y < len}` inside a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridApWitness {
    pub start: (usize, usize),
    pub gap: usize,
    pub len: usize,
}

impl GridApWitness {
    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len).flat_map(move |x| (0..self.len).map(move |y| (self.start.0 + x * self.gap, self.start.1 + y * self.gap)))
    }
}

/// First square of side `r` in `grid`, ordered by gap, then `a₁`, then `a₂`.
pub fn find_ap_grid(grid: &GridSet, r: usize) -> Result<Option<GridApWitness>> {
    if r == 0 {
        return Err(Error::Precondition("progression length must be at least 1".into()));
    }
    let n = grid.depth();
    if r == 1 {
        return Ok(grid.iter().next().map(|start| GridApWitness { start, gap: 1, len: 1 }));
    }
    for gap in 1..=n.saturating_sub(1) / (r - 1) {
        let span = gap * (r - 1);
        for a1 in 0..n - span {
            for a2 in 0..n - span {
                let w = GridApWitness { start: (a1, a2), gap, len: r };
                if w.points().all(|(i, j)| grid.contains(i, j)) {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}
