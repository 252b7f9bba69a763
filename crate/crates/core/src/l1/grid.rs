use std::sync::Arc;

use crate::error::{Error, Result};

/// Strictly increasing nodes `0 = t_0 < t_1 < ... < t_N = T_max`.
///
/// Cheap to clone; the nodes are shared.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Arc<[f64]>,
}

impl Grid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Input("a grid needs at least two nodes".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::Input(format!("grid must start at 0, got {}", nodes[0])));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::Input(format!(
                    "grid nodes must be finite and strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { nodes: nodes.into() })
    }

    pub fn uniform(t_max: f64, cells: usize) -> Result<Self> {
        check_extent(t_max, cells)?;
        let h = t_max / cells as f64;
        let mut nodes: Vec<f64> = (0..=cells).map(|i| i as f64 * h).collect();
        nodes[cells] = t_max;
        Self::new(nodes)
    }

    /// Exponentially stretched nodes `t_i = T (e^{κ i/N} - 1) / (e^κ - 1)`:
    /// fine near 0, coarse in the tail. `stretch = κ`; `κ → 0` recovers the
    /// uniform grid.
    pub fn geometric(t_max: f64, cells: usize, stretch: f64) -> Result<Self> {
        check_extent(t_max, cells)?;
        if !(stretch >= 0.0) || !stretch.is_finite() {
            return Err(Error::Input(format!(
                "stretch must be a nonnegative real, got {stretch}"
            )));
        }
        if stretch < 1e-8 {
            return Self::uniform(t_max, cells);
        }
        let denom = stretch.exp_m1();
        let mut nodes: Vec<f64> = (0..=cells)
            .map(|i| t_max * (stretch * i as f64 / cells as f64).exp_m1() / denom)
            .collect();
        nodes[cells] = t_max;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn t_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn width(&self, cell: usize) -> f64 {
        self.nodes[cell + 1] - self.nodes[cell]
    }

    pub fn max_width(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Cell `i` with `t_i <= t < t_{i+1}`; the last cell also owns `T_max`.
    /// `None` outside `[0, T_max]`.
    pub fn cell_of(&self, t: f64) -> Option<usize> {
        if !(t >= 0.0) || t > self.t_max() {
            return None;
        }
        let idx = self.nodes.partition_point(|&n| n <= t);
        Some(idx.saturating_sub(1).min(self.cells() - 1))
    }

    /// Cell `i` with `t_i < t <= t_{i+1}` (the cell seen from the left of `t`).
    pub fn cell_left_of(&self, t: f64) -> Option<usize> {
        if !(t > 0.0) || t > self.t_max() {
            return None;
        }
        let idx = self.nodes.partition_point(|&n| n < t);
        Some(idx - 1)
    }

    /// Union of the node sets; the extent is the larger of the two.
    pub fn merge(&self, other: &Grid) -> Grid {
        if self == other {
            return self.clone();
        }
        let mut nodes = Vec::with_capacity(self.nodes.len() + other.nodes.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.nodes, &other.nodes);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (Some(&x), Some(&y)) if y < x => {
                    j += 1;
                    y
                }
                (Some(&x), Some(_)) => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            nodes.push(next);
        }
        Grid { nodes: nodes.into() }
    }

    /// Bisects every cell.
    pub fn refine(&self) -> Grid {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.t_max());
        Grid { nodes: nodes.into() }
    }

    /// Adds breakpoints inside `(0, T_max)`; points outside are ignored.
    pub fn with_breakpoints(&self, points: &[f64]) -> Grid {
        let mut extra: Vec<f64> = points
            .iter()
            .copied()
            .filter(|&p| p > 0.0 && p < self.t_max())
            .collect();
        extra.sort_by(f64::total_cmp);
        extra.dedup();
        extra.insert(0, 0.0);
        extra.push(self.t_max());
        let other = Grid { nodes: extra.into() };
        self.merge(&other)
    }
}

fn check_extent(t_max: f64, cells: usize) -> Result<()> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Input(format!("T_max must be a positive real, got {t_max}")));
    }
    if cells == 0 {
        return Err(Error::Input("a grid needs at least one cell".into()));
    }
    Ok(())
}
