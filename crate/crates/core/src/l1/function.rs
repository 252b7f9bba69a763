use crate::error::{Error, Result};
use crate::l1::grid::Grid;
use crate::l1::subset::MeasurableSubset;

/// A real function on `[0, T_max]`, linear on every cell of its grid and
/// extended by zero beyond `T_max`.
///
/// Each cell carries its own pair of endpoint values, so jumps at nodes are
/// representable exactly (indicators, truncated bumps). Functions built from
/// nodal samples are continuous. Point evaluation is right-continuous.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    left: Vec<f64>,
    right: Vec<f64>,
}

/// Absolute pieces `(length, start, end)` of `|x|`, each linear and
/// nonnegative.
type AbsPiece = (f64, f64, f64);

#[inline]
fn abs_linear_integral(len: f64, va: f64, vb: f64) -> f64 {
    if va * vb >= 0.0 {
        0.5 * len * (va.abs() + vb.abs())
    } else {
        0.5 * len * (va * va + vb * vb) / (va.abs() + vb.abs())
    }
}

#[inline]
fn lerp(a: f64, b: f64, va: f64, vb: f64, t: f64) -> f64 {
    if b == a {
        return va;
    }
    let w = (t - a) / (b - a);
    va + (vb - va) * w
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Input(format!("{what} contains a non-finite value ({v})")));
    }
    Ok(())
}

impl GridFunction {
    pub fn zero(grid: &Grid) -> Self {
        let n = grid.cells();
        Self {
            grid: grid.clone(),
            left: vec![0.0; n],
            right: vec![0.0; n],
        }
    }

    /// Continuous interpolant of `f` at the grid nodes.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: &Grid, f: F) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().iter().map(|&t| f(t)).collect();
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Evaluation {
                what: "sampled function".into(),
                t: grid.nodes()[i],
                arg: *v,
            });
        }
        Self::from_nodal(grid, values)
    }

    pub fn from_nodal(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes().len() {
            return Err(Error::Input(format!(
                "expected {} nodal values, got {}",
                grid.nodes().len(),
                values.len()
            )));
        }
        check_finite(&values, "nodal values")?;
        let left = values[..values.len() - 1].to_vec();
        let right = values[1..].to_vec();
        Ok(Self {
            grid: grid.clone(),
            left,
            right,
        })
    }

    pub fn from_cells(grid: &Grid, left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        if left.len() != grid.cells() || right.len() != grid.cells() {
            return Err(Error::Input(format!(
                "expected {} cell values, got {} / {}",
                grid.cells(),
                left.len(),
                right.len()
            )));
        }
        check_finite(&left, "cell values")?;
        check_finite(&right, "cell values")?;
        Ok(Self {
            grid: grid.clone(),
            left,
            right,
        })
    }

    pub fn piecewise_constant(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        Self::from_cells(grid, values.clone(), values)
    }

    /// `height · 1_[lo, hi]`, with `lo` and `hi` inserted as grid nodes so the
    /// jumps are exact.
    pub fn indicator(grid: &Grid, lo: f64, hi: f64, height: f64) -> Result<Self> {
        if !(hi > lo) || lo < 0.0 || !height.is_finite() {
            return Err(Error::Input(format!("bad indicator [{lo}, {hi}] x {height}")));
        }
        let g = grid.with_breakpoints(&[lo, hi]);
        let values = g
            .nodes()
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                if mid > lo && mid < hi {
                    height
                } else {
                    0.0
                }
            })
            .collect();
        Self::piecewise_constant(&g, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t_max(&self) -> f64 {
        self.grid.t_max()
    }

    /// Endpoint values `(left, right)` of cell `i`.
    pub fn cell_values(&self, i: usize) -> (f64, f64) {
        (self.left[i], self.right[i])
    }

    pub fn left_values(&self) -> &[f64] {
        &self.left
    }

    pub fn right_values(&self) -> &[f64] {
        &self.right
    }

    pub fn is_continuous(&self) -> bool {
        self.right[..self.right.len() - 1]
            .iter()
            .zip(&self.left[1..])
            .all(|(a, b)| a == b)
    }

    /// Value at every node: right limit at interior nodes, left limit at `T_max`.
    pub fn nodal_values(&self) -> Vec<f64> {
        let mut v = self.left.clone();
        v.push(self.right[self.right.len() - 1]);
        v
    }

    /// Right-continuous evaluation; zero outside `[0, T_max]`.
    pub fn eval(&self, t: f64) -> f64 {
        match self.grid.cell_of(t) {
            None => 0.0,
            Some(i) => {
                let n = self.grid.nodes();
                lerp(n[i], n[i + 1], self.left[i], self.right[i], t)
            }
        }
    }

    /// Limit from the left at `t`; zero at `t <= 0` and beyond `T_max`.
    pub fn eval_left(&self, t: f64) -> f64 {
        match self.grid.cell_left_of(t) {
            None => 0.0,
            Some(i) => {
                let n = self.grid.nodes();
                lerp(n[i], n[i + 1], self.left[i], self.right[i], t)
            }
        }
    }

    /// Limit from the right at `t`; zero at and beyond `T_max`.
    pub fn eval_right(&self, t: f64) -> f64 {
        if t >= self.t_max() {
            return 0.0;
        }
        self.eval(t)
    }

    /// Representation on another grid. Exact whenever `grid` contains all of
    /// this function's nodes inside its extent.
    pub fn resample(&self, grid: &Grid) -> GridFunction {
        if grid == &self.grid {
            return self.clone();
        }
        let (left, right) = grid
            .nodes()
            .windows(2)
            .map(|w| (self.eval_right(w[0]), self.eval_left(w[1])))
            .unzip();
        GridFunction {
            grid: grid.clone(),
            left,
            right,
        }
    }

    /// Applies `f(t, value)` at both endpoints of every cell.
    pub fn map_cells<F: Fn(f64, f64) -> f64>(&self, what: &str, f: F) -> Result<GridFunction> {
        let n = self.grid.nodes();
        let mut left = Vec::with_capacity(self.left.len());
        let mut right = Vec::with_capacity(self.right.len());
        for i in 0..self.left.len() {
            let l = f(n[i], self.left[i]);
            let r = f(n[i + 1], self.right[i]);
            if !l.is_finite() {
                return Err(Error::Evaluation {
                    what: what.into(),
                    t: n[i],
                    arg: self.left[i],
                });
            }
            if !r.is_finite() {
                return Err(Error::Evaluation {
                    what: what.into(),
                    t: n[i + 1],
                    arg: self.right[i],
                });
            }
            left.push(l);
            right.push(r);
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            left,
            right,
        })
    }

    /// Pointwise combination on the merged grid.
    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &GridFunction, f: F) -> GridFunction {
        let grid = self.grid.merge(&other.grid);
        let a = self.resample(&grid);
        let b = other.resample(&grid);
        let left = a.left.iter().zip(&b.left).map(|(&x, &y)| f(x, y)).collect();
        let right = a.right.iter().zip(&b.right).map(|(&x, &y)| f(x, y)).collect();
        GridFunction { grid, left, right }
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            left: self.left.iter().map(|v| c * v).collect(),
            right: self.right.iter().map(|v| c * v).collect(),
        }
    }

    /// `a · self + b · other`.
    pub fn axpby(&self, a: f64, other: &GridFunction, b: f64) -> GridFunction {
        self.zip_with(other, |x, y| a * x + b * y)
    }

    pub fn max_abs(&self) -> f64 {
        self.left.iter().chain(&self.right).fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Signed integral over `[0, T_max]`.
    pub fn integral(&self) -> f64 {
        let n = self.grid.nodes();
        (0..self.left.len())
            .map(|i| 0.5 * (n[i + 1] - n[i]) * (self.left[i] + self.right[i]))
            .sum()
    }

    /// `‖x‖ = ∫ |x|` over the half-line.
    pub fn norm(&self) -> f64 {
        let n = self.grid.nodes();
        (0..self.left.len())
            .map(|i| abs_linear_integral(n[i + 1] - n[i], self.left[i], self.right[i]))
            .sum()
    }

    /// `∫_I |x|`, exact for the piecewise-linear representation.
    pub fn integrate_abs(&self, subset: &MeasurableSubset) -> f64 {
        let n = self.grid.nodes();
        let t_max = self.t_max();
        let mut total = 0.0;
        for &(lo, hi) in subset.intervals() {
            if lo >= t_max {
                continue;
            }
            let hi = hi.min(t_max);
            let Some(mut i) = self.grid.cell_of(lo) else {
                continue;
            };
            while i < self.left.len() && n[i] < hi {
                let (a, b) = (n[i], n[i + 1]);
                let p = a.max(lo);
                let q = b.min(hi);
                if q > p {
                    let vp = lerp(a, b, self.left[i], self.right[i], p);
                    let vq = lerp(a, b, self.left[i], self.right[i], q);
                    total += abs_linear_integral(q - p, vp, vq);
                }
                i += 1;
            }
        }
        total
    }

    /// `∫_τ^∞ |x|`.
    pub fn tail_mass(&self, tau: f64) -> f64 {
        if tau >= self.t_max() {
            return 0.0;
        }
        let subset = MeasurableSubset::tail(tau.max(0.0)).expect("tail of a nonnegative point");
        self.integrate_abs(&subset)
    }

    fn abs_pieces(&self) -> Vec<AbsPiece> {
        let n = self.grid.nodes();
        let mut pieces = Vec::with_capacity(self.left.len() + 8);
        for i in 0..self.left.len() {
            let (a, b) = (n[i], n[i + 1]);
            let (va, vb) = (self.left[i], self.right[i]);
            if va * vb < 0.0 {
                let root = a + (b - a) * va / (va - vb);
                pieces.push((root - a, va.abs(), 0.0));
                pieces.push((b - root, 0.0, vb.abs()));
            } else {
                pieces.push((b - a, va.abs(), vb.abs()));
            }
        }
        pieces
    }

    /// `sup { ∫_Ω |x| : meas(Ω) <= ε }`.
    ///
    /// The optimum fills `Ω` from the top super-level sets of `|x|`. With
    /// `m(λ) = meas{|x| > λ}`, the value is `λ* ε + ∫ (|x| - λ*)_+` at the
    /// level `λ*` where `m` drops to `ε`; `λ*` is found by bisection.
    pub fn worst_subset_mass(&self, eps: f64) -> f64 {
        if !(eps > 0.0) {
            return 0.0;
        }
        let pieces = self.abs_pieces();
        let level_measure = |lam: f64| -> f64 {
            pieces
                .iter()
                .map(|&(len, p, q)| {
                    let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
                    if lam >= hi {
                        0.0
                    } else if lam < lo {
                        len
                    } else {
                        len * (hi - lam) / (hi - lo)
                    }
                })
                .sum()
        };
        let excess = |lam: f64| -> f64 {
            pieces
                .iter()
                .map(|&(len, p, q)| {
                    let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
                    if lam >= hi {
                        0.0
                    } else if lam <= lo {
                        len * (0.5 * (p + q) - lam)
                    } else {
                        len * (hi - lam) * (hi - lam) / (2.0 * (hi - lo))
                    }
                })
                .sum()
        };
        if level_measure(0.0) <= eps {
            return self.norm();
        }
        let mut lo = 0.0;
        let mut hi = pieces.iter().fold(0.0_f64, |m, &(_, p, q)| m.max(p).max(q));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if level_measure(mid) > eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi * eps + excess(hi)
    }

    /// Heuristic L¹ interpolation-error estimate `Σ h³ |x''| / 12` from second
    /// divided differences at interior nodes where the function is continuous.
    pub fn representation_error(&self) -> f64 {
        let n = self.grid.nodes();
        let mut err = 0.0;
        for i in 1..self.left.len() {
            if self.right[i - 1] != self.left[i] {
                continue;
            }
            let h0 = n[i] - n[i - 1];
            let h1 = n[i + 1] - n[i];
            let v0 = self.left[i - 1];
            let v1 = self.left[i];
            let v2 = self.right[i];
            let second = 2.0 * ((v2 - v1) / h1 - (v1 - v0) / h0) / (h0 + h1);
            err += second.abs() * 0.5 * (h0 * h0 * h0 + h1 * h1 * h1) / 12.0;
        }
        err
    }
}
