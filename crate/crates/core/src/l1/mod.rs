//! Integrable functions on the half-line: grids, piecewise-linear grid
//! functions with zero extension, measurable subsets, quadrature, and the
//! subset-extremal integrals behind the weak-noncompactness measures.

mod function;
mod grid;
pub mod quad;
mod subset;

use std::fmt;
use std::sync::Arc;

pub use function::GridFunction;
pub use grid::Grid;
pub use subset::MeasurableSubset;

use crate::error::Result;
use quad::QuadOptions;

/// Default truncation point of the half-line.
pub const DEFAULT_T_MAX: f64 = 40.0;
/// Default number of cells.
pub const DEFAULT_CELLS: usize = 4096;
/// Default stretch of the geometric grid.
pub const DEFAULT_STRETCH: f64 = 6.0;

/// The default discretization: 4096 stretched cells on `[0, 40]`.
pub fn default_grid() -> Grid {
    Grid::geometric(DEFAULT_T_MAX, DEFAULT_CELLS, DEFAULT_STRETCH).expect("default grid is valid")
}

/// `∫_I |x|`.
pub fn integrate_abs(x: &GridFunction, subset: &MeasurableSubset) -> f64 {
    x.integrate_abs(subset)
}

/// `‖x - y‖` evaluated on the merged grid.
pub fn distance(x: &GridFunction, y: &GridFunction) -> f64 {
    x.sub(y).norm()
}

/// `∫_τ^∞ |x|`.
pub fn tail_mass(x: &GridFunction, tau: f64) -> f64 {
    x.tail_mass(tau)
}

/// `sup { ∫_Ω |x| : meas(Ω) <= ε }`.
pub fn worst_subset_mass(x: &GridFunction, eps: f64) -> f64 {
    x.worst_subset_mass(eps)
}

/// An analytic function of time, used for envelope data (`a`, `a₁`, `γ₁`,
/// `γ₂`, `α`, the modulus weight). Norms are taken over the whole
/// half-line by adaptive quadrature, so no truncation is involved.
#[derive(Clone)]
pub struct TimeFunction {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    zero: bool,
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeFunction").field("label", &self.label).finish()
    }
}

impl TimeFunction {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            zero: false,
        }
    }

    pub fn zero() -> Self {
        Self {
            label: "0".into(),
            f: Arc::new(|_| 0.0),
            zero: true,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    /// `c · self`.
    pub fn scaled(&self, c: f64) -> TimeFunction {
        if self.zero {
            return self.clone();
        }
        let f = self.f.clone();
        Self::new(format!("{c}*({})", self.label), move |t| c * f(t))
    }

    /// `∫_0^∞ |f|`.
    pub fn norm(&self) -> Result<f64> {
        self.tail(0.0)
    }

    /// `∫_τ^∞ |f|`.
    pub fn tail(&self, tau: f64) -> Result<f64> {
        if self.zero {
            return Ok(0.0);
        }
        let f = &self.f;
        Ok(quad::integrate_to_infinity(|t| f(t).abs(), tau, QuadOptions::default())?.value)
    }

    /// `∫_I |f|`.
    pub fn integrate_abs(&self, subset: &MeasurableSubset) -> Result<f64> {
        if self.zero {
            return Ok(0.0);
        }
        let f = &self.f;
        let mut total = 0.0;
        for &(lo, hi) in subset.intervals() {
            total += if hi.is_infinite() {
                self.tail(lo)?
            } else {
                quad::integrate(|t| f(t).abs(), lo, hi, QuadOptions::default())?.value
            };
        }
        Ok(total)
    }

    /// Continuous interpolant on `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        if self.zero {
            return Ok(GridFunction::zero(grid));
        }
        GridFunction::from_fn(grid, |t| self.eval(t))
    }
}

/// Sum of analytic functions.
pub fn sum_of(label: &str, parts: Vec<TimeFunction>) -> TimeFunction {
    let parts: Vec<TimeFunction> = parts.into_iter().filter(|p| !p.is_zero()).collect();
    if parts.is_empty() {
        return TimeFunction::zero();
    }
    TimeFunction::new(label, move |t| parts.iter().map(|p| p.eval(t)).sum())
}
