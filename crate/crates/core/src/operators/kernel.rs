//! Volterra-type integral operators on grid functions and the L¹ → L¹
//! norm of the linear kernel operator.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::l1::quad::{self, gauss2_points, QuadOptions};
use crate::l1::{Grid, GridFunction, TimeFunction};

/// A kernel `k(t, s)` on the triangle `0 <= s <= t`.
#[derive(Clone)]
pub struct Kernel2 {
    label: String,
    eval: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    zero: bool,
}

impl fmt::Debug for Kernel2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kernel2({})", self.label)
    }
}

impl Kernel2 {
    pub fn new(label: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(f),
            zero: false,
        }
    }

    pub fn zero() -> Self {
        Self {
            label: "0".into(),
            eval: Arc::new(|_, _| 0.0),
            zero: true,
        }
    }

    #[inline]
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        (self.eval)(t, s)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

/// `u(t, s, x)` with its declared growth bound `|u| <= α(s) + β|x|` and
/// modulus `|u(t,s,x) - u(t+δ,s,x)| <= h(δ) [γ_mod(s) + λ|x|]`.
#[derive(Clone)]
pub struct KernelField3 {
    label: String,
    eval: Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>,
    /// `α`.
    pub envelope_offset: TimeFunction,
    /// `β`.
    pub envelope_slope: f64,
    /// `γ_mod`.
    pub modulus_weight: TimeFunction,
    /// `λ`.
    pub modulus_slope: f64,
    modulus: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    zero: bool,
}

impl fmt::Debug for KernelField3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelField3")
            .field("label", &self.label)
            .field("alpha", &self.envelope_offset)
            .field("beta", &self.envelope_slope)
            .field("gamma_mod", &self.modulus_weight)
            .field("lambda", &self.modulus_slope)
            .finish()
    }
}

impl KernelField3 {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        alpha: TimeFunction,
        beta: f64,
        gamma_mod: TimeFunction,
        lambda: f64,
        modulus: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(f),
            envelope_offset: alpha,
            envelope_slope: beta,
            modulus_weight: gamma_mod,
            modulus_slope: lambda,
            modulus: Arc::new(modulus),
            zero: false,
        }
    }

    pub fn zero() -> Self {
        Self::zero_with_envelopes(TimeFunction::zero(), 0.0, TimeFunction::zero(), 0.0, |d: f64| d.abs())
    }

    /// `u ≡ 0` that still carries declared envelope data.
    pub fn zero_with_envelopes(
        alpha: TimeFunction,
        beta: f64,
        gamma_mod: TimeFunction,
        lambda: f64,
        modulus: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut u = Self::new("0", |_, _, _| 0.0, alpha, beta, gamma_mod, lambda, modulus);
        u.zero = true;
        u
    }

    #[inline]
    pub fn eval(&self, t: f64, s: f64, x: f64) -> f64 {
        (self.eval)(t, s, x)
    }

    /// `h(δ)`.
    #[inline]
    pub fn modulus(&self, delta: f64) -> f64 {
        (self.modulus)(delta)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

/// Gauss abscissae, weights and sampled values of `x` on every cell.
struct CellSamples {
    s: Vec<[f64; 2]>,
    half_width: Vec<f64>,
    x: Vec<[f64; 2]>,
}

fn cell_samples(x: &GridFunction) -> CellSamples {
    let n = x.grid().nodes();
    let cells = x.grid().cells();
    let mut s = Vec::with_capacity(cells);
    let mut half_width = Vec::with_capacity(cells);
    let mut xv = Vec::with_capacity(cells);
    for i in 0..cells {
        let (a, b) = (n[i], n[i + 1]);
        let (va, vb) = x.cell_values(i);
        let pts = gauss2_points(a, b);
        let lerp = |p: f64| va + (vb - va) * (p - a) / (b - a);
        s.push(pts);
        half_width.push(0.5 * (b - a));
        xv.push([lerp(pts[0]), lerp(pts[1])]);
    }
    CellSamples { s, half_width, x: xv }
}

fn non_finite(what: &str, t: f64, s: f64) -> Error {
    Error::Evaluation {
        what: what.into(),
        t,
        arg: s,
    }
}

/// `(Kx)(t) = ∫_0^t |k(t,s)| x(s) ds` at every node of x's grid, using the
/// two-point Gauss rule on each cell below `t`.
pub fn apply_kernel_linear(k: &Kernel2, x: &GridFunction) -> Result<GridFunction> {
    let grid = x.grid();
    if k.is_zero() {
        return Ok(GridFunction::zero(grid));
    }
    let cs = cell_samples(x);
    let nodes = grid.nodes();
    let mut out = Vec::with_capacity(nodes.len());
    for (i, &t) in nodes.iter().enumerate() {
        let mut acc = 0.0;
        for j in 0..i {
            let [s0, s1] = cs.s[j];
            let [x0, x1] = cs.x[j];
            acc += cs.half_width[j] * (k.eval(t, s0).abs() * x0 + k.eval(t, s1).abs() * x1);
        }
        if !acc.is_finite() {
            return Err(non_finite("linear kernel operator", t, f64::NAN));
        }
        out.push(acc);
    }
    GridFunction::from_nodal(grid, out)
}

/// `(Ux)(t) = ∫_0^t k(t,s) u(t,s,x(s)) ds` at every node of x's grid.
pub fn apply_kernel_nonlinear(k: &Kernel2, u: &KernelField3, x: &GridFunction) -> Result<GridFunction> {
    let grid = x.grid();
    if k.is_zero() || u.is_zero() {
        return Ok(GridFunction::zero(grid));
    }
    let cs = cell_samples(x);
    let nodes = grid.nodes();
    let mut out = Vec::with_capacity(nodes.len());
    for (i, &t) in nodes.iter().enumerate() {
        let mut acc = 0.0;
        for j in 0..i {
            let [s0, s1] = cs.s[j];
            let [x0, x1] = cs.x[j];
            acc += cs.half_width[j] * (k.eval(t, s0) * u.eval(t, s0, x0) + k.eval(t, s1) * u.eval(t, s1, x1));
        }
        if !acc.is_finite() {
            return Err(non_finite("nonlinear Volterra operator", t, f64::NAN));
        }
        out.push(acc);
    }
    GridFunction::from_nodal(grid, out)
}

/// `(Ux)(t)` at an arbitrary `t`, splitting the cell that contains `t`.
pub fn volterra_at(k: &Kernel2, u: &KernelField3, x: &GridFunction, t: f64) -> Result<f64> {
    let n = x.grid().nodes();
    let upper = t.min(x.t_max());
    let mut acc = 0.0;
    for i in 0..x.grid().cells() {
        let a = n[i];
        if a >= upper {
            break;
        }
        let b = n[i + 1].min(upper);
        let (va, vb) = x.cell_values(i);
        let (ca, cb) = (n[i], n[i + 1]);
        acc += quad::gauss2(a, b, |s| {
            let v = va + (vb - va) * (s - ca) / (cb - ca);
            k.eval(t, s) * u.eval(t, s, v)
        });
    }
    // beyond T_max the zero extension still feeds u(t, s, 0)
    if t > x.t_max() && !u.is_zero() {
        acc += quad::integrate(
            |s| k.eval(t, s) * u.eval(t, s, 0.0),
            x.t_max(),
            t,
            QuadOptions::default(),
        )?
        .value;
    }
    if !acc.is_finite() {
        return Err(non_finite("nonlinear Volterra operator", t, f64::NAN));
    }
    Ok(acc)
}

/// Options for [`estimate_kernel_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelNormOptions {
    /// Upper limit of the column integrals.
    pub t_max: f64,
    /// Number of cells of the first column grid.
    pub initial_points: usize,
    /// Doubling stops once the grid supremum moves by less than this, relatively.
    pub rel_change: f64,
    pub max_points: usize,
    /// Largest acceptable `∫_{T_max}^∞ |k(t,s*)| dt`, relative to the norm.
    pub tail_tolerance: f64,
}

impl Default for KernelNormOptions {
    fn default() -> Self {
        Self {
            t_max: crate::l1::DEFAULT_T_MAX,
            initial_points: 64,
            rel_change: 1e-6,
            max_points: 1 << 15,
            tail_tolerance: 1e-6,
        }
    }
}

/// Result of [`estimate_kernel_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelNormEstimate {
    pub value: f64,
    /// Column position `s*` attaining the supremum.
    pub argmax: f64,
    /// Change of the estimate during the last refinement (plus the final polish).
    pub refinement_slack: f64,
    /// `∫_{T_max}^∞ |k(t, s*)| dt`.
    pub tail_bound: f64,
    pub columns_evaluated: usize,
}

fn column_mass(k: &Kernel2, s: f64, t_max: f64) -> Result<f64> {
    if s >= t_max {
        return Ok(0.0);
    }
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 2000,
    };
    Ok(quad::integrate(|t| k.eval(t, s).abs(), s, t_max, opts)?.value)
}

/// `sup_s ∫_s^{T_max} |k(t, s)| dt`, the norm of `x ↦ ∫_0^t |k(t,s)| x(s) ds`
/// on L¹ of the truncated half-line.
///
/// The columns are scanned on a stretched grid that is doubled until the
/// supremum stabilizes, then a golden-section search polishes the maximizer.
/// A column tail beyond `T_max` larger than the tolerance is an error.
pub fn estimate_kernel_norm(k: &Kernel2, opts: &KernelNormOptions) -> Result<KernelNormEstimate> {
    if k.is_zero() {
        return Ok(KernelNormEstimate {
            value: 0.0,
            argmax: 0.0,
            refinement_slack: 0.0,
            tail_bound: 0.0,
            columns_evaluated: 0,
        });
    }
    let t_max = opts.t_max;
    let mut points = opts.initial_points.max(4);
    let mut columns = 0usize;
    let scan = |cells: usize, columns: &mut usize| -> Result<(f64, usize, Grid)> {
        let grid = Grid::geometric(t_max, cells, crate::l1::DEFAULT_STRETCH)?;
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, &s) in grid.nodes().iter().enumerate() {
            let v = column_mass(k, s, t_max)?;
            *columns += 1;
            if v > best.0 {
                best = (v, i);
            }
        }
        Ok((best.0, best.1, grid))
    };
    let (mut sup, mut idx, mut grid) = scan(points, &mut columns)?;
    let mut change = f64::INFINITY;
    while points < opts.max_points {
        points *= 2;
        let (s2, i2, g2) = scan(points, &mut columns)?;
        change = (s2 - sup).abs();
        sup = s2;
        idx = i2;
        grid = g2;
        if change <= opts.rel_change * sup.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }

    // golden-section polish on the bracket around the grid maximizer
    let nodes = grid.nodes();
    let mut lo = nodes[idx.saturating_sub(1)];
    let mut hi = nodes[(idx + 1).min(nodes.len() - 1)];
    let ratio = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let mut fc = column_mass(k, c, t_max)?;
    let mut fd = column_mass(k, d, t_max)?;
    columns += 2;
    for _ in 0..80 {
        if hi - lo <= 1e-12 * (1.0 + hi.abs()) {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = column_mass(k, c, t_max)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = column_mass(k, d, t_max)?;
        }
        columns += 1;
    }
    let (polished, arg) = if fc > fd { (fc, c) } else { (fd, d) };
    let (value, argmax) = if polished > sup {
        (polished, arg)
    } else {
        (sup, nodes[idx])
    };
    let slack = if change.is_finite() { change } else { 0.0 } + (value - sup).abs();

    let tail = quad::integrate_to_infinity(|t| k.eval(t, argmax).abs(), t_max, QuadOptions::default());
    let tail_bound = match tail {
        Ok(r) if r.converged && r.value.is_finite() => r.value,
        Ok(r) => {
            return Err(Error::Truncation(format!(
                "kernel column at s = {argmax} does not decay beyond T_max = {t_max} (tail estimate {})",
                r.value
            )))
        }
        Err(e) => return Err(e),
    };
    if tail_bound > opts.tail_tolerance * value.max(1.0) {
        return Err(Error::Truncation(format!(
            "kernel column tail beyond T_max = {t_max} is {tail_bound:e}, above tolerance"
        )));
    }
    Ok(KernelNormEstimate {
        value,
        argmax,
        refinement_slack: slack,
        tail_bound,
        columns_evaluated: columns,
    })
}
