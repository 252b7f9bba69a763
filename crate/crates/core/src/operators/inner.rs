//! Inner operators `T` and `Q` together with their declared envelopes
//! `|(Tx)(t)| <= γ(t) + ρ |x(φ(t))|` and deviating arguments `φ`.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::l1::quad::gauss2;
use crate::l1::{GridFunction, TimeFunction};

/// A map `GridFunction -> GridFunction`. Output lives on the input's grid.
pub trait InnerMap: Send + Sync {
    fn apply(&self, x: &GridFunction) -> Result<GridFunction>;
    fn label(&self) -> String;
}

/// Increasing time transformation `φ` at which the unknown is evaluated.
#[derive(Clone)]
pub struct Deviation {
    label: String,
    map: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for Deviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Deviation({})", self.label)
    }
}

impl Deviation {
    pub fn new(label: impl Into<String>, map: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            map: Arc::new(map),
        }
    }

    pub fn identity() -> Self {
        Self::new("t", |t| t)
    }

    /// `φ(t) = slope · t + shift`.
    pub fn linear(slope: f64, shift: f64) -> Self {
        Self::new(format!("{slope}*t+{shift}"), move |t| slope * t + shift)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.map)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `T` or `Q` with its declared envelope data.
#[derive(Clone)]
pub struct InnerOperator {
    map: Arc<dyn InnerMap>,
    /// `γ₁` or `γ₂`.
    pub envelope_offset: TimeFunction,
    /// `ρ₁` or `ρ₂`.
    pub envelope_factor: f64,
    /// `φ` or `ψ`.
    pub deviation: Deviation,
    /// `m` or `M`: declared lower bound on the derivative of the deviation.
    pub deviation_slope_min: f64,
}

impl fmt::Debug for InnerOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InnerOperator")
            .field("map", &self.map.label())
            .field("envelope_offset", &self.envelope_offset)
            .field("envelope_factor", &self.envelope_factor)
            .field("deviation", &self.deviation)
            .field("deviation_slope_min", &self.deviation_slope_min)
            .finish()
    }
}

impl InnerOperator {
    pub fn new(
        map: impl InnerMap + 'static,
        envelope_offset: TimeFunction,
        envelope_factor: f64,
        deviation: Deviation,
        deviation_slope_min: f64,
    ) -> Self {
        Self {
            map: Arc::new(map),
            envelope_offset,
            envelope_factor,
            deviation,
            deviation_slope_min,
        }
    }

    pub fn from_boxed(
        map: Box<dyn InnerMap>,
        envelope_offset: TimeFunction,
        envelope_factor: f64,
        deviation: Deviation,
        deviation_slope_min: f64,
    ) -> Self {
        Self {
            map: Arc::from(map),
            envelope_offset,
            envelope_factor,
            deviation,
            deviation_slope_min,
        }
    }

    /// The identity `x ↦ x` with envelope `|x(t)|`.
    pub fn identity() -> Self {
        Self::new(
            Dilation {
                factor: 1.0,
                slope: 1.0,
            },
            TimeFunction::zero(),
            1.0,
            Deviation::identity(),
            1.0,
        )
    }

    pub fn apply(&self, x: &GridFunction) -> Result<GridFunction> {
        self.map.apply(x)
    }

    pub fn label(&self) -> String {
        self.map.label()
    }
}

/// `x ↦ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroMap;

impl InnerMap for ZeroMap {
    fn apply(&self, x: &GridFunction) -> Result<GridFunction> {
        Ok(GridFunction::zero(x.grid()))
    }
    fn label(&self) -> String {
        "0".into()
    }
}

/// Evaluates `x(slope · t)` cell by cell: left limits at right endpoints,
/// right limits at left endpoints.
fn compose_with_dilation(x: &GridFunction, slope: f64) -> (Vec<f64>, Vec<f64>) {
    let n = x.grid().nodes();
    n.windows(2)
        .map(|w| (x.eval_right(slope * w[0]), x.eval_left(slope * w[1])))
        .unzip()
}

/// `(Tx)(t) = factor · x(slope · t)`.
#[derive(Debug, Clone, Copy)]
pub struct Dilation {
    pub factor: f64,
    pub slope: f64,
}

impl InnerMap for Dilation {
    fn apply(&self, x: &GridFunction) -> Result<GridFunction> {
        if self.slope == 1.0 {
            return Ok(x.scale(self.factor));
        }
        let (l, r) = compose_with_dilation(x, self.slope);
        let f = self.factor;
        GridFunction::from_cells(
            x.grid(),
            l.into_iter().map(|v| f * v).collect(),
            r.into_iter().map(|v| f * v).collect(),
        )
    }
    fn label(&self) -> String {
        format!("{}*x({}t)", self.factor, self.slope)
    }
}

#[inline]
fn saturate(v: f64) -> f64 {
    v / (1.0 + v * v)
}

/// `∫_0^∞ e^{-rate τ} x(τ)/(1 + x(τ)²) dτ` with x's zero extension.
fn weighted_saturated_mean(x: &GridFunction, rate: f64) -> f64 {
    let n = x.grid().nodes();
    (0..x.grid().cells())
        .map(|i| {
            let (a, b) = (n[i], n[i + 1]);
            let (va, vb) = x.cell_values(i);
            gauss2(a, b, |s| {
                let v = va + (vb - va) * (s - a) / (b - a);
                (-rate * s).exp() * saturate(v)
            })
        })
        .sum()
}

/// `(Tx)(t) = x³(φt)/(1 + x²(φt)) + e^{-rate t} ∫_0^∞ e^{-rate τ} x(τ)/(1 + x²(τ)) dτ`
/// with `φ(t) = slope · t`.
#[derive(Debug, Clone, Copy)]
pub struct SaturatingCubicWithMean {
    pub slope: f64,
    pub rate: f64,
}

impl InnerMap for SaturatingCubicWithMean {
    fn apply(&self, x: &GridFunction) -> Result<GridFunction> {
        let mean = weighted_saturated_mean(x, self.rate);
        let (l, r) = compose_with_dilation(x, self.slope);
        let n = x.grid().nodes();
        let cubic = |v: f64| v * v * v / (1.0 + v * v);
        let left = l
            .iter()
            .enumerate()
            .map(|(i, &v)| cubic(v) + (-self.rate * n[i]).exp() * mean)
            .collect();
        let right = r
            .iter()
            .enumerate()
            .map(|(i, &v)| cubic(v) + (-self.rate * n[i + 1]).exp() * mean)
            .collect();
        GridFunction::from_cells(x.grid(), left, right)
    }
    fn label(&self) -> String {
        format!(
            "x^3({s}t)/(1+x^2({s}t)) + e^(-{r}t) int_0^inf e^(-{r}tau) x/(1+x^2) dtau",
            s = self.slope,
            r = self.rate
        )
    }
}

/// `(Qx)(t) = x²(t)/(1 + |x(t)|) ∫_0^t e^{-rate (t+τ)} x(τ)/(1 + x²(τ)) dτ`.
#[derive(Debug, Clone, Copy)]
pub struct DampedQuadraticVolterra {
    pub rate: f64,
}

impl InnerMap for DampedQuadraticVolterra {
    fn apply(&self, x: &GridFunction) -> Result<GridFunction> {
        let n = x.grid().nodes();
        let cells = x.grid().cells();
        let rate = self.rate;
        // running integral of e^{-rate τ} x/(1+x²) at the nodes
        let mut running = Vec::with_capacity(cells + 1);
        running.push(0.0);
        for i in 0..cells {
            let (a, b) = (n[i], n[i + 1]);
            let (va, vb) = x.cell_values(i);
            let piece = gauss2(a, b, |s| {
                let v = va + (vb - va) * (s - a) / (b - a);
                (-rate * s).exp() * saturate(v)
            });
            running.push(running[i] + piece);
        }
        let damp = |v: f64| v * v / (1.0 + v.abs());
        let mut left = Vec::with_capacity(cells);
        let mut right = Vec::with_capacity(cells);
        for i in 0..cells {
            let (va, vb) = x.cell_values(i);
            left.push(damp(va) * (-rate * n[i]).exp() * running[i]);
            right.push(damp(vb) * (-rate * n[i + 1]).exp() * running[i + 1]);
        }
        GridFunction::from_cells(x.grid(), left, right)
    }
    fn label(&self) -> String {
        format!("x^2/(1+|x|) int_0^t e^(-{r}(t+tau)) x/(1+x^2) dtau", r = self.rate)
    }
}

/// Wraps an arbitrary closure as an inner map.
pub struct FnMap<F> {
    pub label: String,
    pub f: F,
}

impl<F> InnerMap for FnMap<F>
where
    F: Fn(&GridFunction) -> Result<GridFunction> + Send + Sync,
{
    fn apply(&self, x: &GridFunction) -> Result<GridFunction> {
        (self.f)(x)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}
