//! The operator algebra of `x = Ax + Bx`: superposition operators `N_f`,
//! `N_g`, inner operators `T`, `Q` with deviating arguments, the nonlinear
//! Volterra operator `U`, the linear kernel operator `K`, and the
//! compositions `A = N_f U Q`, `B = N_g T`.

mod inner;
mod kernel;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use inner::{
    DampedQuadraticVolterra, Deviation, Dilation, FnMap, InnerMap, InnerOperator, SaturatingCubicWithMean, ZeroMap,
};
pub use kernel::{
    apply_kernel_linear, apply_kernel_nonlinear, estimate_kernel_norm, volterra_at, Kernel2, KernelField3,
    KernelNormEstimate, KernelNormOptions,
};

use crate::error::{Error, Result};
use crate::l1::{GridFunction, TimeFunction};

/// `f(t, x)` with its declared growth bound `|f(t,x)| <= a(t) + b|x|`.
#[derive(Clone)]
pub struct ScalarField2 {
    label: String,
    eval: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    /// `a` or `a₁`.
    pub envelope_offset: TimeFunction,
    /// `b` or `b₁`.
    pub envelope_slope: f64,
}

impl fmt::Debug for ScalarField2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField2")
            .field("label", &self.label)
            .field("offset", &self.envelope_offset)
            .field("slope", &self.envelope_slope)
            .finish()
    }
}

impl ScalarField2 {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        envelope_offset: TimeFunction,
        envelope_slope: f64,
    ) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(f),
            envelope_offset,
            envelope_slope,
        }
    }

    pub fn zero() -> Self {
        Self::new("0", |_, _| 0.0, TimeFunction::zero(), 0.0)
    }

    /// `(t, x) ↦ x`.
    pub fn identity() -> Self {
        Self::new("x", |_, x| x, TimeFunction::zero(), 1.0)
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        (self.eval)(t, x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Where the value of `‖K‖` came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum NormSource {
    /// Supplied exactly by the user.
    Declared,
    /// Computed by [`estimate_kernel_norm`].
    Estimated { refinement_slack: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelNorm {
    pub value: f64,
    #[serde(flatten)]
    pub source: NormSource,
}

impl KernelNorm {
    pub fn declared(value: f64) -> Self {
        Self {
            value,
            source: NormSource::Declared,
        }
    }

    pub fn estimated(est: &KernelNormEstimate) -> Self {
        Self {
            value: est.value,
            source: NormSource::Estimated {
                refinement_slack: est.refinement_slack,
            },
        }
    }
}

/// The data `(g, f, k, u, T, Q)` of
/// `x(t) = g(t, (Tx)(t)) + f(t, ∫_0^t k(t,s) u(t,s,(Qx)(s)) ds)` together
/// with all envelope constants and `‖K‖`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub g: ScalarField2,
    pub f: ScalarField2,
    pub k: Kernel2,
    pub u: KernelField3,
    pub t_op: InnerOperator,
    pub q_op: InnerOperator,
    pub kernel_norm: KernelNorm,
}

impl ProblemSpec {
    /// Rejects negative or non-finite constants and non-positive deviation slopes.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let mut nonneg = |name: &str, v: f64| {
            if !(v >= 0.0) || !v.is_finite() {
                bad.push(format!("{name} = {v} must be a nonnegative real"));
            }
        };
        nonneg("b", self.g.envelope_slope);
        nonneg("b1", self.f.envelope_slope);
        nonneg("rho1", self.t_op.envelope_factor);
        nonneg("rho2", self.q_op.envelope_factor);
        nonneg("beta", self.u.envelope_slope);
        nonneg("lambda", self.u.modulus_slope);
        nonneg("kernel_norm", self.kernel_norm.value);
        for (name, v) in [
            ("m", self.t_op.deviation_slope_min),
            ("M", self.q_op.deviation_slope_min),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                bad.push(format!("{name} = {v} must be a positive real"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Specification(bad.join("; ")))
        }
    }
}

/// `(N_f x)(t) = f(t, x(t))`.
pub fn superpose(field: &ScalarField2, x: &GridFunction) -> Result<GridFunction> {
    x.map_cells(&format!("superposition by {}", field.label()), |t, v| field.eval(t, v))
}

/// `A x = N_f U Q x`: `Q` first, then `U`, then superposition by `f`.
pub fn apply_a(spec: &ProblemSpec, x: &GridFunction) -> Result<GridFunction> {
    let qx = spec.q_op.apply(x)?;
    let uqx = apply_kernel_nonlinear(&spec.k, &spec.u, &qx)?;
    superpose(&spec.f, &uqx)
}

/// `B x = N_g T x`.
pub fn apply_b(spec: &ProblemSpec, x: &GridFunction) -> Result<GridFunction> {
    superpose(&spec.g, &spec.t_op.apply(x)?)
}

/// `Ax + Bx`.
pub fn apply_sum(spec: &ProblemSpec, x: &GridFunction) -> Result<GridFunction> {
    Ok(apply_a(spec, x)?.add(&apply_b(spec, x)?))
}

/// `‖x - Ax - Bx‖`.
pub fn residual(spec: &ProblemSpec, x: &GridFunction) -> Result<f64> {
    Ok(x.sub(&apply_sum(spec, x)?).norm())
}
