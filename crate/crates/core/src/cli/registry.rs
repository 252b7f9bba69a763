//! Closed registry of parameterized primitives from which problem
//! definitions are assembled.
//!
//! Every primitive is written `{ kind = "...", <param> = <number>, ... }`.
//! Parameters not listed for a kind are rejected; listed parameters with a
//! default may be omitted.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::l1::TimeFunction;
use crate::operators::{
    DampedQuadraticVolterra, Deviation, Dilation, InnerMap, Kernel2, SaturatingCubicWithMean, ZeroMap,
};

/// A primitive selection: a registry kind plus numeric parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveSpec {
    pub kind: String,
    #[serde(flatten)]
    pub params: BTreeMap<String, f64>,
}

impl PrimitiveSpec {
    pub fn new(kind: &str, params: &[(&str, f64)]) -> Self {
        Self {
            kind: kind.into(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn zero() -> Self {
        Self::new("zero", &[])
    }
}

/// Registry slots. Each slot has its own set of kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    TimeFunction,
    Nonlinearity,
    Kernel,
    KernelField,
    InnerOperator,
    Deviation,
    Modulus,
}

impl Slot {
    pub fn name(self) -> &'static str {
        match self {
            Slot::TimeFunction => "time function",
            Slot::Nonlinearity => "nonlinearity",
            Slot::Kernel => "kernel",
            Slot::KernelField => "kernel field u",
            Slot::InnerOperator => "inner operator",
            Slot::Deviation => "deviation",
            Slot::Modulus => "modulus",
        }
    }
}

/// `(kind, [(param, default)])`; `None` marks a required parameter.
type Entry = (&'static str, &'static [(&'static str, Option<f64>)]);

const TIME_FUNCTIONS: &[Entry] = &[
    ("zero", &[]),
    // scale (t + shift)^p / (offset + (t + shift)^q)
    (
        "rational",
        &[
            ("scale", Some(1.0)),
            ("shift", Some(0.0)),
            ("p", None),
            ("q", None),
            ("offset", None),
        ],
    ),
    // scale e^{-rate t}
    ("exp_decay", &[("scale", Some(1.0)), ("rate", None)]),
    // height on [lo, hi), zero elsewhere
    ("indicator", &[("lo", None), ("hi", None), ("height", Some(1.0))]),
];

const NONLINEARITIES: &[Entry] = &[
    ("zero", &[]),
    ("identity", &[("scale", Some(1.0))]),
    ("log1p_square", &[("scale", Some(1.0))]),
    ("arctan_square", &[("scale", Some(1.0))]),
    ("square", &[("scale", Some(1.0))]),
    ("sin", &[("scale", Some(1.0))]),
    ("tanh", &[("scale", Some(1.0))]),
];

const KERNELS: &[Entry] = &[
    ("zero", &[]),
    ("constant", &[("value", None)]),
    // (t_coef t + s_coef s + constant) e^{-rate t}
    (
        "affine_exp",
        &[
            ("t_coef", Some(0.0)),
            ("s_coef", Some(0.0)),
            ("constant", Some(0.0)),
            ("rate", None),
        ],
    ),
    // scale e^{-t_rate t - s_rate s}
    (
        "separable_exp",
        &[("scale", Some(1.0)), ("t_rate", None), ("s_rate", None)],
    ),
    // scale / (1 + (t - s)^2)
    ("cauchy", &[("scale", Some(1.0))]),
];

const KERNEL_FIELDS: &[Entry] = &[
    ("zero", &[]),
    ("linear", &[("scale", Some(1.0))]),
    // (shift+t+s)/(offset+(shift+t+s)^3) + scale ts(ts + oscillation sin x) x / ((s+1)(t²s²+1))
    (
        "rational_oscillatory",
        &[
            ("shift", None),
            ("offset", None),
            ("scale", None),
            ("oscillation", None),
        ],
    ),
];

const INNER_OPERATORS: &[Entry] = &[
    ("zero", &[]),
    ("identity", &[]),
    ("dilation", &[("factor", Some(1.0)), ("slope", Some(1.0))]),
    ("saturating_cubic_with_mean", &[("slope", None), ("rate", None)]),
    ("damped_quadratic_volterra", &[("rate", None)]),
];

const DEVIATIONS: &[Entry] = &[("linear", &[("slope", None), ("shift", Some(0.0))])];

const MODULI: &[Entry] = &[
    ("abs", &[("scale", Some(1.0))]),
    ("power", &[("scale", Some(1.0)), ("exponent", None)]),
];

fn table(slot: Slot) -> &'static [Entry] {
    match slot {
        Slot::TimeFunction => TIME_FUNCTIONS,
        Slot::Nonlinearity => NONLINEARITIES,
        Slot::Kernel => KERNELS,
        Slot::KernelField => KERNEL_FIELDS,
        Slot::InnerOperator => INNER_OPERATORS,
        Slot::Deviation => DEVIATIONS,
        Slot::Modulus => MODULI,
    }
}

/// Kinds available in a slot.
pub fn kinds(slot: Slot) -> Vec<&'static str> {
    table(slot).iter().map(|e| e.0).collect()
}

/// Checks `spec` against the registry and returns every parameter with
/// defaults filled in.
pub fn resolve(slot: Slot, at: &str, spec: &PrimitiveSpec) -> Result<BTreeMap<String, f64>> {
    let Some((_, params)) = table(slot).iter().find(|e| e.0 == spec.kind) else {
        return Err(Error::UnknownPrimitive {
            slot: format!("{} `{at}`", slot.name()),
            kind: spec.kind.clone(),
        });
    };
    let mut problems = Vec::new();
    for key in spec.params.keys() {
        if !params.iter().any(|p| p.0 == key) {
            problems.push(format!("unknown parameter `{key}`"));
        }
    }
    let mut out = BTreeMap::new();
    for &(name, default) in params.iter() {
        match (spec.params.get(name), default) {
            (Some(&v), _) if v.is_finite() => {
                out.insert(name.to_string(), v);
            }
            (Some(&v), _) => problems.push(format!("parameter `{name}` = {v} is not finite")),
            (None, Some(d)) => {
                out.insert(name.to_string(), d);
            }
            (None, None) => problems.push(format!("missing parameter `{name}`")),
        }
    }
    if problems.is_empty() {
        Ok(out)
    } else {
        Err(Error::Input(format!(
            "{} `{at}` of kind `{}`: {}",
            slot.name(),
            spec.kind,
            problems.join(", ")
        )))
    }
}

pub fn time_function(at: &str, spec: &PrimitiveSpec) -> Result<TimeFunction> {
    let p = resolve(Slot::TimeFunction, at, spec)?;
    Ok(match spec.kind.as_str() {
        "zero" => TimeFunction::zero(),
        "rational" => {
            let (c, sh, pw, qw, off) = (p["scale"], p["shift"], p["p"], p["q"], p["offset"]);
            TimeFunction::new(format!("{c}*(t+{sh})^{pw}/({off}+(t+{sh})^{qw})"), move |t| {
                let z = t + sh;
                c * z.powf(pw) / (off + z.powf(qw))
            })
        }
        "exp_decay" => {
            let (c, rate) = (p["scale"], p["rate"]);
            TimeFunction::new(format!("{c}*exp(-{rate}t)"), move |t| c * (-rate * t).exp())
        }
        "indicator" => {
            let (lo, hi, h) = (p["lo"], p["hi"], p["height"]);
            TimeFunction::new(
                format!("{h}*1[{lo},{hi})"),
                move |t| {
                    if t >= lo && t < hi {
                        h
                    } else {
                        0.0
                    }
                },
            )
        }
        _ => unreachable!("resolved kinds are exhaustive"),
    })
}

/// Label, base function `n` and `scale`.
pub type Nonlinearity = (String, fn(f64) -> f64, f64);

/// A nonlinearity `x ↦ scale·n(x)`; `None` for the zero kind.
pub fn nonlinearity(at: &str, spec: &PrimitiveSpec) -> Result<Option<Nonlinearity>> {
    let p = resolve(Slot::Nonlinearity, at, spec)?;
    let f: fn(f64) -> f64 = match spec.kind.as_str() {
        "zero" => return Ok(None),
        "identity" => |x| x,
        "log1p_square" => |x| (x * x).ln_1p(),
        "arctan_square" => |x| (x * x).atan(),
        "square" => |x| x * x,
        "sin" => f64::sin,
        "tanh" => f64::tanh,
        _ => unreachable!("resolved kinds are exhaustive"),
    };
    Ok(Some((spec.kind.clone(), f, p["scale"])))
}

pub fn kernel(at: &str, spec: &PrimitiveSpec) -> Result<Kernel2> {
    let p = resolve(Slot::Kernel, at, spec)?;
    Ok(match spec.kind.as_str() {
        "zero" => Kernel2::zero(),
        "constant" => {
            let v = p["value"];
            Kernel2::new(format!("{v}"), move |_, _| v)
        }
        "affine_exp" => {
            let (a, b, c, rate) = (p["t_coef"], p["s_coef"], p["constant"], p["rate"]);
            Kernel2::new(format!("({a}t+{b}s+{c})exp(-{rate}t)"), move |t, s| {
                (a * t + b * s + c) * (-rate * t).exp()
            })
        }
        "separable_exp" => {
            let (c, rt, rs) = (p["scale"], p["t_rate"], p["s_rate"]);
            Kernel2::new(format!("{c}exp(-{rt}t-{rs}s)"), move |t, s| {
                c * (-rt * t - rs * s).exp()
            })
        }
        "cauchy" => {
            let c = p["scale"];
            Kernel2::new(format!("{c}/(1+(t-s)^2)"), move |t, s| c / (1.0 + (t - s) * (t - s)))
        }
        _ => unreachable!("resolved kinds are exhaustive"),
    })
}

/// The raw map `u(t, s, x)`; envelopes are attached by the caller.
pub type FieldFn = Box<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// `None` for the zero kind.
pub fn kernel_field(at: &str, spec: &PrimitiveSpec) -> Result<Option<(String, FieldFn)>> {
    let p = resolve(Slot::KernelField, at, spec)?;
    Ok(match spec.kind.as_str() {
        "zero" => None,
        "linear" => {
            let c = p["scale"];
            Some((format!("{c}x"), Box::new(move |_, _, x| c * x)))
        }
        "rational_oscillatory" => {
            let (sh, off, c, osc) = (p["shift"], p["offset"], p["scale"], p["oscillation"]);
            let f: FieldFn = Box::new(move |t, s, x| {
                let z = sh + t + s;
                let ts = t * s;
                z / (off + z * z * z) + c * ts * (ts + osc * x.sin()) * x / ((s + 1.0) * (ts * ts + 1.0))
            });
            Some((
                format!("({sh}+t+s)/({off}+({sh}+t+s)^3) + {c} ts(ts+{osc} sin x)x/((s+1)(t^2s^2+1))"),
                f,
            ))
        }
        _ => unreachable!("resolved kinds are exhaustive"),
    })
}

pub fn inner_map(at: &str, spec: &PrimitiveSpec) -> Result<Box<dyn InnerMap>> {
    let p = resolve(Slot::InnerOperator, at, spec)?;
    Ok(match spec.kind.as_str() {
        "zero" => Box::new(ZeroMap),
        "identity" => Box::new(Dilation {
            factor: 1.0,
            slope: 1.0,
        }),
        "dilation" => Box::new(Dilation {
            factor: p["factor"],
            slope: p["slope"],
        }),
        "saturating_cubic_with_mean" => Box::new(SaturatingCubicWithMean {
            slope: p["slope"],
            rate: p["rate"],
        }),
        "damped_quadratic_volterra" => Box::new(DampedQuadraticVolterra { rate: p["rate"] }),
        _ => unreachable!("resolved kinds are exhaustive"),
    })
}

pub fn deviation(at: &str, spec: &PrimitiveSpec) -> Result<Deviation> {
    let p = resolve(Slot::Deviation, at, spec)?;
    Ok(Deviation::linear(p["slope"], p["shift"]))
}

pub type ModulusFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn modulus(at: &str, spec: &PrimitiveSpec) -> Result<(String, ModulusFn)> {
    let p = resolve(Slot::Modulus, at, spec)?;
    let c = p["scale"];
    Ok(match spec.kind.as_str() {
        "abs" => (format!("{c}|d|"), Box::new(move |d: f64| c * d.abs())),
        "power" => {
            let e = p["exponent"];
            (format!("{c}|d|^{e}"), Box::new(move |d: f64| c * d.abs().powf(e)))
        }
        _ => unreachable!("resolved kinds are exhaustive"),
    })
}
