//! Problem-definition files: a TOML document selecting registry primitives
//! for every component together with the declared envelope constants.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::registry::{self, PrimitiveSpec, Slot};
use crate::certify::ContractionWitness;
use crate::error::{Error, Result};
use crate::l1::{Grid, TimeFunction};
use crate::operators::{
    estimate_kernel_norm, InnerOperator, KernelField3, KernelNorm, KernelNormEstimate, KernelNormOptions, ProblemSpec,
    ScalarField2,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Uniform,
    Geometric,
}

/// Discretization and solver defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub t_max: f64,
    pub cells: usize,
    pub grid: GridKind,
    /// Stretch parameter of the geometric grid.
    pub stretch: f64,
    /// Cell count of the grid used by the sampling checks.
    pub check_cells: usize,
    /// Relative residual target of the solvers.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            t_max: crate::l1::DEFAULT_T_MAX,
            cells: crate::l1::DEFAULT_CELLS,
            grid: GridKind::Geometric,
            stretch: crate::l1::DEFAULT_STRETCH,
            check_cells: 1024,
            tol: 1e-6,
            max_iters: 200,
        }
    }
}

impl Numerics {
    pub fn grid_with(&self, cells: usize) -> Result<Grid> {
        match self.grid {
            GridKind::Uniform => Grid::uniform(self.t_max, cells),
            GridKind::Geometric => Grid::geometric(self.t_max, cells, self.stretch),
        }
    }
}

/// `field(t, x) = offset(t) + nonlinearity(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDef {
    #[serde(default = "PrimitiveSpec::zero")]
    pub offset: PrimitiveSpec,
    #[serde(default = "PrimitiveSpec::zero")]
    pub nonlinearity: PrimitiveSpec,
}

impl Default for FieldDef {
    fn default() -> Self {
        Self {
            offset: PrimitiveSpec::zero(),
            nonlinearity: PrimitiveSpec::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Components {
    #[serde(default)]
    pub g: FieldDef,
    #[serde(default)]
    pub f: FieldDef,
    pub k: PrimitiveSpec,
    pub u: PrimitiveSpec,
    pub t_op: PrimitiveSpec,
    pub q_op: PrimitiveSpec,
}

/// The declared envelope data. Everything except `kernel_norm` is required;
/// an absent `kernel_norm` is estimated numerically.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<PrimitiveSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<PrimitiveSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<PrimitiveSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PrimitiveSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<PrimitiveSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<PrimitiveSpec>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<PrimitiveSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_mod: Option<PrimitiveSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<PrimitiveSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_norm: Option<f64>,
    /// Declared strict contraction constant of `B`, used as the witness
    /// `φ_c(ρ) = κρ`, `ψ_c(ρ) = (1-κ)ρ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

/// Constraint text per scalar constant, used in range errors.
const SCALAR_CONSTRAINTS: &[(&str, &str, bool)] = &[
    ("b", "growth bound |g(t,x)| <= a(t) + b|x| needs b >= 0", false),
    ("b1", "growth bound |f(t,x)| <= a1(t) + b1|x| needs b1 >= 0", false),
    (
        "rho1",
        "inner bound |(Tx)(t)| <= gamma1(t) + rho1|x(phi(t))| needs rho1 >= 0",
        false,
    ),
    ("m", "deviation bound phi'(t) >= m needs m > 0", true),
    (
        "rho2",
        "inner bound |(Qx)(t)| <= gamma2(t) + rho2|x(psi(t))| needs rho2 >= 0",
        false,
    ),
    ("M", "deviation bound psi'(t) >= M needs M > 0", true),
    (
        "beta",
        "growth bound |u(t,s,x)| <= alpha(s) + beta|x| needs beta >= 0",
        false,
    ),
    (
        "lambda",
        "modulus bound h(d)[gamma_mod(s) + lambda|x|] needs lambda >= 0",
        false,
    ),
    ("kernel_norm", "the kernel norm is nonnegative", false),
];

impl Constants {
    fn scalar(&self, name: &str) -> Option<f64> {
        match name {
            "b" => self.b,
            "b1" => self.b1,
            "rho1" => self.rho1,
            "m" => self.m,
            "rho2" => self.rho2,
            "M" => self.big_m,
            "beta" => self.beta,
            "lambda" => self.lambda,
            "kernel_norm" => self.kernel_norm,
            _ => None,
        }
    }

    /// Names of every required constant that is absent.
    pub fn missing(&self) -> Vec<String> {
        let functions = [
            ("a", self.a.is_some()),
            ("a1", self.a1.is_some()),
            ("gamma1", self.gamma1.is_some()),
            ("phi", self.phi.is_some()),
            ("gamma2", self.gamma2.is_some()),
            ("psi", self.psi.is_some()),
            ("alpha", self.alpha.is_some()),
            ("gamma_mod", self.gamma_mod.is_some()),
            ("h", self.h.is_some()),
        ];
        let mut out: Vec<String> = functions.iter().filter(|f| !f.1).map(|f| f.0.to_string()).collect();
        for &(name, _, _) in SCALAR_CONSTRAINTS {
            if name != "kernel_norm" && self.scalar(name).is_none() {
                out.push(name.to_string());
            }
        }
        out
    }

    /// Every violated range constraint, each naming its hypothesis.
    pub fn range_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &(name, constraint, strict) in SCALAR_CONSTRAINTS {
            if let Some(v) = self.scalar(name) {
                let ok = v.is_finite() && if strict { v > 0.0 } else { v >= 0.0 };
                if !ok {
                    out.push(format!("{name} = {v}: {constraint}"));
                }
            }
        }
        if let Some(k) = self.kappa {
            if !(k > 0.0 && k < 1.0) {
                out.push(format!(
                    "kappa = {k}: a strict contraction constant of B lies in (0, 1)"
                ));
            }
        }
        out
    }
}

/// A complete, declarative problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDefinition {
    pub name: String,
    #[serde(default)]
    pub numerics: Numerics,
    pub components: Components,
    #[serde(default)]
    pub constants: Constants,
}

/// A discretized problem ready for the numerical modules.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub spec: ProblemSpec,
    /// Grid for solving.
    pub grid: Grid,
    /// Coarser grid for the sampling checks.
    pub check_grid: Grid,
    /// Present when `kernel_norm` was not declared.
    pub kernel_estimate: Option<KernelNormEstimate>,
    /// From the declared `kappa`.
    pub witness: Option<ContractionWitness>,
    pub numerics: Numerics,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.chars().count(), |p| before[p + 1..].chars().count())
        + 1;
    (line, column)
}

fn numerics_violations(n: &Numerics) -> Vec<String> {
    let mut out = Vec::new();
    if !(n.t_max > 0.0 && n.t_max.is_finite()) {
        out.push(format!("numerics.t_max = {} must be positive", n.t_max));
    }
    if n.cells == 0 || n.check_cells == 0 {
        out.push("numerics.cells and numerics.check_cells must be positive".into());
    }
    if !(n.stretch > 0.0 && n.stretch.is_finite()) {
        out.push(format!("numerics.stretch = {} must be positive", n.stretch));
    }
    if !(n.tol > 0.0 && n.tol.is_finite()) {
        out.push(format!("numerics.tol = {} must be positive", n.tol));
    }
    if n.max_iters == 0 {
        out.push("numerics.max_iters must be positive".into());
    }
    out
}

impl ProblemDefinition {
    /// Parses without validating.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    /// Missing constants first (all at once), then ranges, then primitives.
    pub fn validate(&self) -> Result<()> {
        let missing = self.constants.missing();
        if !missing.is_empty() {
            return Err(Error::MissingConstants(missing));
        }
        let mut range = self.constants.range_violations();
        range.extend(numerics_violations(&self.numerics));
        if !range.is_empty() {
            return Err(Error::Range(range));
        }
        let c = &self.components;
        let k = &self.constants;
        let checks: [(Slot, &str, &PrimitiveSpec); 17] = [
            (Slot::TimeFunction, "g.offset", &c.g.offset),
            (Slot::Nonlinearity, "g.nonlinearity", &c.g.nonlinearity),
            (Slot::TimeFunction, "f.offset", &c.f.offset),
            (Slot::Nonlinearity, "f.nonlinearity", &c.f.nonlinearity),
            (Slot::Kernel, "k", &c.k),
            (Slot::KernelField, "u", &c.u),
            (Slot::InnerOperator, "t_op", &c.t_op),
            (Slot::InnerOperator, "q_op", &c.q_op),
            (Slot::TimeFunction, "a", k.a.as_ref().expect("checked")),
            (Slot::TimeFunction, "a1", k.a1.as_ref().expect("checked")),
            (Slot::TimeFunction, "gamma1", k.gamma1.as_ref().expect("checked")),
            (Slot::Deviation, "phi", k.phi.as_ref().expect("checked")),
            (Slot::TimeFunction, "gamma2", k.gamma2.as_ref().expect("checked")),
            (Slot::Deviation, "psi", k.psi.as_ref().expect("checked")),
            (Slot::TimeFunction, "alpha", k.alpha.as_ref().expect("checked")),
            (Slot::TimeFunction, "gamma_mod", k.gamma_mod.as_ref().expect("checked")),
            (Slot::Modulus, "h", k.h.as_ref().expect("checked")),
        ];
        for (slot, at, spec) in checks {
            registry::resolve(slot, at, spec)?;
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let def = Self::parse(text)?;
        def.validate()?;
        Ok(def)
    }

    /// Canonical TOML text; `from_toml(&def.emit()) == def`.
    pub fn emit(&self) -> String {
        toml::to_string(self).expect("definitions always serialize")
    }

    /// Builds operators and grids. Estimates `‖K‖` when it is not declared.
    pub fn build(&self) -> Result<Problem> {
        self.validate()?;
        let c = &self.components;
        let k = &self.constants;
        let req = |v: Option<f64>| v.expect("validated");
        let reqf =
            |name: &str, v: &Option<PrimitiveSpec>| registry::time_function(name, v.as_ref().expect("validated"));

        let g = field("g", &c.g, reqf("a", &k.a)?, req(k.b))?;
        let f = field("f", &c.f, reqf("a1", &k.a1)?, req(k.b1))?;
        let kernel = registry::kernel("k", &c.k)?;
        let (_, h) = registry::modulus("h", k.h.as_ref().expect("validated"))?;
        let alpha = reqf("alpha", &k.alpha)?;
        let gamma_mod = reqf("gamma_mod", &k.gamma_mod)?;
        let u = match registry::kernel_field("u", &c.u)? {
            None => KernelField3::zero_with_envelopes(alpha, req(k.beta), gamma_mod, req(k.lambda), h),
            Some((label, eval)) => KernelField3::new(label, eval, alpha, req(k.beta), gamma_mod, req(k.lambda), h),
        };
        let t_op = InnerOperator::from_boxed(
            registry::inner_map("t_op", &c.t_op)?,
            reqf("gamma1", &k.gamma1)?,
            req(k.rho1),
            registry::deviation("phi", k.phi.as_ref().expect("validated"))?,
            req(k.m),
        );
        let q_op = InnerOperator::from_boxed(
            registry::inner_map("q_op", &c.q_op)?,
            reqf("gamma2", &k.gamma2)?,
            req(k.rho2),
            registry::deviation("psi", k.psi.as_ref().expect("validated"))?,
            req(k.big_m),
        );
        let (kernel_norm, kernel_estimate) = match k.kernel_norm {
            Some(v) => (KernelNorm::declared(v), None),
            None => {
                let est = estimate_kernel_norm(
                    &kernel,
                    &KernelNormOptions {
                        t_max: self.numerics.t_max,
                        ..KernelNormOptions::default()
                    },
                )?;
                (KernelNorm::estimated(&est), Some(est))
            }
        };
        let spec = ProblemSpec {
            g,
            f,
            k: kernel,
            u,
            t_op,
            q_op,
            kernel_norm,
        };
        spec.validate()?;
        Ok(Problem {
            name: self.name.clone(),
            spec,
            grid: self.numerics.grid_with(self.numerics.cells)?,
            check_grid: self.numerics.grid_with(self.numerics.check_cells)?,
            kernel_estimate,
            witness: k.kappa.map(ContractionWitness::Strict),
            numerics: self.numerics.clone(),
        })
    }
}

fn field(at: &str, def: &FieldDef, envelope: TimeFunction, slope: f64) -> Result<ScalarField2> {
    let offset = registry::time_function(&format!("{at}.offset"), &def.offset)?;
    let nl = registry::nonlinearity(&format!("{at}.nonlinearity"), &def.nonlinearity)?;
    let label = match &nl {
        None => offset.label().to_string(),
        Some((name, _, c)) => format!("{} + {c}*{name}(x)", offset.label()),
    };
    Ok(match nl {
        None if offset.is_zero() => ScalarField2::new("0", |_, _| 0.0, envelope, slope),
        None => ScalarField2::new(label, move |t, _| offset.eval(t), envelope, slope),
        Some((_, n, c)) if offset.is_zero() => ScalarField2::new(label, move |_, x| c * n(x), envelope, slope),
        Some((_, n, c)) => ScalarField2::new(label, move |t, x| offset.eval(t) + c * n(x), envelope, slope),
    })
}

/// Problem files shipped with the crate.
pub const BUNDLED: &[(&str, &str)] = &[
    ("taoudi_example", include_str!("../../problems/taoudi_example.toml")),
    (
        "forced_fixed_point",
        include_str!("../../problems/forced_fixed_point.toml"),
    ),
    ("zero_problem", include_str!("../../problems/zero_problem.toml")),
    ("half_contraction", include_str!("../../problems/half_contraction.toml")),
];

pub fn bundled_source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|b| b.0 == name).map(|b| b.1)
}

/// Loads a bundled definition by name.
pub fn load_bundled(name: &str) -> Result<ProblemDefinition> {
    let text = bundled_source(name).ok_or_else(|| Error::Input(format!("no bundled problem `{name}`")))?;
    ProblemDefinition::from_toml(text)
}

/// Reads and validates a definition file. A path that does not exist but
/// names a bundled problem loads the bundled copy.
pub fn load_problem(path: impl AsRef<Path>) -> Result<ProblemDefinition> {
    let path = path.as_ref();
    if !path.exists() {
        if let Some(name) = path.to_str() {
            if bundled_source(name).is_some() {
                return load_bundled(name);
            }
        }
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ProblemDefinition::from_toml(&text)
}

/// Writes the canonical text of `def` to `path`.
pub fn emit(def: &ProblemDefinition, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, def.emit())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_problem_loads_and_round_trips() {
        for (name, _) in BUNDLED {
            let def = load_bundled(name).unwrap();
            assert_eq!(&def.name, name);
            assert_eq!(ProblemDefinition::from_toml(&def.emit()).unwrap(), def);
        }
    }

    #[test]
    fn line_and_column_are_one_based() {
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
        assert_eq!(line_column("ab", 0), (1, 1));
    }
}
