//! Fixed-point iterations for `x = Ax + Bx` with residual-based
//! termination.
//!
//! Success means a small residual `‖x - Ax - Bx‖` on the working grid and
//! again after interpolation to a grid twice as fine. No iteration here
//! comes with a convergence guarantee; failure to converge is reported as a
//! status.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::l1::GridFunction;
use crate::operators::{apply_a, apply_b, residual, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `x ← (1-ω)x + ω(Ax + Bx)`.
    Picard,
    /// Solve `z = Bz + Ax_k` by inner iteration, then `x ← (1-ω)x + ωz`.
    Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub scheme: Scheme,
    /// Stop once `‖x - Ax - Bx‖ <= tol (1 + ‖x‖)`.
    pub tol: f64,
    pub max_iters: usize,
    /// Initial relaxation `ω ∈ (0, 1]`.
    pub damping: f64,
    /// Halve `ω` when the residual grows, at most this many times.
    pub max_halvings: usize,
    /// Inner stopping rule of the split scheme: `‖z_{j+1} - z_j‖ <= inner_tol (1 + ‖z‖)`.
    pub inner_tol: f64,
    pub inner_max_iters: usize,
    /// Rescale every iterate into this ball.
    pub project_to_ball: Option<f64>,
    /// `r` in the divergence threshold `‖x‖ > 10⁶ (1 + r)`; defaults to the projection radius or 0.
    pub reference_radius: Option<f64>,
    /// Recompute the residual on the twice-refined grid at the end.
    pub refinement_check: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Picard,
            tol: 1e-6,
            max_iters: 200,
            damping: 1.0,
            max_halvings: 6,
            inner_tol: 1e-10,
            inner_max_iters: 500,
            project_to_ball: None,
            reference_radius: None,
            refinement_check: true,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            bad.push(format!("tol = {} must be positive", self.tol));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            bad.push(format!("damping = {} must lie in (0, 1]", self.damping));
        }
        if self.max_iters == 0 {
            bad.push("max_iters must be positive".into());
        }
        if self.scheme == Scheme::Split && (self.inner_max_iters == 0 || !(self.inner_tol > 0.0)) {
            bad.push("the split scheme needs inner_tol > 0 and inner_max_iters > 0".into());
        }
        if let Some(r) = self.project_to_ball {
            if !(r > 0.0 && r.is_finite()) {
                bad.push(format!("projection radius {r} must be positive"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Input(bad.join("; ")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Diverged { reason: String },
}

/// Residual of the final iterate interpolated onto the refined grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementCheck {
    pub cells: usize,
    pub residual: f64,
    /// `residual / (1 + ‖x‖)`.
    pub relative: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub scheme: Scheme,
    pub status: SolveStatus,
    /// The last iterate whose residual was evaluated.
    pub final_iterate: GridFunction,
    /// One entry per evaluated iterate; the last belongs to `final_iterate`.
    pub residual_history: Vec<f64>,
    /// `‖x_k‖` alongside each residual.
    pub norm_history: Vec<f64>,
    /// Relaxation in force at each update.
    pub damping_history: Vec<f64>,
    /// Inner iterations per outer step (split scheme only).
    pub inner_iterations: Vec<usize>,
    pub refinement: Option<RefinementCheck>,
    /// Interpolation-error estimate of the final iterate.
    pub representation_error: f64,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("at least one evaluation")
    }

    pub fn final_norm(&self) -> f64 {
        self.final_iterate.norm()
    }

    /// Number of updates performed.
    pub fn iterations(&self) -> usize {
        self.damping_history.len()
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Returns `x` if `‖x‖ <= r`, otherwise `x r / ‖x‖`.
pub fn project_ball(x: &GridFunction, r: f64) -> GridFunction {
    let n = x.norm();
    if n <= r {
        x.clone()
    } else {
        x.scale(r / n)
    }
}

struct Driver<'a> {
    spec: &'a ProblemSpec,
    config: &'a SolveConfig,
    history: Vec<f64>,
    norms: Vec<f64>,
    damping_history: Vec<f64>,
    inner_iterations: Vec<usize>,
    damping: f64,
    halvings: usize,
    threshold: f64,
}

enum Step {
    Continue,
    Stop(SolveStatus),
}

impl<'a> Driver<'a> {
    fn new(spec: &'a ProblemSpec, config: &'a SolveConfig) -> Self {
        let r = config.reference_radius.or(config.project_to_ball).unwrap_or(0.0);
        Self {
            spec,
            config,
            history: Vec::new(),
            norms: Vec::new(),
            damping_history: Vec::new(),
            inner_iterations: Vec::new(),
            damping: config.damping,
            halvings: 0,
            threshold: 1e6 * (1.0 + r),
        }
    }

    fn project(&self, x: GridFunction) -> GridFunction {
        match self.config.project_to_ball {
            Some(r) => project_ball(&x, r),
            None => x,
        }
    }

    /// Records the residual of `x` and decides whether to stop.
    fn assess(&mut self, x: &GridFunction, image: &GridFunction) -> Step {
        let res = x.sub(image).norm();
        let prev = self.history.last().copied();
        self.history.push(res);
        let norm = x.norm();
        self.norms.push(norm);
        if !res.is_finite() {
            return Step::Stop(SolveStatus::Diverged {
                reason: "non-finite residual".into(),
            });
        }
        if res <= self.config.tol * (1.0 + norm) {
            return Step::Stop(SolveStatus::Converged);
        }
        if norm > self.threshold {
            return Step::Stop(SolveStatus::Diverged {
                reason: format!("iterate norm {norm:e} exceeds {:e}", self.threshold),
            });
        }
        if self.history.len() >= self.config.max_iters {
            return Step::Stop(SolveStatus::MaxIters);
        }
        if let Some(p) = prev {
            if res > p && self.halvings < self.config.max_halvings {
                self.damping *= 0.5;
                self.halvings += 1;
            }
        }
        Step::Continue
    }

    fn relax(&mut self, x: &GridFunction, target: &GridFunction) -> GridFunction {
        self.damping_history.push(self.damping);
        let w = self.damping;
        let next = if w == 1.0 {
            target.clone()
        } else {
            x.axpby(1.0 - w, target, w)
        };
        self.project(next)
    }

    fn finish(self, status: SolveStatus, x: GridFunction) -> Result<SolveReport> {
        let refinement = if self.config.refinement_check {
            let fine = x.grid().refine();
            let xf = x.resample(&fine);
            let residual = residual(self.spec, &xf)?;
            Some(RefinementCheck {
                cells: fine.cells(),
                residual,
                relative: residual / (1.0 + xf.norm()),
            })
        } else {
            None
        };
        Ok(SolveReport {
            scheme: self.config.scheme,
            status,
            representation_error: x.representation_error(),
            final_iterate: x,
            residual_history: self.history,
            norm_history: self.norms,
            damping_history: self.damping_history,
            inner_iterations: self.inner_iterations,
            refinement,
        })
    }
}

/// `x_{k+1} = (1-ω)x_k + ω(Ax_k + Bx_k)`.
pub fn solve_picard(spec: &ProblemSpec, x0: &GridFunction, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let mut d = Driver::new(spec, config);
    let mut x = d.project(x0.clone());
    loop {
        let image = apply_a(spec, &x)?.add(&apply_b(spec, &x)?);
        match d.assess(&x, &image) {
            Step::Stop(status) => return d.finish(status, x),
            Step::Continue => x = d.relax(&x, &image),
        }
    }
}

/// Outer loop on `A`, inner contraction loop `z ← Bz + Ax_k` on `B`.
pub fn solve_split(spec: &ProblemSpec, x0: &GridFunction, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let mut d = Driver::new(spec, config);
    let mut x = d.project(x0.clone());
    loop {
        let ax = apply_a(spec, &x)?;
        let bx = apply_b(spec, &x)?;
        match d.assess(&x, &ax.add(&bx)) {
            Step::Stop(status) => return d.finish(status, x),
            Step::Continue => {}
        }
        let mut z = ax.add(&bx);
        let mut prev = x.clone();
        let mut inner = 1;
        loop {
            let step = z.sub(&prev).norm();
            if !step.is_finite() {
                d.inner_iterations.push(inner);
                let outer = d.history.len();
                return d.finish(
                    SolveStatus::Diverged {
                        reason: format!("inner iteration produced a non-finite step at outer step {outer}"),
                    },
                    x,
                );
            }
            if step <= config.inner_tol * (1.0 + z.norm()) {
                break;
            }
            if inner >= config.inner_max_iters {
                d.inner_iterations.push(inner);
                return d.finish(
                    SolveStatus::Diverged {
                        reason: format!(
                            "inner iteration did not reach {:e} within {} steps (last step {step:e})",
                            config.inner_tol, config.inner_max_iters
                        ),
                    },
                    x,
                );
            }
            prev = z;
            z = apply_b(spec, &prev)?.add(&ax);
            inner += 1;
        }
        d.inner_iterations.push(inner);
        x = d.relax(&x, &z);
    }
}

/// Dispatches on `config.scheme`.
pub fn solve(spec: &ProblemSpec, x0: &GridFunction, config: &SolveConfig) -> Result<SolveReport> {
    match config.scheme {
        Scheme::Picard => solve_picard(spec, x0, config),
        Scheme::Split => solve_split(spec, x0, config),
    }
}
