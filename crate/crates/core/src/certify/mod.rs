//! Certificate quantities of the existence argument and sampling-based
//! checks of its hypotheses.
//!
//! Nothing here is a proof. A check either finds a concrete witness that
//! violates a declared inequality by more than the numerical slack, or
//! reports that no such witness turned up among the samples drawn.

mod checks;
pub mod sampling;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_ball_invariance, check_envelopes, check_separate_contraction, BallReport, ContractionReport, EnvelopeReport,
};

use crate::error::Result;
use crate::l1::Grid;
use crate::operators::{
    estimate_kernel_norm, KernelNorm, KernelNormEstimate, KernelNormOptions, NormSource, ProblemSpec,
};

/// A point at which a declared inequality `lhs <= rhs` was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Coordinates of the sample (`t`, `s`, `x`, `delta`, norms, ...).
    pub point: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// Numerical slack granted to this comparison.
    pub slack: f64,
}

impl Witness {
    pub fn new(point: &[(&str, f64)], lhs: f64, rhs: f64, slack: f64) -> Self {
        Self {
            point: point.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            lhs,
            rhs,
            slack,
        }
    }

    /// `lhs - rhs`.
    pub fn excess(&self) -> f64 {
        self.lhs - self.rhs
    }

    /// The comparison fails beyond its slack.
    pub fn violates(&self) -> bool {
        self.excess() > self.slack
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckStatus {
    /// No sample violated the inequality. Weaker than proof.
    VerifiedBySampling,
    /// A sample violated the inequality by more than its slack.
    Falsified { witness: Witness },
    /// The worst sample exceeded the bound, but only within the slack.
    Inconclusive { witness: Witness },
    /// Taken as given, e.g. an exact constant.
    DeclaredByUser,
    /// Outside what sampling can decide.
    Unverifiable { reason: String },
}

impl CheckStatus {
    pub fn is_falsified(&self) -> bool {
        matches!(self, CheckStatus::Falsified { .. })
    }
}

/// One hypothesis and the outcome of checking it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    /// Stable identifier, e.g. `growth_g`.
    pub id: String,
    /// The inequality in words.
    pub claim: String,
    pub samples: usize,
    /// Largest `lhs - rhs` seen; negative when every sample had room to
    /// spare, absent when nothing was sampled.
    pub max_excess: Option<f64>,
    #[serde(flatten)]
    pub status: CheckStatus,
}

/// Collects witnesses for one inequality and decides its status.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    samples: usize,
    worst: Option<Witness>,
    worst_violation: Option<Witness>,
}

impl Tally {
    pub(crate) fn record(&mut self, w: Witness) {
        self.samples += 1;
        if w.violates()
            && self
                .worst_violation
                .as_ref()
                .is_none_or(|v| w.excess() - w.slack > v.excess() - v.slack)
        {
            self.worst_violation = Some(w.clone());
        }
        if self.worst.as_ref().is_none_or(|v| w.excess() > v.excess()) {
            self.worst = Some(w);
        }
    }

    pub(crate) fn finish(self, id: &str, claim: &str) -> AssumptionCheck {
        let max_excess = self.worst.as_ref().map(Witness::excess);
        let status = match (self.worst_violation, self.worst) {
            (Some(w), _) => CheckStatus::Falsified { witness: w },
            (None, Some(w)) if w.excess() > 0.0 => CheckStatus::Inconclusive { witness: w },
            _ => CheckStatus::VerifiedBySampling,
        };
        AssumptionCheck {
            id: id.into(),
            claim: claim.into(),
            samples: self.samples,
            max_excess,
            status,
        }
    }
}

/// Rounding allowance for comparing quantities of the given magnitudes.
pub(crate) fn roundoff(magnitudes: &[f64]) -> f64 {
    64.0 * f64::EPSILON * (1.0 + magnitudes.iter().map(|m| m.abs()).sum::<f64>())
}

/// `γ = bρ₁/m + b₁ρ₂β‖K‖/M` split into its two terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionConstant {
    pub gamma: f64,
    /// `bρ₁/m`, from `B`.
    pub b_term: f64,
    /// `b₁ρ₂β‖K‖/M`, from `A`.
    pub a_term: f64,
    /// `γ < 1`.
    pub passed: bool,
}

pub fn contraction_constant(spec: &ProblemSpec) -> Result<ContractionConstant> {
    spec.validate()?;
    let b_term = spec.g.envelope_slope * spec.t_op.envelope_factor / spec.t_op.deviation_slope_min;
    let a_term = spec.f.envelope_slope * spec.q_op.envelope_factor * spec.u.envelope_slope * spec.kernel_norm.value
        / spec.q_op.deviation_slope_min;
    let gamma = b_term + a_term;
    Ok(ContractionConstant {
        gamma,
        b_term,
        a_term,
        passed: gamma < 1.0,
    })
}

/// Half-line norms of the envelope offsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeNorms {
    pub a: f64,
    pub a1: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub alpha: f64,
}

impl EnvelopeNorms {
    pub fn of(spec: &ProblemSpec) -> Result<Self> {
        Ok(Self {
            a: spec.g.envelope_offset.norm()?,
            a1: spec.f.envelope_offset.norm()?,
            gamma1: spec.t_op.envelope_offset.norm()?,
            gamma2: spec.q_op.envelope_offset.norm()?,
            alpha: spec.u.envelope_offset.norm()?,
        })
    }

    /// Tails beyond `tau`, i.e. what truncating at `tau` drops.
    pub fn tails(spec: &ProblemSpec, tau: f64) -> Result<Self> {
        Ok(Self {
            a: spec.g.envelope_offset.tail(tau)?,
            a1: spec.f.envelope_offset.tail(tau)?,
            gamma1: spec.t_op.envelope_offset.tail(tau)?,
            gamma2: spec.q_op.envelope_offset.tail(tau)?,
            alpha: spec.u.envelope_offset.tail(tau)?,
        })
    }
}

/// `C` and, when `γ < 1`, the radius `r = C/(1-γ)` solving `C + γr = r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallRadius {
    pub c: f64,
    pub gamma: f64,
    pub r: Option<f64>,
    pub norms: EnvelopeNorms,
}

/// `C = ‖a₁‖ + ‖a‖ + b₁‖K‖(‖α‖ + β‖γ₂‖) + b‖γ₁‖`.
pub fn invariant_ball_radius(spec: &ProblemSpec) -> Result<BallRadius> {
    let gamma = contraction_constant(spec)?;
    let norms = EnvelopeNorms::of(spec)?;
    let c = norms.a1
        + norms.a
        + spec.f.envelope_slope * spec.kernel_norm.value * (norms.alpha + spec.u.envelope_slope * norms.gamma2)
        + spec.g.envelope_slope * norms.gamma1;
    Ok(BallRadius {
        c,
        gamma: gamma.gamma,
        r: gamma.passed.then(|| c / (1.0 - gamma.gamma)),
        norms,
    })
}

/// The separate-contraction pair `(φ_c, ψ_c)` of `B`, or a strict constant.
#[derive(Clone)]
pub enum ContractionWitness {
    /// `φ_c(ρ) = κρ`, `ψ_c(ρ) = (1-κ)ρ`.
    Strict(f64),
    Pair {
        label: String,
        phi_c: std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        psi_c: std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for ContractionWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ContractionWitness::Strict(k) => write!(f, "Strict({k})"),
            ContractionWitness::Pair { label, .. } => write!(f, "Pair({label})"),
        }
    }
}

impl ContractionWitness {
    pub fn phi_c(&self, rho: f64) -> f64 {
        match self {
            ContractionWitness::Strict(k) => k * rho,
            ContractionWitness::Pair { phi_c, .. } => phi_c(rho),
        }
    }

    pub fn psi_c(&self, rho: f64) -> f64 {
        match self {
            ContractionWitness::Strict(k) => (1.0 - k) * rho,
            ContractionWitness::Pair { psi_c, .. } => psi_c(rho),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ContractionWitness::Strict(k) => format!("strict contraction with constant {k}"),
            ContractionWitness::Pair { label, .. } => label.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Pointwise samples per envelope inequality.
    pub samples: usize,
    /// Random pairs for the contraction check of `B`.
    pub pairs: usize,
    /// Random pairs for the invariant-ball check.
    pub ball_samples: usize,
    pub seed: u64,
    /// `None` leaves the contraction hypothesis on `B` unverifiable.
    pub witness: Option<ContractionWitness>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            samples: 10_000,
            pairs: 100,
            ball_samples: 100,
            seed: 0,
            witness: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slacks {
    /// Largest slack granted to any sampled comparison.
    pub quadrature: f64,
    /// Envelope mass beyond `T_max`, summed as it enters `C`.
    pub truncation: f64,
}

/// Everything [`certify`] computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub gamma: ContractionConstant,
    pub c: f64,
    pub r: Option<f64>,
    pub envelope_norms: EnvelopeNorms,
    pub kernel_norm: KernelNorm,
    /// Independent numerical estimate of `‖K‖`, or why it failed.
    pub kernel_norm_estimate: std::result::Result<KernelNormEstimate, String>,
    pub assumptions: Vec<AssumptionCheck>,
    /// Largest `‖Ax + By‖` seen in the ball check.
    pub ball_max_norm: Option<f64>,
    /// Largest `‖Bx - By‖ / ‖x - y‖` seen.
    pub contraction_max_ratio: Option<f64>,
    pub slacks: Slacks,
    /// `γ < 1` and nothing falsified.
    pub passed: bool,
}

impl Certificate {
    pub fn check(&self, id: &str) -> Option<&AssumptionCheck> {
        self.assumptions.iter().find(|c| c.id == id)
    }
}

fn kernel_check(spec: &ProblemSpec, est: &std::result::Result<KernelNormEstimate, String>) -> AssumptionCheck {
    let claim = "the linear kernel operator is bounded on L1 with the stated norm";
    let status = match (&spec.kernel_norm.source, est) {
        (_, Err(reason)) => CheckStatus::Unverifiable { reason: reason.clone() },
        (NormSource::Estimated { .. }, Ok(_)) => CheckStatus::VerifiedBySampling,
        (NormSource::Declared, Ok(e)) => {
            // a declared value below the estimate understates gamma
            let w = Witness::new(
                &[("argmax", e.argmax)],
                e.value,
                spec.kernel_norm.value,
                e.refinement_slack + e.tail_bound + 1e-9 * e.value,
            );
            if w.violates() {
                CheckStatus::Falsified { witness: w }
            } else {
                CheckStatus::DeclaredByUser
            }
        }
    };
    AssumptionCheck {
        id: "kernel_norm".into(),
        claim: claim.into(),
        samples: est.as_ref().map_or(0, |e| e.columns_evaluated),
        max_excess: est.as_ref().ok().map(|e| e.value - spec.kernel_norm.value),
        status,
    }
}

/// Computes `γ`, `C`, `r` and runs every sampling check on `grid`.
pub fn certify(spec: &ProblemSpec, grid: &Grid, opts: &CertifyOptions) -> Result<Certificate> {
    let gamma = contraction_constant(spec)?;
    let ball = invariant_ball_radius(spec)?;
    let t_max = grid.t_max();
    let tails = EnvelopeNorms::tails(spec, t_max)?;
    let truncation = tails.a1
        + tails.a
        + spec.f.envelope_slope * spec.kernel_norm.value * (tails.alpha + spec.u.envelope_slope * tails.gamma2)
        + spec.g.envelope_slope * tails.gamma1;

    let estimate = estimate_kernel_norm(
        &spec.k,
        &KernelNormOptions {
            t_max,
            ..KernelNormOptions::default()
        },
    )
    .map_err(|e| e.to_string());

    let mut assumptions = check_envelopes(spec, grid, opts.samples, opts.seed)?.checks;
    assumptions.push(AssumptionCheck {
        id: "caratheodory_u".into(),
        claim: "u satisfies the Caratheodory conditions".into(),
        samples: 0,
        max_excess: None,
        status: CheckStatus::Unverifiable {
            reason: "measurability and continuity are not decidable from samples".into(),
        },
    });
    assumptions.push(kernel_check(spec, &estimate));

    let radius = ball.r.filter(|&r| r > 0.0).unwrap_or(1.0);
    let mut contraction_max_ratio = None;
    let mut quadrature: f64 = assumptions
        .iter()
        .filter_map(|a| match &a.status {
            CheckStatus::Falsified { witness } | CheckStatus::Inconclusive { witness } => Some(witness.slack),
            _ => None,
        })
        .fold(0.0, f64::max);
    match &opts.witness {
        Some(w) => {
            let rep = check_separate_contraction(spec, grid, w, opts.pairs, radius, opts.seed)?;
            contraction_max_ratio = Some(rep.max_ratio);
            quadrature = quadrature.max(rep.max_slack);
            assumptions.extend(rep.checks);
        }
        None => assumptions.push(AssumptionCheck {
            id: "separate_contraction_b".into(),
            claim: "B is a separate contraction".into(),
            samples: 0,
            max_excess: None,
            status: CheckStatus::Unverifiable {
                reason: "no contraction witness declared".into(),
            },
        }),
    }
    assumptions.push(AssumptionCheck {
        id: "separate_contraction_b_global".into(),
        claim: "B is a separate contraction on all of L1".into(),
        samples: 0,
        max_excess: None,
        status: CheckStatus::Unverifiable {
            reason: format!("pairs are drawn from the ball of radius {radius} only"),
        },
    });

    let gamma_witness = Witness::new(
        &[("b_term", gamma.b_term), ("a_term", gamma.a_term)],
        gamma.gamma,
        1.0,
        0.0,
    );
    assumptions.push(AssumptionCheck {
        id: "contraction_constant".into(),
        claim: "gamma = b rho1 / m + b1 rho2 beta |K| / M < 1".into(),
        samples: 1,
        max_excess: Some(gamma.gamma - 1.0),
        status: if gamma.passed {
            CheckStatus::DeclaredByUser
        } else {
            CheckStatus::Falsified { witness: gamma_witness }
        },
    });

    let mut ball_max_norm = None;
    match ball.r {
        Some(r) => {
            let rep = check_ball_invariance(spec, grid, r, opts.ball_samples, opts.seed)?;
            ball_max_norm = Some(rep.max_norm);
            quadrature = quadrature.max(rep.max_slack);
            assumptions.push(rep.check);
        }
        None => assumptions.push(AssumptionCheck {
            id: "ball_invariance".into(),
            claim: "A(B_r) + B(B_r) lies in B_r".into(),
            samples: 0,
            max_excess: None,
            status: CheckStatus::Unverifiable {
                reason: "gamma >= 1, no invariant ball".into(),
            },
        }),
    }

    let passed = gamma.passed && !assumptions.iter().any(|a| a.status.is_falsified());
    Ok(Certificate {
        gamma,
        c: ball.c,
        r: ball.r,
        envelope_norms: ball.norms,
        kernel_norm: spec.kernel_norm,
        kernel_norm_estimate: estimate,
        assumptions,
        ball_max_norm,
        contraction_max_ratio,
        slacks: Slacks { quadrature, truncation },
        passed,
    })
}
