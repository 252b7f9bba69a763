//! Discretized measure of weak noncompactness `μ = c + d` on finite
//! ensembles of grid functions.
//!
//! `c` is the small-set part `lim_{ε→0} sup_x sup_{meas Ω <= ε} ∫_Ω |x|` and
//! `d` the tail part `lim_{τ→∞} sup_x ∫_τ^∞ |x|`. Both limits are replaced by
//! finite schedules; for a finite ensemble the true limits are zero, so the
//! estimates are finite-resolution diagnostics.

use serde::{Deserialize, Serialize};

use crate::certify::sampling;
use crate::error::{Error, Result};
use crate::l1::{Grid, GridFunction};
use crate::operators::{apply_a, apply_b, apply_kernel_linear, ProblemSpec};

/// A finite nonempty family standing in for a bounded subset of L¹.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    label: String,
    members: Vec<GridFunction>,
}

impl Ensemble {
    pub fn new(label: impl Into<String>, members: Vec<GridFunction>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Input("an ensemble needs at least one member".into()));
        }
        Ok(Self {
            label: label.into(),
            members,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn members(&self) -> &[GridFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Largest member norm.
    pub fn radius(&self) -> f64 {
        self.members.iter().map(GridFunction::norm).fold(0.0, f64::max)
    }

    /// Largest truncation point among members.
    pub fn t_max(&self) -> f64 {
        self.members.iter().map(GridFunction::t_max).fold(0.0, f64::max)
    }

    /// One common factor `min(1, r / radius)` applied to every member, so
    /// ratios between members survive.
    pub fn scaled_into_ball(&self, r: f64) -> Ensemble {
        let radius = self.radius();
        let factor = if radius > r && radius > 0.0 { r / radius } else { 1.0 };
        Ensemble {
            label: format!("{} in B_{r}", self.label),
            members: self.members.iter().map(|x| x.scale(factor)).collect(),
        }
    }

    pub fn try_map<F: Fn(&GridFunction) -> Result<GridFunction>>(&self, label: &str, f: F) -> Result<Ensemble> {
        Ensemble::new(label, self.members.iter().map(f).collect::<Result<Vec<_>>>()?)
    }

    /// `{0}`.
    pub fn zero(grid: &Grid) -> Ensemble {
        Ensemble {
            label: "zero".into(),
            members: vec![GridFunction::zero(grid)],
        }
    }

    /// `{n 1_[0, 1/n) : n = 1..size}`: unit mass concentrating at the origin.
    pub fn concentrating(grid: &Grid, size: usize) -> Result<Ensemble> {
        let members = (1..=size.max(1))
            .map(|n| GridFunction::indicator(grid, 0.0, 1.0 / n as f64, n as f64))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(format!("concentrating({size})"), members)
    }

    /// `{1_[n, n+1) : n = 1..size}`: unit mass escaping to infinity.
    pub fn escaping(grid: &Grid, size: usize) -> Result<Ensemble> {
        if size as f64 + 1.0 > grid.t_max() {
            return Err(Error::Input(format!(
                "escaping ensemble of size {size} does not fit below T_max = {}",
                grid.t_max()
            )));
        }
        let members = (1..=size.max(1))
            .map(|n| GridFunction::indicator(grid, n as f64, n as f64 + 1.0, 1.0))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(format!("escaping({size})"), members)
    }

    /// Random exponential-bump functions with norms uniform in `[0, r]`.
    pub fn random_in_ball(grid: &Grid, size: usize, r: f64, seed: u64) -> Result<Ensemble> {
        let mut rng = sampling::rng(seed);
        let members = (0..size.max(1))
            .map(|_| sampling::random_in_ball(grid, &mut rng, r))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(format!("random_in_ball({size}, {r})"), members)
    }

    /// `{(1 + sin(nt)) e^{-t} : n = 1..size}`, weakly but not strongly convergent.
    pub fn oscillating(grid: &Grid, size: usize) -> Result<Ensemble> {
        let members = (1..=size.max(1))
            .map(|n| GridFunction::from_fn(grid, |t| (1.0 + (n as f64 * t).sin()) * (-t).exp()))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(format!("oscillating({size})"), members)
    }
}

/// The finite schedules replacing `ε → 0` and `τ → ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedules {
    /// Strictly decreasing, positive, at least three entries.
    pub epsilon: Vec<f64>,
    /// Strictly increasing, positive.
    pub tau: Vec<f64>,
}

impl Default for Schedules {
    fn default() -> Self {
        Self {
            epsilon: vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            tau: vec![5.0, 10.0, 20.0, 40.0],
        }
    }
}

fn check_epsilon(schedule: &[f64]) -> Result<()> {
    if schedule.len() < 3 {
        return Err(Error::Input("epsilon schedule needs at least three entries".into()));
    }
    if schedule.iter().any(|&e| !(e > 0.0) || !e.is_finite()) || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Input(
            "epsilon schedule must be positive and strictly decreasing".into(),
        ));
    }
    Ok(())
}

fn check_tau(schedule: &[f64], t_max: f64) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Input("tau schedule is empty".into()));
    }
    if schedule.iter().any(|&t| !(t > 0.0) || !t.is_finite()) || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Input(
            "tau schedule must be positive and strictly increasing".into(),
        ));
    }
    let last = schedule[schedule.len() - 1];
    if last > t_max * (1.0 + 1e-12) {
        return Err(Error::Input(format!(
            "tau schedule ends at {last}, beyond T_max = {t_max}"
        )));
    }
    Ok(())
}

/// A limit approximated along a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    /// Value at the last schedule entry.
    pub value: f64,
    /// Value at every schedule entry.
    pub values: Vec<f64>,
    /// The last two values agree within 1e-6 relative.
    pub stabilized: bool,
}

fn limit_of(values: Vec<f64>) -> LimitEstimate {
    let n = values.len();
    let value = values[n - 1];
    let stabilized =
        n < 2 || (values[n - 1] - values[n - 2]).abs() <= 1e-6 * values[n - 1].abs().max(values[n - 2].abs());
    LimitEstimate {
        value,
        values,
        stabilized,
    }
}

fn sup_over<F: Fn(&GridFunction) -> f64>(x: &Ensemble, f: F) -> f64 {
    x.members.iter().map(f).fold(0.0, f64::max)
}

/// `sup_x worst_subset_mass(x, ε)` along the schedule.
pub fn c_measure(x: &Ensemble, epsilon: &[f64]) -> Result<LimitEstimate> {
    check_epsilon(epsilon)?;
    Ok(limit_of(
        epsilon
            .iter()
            .map(|&e| sup_over(x, |m| m.worst_subset_mass(e)))
            .collect(),
    ))
}

/// `sup_x tail_mass(x, τ)` along the schedule.
pub fn d_measure(x: &Ensemble, tau: &[f64]) -> Result<LimitEstimate> {
    check_tau(tau, x.t_max())?;
    Ok(limit_of(tau.iter().map(|&t| sup_over(x, |m| m.tail_mass(t))).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub c_hat: f64,
    pub d_hat: f64,
    /// `c_hat + d_hat`.
    pub mu_hat: f64,
    pub c: LimitEstimate,
    pub d: LimitEstimate,
    pub schedules: Schedules,
}

pub fn mu_measure(x: &Ensemble, schedules: &Schedules) -> Result<MeasureEstimate> {
    let c = c_measure(x, &schedules.epsilon)?;
    let d = d_measure(x, &schedules.tau)?;
    Ok(MeasureEstimate {
        c_hat: c.value,
        d_hat: d.value,
        mu_hat: c.value + d.value,
        c,
        d,
        schedules: schedules.clone(),
    })
}

/// How far an ensemble is from uniform integrability at one resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DieudonneReport {
    pub epsilon: f64,
    pub tau: f64,
    /// `max_x sup_{meas Ω <= ε} ∫_Ω |x|`.
    pub small_set_mass: f64,
    pub small_set_member: usize,
    /// `max_x ∫_τ^∞ |x|`.
    pub tail_mass: f64,
    pub tail_member: usize,
}

fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    values
        .enumerate()
        .fold((0, 0.0), |best, (i, v)| if v > best.1 { (i, v) } else { best })
}

pub fn dieudonne_report(x: &Ensemble, epsilon: f64, tau: f64) -> Result<DieudonneReport> {
    if !(epsilon > 0.0) || !(tau > 0.0) {
        return Err(Error::Input("epsilon and tau must be positive".into()));
    }
    let (small_set_member, small_set_mass) = argmax(x.members.iter().map(|m| m.worst_subset_mass(epsilon)));
    let (tail_member, tail_mass) = argmax(x.members.iter().map(|m| m.tail_mass(tau)));
    Ok(DieudonneReport {
        epsilon,
        tau,
        small_set_mass,
        small_set_member,
        tail_mass,
        tail_member,
    })
}

/// `e(t) = a₁(t) + a(t) + bγ₁(t) + b₁ (K(α + βγ₂))(t)`: the part of the
/// pointwise bound on `|Ax + Bx|` that does not depend on `x`.
pub fn residual_envelope(spec: &ProblemSpec, grid: &Grid) -> Result<GridFunction> {
    let u = &spec.u;
    let weight = GridFunction::from_fn(grid, |t| {
        u.envelope_offset.eval(t) + u.envelope_slope * spec.q_op.envelope_offset.eval(t)
    })?;
    let propagated = apply_kernel_linear(&spec.k, &weight)?;
    let direct = GridFunction::from_fn(grid, |t| {
        spec.f.envelope_offset.eval(t)
            + spec.g.envelope_offset.eval(t)
            + spec.g.envelope_slope * spec.t_op.envelope_offset.eval(t)
    })?;
    Ok(direct.axpby(1.0, &propagated, spec.f.envelope_slope))
}

/// One comparison `image <= γ source + slack` at one schedule entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleComparison {
    /// `"epsilon"`, `"tau"`, or `"mu"` for the final combined value.
    pub part: String,
    pub at: f64,
    pub source: f64,
    pub image: f64,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuContractionReport {
    pub gamma: f64,
    pub source: MeasureEstimate,
    pub image: MeasureEstimate,
    /// `μ̂(image) / μ̂(source)`, absent when the source measure is zero.
    pub ratio: Option<f64>,
    pub comparisons: Vec<ScheduleComparison>,
    /// Cross sums `Ax + By` were used instead of the diagonal `Ax + Bx`.
    pub cross: bool,
    pub passed: bool,
}

/// Builds `{Ax + Bx}` (or all `Ax + By` when `cross`) and checks
/// `μ̂(image) <= γ μ̂(X) + slack` at every schedule entry and for the
/// final `μ̂`.
///
/// The slack at `ε` is `sup_{meas Ω <= ε} ∫_Ω e` and at `τ` it is
/// `∫_τ^∞ e`, with `e` from [`residual_envelope`]; both vanish in the
/// limit. Representation error of the sampled images is added on top.
pub fn check_mu_contraction(
    spec: &ProblemSpec,
    x: &Ensemble,
    schedules: &Schedules,
    gamma: f64,
    cross: bool,
) -> Result<MuContractionReport> {
    let ax: Vec<GridFunction> = x.members.iter().map(|m| apply_a(spec, m)).collect::<Result<_>>()?;
    let bx: Vec<GridFunction> = x.members.iter().map(|m| apply_b(spec, m)).collect::<Result<_>>()?;
    let images: Vec<GridFunction> = if cross {
        ax.iter().flat_map(|a| bx.iter().map(move |b| a.add(b))).collect()
    } else {
        ax.iter().zip(&bx).map(|(a, b)| a.add(b)).collect()
    };
    let quadrature = images
        .iter()
        .map(GridFunction::representation_error)
        .fold(0.0, f64::max)
        + gamma
            * x.members
                .iter()
                .map(GridFunction::representation_error)
                .fold(0.0, f64::max);
    let image = Ensemble::new(format!("image of {}", x.label), images)?;

    let source_est = mu_measure(x, schedules)?;
    let image_est = mu_measure(&image, schedules)?;
    let envelope = residual_envelope(spec, x.members[0].grid())?;
    let round = |a: f64, b: f64| 64.0 * f64::EPSILON * (1.0 + a.abs() + b.abs());

    let mut comparisons = Vec::new();
    for (i, &eps) in schedules.epsilon.iter().enumerate() {
        let (s, im) = (source_est.c.values[i], image_est.c.values[i]);
        let slack = envelope.worst_subset_mass(eps) + quadrature + round(s, im);
        comparisons.push(ScheduleComparison {
            part: "epsilon".into(),
            at: eps,
            source: s,
            image: im,
            slack,
            holds: im <= gamma * s + slack,
        });
    }
    for (i, &tau) in schedules.tau.iter().enumerate() {
        let (s, im) = (source_est.d.values[i], image_est.d.values[i]);
        let slack = envelope.tail_mass(tau) + quadrature + round(s, im);
        comparisons.push(ScheduleComparison {
            part: "tau".into(),
            at: tau,
            source: s,
            image: im,
            slack,
            holds: im <= gamma * s + slack,
        });
    }
    let eps_last = schedules.epsilon[schedules.epsilon.len() - 1];
    let tau_last = schedules.tau[schedules.tau.len() - 1];
    let slack = envelope.worst_subset_mass(eps_last)
        + envelope.tail_mass(tau_last)
        + 2.0 * quadrature
        + round(source_est.mu_hat, image_est.mu_hat);
    comparisons.push(ScheduleComparison {
        part: "mu".into(),
        at: eps_last,
        source: source_est.mu_hat,
        image: image_est.mu_hat,
        slack,
        holds: image_est.mu_hat <= gamma * source_est.mu_hat + slack,
    });

    let passed = comparisons.iter().all(|c| c.holds);
    Ok(MuContractionReport {
        gamma,
        ratio: (source_est.mu_hat > 0.0).then(|| image_est.mu_hat / source_est.mu_hat),
        source: source_est,
        image: image_est,
        comparisons,
        cross,
        passed,
    })
}

/// Pairwise distances of `{A x_n}` for a weakly oscillating sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WsProbe {
    pub size: usize,
    /// `‖x_i - x_j‖`, row-major upper triangle.
    pub input_distances: Vec<f64>,
    /// `‖Ax_i - Ax_j‖`, same layout.
    pub image_distances: Vec<f64>,
    pub max_input_distance: f64,
    pub max_image_distance: f64,
    /// Largest image distance among the second half of the sequence.
    pub late_image_distance: f64,
}

/// Applies `A` to `(1 + sin(nt)) e^{-t}`, `n = 1..size`, scaled into `B_r`,
/// and reports how spread out the images are. This is an observation only.
pub fn probe_ws_compactness(spec: &ProblemSpec, grid: &Grid, size: usize, r: f64) -> Result<WsProbe> {
    let xs = Ensemble::oscillating(grid, size)?.scaled_into_ball(r);
    let ax = xs.try_map("A of oscillating", |m| apply_a(spec, m))?;
    let n = xs.len();
    let mut input_distances = Vec::new();
    let mut image_distances = Vec::new();
    let mut late: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            input_distances.push(xs.members[i].sub(&xs.members[j]).norm());
            let d = ax.members[i].sub(&ax.members[j]).norm();
            if i >= n / 2 {
                late = late.max(d);
            }
            image_distances.push(d);
        }
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(WsProbe {
        size: n,
        max_input_distance: max(&input_distances),
        max_image_distance: max(&image_distances),
        late_image_distance: late,
        input_distances,
        image_distances,
    })
}
