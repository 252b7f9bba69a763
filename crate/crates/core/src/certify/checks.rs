//! The sampling checks themselves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{self, log_uniform, signed_log_uniform};
use super::{roundoff, AssumptionCheck, ContractionWitness, Tally, Witness};
use crate::error::Result;
use crate::l1::{Grid, GridFunction};
use crate::operators::{apply_a, apply_b, InnerOperator, ProblemSpec, ScalarField2};

const T_MIN: f64 = 1e-3;
const X_MIN: f64 = 1e-3;
const X_MAX: f64 = 1e3;
const DELTA_MIN: f64 = 1e-6;
const DELTA_MAX: f64 = 1e-2;

/// Outcome of [`check_envelopes`], one entry per inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub checks: Vec<AssumptionCheck>,
}

fn growth_check<R: Rng>(
    id: &str,
    name: &str,
    field: &ScalarField2,
    t_max: f64,
    samples: usize,
    rng: &mut R,
) -> AssumptionCheck {
    let mut tally = Tally::default();
    for _ in 0..samples {
        let t = log_uniform(rng, T_MIN, t_max);
        let x = signed_log_uniform(rng, X_MIN, X_MAX);
        let lhs = field.eval(t, x).abs();
        let rhs = field.envelope_offset.eval(t) + field.envelope_slope * x.abs();
        tally.record(Witness::new(&[("t", t), ("x", x)], lhs, rhs, roundoff(&[lhs, rhs])));
    }
    tally.finish(
        id,
        &format!(
            "|{name}(t,x)| <= {}(t) + {}|x|",
            field.envelope_offset.label(),
            field.envelope_slope
        ),
    )
}

/// `|(Px)(t)| <= γ(t) + ρ|x(φ(t))|` at every node, for random `x` of random scale.
fn inner_check<R: Rng>(
    id: &str,
    name: &str,
    op: &InnerOperator,
    grid: &Grid,
    functions: usize,
    rng: &mut R,
) -> Result<AssumptionCheck> {
    let mut tally = Tally::default();
    let nodes = grid.nodes();
    for _ in 0..functions {
        let scale = log_uniform(rng, 1e-2, 1e2);
        let x = sampling::random_function(grid, rng, false)?;
        let x = x.scale(scale / x.max_abs().max(f64::MIN_POSITIVE));
        let px = op.apply(&x)?;
        for i in 0..grid.cells() {
            let (l, r) = px.cell_values(i);
            for (t, v) in [(nodes[i], l), (nodes[i + 1], r)] {
                let arg = op.deviation.eval(t);
                let xv = x.eval_left(arg).abs().max(x.eval_right(arg).abs());
                let lhs = v.abs();
                let rhs = op.envelope_offset.eval(t) + op.envelope_factor * xv;
                tally.record(Witness::new(
                    &[("t", t), ("x_at_deviation", xv), ("scale", scale)],
                    lhs,
                    rhs,
                    roundoff(&[lhs, rhs]),
                ));
            }
        }
    }
    Ok(tally.finish(
        id,
        &format!(
            "|({name}x)(t)| <= {}(t) + {}|x({}(t))|",
            op.envelope_offset.label(),
            op.envelope_factor,
            op.deviation.label()
        ),
    ))
}

/// The deviation increases with slope at least `m` between grid nodes.
fn deviation_check(id: &str, op: &InnerOperator, grid: &Grid) -> AssumptionCheck {
    let mut tally = Tally::default();
    let m = op.deviation_slope_min;
    for w in grid.nodes().windows(2) {
        let slope = (op.deviation.eval(w[1]) - op.deviation.eval(w[0])) / (w[1] - w[0]);
        let slack = roundoff(&[op.deviation.eval(w[1]), op.deviation.eval(w[0])]) / (w[1] - w[0]);
        tally.record(Witness::new(&[("t", w[0]), ("t_next", w[1])], m, slope, slack));
    }
    tally.finish(
        id,
        &format!("{} increasing with derivative >= {m}", op.deviation.label()),
    )
}

/// Checks every pointwise and functional envelope inequality by sampling.
pub fn check_envelopes(spec: &ProblemSpec, grid: &Grid, sample_count: usize, seed: u64) -> Result<EnvelopeReport> {
    let mut rng = sampling::rng(seed);
    let t_max = grid.t_max();
    let samples = sample_count.max(1);
    let functions = (samples / 100).clamp(1, 100);
    let mut checks = vec![
        growth_check("growth_g", "g", &spec.g, t_max, samples, &mut rng),
        growth_check("growth_f", "f", &spec.f, t_max, samples, &mut rng),
        inner_check("inner_t", "T", &spec.t_op, grid, functions, &mut rng)?,
        deviation_check("deviation_phi", &spec.t_op, grid),
        inner_check("inner_q", "Q", &spec.q_op, grid, functions, &mut rng)?,
        deviation_check("deviation_psi", &spec.q_op, grid),
    ];

    let u = &spec.u;
    let mut growth = Tally::default();
    for _ in 0..samples {
        let t = log_uniform(&mut rng, T_MIN, t_max);
        let s = log_uniform(&mut rng, T_MIN, t_max);
        let x = signed_log_uniform(&mut rng, X_MIN, X_MAX);
        let lhs = u.eval(t, s, x).abs();
        let rhs = u.envelope_offset.eval(s) + u.envelope_slope * x.abs();
        growth.record(Witness::new(
            &[("t", t), ("s", s), ("x", x)],
            lhs,
            rhs,
            roundoff(&[lhs, rhs]),
        ));
    }
    checks.push(growth.finish(
        "growth_u",
        &format!(
            "|u(t,s,x)| <= {}(s) + {}|x|",
            u.envelope_offset.label(),
            u.envelope_slope
        ),
    ));

    let mut modulus = Tally::default();
    for _ in 0..samples {
        let t = log_uniform(&mut rng, T_MIN, t_max);
        let s = log_uniform(&mut rng, T_MIN, t_max);
        let x = signed_log_uniform(&mut rng, X_MIN, X_MAX);
        let delta = log_uniform(&mut rng, DELTA_MIN, DELTA_MAX);
        let (u0, u1) = (u.eval(t, s, x), u.eval(t + delta, s, x));
        let lhs = (u0 - u1).abs();
        let rhs = u.modulus(delta) * (u.modulus_weight.eval(s) + u.modulus_slope * x.abs());
        modulus.record(Witness::new(
            &[("t", t), ("s", s), ("x", x), ("delta", delta)],
            lhs,
            rhs,
            roundoff(&[u0, u1, rhs]),
        ));
    }
    checks.push(modulus.finish(
        "modulus_u",
        &format!(
            "|u(t,s,x) - u(t+d,s,x)| <= h(d)[{}(s) + {}|x|]",
            u.modulus_weight.label(),
            u.modulus_slope
        ),
    ));

    // h(δ) → 0: the modulus at a tiny δ must be small against its value at 1
    let mut vanishing = Tally::default();
    let tiny = 1e-12;
    vanishing.record(Witness::new(
        &[("delta", tiny)],
        u.modulus(tiny),
        1e-6 * (1.0 + u.modulus(1.0)),
        0.0,
    ));
    checks.push(vanishing.finish("modulus_vanishes", "h(d) -> 0 as d -> 0"));

    Ok(EnvelopeReport { checks })
}

/// Outcome of [`check_separate_contraction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    /// The pair inequality on `B_r` and the split condition `ψ_c + φ_c <= id`.
    pub checks: Vec<AssumptionCheck>,
    pub max_ratio: f64,
    pub max_slack: f64,
    pub radius: f64,
}

/// Discretization slack for comparing L¹ norms of sampled functions.
fn representation_slack(parts: &[&GridFunction]) -> f64 {
    2.0 * parts.iter().map(|p| p.representation_error()).sum::<f64>()
        + roundoff(&parts.iter().map(|p| p.norm()).collect::<Vec<_>>())
}

/// Samples pairs in `B_r` and checks `‖Bx - By‖ <= φ_c(‖x - y‖)`, then
/// `ψ_c(ρ) + φ_c(ρ) <= ρ` on a log-spaced `ρ` grid.
pub fn check_separate_contraction(
    spec: &ProblemSpec,
    grid: &Grid,
    witness: &ContractionWitness,
    pair_count: usize,
    r: f64,
    seed: u64,
) -> Result<ContractionReport> {
    let mut rng = sampling::rng(seed ^ 0x5ca1ab1e);
    let mut pairs = Tally::default();
    let mut max_ratio: f64 = 0.0;
    let mut max_slack: f64 = 0.0;
    for i in 0..pair_count.max(1) {
        let x = sampling::random_in_ball(grid, &mut rng, r)?;
        let y = sampling::random_in_ball(grid, &mut rng, r)?;
        let dxy = x.sub(&y);
        let d = dxy.norm();
        let bx = apply_b(spec, &x)?;
        let by = apply_b(spec, &y)?;
        let dbb = bx.sub(&by);
        let lhs = dbb.norm();
        let rhs = witness.phi_c(d);
        let slack = representation_slack(&[&dbb, &dxy]);
        max_slack = max_slack.max(slack);
        if d > 0.0 {
            max_ratio = max_ratio.max(lhs / d);
        }
        pairs.record(Witness::new(
            &[
                ("pair", i as f64),
                ("norm_x", x.norm()),
                ("norm_y", y.norm()),
                ("distance", d),
            ],
            lhs,
            rhs,
            slack,
        ));
    }
    let mut split = Tally::default();
    let reference = if r > 0.0 { r } else { 1.0 };
    for k in 0..=80 {
        let rho = reference * 10f64.powf((k as f64 - 40.0) / 10.0);
        let lhs = witness.psi_c(rho) + witness.phi_c(rho);
        split.record(Witness::new(&[("rho", rho)], lhs, rho, roundoff(&[lhs, rho])));
    }
    Ok(ContractionReport {
        checks: vec![
            pairs.finish(
                "separate_contraction_b",
                &format!(
                    "|Bx - By| <= phi_c(|x - y|) on the ball of radius {r}, {}",
                    witness.label()
                ),
            ),
            split.finish("contraction_split", "psi_c(rho) + phi_c(rho) <= rho"),
        ],
        max_ratio,
        max_slack,
        radius: r,
    })
}

/// Outcome of [`check_ball_invariance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallReport {
    pub check: AssumptionCheck,
    pub max_norm: f64,
    pub max_slack: f64,
}

/// Checks `‖Ax + By‖ <= r` for random `x, y` in `B_r`. Even-numbered
/// samples sit exactly on the sphere `‖x‖ = ‖y‖ = r`.
pub fn check_ball_invariance(
    spec: &ProblemSpec,
    grid: &Grid,
    r: f64,
    sample_count: usize,
    seed: u64,
) -> Result<BallReport> {
    let mut rng = sampling::rng(seed ^ 0xba11);
    let mut tally = Tally::default();
    let mut max_norm: f64 = 0.0;
    let mut max_slack: f64 = 0.0;
    for i in 0..sample_count.max(1) {
        let (x, y) = if i % 2 == 0 {
            (
                sampling::random_on_sphere(grid, &mut rng, r)?,
                sampling::random_on_sphere(grid, &mut rng, r)?,
            )
        } else {
            (
                sampling::random_in_ball(grid, &mut rng, r)?,
                sampling::random_in_ball(grid, &mut rng, r)?,
            )
        };
        let ax = apply_a(spec, &x)?;
        let by = apply_b(spec, &y)?;
        let lhs = ax.add(&by).norm();
        let slack = representation_slack(&[&ax, &by]);
        max_norm = max_norm.max(lhs);
        max_slack = max_slack.max(slack);
        tally.record(Witness::new(
            &[("sample", i as f64), ("norm_x", x.norm()), ("norm_y", y.norm())],
            lhs,
            r,
            slack,
        ));
    }
    Ok(BallReport {
        check: tally.finish("ball_invariance", &format!("|Ax + By| <= r = {r} for |x|, |y| <= r")),
        max_norm,
        max_slack,
    })
}
