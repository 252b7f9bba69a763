//! Every module invariant as a seeded property run of [`CASES`] trials.
//!
//! Each property is a plain function so that both the `properties` test
//! target and the acceptance harness can run it.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use mixfie::certify::{
    check_ball_invariance, check_envelopes, check_separate_contraction, contraction_constant, invariant_ball_radius,
    AssumptionCheck, CheckStatus, ContractionWitness,
};
use mixfie::cli::{self, load_bundled, CertifyRun, ProblemDefinition};
use mixfie::error::Error;
use mixfie::l1::{Grid, GridFunction, MeasurableSubset};
use mixfie::operators::{
    apply_a, apply_b, apply_kernel_linear, apply_kernel_nonlinear, estimate_kernel_norm, residual, superpose,
    KernelNormOptions, ProblemSpec,
};
use mixfie::solver::{solve, Scheme, SolveConfig};
use mixfie::wkmeasure::{mu_measure, Ensemble, Schedules};

use super::{constants_spec, linear_problem, sine_problem, worked_on};

pub const CASES: u32 = 1000;

pub type Property = fn() -> Result<(), String>;

fn runner(name: &str) -> TestRunner {
    // a fixed seed per property, derived from its name
    let mut seed = [0u8; 32];
    for (i, b) in name.bytes().enumerate() {
        seed[i % 32] = seed[i % 32].wrapping_mul(31).wrapping_add(b);
    }
    TestRunner::new_with_rng(
        Config {
            cases: CASES,
            failure_persistence: None,
            max_shrink_iters: 64,
            ..Config::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, &seed),
    )
}

fn run<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(name).run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

/// `(amplitude, centre, rate)` of `amp e^{-rate |t - centre|}`.
type Bumps = Vec<(f64, f64, f64)>;

fn bumps(nonnegative: bool) -> impl Strategy<Value = Bumps> {
    let amp = if nonnegative { 0.0..3.0 } else { -3.0..3.0 };
    prop::collection::vec((amp, 0.0..8.0, 0.2..4.0), 1..4)
}

fn build(grid: &Grid, b: &Bumps) -> GridFunction {
    let b = b.clone();
    GridFunction::from_fn(grid, move |t| {
        b.iter().map(|&(a, c, r)| a * (-r * (t - c).abs()).exp()).sum()
    })
    .unwrap()
}

fn small_grid(t_max: f64) -> impl Strategy<Value = Grid> {
    (prop::sample::select(vec![8usize, 16, 24, 32, 48]), any::<bool>()).prop_map(move |(n, geometric)| {
        if geometric {
            Grid::geometric(t_max, n, 6.0).unwrap()
        } else {
            Grid::uniform(t_max, n).unwrap()
        }
    })
}

/// An ordered list of cut points `0 <= p_0 < p_1 < ...` from positive gaps.
fn cuts(count: usize, span: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..1.0f64, count).prop_map(move |gaps| {
        let total: f64 = gaps.iter().sum::<f64>() * 1.1;
        let mut acc = 0.0;
        gaps.iter()
            .map(|g| {
                acc += g;
                acc / total * span
            })
            .collect()
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---------------------------------------------------------------- l1core

pub fn l1_triangle() -> Result<(), String> {
    run(
        "l1_triangle",
        (
            small_grid(10.0),
            small_grid(10.0),
            small_grid(10.0),
            bumps(false),
            bumps(false),
            bumps(false),
        ),
        |(g1, g2, g3, a, b, c)| {
            let (x, y, z) = (build(&g1, &a), build(&g2, &b), build(&g3, &c));
            let d = mixfie::l1::distance;
            prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12);
            Ok(())
        },
    )
}

pub fn l1_additivity() -> Result<(), String> {
    run(
        "l1_additivity",
        (small_grid(10.0), bumps(false), cuts(6, 12.0)),
        |(g, b, p)| {
            let x = build(&g, &b);
            let i = MeasurableSubset::new(vec![(p[0], p[1]), (p[4], p[5])]).unwrap();
            let j = MeasurableSubset::interval(p[2], p[3]).unwrap();
            let both = i.union(&j).unwrap();
            let lhs = x.integrate_abs(&both);
            let rhs = x.integrate_abs(&i) + x.integrate_abs(&j);
            prop_assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
            Ok(())
        },
    )
}

pub fn l1_worst_subset() -> Result<(), String> {
    run(
        "l1_worst_subset",
        (small_grid(10.0), bumps(false), 1e-6..5.0f64, 1e-6..5.0f64),
        |(g, b, e1, e2)| {
            let x = build(&g, &b);
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let (w_lo, w_hi) = (x.worst_subset_mass(lo), x.worst_subset_mass(hi));
            prop_assert!(w_lo <= w_hi + 1e-12, "{w_lo} > {w_hi}");
            prop_assert!(w_hi <= x.norm() + 1e-12);
            Ok(())
        },
    )
}

/// Successive differences of `∫ x` shrink by about 4 per halving of `h`.
pub fn l1_refinement() -> Result<(), String> {
    run(
        "l1_refinement",
        (0.3..2.0f64, 0.0..0.5f64, 0.5..3.0f64),
        |(rate, lin, amp)| {
            let f = move |t: f64| amp * (-rate * t).exp() * (1.0 + lin * rate * t);
            let i = |n: usize| {
                let g = Grid::uniform(10.0, n).unwrap();
                GridFunction::from_fn(&g, f)
                    .unwrap()
                    .integrate_abs(&MeasurableSubset::half_line())
            };
            let (i1, i2, i3) = (i(64), i(128), i(256));
            let ratio = (i1 - i2) / (i2 - i3);
            prop_assert!((3.8..=4.2).contains(&ratio), "ratio {ratio}");
            Ok(())
        },
    )
}

// ------------------------------------------------------------- operators

pub fn operators_linearity() -> Result<(), String> {
    let spec = worked_on(32, 32).spec;
    run(
        "operators_linearity",
        (small_grid(10.0), bumps(true), bumps(true), 0.0..3.0f64, 0.0..3.0f64),
        |(g, p, q, a, b)| {
            let (x, y) = (build(&g, &p), build(&g, &q));
            let lhs = apply_kernel_linear(&spec.k, &x.axpby(a, &y, b)).unwrap();
            let rhs = apply_kernel_linear(&spec.k, &x)
                .unwrap()
                .axpby(a, &apply_kernel_linear(&spec.k, &y).unwrap(), b);
            let scale = 1.0 + lhs.max_abs();
            prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-10 * scale);
            Ok(())
        },
    )
}

pub fn operators_norm_bound() -> Result<(), String> {
    let spec = worked_on(32, 32).spec;
    // the half-line norm bounds the operator on any truncation
    let est = estimate_kernel_norm(&spec.k, &KernelNormOptions::default()).map_err(|e| e.to_string())?;
    let bound = est.value + est.refinement_slack;
    run("operators_norm_bound", (small_grid(10.0), bumps(true)), |(g, p)| {
        let x = build(&g, &p);
        let kx = apply_kernel_linear(&spec.k, &x).unwrap();
        let slack = kx.representation_error() + 1e-12;
        prop_assert!(
            kx.norm() <= bound * x.norm() + slack,
            "{} > {} * {}",
            kx.norm(),
            bound,
            x.norm()
        );
        Ok(())
    })
}

/// Integral bounds on `B` over unions of intervals, and on `A` over initial
/// segments `[0, τ)`.
///
/// The bound on `A` over an arbitrary subset moves `‖K‖` outside an
/// integral restricted to that subset, which is false in general: `Kα`
/// on `[τ, τ+1]` collects `α` on all of `[0, τ+1]`. Over initial segments
/// the Volterra structure makes it true.
pub fn operators_envelope_propagation() -> Result<(), String> {
    let spec = worked_on(32, 32).spec;
    let knorm = spec.kernel_norm.value;
    run(
        "operators_envelope_propagation",
        (small_grid(10.0), bumps(false), cuts(4, 10.0), 0.1..10.0f64),
        |(g, p, c, tau)| {
            let x = build(&g, &p);
            let i = MeasurableSubset::new(vec![(c[0], c[1]), (c[2], c[3])]).unwrap();
            let bx = apply_b(&spec, &x).unwrap();
            let phi_i = i.image(|t| spec.t_op.deviation.eval(t)).unwrap();
            let b_rhs = spec.g.envelope_offset.integrate_abs(&i).unwrap()
                + spec.g.envelope_slope
                    * (spec.t_op.envelope_offset.integrate_abs(&i).unwrap()
                        + spec.t_op.envelope_factor / spec.t_op.deviation_slope_min * x.integrate_abs(&phi_i));
            let b_slack = 4.0 * (bx.representation_error() + x.representation_error()) + 1e-10;
            let b_lhs = bx.integrate_abs(&i);
            prop_assert!(b_lhs <= b_rhs + b_slack, "B: {b_lhs} > {b_rhs} + {b_slack}");

            let seg = MeasurableSubset::interval(0.0, tau).unwrap();
            let ax = apply_a(&spec, &x).unwrap();
            let psi_seg = seg.image(|t| spec.q_op.deviation.eval(t)).unwrap();
            let u = &spec.u;
            let a_rhs = spec.f.envelope_offset.integrate_abs(&seg).unwrap()
                + spec.f.envelope_slope
                    * knorm
                    * (u.envelope_offset.integrate_abs(&seg).unwrap()
                        + u.envelope_slope * spec.q_op.envelope_offset.integrate_abs(&seg).unwrap()
                        + u.envelope_slope * spec.q_op.envelope_factor / spec.q_op.deviation_slope_min
                            * x.integrate_abs(&psi_seg));
            let a_slack = 4.0 * (ax.representation_error() + x.representation_error()) + 1e-10;
            let a_lhs = ax.integrate_abs(&seg);
            prop_assert!(a_lhs <= a_rhs + a_slack, "A: {a_lhs} > {a_rhs} + {a_slack}");
            Ok(())
        },
    )
}

pub fn operators_composition() -> Result<(), String> {
    let spec = worked_on(32, 32).spec;
    run("operators_composition", (small_grid(10.0), bumps(false)), |(g, p)| {
        let x = build(&g, &p);
        let manual = superpose(
            &spec.f,
            &apply_kernel_nonlinear(&spec.k, &spec.u, &spec.q_op.apply(&x).unwrap()).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(apply_a(&spec, &x).unwrap(), manual);
        Ok(())
    })
}

// --------------------------------------------------------------- certify

pub fn certify_gamma_monotone() -> Result<(), String> {
    run(
        "certify_gamma_monotone",
        (prop::collection::vec(0.01..10.0f64, 8), 0usize..8, 1.001..2.0f64),
        |(v, which, factor)| {
            let gamma = |v: &[f64]| {
                contraction_constant(&constants_spec(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]))
                    .unwrap()
                    .gamma
            };
            let mut w = v.clone();
            w[which] *= factor;
            let (before, after) = (gamma(&v), gamma(&w));
            // slots 2 and 7 are m and M
            if which == 2 || which == 7 {
                prop_assert!(after < before);
            } else {
                prop_assert!(after > before);
            }
            Ok(())
        },
    )
}

pub fn certify_radius_identity() -> Result<(), String> {
    run(
        "certify_radius_identity",
        (0.0..0.99f64, 0.0..1.0f64, 0.01..5.0f64),
        |(b, split, knorm)| {
            // γ = b_split + the A term, both below 0.99 in sum
            let mut spec = constants_spec(b * split, 1.0, 1.0, 1.0, 1.0, b * (1.0 - split) / knorm, knorm, 1.0);
            spec.g.envelope_offset = mixfie::TimeFunction::new("e^-t", |t| (-t).exp());
            spec.u.envelope_offset = mixfie::TimeFunction::new("2e^-2t", |t| 2.0 * (-2.0 * t).exp());
            let ball = invariant_ball_radius(&spec).unwrap();
            let r = ball.r.unwrap();
            prop_assert!((ball.c + ball.gamma * r - r).abs() <= 16.0 * f64::EPSILON * r.max(1.0));
            Ok(())
        },
    )
}

/// Re-evaluates a falsified pointwise check from its witness point.
fn reevaluate(spec: &ProblemSpec, check: &AssumptionCheck) -> Option<(f64, f64, f64)> {
    let CheckStatus::Falsified { witness } = &check.status else {
        return None;
    };
    let p = |k: &str| witness.point[k];
    let (lhs, rhs) = match check.id.as_str() {
        "growth_g" => (
            spec.g.eval(p("t"), p("x")).abs(),
            spec.g.envelope_offset.eval(p("t")) + spec.g.envelope_slope * p("x").abs(),
        ),
        "growth_f" => (
            spec.f.eval(p("t"), p("x")).abs(),
            spec.f.envelope_offset.eval(p("t")) + spec.f.envelope_slope * p("x").abs(),
        ),
        "growth_u" => (
            spec.u.eval(p("t"), p("s"), p("x")).abs(),
            spec.u.envelope_offset.eval(p("s")) + spec.u.envelope_slope * p("x").abs(),
        ),
        "modulus_u" => (
            (spec.u.eval(p("t"), p("s"), p("x")) - spec.u.eval(p("t") + p("delta"), p("s"), p("x"))).abs(),
            spec.u.modulus(p("delta")) * (spec.u.modulus_weight.eval(p("s")) + spec.u.modulus_slope * p("x").abs()),
        ),
        "deviation_phi" | "deviation_psi" => {
            let op = if check.id == "deviation_phi" {
                &spec.t_op
            } else {
                &spec.q_op
            };
            let (a, b) = (p("t"), p("t_next"));
            (
                op.deviation_slope_min,
                (op.deviation.eval(b) - op.deviation.eval(a)) / (b - a),
            )
        }
        // the sampled function is not part of the witness; recheck the bound only
        "inner_t" | "inner_q" => {
            let op = if check.id == "inner_t" { &spec.t_op } else { &spec.q_op };
            (
                witness.lhs,
                op.envelope_offset.eval(p("t")) + op.envelope_factor * p("x_at_deviation"),
            )
        }
        _ => (witness.lhs, witness.rhs),
    };
    Some((lhs, rhs, witness.slack))
}

pub fn certify_falsification_soundness() -> Result<(), String> {
    let base = worked_on(32, 32);
    run(
        "certify_falsification_soundness",
        (
            0.0..0.5f64,
            0.0..1.5f64,
            0.0..0.6f64,
            0.0..1.0f64,
            1.0..3.0f64,
            0.0..1.5f64,
            any::<u64>(),
        ),
        |(b, b1, beta, lambda, m, rho1, seed)| {
            let mut spec = base.spec.clone();
            spec.g.envelope_slope = b;
            spec.f.envelope_slope = b1;
            spec.u.envelope_slope = beta;
            spec.u.modulus_slope = lambda;
            spec.t_op.deviation_slope_min = m;
            spec.t_op.envelope_factor = rho1;
            let report = check_envelopes(&spec, &base.check_grid, 60, seed).unwrap();
            for c in &report.checks {
                if let Some((lhs, rhs, slack)) = reevaluate(&spec, c) {
                    prop_assert!(lhs - rhs > slack, "{}: {lhs} - {rhs} <= {slack}", c.id);
                }
            }
            Ok(())
        },
    )
}

pub fn certify_determinism() -> Result<(), String> {
    let p = worked_on(16, 16);
    let witness = ContractionWitness::Strict(0.5);
    run("certify_determinism", any::<u64>(), |seed| {
        let once = || {
            (
                check_envelopes(&p.spec, &p.check_grid, 20, seed).unwrap(),
                check_separate_contraction(&p.spec, &p.check_grid, &witness, 2, 5.0, seed).unwrap(),
                check_ball_invariance(&p.spec, &p.check_grid, 5.0, 2, seed).unwrap(),
            )
        };
        prop_assert_eq!(once(), once());
        Ok(())
    })
}

// ------------------------------------------------------------- wkmeasure

fn wk_grid() -> Grid {
    Grid::geometric(40.0, 32, 6.0).unwrap()
}

fn members(grid: &Grid, bs: &[Bumps]) -> Vec<GridFunction> {
    bs.iter().map(|b| build(grid, b)).collect()
}

pub fn wkmeasure_monotone() -> Result<(), String> {
    let grid = wk_grid();
    let sched = Schedules::default();
    run(
        "wkmeasure_monotone",
        (
            prop::collection::vec(bumps(false), 2..6),
            prop::collection::vec(any::<bool>(), 6),
        ),
        |(bs, keep)| {
            let all = members(&grid, &bs);
            let mut sub: Vec<GridFunction> = all.iter().zip(&keep).filter(|p| *p.1).map(|p| p.0.clone()).collect();
            if sub.is_empty() {
                sub.push(all[0].clone());
            }
            let y = mu_measure(&Ensemble::new("Y", all).unwrap(), &sched).unwrap();
            let x = mu_measure(&Ensemble::new("X", sub).unwrap(), &sched).unwrap();
            prop_assert!(x.c_hat <= y.c_hat && x.d_hat <= y.d_hat && x.mu_hat <= y.mu_hat);
            Ok(())
        },
    )
}

pub fn wkmeasure_convexity() -> Result<(), String> {
    let grid = wk_grid();
    let sched = Schedules::default();
    run(
        "wkmeasure_convexity",
        (prop::collection::vec((bumps(false), bumps(false)), 1..5), 0.0..=1.0f64),
        |(pairs, lam)| {
            let xs: Vec<GridFunction> = pairs.iter().map(|p| build(&grid, &p.0)).collect();
            let ys: Vec<GridFunction> = pairs.iter().map(|p| build(&grid, &p.1)).collect();
            let zs: Vec<GridFunction> = xs.iter().zip(&ys).map(|(x, y)| x.axpby(lam, y, 1.0 - lam)).collect();
            let mu = |v: Vec<GridFunction>| mu_measure(&Ensemble::new("e", v).unwrap(), &sched).unwrap().mu_hat;
            let (mx, my, mz) = (mu(xs), mu(ys), mu(zs));
            prop_assert!(
                mz <= lam * mx + (1.0 - lam) * my + 1e-10,
                "{mz} > {lam} {mx} + {} {my}",
                1.0 - lam
            );
            Ok(())
        },
    )
}

pub fn wkmeasure_additivity() -> Result<(), String> {
    let grid = wk_grid();
    let sched = Schedules::default();
    run(
        "wkmeasure_additivity",
        prop::collection::vec(bumps(false), 1..5),
        |bs| {
            let m = mu_measure(&Ensemble::new("e", members(&grid, &bs)).unwrap(), &sched).unwrap();
            prop_assert_eq!(m.mu_hat, m.c_hat + m.d_hat);
            Ok(())
        },
    )
}

pub fn wkmeasure_singleton_vanishing() -> Result<(), String> {
    let grid = wk_grid();
    let sched = Schedules {
        epsilon: (0..=8).map(|k| 10f64.powi(-k)).collect(),
        tau: vec![5.0, 10.0, 20.0, 30.0, 40.0],
    };
    run("wkmeasure_singleton_vanishing", bumps(false), |b| {
        let x = build(&grid, &b);
        let m = mu_measure(&Ensemble::new("one", vec![x.clone()]).unwrap(), &sched).unwrap();
        prop_assert!(m.c.values.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        prop_assert!(m.d.values.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        prop_assert!(m.mu_hat <= x.max_abs() * 1e-8 * (1.0 + 1e-9));
        Ok(())
    })
}

// ---------------------------------------------------------------- solver

fn small_solve_grid() -> Grid {
    Grid::geometric(20.0, 64, 6.0).unwrap()
}

pub fn solver_residual_consistency() -> Result<(), String> {
    let grid = small_solve_grid();
    run(
        "solver_residual_consistency",
        (
            0.05..0.95f64,
            -2.0..2.0f64,
            0.2..3.0f64,
            1e-8..1e-3f64,
            1usize..30,
            any::<bool>(),
        ),
        |(kappa, c, lambda, tol, iters, split)| {
            let spec = sine_problem(kappa, c, lambda);
            let config = SolveConfig {
                scheme: if split { Scheme::Split } else { Scheme::Picard },
                tol,
                max_iters: iters,
                refinement_check: false,
                ..SolveConfig::default()
            };
            let rep = solve(&spec, &GridFunction::zero(&grid), &config).unwrap();
            let again = residual(&spec, &rep.final_iterate).unwrap();
            prop_assert!((rep.final_residual() - again).abs() <= 1e-12);
            Ok(())
        },
    )
}

pub fn solver_ball_preservation() -> Result<(), String> {
    let grid = small_solve_grid();
    run(
        "solver_ball_preservation",
        (0.05..0.95f64, -5.0..5.0f64, 0.1..2.0f64, 0.05..3.0f64, 0.1..=1.0f64),
        |(kappa, c, lambda, r, damping)| {
            let spec = sine_problem(kappa, c, lambda);
            let config = SolveConfig {
                project_to_ball: Some(r),
                damping,
                max_iters: 25,
                refinement_check: false,
                ..SolveConfig::default()
            };
            let rep = solve(&spec, &GridFunction::zero(&grid), &config).unwrap();
            prop_assert!(rep.norm_history.iter().all(|&n| n <= r + 1e-12));
            Ok(())
        },
    )
}

pub fn solver_contractive_convergence() -> Result<(), String> {
    let grid = small_solve_grid();
    run(
        "solver_contractive_convergence",
        (0.05..0.95f64, prop_oneof![Just(1.0), 1.5..3.0f64], 0.1..3.0f64),
        |(kappa, slope, c)| {
            let spec = linear_problem(kappa, slope, c);
            let config = SolveConfig {
                tol: 1e-12,
                max_iters: 40,
                refinement_check: false,
                ..SolveConfig::default()
            };
            let rep = solve(&spec, &GridFunction::zero(&grid), &config).unwrap();
            let h = &rep.residual_history;
            // cancellation in x - Bx leaves absolute noise near cells·ε·‖x‖; ratios
            // are only meaningful far above it
            let floor = 1e7 * grid.cells() as f64 * f64::EPSILON * (1.0 + rep.final_norm());
            for w in h.windows(2) {
                if w[0] > floor {
                    prop_assert!(w[1] <= (kappa + 1e-6) * w[0], "ratio {} > {kappa}", w[1] / w[0]);
                }
            }
            Ok(())
        },
    )
}

pub fn solver_refinement_stability() -> Result<(), String> {
    let grid = Grid::geometric(40.0, 1024, 6.0).unwrap();
    run(
        "solver_refinement_stability",
        (0.05..0.9f64, -2.0..2.0f64, 0.2..2.0f64, 1e-6..1e-4f64),
        |(kappa, c, lambda, tol)| {
            let spec = sine_problem(kappa, c, lambda);
            let config = SolveConfig {
                tol,
                ..SolveConfig::default()
            };
            let rep = solve(&spec, &GridFunction::zero(&grid), &config).unwrap();
            if rep.converged() {
                let fine = rep.refinement.unwrap();
                prop_assert!(fine.relative <= 10.0 * tol, "{} > 10 * {tol}", fine.relative);
            }
            Ok(())
        },
    )
}

// ------------------------------------------------------------------- cli

fn tiny(name: &str) -> ProblemDefinition {
    let mut def = load_bundled(name).unwrap();
    def.numerics.cells = 16;
    def.numerics.check_cells = 16;
    def
}

pub fn cli_reproducibility() -> Result<(), String> {
    let defs: Vec<ProblemDefinition> = ["taoudi_example", "half_contraction", "forced_fixed_point"]
        .iter()
        .map(|n| tiny(n))
        .collect();
    run("cli_reproducibility", (0usize..3, any::<u64>()), |(which, seed)| {
        let run = CertifyRun {
            seed,
            samples: 20,
            pairs: 2,
            ball_samples: 2,
        };
        let a = cli::run_certify(&defs[which], &run).unwrap().to_json();
        let b = cli::run_certify(&defs[which], &run).unwrap().to_json();
        prop_assert_eq!(a, b);
        Ok(())
    })
}

const REQUIRED: [&str; 17] = [
    "a",
    "b",
    "a1",
    "b1",
    "gamma1",
    "rho1",
    "phi",
    "m",
    "gamma2",
    "rho2",
    "psi",
    "M",
    "alpha",
    "beta",
    "gamma_mod",
    "lambda",
    "h",
];

fn remove(def: &mut ProblemDefinition, name: &str) {
    let c = &mut def.constants;
    match name {
        "a" => c.a = None,
        "b" => c.b = None,
        "a1" => c.a1 = None,
        "b1" => c.b1 = None,
        "gamma1" => c.gamma1 = None,
        "rho1" => c.rho1 = None,
        "phi" => c.phi = None,
        "m" => c.m = None,
        "gamma2" => c.gamma2 = None,
        "rho2" => c.rho2 = None,
        "psi" => c.psi = None,
        "M" => c.big_m = None,
        "alpha" => c.alpha = None,
        "beta" => c.beta = None,
        "gamma_mod" => c.gamma_mod = None,
        "lambda" => c.lambda = None,
        "h" => c.h = None,
        _ => unreachable!(),
    }
}

pub fn cli_strict_validation() -> Result<(), String> {
    let base = tiny("taoudi_example");
    run(
        "cli_strict_validation",
        prop::collection::vec(any::<bool>(), 17),
        |mask| {
            let mut def = base.clone();
            let removed: BTreeSet<String> = REQUIRED
                .iter()
                .zip(&mask)
                .filter(|p| *p.1)
                .map(|p| p.0.to_string())
                .collect();
            for name in &removed {
                remove(&mut def, name);
            }
            match (def.validate(), removed.is_empty()) {
                (Ok(()), true) => {}
                (Err(Error::MissingConstants(list)), false) => {
                    let got: BTreeSet<String> = list.into_iter().collect();
                    prop_assert_eq!(&got, &removed);
                    prop_assert!(matches!(def.build(), Err(Error::MissingConstants(_))));
                }
                (other, _) => return Err(TestCaseError::fail(format!("unexpected {other:?} for {removed:?}"))),
            }
            Ok(())
        },
    )
}

pub fn cli_round_trip() -> Result<(), String> {
    let base = load_bundled("taoudi_example").unwrap();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("def.toml");
    run(
        "cli_round_trip",
        (
            0.0..1.0f64,
            0.0..2.0f64,
            0.0..1.0f64,
            1e-3..1e3f64,
            0.01..0.99f64,
            8usize..5000,
            any::<bool>(),
        ),
        |(b, b1, beta, stretch, kappa, cells, drop_norm)| {
            let mut def = base.clone();
            def.constants.b = Some(b);
            def.constants.b1 = Some(b1);
            def.constants.beta = Some(beta);
            def.constants.kappa = Some(kappa);
            if drop_norm {
                def.constants.kernel_norm = None;
            }
            def.numerics.stretch = stretch;
            def.numerics.cells = cells;
            cli::emit(&def, &path).unwrap();
            prop_assert_eq!(&cli::load_problem(&path).unwrap(), &def);
            prop_assert_eq!(&ProblemDefinition::parse(&def.emit()).unwrap(), &def);
            Ok(())
        },
    )
}

/// Every property, grouped by module.
pub fn all() -> Vec<(&'static str, &'static str, Property)> {
    vec![
        ("l1core", "triangle inequality", l1_triangle),
        ("l1core", "additivity over disjoint subsets", l1_additivity),
        (
            "l1core",
            "worst-subset mass monotone and below the norm",
            l1_worst_subset,
        ),
        ("l1core", "grid refinement ratio near 4", l1_refinement),
        ("operators", "linearity of the kernel operator", operators_linearity),
        ("operators", "kernel norm bound", operators_norm_bound),
        ("operators", "envelope propagation", operators_envelope_propagation),
        ("operators", "composition consistency of A", operators_composition),
        ("certify", "gamma monotone in every constant", certify_gamma_monotone),
        ("certify", "C + gamma r = r", certify_radius_identity),
        ("certify", "falsification soundness", certify_falsification_soundness),
        ("certify", "determinism", certify_determinism),
        ("wkmeasure", "monotonicity", wkmeasure_monotone),
        ("wkmeasure", "convexity bound", wkmeasure_convexity),
        ("wkmeasure", "mu = c + d", wkmeasure_additivity),
        ("wkmeasure", "singleton vanishing", wkmeasure_singleton_vanishing),
        ("solver", "residual consistency", solver_residual_consistency),
        ("solver", "ball preservation", solver_ball_preservation),
        ("solver", "contractive-case convergence", solver_contractive_convergence),
        ("solver", "grid-refinement stability", solver_refinement_stability),
        ("cli", "reproducibility", cli_reproducibility),
        ("cli", "strict validation", cli_strict_validation),
        ("cli", "round trip", cli_round_trip),
    ]
}
