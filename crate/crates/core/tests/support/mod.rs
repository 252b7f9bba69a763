//! Shared test helpers: an independent quadrature oracle, the worked-example
//! formulas written out by hand, frozen high-precision constants and small
//! problem builders.
//!
//! Nothing in `oracle` calls the crate's quadrature or operator code; it
//! reads input functions only through `GridFunction::eval`.

#![allow(dead_code)]
// frozen values keep every digit the oracle produced
#![allow(clippy::excessive_precision)]

pub mod props;

use mixfie::certify::ContractionWitness;
use mixfie::cli::{load_bundled, Problem};
use mixfie::l1::{Grid, GridFunction, TimeFunction};
use mixfie::operators::{
    Deviation, Dilation, InnerOperator, Kernel2, KernelField3, KernelNorm, ProblemSpec, ScalarField2, ZeroMap,
};

/// Values computed once with mpmath at 30 digits.
pub mod frozen {
    /// `∫_0^∞ t/(t³+1) dt = 2π/(3√3)`.
    pub const RATIONAL_NORM: f64 = 1.209_199_576_156_145_23;
    /// `‖α‖` for `α(s) = (1+s)/(2+(1+s)³)`.
    pub const ALPHA_NORM: f64 = 0.748_213_419_219_748_633;
    /// `2/√e`.
    pub const KERNEL_NORM: f64 = 1.213_061_319_425_266_85;
    /// `1/8 + 3/(4√e)`.
    pub const GAMMA: f64 = 0.579_897_994_784_475_068;
    pub const C: f64 = 2.366_828_333_686_543_82;
    pub const R: f64 = 5.633_937_244_532_527_00;
    /// `γ` with `β = 1` in place of `3/8`.
    pub const GAMMA_BETA_ONE: f64 = 1.338_061_319_425_266_85;
    /// `(U0)(t)` and `(A0)(t)` of the worked example.
    pub const U0: [(f64, f64); 4] = [
        (0.5, 0.053_217_790_631_514_494_0),
        (1.0, 0.077_164_365_116_747_244_7),
        (2.0, 0.049_274_948_758_725_542_9),
        (5.0, 0.003_558_688_233_412_695_18),
    ];
    pub const A0: [(f64, f64); 4] = [
        (0.5, 0.001_416_062_833_788_017_40),
        (1.0, 0.002_977_134_438_338_542_08),
        (2.0, 0.001_214_007_901_950_845_96),
        (5.0, 6.332_130_970_976_46e-6),
    ];
    /// `‖K 1_[0,1)‖ = 3 - 5/e` for `k = (t+s)e^{-t}`.
    pub const K_INDICATOR_NORM: f64 = 1.160_602_794_142_788_39;
}

/// Hand-written quadrature and operator formulas.
pub mod oracle {
    use mixfie::l1::GridFunction;

    #[allow(clippy::too_many_arguments)]
    fn simpson(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }

    /// Adaptive Simpson with Richardson correction.
    pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        simpson(f, a, b, fa, fm, fb, whole, tol, 40)
    }

    /// `∫_a^b f` split at the given breakpoints (kinks of the integrand).
    pub fn integrate_split(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
        let mut pts: Vec<f64> = std::iter::once(a)
            .chain(breaks.iter().copied().filter(|&p| p > a && p < b))
            .chain(std::iter::once(b))
            .collect();
        pts.dedup();
        let per = tol / pts.len() as f64;
        pts.windows(2).map(|w| integrate(f, w[0], w[1], per)).sum()
    }

    /// The piecewise-linear input read through `eval`; nodes are its kinks.
    pub fn input(x: &GridFunction) -> (impl Fn(f64) -> f64 + '_, Vec<f64>) {
        (move |s| x.eval(s), x.grid().nodes().to_vec())
    }

    pub fn k(t: f64, s: f64) -> f64 {
        (t + s) * (-t).exp()
    }

    pub fn u(t: f64, s: f64, x: f64) -> f64 {
        let z = 1.0 + t + s;
        z / (2.0 + z.powi(3)) + t * s * (t * s + 3f64.sqrt() * x.sin()) * x / (4.0 * (s + 1.0) * (t * t * s * s + 1.0))
    }

    pub fn g(t: f64, y: f64) -> f64 {
        t / (t.powi(3) + 1.0) + 0.25 * (1.0 + y * y).ln()
    }

    pub fn f(_t: f64, y: f64) -> f64 {
        0.5 * (y * y).atan()
    }

    /// `∫_0^t |k(t,s)| x(s) ds`.
    pub fn kernel_linear(k: &dyn Fn(f64, f64) -> f64, x: &GridFunction, t: f64) -> f64 {
        let (xv, nodes) = input(x);
        integrate_split(&|s| k(t, s).abs() * xv(s), 0.0, t, &nodes, 1e-12)
    }

    /// `∫_0^t k(t,s) u(t,s,x(s)) ds`.
    pub fn kernel_nonlinear(
        k: &dyn Fn(f64, f64) -> f64,
        u: &dyn Fn(f64, f64, f64) -> f64,
        x: &GridFunction,
        t: f64,
    ) -> f64 {
        let (xv, nodes) = input(x);
        integrate_split(&|s| k(t, s) * u(t, s, xv(s)), 0.0, t, &nodes, 1e-12)
    }

    /// `(Tx)(t) = x³(2t)/(1+x²(2t)) + e^{-t} ∫_0^∞ e^{-τ} x/(1+x²)`, given the mean.
    pub fn t_op(x: &GridFunction, mean: f64, t: f64) -> f64 {
        let v = x.eval(2.0 * t);
        v.powi(3) / (1.0 + v * v) + (-t).exp() * mean
    }

    pub fn t_mean(x: &GridFunction) -> f64 {
        let (xv, nodes) = input(x);
        let t_max = x.t_max();
        integrate_split(
            &|s| (-s).exp() * xv(s) / (1.0 + xv(s).powi(2)),
            0.0,
            t_max,
            &nodes,
            1e-13,
        )
    }

    /// `(Qx)(t) = x²(t)/(1+|x(t)|) ∫_0^t e^{-(t+τ)} x/(1+x²)`.
    pub fn q_op(x: &GridFunction, t: f64) -> f64 {
        let (xv, nodes) = input(x);
        let v = xv(t);
        let inner = integrate_split(
            &|s| (-(t + s)).exp() * xv(s) / (1.0 + xv(s).powi(2)),
            0.0,
            t,
            &nodes,
            1e-13,
        );
        v * v / (1.0 + v.abs()) * inner
    }

    /// `(Bx)(t)` of the worked example.
    pub fn b(x: &GridFunction, t: f64) -> f64 {
        g(t, t_op(x, t_mean(x), t))
    }

    /// `(Ax)(t)` of the worked example on the discrete semantics: `Qx` is
    /// taken at the nodes and interpolated linearly before `U` acts.
    pub fn a(x: &GridFunction, t: f64) -> f64 {
        let nodes = x.grid().nodes();
        let q: Vec<f64> = nodes.iter().map(|&s| q_op(x, s)).collect();
        let qx = GridFunction::from_nodal(x.grid(), q).expect("finite");
        f(t, kernel_nonlinear(&k, &u, &qx, t))
    }
}

/// The worked example, discretized per its definition file.
pub fn worked() -> Problem {
    load_bundled("taoudi_example").unwrap().build().unwrap()
}

/// The worked example with its grids replaced.
pub fn worked_on(cells: usize, check_cells: usize) -> Problem {
    let mut def = load_bundled("taoudi_example").unwrap();
    def.numerics.cells = cells;
    def.numerics.check_cells = check_cells;
    def.build().unwrap()
}

/// `A ≡ 0`, `Bx(t) = c e^{-t} + κ x(slope·t)`: a linear contraction with
/// fixed point available in closed form when `slope = 1`.
pub fn linear_problem(kappa: f64, slope: f64, c: f64) -> ProblemSpec {
    let offset = TimeFunction::new(format!("{}e^-t", c.abs()), move |t| c.abs() * (-t).exp());
    ProblemSpec {
        g: ScalarField2::new("offset + x", move |t, x| c * (-t).exp() + x, offset.clone(), 1.0),
        f: ScalarField2::zero(),
        k: Kernel2::zero(),
        u: KernelField3::zero(),
        t_op: InnerOperator::new(
            Dilation { factor: kappa, slope },
            TimeFunction::zero(),
            kappa,
            Deviation::linear(slope, 0.0),
            slope,
        ),
        q_op: InnerOperator::new(ZeroMap, TimeFunction::zero(), 0.0, Deviation::identity(), 1.0),
        kernel_norm: KernelNorm::declared(0.0),
    }
}

/// `A ≡ 0`, `Bx(t) = c e^{-λt} + κ sin(x(t))`.
pub fn sine_problem(kappa: f64, c: f64, lambda: f64) -> ProblemSpec {
    let offset = TimeFunction::new("c e^-lt", move |t| c.abs() * (-lambda * t).exp());
    let mut spec = linear_problem(kappa, 1.0, 0.0);
    spec.g = ScalarField2::new(
        "c e^-lt + k sin x",
        move |t, x| c * (-lambda * t).exp() + kappa * x.sin(),
        offset,
        kappa,
    );
    spec.t_op = InnerOperator::identity();
    spec
}

/// A spec carrying only the scalar constants that enter `γ`.
#[allow(clippy::too_many_arguments)]
pub fn constants_spec(b: f64, rho1: f64, m: f64, b1: f64, rho2: f64, beta: f64, knorm: f64, big_m: f64) -> ProblemSpec {
    ProblemSpec {
        g: ScalarField2::new("0", |_, _| 0.0, TimeFunction::zero(), b),
        f: ScalarField2::new("0", |_, _| 0.0, TimeFunction::zero(), b1),
        k: Kernel2::zero(),
        u: KernelField3::zero_with_envelopes(TimeFunction::zero(), beta, TimeFunction::zero(), 0.0, |d: f64| d.abs()),
        t_op: InnerOperator::new(ZeroMap, TimeFunction::zero(), rho1, Deviation::linear(m, 0.0), m),
        q_op: InnerOperator::new(
            ZeroMap,
            TimeFunction::zero(),
            rho2,
            Deviation::linear(big_m, 0.0),
            big_m,
        ),
        kernel_norm: KernelNorm::declared(knorm),
    }
}

pub fn strict(kappa: f64) -> Option<ContractionWitness> {
    Some(ContractionWitness::Strict(kappa))
}

/// Five fixed inputs for the oracle comparisons.
pub fn fixed_inputs(grid: &Grid) -> Vec<(&'static str, GridFunction)> {
    vec![
        ("zero", GridFunction::zero(grid)),
        ("exp_decay", GridFunction::from_fn(grid, |t| (-t).exp()).unwrap()),
        (
            "bump",
            GridFunction::from_fn(grid, |t| 2.0 * t * (-t * t).exp()).unwrap(),
        ),
        (
            "oscillating",
            GridFunction::from_fn(grid, |t| (1.0 + (3.0 * t).sin()) * (-0.5 * t).exp()).unwrap(),
        ),
        (
            "signed_rational",
            GridFunction::from_fn(grid, |t| (1.0 - t) / (1.0 + t * t)).unwrap(),
        ),
    ]
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
