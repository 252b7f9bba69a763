//! Builds a problem in code instead of from a definition file:
//! A ≡ 0 and Bx = e^{-t} + x/2, whose fixed point is 2e^{-t}.

use mixfie::certify::{certify, CertifyOptions, ContractionWitness};
use mixfie::l1::{default_grid, Grid};
use mixfie::operators::{InnerOperator, Kernel2, KernelField3, KernelNorm, ScalarField2};
use mixfie::solver::{solve, SolveConfig};
use mixfie::{GridFunction, ProblemSpec, TimeFunction};

fn main() -> mixfie::Result<()> {
    let offset = TimeFunction::new("e^-t", |t| (-t).exp());
    let spec = ProblemSpec {
        g: ScalarField2::new("e^-t + x/2", |t, x| (-t).exp() + 0.5 * x, offset, 0.5),
        f: ScalarField2::zero(),
        k: Kernel2::zero(),
        u: KernelField3::zero(),
        t_op: InnerOperator::identity(),
        q_op: InnerOperator::identity(),
        kernel_norm: KernelNorm::declared(0.0),
    };
    let grid = default_grid();
    let cert = certify(
        &spec,
        &Grid::geometric(40.0, 1024, 6.0)?,
        &CertifyOptions {
            witness: Some(ContractionWitness::Strict(0.5)),
            ..CertifyOptions::default()
        },
    )?;
    println!("γ = {}, r = {:?}, certified: {}", cert.gamma.gamma, cert.r, cert.passed);

    let rep = solve(&spec, &GridFunction::zero(&grid), &SolveConfig::default())?;
    let exact = GridFunction::from_fn(&grid, |t| 2.0 * (-t).exp())?;
    println!(
        "{:?} in {} iterations, ‖x - 2e^-t‖ = {:.3e}",
        rep.status,
        rep.iterations(),
        rep.final_iterate.sub(&exact).norm()
    );
    Ok(())
}
