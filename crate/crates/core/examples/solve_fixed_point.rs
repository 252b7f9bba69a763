//! Picard and split iterations on the worked example, with the residual
//! history and a refinement check.

use mixfie::cli::load_bundled;
use mixfie::solver::{solve, Scheme, SolveConfig};
use mixfie::GridFunction;

fn main() -> mixfie::Result<()> {
    let problem = load_bundled("taoudi_example")?.build()?;
    let x0 = GridFunction::zero(&problem.grid);
    for scheme in [Scheme::Picard, Scheme::Split] {
        let config = SolveConfig {
            scheme,
            ..SolveConfig::default()
        };
        let rep = solve(&problem.spec, &x0, &config)?;
        println!("{scheme:?}: {:?} after {} iterations", rep.status, rep.iterations());
        for (i, (res, norm)) in rep.residual_history.iter().zip(&rep.norm_history).enumerate() {
            println!("  {i:>3}  residual {res:.3e}  ‖x‖ {norm:.6}");
        }
        if let Some(fine) = &rep.refinement {
            println!("  residual on {} cells: {:.3e}", fine.cells, fine.residual);
        }
        let x = &rep.final_iterate;
        println!(
            "  x*(0) = {:.8}, x*(1) = {:.8}, x*(10) = {:.3e}",
            x.eval(0.0),
            x.eval(1.0),
            x.eval(10.0)
        );
    }
    Ok(())
}
