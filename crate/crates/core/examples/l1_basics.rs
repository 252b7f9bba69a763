//! Grid functions on a truncated half-line: norms, tails, and the worst
//! small-set mass that drives the weak noncompactness measure.

use mixfie::l1::default_grid;
use mixfie::{GridFunction, MeasurableSubset, TimeFunction};

fn main() -> mixfie::Result<()> {
    let grid = default_grid();
    println!(
        "grid: {} cells on [0, {}], widest cell {:.3e}",
        grid.cells(),
        grid.t_max(),
        grid.max_width()
    );

    let x = GridFunction::from_fn(&grid, |t| (-t).exp())?;
    println!("‖e^-t‖ sampled        = {:.9}", x.norm());
    println!("representation error  = {:.3e}", x.representation_error());
    let exact = TimeFunction::new("e^-t", |t| (-t).exp());
    println!("‖e^-t‖ over [0, ∞)    = {:.12}", exact.norm()?);

    let tail = x.tail_mass(5.0);
    println!("∫_5^T |x|             = {tail:.6e}");
    let set = MeasurableSubset::new(vec![(0.0, 0.5), (2.0, 3.0)])?;
    println!("∫ over [0,.5)∪[2,3)   = {:.6}", x.integrate_abs(&set));

    // n 1_[0,1/n) has unit mass, all of it on a set of measure 1/n
    let spike = GridFunction::indicator(&grid, 0.0, 0.01, 100.0)?;
    for eps in [0.1, 0.01, 0.001] {
        println!(
            "worst mass on sets of measure {eps:<5} = {:.4}",
            spike.worst_subset_mass(eps)
        );
    }
    Ok(())
}
