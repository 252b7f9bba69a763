//! Pairwise L¹ distances of a weakly convergent sequence and of its image
//! under A + B; the image should not spread further apart than the input.

use mixfie::cli::load_bundled;
use mixfie::wkmeasure::probe_ws_compactness;

fn main() -> mixfie::Result<()> {
    let problem = load_bundled("taoudi_example")?.build()?;
    let probe = probe_ws_compactness(&problem.spec, &problem.check_grid, 8, 1.0)?;
    println!("{} members, {} pairs", probe.size, probe.input_distances.len());
    println!("max input distance  {:.6}", probe.max_input_distance);
    println!("max image distance  {:.6}", probe.max_image_distance);
    println!("late image distance {:.6}", probe.late_image_distance);
    Ok(())
}
