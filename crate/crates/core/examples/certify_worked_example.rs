//! Certificate for the bundled worked example: γ, C, r and every sampled
//! assumption check.

use mixfie::certify::{certify, CertifyOptions};
use mixfie::cli::load_bundled;

fn main() -> mixfie::Result<()> {
    let problem = load_bundled("taoudi_example")?.build()?;
    let cert = certify(
        &problem.spec,
        &problem.check_grid,
        &CertifyOptions {
            witness: problem.witness.clone(),
            ..CertifyOptions::default()
        },
    )?;
    println!("γ = {:.15} (< 1: {})", cert.gamma.gamma, cert.gamma.passed);
    println!("C = {:.15}", cert.c);
    println!("r = {:?}", cert.r);
    for check in &cert.assumptions {
        println!("{:<32} {:?}", check.id, check.status);
    }
    println!("max ‖Bx-By‖/‖x-y‖ = {:?}", cert.contraction_max_ratio);
    println!("max ‖Ax+By‖       = {:?}", cert.ball_max_norm);
    println!("passed: {}", cert.passed);
    Ok(())
}
