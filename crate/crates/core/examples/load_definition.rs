//! Loads a definition file (default: the bundled half contraction), prints
//! its canonical form and runs the certificate job on it.
//!
//!     cargo run --example load_definition -- problems/forced_fixed_point.toml

use mixfie::cli::{load_bundled, load_problem, run_certify, CertifyRun};

fn main() -> mixfie::Result<()> {
    let def = match std::env::args().nth(1) {
        Some(path) => load_problem(path)?,
        None => load_bundled("half_contraction")?,
    };
    println!("# canonical definition\n{}", def.emit());
    let report = run_certify(&def, &CertifyRun::default())?;
    let cert = &report.payload["certificate"];
    println!(
        "gamma = {}, r = {}, passed = {}",
        cert["gamma"]["gamma"], cert["r"], cert["passed"]
    );
    println!("config hash {}", report.provenance.config_hash);
    Ok(())
}
