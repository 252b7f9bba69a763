//! μ̂ = ĉ + d̂ on standard ensembles, and the fixed-schedule check
//! μ̂(AS+BS) ≤ γ μ̂(S) for the worked example.

use mixfie::certify::invariant_ball_radius;
use mixfie::cli::load_bundled;
use mixfie::wkmeasure::{check_mu_contraction, dieudonne_report, mu_measure, Ensemble, Schedules};

fn main() -> mixfie::Result<()> {
    let problem = load_bundled("taoudi_example")?.build()?;
    let grid = &problem.check_grid;
    let ball = invariant_ball_radius(&problem.spec)?;
    let r = ball.r.expect("worked example has an invariant ball");
    let schedules = Schedules::default();
    println!("ε schedule {:?}", schedules.epsilon);
    println!("τ schedule {:?}", schedules.tau);

    let ensembles = [
        Ensemble::concentrating(grid, 64)?,
        Ensemble::escaping(grid, 20)?,
        Ensemble::oscillating(grid, 8)?,
        Ensemble::random_in_ball(grid, 32, r, 1)?,
    ];
    for e in &ensembles {
        let m = mu_measure(e, &schedules)?;
        let d = dieudonne_report(e, 0.01, 10.0)?;
        println!(
            "{:<16} ĉ = {:.3e}  d̂ = {:.3e}  mass on |D| ≤ 0.01: {:.3} (member {})  tail past 10: {:.3} (member {})",
            e.label(),
            m.c_hat,
            m.d_hat,
            d.small_set_mass,
            d.small_set_member,
            d.tail_mass,
            d.tail_member
        );
        let rep = check_mu_contraction(&problem.spec, &e.scaled_into_ball(r), &schedules, ball.gamma, false)?;
        println!(
            "{:<16} μ̂(S) = {:.3e} -> μ̂(AS+BS) = {:.3e}, holds: {}",
            "", rep.source.mu_hat, rep.image.mu_hat, rep.passed
        );
    }
    Ok(())
}
