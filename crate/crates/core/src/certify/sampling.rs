//! Seeded sampling of points and test functions.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::l1::{Grid, GridFunction};

/// The generator used everywhere a seed is accepted.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// `±` log-uniform magnitude.
pub fn signed_log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let v = log_uniform(rng, lo, hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Sum of one to four exponential bumps `σ c e^{-λ|t - t₀|}` with random
/// signs, heights, centres and decay rates. `nonnegative` fixes all signs to `+`.
pub fn random_function<R: Rng>(grid: &Grid, rng: &mut R, nonnegative: bool) -> Result<GridFunction> {
    let count = rng.gen_range(1..=4);
    let horizon = (0.25 * grid.t_max()).min(10.0);
    let bumps: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            let sign = if nonnegative || rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let height = sign * rng.gen_range(0.2..1.0);
            let centre = rng.gen_range(0.0..horizon);
            let decay = log_uniform(rng, 0.2, 5.0);
            (height, centre, decay)
        })
        .collect();
    GridFunction::from_fn(grid, |t| {
        bumps
            .iter()
            .map(|&(c, t0, lam)| c * (-lam * (t - t0).abs()).exp())
            .sum()
    })
}

/// A random function rescaled to norm exactly `radius`.
pub fn random_on_sphere<R: Rng>(grid: &Grid, rng: &mut R, radius: f64) -> Result<GridFunction> {
    let x = random_function(grid, rng, false)?;
    let n = x.norm();
    Ok(if n > 0.0 { x.scale(radius / n) } else { x })
}

/// A random function with norm drawn uniformly from `[0, radius]`.
pub fn random_in_ball<R: Rng>(grid: &Grid, rng: &mut R, radius: f64) -> Result<GridFunction> {
    let rho = radius * rng.gen_range(0.0..=1.0);
    random_on_sphere(grid, rng, rho)
}
