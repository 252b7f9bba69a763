//! Estimates sup_s ∫_s^∞ |k(t,s)| dt for a few kernels.

use mixfie::operators::{estimate_kernel_norm, Kernel2, KernelNormOptions};

fn main() -> mixfie::Result<()> {
    let kernels = [
        Kernel2::new("(t+s)e^-t", |t, s| (t + s) * (-t).exp()),
        Kernel2::new("e^-(t-s)", |t, s| (s - t).exp()),
        Kernel2::new("e^-2t", |t, _| (-2.0 * t).exp()),
    ];
    for k in &kernels {
        let est = estimate_kernel_norm(k, &KernelNormOptions::default())?;
        println!(
            "{:<12} ‖K‖ ≈ {:.10} at s = {:.4} ({} columns, slack {:.1e}, tail {:.1e})",
            k.label(),
            est.value,
            est.argmax,
            est.columns_evaluated,
            est.refinement_slack,
            est.tail_bound
        );
    }
    println!("2/√e = {:.10}", 2.0 / 0.5f64.exp());
    Ok(())
}
