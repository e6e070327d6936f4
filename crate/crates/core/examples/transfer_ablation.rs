//! Mean-best convergence with and without knowledge transfer, as CSV.
//!
//! `cargo run --release --example transfer_ablation > curves.csv`

use evosampling::multitask::RunConfig;
use evosampling::pipeline::ablate;
use evosampling::synthetic::{benchmark_suite, two_gaussians};

fn main() -> evosampling::Result<()> {
    let spec = &benchmark_suite(0)[10];
    let d = two_gaussians(spec)?;
    eprintln!("dataset: {} x {} rows, IR {:.1}", spec.n_majority, spec.n_minority, spec.imbalance_ratio());
    let [with, without] = ablate(&d, &RunConfig::default())?;
    println!("generation,arm,mean_d,mean_theta");
    for arm in [&with, &without] {
        for (g, md, mt) in &arm.curve {
            println!("{g},{},{md:.6},{mt:.4}", arm.label);
        }
    }
    eprintln!("theta area: {} {:.1}, {} {:.1}", with.label, with.theta_area(), without.label, without.theta_area());
    Ok(())
}
