//! Compares no resampling, SMOTE and the full pipeline with a 1-NN
//! classifier on overlapping classes at imbalance ratio 10.
//!
//! `cargo run --release --example evaluate_pipeline`

use evosampling::pipeline::{evaluate_once, Method, PipelineConfig};
use evosampling::synthetic::{overlap_ir10, two_gaussians};

fn main() -> evosampling::Result<()> {
    println!("seed  method       auc    g_mean");
    for seed in 0..3 {
        let d = two_gaussians(&overlap_ir10(seed))?;
        for method in [Method::None, Method::Smote, Method::Evosampling] {
            let mut cfg = PipelineConfig { method, knn_k: 1, ..PipelineConfig::default() };
            cfg.run.master_seed = seed;
            let (row, _) = evaluate_once(&d, &cfg)?;
            println!("{seed:>4}  {:<11} {:.3}  {:.3}", method.to_string(), row.auc, row.g_mean);
        }
    }
    Ok(())
}
