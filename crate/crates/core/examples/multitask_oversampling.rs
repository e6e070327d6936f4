//! Runs the multi-task evolution on an imbalanced synthetic set and shows
//! the task layout, auxiliaries and convergence.
//!
//! `cargo run --release --example multitask_oversampling`

use evosampling::multitask::{assign_tasks, evolve_all, group_tasks, RunConfig};
use evosampling::synthetic::{two_gaussians, GaussianSpec};

fn main() -> evosampling::Result<()> {
    let d = two_gaussians(&GaussianSpec {
        n_majority: 120,
        n_minority: 12,
        n_features: 3,
        separation: 2.5,
        seed: 5,
    })?;
    let tasks = assign_tasks(&d)?;
    let groups = group_tasks(&tasks);
    println!("{} tasks in {} groups (largest {})", tasks.len(), groups.len(),
        groups.iter().map(|g| g.member_task_ids.len()).max().unwrap_or(0));

    let cfg = RunConfig { generations: 30, ..RunConfig::default() };
    let out = evolve_all(&d, &cfg)?;
    for (generation, d_mean, theta_mean) in out.mean_best_curve().iter().step_by(5) {
        println!("gen {generation:>2}: mean best D {d_mean:.4}, theta {theta_mean:.1}");
    }
    println!("never feasible: {:?}", out.never_feasible);
    for (task, prog) in out.tasks.iter().zip(&out.best_programs).take(3) {
        println!("task {} (aux {:?}): {prog}", task.id, task.auxiliary_id);
    }
    let balanced = d.with_appended(out.synthetic, evosampling::ClassLabel::Minority)?;
    println!("after oversampling: {:?}", balanced.class_counts());
    Ok(())
}
