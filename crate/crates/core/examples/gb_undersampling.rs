//! Ball-level cleaning and rebalancing on an already oversampled set.
//!
//! `cargo run --example gb_undersampling`

use evosampling::granular_ball::generate_balls;
use evosampling::smote::smote;
use evosampling::synthetic::{two_gaussians, GaussianSpec};
use evosampling::undersample::{undersample, Phase};
use evosampling::{stream_rng, streams};

fn main() -> evosampling::Result<()> {
    let d = two_gaussians(&GaussianSpec {
        n_majority: 200,
        n_minority: 20,
        n_features: 2,
        separation: 2.0,
        seed: 4,
    })?;
    // any oversampler works here; SMOTE keeps the example fast
    let over = smote(&d, 5, 180, &mut stream_rng(0, streams::SMOTE))?;
    let balls = generate_balls(&over, 1.0, &mut stream_rng(0, streams::GRANULAR_BALLS))?;
    let out = undersample(&balls, &over, 3, &mut stream_rng(0, streams::UNDERSAMPLE))?;

    let removed = |phase| out.events.iter().filter(|e| e.phase == phase).map(|e| e.s).sum::<usize>();
    println!("{} balls over {} rows", balls.len(), over.len());
    println!("cleaning removed {}, rebalancing removed {}", removed(Phase::Cleaning), removed(Phase::Rebalancing));
    println!("before {:?}, after {:?}", over.class_counts(), out.dataset.class_counts());
    for e in out.events.iter().filter(|e| e.s > 0).take(8) {
        println!("  ball {:>3} {:?}: s={} neighbours {:?}{}", e.ball_id, e.phase, e.s,
            e.neighbor_labels, if e.partial { " (partial)" } else { "" });
    }
    Ok(())
}
