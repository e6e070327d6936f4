//! Covers a noisy two-class set with granular balls at several quality
//! thresholds.
//!
//! `cargo run --example granular_balls`

use evosampling::granular_ball::generate_balls;
use evosampling::synthetic::{two_gaussians, GaussianSpec};
use evosampling::{stream_rng, streams};

fn main() -> evosampling::Result<()> {
    let d = two_gaussians(&GaussianSpec {
        n_majority: 150,
        n_minority: 50,
        n_features: 2,
        separation: 2.0,
        seed: 1,
    })?;
    for threshold in [0.6, 0.7, 0.8, 0.9, 1.0] {
        let set = generate_balls(&d, threshold, &mut stream_rng(3, streams::GRANULAR_BALLS))?;
        let singletons = set.balls.iter().filter(|b| b.size() == 1).count();
        println!("threshold {threshold:.1}: {:>3} balls, {singletons:>3} singletons, min quality {:.3}",
            set.len(), set.min_quality());
    }

    let set = generate_balls(&d, 1.0, &mut stream_rng(3, streams::GRANULAR_BALLS))?;
    let mut largest: Vec<_> = set.balls.iter().collect();
    largest.sort_by_key(|b| std::cmp::Reverse(b.size()));
    for b in largest.iter().take(5) {
        println!("ball {:>3}: {} rows of {}, radius {:.3}", b.id, b.size(), b.label, b.radius);
    }
    Ok(())
}
