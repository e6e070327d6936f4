//! SMOTE interpolation and its segment property.
//!
//! `cargo run --example smote_baseline`

use evosampling::smote::smote_samples;
use evosampling::synthetic::{two_gaussians, GaussianSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> evosampling::Result<()> {
    let d = two_gaussians(&GaussianSpec {
        n_majority: 90,
        n_minority: 10,
        n_features: 2,
        separation: 3.0,
        seed: 2,
    })?;
    let samples = smote_samples(&d, 5, 80, &mut ChaCha8Rng::seed_from_u64(9))?;
    for s in samples.iter().take(5) {
        println!("{:?} between rows {} and {}", s.point.as_slice(), s.base, s.neighbor);
    }
    let on_segment = samples.iter().all(|s| {
        let (a, b) = (d.instance(s.base), d.instance(s.neighbor));
        (0..a.len()).all(|c| s.point[c] >= a[c].min(b[c]) && s.point[c] <= a[c].max(b[c]))
    });
    println!("all {} points inside their pair's box: {on_segment}", samples.len());
    Ok(())
}
