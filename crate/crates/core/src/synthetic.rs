//! Seeded two-Gaussian datasets for tests, examples and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::data::{ClassLabel, Dataset, Instance, Schema};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianSpec {
    pub n_majority: usize,
    pub n_minority: usize,
    pub n_features: usize,
    /// Distance between the two class means; both classes have unit variance.
    pub separation: f64,
    pub seed: u64,
}

impl GaussianSpec {
    pub fn imbalance_ratio(&self) -> f64 {
        self.n_majority as f64 / self.n_minority as f64
    }
}

/// Majority rows around the origin, minority rows around a point at
/// `separation` along the main diagonal. Majority rows come first.
pub fn two_gaussians(spec: &GaussianSpec) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shift = spec.separation / (spec.n_features as f64).sqrt();
    let mut instances = Vec::with_capacity(spec.n_majority + spec.n_minority);
    let mut labels = Vec::with_capacity(instances.capacity());
    for (label, n, offset) in [
        (ClassLabel::Majority, spec.n_majority, 0.0),
        (ClassLabel::Minority, spec.n_minority, shift),
    ] {
        for _ in 0..n {
            let x: Vec<f64> = (0..spec.n_features)
                .map(|_| offset + rng.sample::<f64, _>(StandardNormal))
                .collect();
            instances.push(Instance::new(x));
            labels.push(label);
        }
    }
    Dataset::new(
        Schema::generic(spec.n_features),
        instances,
        labels,
        format!(
            "gaussians:{}x{}:{}:{}",
            spec.n_majority, spec.n_minority, spec.n_features, spec.seed
        ),
    )
}

/// Twenty specs with imbalance ratios spread over 9..=86, at most 500 rows
/// and 2 to 10 features.
pub fn benchmark_suite(seed: u64) -> Vec<GaussianSpec> {
    (0..20)
        .map(|i| {
            let target_ir = 9.0 + 77.0 * i as f64 / 19.0;
            let n_minority = ((500.0 / (target_ir + 1.0)).floor() as usize).clamp(5, 40);
            let n_majority = ((target_ir * n_minority as f64).round() as usize).min(500 - n_minority);
            GaussianSpec {
                n_majority,
                n_minority,
                n_features: 2 + i % 9,
                separation: 2.5,
                seed: seed.wrapping_add(i as u64),
            }
        })
        .collect()
}

/// Overlapping classes at imbalance ratio 10 (300 vs 30 rows, 2 features).
pub fn overlap_ir10(seed: u64) -> GaussianSpec {
    GaussianSpec {
        n_majority: 300,
        n_minority: 30,
        n_features: 2,
        separation: 2.0,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_shape() {
        let suite = benchmark_suite(0);
        assert_eq!(suite.len(), 20);
        for s in &suite {
            let ir = s.imbalance_ratio();
            assert!((9.0..=86.0).contains(&ir), "IR {ir}");
            assert!(s.n_majority + s.n_minority <= 500);
            assert!((2..=10).contains(&s.n_features));
        }
        assert!(suite.iter().any(|s| s.imbalance_ratio() >= 85.0));
    }

    #[test]
    fn generated_counts_and_determinism() {
        let spec = overlap_ir10(3);
        let d = two_gaussians(&spec).unwrap();
        assert_eq!(d.class_counts(), (300, 30));
        assert_eq!(d, two_gaussians(&spec).unwrap());
        assert_ne!(d, two_gaussians(&overlap_ir10(4)).unwrap());
    }
}
