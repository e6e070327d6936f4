//! Hybrid resampling for binary imbalanced classification.
//!
//! The pipeline has two halves:
//!
//! 1. **Oversampling** ([`multitask`]): one small genetic-programming run per
//!    synthetic instance needed. Each run targets a (majority, minority)
//!    instance pair and evolves expression trees over the minority class
//!    ([`gp`]) scored by a distance/angle fitness ([`fitness`]). Runs for
//!    related targets exchange elite subtrees through transfer crossover.
//! 2. **Undersampling** ([`granular_ball`], [`undersample`]): the oversampled
//!    data is covered by pure granular balls; balls adjoining opposite-class
//!    balls shed instances, and the smallest balls of the larger class are
//!    dropped until both classes have the same size.
//!
//! [`smote`] is the interpolation baseline, [`evaluation`] provides a kNN
//! classifier with AUC and G-mean, and [`pipeline`] wires everything into
//! the `resample`, `evaluate`, `ablate` and `gb-inspect` commands exposed by
//! the `evosampling` binary.
//!
//! ```no_run
//! use evosampling::{data, multitask::RunConfig, pipeline};
//!
//! let text = std::fs::read_to_string("glass4.dat").unwrap();
//! let train = data::parse_keel(&text).unwrap();
//! let out = pipeline::evosample(&train, &RunConfig::default()).unwrap();
//! assert_eq!(out.dataset.class_counts().0, out.dataset.class_counts().1);
//! ```

pub mod data;
pub mod error;
pub mod evaluation;
pub mod fitness;
pub mod gp;
pub mod granular_ball;
pub mod multitask;
pub mod pipeline;
pub mod smote;
pub mod synthetic;
pub mod undersample;

pub use data::{ClassLabel, Dataset, Instance};
pub use error::{Error, Result};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Reserved stream ids for pipeline stages. GP tasks use streams `0..n`.
pub mod streams {
    pub const SPLIT: u64 = u64::MAX;
    pub const GRANULAR_BALLS: u64 = u64::MAX - 1;
    pub const UNDERSAMPLE: u64 = u64::MAX - 2;
    pub const SMOTE: u64 = u64::MAX - 3;
}

/// Independent random stream `stream` under `seed`.
///
/// Every random consumer in the crate draws from its own stream, so results
/// do not depend on scheduling or on how many other consumers exist.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
