//! Fitness of a synthetic instance against its task targets.
//!
//! The synthetic point and the two targets form a triangle with sides
//! `a = |s - min_t|`, `b = |s - maj_t|` and `c = |min_t - maj_t|`. Fitness is
//! the pair `(D, theta)`:
//!
//! * `D = (e - e^(a / (a + b))) / (e - 1)`, in `[0, 1]`, decreasing in the
//!   share of `a`. `D` exceeds [`feasibility_threshold`] exactly when `a < b`.
//! * `theta`, the angle at the synthetic point between the two targets, in
//!   degrees.
//!
//! Ranking is lexicographic: feasible before infeasible, then larger `theta`,
//! then larger `D`. Infeasible values are ranked by `D` alone.

use std::cmp::Ordering;
use std::f64::consts::E;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::euclidean;
use crate::error::{Error, Result};
use crate::gp::Population;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    /// synthetic to minority target
    pub a: f64,
    /// synthetic to majority target
    pub b: f64,
    /// minority target to majority target
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    pub d_score: f64,
    pub theta_degrees: f64,
    pub feasible: bool,
}

impl FitnessValue {
    /// Assigned when a phenotype cannot be scored (overflow, coincident
    /// targets). Ranks at or below every other value.
    pub const WORST: FitnessValue = FitnessValue {
        d_score: 0.0,
        theta_degrees: 0.0,
        feasible: false,
    };
}

/// `(e - e^0.5) / (e - 1)`, about 0.6224593.
pub fn feasibility_threshold() -> f64 {
    d_from_ratio(0.5)
}

#[inline]
fn d_from_ratio(ratio: f64) -> f64 {
    (E - ratio.exp()) / (E - 1.0)
}

pub fn triangle_sides(synthetic: &[f64], maj_t: &[f64], min_t: &[f64]) -> Result<Triangle> {
    for other in [maj_t, min_t] {
        if other.len() != synthetic.len() {
            return Err(Error::Dimension {
                expected: synthetic.len(),
                found: other.len(),
            });
        }
    }
    Ok(Triangle {
        a: euclidean(synthetic, min_t),
        b: euclidean(synthetic, maj_t),
        c: euclidean(min_t, maj_t),
    })
}

/// Distance score `D`. Undefined when the synthetic point coincides with
/// both targets (`a + b = 0`).
pub fn distance_score(t: &Triangle) -> Result<f64> {
    let sum = t.a + t.b;
    if !(sum > 0.0) {
        return Err(Error::Contract("distance score undefined for a + b = 0".into()));
    }
    Ok(d_from_ratio(t.a / sum))
}

/// Angle opposite side `c`, in degrees. The cosine is clamped to `[-1, 1]`
/// so rounding noise that violates the triangle inequality cannot produce NaN.
pub fn angle_score(t: &Triangle) -> Result<f64> {
    if !(t.a > 0.0 && t.b > 0.0) {
        return Err(Error::Contract("angle undefined when a or b is zero".into()));
    }
    let cos = (t.a * t.a + t.b * t.b - t.c * t.c) / (2.0 * t.a * t.b);
    Ok(cos.clamp(-1.0, 1.0).acos().to_degrees())
}

/// Scores a triangle. Degenerate angles count as 0 degrees; an undefined
/// distance score yields [`FitnessValue::WORST`].
pub fn score_triangle(t: &Triangle) -> FitnessValue {
    let Ok(d_score) = distance_score(t) else {
        return FitnessValue::WORST;
    };
    FitnessValue {
        d_score,
        theta_degrees: angle_score(t).unwrap_or(0.0),
        feasible: d_score > feasibility_threshold(),
    }
}

pub fn evaluate_fitness(synthetic: &[f64], maj_t: &[f64], min_t: &[f64]) -> Result<FitnessValue> {
    triangle_sides(synthetic, maj_t, min_t).map(|t| score_triangle(&t))
}

/// Total order used by selection; `Greater` means `f1` is better.
pub fn compare(f1: &FitnessValue, f2: &FitnessValue) -> Ordering {
    match (f1.feasible, f2.feasible) {
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (true, true) => f1
            .theta_degrees
            .total_cmp(&f2.theta_degrees)
            .then(f1.d_score.total_cmp(&f2.d_score)),
        (false, false) => f1.d_score.total_cmp(&f2.d_score),
    }
}

/// Index of the best fitness under [`compare`]; ties go to the lowest index.
pub fn best_index(fitnesses: &[FitnessValue]) -> Option<usize> {
    best_of(fitnesses, 0..fitnesses.len())
}

fn best_of(fitnesses: &[FitnessValue], candidates: impl IntoIterator<Item = usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in candidates {
        best = match best {
            None => Some(i),
            Some(b) => match compare(&fitnesses[i], &fitnesses[b]) {
                Ordering::Greater => Some(i),
                Ordering::Equal if i < b => Some(i),
                _ => Some(b),
            },
        };
    }
    best
}

/// Draws `tournament_size` distinct members uniformly and returns the best.
pub fn tournament_select<R: Rng + ?Sized>(
    pop: &Population,
    tournament_size: usize,
    rng: &mut R,
) -> Result<usize> {
    if !pop.is_evaluated() {
        return Err(Error::Contract("tournament on an unevaluated population".into()));
    }
    if tournament_size == 0 || tournament_size > pop.len() {
        return Err(Error::Contract(format!(
            "tournament size {tournament_size} invalid for population of {}",
            pop.len()
        )));
    }
    let entrants = rand::seq::index::sample(rng, pop.len(), tournament_size);
    Ok(best_of(&pop.fitnesses, entrants.iter()).expect("nonempty tournament"))
}
