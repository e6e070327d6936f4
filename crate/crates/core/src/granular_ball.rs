//! Granular balls: groups of rows summarized by center, radius and purity.
//!
//! Generation starts from one ball holding every row and splits any ball
//! whose quality (share of its most common class) is below the threshold.
//! A split seeds a second center at a randomly chosen member of the other
//! class; members strictly closer to that seed than to the old center move to
//! the new ball. Balls are processed in creation order, so the construction is
//! reproducible for a given random stream.

use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use crate::data::{euclidean, mean_vector, ClassLabel, Dataset, Instance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BallStats {
    pub center: Instance,
    pub radius: f64,
    pub label: ClassLabel,
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GranularBall {
    /// Creation order; unique within a generation run.
    pub id: usize,
    /// Dataset rows covered, ascending.
    pub members: Vec<usize>,
    pub center: Instance,
    pub radius: f64,
    pub label: ClassLabel,
    pub quality: f64,
}

impl GranularBall {
    pub fn new(id: usize, mut members: Vec<usize>, d: &Dataset) -> Result<Self> {
        members.sort_unstable();
        let s = ball_stats(&members, d)?;
        Ok(GranularBall {
            id,
            members,
            center: s.center,
            radius: s.radius,
            label: s.label,
            quality: s.quality,
        })
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Summary line for dumps.
#[derive(Debug, Clone, Serialize)]
pub struct BallSummary<'a> {
    pub id: usize,
    pub size: usize,
    pub label: ClassLabel,
    pub radius: f64,
    pub quality: f64,
    pub members: &'a [usize],
}

impl<'a> From<&'a GranularBall> for BallSummary<'a> {
    fn from(b: &'a GranularBall) -> Self {
        BallSummary {
            id: b.id,
            size: b.size(),
            label: b.label,
            radius: b.radius,
            quality: b.quality,
            members: &b.members,
        }
    }
}

/// Balls partitioning every row of one dataset, in creation order.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSet {
    pub balls: Vec<GranularBall>,
    /// Number of splits performed while generating.
    pub splits: usize,
}

impl BallSet {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn min_quality(&self) -> f64 {
        self.balls.iter().map(|b| b.quality).fold(f64::INFINITY, f64::min)
    }

    /// True when every row `0..n_rows` is covered by exactly one ball.
    pub fn is_partition_of(&self, n_rows: usize) -> bool {
        let mut seen = vec![false; n_rows];
        for b in &self.balls {
            for &m in &b.members {
                if m >= n_rows || seen[m] {
                    return false;
                }
                seen[m] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Center (mean), radius (mean distance to center), majority label and
/// quality of a set of rows. Equal class counts label the ball minority.
pub fn ball_stats(members: &[usize], d: &Dataset) -> Result<BallStats> {
    let center = mean_vector(members.iter().map(|&m| d.instance(m).as_slice()))
        .ok_or_else(|| Error::Contract("granular ball without members".into()))?;
    let n = members.len() as f64;
    let radius = members
        .iter()
        .map(|&m| euclidean(d.instance(m), &center))
        .sum::<f64>()
        / n;
    let n_min = members
        .iter()
        .filter(|&&m| d.label(m) == ClassLabel::Minority)
        .count();
    let n_maj = members.len() - n_min;
    let label = if n_maj > n_min {
        ClassLabel::Majority
    } else {
        ClassLabel::Minority
    };
    Ok(BallStats {
        center,
        radius,
        label,
        quality: n_maj.max(n_min) as f64 / n,
    })
}

/// Splits an impure ball in two. The first child is seeded by the old
/// center, the second by a random member whose class differs from the ball's
/// label. Children get ids `first_child_id` and `first_child_id + 1`.
pub fn split_ball<R: Rng + ?Sized>(
    ball: &GranularBall,
    d: &Dataset,
    threshold: f64,
    first_child_id: usize,
    rng: &mut R,
) -> Result<(GranularBall, GranularBall)> {
    if ball.quality >= threshold {
        return Err(Error::Contract(format!(
            "ball {} has quality {} >= threshold {threshold}",
            ball.id, ball.quality
        )));
    }
    let others: Vec<usize> = ball
        .members
        .iter()
        .copied()
        .filter(|&m| d.label(m) != ball.label)
        .collect();
    if others.is_empty() {
        return Err(Error::Contract(format!("ball {} has no member to seed a split", ball.id)));
    }
    let seed = others[rng.gen_range(0..others.len())];
    let seed_point = d.instance(seed);

    let (mut near_seed, mut near_center): (Vec<usize>, Vec<usize>) =
        ball.members.iter().copied().partition(|&m| {
            let x = d.instance(m);
            euclidean(x, seed_point) < euclidean(x, &ball.center)
        });
    // Coincident points can leave one side empty; keep both nonempty so
    // every split makes progress.
    if near_seed.is_empty() {
        near_center.retain(|&m| m != seed);
        near_seed.push(seed);
    } else if near_center.is_empty() {
        let closest = near_seed
            .iter()
            .copied()
            .filter(|&m| m != seed)
            .min_by(|&i, &j| {
                euclidean(d.instance(i), &ball.center)
                    .total_cmp(&euclidean(d.instance(j), &ball.center))
                    .then(i.cmp(&j))
            })
            .expect("impure ball has at least two members");
        near_seed.retain(|&m| m != closest);
        near_center.push(closest);
    }
    Ok((
        GranularBall::new(first_child_id, near_center, d)?,
        GranularBall::new(first_child_id + 1, near_seed, d)?,
    ))
}

/// Covers the dataset with balls whose quality is at least `threshold`.
pub fn generate_balls<R: Rng + ?Sized>(d: &Dataset, threshold: f64, rng: &mut R) -> Result<BallSet> {
    if !(threshold > 0.5 && threshold <= 1.0) {
        return Err(Error::Validation(format!(
            "quality threshold must lie in (0.5, 1], got {threshold}"
        )));
    }
    let mut next_id = 1;
    let mut splits = 0;
    let mut queue = VecDeque::from([GranularBall::new(0, (0..d.len()).collect(), d)?]);
    let mut done = Vec::new();
    while let Some(ball) = queue.pop_front() {
        if ball.quality >= threshold {
            done.push(ball);
            continue;
        }
        let (a, b) = split_ball(&ball, d, threshold, next_id, rng)?;
        next_id += 2;
        splits += 1;
        queue.push_back(a);
        queue.push_back(b);
    }
    done.sort_by_key(|b| b.id);
    Ok(BallSet { balls: done, splits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ClassLabel::{Majority as J, Minority as N};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ds(rows: &[&[f64]], labels: &[ClassLabel]) -> Dataset {
        Dataset::from_rows(rows.iter().map(|r| r.to_vec()).collect(), labels.to_vec()).unwrap()
    }

    #[test]
    fn stats_examples() {
        let d = ds(&[&[0.0], &[2.0], &[9.0]], &[J, J, N]);
        let s = ball_stats(&[0, 1], &d).unwrap();
        assert_eq!(s.center.as_slice(), &[1.0]);
        assert_eq!(s.radius, 1.0);
        assert_eq!(s.quality, 1.0);

        let d = ds(&[&[0.0], &[1.0], &[2.0], &[3.0], &[4.0]], &[J, J, J, J, N]);
        let s = ball_stats(&[0, 1, 2, 3, 4], &d).unwrap();
        assert_eq!(s.quality, 0.8);
        assert_eq!(s.label, J);

        let s = ball_stats(&[4], &d).unwrap();
        assert_eq!((s.radius, s.quality, s.label), (0.0, 1.0, N));

        let s = ball_stats(&[3, 4], &d).unwrap();
        assert_eq!(s.label, N, "ties go to minority");
        assert!(ball_stats(&[], &d).is_err());
    }

    #[test]
    fn two_member_split_gives_singletons() {
        let d = ds(&[&[0.0, 0.0], &[1.0, 1.0]], &[J, N]);
        let ball = GranularBall::new(0, vec![0, 1], &d).unwrap();
        let (a, b) = split_ball(&ball, &d, 1.0, 1, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(a.size() + b.size(), 2);
        assert_eq!(a.size(), 1);
        assert_eq!((a.id, b.id), (1, 2));
    }

    #[test]
    fn split_of_pure_ball_is_contract_violation() {
        let d = ds(&[&[0.0], &[1.0], &[5.0]], &[J, J, N]);
        let ball = GranularBall::new(0, vec![0, 1], &d).unwrap();
        assert!(matches!(
            split_ball(&ball, &d, 1.0, 1, &mut ChaCha8Rng::seed_from_u64(0)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn coincident_points_still_split() {
        let d = ds(&[&[1.0], &[1.0], &[1.0]], &[J, N, J]);
        let set = generate_balls(&d, 1.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(set.is_partition_of(3));
        assert_eq!(set.min_quality(), 1.0);
    }

    #[test]
    fn single_class_is_one_ball() {
        let d = ds(&[&[0.0], &[1.0], &[7.0]], &[J, J, J]);
        let set = generate_balls(&d, 1.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.splits, 0);
    }

    #[test]
    fn xor_pattern() {
        let rows: Vec<&[f64]> = vec![
            &[0.0, 0.0],
            &[0.1, 0.1],
            &[1.0, 1.0],
            &[0.9, 0.9],
            &[0.0, 1.0],
            &[0.1, 0.9],
            &[1.0, 0.0],
            &[0.9, 0.1],
        ];
        let d = ds(&rows, &[J, J, J, J, N, N, N, N]);
        for seed in 0..20 {
            let set = generate_balls(&d, 1.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert!(set.is_partition_of(8));
            assert!(set.balls.iter().all(|b| b.quality == 1.0));
            // The 4/4 root is labeled minority, so splits are seeded by majority
            // points: each majority corner is peeled off on its own while the
            // two minority corners, both nearer the shifting center, stay
            // together.
            let per_label = |l| set.balls.iter().filter(|b| b.label == l).count();
            assert_eq!((per_label(J), per_label(N)), (2, 1), "seed {seed}");
            assert_eq!(set.splits, 2);
        }
    }

    #[test]
    fn threshold_range_checked() {
        let d = ds(&[&[0.0], &[1.0]], &[J, N]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(generate_balls(&d, 0.5, &mut rng).is_err());
        assert!(generate_balls(&d, 1.1, &mut rng).is_err());
    }
}
