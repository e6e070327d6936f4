//! Ball-level noise removal followed by class rebalancing.
//!
//! Phase 1 works on the untouched ball set: each ball looks at its `k`
//! nearest balls (center distance minus both radii) and loses
//! `s = floor(sum of sizes of differently-labeled neighbours / k)` random
//! members, capped at its size. Phase 2 removes the smallest surviving balls
//! of the larger class until both classes have the same size; when the next
//! ball is larger than the remaining gap only the gap is removed from it.

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::data::{euclidean, ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::granular_ball::{BallSet, GranularBall};

/// Center distance minus both radii. Negative for overlapping balls.
pub fn ball_distance(b1: &GranularBall, b2: &GranularBall) -> f64 {
    euclidean(&b1.center, &b2.center) - b1.radius - b2.radius
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbors {
    /// Positions in the ball set, nearest first.
    pub positions: Vec<usize>,
    /// How many of the requested `k` could not be found.
    pub shortfall: usize,
}

/// The `k` balls nearest to `balls[target]`, ties by creation order.
pub fn nearest_balls(target: usize, balls: &[GranularBall], k: usize) -> Neighbors {
    let t = &balls[target];
    let mut others: Vec<(f64, usize, usize)> = balls
        .iter()
        .enumerate()
        .filter(|(p, _)| *p != target)
        .map(|(p, b)| (ball_distance(t, b), b.id, p))
        .collect();
    others.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let found = others.len().min(k);
    Neighbors {
        positions: others[..found].iter().map(|o| o.2).collect(),
        shortfall: k - found,
    }
}

/// `floor(sum over differently-labeled neighbours of their size / k)`,
/// clamped to the target's size, with `k` the number of neighbours given.
pub fn removal_count(target: &GranularBall, neighbors: &[&GranularBall]) -> usize {
    if neighbors.is_empty() {
        return 0;
    }
    let differing: usize = neighbors
        .iter()
        .filter(|b| b.label != target.label)
        .map(|b| b.size())
        .sum();
    (differing / neighbors.len()).min(target.size())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Cleaning,
    Rebalancing,
}

/// One line of the removal report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalEvent {
    pub ball_id: usize,
    pub phase: Phase,
    /// Planned removal count (phase 1) or rows removed (phase 2).
    pub s: usize,
    pub neighbor_labels: Vec<ClassLabel>,
    /// Phase 2 only: the ball was larger than the remaining gap.
    pub partial: bool,
}

#[derive(Debug, Clone)]
pub struct UndersampleOutcome {
    pub dataset: Dataset,
    /// Rows of the input kept, ascending.
    pub kept_rows: Vec<usize>,
    pub events: Vec<RemovalEvent>,
}

/// Removes noisy rows ball by ball, then rebalances.
///
/// `balls` must partition `data`. Fails when a class disappears entirely.
pub fn undersample<R: Rng + ?Sized>(
    balls: &BallSet,
    data: &Dataset,
    k: usize,
    rng: &mut R,
) -> Result<UndersampleOutcome> {
    if !balls.is_partition_of(data.len()) {
        return Err(Error::Contract("ball set does not partition the dataset".into()));
    }
    let set = &balls.balls;
    let mut events = Vec::new();

    // Plan on the pristine set before touching anything.
    let plan: Vec<(usize, Vec<ClassLabel>)> = set
        .iter()
        .enumerate()
        .map(|(p, ball)| {
            let nb = nearest_balls(p, set, k);
            if nb.shortfall > 0 {
                log::debug!("ball {}: only {} neighbours available", ball.id, nb.positions.len());
            }
            let refs: Vec<&GranularBall> = nb.positions.iter().map(|&q| &set[q]).collect();
            (removal_count(ball, &refs), refs.iter().map(|b| b.label).collect())
        })
        .collect();

    let mut survivors: Vec<Vec<usize>> = Vec::with_capacity(set.len());
    for (ball, (s, neighbor_labels)) in set.iter().zip(plan) {
        let mut members = ball.members.clone();
        if s > 0 {
            let mut drop: Vec<usize> = sample(rng, members.len(), s).into_vec();
            drop.sort_unstable_by(|a, b| b.cmp(a));
            for i in drop {
                members.remove(i);
            }
        }
        events.push(RemovalEvent {
            ball_id: ball.id,
            phase: Phase::Cleaning,
            s,
            neighbor_labels,
            partial: false,
        });
        survivors.push(members);
    }

    let count = |survivors: &[Vec<usize>], label: ClassLabel| -> usize {
        survivors
            .iter()
            .flatten()
            .filter(|&&r| data.label(r) == label)
            .count()
    };
    let eliminated = |survivors: &[Vec<usize>]| {
        [ClassLabel::Majority, ClassLabel::Minority]
            .into_iter()
            .find(|&l| count(survivors, l) == 0)
    };
    if let Some(l) = eliminated(&survivors) {
        return Err(Error::Rebalance(format!("{l} class eliminated by noise removal")));
    }

    loop {
        let n_maj = count(&survivors, ClassLabel::Majority);
        let n_min = count(&survivors, ClassLabel::Minority);
        if n_maj == n_min {
            break;
        }
        let larger = if n_maj > n_min {
            ClassLabel::Majority
        } else {
            ClassLabel::Minority
        };
        let gap = n_maj.abs_diff(n_min);
        let larger_rows = |members: &[usize]| members.iter().filter(|&&r| data.label(r) == larger).count();

        // Smallest surviving ball labeled with the larger class; balls of the
        // other label are only touched if none is left (impure thresholds).
        let pick = |own_label_only: bool| {
            (0..set.len())
                .filter(|&p| larger_rows(&survivors[p]) > 0)
                .filter(|&p| !own_label_only || set[p].label == larger)
                .min_by_key(|&p| (survivors[p].len(), set[p].id))
        };
        let p = pick(true)
            .or_else(|| pick(false))
            .expect("the larger class has surviving rows");
        let members = &mut survivors[p];
        let removable = larger_rows(members);
        let partial = members.len() > gap || removable > gap;
        let removed = if partial {
            let candidates: Vec<usize> = (0..members.len())
                .filter(|&i| data.label(members[i]) == larger)
                .collect();
            let n = gap.min(candidates.len());
            let mut drop: Vec<usize> = sample(rng, candidates.len(), n)
                .into_iter()
                .map(|c| candidates[c])
                .collect();
            drop.sort_unstable_by(|a, b| b.cmp(a));
            for i in drop {
                members.remove(i);
            }
            log::info!("rebalancing: removed {n} of {} rows from ball {}", n + members.len(), set[p].id);
            n
        } else {
            let n = members.len();
            members.clear();
            n
        };
        events.push(RemovalEvent {
            ball_id: set[p].id,
            phase: Phase::Rebalancing,
            s: removed,
            neighbor_labels: Vec::new(),
            partial,
        });
        if let Some(l) = eliminated(&survivors) {
            return Err(Error::Rebalance(format!("{l} class eliminated while rebalancing")));
        }
    }

    let mut kept_rows: Vec<usize> = survivors.into_iter().flatten().collect();
    kept_rows.sort_unstable();
    Ok(UndersampleOutcome {
        dataset: data.subset(&kept_rows),
        kept_rows,
        events,
    })
}
