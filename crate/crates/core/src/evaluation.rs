//! k-nearest-neighbour scoring with AUC and G-mean, minority as positive.

use serde::Serialize;

use crate::data::{squared_euclidean, ClassLabel, Dataset};
use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredPrediction {
    /// Share of minority rows among the neighbours.
    pub score: f64,
    pub predicted: ClassLabel,
    pub true_label: ClassLabel,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn from_predictions(preds: &[ScoredPrediction]) -> Self {
        let mut c = ConfusionCounts::default();
        for p in preds {
            match (p.true_label, p.predicted) {
                (ClassLabel::Minority, ClassLabel::Minority) => c.true_pos += 1,
                (ClassLabel::Minority, ClassLabel::Majority) => c.false_neg += 1,
                (ClassLabel::Majority, ClassLabel::Minority) => c.false_pos += 1,
                (ClassLabel::Majority, ClassLabel::Majority) => c.true_neg += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    pub fn sensitivity(&self) -> f64 {
        rate(self.true_pos, self.true_pos + self.false_neg)
    }

    pub fn specificity(&self) -> f64 {
        rate(self.true_neg, self.true_neg + self.false_pos)
    }
}

fn rate(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

/// Scores every test row by the minority share of its `k` nearest training
/// rows (ties by row index). Predicts minority only above one half.
pub fn knn_classify(train: &Dataset, test: &Dataset, k: usize) -> Result<Vec<ScoredPrediction>> {
    if train.is_empty() {
        return Err(Error::Validation("kNN training set is empty".into()));
    }
    if train.n_features() != test.n_features() {
        return Err(Error::Dimension {
            expected: train.n_features(),
            found: test.n_features(),
        });
    }
    if k == 0 || k > train.len() {
        return Err(Error::Validation(format!(
            "kNN k must lie in 1..={}, got {k}",
            train.len()
        )));
    }
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(train.len());
    Ok(test
        .rows()
        .map(|(x, true_label)| {
            dist.clear();
            dist.extend(
                train
                    .instances()
                    .iter()
                    .enumerate()
                    .map(|(r, t)| (squared_euclidean(x, t), r)),
            );
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < dist.len() {
                dist.select_nth_unstable_by(k - 1, cmp);
            }
            let minority = dist[..k]
                .iter()
                .filter(|&&(_, r)| train.label(r) == ClassLabel::Minority)
                .count();
            let score = minority as f64 / k as f64;
            ScoredPrediction {
                score,
                predicted: if score > 0.5 {
                    ClassLabel::Minority
                } else {
                    ClassLabel::Majority
                },
                true_label,
            }
        })
        .collect())
}

/// `sqrt(sensitivity * specificity)`; an undefined rate counts as 0.
pub fn g_mean(c: &ConfusionCounts) -> f64 {
    (c.sensitivity() * c.specificity()).sqrt()
}

/// Mann-Whitney AUC: the chance a random minority row outscores a random
/// majority row, ties counting one half.
pub fn auc(preds: &[ScoredPrediction]) -> Result<f64> {
    let n_pos = preds
        .iter()
        .filter(|p| p.true_label == ClassLabel::Minority)
        .count();
    let n_neg = preds.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Validation("AUC needs both classes in the test set".into()));
    }
    let mut sorted: Vec<&ScoredPrediction> = preds.iter().collect();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));

    // Walk groups of equal scores, crediting each positive with the
    // negatives strictly below it plus half of the tied ones.
    let mut wins = 0.0;
    let mut neg_below = 0usize;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j].score == sorted[i].score {
            j += 1;
        }
        let group = &sorted[i..j];
        let pos = group
            .iter()
            .filter(|p| p.true_label == ClassLabel::Minority)
            .count();
        let neg = group.len() - pos;
        wins += pos as f64 * (neg_below as f64 + 0.5 * neg as f64);
        neg_below += neg;
        i = j;
    }
    Ok(wins / (n_pos as f64 * n_neg as f64))
}

/// AUC and G-mean of one evaluation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub auc: f64,
    pub g_mean: f64,
    pub confusion: ConfusionCounts,
}

pub fn metrics(preds: &[ScoredPrediction]) -> Result<Metrics> {
    let confusion = ConfusionCounts::from_predictions(preds);
    Ok(Metrics {
        auc: auc(preds)?,
        g_mean: g_mean(&confusion),
        confusion,
    })
}
