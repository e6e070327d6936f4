//! SMOTE: interpolation between a minority row and one of its nearest
//! minority neighbours.

use rand::distributions::Open01;
use rand::Rng;

use crate::data::{squared_euclidean, ClassLabel, Dataset, Instance};
use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 5;

/// A generated point and the minority rows it was drawn between.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoteSample {
    pub point: Instance,
    /// Dataset rows of the base and neighbour instances.
    pub base: usize,
    pub neighbor: usize,
}

/// `xi + (xj - xi) * u`, kept inside the bounding box of the pair so that
/// rounding cannot push a component past either endpoint.
pub fn interpolate(xi: &[f64], xj: &[f64], u: f64) -> Instance {
    xi.iter()
        .zip(xj)
        .map(|(&a, &b)| (a + (b - a) * u).clamp(a.min(b), a.max(b)))
        .collect::<Vec<_>>()
        .into()
}

/// Positions (into `points`) of the `k` nearest points to `points[i]`,
/// excluding `i` itself. Ties go to the lower position.
pub fn nearest_neighbors(points: &[&Instance], i: usize, k: usize) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, p)| (squared_euclidean(points[i], p), j))
        .collect();
    d.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    d.into_iter().take(k).map(|(_, j)| j).collect()
}

/// Generates `n` minority points without attaching them to the dataset.
pub fn smote_samples<R: Rng + ?Sized>(
    train: &Dataset,
    k: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<SmoteSample>> {
    let min_rows: Vec<usize> = (0..train.len())
        .filter(|&r| train.label(r) == ClassLabel::Minority)
        .collect();
    if min_rows.len() < 2 {
        return Err(Error::Validation(format!(
            "SMOTE needs at least 2 minority rows, found {}",
            min_rows.len()
        )));
    }
    if k == 0 || k > min_rows.len() - 1 {
        return Err(Error::Validation(format!(
            "SMOTE k must lie in 1..={}, got {k}",
            min_rows.len() - 1
        )));
    }
    let points: Vec<&Instance> = min_rows.iter().map(|&r| train.instance(r)).collect();
    let neighbors: Vec<Vec<usize>> = (0..points.len())
        .map(|i| nearest_neighbors(&points, i, k))
        .collect();

    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let i = rng.gen_range(0..points.len());
        let j = neighbors[i][rng.gen_range(0..k)];
        let u: f64 = rng.sample(Open01);
        out.push(SmoteSample {
            point: interpolate(points[i], points[j], u),
            base: min_rows[i],
            neighbor: min_rows[j],
        });
    }
    Ok(out)
}

/// `train` plus `n` SMOTE minority rows.
pub fn smote<R: Rng + ?Sized>(train: &Dataset, k: usize, n: usize, rng: &mut R) -> Result<Dataset> {
    let samples = smote_samples(train, k, n, rng)?;
    train.with_appended(
        samples.into_iter().map(|s| s.point).collect(),
        ClassLabel::Minority,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ClassLabel::{Majority as J, Minority as N};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> Dataset {
        Dataset::from_rows(
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![5.0, 5.0],
                vec![6.0, 5.0],
                vec![5.0, 6.0],
                vec![6.0, 6.0],
                vec![7.0, 7.0],
            ],
            vec![N, N, N, J, J, J, J, J],
        )
        .unwrap()
    }

    #[test]
    fn endpoints() {
        assert_eq!(interpolate(&[1.0, 2.0], &[3.0, -2.0], 0.0).as_slice(), &[1.0, 2.0]);
        assert_eq!(interpolate(&[1.0, 2.0], &[3.0, -2.0], 1.0).as_slice(), &[3.0, -2.0]);
        assert_eq!(interpolate(&[1.0, 2.0], &[3.0, -2.0], 0.5).as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn balances_when_asked() {
        let d = toy();
        let (maj, min) = d.class_counts();
        let out = smote(&d, 2, maj - min, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(out.count(J), out.count(N));
        assert_eq!(&out.instances()[..d.len()], d.instances());
    }

    #[test]
    fn preconditions() {
        let d = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(smote(&d, 3, 1, &mut rng).is_err());
        assert!(smote(&d, 0, 1, &mut rng).is_err());
        let lone = Dataset::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]], vec![J, J, N]).unwrap();
        assert!(smote(&lone, 1, 1, &mut rng).is_err());
    }

    #[test]
    fn neighbours_come_from_knn() {
        let d = toy();
        let samples = smote_samples(&d, 1, 200, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        for s in samples {
            // with k=1: row 0's nearest is row 1 (tie with 2, lower wins); rows 1 and 2 pick row 0
            let expected = if s.base == 0 { 1 } else { 0 };
            assert_eq!(s.neighbor, expected);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let d = toy();
        let a = smote(&d, 2, 10, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = smote(&d, 2, 10, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
