use evosampling::data::{parse_csv, parse_keel, stratified_split, write_csv, MinMaxScaler};
use evosampling::{ClassLabel, Dataset, Error};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..6, 2usize..40).prop_flat_map(|(dim, n)| {
        (
            prop::collection::vec(prop::collection::vec(-1e6..1e6f64, dim), n),
            1usize..n,
        )
            .prop_map(|(rows, n_min)| {
                let n = rows.len();
                // the rarer class must be the minority for roles to survive re-reading
                let n_min = n_min.min(n - n_min).max(1);
                let labels = (0..n)
                    .map(|i| if i < n_min { ClassLabel::Minority } else { ClassLabel::Majority })
                    .collect();
                Dataset::from_rows(rows, labels).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn csv_round_trip(d in dataset()) {
        prop_assume!(d.count(ClassLabel::Minority) < d.count(ClassLabel::Majority));
        let text = write_csv(&d).unwrap();
        let back = parse_csv(&text, "class").unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn split_is_stratified_partition(d in dataset(), seed: u64) {
        let (maj, min) = d.class_counts();
        prop_assume!(maj >= 2 && min >= 2);
        match stratified_split(&d, 0.7, &mut ChaCha8Rng::seed_from_u64(seed)) {
            Ok((train, test)) => {
                prop_assert_eq!(train.len() + test.len(), d.len());
                prop_assert_eq!(train.count(ClassLabel::Minority), (0.7 * min as f64).round() as usize);
                prop_assert_eq!(train.count(ClassLabel::Majority), (0.7 * maj as f64).round() as usize);
            }
            Err(e) => prop_assert!(matches!(e, Error::Validation(_))),
        }
    }

    #[test]
    fn scaling_lands_in_unit_box(d in dataset()) {
        let s = MinMaxScaler::fit(&d).transform(&d).unwrap();
        for x in s.instances() {
            prop_assert!(x.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}

const KEEL: &str = "\
@relation toy
@attribute a real [0.0, 10.0]
@attribute b integer [0, 5]
@attribute Class {positive, negative}
@inputs a, b
@outputs Class
@data
1.0, 2, negative
2.5, 3, negative
3.0, 1, negative
9.0, 5, positive
";

#[test]
fn keel_file_parses_with_roles() {
    let d = parse_keel(KEEL).unwrap();
    assert_eq!(d.len(), 4);
    assert_eq!(d.n_features(), 2);
    assert_eq!(d.class_counts(), (3, 1));
    assert_eq!(d.schema().class_name(ClassLabel::Minority), "positive");
    assert_eq!(d.instance(3).as_slice(), &[9.0, 5.0]);
}

#[test]
fn keel_missing_value_names_the_row() {
    let text = KEEL.replace("2.5, 3", "?, 3");
    let err = parse_keel(&text).unwrap_err();
    assert!(matches!(err, Error::Parse { .. }));
    assert!(err.to_string().contains('2'), "{err}");
}

#[test]
fn csv_errors() {
    assert!(parse_csv("a,b,class\n1,2,x\n3,y\n", "class").is_err());
    assert!(parse_csv("a,b,class\n1,zz,x\n3,4,y\n", "class").is_err());
    assert!(parse_csv("a,b,class\n1,2,x\n3,4,x\n", "class").is_err());
    assert!(parse_csv("a,b,class\n1,2,x\n", "nope").is_err());
}
