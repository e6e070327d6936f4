//! Reads a small KEEL file, converts it to CSV and makes a stratified split.
//!
//! `cargo run --example parse_and_split`

use evosampling::data::{parse_csv, parse_keel, stratified_split, write_csv};
use evosampling::{stream_rng, streams, ClassLabel};

const GLASS_LIKE: &str = "\
@relation glass-toy
@attribute RI real [1.51, 1.54]
@attribute Na real [10.7, 17.4]
@attribute Mg real [0.0, 4.5]
@attribute Type {positive, negative}
@inputs RI, Na, Mg
@outputs Type
@data
1.521, 13.64, 4.49, negative
1.517, 13.89, 3.60, negative
1.516, 13.53, 3.55, negative
1.517, 13.21, 3.69, negative
1.517, 13.27, 3.62, negative
1.516, 12.79, 3.61, negative
1.517, 13.30, 3.60, negative
1.518, 13.15, 3.61, negative
1.514, 14.38, 0.00, positive
1.519, 14.14, 0.00, positive
1.516, 13.42, 0.00, positive
";

fn main() -> evosampling::Result<()> {
    let d = parse_keel(GLASS_LIKE)?;
    let (maj, min) = d.class_counts();
    println!("{} rows, {} features, {maj} majority / {min} minority (IR {:.2})",
        d.len(), d.n_features(), d.imbalance_ratio());
    println!("minority class is '{}'", d.schema().class_name(ClassLabel::Minority));

    let csv = write_csv(&d)?;
    print!("{csv}");
    assert_eq!(parse_csv(&csv, "Type")?, d);

    let (train, test) = stratified_split(&d, 0.7, &mut stream_rng(1, streams::SPLIT))?;
    println!("train {:?}, test {:?}", train.class_counts(), test.class_counts());
    Ok(())
}
