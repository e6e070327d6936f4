//! Scores candidate points between a minority and a majority target and
//! prints a coarse map of feasibility and angle.
//!
//! `cargo run --example fitness_landscape`

use evosampling::fitness::{compare, evaluate_fitness, feasibility_threshold};

fn main() -> evosampling::Result<()> {
    let min_t = [0.0, 0.0];
    let maj_t = [4.0, 0.0];
    println!("feasibility threshold on D: {:.7}", feasibility_threshold());

    // rows are y from 2 down to -2, columns x from -1 to 5
    for yi in (-4..=4).rev() {
        let y = yi as f64 * 0.5;
        let row: String = (-2..=10)
            .map(|xi| {
                let f = evaluate_fitness(&[xi as f64 * 0.5, y], &maj_t, &min_t).unwrap();
                match (f.feasible, f.theta_degrees) {
                    (false, _) => '.',
                    (true, t) if t >= 120.0 => '#',
                    (true, t) if t >= 60.0 => '+',
                    (true, _) => '-',
                }
            })
            .collect();
        println!("{y:>5.1} {row}");
    }
    println!("'.' infeasible, '-' angle < 60, '+' < 120, '#' >= 120");

    let near = evaluate_fitness(&[0.2, 1.5], &maj_t, &min_t)?;
    let between = evaluate_fitness(&[0.8, 0.1], &maj_t, &min_t)?;
    println!("near: {near:?}\nbetween: {between:?}");
    println!("between ranks {:?} near", compare(&between, &near));
    Ok(())
}
