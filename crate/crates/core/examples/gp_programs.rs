//! Builds, evaluates and varies expression trees over a minority pool.
//!
//! `cargo run --example gp_programs`

use evosampling::gp::{crossover_standard, crossover_transfer, init_ramped_half_and_half, mutate, Program};
use evosampling::Instance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> evosampling::Result<()> {
    let pool: Vec<Instance> = vec![
        vec![1.0, 0.0].into(),
        vec![0.0, 1.0].into(),
        vec![2.0, 2.0].into(),
        vec![1.0, 1.0].into(),
    ];

    let p: Program = "(mul (add min:0 min:1) (sub min:2 min:3))".parse()?;
    println!("{p} -> {:?}", p.evaluate(&pool)?.as_slice());

    let guarded: Program = "(div min:2 (sub min:0 min:3))".parse()?;
    println!("{guarded} -> {:?}  (zero denominators give 1)", guarded.evaluate(&pool)?.as_slice());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pop = init_ramped_half_and_half(6, 5, pool.len(), &mut rng)?;
    for (i, prog) in pop.programs.iter().enumerate() {
        println!("init {i}: depth {} size {:>2}  {prog}", prog.depth(), prog.size());
    }

    let (a, b) = crossover_standard(&pop.programs[0], &pop.programs[1], 10, &mut rng);
    println!("crossover:  {a}\n            {b}");
    println!("transfer:   {}", crossover_transfer(&pop.programs[2], &pop.programs[3], 10, &mut rng));
    println!("mutation:   {}", mutate(&pop.programs[4], 10, pool.len(), &mut rng));
    Ok(())
}
