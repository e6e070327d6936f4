//! Multi-task GP oversampling with knowledge transfer.
//!
//! To balance a training set, `n = |Maj| - |Min|` tasks are created, each
//! asking for one synthetic minority instance close to a target minority
//! instance and away from a target majority instance. Tasks sharing a
//! minority target form a group; within a group each task picks the task with
//! the nearest majority target as its auxiliary. Every
//! [`RunConfig::auxiliary_update_period`] generations the auxiliaries are
//! recomputed from the distances between the tasks' current best phenotypes.
//!
//! All populations advance in lockstep. At the start of each generation the
//! top [`RunConfig::elite_fraction_for_transfer`] of every population is
//! snapshotted; transfer crossover only reads those snapshots, so the result
//! does not depend on task scheduling. Each task owns the random stream
//! `stream_rng(master_seed, task_id)`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{class_partition, euclidean, mean_vector, Dataset, Instance};
use crate::error::{Error, Result};
use crate::fitness::{best_index, compare, evaluate_fitness, tournament_select, FitnessValue};
use crate::gp::{
    crossover_standard, crossover_transfer, init_ramped_half_and_half, mutate, Population,
    Program,
};
use crate::stream_rng;

/// Hyperparameters of one resampling run. Defaults follow the reference
/// settings: 30 programs per task, 50 generations, tournaments of 3,
/// operator rates 0.5/0.3/0.2, depth 10, quality threshold 1.0, 3 ball
/// neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub population_size_per_task: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub rate_standard_crossover: f64,
    pub rate_transfer_crossover: f64,
    pub rate_mutation: f64,
    pub max_depth: usize,
    pub elite_fraction_for_transfer: f64,
    pub auxiliary_update_period: usize,
    pub gb_quality_threshold: f64,
    pub gb_neighbors: usize,
    pub master_seed: u64,
    /// When false, transfer-crossover events become standard crossover and
    /// no auxiliaries are tracked.
    pub transfer_enabled: bool,
    /// Worker threads for task evolution; 0 uses all cores. Never affects
    /// results.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            population_size_per_task: 30,
            generations: 50,
            tournament_size: 3,
            rate_standard_crossover: 0.5,
            rate_transfer_crossover: 0.3,
            rate_mutation: 0.2,
            max_depth: 10,
            elite_fraction_for_transfer: 0.3,
            auxiliary_update_period: 10,
            gb_quality_threshold: 1.0,
            gb_neighbors: 3,
            master_seed: 42,
            transfer_enabled: true,
            workers: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        let rates = [
            self.rate_standard_crossover,
            self.rate_transfer_crossover,
            self.rate_mutation,
        ];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return fail(format!("operator rates must lie in [0, 1], got {rates:?}"));
        }
        if (rates.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return fail(format!("operator rates must sum to 1, got {rates:?}"));
        }
        if self.population_size_per_task < 2 {
            return fail("population_size_per_task must be at least 2".into());
        }
        if self.generations == 0 || self.auxiliary_update_period == 0 || self.gb_neighbors == 0 {
            return fail("generations, auxiliary_update_period and gb_neighbors must be positive".into());
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size_per_task {
            return fail(format!(
                "tournament_size must lie in [1, {}]",
                self.population_size_per_task
            ));
        }
        if self.max_depth < 2 {
            return fail("max_depth must be at least 2".into());
        }
        if !(self.elite_fraction_for_transfer > 0.0 && self.elite_fraction_for_transfer <= 1.0) {
            return fail("elite_fraction_for_transfer must lie in (0, 1]".into());
        }
        if !(self.gb_quality_threshold > 0.5 && self.gb_quality_threshold <= 1.0) {
            return fail("gb_quality_threshold must lie in (0.5, 1]".into());
        }
        Ok(())
    }

    fn elite_count(&self) -> usize {
        ((self.elite_fraction_for_transfer * self.population_size_per_task as f64).ceil() as usize)
            .clamp(1, self.population_size_per_task)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: usize,
    /// Row of the majority target in the training set.
    pub maj_row: usize,
    pub maj_target: Instance,
    /// Row of the minority target; tasks sharing it form a group.
    pub min_target_key: usize,
    pub min_target: Instance,
    pub auxiliary_id: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskGroup {
    pub min_target_key: usize,
    pub member_task_ids: Vec<usize>,
}

pub fn class_center(instances: &[Instance]) -> Result<Instance> {
    mean_vector(instances.iter().map(|x| x.as_slice()))
        .ok_or_else(|| Error::Contract("class center of an empty set".into()))
}

/// Rows sorted by distance to `center`, ties by row index.
fn rank_by_distance(d: &Dataset, rows: &[usize], center: &[f64]) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = rows
        .iter()
        .map(|&r| (euclidean(d.instance(r), center), r))
        .collect();
    keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    keyed.into_iter().map(|(_, r)| r).collect()
}

/// Builds `n = |Maj| - |Min|` tasks.
///
/// Majority targets are the `n` majority rows nearest the majority center.
/// Minority targets are the minority rows ranked by distance to the minority
/// center, paired rank by rank; when `|Min| < n` the ranked list is reused
/// cyclically. A dataset that is already balanced yields no tasks.
pub fn assign_tasks(train: &Dataset) -> Result<Vec<Task>> {
    train.require_both_classes()?;
    let (maj, min) = class_partition(train);
    if maj.len() <= min.len() {
        return Ok(Vec::new());
    }
    let n = maj.len() - min.len();
    let center = |rows: &[usize]| mean_vector(rows.iter().map(|&r| train.instance(r).as_slice()));
    let maj_center = center(&maj).expect("majority rows present");
    let min_center = center(&min).expect("minority rows present");
    let maj_ranked = rank_by_distance(train, &maj, &maj_center);
    let min_ranked = rank_by_distance(train, &min, &min_center);
    Ok((0..n)
        .map(|i| {
            let maj_row = maj_ranked[i];
            let min_row = min_ranked[i % min_ranked.len()];
            Task {
                id: i,
                maj_row,
                maj_target: train.instance(maj_row).clone(),
                min_target_key: min_row,
                min_target: train.instance(min_row).clone(),
                auxiliary_id: None,
            }
        })
        .collect())
}

/// Partitions tasks by minority target, groups ordered by first appearance.
pub fn group_tasks(tasks: &[Task]) -> Vec<TaskGroup> {
    let mut groups: Vec<TaskGroup> = Vec::new();
    for t in tasks {
        match groups.iter_mut().find(|g| g.min_target_key == t.min_target_key) {
            Some(g) => g.member_task_ids.push(t.id),
            None => groups.push(TaskGroup {
                min_target_key: t.min_target_key,
                member_task_ids: vec![t.id],
            }),
        }
    }
    groups
}

fn nearest_other(i: usize, candidates: impl IntoIterator<Item = usize>, vectors: &[&[f64]]) -> Option<usize> {
    candidates
        .into_iter()
        .filter(|&j| j != i)
        .map(|j| (euclidean(vectors[i], vectors[j]), j))
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .map(|(_, j)| j)
}

/// Nearest-neighbour auxiliaries over one vector per task (indexed by task
/// id). Groups of two or more look only inside the group; a singleton group
/// falls back to the nearest task overall.
fn nearest_auxiliaries(vectors: &[&[f64]], groups: &[TaskGroup]) -> Vec<Option<usize>> {
    let n = vectors.len();
    let mut aux = vec![None; n];
    for g in groups {
        let members = &g.member_task_ids;
        if members.len() >= 2 {
            for &i in members {
                aux[i] = nearest_other(i, members.iter().copied(), vectors);
            }
        } else if let Some(&i) = members.first() {
            aux[i] = nearest_other(i, 0..n, vectors);
        }
    }
    aux
}

/// Sets each task's auxiliary from the distances between majority targets.
pub fn initial_auxiliary(tasks: &mut [Task], groups: &[TaskGroup]) {
    let aux = {
        let vectors: Vec<&[f64]> = tasks.iter().map(|t| t.maj_target.as_slice()).collect();
        nearest_auxiliaries(&vectors, groups)
    };
    for (t, a) in tasks.iter_mut().zip(aux) {
        t.auxiliary_id = a;
    }
}

/// Recomputes auxiliaries from the tasks' current best phenotypes
/// (indexed by task id).
pub fn update_auxiliary(best_phenotypes: &[Instance], groups: &[TaskGroup]) -> Vec<Option<usize>> {
    let vectors: Vec<&[f64]> = best_phenotypes.iter().map(|x| x.as_slice()).collect();
    nearest_auxiliaries(&vectors, groups)
}

/// Best-of-generation summary for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub task_id: usize,
    pub generation: usize,
    pub best_d: f64,
    pub best_theta: f64,
    pub feasible: bool,
    pub auxiliary_id: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct EvolutionOutcome {
    pub tasks: Vec<Task>,
    /// One synthetic minority instance per task, in task order.
    pub synthetic: Vec<Instance>,
    pub best_programs: Vec<Program>,
    pub final_fitness: Vec<FitnessValue>,
    /// `generations` records per task, generation-major.
    pub records: Vec<GenerationRecord>,
    /// Tasks whose best individual never became feasible.
    pub never_feasible: Vec<usize>,
}

impl EvolutionOutcome {
    /// Mean over tasks of the best `(D, theta)` for each generation.
    pub fn mean_best_curve(&self) -> Vec<(usize, f64, f64)> {
        let n = self.tasks.len();
        if n == 0 {
            return Vec::new();
        }
        self.records
            .chunks(n)
            .map(|gen| {
                let d = gen.iter().map(|r| r.best_d).sum::<f64>() / n as f64;
                let t = gen.iter().map(|r| r.best_theta).sum::<f64>() / n as f64;
                (gen[0].generation, d, t)
            })
            .collect()
    }
}

struct TaskRun<'a> {
    task: &'a Task,
    pop: Population,
    rng: ChaCha8Rng,
    best: usize,
    ever_feasible: bool,
}

impl TaskRun<'_> {
    fn best_fitness(&self) -> FitnessValue {
        self.pop.fitnesses[self.best]
    }

    /// Indices of the top `count` programs, best first, ties by index.
    fn elites(&self, count: usize) -> Vec<Program> {
        let mut order: Vec<usize> = (0..self.pop.len()).collect();
        order.sort_by(|&i, &j| {
            compare(&self.pop.fitnesses[j], &self.pop.fitnesses[i]).then(i.cmp(&j))
        });
        order
            .into_iter()
            .take(count)
            .map(|i| self.pop.programs[i].clone())
            .collect()
    }
}

fn score(program: &Program, pool: &[Instance], task: &Task) -> FitnessValue {
    match program.evaluate(pool) {
        Ok(x) => evaluate_fitness(&x, &task.maj_target, &task.min_target)
            .unwrap_or(FitnessValue::WORST),
        Err(_) => FitnessValue::WORST,
    }
}

fn breed(run: &mut TaskRun<'_>, donors: Option<&[Program]>, pool: &[Instance], cfg: &RunConfig) -> Result<()> {
    let size = cfg.population_size_per_task;
    let mut next = Vec::with_capacity(size);
    let mut next_fit = Vec::with_capacity(size);
    next.push(run.pop.programs[run.best].clone());
    next_fit.push(run.best_fitness());

    let rng = &mut run.rng;
    let transfer_cut = cfg.rate_standard_crossover + cfg.rate_transfer_crossover;
    while next.len() < size {
        let r: f64 = rng.gen();
        let transfer = r >= cfg.rate_standard_crossover && r < transfer_cut;
        let mutation = r >= transfer_cut;
        if mutation {
            let p = tournament_select(&run.pop, cfg.tournament_size, rng)?;
            next.push(mutate(&run.pop.programs[p], cfg.max_depth, pool.len(), rng));
        } else if let (true, Some(donors)) = (transfer, donors) {
            let p = tournament_select(&run.pop, cfg.tournament_size, rng)?;
            let donor = &donors[rng.gen_range(0..donors.len())];
            next.push(crossover_transfer(&run.pop.programs[p], donor, cfg.max_depth, rng));
        } else {
            let p1 = tournament_select(&run.pop, cfg.tournament_size, rng)?;
            let p2 = tournament_select(&run.pop, cfg.tournament_size, rng)?;
            let (c1, c2) =
                crossover_standard(&run.pop.programs[p1], &run.pop.programs[p2], cfg.max_depth, rng);
            next.push(c1);
            if next.len() < size {
                next.push(c2);
            }
        }
    }
    next_fit.extend(next[1..].iter().map(|p| score(p, pool, run.task)));
    run.pop = Population {
        programs: next,
        fitnesses: next_fit,
    };
    run.best = best_index(&run.pop.fitnesses).expect("nonempty population");
    run.ever_feasible |= run.best_fitness().feasible;
    Ok(())
}

/// Evolves one synthetic minority instance per task.
///
/// Appending [`EvolutionOutcome::synthetic`] to `train` as minority rows
/// balances the classes.
pub fn evolve_all(train: &Dataset, cfg: &RunConfig) -> Result<EvolutionOutcome> {
    cfg.validate()?;
    let mut tasks = assign_tasks(train)?;
    let groups = group_tasks(&tasks);
    if cfg.transfer_enabled {
        initial_auxiliary(&mut tasks, &groups);
    }
    let pool = train.instances_of(crate::ClassLabel::Minority);

    let workers = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    workers.install(|| run_generations(&mut tasks, &groups, &pool, cfg))
}

fn run_generations(
    tasks: &mut Vec<Task>,
    groups: &[TaskGroup],
    pool: &[Instance],
    cfg: &RunConfig,
) -> Result<EvolutionOutcome> {
    let n = tasks.len();
    let mut aux: Vec<Option<usize>> = tasks.iter().map(|t| t.auxiliary_id).collect();
    let task_view: &[Task] = tasks;

    let mut runs: Vec<TaskRun<'_>> = task_view
        .par_iter()
        .map(|task| -> Result<TaskRun<'_>> {
            let mut rng = stream_rng(cfg.master_seed, task.id as u64);
            let mut pop = init_ramped_half_and_half(
                cfg.population_size_per_task,
                cfg.max_depth,
                pool.len(),
                &mut rng,
            )?;
            pop.fitnesses = pop.programs.iter().map(|p| score(p, pool, task)).collect();
            let best = best_index(&pop.fitnesses).expect("nonempty population");
            let ever_feasible = pop.fitnesses[best].feasible;
            Ok(TaskRun {
                task,
                pop,
                rng,
                best,
                ever_feasible,
            })
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(n * cfg.generations);
    for generation in 1..=cfg.generations {
        if cfg.transfer_enabled && generation > 1 && (generation - 1) % cfg.auxiliary_update_period == 0 {
            let phenotypes: Vec<Instance> = runs
                .iter()
                .map(|r| {
                    r.pop.programs[r.best]
                        .evaluate(pool)
                        .unwrap_or_else(|_| r.task.maj_target.clone())
                })
                .collect();
            aux = update_auxiliary(&phenotypes, groups);
        }

        let snapshots: Vec<Vec<Program>> = if cfg.transfer_enabled {
            let mut wanted = vec![false; n];
            aux.iter().flatten().for_each(|&a| wanted[a] = true);
            runs.iter()
                .zip(&wanted)
                .map(|(r, w)| if *w { r.elites(cfg.elite_count()) } else { Vec::new() })
                .collect()
        } else {
            Vec::new()
        };

        runs.par_iter_mut()
            .enumerate()
            .try_for_each(|(i, run)| {
                let donors = aux[i].map(|a| snapshots[a].as_slice());
                breed(run, donors, pool, cfg)
            })?;

        records.extend(runs.iter().enumerate().map(|(i, r)| {
            let f = r.best_fitness();
            GenerationRecord {
                task_id: i,
                generation,
                best_d: f.d_score,
                best_theta: f.theta_degrees,
                feasible: f.feasible,
                auxiliary_id: aux[i],
            }
        }));
    }

    let mut synthetic = Vec::with_capacity(n);
    let mut best_programs = Vec::with_capacity(n);
    let mut final_fitness = Vec::with_capacity(n);
    let mut never_feasible = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let program = run.pop.programs[run.best].clone();
        let phenotype = program.evaluate(pool).map_err(|e| e.in_stage("oversampling"))?;
        if !run.ever_feasible {
            log::warn!("task {i}: no feasible individual found; keeping best infeasible one");
            never_feasible.push(i);
        }
        synthetic.push(phenotype);
        final_fitness.push(run.best_fitness());
        best_programs.push(program);
    }
    drop(runs);
    for (t, a) in tasks.iter_mut().zip(&aux) {
        t.auxiliary_id = *a;
    }
    Ok(EvolutionOutcome {
        tasks: tasks.clone(),
        synthetic,
        best_programs,
        final_fitness,
        records,
        never_feasible,
    })
}
