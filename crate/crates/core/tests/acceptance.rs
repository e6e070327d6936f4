//! Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::cmp::Ordering;
use std::f64::consts::E;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use evosampling::data::{parse_csv, write_csv};
use evosampling::evaluation::{auc, g_mean, ConfusionCounts, ScoredPrediction};
use evosampling::fitness::{
    angle_score, compare, distance_score, feasibility_threshold, triangle_sides, FitnessValue,
    Triangle,
};
use evosampling::granular_ball::{generate_balls, GranularBall};
use evosampling::multitask::GenerationRecord;
use evosampling::pipeline::{self, Method, PipelineConfig};
use evosampling::smote::smote_samples;
use evosampling::synthetic::{benchmark_suite, overlap_ir10, two_gaussians};
use evosampling::undersample::removal_count;
use evosampling::{ClassLabel, Dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const SUITE_SEED: u64 = 0;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn main() {
    let dir = TempDir::new().expect("temp dir");
    let mut records: Vec<Vec<GenerationRecord>> = Vec::new();
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Verdict + '_>)> = vec![
        ("fitness threshold equivalence", Box::new(threshold_equivalence)),
        ("fitness anchors", Box::new(fitness_anchors)),
        ("granular-ball postconditions", Box::new(ball_postconditions)),
        ("end-to-end balance", Box::new(|| end_to_end_balance(dir.path()))),
        ("determinism", Box::new(|| determinism(dir.path()))),
        ("removal-count oracle", Box::new(removal_count_oracle)),
        ("SMOTE segment property", Box::new(smote_segments)),
        ("metric oracles", Box::new(metric_oracles)),
        ("directional downstream check", Box::new(downstream_direction)),
        ("knowledge-transfer ablation", Box::new(|| ablation(dir.path(), &mut records))),
    ];
    let mut failed = 0;
    let mut report = |n: usize, name: &str, v: Verdict, t: Duration| {
        let status = if v.passed { "PASS" } else { "FAIL" };
        if !v.passed {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {status}: {name} ({:.2}s) {}",
            t.as_secs_f64(),
            v.detail
        );
    };
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let v = check();
        report(i + 1, name, v, start.elapsed());
    }
    let start = Instant::now();
    let v = elitism(&records);
    report(11, "elitism monotonicity", v, start.elapsed());

    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn threshold_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let threshold = (E - 0.5f64.exp()) / (E - 1.0);
    let mut exceptions = 0;
    for _ in 0..100_000 {
        // a and b uniform in (0, 10]; the targets sit in random directions
        // around the synthetic point, which fixes c
        let a = 10.0 - rng.gen_range(0.0..10.0);
        let b = 10.0 - rng.gen_range(0.0..10.0);
        let dir = |rng: &mut ChaCha8Rng| {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            (t.cos(), t.sin())
        };
        let (u, v) = (dir(&mut rng), dir(&mut rng));
        let synthetic = [0.0, 0.0];
        let min_t = [a * u.0, a * u.1];
        let maj_t = [b * v.0, b * v.1];
        let t = triangle_sides(&synthetic, &maj_t, &min_t).unwrap();
        let d = (E - (t.a / (t.a + t.b)).exp()) / (E - 1.0);
        let lib_d = distance_score(&t).unwrap();
        if (d > threshold) != (t.a < t.b) || d != lib_d {
            exceptions += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        exceptions == 0 && elapsed < Duration::from_secs(1),
        format!("exceptions={exceptions} of 100000, threshold={threshold:.7}"),
    )
}

fn fitness_anchors() -> Verdict {
    let tri = |a, b, c| Triangle { a, b, c };
    let d_a0 = distance_score(&tri(0.0, 3.0, 3.0)).unwrap();
    let d_b0 = distance_score(&tri(3.0, 0.0, 3.0)).unwrap();
    let d_eq = distance_score(&tri(2.0, 2.0, 1.0)).unwrap();
    let right = angle_score(&tri(3.0, 4.0, 5.0)).unwrap();
    let straight = angle_score(&tri(2.0, 3.0, 5.0)).unwrap();
    let ok = d_a0 == 1.0
        && d_b0 == 0.0
        && (d_eq - 0.6224593).abs() < 1e-6
        && (right - 90.0).abs() <= 1e-9
        && (straight - 180.0).abs() <= 1e-9
        && feasibility_threshold() == d_eq;
    verdict(
        ok,
        format!("D(a=0)={d_a0} D(b=0)={d_b0} D(a=b)={d_eq:.9} theta(3,4,5)={right} theta(c=a+b)={straight}"),
    )
}

fn random_dataset(rng: &mut ChaCha8Rng, max_rows: usize, max_dim: usize) -> Dataset {
    let n = rng.gen_range(2..=max_rows);
    let dim = rng.gen_range(1..=max_dim);
    let p_min = rng.gen_range(0.05..0.5);
    let rows = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect())
        .collect();
    let labels = (0..n)
        .map(|_| if rng.gen_bool(p_min) { ClassLabel::Minority } else { ClassLabel::Majority })
        .collect();
    Dataset::from_rows(rows, labels).unwrap()
}

fn ball_postconditions() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = Vec::new();
    for case in 0..200 {
        let d = random_dataset(&mut rng, 300, 8);
        let set = generate_balls(&d, 1.0, &mut rng).unwrap();
        let pure = set
            .balls
            .iter()
            .all(|b| b.members.iter().all(|&m| d.label(m) == b.label));
        if !(set.is_partition_of(d.len()) && pure && set.splits < d.len()) {
            bad.push(case);
        }
    }
    let elapsed = start.elapsed();
    verdict(
        bad.is_empty() && elapsed < Duration::from_secs(10),
        format!("failing datasets={bad:?}"),
    )
}

fn write_dataset(dir: &Path, name: &str, d: &Dataset) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, write_csv(d).unwrap()).unwrap();
    path
}

fn resample_config(input: PathBuf, output: PathBuf, report: PathBuf) -> PipelineConfig {
    PipelineConfig {
        input,
        output,
        report,
        method: Method::Evosampling,
        ..PipelineConfig::default()
    }
}

fn end_to_end_balance(dir: &Path) -> Verdict {
    let mut failures = Vec::new();
    let mut slowest = 0.0f64;
    for (i, spec) in benchmark_suite(SUITE_SEED).iter().enumerate() {
        let input = write_dataset(dir, &format!("suite{i}.csv"), &two_gaussians(spec).unwrap());
        let output = dir.join(format!("suite{i}.out.csv"));
        let cfg = resample_config(input, output.clone(), dir.join(format!("suite{i}.report")));
        let start = Instant::now();
        let result = pipeline::cmd_resample(&cfg);
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        let balanced = result.is_ok()
            && fs::read_to_string(&output)
                .ok()
                .and_then(|t| parse_csv(&t, "class").ok())
                .is_some_and(|d| d.count(ClassLabel::Majority) == d.count(ClassLabel::Minority));
        if !balanced || secs >= 60.0 {
            failures.push(format!("case {i} (IR {:.1}): {secs:.1}s", spec.imbalance_ratio()));
        }
    }
    verdict(
        failures.is_empty(),
        format!("20 datasets, slowest {slowest:.2}s, failures={failures:?}"),
    )
}

fn determinism(dir: &Path) -> Verdict {
    let spec = &benchmark_suite(SUITE_SEED)[12];
    let input = write_dataset(dir, "determinism.csv", &two_gaussians(spec).unwrap());
    let config = dir.join("determinism.toml");
    fs::write(&config, "master_seed = 2024\n").unwrap();
    let mut outputs = Vec::new();
    for (run, workers) in [1, 4, 1, 4].into_iter().enumerate() {
        let mut cfg = PipelineConfig::load(Some(&config)).unwrap();
        cfg.input = input.clone();
        cfg.output = dir.join(format!("determinism{run}.csv"));
        cfg.report = dir.join(format!("determinism{run}.report"));
        cfg.run.workers = workers;
        pipeline::cmd_resample(&cfg).unwrap();
        outputs.push(fs::read(&cfg.output).unwrap());
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    verdict(
        identical,
        format!("4 runs (workers 1,4,1,4), {} bytes each", outputs[0].len()),
    )
}

fn coincident_ball(id: usize, size: usize, label: ClassLabel) -> GranularBall {
    let d = Dataset::from_rows(vec![vec![0.0]; size], vec![label; size]).unwrap();
    GranularBall::new(id, (0..size).collect(), &d).unwrap()
}

fn removal_count_oracle() -> Verdict {
    use ClassLabel::{Majority as J, Minority as N};
    // (target label, target size, neighbours, expected), worked by hand
    let mut table: Vec<(ClassLabel, usize, Vec<(ClassLabel, usize)>, usize)> = vec![
        (J, 10, vec![(J, 4), (J, 6), (J, 8)], 0),
        (J, 10, vec![(N, 3), (J, 6), (J, 8)], 1),
        (J, 10, vec![(N, 2), (J, 6), (J, 8)], 0),
        (J, 10, vec![(N, 3), (N, 3), (J, 8)], 2),
        (J, 10, vec![(N, 3), (N, 3), (N, 3)], 3),
        (J, 10, vec![(N, 30), (N, 1), (J, 1)], 10),
        (J, 2, vec![(N, 9), (N, 9), (N, 9)], 2),
        (J, 3, vec![(N, 4), (N, 4), (N, 1)], 3),
        (N, 1, vec![(J, 5), (J, 5), (J, 5)], 1),
        (N, 7, vec![(J, 1), (N, 5), (N, 5)], 0),
        (N, 7, vec![(J, 2), (J, 2), (N, 5)], 1),
        (N, 7, vec![(J, 2), (J, 4), (N, 5)], 2),
        (N, 5, vec![(J, 7), (J, 8), (J, 1)], 5),
        (N, 6, vec![(J, 7), (J, 8), (J, 1)], 5),
        (J, 4, vec![(N, 6)], 4),
        (J, 4, vec![(N, 3)], 3),
        (J, 4, vec![(N, 2), (N, 3)], 2),
        (J, 4, vec![(N, 2), (J, 3)], 1),
        (J, 1, vec![(N, 1), (N, 1), (N, 1)], 1),
        (J, 5, vec![], 0),
    ];
    // 30 more configurations with expectations from a direct count
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    while table.len() < 50 {
        let label = if rng.gen_bool(0.5) { J } else { N };
        let size = rng.gen_range(1..12);
        let k = rng.gen_range(1..=4);
        let neighbors: Vec<(ClassLabel, usize)> = (0..k)
            .map(|_| (if rng.gen_bool(0.5) { J } else { N }, rng.gen_range(1..15)))
            .collect();
        let mut differing = 0;
        for &(l, s) in &neighbors {
            if l != label {
                differing += s;
            }
        }
        let expected = ((differing as f64 / k as f64).floor() as usize).min(size);
        table.push((label, size, neighbors, expected));
    }
    let mut mismatches = Vec::new();
    let mut clamped = 0;
    for (i, (label, size, neighbors, expected)) in table.iter().enumerate() {
        let target = coincident_ball(0, *size, *label);
        let others: Vec<GranularBall> = neighbors
            .iter()
            .enumerate()
            .map(|(j, (l, s))| coincident_ball(j + 1, *s, *l))
            .collect();
        let refs: Vec<&GranularBall> = others.iter().collect();
        let got = removal_count(&target, &refs);
        if got != *expected {
            mismatches.push((i, got, *expected));
        }
        if *expected == *size && *size > 0 {
            clamped += 1;
        }
    }
    verdict(
        mismatches.is_empty() && table.len() == 50,
        format!("50 configurations ({clamped} at the size cap), mismatches={mismatches:?}"),
    )
}

fn smote_segments() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut outside = 0;
    let mut total = 0;
    while total < 10_000 {
        let d = loop {
            let d = random_dataset(&mut rng, 120, 6);
            if d.count(ClassLabel::Minority) >= 2 {
                break d;
            }
        };
        let k = (d.count(ClassLabel::Minority) - 1).min(5);
        for s in smote_samples(&d, k, 500, &mut rng).unwrap() {
            let (xi, xj) = (d.instance(s.base), d.instance(s.neighbor));
            let inside = (0..xi.len())
                .all(|c| s.point[c] >= xi[c].min(xj[c]) && s.point[c] <= xi[c].max(xj[c]));
            if !inside {
                outside += 1;
            }
            total += 1;
        }
    }
    verdict(outside == 0, format!("{outside} of {total} points outside their pair's box"))
}

fn trapezoid_auc(preds: &[ScoredPrediction]) -> f64 {
    let pos = preds.iter().filter(|p| p.true_label == ClassLabel::Minority).count() as f64;
    let neg = preds.len() as f64 - pos;
    let mut thresholds: Vec<f64> = preds.iter().map(|p| p.score).collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let mut roc = vec![(0.0, 0.0)];
    for t in thresholds {
        let above = |l| preds.iter().filter(|p| p.score >= t && p.true_label == l).count() as f64;
        roc.push((above(ClassLabel::Majority) / neg, above(ClassLabel::Minority) / pos));
    }
    roc.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0).sum()
}

fn metric_oracles() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_auc_gap = 0.0f64;
    for set in 0..100 {
        let n = rng.gen_range(2..200);
        let levels = if set % 2 == 0 { 10 } else { 1_000_000 };
        let mut preds: Vec<ScoredPrediction> = (0..n)
            .map(|_| ScoredPrediction {
                score: rng.gen_range(0..levels) as f64 / levels as f64,
                predicted: ClassLabel::Majority,
                true_label: if rng.gen_bool(0.3) { ClassLabel::Minority } else { ClassLabel::Majority },
            })
            .collect();
        preds[0].true_label = ClassLabel::Minority;
        preds[1].true_label = ClassLabel::Majority;
        worst_auc_gap = worst_auc_gap.max((auc(&preds).unwrap() - trapezoid_auc(&preds)).abs());
    }

    // (tp, fn, tn, fp, expected G-mean), rates worked out by hand
    let tables: [(usize, usize, usize, usize, f64); 20] = [
        (3, 1, 8, 2, (0.75f64 * 0.8).sqrt()),
        (4, 0, 6, 0, 1.0),
        (0, 4, 6, 0, 0.0),
        (4, 0, 0, 6, 0.0),
        (1, 1, 1, 1, 0.5),
        (5, 5, 10, 0, 0.5f64.sqrt()),
        (9, 1, 90, 10, (0.9f64 * 0.9).sqrt()),
        (2, 3, 40, 5, (0.4f64 * (40.0 / 45.0)).sqrt()),
        (7, 0, 3, 3, 0.5f64.sqrt()),
        (1, 0, 99, 1, 0.99f64.sqrt()),
        (3, 3, 50, 50, 0.5),
        (10, 10, 25, 75, (0.5f64 * 0.25).sqrt()),
        (6, 2, 12, 4, (0.75f64 * 0.75).sqrt()),
        (1, 9, 9, 1, 0.09f64.sqrt()),
        (8, 2, 7, 3, (0.8f64 * 0.7).sqrt()),
        (0, 0, 5, 5, 0.0),
        (5, 5, 0, 0, 0.0),
        (12, 4, 30, 10, (0.75f64 * 0.75).sqrt()),
        (2, 2, 3, 1, (0.5f64 * 0.75).sqrt()),
        (20, 5, 100, 25, (0.8f64 * 0.8).sqrt()),
    ];
    let mut gm_bad = Vec::new();
    for (i, &(tp, fn_, tn, fp, expected)) in tables.iter().enumerate() {
        let c = ConfusionCounts {
            true_pos: tp,
            false_neg: fn_,
            true_neg: tn,
            false_pos: fp,
        };
        if (g_mean(&c) - expected).abs() > 1e-12 {
            gm_bad.push(i);
        }
    }
    verdict(
        worst_auc_gap < 1e-12 && gm_bad.is_empty(),
        format!("max |AUC - trapezoid| = {worst_auc_gap:.2e} over 100 sets; G-mean mismatches={gm_bad:?}"),
    )
}

fn downstream_direction() -> Verdict {
    let start = Instant::now();
    let mut wins = 0;
    let mut total_gain = 0.0;
    let mut per_seed = Vec::new();
    for seed in 0..10u64 {
        let d = two_gaussians(&overlap_ir10(seed)).unwrap();
        let mut cfg = PipelineConfig {
            knn_k: 1,
            ..PipelineConfig::default()
        };
        cfg.run.master_seed = seed;
        cfg.method = Method::None;
        let (plain, _) = pipeline::evaluate_once(&d, &cfg).unwrap();
        cfg.method = Method::Evosampling;
        let (resampled, _) = pipeline::evaluate_once(&d, &cfg).unwrap();
        if resampled.g_mean >= plain.g_mean {
            wins += 1;
        }
        total_gain += resampled.g_mean - plain.g_mean;
        per_seed.push(format!("{:.3}->{:.3}", plain.g_mean, resampled.g_mean));
    }
    let elapsed = start.elapsed();
    let mean_gain = total_gain / 10.0;
    verdict(
        wins >= 8 && mean_gain > 0.0 && elapsed < Duration::from_secs(300),
        format!("wins {wins}/10, mean G-mean gain {mean_gain:+.4}; {}", per_seed.join(" ")),
    )
}

/// For each of 10 seeds, both arms run on four suite datasets (the seeds
/// rotate through the suite so every dataset is used twice).
fn ablation(dir: &Path, records: &mut Vec<Vec<GenerationRecord>>) -> Verdict {
    let suite = benchmark_suite(SUITE_SEED);
    let inputs: Vec<PathBuf> = suite
        .iter()
        .enumerate()
        .map(|(i, s)| write_dataset(dir, &format!("ablate{i}.csv"), &two_gaussians(s).unwrap()))
        .collect();
    let mut wins = 0;
    let mut lines = Vec::new();
    for seed in 0..10u64 {
        let (mut with_kt, mut without_kt) = (0.0, 0.0);
        for j in 0..4 {
            let case = (seed as usize * 2 + j * 5) % suite.len();
            let mut cfg = PipelineConfig {
                input: inputs[case].clone(),
                output: dir.join("ablate.jsonl"),
                ..PipelineConfig::default()
            };
            cfg.run.master_seed = seed;
            let [a, b] = pipeline::cmd_ablate(&cfg).unwrap();
            with_kt += a.theta_area();
            without_kt += b.theta_area();
            records.push(a.records);
            records.push(b.records);
        }
        if with_kt >= without_kt {
            wins += 1;
        } else {
            eprintln!("ablation seed {seed}: without transfer ahead ({without_kt:.1} > {with_kt:.1})");
        }
        lines.push(format!("{:+.1}", with_kt - without_kt));
    }
    verdict(
        wins > 5,
        format!("with_kt area >= without_kt in {wins}/10 seeds; area differences {}", lines.join(" ")),
    )
}

fn elitism(runs: &[Vec<GenerationRecord>]) -> Verdict {
    let mut regressions = 0;
    let mut tasks = 0;
    for records in runs {
        let n_tasks = records.iter().filter(|r| r.generation == 1).count();
        tasks += n_tasks;
        let mut last: Vec<Option<FitnessValue>> = vec![None; n_tasks];
        for r in records {
            let f = FitnessValue {
                d_score: r.best_d,
                theta_degrees: r.best_theta,
                feasible: r.feasible,
            };
            if let Some(prev) = &last[r.task_id] {
                if compare(&f, prev) == Ordering::Less {
                    regressions += 1;
                }
            }
            last[r.task_id] = Some(f);
        }
    }
    verdict(
        regressions == 0 && !runs.is_empty(),
        format!("{} logged runs, {tasks} task histories, {regressions} regressions", runs.len()),
    )
}
