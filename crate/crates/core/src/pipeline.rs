//! Configuration and the end-to-end commands behind the binary.
//!
//! Configuration is layered: built-in defaults, then the `EVOSAMPLING_SEED`
//! environment variable, then a flat TOML file, then command-line flags.
//! Every command is reproducible from the resolved configuration, and each
//! random consumer draws from its own stream of `master_seed`.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{
    parse_csv_with, parse_keel_with, stratified_split_rows, write_csv, ClassLabel, Classes,
    Dataset, LabelColumn, MinMaxScaler,
};
use crate::error::{Error, Result};
use crate::evaluation::{knn_classify, metrics, Metrics};
use crate::granular_ball::{generate_balls, BallSet, BallSummary};
use crate::multitask::{evolve_all, EvolutionOutcome, GenerationRecord, RunConfig};
use crate::undersample::{undersample, Phase, RemovalEvent};
use crate::{smote, stream_rng, streams};

pub const SEED_ENV: &str = "EVOSAMPLING_SEED";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Evosampling,
    Smote,
    None,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "evosampling" => Ok(Method::Evosampling),
            "smote" => Ok(Method::Smote),
            "none" => Ok(Method::None),
            _ => Err(Error::Config(format!(
                "unknown method '{s}' (expected evosampling, smote or none)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Evosampling => "evosampling",
            Method::Smote => "smote",
            Method::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// `.dat` files are KEEL, everything else CSV.
    #[default]
    Auto,
    Keel,
    Csv,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(InputFormat::Auto),
            "keel" => Ok(InputFormat::Keel),
            "csv" => Ok(InputFormat::Csv),
            _ => Err(Error::Config(format!(
                "unknown format '{s}' (expected auto, keel or csv)"
            ))),
        }
    }
}

/// Everything a command needs. Empty paths mean stdout (outputs) or
/// stderr (reports).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    #[serde(flatten)]
    pub run: RunConfig,
    pub input: PathBuf,
    pub format: InputFormat,
    /// CSV label column: header name or zero-based index; empty for the last.
    pub label_column: String,
    pub method: Method,
    /// Min-max scale features (fitted on the training data) first.
    pub scale: bool,
    pub output: PathBuf,
    pub report: PathBuf,
    pub smote_k: usize,
    pub knn_k: usize,
    pub train_fraction: f64,
    /// Evaluation runs; run `i` uses seed `master_seed + i`.
    pub runs: usize,
    /// Log filter for the binary, e.g. `warn` or `info`.
    pub verbosity: String,
    #[serde(skip)]
    pub config_file: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            run: RunConfig::default(),
            input: PathBuf::new(),
            format: InputFormat::Auto,
            label_column: String::new(),
            method: Method::Evosampling,
            scale: false,
            output: PathBuf::new(),
            report: PathBuf::new(),
            smote_k: smote::DEFAULT_K,
            knn_k: crate::evaluation::DEFAULT_K,
            train_fraction: 0.7,
            runs: 1,
            verbosity: "warn".to_string(),
            config_file: None,
        }
    }
}

/// Reads the seed override from the environment, if set.
pub fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

impl PipelineConfig {
    /// Defaults, then the environment seed, then the file (if any).
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        if let Some(seed) = env_seed()? {
            cfg.run.master_seed = seed;
        }
        if let Some(p) = path {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            cfg = cfg.merge_toml(&text)?;
            cfg.config_file = Some(p.to_path_buf());
        }
        Ok(cfg)
    }

    /// This configuration with the keys present in `text` replaced.
    /// Unknown keys are rejected.
    pub fn merge_toml(&self, text: &str) -> Result<Self> {
        let overrides: toml::Table = text
            .parse()
            .map_err(|e| Error::Config(format!("config file: {e}")))?;
        let mut merged =
            toml::Table::try_from(self).map_err(|e| Error::Config(format!("config: {e}")))?;
        for (key, value) in overrides {
            if !merged.contains_key(&key) {
                return Err(Error::Config(format!("unknown config key '{key}'")));
            }
            merged.insert(key, value);
        }
        let mut cfg: PipelineConfig = merged
            .try_into()
            .map_err(|e| Error::Config(format!("config file: {e}")))?;
        cfg.config_file = self.config_file.clone();
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.run.validate()?;
        if self.smote_k == 0 || self.knn_k == 0 {
            return Err(Error::Config("smote_k and knn_k must be positive".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config("train_fraction must lie in (0, 1)".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be positive".into()));
        }
        Ok(())
    }

    fn require_input(&self) -> Result<&Path> {
        if self.input.as_os_str().is_empty() {
            return Err(Error::Config("no input file given".into()));
        }
        Ok(&self.input)
    }
}

/// Reads KEEL or CSV according to `format`.
pub fn read_dataset(
    path: &Path,
    format: InputFormat,
    label_column: &str,
    classes: Classes,
) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let keel = match format {
        InputFormat::Keel => true,
        InputFormat::Csv => false,
        InputFormat::Auto => path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("dat")),
    };
    if keel {
        return parse_keel_with(&text, classes);
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    parse_csv_with(&text, LabelColumn::resolve(label_column, &header), classes)
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    if path.as_os_str().is_empty() {
        std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| Error::io("<stdout>", e))
    } else {
        fs::write(path, contents).map_err(|e| Error::io(path, e))
    }
}

fn write_report(path: &Path, contents: &str) -> Result<()> {
    if path.as_os_str().is_empty() {
        eprint!("{contents}");
        Ok(())
    } else {
        fs::write(path, contents).map_err(|e| Error::io(path, e))
    }
}

/// Class counts after one pipeline stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageCounts {
    pub stage: &'static str,
    pub majority: usize,
    pub minority: usize,
}

impl StageCounts {
    fn of(stage: &'static str, d: &Dataset) -> Self {
        let (majority, minority) = d.class_counts();
        StageCounts {
            stage,
            majority,
            minority,
        }
    }
}

/// Result of the full oversample-then-undersample pipeline.
#[derive(Debug, Clone)]
pub struct EvosampleOutcome {
    pub dataset: Dataset,
    pub stages: Vec<StageCounts>,
    pub evolution: EvolutionOutcome,
    pub balls: BallSet,
    pub removals: Vec<RemovalEvent>,
    /// For each output row, its row in the oversampled set: indices below
    /// the training size are original rows, the rest are synthetic (task
    /// `index - training size`).
    pub kept_rows: Vec<usize>,
}

/// Oversamples `train` with multi-task GP, covers the result with granular
/// balls and undersamples it to equal class sizes.
pub fn evosample(train: &Dataset, cfg: &RunConfig) -> Result<EvosampleOutcome> {
    cfg.validate()?;
    train.require_both_classes()?;
    let evolution = evolve_all(train, cfg).map_err(|e| e.in_stage("oversampling"))?;
    let oversampled = train
        .with_appended(evolution.synthetic.clone(), ClassLabel::Minority)
        .map_err(|e| e.in_stage("oversampling"))?;
    let balls = generate_balls(
        &oversampled,
        cfg.gb_quality_threshold,
        &mut stream_rng(cfg.master_seed, streams::GRANULAR_BALLS),
    )
    .map_err(|e| e.in_stage("granular balls"))?;
    let removal = undersample(
        &balls,
        &oversampled,
        cfg.gb_neighbors,
        &mut stream_rng(cfg.master_seed, streams::UNDERSAMPLE),
    )
    .map_err(|e| e.in_stage("undersampling"))?;

    let removed = |phase: Phase| -> usize {
        removal
            .events
            .iter()
            .filter(|e| e.phase == phase)
            .map(|e| e.s)
            .sum()
    };
    log::info!(
        "{} balls; cleaning removed {} rows, rebalancing {}",
        balls.len(),
        removed(Phase::Cleaning),
        removed(Phase::Rebalancing)
    );
    Ok(EvosampleOutcome {
        stages: vec![
            StageCounts::of("input", train),
            StageCounts::of("oversampled", &oversampled),
            StageCounts::of("output", &removal.dataset),
        ],
        dataset: removal.dataset,
        evolution,
        balls,
        removals: removal.events,
        kept_rows: removal.kept_rows,
    })
}

/// Applies the configured method to a training set.
pub fn resample(train: &Dataset, cfg: &PipelineConfig) -> Result<(Dataset, Vec<StageCounts>)> {
    match cfg.method {
        Method::None => Ok((train.clone(), vec![StageCounts::of("input", train)])),
        Method::Smote => {
            let (maj, min) = train.class_counts();
            let out = smote::smote(
                train,
                cfg.smote_k,
                maj.saturating_sub(min),
                &mut stream_rng(cfg.run.master_seed, streams::SMOTE),
            )
            .map_err(|e| e.in_stage("smote"))?;
            let stages = vec![StageCounts::of("input", train), StageCounts::of("output", &out)];
            Ok((out, stages))
        }
        Method::Evosampling => {
            let out = evosample(train, &cfg.run)?;
            Ok((out.dataset, out.stages))
        }
    }
}

fn load_input(cfg: &PipelineConfig) -> Result<Dataset> {
    read_dataset(cfg.require_input()?, cfg.format, &cfg.label_column, Classes::RequireBoth)
}

fn scaled(d: &Dataset) -> Result<Dataset> {
    MinMaxScaler::fit(d).transform(d)
}

/// Reads the input, resamples it and writes the CSV and a key=value report.
pub fn cmd_resample(cfg: &PipelineConfig) -> Result<Dataset> {
    cfg.validate()?;
    let start = Instant::now();
    let mut data = load_input(cfg)?;
    if cfg.scale {
        data = scaled(&data)?;
    }
    let (out, stages) = resample(&data, cfg)?;
    write_output(&cfg.output, &write_csv(&out)?)?;

    let mut report = String::new();
    report.push_str(&format!("command=resample\nmethod={}\n", cfg.method));
    report.push_str(&format!("seed={}\n", cfg.run.master_seed));
    report.push_str(&format!("config_file={}\n", display_opt(&cfg.config_file)));
    report.push_str(&format!("input={}\n", cfg.input.display()));
    for s in &stages {
        report.push_str(&format!(
            "{0}_majority={1}\n{0}_minority={2}\n",
            s.stage, s.majority, s.minority
        ));
    }
    report.push_str(&format!("wall_time_s={:.3}\n", start.elapsed().as_secs_f64()));
    write_report(&cfg.report, &report)?;
    Ok(out)
}

fn display_opt(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

/// One evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationRow {
    pub dataset: String,
    pub method: Method,
    pub seed: u64,
    pub train_majority: usize,
    pub train_minority: usize,
    pub resampled_majority: usize,
    pub resampled_minority: usize,
    pub test_size: usize,
    pub k: usize,
    pub auc: f64,
    pub g_mean: f64,
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

/// Stratified split, resample the training part only, score the untouched
/// test part with kNN.
pub fn evaluate_once(data: &Dataset, cfg: &PipelineConfig) -> Result<(EvaluationRow, Metrics)> {
    let seed = cfg.run.master_seed;
    let (train_rows, test_rows) =
        stratified_split_rows(data, cfg.train_fraction, &mut stream_rng(seed, streams::SPLIT))?;
    if train_rows.iter().any(|r| test_rows.binary_search(r).is_ok()) {
        return Err(Error::Contract("training and test rows overlap".into()));
    }
    let mut train = data.subset(&train_rows);
    let mut test = data.subset(&test_rows);
    if cfg.scale {
        let scaler = MinMaxScaler::fit(&train);
        train = scaler.transform(&train)?;
        test = scaler.transform(&test)?;
    }
    let test_before = test.clone();
    let (resampled, _) = resample(&train, cfg)?;
    if test != test_before {
        return Err(Error::Contract("test split changed during resampling".into()));
    }
    let preds = knn_classify(&resampled, &test, cfg.knn_k.min(resampled.len()))?;
    let m = metrics(&preds)?;
    let (train_majority, train_minority) = train.class_counts();
    let (resampled_majority, resampled_minority) = resampled.class_counts();
    Ok((
        EvaluationRow {
            dataset: data.source().to_string(),
            method: cfg.method,
            seed,
            train_majority,
            train_minority,
            resampled_majority,
            resampled_minority,
            test_size: test.len(),
            k: cfg.knn_k,
            auc: m.auc,
            g_mean: m.g_mean,
            true_pos: m.confusion.true_pos,
            false_pos: m.confusion.false_pos,
            true_neg: m.confusion.true_neg,
            false_neg: m.confusion.false_neg,
        },
        m,
    ))
}

/// Runs `cfg.runs` evaluations with seeds `master_seed..` and writes one CSV
/// row per run.
pub fn cmd_evaluate(cfg: &PipelineConfig) -> Result<Vec<EvaluationRow>> {
    cfg.validate()?;
    let data = load_input(cfg)?;
    let mut rows = Vec::with_capacity(cfg.runs);
    for i in 0..cfg.runs {
        let mut run_cfg = cfg.clone();
        run_cfg.run.master_seed = cfg.run.master_seed.wrapping_add(i as u64);
        let (row, _) = evaluate_once(&data, &run_cfg)?;
        rows.push(row);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Validation(format!("csv writer: {e}")))?;
    write_output(&cfg.output, &String::from_utf8(bytes).expect("csv output is utf-8"))?;
    Ok(rows)
}

pub const ARM_WITH_TRANSFER: &str = "with_kt";
pub const ARM_WITHOUT_TRANSFER: &str = "without_kt";

/// One ablation arm.
#[derive(Debug, Clone)]
pub struct AblationArm {
    pub label: &'static str,
    pub records: Vec<GenerationRecord>,
    /// `(generation, mean best D, mean best theta)`.
    pub curve: Vec<(usize, f64, f64)>,
}

impl AblationArm {
    /// Trapezoidal area under the mean-best theta curve.
    pub fn theta_area(&self) -> f64 {
        curve_area(self.curve.iter().map(|c| c.2))
    }

    pub fn distance_area(&self) -> f64 {
        curve_area(self.curve.iter().map(|c| c.1))
    }
}

fn curve_area(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum()
}

/// Runs the evolution twice on the same seed, with and without transfer.
pub fn ablate(train: &Dataset, cfg: &RunConfig) -> Result<[AblationArm; 2]> {
    let arm = |label: &'static str, transfer: bool| -> Result<AblationArm> {
        let cfg = RunConfig {
            transfer_enabled: transfer,
            ..cfg.clone()
        };
        let out = evolve_all(train, &cfg).map_err(|e| e.in_stage("oversampling"))?;
        Ok(AblationArm {
            label,
            curve: out.mean_best_curve(),
            records: out.records,
        })
    };
    Ok([
        arm(ARM_WITH_TRANSFER, true)?,
        arm(ARM_WITHOUT_TRANSFER, false)?,
    ])
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum AblationLine<'a> {
    Task {
        arm: &'a str,
        #[serde(flatten)]
        record: &'a GenerationRecord,
    },
    MeanBest {
        arm: &'a str,
        generation: usize,
        mean_d: f64,
        mean_theta: f64,
    },
    Summary {
        arm: &'a str,
        seed: u64,
        tasks: usize,
        generations: usize,
        theta_area: f64,
        distance_area: f64,
    },
}

/// Writes the ablation log as JSON lines: per-task records, the mean-best
/// curve and a summary for each arm.
pub fn cmd_ablate(cfg: &PipelineConfig) -> Result<[AblationArm; 2]> {
    cfg.validate()?;
    let mut data = load_input(cfg)?;
    if cfg.scale {
        data = scaled(&data)?;
    }
    let arms = ablate(&data, &cfg.run)?;
    let mut out = String::new();
    let mut push = |line: &AblationLine<'_>| {
        out.push_str(&serde_json::to_string(line).expect("log lines serialize"));
        out.push('\n');
    };
    for arm in &arms {
        for record in &arm.records {
            push(&AblationLine::Task {
                arm: arm.label,
                record,
            });
        }
        for &(generation, mean_d, mean_theta) in &arm.curve {
            push(&AblationLine::MeanBest {
                arm: arm.label,
                generation,
                mean_d,
                mean_theta,
            });
        }
        push(&AblationLine::Summary {
            arm: arm.label,
            seed: cfg.run.master_seed,
            tasks: arm.records.len() / cfg.run.generations,
            generations: cfg.run.generations,
            theta_area: arm.theta_area(),
            distance_area: arm.distance_area(),
        });
    }
    write_output(&cfg.output, &out)?;
    Ok(arms)
}

/// Generates granular balls on the input and writes one JSON line per ball.
/// Unlike the other commands this accepts a single-class file.
pub fn cmd_gb_inspect(cfg: &PipelineConfig) -> Result<BallSet> {
    cfg.validate()?;
    let mut data = read_dataset(
        cfg.require_input()?,
        cfg.format,
        &cfg.label_column,
        Classes::AllowSingle,
    )?;
    if cfg.scale {
        data = scaled(&data)?;
    }
    let balls = generate_balls(
        &data,
        cfg.run.gb_quality_threshold,
        &mut stream_rng(cfg.run.master_seed, streams::GRANULAR_BALLS),
    )
    .map_err(|e| e.in_stage("granular balls"))?;
    let mut out = String::new();
    for b in &balls.balls {
        out.push_str(&serde_json::to_string(&BallSummary::from(b)).expect("ball lines serialize"));
        out.push('\n');
    }
    write_output(&cfg.output, &out)?;
    Ok(balls)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_merge_overrides_and_rejects_unknown_keys() {
        let base = PipelineConfig::default();
        let cfg = base
            .merge_toml("generations = 5\nmethod = \"smote\"\nmaster_seed = 7\n")
            .unwrap();
        assert_eq!(cfg.run.generations, 5);
        assert_eq!(cfg.run.master_seed, 7);
        assert_eq!(cfg.method, Method::Smote);
        assert_eq!(cfg.run.population_size_per_task, 30);
        assert!(matches!(
            base.merge_toml("generation = 5\n"),
            Err(Error::Config(_))
        ));
        assert!(base.merge_toml("method = \"adasyn\"\n").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = PipelineConfig::default();
        let text = cfg.to_toml().unwrap();
        assert_eq!(PipelineConfig::default().merge_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("SMOTE".parse::<Method>().unwrap(), Method::Smote);
        assert_eq!(Method::Evosampling.to_string(), "evosampling");
        assert!("x".parse::<Method>().is_err());
    }

    #[test]
    fn curve_area_is_trapezoidal() {
        assert_eq!(curve_area([0.0, 2.0, 2.0].into_iter()), 3.0);
        assert_eq!(curve_area([5.0].into_iter()), 0.0);
    }
}
