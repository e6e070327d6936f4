use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evosampling::pipeline::{self, InputFormat, Method, PipelineConfig};
use evosampling::Error;

#[derive(Parser)]
#[command(name = "evosampling", version, about = "Hybrid resampling for imbalanced binary data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resample a dataset and write it as CSV
    Resample(Common),
    /// Split, resample the training part and score kNN on the test part
    Evaluate(Common),
    /// Compare evolution with and without knowledge transfer
    Ablate(Common),
    /// Dump the granular balls covering a dataset
    GbInspect(Common),
}

#[derive(Args)]
struct Common {
    /// KEEL .dat or CSV input
    input: Option<PathBuf>,
    /// Flat TOML file with any configuration key
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output file (default: stdout)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Report file for `resample` (default: stderr)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Master seed; overrides the config file and EVOSAMPLING_SEED
    #[arg(short, long)]
    seed: Option<u64>,
    #[arg(short, long)]
    method: Option<String>,
    /// auto, keel or csv
    #[arg(long)]
    format: Option<String>,
    /// CSV label column name or index (default: last column)
    #[arg(long)]
    label_column: Option<String>,
    /// Min-max scale features first
    #[arg(long)]
    scale: bool,
    /// Worker threads for evolution (0 = all cores)
    #[arg(short, long)]
    workers: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    /// Granular-ball quality threshold
    #[arg(long)]
    threshold: Option<f64>,
    /// Disable knowledge transfer
    #[arg(long)]
    no_transfer: bool,
    /// Number of evaluation runs (seeds seed, seed+1, ...)
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    knn_k: Option<usize>,
    #[arg(long)]
    smote_k: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Repeat for more log output
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl Common {
    fn resolve(self) -> Result<PipelineConfig, Error> {
        let mut cfg = PipelineConfig::load(self.config.as_deref())?;
        if let Some(v) = self.input {
            cfg.input = v;
        }
        if let Some(v) = self.output {
            cfg.output = v;
        }
        if let Some(v) = self.report {
            cfg.report = v;
        }
        if let Some(v) = self.seed {
            cfg.run.master_seed = v;
        }
        if let Some(v) = self.method {
            cfg.method = v.parse::<Method>()?;
        }
        if let Some(v) = self.format {
            cfg.format = v.parse::<InputFormat>()?;
        }
        if let Some(v) = self.label_column {
            cfg.label_column = v;
        }
        cfg.scale |= self.scale;
        if let Some(v) = self.workers {
            cfg.run.workers = v;
        }
        if let Some(v) = self.generations {
            cfg.run.generations = v;
        }
        if let Some(v) = self.population {
            cfg.run.population_size_per_task = v;
        }
        if let Some(v) = self.threshold {
            cfg.run.gb_quality_threshold = v;
        }
        if self.no_transfer {
            cfg.run.transfer_enabled = false;
        }
        if let Some(v) = self.runs {
            cfg.runs = v;
        }
        if let Some(v) = self.knn_k {
            cfg.knn_k = v;
        }
        if let Some(v) = self.smote_k {
            cfg.smote_k = v;
        }
        if let Some(v) = self.train_fraction {
            cfg.train_fraction = v;
        }
        match self.verbose {
            0 => {}
            1 => cfg.verbosity = "info".into(),
            _ => cfg.verbosity = "debug".into(),
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (Common, fn(&PipelineConfig) -> Result<(), Error>) = match cli.command {
        Command::Resample(c) => (c, |cfg| pipeline::cmd_resample(cfg).map(drop)),
        Command::Evaluate(c) => (c, |cfg| pipeline::cmd_evaluate(cfg).map(drop)),
        Command::Ablate(c) => (c, |cfg| pipeline::cmd_ablate(cfg).map(drop)),
        Command::GbInspect(c) => (c, |cfg| pipeline::cmd_gb_inspect(cfg).map(drop)),
    };
    let result = common.resolve().and_then(|cfg| {
        env_logger::Builder::new().parse_filters(&cfg.verbosity).init();
        run(&cfg)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
