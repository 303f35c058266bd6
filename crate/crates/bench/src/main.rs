use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oexnrule::data::LabelColumn;
use oexnrule::ensemble::SubspaceSize;
use oexnrule::neighbors::DistanceSpec;
use oexnrule_bench::catalog;
use oexnrule_bench::config::{DatasetSource, ExperimentConfig, Method, WORKERS_ENV};
use oexnrule_bench::report::{emit_boxplot_data, emit_report, ExperimentReport, Format};
use oexnrule_bench::{run_experiment, BenchError};

#[derive(Parser)]
#[command(
    name = "oexnrule",
    version,
    about = "Benchmark OExNRule against kNN and weighted kNN on repeated train/test splits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its report.
    Run(Box<RunArgs>),
    /// Re-render a saved report.json.
    Report {
        /// report.json written by `run`.
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "csv,json,markdown")]
        emit: Vec<Format>,
    },
    /// Write per-repeat values for box plots from a saved report.json.
    BoxplotData {
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV file to benchmark (repeatable); uses --label-column and
    /// --positive-label.
    #[arg(long = "dataset")]
    datasets: Vec<PathBuf>,
    #[arg(long, default_value = "class")]
    label_column: LabelColumn,
    #[arg(long, default_value = "1")]
    positive_label: String,
    /// Catalog datasets by letter or name, read from the data directory.
    #[arg(long, value_delimiter = ',')]
    catalog: Vec<String>,
    /// Directory with catalog CSV files [default: $OEXNRULE_DATA_DIR or ./data].
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    k_values: Option<Vec<usize>>,
    /// Base models built per ensemble.
    #[arg(long)]
    n_models: Option<usize>,
    #[arg(long)]
    select_fraction: Option<f64>,
    /// Feature subspace size, or "auto" for floor(sqrt(p)).
    #[arg(long)]
    subspace: Option<SubspaceSize>,
    /// Minkowski exponent (2 = Euclidean).
    #[arg(long)]
    distance: Option<f64>,
    /// Append one uniform noise column per feature.
    #[arg(long)]
    contrived: bool,
    /// Z-score features with training-part statistics.
    #[arg(long)]
    standardize: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "csv,json,markdown")]
    emit: Vec<Format>,
}

impl RunArgs {
    fn into_config(self) -> Result<ExperimentConfig, BenchError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        for path in self.datasets {
            cfg.datasets.push(DatasetSource {
                id: None,
                path,
                label_column: self.label_column.clone(),
                positive_label: self.positive_label.clone(),
            });
        }
        let dir = self.data_dir.unwrap_or_else(catalog::data_dir);
        for key in &self.catalog {
            let entry =
                catalog::lookup(key).ok_or_else(|| BenchError::Config(format!("unknown catalog dataset {key:?}")))?;
            cfg.datasets.push(DatasetSource {
                id: Some(entry.name.to_string()),
                path: entry.path_in(&dir),
                label_column: entry.label(),
                positive_label: entry.positive_label.to_string(),
            });
        }
        if let Some(v) = self.methods {
            cfg.methods = v;
        }
        if let Some(v) = self.repeats {
            cfg.repeats = v;
        }
        if let Some(v) = self.train_fraction {
            cfg.train_fraction = v;
        }
        if let Some(v) = self.k_values {
            cfg.k_values = v;
        }
        if let Some(v) = self.n_models {
            cfg.ensemble.n_models = v;
        }
        if let Some(v) = self.select_fraction {
            cfg.ensemble.select_fraction = v;
        }
        if let Some(v) = self.subspace {
            cfg.ensemble.subspace = v;
        }
        if let Some(v) = self.distance {
            cfg.distance = DistanceSpec::new(v).map_err(|e| BenchError::Config(e.to_string()))?;
        }
        cfg.contrived |= self.contrived;
        cfg.standardize |= self.standardize;
        if let Some(v) = self.seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), BenchError> {
    let written = match cli.command {
        Command::Run(args) => {
            let out = args.out.clone();
            let emit = args.emit.clone();
            let cfg = args.into_config()?;
            let report = run_experiment(&cfg)?;
            for f in &report.failures {
                eprintln!("warning: dataset {} skipped: {}", f.dataset, f.message);
            }
            let mut written = emit_report(&report, &emit, &out)?;
            written.extend(emit_boxplot_data(&report, &out)?);
            written
        }
        Command::Report { input, out, emit } => emit_report(&ExperimentReport::load(&input)?, &emit, &out)?,
        Command::BoxplotData { input, out } => emit_boxplot_data(&ExperimentReport::load(&input)?, &out)?,
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
