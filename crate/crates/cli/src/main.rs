use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{CommandFactory, Parser, ValueEnum};
use tsispipe::classifiers::ClassifierKind;
use tsispipe::instance_selection::ISMethod;
use tsispipe::pipeline::{
    best_record, run_attribute_suite, run_classification, run_in_pool, run_suite,
    write_results_csv, DatasetPair, ExperimentGridSpec, ExperimentVariant, ResultRecord,
};
use tsispipe::DatasetDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    /// Plain classification baseline
    Cls,
    /// Attribute selection, then classification
    As,
    /// Instance selection, attribute selection, then classification
    Od,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Classifier {
    #[value(name = "RotF")]
    RotF,
    #[value(name = "DTW1NN")]
    Dtw1nn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Outlier {
    #[value(name = "Dist2kNN")]
    Dist2knn,
    #[value(name = "LDIS")]
    Ldis,
    #[value(name = "LKRR")]
    Lkrr,
}

/// Instance and attribute selection experiments for time-series classification.
#[derive(Debug, Parser)]
#[command(name = "tsispipe", version)]
struct Args {
    /// Directory holding <name>_TRAIN.csv and <name>_TEST.csv
    #[arg(
        short = 'i',
        long = "input",
        env = "TSISPIPE_DATA_DIR",
        default_value = "data"
    )]
    input: PathBuf,

    /// Dataset name
    #[arg(short = 'd', long = "dataset")]
    dataset: String,

    /// Experiment type
    #[arg(short = 'e', long = "experiment", value_enum)]
    experiment: Experiment,

    /// Classifier
    #[arg(short = 'c', long = "classifier", value_enum)]
    classifier: Classifier,

    /// Instance selector (required with `-e od`)
    #[arg(
        short = 'o',
        long = "outlier",
        value_enum,
        required_if_eq("experiment", "od")
    )]
    outlier: Option<Outlier>,

    /// Output directory for result CSVs
    #[arg(short = 'O', long = "output", default_value = "results")]
    output: PathBuf,

    /// Seed for the randomized components
    #[arg(long)]
    seed: Option<u64>,

    /// TOML file overriding the parameter grid
    #[arg(long)]
    grid: Option<PathBuf>,

    /// Worker threads (0 uses every core)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn load_grid(path: Option<&Path>) -> Result<ExperimentGridSpec> {
    let Some(path) = path else {
        return Ok(ExperimentGridSpec::default());
    };
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run(args: &Args) -> Result<()> {
    let mut spec = load_grid(args.grid.as_deref())?;
    if args.seed.is_some() {
        spec.seed = args.seed;
    }
    let classifier = match args.classifier {
        Classifier::RotF => ClassifierKind::RotationForest,
        Classifier::Dtw1nn => ClassifierKind::Dtw1nn,
    };
    let desc = DatasetDescriptor::new(&args.input, &args.dataset);
    let pair = DatasetPair::load(&desc).with_context(|| {
        format!(
            "loading dataset {} from {}",
            args.dataset,
            args.input.display()
        )
    })?;

    let (variant, stem, records): (_, _, Vec<ResultRecord>) = run_in_pool(args.jobs, || {
        Ok::<_, anyhow::Error>(match args.experiment {
            Experiment::Cls => (
                ExperimentVariant::Classification,
                format!("{}_cls_{}", args.dataset, classifier),
                vec![run_classification(
                    &pair,
                    classifier,
                    &spec.component_params(),
                )?],
            ),
            Experiment::As => (
                ExperimentVariant::AttributeSelection,
                format!("{}_as_{}", args.dataset, classifier),
                run_attribute_suite(&pair, classifier, &spec)?,
            ),
            Experiment::Od => {
                let method = match args.outlier.expect("enforced by the parser") {
                    Outlier::Dist2knn => ISMethod::Distance2kNN,
                    Outlier::Ldis => ISMethod::Ldis,
                    Outlier::Lkrr => ISMethod::Lkrr,
                };
                (
                    ExperimentVariant::InstanceSelection,
                    format!("{}_od_{}_{}", args.dataset, classifier, method.name()),
                    run_suite(&pair, classifier, method, &spec)?,
                )
            }
        })
    })??;

    std::fs::create_dir_all(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    let path = args.output.join(format!("{stem}.csv"));
    write_results_csv(variant, &records, &path)?;

    let failed = records.iter().filter(|r| r.error.is_some()).count();
    println!("wrote {} rows to {}", records.len(), path.display());
    if failed > 0 {
        eprintln!("{failed} experiments failed; see the error column");
    }
    if let Some(best) = best_record(&records) {
        println!("best tp_rate {:.6}", best.tp_rate().unwrap_or_default());
    }
    if failed == records.len() {
        anyhow::bail!("every experiment failed");
    }
    Ok(())
}

fn main() -> ExitCode {
    if std::env::args_os().len() <= 1 {
        Args::command().print_help().ok();
        println!();
        return ExitCode::SUCCESS;
    }
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
