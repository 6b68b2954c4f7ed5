//! Command-line interface: dataset generation, training, prediction,
//! evaluation, direct evolutionary selection, and method comparison.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eusboost::dataset::{ClassLabel, Dataset};
use eusboost::ensembles::Model;
use eusboost::eus::{self, EusConfig, EusContext};
use eusboost::evaluation::{self, MethodConfig, MethodTag};
use eusboost::io::{load_csv, write_csv};
use eusboost::learners::WeakLearnerSpec;
use eusboost::metrics;
use eusboost::model::{dataset_fingerprint, load_model, save_model, ModelFile, MODEL_FORMAT_VERSION};
use eusboost::random::RandomSource;
use eusboost::report::{render, ReportFormat};
use eusboost::synth::{generate_synthetic, SyntheticSpec};
use eusboost::{Error, Result};

#[derive(Parser)]
#[command(name = "eusboost", version, about = "Ensemble methods for imbalanced binary classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct EusFlags {
    /// GA population size
    #[arg(long, default_value_t = 50)]
    population: usize,
    /// Balance penalty P
    #[arg(long, default_value_t = 0.2)]
    penalty: f64,
    /// Diversity weight lambda
    #[arg(long, default_value_t = 0.25)]
    diversity: f64,
    /// Crossover rate
    #[arg(long, default_value_t = 0.8)]
    crossover: f64,
    /// Per-bit mutation rate (default 1 / n_majority)
    #[arg(long)]
    mutation: Option<f64>,
    /// Fitness evaluation budget
    #[arg(long, default_value_t = 5000)]
    max_evals: usize,
}

impl EusFlags {
    fn to_config(&self) -> EusConfig {
        EusConfig {
            population: self.population,
            penalty: self.penalty,
            diversity_weight: self.diversity,
            crossover_rate: self.crossover,
            mutation_rate: self.mutation,
            max_evaluations: self.max_evals,
            elitism: 1,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic two-Gaussian dataset as CSV
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dims: usize,
        /// Imbalance ratio (majority / minority)
        #[arg(long)]
        ir: f64,
        /// Inter-mean distance in class standard deviations
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train an ensemble and save it as a model file
    Train {
        /// One of bgg, bst, unb, rbb, ovb, rub, eub
        #[arg(long, value_parser = parse_tag)]
        method: MethodTag,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label_col: String,
        /// Boosting iterations / bagging members
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        /// Weak learner tree depth (1 = stump)
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        eus: EusFlags,
    },
    /// Predict labels for a dataset; writes row_index,predicted_label,score CSV to stdout
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label_col: String,
    },
    /// Evaluate a model on a labeled dataset; prints the full metric block
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label_col: String,
    },
    /// Run evolutionary undersampling directly; prints the selected majority ids and fitness
    EusSelect {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label_col: String,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        eus: EusFlags,
    },
    /// Cross-validate several methods on one fold plan and print comparison tables
    Compare {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "label")]
        label_col: String,
        /// Comma-separated method tags (default: all seven)
        #[arg(long, value_delimiter = ',', value_parser = parse_tag,
              default_value = "bgg,bst,unb,rbb,ovb,rub,eub")]
        methods: Vec<MethodTag>,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 2)]
        repeats: usize,
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        seed: u64,
        /// text or csv
        #[arg(long, default_value = "text")]
        format: String,
        #[command(flatten)]
        eus: EusFlags,
    },
}

fn parse_tag(s: &str) -> std::result::Result<MethodTag, String> {
    s.parse().map_err(|_| format!("unknown method '{s}' (expected one of bgg, bst, unb, rbb, ovb, rub, eub)"))
}

fn learner_spec(depth: usize) -> WeakLearnerSpec {
    if depth <= 1 {
        WeakLearnerSpec::stump()
    } else {
        WeakLearnerSpec::tree(depth)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { n, dims, ir, delta, seed, out } => {
            let ds = generate_synthetic(&SyntheticSpec { n, dims, ir, delta, seed })?;
            write_csv(&ds, &out, "label")?;
            println!(
                "wrote {} instances ({} positive, {} negative) to {}",
                ds.n(),
                ds.count(ClassLabel::Positive),
                ds.count(ClassLabel::Negative),
                out.display()
            );
        }
        Command::Train { method: tag, data, label_col, rounds, depth, seed, out, eus } => {
            let ds = load_csv(&data, &label_col)?;
            let cfg = MethodConfig {
                tag,
                learner: learner_spec(depth),
                rounds,
                eus: eus.to_config(),
            };
            let src = RandomSource::new(seed);
            let model = evaluation::train_method(&cfg, &ds, &src)?;
            let file = ModelFile {
                version: MODEL_FORMAT_VERSION,
                method: tag,
                learner: cfg.learner,
                rounds,
                eus: (tag == MethodTag::Eub).then(|| cfg.eus.clone()),
                seed,
                positive_label: ds.positive_name().to_string(),
                negative_label: ds.negative_name().to_string(),
                dataset_fingerprint: dataset_fingerprint(&ds),
                model,
            };
            save_model(&file, &out)?;
            println!("trained {tag} on {} instances; model written to {}", ds.n(), out.display());
        }
        Command::Predict { model, data, label_col } => {
            let file = load_model(&model)?;
            let ds = load_csv(&data, &label_col)?;
            check_dim(&file, &ds)?;
            println!("row_index,predicted_label,score");
            for inst in ds.instances() {
                let (label, score) = file.model.predict(&inst.features)?;
                let name = match label {
                    ClassLabel::Positive => &file.positive_label,
                    ClassLabel::Negative => &file.negative_label,
                };
                println!("{},{},{}", inst.id, name, score);
            }
        }
        Command::Evaluate { model, data, label_col } => {
            let file = load_model(&model)?;
            let ds = load_csv(&data, &label_col)?;
            check_dim(&file, &ds)?;
            let mut predicted = Vec::with_capacity(ds.n());
            let mut actual = Vec::with_capacity(ds.n());
            for inst in ds.instances() {
                predicted.push(file.model.predict(&inst.features)?.0);
                let raw = ds.raw_name(inst.label);
                actual.push(if raw == file.positive_label {
                    ClassLabel::Positive
                } else if raw == file.negative_label {
                    ClassLabel::Negative
                } else {
                    return Err(Error::UnknownLabel(raw.to_string()));
                });
            }
            let cm = metrics::confusion_matrix(&predicted, &actual)?;
            let fmt = |r: Result<f64>| match r {
                Ok(v) => format!("{v}"),
                Err(_) => "n/a".to_string(),
            };
            println!("accuracy {}", fmt(metrics::accuracy(&cm)));
            println!("SEN {}", fmt(metrics::sensitivity(&cm)));
            println!("SPC {}", fmt(metrics::specificity(&cm)));
            println!("precision {}", fmt(metrics::precision(&cm)));
            println!("GM {}", fmt(metrics::geometric_mean(&cm)));
            println!("AUC {}", fmt(metrics::auc_single_point(&cm)));
            println!("F-measure {}", fmt(metrics::f_measure(&cm)));
        }
        Command::EusSelect { data, label_col, seed, eus: flags } => {
            let ds = load_csv(&data, &label_col)?;
            let cfg = flags.to_config();
            let ctx = EusContext::new(&ds);
            let mut rng = RandomSource::new(seed).stream("eus-select");
            let chrom = eus::evolve(&ctx, &cfg, &mut rng)?;
            let fitness = eus::fitness(&ctx, &chrom, &cfg);
            let (_, majority) = ds.partition_by_class();
            let selected: Vec<String> = majority
                .iter()
                .zip(&chrom.mask)
                .filter_map(|(&id, &sel)| sel.then(|| id.to_string()))
                .collect();
            println!("fitness: {fitness}");
            println!("selected_majority_ids: {}", selected.join(","));
        }
        Command::Compare { data, label_col, methods, folds, repeats, rounds, depth, seed, format, eus } => {
            let ds = load_csv(&data, &label_col)?;
            let format = match format.as_str() {
                "text" => ReportFormat::Text,
                "csv" => ReportFormat::Csv,
                other => return Err(Error::InvalidConfig(format!("unknown format '{other}'"))),
            };
            let configs: Vec<MethodConfig> = methods
                .into_iter()
                .map(|tag| MethodConfig {
                    tag,
                    learner: learner_spec(depth),
                    rounds,
                    eus: eus.to_config(),
                })
                .collect();
            let src = RandomSource::new(seed);
            let plan = evaluation::stratified_kfold(&ds, folds, repeats, &src.derive("plan"))?;
            let report = evaluation::compare(&configs, &ds, &plan, &src)?;
            print!("{}", render(&report, format));
        }
    }
    Ok(())
}

fn check_dim(file: &ModelFile, ds: &Dataset<f64>) -> Result<()> {
    let expected = match &file.model {
        Model::Boosted(_) | Model::Bagged(_) => file.model.dim(),
    };
    if ds.dim() != expected {
        return Err(Error::DimensionMismatch { row: 0, expected, got: ds.dim() });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
