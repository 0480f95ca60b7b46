//! Command-line experiment runner: cross-validated training, timing and
//! metric aggregation, report emission.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error,
//! 4 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use msvm::bench::{
    run_experiment, write_report, ExperimentConfig, KernelChoice, ModelChoice, ReportFormat,
};
use msvm::Error;

#[derive(Parser)]
#[command(name = "msvm", version, about = "Matrix-form SVM benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a cross-validated experiment and write a report file.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Dataset manifest (key=value file describing the CSV pair).
    #[arg(long)]
    manifest: PathBuf,

    /// Which trainer to benchmark.
    #[arg(long, value_enum)]
    model: ModelArg,

    /// Kernel family.
    #[arg(long, value_enum)]
    kernel: KernelArg,

    /// RBF width p; defaults to 0.7 for multiclass and 0.3 for multilabel
    /// manifests. Only valid with --kernel rbf.
    #[arg(long)]
    gamma: Option<f64>,

    /// Trade-off parameter (box bound of the dual).
    #[arg(long, default_value_t = 1.0)]
    c: f64,

    /// Cross-validation fold count.
    #[arg(long, default_value_t = 10)]
    folds: usize,

    /// Seed for subsampling and fold shuffling.
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Subsample cap applied once before cross-validation.
    #[arg(long, default_value_t = 4000)]
    subsample: usize,

    /// Solver stopping tolerance (relative Frobenius step change).
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,

    /// Solver iteration cap.
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,

    /// Run folds concurrently (timing columns are then not comparable).
    #[arg(long)]
    parallel_folds: bool,

    /// Drop single-class label columns per fold instead of aborting.
    #[arg(long)]
    drop_degenerate_labels: bool,

    /// Normalize per training fold instead of globally.
    #[arg(long)]
    per_fold_normalize: bool,

    /// Reuse one Gram matrix across BR columns (ablation mode).
    #[arg(long)]
    br_shared_kernel: bool,

    /// Report output path.
    #[arg(long)]
    out: PathBuf,

    /// Report format.
    #[arg(long, value_enum)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Matrix,
    Br,
    Ls,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Linear,
    Rbf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Md,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parameter { .. } | Error::Unsupported(_) => 2,
        Error::Numeric { .. } => 4,
        Error::Fold { source, .. } => exit_code_for(source),
        _ => 3,
    }
}

fn run(args: RunArgs) -> Result<(), Error> {
    let mut config = ExperimentConfig::new(
        args.manifest,
        match args.model {
            ModelArg::Matrix => ModelChoice::Matrix,
            ModelArg::Br => ModelChoice::BinaryRelevance,
            ModelArg::Ls => ModelChoice::LeastSquares,
        },
        match args.kernel {
            KernelArg::Linear => KernelChoice::Linear,
            KernelArg::Rbf => KernelChoice::Rbf,
        },
    );
    config.gamma = args.gamma;
    config.c = args.c;
    config.folds = args.folds;
    config.seed = args.seed;
    config.subsample = args.subsample;
    config.tol = args.tol;
    config.max_iter = args.max_iter;
    config.parallel_folds = args.parallel_folds;
    config.drop_degenerate = args.drop_degenerate_labels;
    config.per_fold_normalize = args.per_fold_normalize;
    config.br_shared_kernel = args.br_shared_kernel;

    let format = match args.format {
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Md => ReportFormat::Markdown,
    };

    let report = run_experiment(&config)?;
    write_report(&report, format, &args.out)?;

    let a = &report.aggregate;
    eprintln!(
        "{}: {} folds, fit {:.4}±{:.4}s, exact_match {:.4}, hamming_loss {:.4}, micro_f1 {:.4} -> {}",
        report.dataset_name,
        report.folds.len(),
        a.fit_seconds.0,
        a.fit_seconds.1,
        a.exact_match.0,
        a.hamming_loss.0,
        a.micro_f1.0,
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err}");
                let mut source = std::error::Error::source(&err);
                while let Some(s) = source {
                    eprintln!("  caused by: {s}");
                    source = s.source();
                }
                ExitCode::from(exit_code_for(&err))
            }
        },
    }
}
