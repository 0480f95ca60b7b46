//! Cross-validated experiment runner and report emitter.
//!
//! An experiment loads a dataset, optionally subsamples it (once, before
//! the folds), normalizes features to [−1, 1] (globally by default, with
//! a per-fold mode behind a flag), runs seeded k-fold cross-validation,
//! times each fit with a monotonic clock, scores the held-out fold, and
//! aggregates the five metrics plus fit time as mean ± sample std.
//!
//! A warm-up fit runs and is discarded before the fold loop so one-time
//! allocation effects stay out of the timing column. Timing columns are
//! only meaningful in sequential mode; the report records which mode ran.
//!
//! Defaults mirror the benchmark protocol: c = 1, 10 folds, subsample cap
//! 4000, and an RBF width of 0.7 for multiclass manifests and 0.3 for
//! multilabel manifests when `gamma` is not set.

use std::path::{Path, PathBuf};

use crate::data::{
    apply_normalization, column_ranges, kfold_split, load_dataset, normalize_features, subsample,
    Dataset, DatasetManifest, Task,
};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::matrix::{DenseMatrix, LabelMatrix};
use crate::metrics::MetricReport;
use crate::model::{
    decision_scores, fit_br_svm_with_mode, fit_ls_matrix_svm, fit_matrix_svm, predict_multiclass,
    predict_multilabel, TrainedModel,
};
use crate::solver::SolverOptions;

/// Which trainer the experiment benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Matrix,
    BinaryRelevance,
    LeastSquares,
}

impl std::fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelChoice::Matrix => write!(f, "matrix"),
            ModelChoice::BinaryRelevance => write!(f, "br"),
            ModelChoice::LeastSquares => write!(f, "ls"),
        }
    }
}

/// Kernel selector; the width comes from `ExperimentConfig::gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    Linear,
    Rbf,
}

impl std::fmt::Display for KernelChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelChoice::Linear => write!(f, "linear"),
            KernelChoice::Rbf => write!(f, "rbf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

/// Full experiment description; also echoed into every report.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub manifest_path: PathBuf,
    pub model: ModelChoice,
    pub kernel: KernelChoice,
    /// RBF width; defaults per task when unset. Must be unset for linear.
    pub gamma: Option<f64>,
    pub c: f64,
    pub folds: usize,
    pub seed: u64,
    /// Subsample cap applied once before cross-validation.
    pub subsample: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Drop single-class label columns per fold instead of erroring.
    pub drop_degenerate: bool,
    /// Compute normalization ranges per training fold instead of globally.
    pub per_fold_normalize: bool,
    /// Reuse one Gram matrix across BR columns (ablation mode).
    pub br_shared_kernel: bool,
    pub parallel_folds: bool,
}

impl ExperimentConfig {
    /// Config with the protocol defaults; `gamma` resolves per task.
    pub fn new(
        manifest_path: impl Into<PathBuf>,
        model: ModelChoice,
        kernel: KernelChoice,
    ) -> Self {
        ExperimentConfig {
            manifest_path: manifest_path.into(),
            model,
            kernel,
            gamma: None,
            c: 1.0,
            folds: 10,
            seed: 7,
            subsample: 4000,
            tol: SolverOptions::default().tol,
            max_iter: SolverOptions::default().max_iter,
            drop_degenerate: false,
            per_fold_normalize: false,
            br_shared_kernel: false,
            parallel_folds: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Config(format!(
                "folds must be >= 2, got {}",
                self.folds
            )));
        }
        if self.c <= 0.0 || self.c.is_nan() {
            return Err(Error::Config(format!("c must be > 0, got {}", self.c)));
        }
        if self.subsample < 1 {
            return Err(Error::Config("subsample must be >= 1".into()));
        }
        if self.tol <= 0.0 || self.tol.is_nan() || self.max_iter == 0 {
            return Err(Error::Config(format!(
                "invalid solver options: tol={}, max_iter={}",
                self.tol, self.max_iter
            )));
        }
        match self.kernel {
            KernelChoice::Linear => {
                if self.gamma.is_some() {
                    return Err(Error::Config(
                        "gamma is only valid with the rbf kernel".into(),
                    ));
                }
            }
            KernelChoice::Rbf => {
                if let Some(g) = self.gamma {
                    if g <= 0.0 || g.is_nan() {
                        return Err(Error::Config(format!("gamma must be > 0, got {g}")));
                    }
                }
                if self.model == ModelChoice::LeastSquares {
                    return Err(Error::Config(
                        "the ls model is linear-only; use --kernel linear".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The kernel actually used, with the per-task default width.
    fn resolve_kernel(&self, task: Task) -> KernelSpec {
        match self.kernel {
            KernelChoice::Linear => KernelSpec::Linear,
            KernelChoice::Rbf => KernelSpec::Rbf {
                p: self.gamma.unwrap_or(match task {
                    Task::Multiclass => 0.7,
                    Task::Multilabel => 0.3,
                }),
            },
        }
    }

    fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

/// One cross-validation fold's results.
#[derive(Debug, Clone)]
pub struct FoldRow {
    /// 1-based fold id.
    pub fold: usize,
    pub fit_seconds: f64,
    pub metrics: MetricReport,
    /// Only for multiclass tasks: accuracy of the argmax decision rule.
    pub argmax_accuracy: Option<f64>,
    pub converged: bool,
    /// Label columns dropped for this fold (train side single-class).
    pub dropped_columns: Vec<usize>,
}

/// Mean and sample standard deviation (n−1) of each reported column.
#[derive(Debug, Clone)]
pub struct Aggregate {
    pub fit_seconds: (f64, f64),
    pub exact_match: (f64, f64),
    pub hamming_loss: (f64, f64),
    pub macro_f1: (f64, f64),
    pub micro_f1: (f64, f64),
    pub avg_precision: (f64, f64),
    pub argmax_accuracy: Option<(f64, f64)>,
}

/// Everything a report file contains.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub dataset_name: String,
    pub task: Task,
    /// Rows actually used after subsampling.
    pub n_used: usize,
    pub n_features: usize,
    pub n_labels: usize,
    pub resolved_kernel: KernelSpec,
    pub folds: Vec<FoldRow>,
    pub aggregate: Aggregate,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn fit_model(
    choice: ModelChoice,
    x: &DenseMatrix,
    y: &LabelMatrix,
    kernel: KernelSpec,
    c: f64,
    opts: &SolverOptions,
    br_shared: bool,
) -> Result<TrainedModel> {
    match choice {
        ModelChoice::Matrix => fit_matrix_svm(x, y, kernel, c, opts),
        ModelChoice::BinaryRelevance => fit_br_svm_with_mode(x, y, kernel, c, opts, br_shared),
        ModelChoice::LeastSquares => fit_ls_matrix_svm(x, y, c),
    }
}

/// Splits degenerate (single-class) training columns from usable ones.
fn degenerate_columns(y: &LabelMatrix) -> (Vec<usize>, Vec<usize>) {
    let (n, m) = y.shape();
    let mut kept = Vec::with_capacity(m);
    let mut dropped = Vec::new();
    for j in 0..m {
        let mut pos = false;
        let mut neg = false;
        for i in 0..n {
            if y.get(i, j) > 0.0 {
                pos = true;
            } else {
                neg = true;
            }
        }
        if pos && neg {
            kept.push(j);
        } else {
            dropped.push(j);
        }
    }
    (kept, dropped)
}

fn run_fold(
    config: &ExperimentConfig,
    data: &Dataset,
    kernel: KernelSpec,
    opts: &SolverOptions,
    train_idx: &[usize],
    test_idx: &[usize],
) -> Result<FoldRow> {
    let mut x_train = data.x.select_rows(train_idx);
    let mut x_test = data.x.select_rows(test_idx);
    if config.per_fold_normalize {
        let ranges = column_ranges(&x_train);
        x_train = apply_normalization(&x_train, &ranges);
        x_test = apply_normalization(&x_test, &ranges);
    }
    let y_train = data.y.select_rows(train_idx);
    let y_test = data.y.select_rows(test_idx);
    let m = y_train.cols();

    let (kept, dropped) = degenerate_columns(&y_train);
    if kept.is_empty() {
        return Err(Error::Config(
            "every label column is single-class in this training fold".into(),
        ));
    }
    if !dropped.is_empty() && !config.drop_degenerate {
        return Err(Error::DegenerateLabelColumn { column: dropped[0] });
    }

    let y_fit = if dropped.is_empty() {
        y_train.clone()
    } else {
        y_train.select_cols(&kept)
    };
    let model = fit_model(
        config.model,
        &x_train,
        &y_fit,
        kernel,
        config.c,
        opts,
        config.br_shared_kernel,
    )?;
    let scores_kept = decision_scores(&model, &x_test)?;

    // Re-inflate dropped columns with the constant training sign so the
    // metrics run over the full label set.
    let scores = if dropped.is_empty() {
        scores_kept
    } else {
        let mut full = DenseMatrix::zeros(x_test.rows(), m);
        for (slot, &j) in kept.iter().enumerate() {
            for i in 0..x_test.rows() {
                full.set(i, j, scores_kept.get(i, slot));
            }
        }
        for &j in &dropped {
            let constant = y_train.get(0, j);
            for i in 0..x_test.rows() {
                full.set(i, j, constant);
            }
        }
        full
    };

    let y_pred = predict_multilabel(&scores);
    let metrics = MetricReport::compute(&y_test, &y_pred, &scores)?;
    let argmax_accuracy = if data.task == Task::Multiclass && m >= 2 {
        let classes = predict_multiclass(&scores)?;
        let correct = (0..y_test.rows())
            .filter(|&i| y_test.get(i, classes[i]) > 0.0)
            .count();
        Some(correct as f64 / y_test.rows() as f64)
    } else {
        None
    };

    Ok(FoldRow {
        fold: 0, // filled by the caller
        fit_seconds: model.fit_seconds(),
        metrics,
        argmax_accuracy,
        converged: model.converged(),
        dropped_columns: dropped,
    })
}

/// Runs the full protocol: load → subsample → normalize → k-fold loop
/// (fit, time, score, evaluate) → aggregate.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let manifest = DatasetManifest::from_file(&config.manifest_path)?;
    let mut data = load_dataset(&manifest)?;

    let keep = subsample(data.n_samples(), config.subsample, config.seed);
    if keep.len() < data.n_samples() {
        data = data.subset(&keep);
    }
    if !config.per_fold_normalize {
        data.x = normalize_features(&data.x);
    }

    let kernel = config.resolve_kernel(data.task);
    let opts = config.solver_options();
    // fold shuffling uses its own stream so it is independent of whether
    // subsampling consumed the seed
    let splits = kfold_split(data.n_samples(), config.folds, config.seed.wrapping_add(1))?;

    // warm-up fit, discarded: keeps one-time allocation out of the timings
    run_fold(config, &data, kernel, &opts, &splits[0].0, &splits[0].1)
        .map_err(|e| annotate_fold(e, 1))?;

    let mut folds: Vec<FoldRow> = if config.parallel_folds {
        let results: Vec<Result<FoldRow>> = std::thread::scope(|scope| {
            let handles: Vec<_> = splits
                .iter()
                .map(|(train, test)| {
                    let data = &data;
                    let opts = &opts;
                    scope.spawn(move || run_fold(config, data, kernel, opts, train, test))
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        results
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.map_err(|e| annotate_fold(e, i + 1)))
            .collect::<Result<_>>()?
    } else {
        let mut rows = Vec::with_capacity(splits.len());
        for (i, (train, test)) in splits.iter().enumerate() {
            rows.push(
                run_fold(config, &data, kernel, &opts, train, test)
                    .map_err(|e| annotate_fold(e, i + 1))?,
            );
        }
        rows
    };
    for (i, row) in folds.iter_mut().enumerate() {
        row.fold = i + 1;
    }

    let col = |f: &dyn Fn(&FoldRow) -> f64| -> Vec<f64> { folds.iter().map(f).collect() };
    let aggregate = Aggregate {
        fit_seconds: mean_std(&col(&|r| r.fit_seconds)),
        exact_match: mean_std(&col(&|r| r.metrics.exact_match)),
        hamming_loss: mean_std(&col(&|r| r.metrics.hamming_loss)),
        macro_f1: mean_std(&col(&|r| r.metrics.macro_f1)),
        micro_f1: mean_std(&col(&|r| r.metrics.micro_f1)),
        avg_precision: mean_std(&col(&|r| r.metrics.avg_precision)),
        argmax_accuracy: folds
            .iter()
            .all(|r| r.argmax_accuracy.is_some())
            .then(|| mean_std(&col(&|r| r.argmax_accuracy.unwrap()))),
    };

    Ok(ExperimentReport {
        config: config.clone(),
        dataset_name: data.name.clone(),
        task: data.task,
        n_used: data.n_samples(),
        n_features: data.n_features(),
        n_labels: data.n_labels(),
        resolved_kernel: kernel,
        folds,
        aggregate,
    })
}

fn annotate_fold(e: Error, fold: usize) -> Error {
    Error::Fold {
        fold,
        source: Box::new(e),
    }
}

/// Renders a report.
///
/// CSV: `#`-prefixed config stanza, a header row, one row per fold with
/// fields to 4 decimal places, then a single `aggregate` row holding a
/// (mean, std) pair for every column after `fold`. Markdown: the config
/// list, the per-fold table, and an aggregate table with one metric per
/// row rendered as `mean±std`.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => emit_csv(report),
        ReportFormat::Markdown => emit_markdown(report),
    }
}

/// Renders and writes a report file.
pub fn write_report(
    report: &ExperimentReport,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    Ok(std::fs::write(path, emit_report(report, format))?)
}

fn config_stanza_lines(report: &ExperimentReport) -> Vec<String> {
    let c = &report.config;
    let gamma = match report.resolved_kernel {
        KernelSpec::Linear => "n/a".to_string(),
        KernelSpec::Rbf { p } => format!("{p}"),
    };
    let dropped: Vec<String> = report
        .folds
        .iter()
        .map(|r| {
            if r.dropped_columns.is_empty() {
                "-".to_string()
            } else {
                r.dropped_columns
                    .iter()
                    .map(|j| j.to_string())
                    .collect::<Vec<_>>()
                    .join("+")
            }
        })
        .collect();
    let converged: Vec<String> = report
        .folds
        .iter()
        .map(|r| if r.converged { "1" } else { "0" }.to_string())
        .collect();
    vec![
        format!(
            "dataset={} task={} n={} d={} m={}",
            report.dataset_name, report.task, report.n_used, report.n_features, report.n_labels
        ),
        format!(
            "model={} kernel={} gamma={} c={} folds={} seed={} subsample={} tol={} max_iter={}",
            c.model, c.kernel, gamma, c.c, c.folds, c.seed, c.subsample, c.tol, c.max_iter
        ),
        format!(
            "normalization={} drop_degenerate={} br_kernel={} parallel_folds={}",
            if c.per_fold_normalize {
                "per-fold"
            } else {
                "global"
            },
            c.drop_degenerate,
            if c.br_shared_kernel {
                "shared"
            } else {
                "recomputed"
            },
            c.parallel_folds
        ),
        format!("fold_converged={}", converged.join(",")),
        format!("fold_dropped_columns={}", dropped.join(",")),
        "std=sample(n-1)".to_string(),
    ]
}

fn emit_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    for line in config_stanza_lines(report) {
        out.push_str("# ");
        out.push_str(&line);
        out.push('\n');
    }
    let multiclass = report.aggregate.argmax_accuracy.is_some();
    out.push_str("fold,fit_seconds,exact_match,hamming_loss,macro_f1,micro_f1,avg_precision");
    if multiclass {
        out.push_str(",argmax_accuracy");
    }
    out.push('\n');
    for row in &report.folds {
        let m = &row.metrics;
        out.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
            row.fold,
            row.fit_seconds,
            m.exact_match,
            m.hamming_loss,
            m.macro_f1,
            m.micro_f1,
            m.avg_precision
        ));
        if let Some(acc) = row.argmax_accuracy {
            out.push_str(&format!(",{acc:.4}"));
        }
        out.push('\n');
    }
    let a = &report.aggregate;
    let pair = |(mean, std): (f64, f64)| format!("{mean:.4},{std:.4}");
    out.push_str(&format!(
        "aggregate,{},{},{},{},{},{}",
        pair(a.fit_seconds),
        pair(a.exact_match),
        pair(a.hamming_loss),
        pair(a.macro_f1),
        pair(a.micro_f1),
        pair(a.avg_precision)
    ));
    if let Some(acc) = a.argmax_accuracy {
        out.push_str(&format!(",{}", pair(acc)));
    }
    out.push('\n');
    out
}

fn emit_markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# Experiment report: {}\n\n", report.dataset_name));
    for line in config_stanza_lines(report) {
        out.push_str(&format!("- {line}\n"));
    }
    out.push('\n');

    let multiclass = report.aggregate.argmax_accuracy.is_some();
    out.push_str(
        "| fold | fit_seconds | exact_match | hamming_loss | macro_f1 | micro_f1 | avg_precision |",
    );
    if multiclass {
        out.push_str(" argmax_accuracy |");
    }
    out.push('\n');
    out.push_str("|---:|---:|---:|---:|---:|---:|---:|");
    if multiclass {
        out.push_str("---:|");
    }
    out.push('\n');
    for row in &report.folds {
        let m = &row.metrics;
        out.push_str(&format!(
            "| {} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} |",
            row.fold,
            row.fit_seconds,
            m.exact_match,
            m.hamming_loss,
            m.macro_f1,
            m.micro_f1,
            m.avg_precision
        ));
        if let Some(acc) = row.argmax_accuracy {
            out.push_str(&format!(" {acc:.4} |"));
        }
        out.push('\n');
    }

    let a = &report.aggregate;
    let ms = |(mean, std): (f64, f64)| format!("{mean:.4}±{std:.4}");
    out.push_str("\n| metric | mean±std |\n|---|---:|\n");
    out.push_str(&format!("| Time (s) | {} |\n", ms(a.fit_seconds)));
    out.push_str(&format!("| ExactMatch | {} |\n", ms(a.exact_match)));
    out.push_str(&format!("| HammingLoss | {} |\n", ms(a.hamming_loss)));
    out.push_str(&format!("| MacroF1 | {} |\n", ms(a.macro_f1)));
    out.push_str(&format!("| MicroF1 | {} |\n", ms(a.micro_f1)));
    out.push_str(&format!("| AvgPrecision | {} |\n", ms(a.avg_precision)));
    if let Some(acc) = a.argmax_accuracy {
        out.push_str(&format!("| ArgmaxAccuracy | {} |\n", ms(acc)));
    }
    out
}
