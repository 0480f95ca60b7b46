//! # msvm
//!
//! Kernel SVM for multiclass and multilabel classification that trains all
//! class hyperplanes in one matrix-form dual optimization, solved by
//! accelerated projected gradient descent. Ships a Binary-Relevance
//! baseline trained with the same solver, a closed-form linear
//! least-squares comparator, the standard multilabel evaluation measures,
//! CSV dataset ingestion with the experimental preprocessing protocol, and
//! a cross-validation benchmark harness.
//!
//! The training problem for n samples and m labels is a single
//! box-constrained quadratic program over an n×m multiplier matrix; its
//! columns are the duals of the m per-label binary SVMs, so the joint
//! solve and Binary Relevance agree up to solver tolerance while the joint
//! solve amortizes kernel construction and per-problem overhead.
//!
//! ```
//! use msvm::matrix::{DenseMatrix, LabelMatrix};
//! use msvm::model::{decision_scores, fit_matrix_svm, predict_multilabel};
//! use msvm::{KernelSpec, SolverOptions};
//!
//! // four points, two labels, one joint fit
//! let x = DenseMatrix::from_rows(&[&[1.0, 0.2], &[0.8, -0.1], &[-1.1, 0.0], &[-0.9, 0.3]])?;
//! let y = LabelMatrix::from_rows(&[&[1.0, -1.0], &[1.0, 1.0], &[-1.0, 1.0], &[-1.0, -1.0]])?;
//! let model = fit_matrix_svm(&x, &y, KernelSpec::Rbf { p: 0.5 }, 1.0, &SolverOptions::default())?;
//!
//! let scores = decision_scores(&model, &DenseMatrix::from_rows(&[&[1.0, 0.0]])?)?;
//! let labels = predict_multilabel(&scores);
//! assert_eq!(labels.get(0, 0), 1.0); // first label fires near the positive cluster
//! # Ok::<(), msvm::Error>(())
//! ```

pub mod bench;
pub mod data;
pub mod error;
pub mod kernel;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod solver;

mod rng;

pub use error::{Error, Result};
pub use kernel::KernelSpec;
pub use matrix::{DenseMatrix, LabelMatrix};
pub use model::TrainedModel;
pub use solver::{DualProblem, DualSolution, SolverOptions};
