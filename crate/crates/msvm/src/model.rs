//! Training and prediction for the matrix SVM, the Binary-Relevance
//! baseline trained with the same dual solver, and the closed-form linear
//! least-squares variant. Also the primal/KKT diagnostics and the model
//! file container.
//!
//! The matrix model solves one n×m dual and keeps A = α∘Y; prediction is
//! Z = K̄(X_test, X_train)·A. Binary Relevance solves m independent n×1
//! duals; by default it also recomputes the Gram matrix per column so the
//! reported fit time reflects fully independent binary training (a
//! shared-kernel ablation mode exists). The least-squares variant is the
//! linear primal min ½Tr(WᵀW) + c‖Y − XW‖²_F on the ones-augmented design
//! matrix, solved in closed form by a ridge-regularized normal equation.

use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::kernel::{augmented_gram, KernelSpec};
use crate::matrix::{DenseMatrix, LabelMatrix};
use crate::solver::{agd_solve, dual_objective, DualProblem, SolverOptions};

/// How the model was trained; decides the prediction path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// One joint dual solve over all label columns.
    Matrix,
    /// m independent per-column dual solves. `shared_kernel` records
    /// whether the Gram matrix was reused across columns (ablation) or
    /// recomputed per column (default).
    BinaryRelevance { shared_kernel: bool },
    /// Closed-form linear least squares on the augmented design matrix.
    LeastSquares,
}

impl ModelKind {
    fn is_hinge(self) -> bool {
        !matches!(self, ModelKind::LeastSquares)
    }
}

/// A fitted classifier. Immutable once constructed; cheap to share.
///
/// For the dual-trained kinds `coeff` is the n×m matrix α∘Y with entries
/// in [−c, c]; for the least-squares kind it is the (d+1)×m weight matrix
/// on the ones-augmented features.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    kernel: KernelSpec,
    kind: ModelKind,
    x_train: DenseMatrix,
    coeff: DenseMatrix,
    c: f64,
    fit_seconds: f64,
    solver_iterations: usize,
    converged: bool,
    condition_warning: Option<String>,
}

/// Hinge slacks and objective values of the primal problem.
#[derive(Debug, Clone)]
pub struct PrimalDiagnostics {
    pub primal_objective: f64,
    /// Q = max(0, E − Y∘Z) on the training data; nonnegative entrywise.
    pub slack_q: DenseMatrix,
    /// primal − (−dual); ≥ −1e-6 up to numerical slop, → 0 at optimality.
    pub duality_gap: f64,
}

/// Complementary-slackness violations, per multiplier category.
///
/// With β = cE − α, the optimality conditions are: interior multipliers
/// (0 < α < c, so β > 0) sit on the margin y·z = 1; α = 0 requires
/// y·z ≥ 1; α = c (β = 0) requires y·z ≤ 1.
#[derive(Debug, Clone)]
pub struct KktReport {
    pub interior_violations: usize,
    pub at_zero_violations: usize,
    pub at_upper_violations: usize,
    pub total_checked: usize,
    pub max_violation: f64,
}

impl KktReport {
    pub fn total_violations(&self) -> usize {
        self.interior_violations + self.at_zero_violations + self.at_upper_violations
    }

    pub fn violation_fraction(&self) -> f64 {
        self.total_violations() as f64 / self.total_checked as f64
    }
}

fn validate_fit_inputs(x: &DenseMatrix, y: &LabelMatrix, c: f64) -> Result<()> {
    if x.rows() != y.rows() {
        return Err(Error::dimension("fit labels", x.shape(), y.shape()));
    }
    if x.rows() < 2 {
        return Err(Error::Parameter {
            name: "n",
            value: x.rows() as f64,
            requirement: "need at least 2 training samples",
        });
    }
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::Parameter {
            name: "c",
            value: c,
            requirement: "trade-off must be finite and > 0",
        });
    }
    for j in 0..y.cols() {
        let mut pos = false;
        let mut neg = false;
        for i in 0..y.rows() {
            if y.get(i, j) > 0.0 {
                pos = true;
            } else {
                neg = true;
            }
        }
        if !(pos && neg) {
            return Err(Error::DegenerateLabelColumn { column: j });
        }
    }
    Ok(())
}

/// Trains the matrix SVM: builds K̄ once and solves the single n×m dual.
/// `fit_seconds` covers Gram construction plus the solve, nothing else.
pub fn fit_matrix_svm(
    x: &DenseMatrix,
    y: &LabelMatrix,
    kernel: KernelSpec,
    c: f64,
    opts: &SolverOptions,
) -> Result<TrainedModel> {
    validate_fit_inputs(x, y, c)?;
    let start = Instant::now();
    let kbar = augmented_gram(x, x, kernel)?;
    let prob = DualProblem::new(&kbar, y, c)?;
    let sol = agd_solve(&prob, opts)?;
    let fit_seconds = start.elapsed().as_secs_f64();
    let coeff = sol.alpha.hadamard(y.as_dense())?;
    Ok(TrainedModel {
        kernel,
        kind: ModelKind::Matrix,
        x_train: x.clone(),
        coeff,
        c,
        fit_seconds,
        solver_iterations: sol.iterations,
        converged: sol.converged,
        condition_warning: None,
    })
}

/// Trains the Binary-Relevance baseline: one n×1 dual per label column,
/// recomputing K̄ for every column (fully independent binary training).
pub fn fit_br_svm(
    x: &DenseMatrix,
    y: &LabelMatrix,
    kernel: KernelSpec,
    c: f64,
    opts: &SolverOptions,
) -> Result<TrainedModel> {
    fit_br_svm_with_mode(x, y, kernel, c, opts, false)
}

/// Binary Relevance with an explicit kernel mode. `shared_kernel = true`
/// computes K̄ once and reuses it across columns (ablation mode); reports
/// must state which mode produced a timing.
pub fn fit_br_svm_with_mode(
    x: &DenseMatrix,
    y: &LabelMatrix,
    kernel: KernelSpec,
    c: f64,
    opts: &SolverOptions,
    shared_kernel: bool,
) -> Result<TrainedModel> {
    validate_fit_inputs(x, y, c)?;
    let (n, m) = y.shape();
    let mut coeff = DenseMatrix::zeros(n, m);
    let mut fit_seconds = 0.0;
    let mut solver_iterations = 0;
    let mut converged = true;

    let mut shared = None;
    if shared_kernel {
        let start = Instant::now();
        shared = Some(augmented_gram(x, x, kernel)?);
        fit_seconds += start.elapsed().as_secs_f64();
    }

    for j in 0..m {
        let yj = y.column(j);
        let start = Instant::now();
        let kbar_owned;
        let kbar = match &shared {
            Some(k) => k,
            None => {
                kbar_owned = augmented_gram(x, x, kernel)?;
                &kbar_owned
            }
        };
        let prob = DualProblem::new(kbar, &yj, c)?;
        let sol = agd_solve(&prob, opts)?;
        fit_seconds += start.elapsed().as_secs_f64();
        solver_iterations += sol.iterations;
        converged &= sol.converged;
        for i in 0..n {
            coeff.set(i, j, sol.alpha.get(i, 0) * yj.get(i, 0));
        }
    }

    Ok(TrainedModel {
        kernel,
        kind: ModelKind::BinaryRelevance { shared_kernel },
        x_train: x.clone(),
        coeff,
        c,
        fit_seconds,
        solver_iterations,
        converged,
        condition_warning: None,
    })
}

/// Closed-form linear least-squares variant of the primal,
/// min ½Tr(WᵀW) + c‖Y − X′W‖²_F with X′ = [X | 1]:
/// W = (X′ᵀX′ + I/(2c))⁻¹ X′ᵀY via a symmetric positive-definite solve.
/// The ridge term makes the system nonsingular for any data; a condition
/// estimate above 1e12 is recorded as a warning, not an error.
pub fn fit_ls_matrix_svm(x: &DenseMatrix, y: &LabelMatrix, c: f64) -> Result<TrainedModel> {
    if x.rows() != y.rows() {
        return Err(Error::dimension("fit labels", x.shape(), y.shape()));
    }
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::Parameter {
            name: "c",
            value: c,
            requirement: "trade-off must be finite and > 0",
        });
    }
    let start = Instant::now();
    let xp = append_ones_column(x);
    let xpt = xp.transpose();
    let mut gram = xpt.matmul(&xp)?;
    let ridge = 1.0 / (2.0 * c);
    for i in 0..gram.rows() {
        gram.set(i, i, gram.get(i, i) + ridge);
    }
    let rhs = xpt.matmul(y.as_dense())?;
    let chol = cholesky(&gram)?;
    let w = cholesky_solve(&chol, &rhs);
    let fit_seconds = start.elapsed().as_secs_f64();

    let mut diag_max = f64::MIN;
    let mut diag_min = f64::MAX;
    for i in 0..chol.rows() {
        diag_max = diag_max.max(chol.get(i, i));
        diag_min = diag_min.min(chol.get(i, i));
    }
    let cond_estimate = (diag_max / diag_min).powi(2);
    let condition_warning = (cond_estimate > 1e12)
        .then(|| format!("normal-equation condition estimate {cond_estimate:.3e} exceeds 1e12"));

    Ok(TrainedModel {
        kernel: KernelSpec::Linear,
        kind: ModelKind::LeastSquares,
        x_train: x.clone(),
        coeff: w,
        c,
        fit_seconds,
        solver_iterations: 0,
        converged: true,
        condition_warning,
    })
}

/// Real-valued decision scores Z for a batch of test rows:
/// Z = K̄(X_test, X_train)·(α∘Y) for the dual kinds, Z = X′_test·W for
/// the least-squares kind.
pub fn decision_scores(model: &TrainedModel, x_test: &DenseMatrix) -> Result<DenseMatrix> {
    if x_test.cols() != model.x_train.cols() {
        return Err(Error::dimension(
            "decision_scores",
            x_test.shape(),
            model.x_train.shape(),
        ));
    }
    match model.kind {
        ModelKind::LeastSquares => append_ones_column(x_test).matmul(&model.coeff),
        _ => augmented_gram(x_test, &model.x_train, model.kernel)?.matmul(&model.coeff),
    }
}

/// Sign thresholding of scores; a score of exactly 0 predicts +1.
pub fn predict_multilabel(z: &DenseMatrix) -> LabelMatrix {
    let signs = z.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
    LabelMatrix::from_dense(signs).expect("signs are ±1 by construction")
}

/// Per-row argmax of scores, 0-based; ties go to the lowest index.
pub fn predict_multiclass(z: &DenseMatrix) -> Result<Vec<usize>> {
    if z.cols() < 2 {
        return Err(Error::Parameter {
            name: "m",
            value: z.cols() as f64,
            requirement: "multiclass prediction needs at least 2 score columns",
        });
    }
    Ok((0..z.rows())
        .map(|i| {
            let row = z.row(i);
            let mut best = 0;
            for (j, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect())
}

/// ±1 one-hot encoding of the per-row argmax, for metric parity with the
/// sign-based multilabel evaluation.
pub fn argmax_one_hot(z: &DenseMatrix) -> Result<LabelMatrix> {
    let classes = predict_multiclass(z)?;
    let mut out = DenseMatrix::filled(z.rows(), z.cols(), -1.0);
    for (i, &cls) in classes.iter().enumerate() {
        out.set(i, cls, 1.0);
    }
    LabelMatrix::from_dense(out)
}

/// Primal objective, hinge slacks, and the duality gap of a hinge-trained
/// model on its training data. The weight norm is evaluated in kernel
/// space: Tr(WᵀW) = Tr((α∘Y)ᵀK̄(α∘Y)), consistent with the virtual bias.
pub fn primal_diagnostics(
    model: &TrainedModel,
    x: &DenseMatrix,
    y: &LabelMatrix,
) -> Result<PrimalDiagnostics> {
    if !model.kind.is_hinge() {
        return Err(Error::Unsupported(
            "primal diagnostics require a hinge-trained model",
        ));
    }
    if y.shape() != (x.rows(), model.coeff.cols()) {
        return Err(Error::dimension("primal_diagnostics", x.shape(), y.shape()));
    }
    let z = decision_scores(model, x)?;
    let slack_q = y.as_dense().hadamard(&z)?.map(|yz| (1.0 - yz).max(0.0));

    let kbar = augmented_gram(x, x, model.kernel)?;
    let kcoeff = kbar.matmul(&model.coeff)?;
    let tr_wtw = model.coeff.trace_inner(&kcoeff)?;
    let primal_objective = 0.5 * tr_wtw + model.c * slack_q.sum();

    let alpha = model.coeff.hadamard(y.as_dense())?;
    let prob = DualProblem::new(&kbar, y, model.c)?;
    let dual = dual_objective(&alpha, &prob)?;
    let duality_gap = primal_objective + dual;

    Ok(PrimalDiagnostics {
        primal_objective,
        slack_q,
        duality_gap,
    })
}

/// Checks the complementary-slackness conditions at tolerance `kkt_tol`
/// on training data and counts violations per multiplier category.
pub fn kkt_report(
    model: &TrainedModel,
    x: &DenseMatrix,
    y: &LabelMatrix,
    kkt_tol: f64,
) -> Result<KktReport> {
    if !model.kind.is_hinge() {
        return Err(Error::Unsupported(
            "KKT report requires a hinge-trained model",
        ));
    }
    if y.shape() != (x.rows(), model.coeff.cols()) {
        return Err(Error::dimension("kkt_report", x.shape(), y.shape()));
    }
    let z = decision_scores(model, x)?;
    let mut report = KktReport {
        interior_violations: 0,
        at_zero_violations: 0,
        at_upper_violations: 0,
        total_checked: 0,
        max_violation: 0.0,
    };
    for i in 0..y.rows() {
        for j in 0..y.cols() {
            let alpha = model.coeff.get(i, j) * y.get(i, j);
            let margin = y.get(i, j) * z.get(i, j);
            report.total_checked += 1;
            // the projection clamps exactly, so bound comparisons are exact
            let excess = if alpha == 0.0 {
                let e = (1.0 - margin) - kkt_tol;
                if e > 0.0 {
                    report.at_zero_violations += 1;
                }
                e
            } else if alpha == model.c {
                let e = (margin - 1.0) - kkt_tol;
                if e > 0.0 {
                    report.at_upper_violations += 1;
                }
                e
            } else {
                let e = (margin - 1.0).abs() - kkt_tol;
                if e > 0.0 {
                    report.interior_violations += 1;
                }
                e
            };
            if excess > report.max_violation {
                report.max_violation = excess;
            }
        }
    }
    Ok(report)
}

impl TrainedModel {
    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn x_train(&self) -> &DenseMatrix {
        &self.x_train
    }

    /// α∘Y for dual kinds; W for the least-squares kind.
    pub fn coeff(&self) -> &DenseMatrix {
        &self.coeff
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn fit_seconds(&self) -> f64 {
        self.fit_seconds
    }

    pub fn solver_iterations(&self) -> usize {
        self.solver_iterations
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn condition_warning(&self) -> Option<&str> {
        self.condition_warning.as_deref()
    }

    /// Number of label columns this model scores.
    pub fn n_labels(&self) -> usize {
        self.coeff.cols()
    }

    /// Writes the model as a little-endian binary container. Raw f64 bits
    /// are preserved, so save → load → predict is bit-identical.
    pub fn save_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(b"MSVM")?;
        write_u32(&mut w, 1)?; // format version
        let kind = match self.kind {
            ModelKind::Matrix => 0u8,
            ModelKind::BinaryRelevance {
                shared_kernel: false,
            } => 1,
            ModelKind::BinaryRelevance {
                shared_kernel: true,
            } => 2,
            ModelKind::LeastSquares => 3,
        };
        w.write_all(&[kind])?;
        match self.kernel {
            KernelSpec::Linear => {
                w.write_all(&[0])?;
                write_f64(&mut w, 0.0)?;
            }
            KernelSpec::Rbf { p } => {
                w.write_all(&[1])?;
                write_f64(&mut w, p)?;
            }
        }
        write_f64(&mut w, self.c)?;
        write_f64(&mut w, self.fit_seconds)?;
        write_u64(&mut w, self.solver_iterations as u64)?;
        w.write_all(&[self.converged as u8])?;
        write_matrix(&mut w, &self.x_train)?;
        write_matrix(&mut w, &self.coeff)?;
        let warn = self.condition_warning.as_deref().unwrap_or("");
        write_u32(&mut w, warn.len() as u32)?;
        w.write_all(warn.as_bytes())?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.save_to(std::io::BufWriter::new(file))
    }

    pub fn load_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"MSVM" {
            return Err(Error::Model("bad magic bytes".into()));
        }
        let version = read_u32(&mut r)?;
        if version != 1 {
            return Err(Error::Model(format!(
                "unsupported format version {version}"
            )));
        }
        let kind = match read_u8(&mut r)? {
            0 => ModelKind::Matrix,
            1 => ModelKind::BinaryRelevance {
                shared_kernel: false,
            },
            2 => ModelKind::BinaryRelevance {
                shared_kernel: true,
            },
            3 => ModelKind::LeastSquares,
            k => return Err(Error::Model(format!("unknown model kind {k}"))),
        };
        let kernel = match read_u8(&mut r)? {
            0 => {
                read_f64(&mut r)?;
                KernelSpec::Linear
            }
            1 => KernelSpec::Rbf {
                p: read_f64(&mut r)?,
            },
            k => return Err(Error::Model(format!("unknown kernel kind {k}"))),
        };
        let c = read_f64(&mut r)?;
        let fit_seconds = read_f64(&mut r)?;
        let solver_iterations = read_u64(&mut r)? as usize;
        let converged = read_u8(&mut r)? != 0;
        let x_train = read_matrix(&mut r)?;
        let coeff = read_matrix(&mut r)?;
        let warn_len = read_u32(&mut r)? as usize;
        let condition_warning = if warn_len > 0 {
            let mut buf = vec![0u8; warn_len];
            r.read_exact(&mut buf)?;
            Some(String::from_utf8(buf).map_err(|_| Error::Model("bad warning text".into()))?)
        } else {
            None
        };
        Ok(TrainedModel {
            kernel,
            kind,
            x_train,
            coeff,
            c,
            fit_seconds,
            solver_iterations,
            converged,
            condition_warning,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::load_from(std::io::BufReader::new(file))
    }
}

fn append_ones_column(x: &DenseMatrix) -> DenseMatrix {
    let (n, d) = x.shape();
    let mut out = DenseMatrix::zeros(n, d + 1);
    for i in 0..n {
        for j in 0..d {
            out.set(i, j, x.get(i, j));
        }
        out.set(i, d, 1.0);
    }
    out
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite
/// matrix. The ridge term in the caller guarantees positive definiteness;
/// a non-positive pivot still maps to an error rather than NaN.
fn cholesky(g: &DenseMatrix) -> Result<DenseMatrix> {
    let n = g.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::Numeric {
                        what: "Cholesky pivot",
                        iteration: i,
                    });
                }
                l.set(i, j, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Solves (LLᵀ)X = B column by column.
fn cholesky_solve(l: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = l.rows();
    let m = b.cols();
    let mut x = DenseMatrix::zeros(n, m);
    for col in 0..m {
        let mut v = vec![0.0; n];
        // forward: L v = b
        for i in 0..n {
            let mut sum = b.get(i, col);
            for (k, &vk) in v.iter().enumerate().take(i) {
                sum -= l.get(i, k) * vk;
            }
            v[i] = sum / l.get(i, i);
        }
        // backward: Lᵀ w = v
        for i in (0..n).rev() {
            let mut sum = v[i];
            for k in (i + 1)..n {
                sum -= l.get(k, i) * x.get(k, col);
            }
            x.set(i, col, sum / l.get(i, i));
        }
    }
    x
}

fn write_u32(w: &mut impl Write, v: u32) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn write_u64(w: &mut impl Write, v: u64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn write_f64(w: &mut impl Write, v: f64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn write_matrix(w: &mut impl Write, m: &DenseMatrix) -> Result<()> {
    write_u64(w, m.rows() as u64)?;
    write_u64(w, m.cols() as u64)?;
    for &v in m.data() {
        write_f64(w, v)?;
    }
    Ok(())
}

fn read_u8(r: &mut impl Read) -> Result<u8> {
    let mut buf = [0u8; 1];
    r.read_exact(&mut buf)?;
    Ok(buf[0])
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

fn read_matrix(r: &mut impl Read) -> Result<DenseMatrix> {
    let rows = read_u64(r)? as usize;
    let cols = read_u64(r)? as usize;
    if rows == 0 || cols == 0 || rows.saturating_mul(cols) > (1 << 32) {
        return Err(Error::Model(format!(
            "implausible matrix shape {rows}x{cols}"
        )));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(read_f64(r)?);
    }
    DenseMatrix::from_vec(rows, cols, data)
}
