//! Gram matrix computation for linear and RBF kernels, and the augmented
//! kernel K̄ = K + E that absorbs the bias term.
//!
//! The data matrix is conceptually augmented by a ones column, so its inner
//! products equal the raw-feature kernel plus one: K̄(X₁,X₂) = K(X₁,X₂) + E.
//! Kernels are therefore always evaluated on raw, un-augmented features and
//! the bias enters only through the +1.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Kernel choice. The RBF width `p` scales the squared Euclidean distance:
/// k(x₁,x₂) = exp(−p·‖x₁−x₂‖²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Linear,
    Rbf { p: f64 },
}

impl KernelSpec {
    fn validate(&self) -> Result<()> {
        if let KernelSpec::Rbf { p } = *self {
            if p <= 0.0 || !p.is_finite() {
                return Err(Error::Parameter {
                    name: "p",
                    value: p,
                    requirement: "RBF width must be finite and > 0",
                });
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Rbf { p } => write!(f, "rbf(p={p})"),
        }
    }
}

/// Gram matrix of two sample sets: `out[i][j] = k(x1ᵢ, x2ⱼ)`.
///
/// Linear: X₁X₂ᵀ. RBF: exp(−p·‖x1ᵢ−x2ⱼ‖²) with the squared distance
/// computed as ‖a‖² + ‖b‖² − 2a·b, clamped at zero before exponentiation.
pub fn gram(x1: &DenseMatrix, x2: &DenseMatrix, spec: KernelSpec) -> Result<DenseMatrix> {
    spec.validate()?;
    if x1.cols() != x2.cols() {
        return Err(Error::dimension("gram", x1.shape(), x2.shape()));
    }
    match spec {
        KernelSpec::Linear => x1.matmul(&x2.transpose()),
        KernelSpec::Rbf { p } => {
            let sq1 = row_square_norms(x1);
            let sq2 = row_square_norms(x2);
            let mut out = DenseMatrix::zeros(x1.rows(), x2.rows());
            for (i, &sq_a) in sq1.iter().enumerate() {
                let a = x1.row(i);
                for (j, &sq_b) in sq2.iter().enumerate() {
                    let b = x2.row(j);
                    let dot: f64 = a.iter().zip(b).map(|(&u, &v)| u * v).sum();
                    let dist = (sq_a + sq_b - 2.0 * dot).max(0.0);
                    out.set(i, j, (-p * dist).exp());
                }
            }
            Ok(out)
        }
    }
}

/// Augmented Gram matrix K̄ = K + E (entrywise +1).
pub fn augmented_gram(x1: &DenseMatrix, x2: &DenseMatrix, spec: KernelSpec) -> Result<DenseMatrix> {
    Ok(gram(x1, x2, spec)?.map(|k| k + 1.0))
}

fn row_square_norms(x: &DenseMatrix) -> Vec<f64> {
    (0..x.rows())
        .map(|i| x.row(i).iter().map(|&v| v * v).sum())
        .collect()
}
