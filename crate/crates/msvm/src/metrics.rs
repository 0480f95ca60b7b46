//! The five evaluation measures reported by the benchmark harness:
//! exact match, Hamming loss, macro-F1, micro-F1 and label-ranking
//! average precision.
//!
//! Conventions (positives are the +1 entries):
//! - exact match: fraction of rows whose whole prediction vector equals
//!   the truth (subset accuracy).
//! - Hamming loss: fraction of individual label slots that disagree.
//! - macro-F1: unweighted mean over labels of 2TP/(2TP+FP+FN); a label
//!   with TP = FP = FN = 0 contributes 0.
//! - micro-F1: the same F1 on globally pooled counts; 0/0 → 0.
//! - average precision: per row, labels are ranked by descending score
//!   (ties broken by ascending label index); each positive label λ
//!   contributes |{positives ranked ≤ rank(λ)}| / rank(λ); the row score
//!   is the mean over its positives, and rows without positives are
//!   skipped. Computing from real scores (not signs) keeps ranks
//!   informative.

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, LabelMatrix};

/// The five measures bundled, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub exact_match: f64,
    pub hamming_loss: f64,
    pub macro_f1: f64,
    pub micro_f1: f64,
    pub avg_precision: f64,
}

impl MetricReport {
    /// Computes all five measures; predictions for the set-valued
    /// metrics, real scores for the ranking metric.
    pub fn compute(
        y_true: &LabelMatrix,
        y_pred: &LabelMatrix,
        scores: &DenseMatrix,
    ) -> Result<Self> {
        Ok(MetricReport {
            exact_match: exact_match(y_true, y_pred)?,
            hamming_loss: hamming_loss(y_true, y_pred)?,
            macro_f1: macro_f1(y_true, y_pred)?,
            micro_f1: micro_f1(y_true, y_pred)?,
            avg_precision: average_precision(y_true, scores)?,
        })
    }
}

fn check_shapes(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Result<()> {
    if left != right {
        return Err(Error::dimension(op, left, right));
    }
    Ok(())
}

/// Fraction of rows where every entry matches (subset accuracy).
pub fn exact_match(y_true: &LabelMatrix, y_pred: &LabelMatrix) -> Result<f64> {
    check_shapes("exact_match", y_true.shape(), y_pred.shape())?;
    let (n, m) = y_true.shape();
    let exact = (0..n)
        .filter(|&i| (0..m).all(|j| y_true.get(i, j) == y_pred.get(i, j)))
        .count();
    Ok(exact as f64 / n as f64)
}

/// Fraction of label slots that disagree.
pub fn hamming_loss(y_true: &LabelMatrix, y_pred: &LabelMatrix) -> Result<f64> {
    check_shapes("hamming_loss", y_true.shape(), y_pred.shape())?;
    let (n, m) = y_true.shape();
    let wrong = y_true
        .as_dense()
        .data()
        .iter()
        .zip(y_pred.as_dense().data())
        .filter(|(a, b)| a != b)
        .count();
    Ok(wrong as f64 / (n * m) as f64)
}

fn f1_from_counts(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// Unweighted mean over labels of per-label F1.
pub fn macro_f1(y_true: &LabelMatrix, y_pred: &LabelMatrix) -> Result<f64> {
    check_shapes("macro_f1", y_true.shape(), y_pred.shape())?;
    let (n, m) = y_true.shape();
    let mut total = 0.0;
    for j in 0..m {
        let mut tp = 0;
        let mut fp = 0;
        let mut fn_ = 0;
        for i in 0..n {
            match (y_true.get(i, j) > 0.0, y_pred.get(i, j) > 0.0) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => {}
            }
        }
        total += f1_from_counts(tp, fp, fn_);
    }
    Ok(total / m as f64)
}

/// F1 on globally pooled true/false positive and false negative counts.
pub fn micro_f1(y_true: &LabelMatrix, y_pred: &LabelMatrix) -> Result<f64> {
    check_shapes("micro_f1", y_true.shape(), y_pred.shape())?;
    let (n, m) = y_true.shape();
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for i in 0..n {
        for j in 0..m {
            match (y_true.get(i, j) > 0.0, y_pred.get(i, j) > 0.0) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => {}
            }
        }
    }
    Ok(f1_from_counts(tp, fp, fn_))
}

/// Label-ranking average precision from real-valued scores. Rows with no
/// positive labels are skipped; if every row is skipped the metric is
/// undefined and an error is returned.
pub fn average_precision(y_true: &LabelMatrix, scores: &DenseMatrix) -> Result<f64> {
    check_shapes("average_precision", y_true.shape(), scores.shape())?;
    let (n, m) = y_true.shape();
    let mut row_sum = 0.0;
    let mut rows_counted = 0;
    let mut order: Vec<usize> = Vec::with_capacity(m);
    for i in 0..n {
        let positives: Vec<usize> = (0..m).filter(|&j| y_true.get(i, j) > 0.0).collect();
        if positives.is_empty() {
            continue;
        }
        order.clear();
        order.extend(0..m);
        let row = scores.row(i);
        order.sort_by(|&a, &b| {
            row[b]
                .partial_cmp(&row[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        // rank[j] = 1-based position of label j in the score ordering
        let mut rank = vec![0usize; m];
        for (pos, &j) in order.iter().enumerate() {
            rank[j] = pos + 1;
        }
        let mut ap = 0.0;
        for &lambda in &positives {
            let r = rank[lambda];
            let better = positives.iter().filter(|&&other| rank[other] <= r).count();
            ap += better as f64 / r as f64;
        }
        row_sum += ap / positives.len() as f64;
        rows_counted += 1;
    }
    if rows_counted == 0 {
        return Err(Error::UndefinedMetric(
            "average precision: no row has a positive label",
        ));
    }
    Ok(row_sum / rows_counted as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lm(rows: &[&[f64]]) -> LabelMatrix {
        LabelMatrix::from_rows(rows).unwrap()
    }

    fn dm(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn exact_match_cases() {
        let t = lm(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        assert_eq!(exact_match(&t, &t).unwrap(), 1.0);
        let p = lm(&[&[1.0, 1.0], &[-1.0, 1.0]]);
        assert_eq!(exact_match(&t, &p).unwrap(), 0.5);
        let flipped = lm(&[&[-1.0, 1.0], &[1.0, -1.0]]);
        assert_eq!(exact_match(&t, &flipped).unwrap(), 0.0);
    }

    #[test]
    fn hamming_loss_cases() {
        let t = lm(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        assert_eq!(hamming_loss(&t, &t).unwrap(), 0.0);
        let p = lm(&[&[1.0, 1.0], &[-1.0, 1.0]]);
        assert_eq!(hamming_loss(&t, &p).unwrap(), 0.25);
        let flipped = lm(&[&[-1.0, 1.0], &[1.0, -1.0]]);
        assert_eq!(hamming_loss(&t, &flipped).unwrap(), 1.0);
    }

    #[test]
    fn macro_f1_cases() {
        let t = lm(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        assert_eq!(macro_f1(&t, &t).unwrap(), 1.0);
        let p = lm(&[&[1.0, 1.0], &[-1.0, 1.0]]);
        assert!((macro_f1(&t, &p).unwrap() - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn macro_f1_empty_label_contributes_zero() {
        // label 1 perfect, label 2 empty in truth and prediction
        let t = lm(&[&[1.0, -1.0], &[1.0, -1.0]]);
        let p = lm(&[&[1.0, -1.0], &[1.0, -1.0]]);
        assert_eq!(macro_f1(&t, &p).unwrap(), 0.5);
    }

    #[test]
    fn micro_f1_cases() {
        let t = lm(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        assert_eq!(micro_f1(&t, &t).unwrap(), 1.0);
        let p = lm(&[&[1.0, 1.0], &[-1.0, 1.0]]);
        assert!((micro_f1(&t, &p).unwrap() - 0.8).abs() < 1e-15);
        let no_pos = lm(&[&[-1.0, -1.0]]);
        assert_eq!(micro_f1(&no_pos, &no_pos).unwrap(), 0.0);
    }

    #[test]
    fn average_precision_cases() {
        // perfect ranking: positives above negatives
        let t = lm(&[&[1.0, -1.0, 1.0]]);
        let s = dm(&[&[0.9, 0.1, 0.5]]);
        assert_eq!(average_precision(&t, &s).unwrap(), 1.0);

        // single positive ranked last of three
        let t2 = lm(&[&[-1.0, 1.0, -1.0]]);
        let s2 = dm(&[&[0.9, 0.1, 0.5]]);
        assert!((average_precision(&t2, &s2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn average_precision_skips_rows_without_positives() {
        let t = lm(&[&[-1.0, -1.0], &[1.0, -1.0]]);
        let s = dm(&[&[0.4, 0.6], &[0.9, 0.1]]);
        assert_eq!(average_precision(&t, &s).unwrap(), 1.0);

        let all_neg = lm(&[&[-1.0, -1.0]]);
        assert!(average_precision(&all_neg, &s.select_rows(&[0])).is_err());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let t = lm(&[&[1.0, -1.0]]);
        let p = lm(&[&[1.0], &[-1.0]]);
        assert!(exact_match(&t, &p).is_err());
        assert!(hamming_loss(&t, &p).is_err());
        assert!(macro_f1(&t, &p).is_err());
        assert!(micro_f1(&t, &p).is_err());
        assert!(average_precision(&t, &DenseMatrix::zeros(2, 1)).is_err());
    }

    prop_compose! {
        fn label_pair(max_n: usize, max_m: usize)
            (n in 1..max_n, m in 1..max_m)
            (t in prop::collection::vec(any::<bool>(), n * m),
             p in prop::collection::vec(any::<bool>(), n * m),
             n in Just(n), m in Just(m))
            -> (LabelMatrix, LabelMatrix)
        {
            let to_lm = |bits: Vec<bool>| LabelMatrix::from_dense(DenseMatrix::from_vec(
                n, m, bits.into_iter().map(|b| if b { 1.0 } else { -1.0 }).collect()
            ).unwrap()).unwrap();
            (to_lm(t), to_lm(p))
        }
    }

    proptest! {
        #[test]
        fn exact_match_one_iff_hamming_zero((t, p) in label_pair(8, 5)) {
            let em = exact_match(&t, &p).unwrap();
            let hl = hamming_loss(&t, &p).unwrap();
            prop_assert_eq!(em == 1.0, hl == 0.0);
        }

        #[test]
        fn hamming_of_flip_is_one((t, _) in label_pair(8, 5)) {
            let flipped = LabelMatrix::from_dense(t.as_dense().map(|v| -v)).unwrap();
            prop_assert_eq!(hamming_loss(&t, &flipped).unwrap(), 1.0);
        }

        #[test]
        fn macro_equals_micro_for_single_label((t, p) in label_pair(10, 2)) {
            prop_assume!(t.cols() == 1);
            let ma = macro_f1(&t, &p).unwrap();
            let mi = micro_f1(&t, &p).unwrap();
            prop_assert!((ma - mi).abs() < 1e-15);
        }

        #[test]
        fn metrics_are_row_permutation_invariant(
            (t, p) in label_pair(7, 4),
            seed in any::<u64>(),
        ) {
            let n = t.rows();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut rng = crate::rng::SplitMix64::new(seed);
            rng.shuffle(&mut perm);
            let scores = DenseMatrix::from_vec(
                n, t.cols(),
                (0..n * t.cols()).map(|_| rng.next_f64()).collect(),
            ).unwrap();

            let tp = t.select_rows(&perm);
            let pp = p.select_rows(&perm);
            let sp = scores.select_rows(&perm);

            prop_assert_eq!(exact_match(&t, &p).unwrap(), exact_match(&tp, &pp).unwrap());
            prop_assert_eq!(hamming_loss(&t, &p).unwrap(), hamming_loss(&tp, &pp).unwrap());
            prop_assert!((macro_f1(&t, &p).unwrap() - macro_f1(&tp, &pp).unwrap()).abs() < 1e-12);
            prop_assert!((micro_f1(&t, &p).unwrap() - micro_f1(&tp, &pp).unwrap()).abs() < 1e-12);
            let ap0 = average_precision(&t, &scores);
            let ap1 = average_precision(&tp, &sp);
            match (ap0, ap1) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "skip behavior changed under permutation"),
            }
        }

        #[test]
        fn average_precision_monotone_transform_invariant(
            (t, _) in label_pair(7, 4),
            seed in any::<u64>(),
        ) {
            let (n, m) = t.shape();
            let mut rng = crate::rng::SplitMix64::new(seed);
            let scores = DenseMatrix::from_vec(
                n, m, (0..n * m).map(|_| rng.next_f64() * 4.0 - 2.0).collect(),
            ).unwrap();
            let transformed = scores.map(|v| (3.0 * v).exp());
            let a = average_precision(&t, &scores);
            let b = average_precision(&t, &transformed);
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false),
            }
        }
    }
}
