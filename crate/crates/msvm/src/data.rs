//! Dataset ingestion and the experimental preprocessing protocol:
//! numeric-CSV loading, ±1 label decoding, one-hot multiclass encoding,
//! per-column [−1, 1] normalization, seeded subsampling and seeded
//! k-fold splitting.
//!
//! All randomized operations are pure functions of (inputs, seed), driven
//! by the crate's fixed SplitMix64 generator, so fold assignments and
//! subsamples reproduce bit-for-bit across platforms.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, LabelMatrix};
use crate::rng::SplitMix64;

/// Whether the labels file holds one class id per row or m ±-tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Multiclass,
    Multilabel,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Multiclass => write!(f, "multiclass"),
            Task::Multilabel => write!(f, "multilabel"),
        }
    }
}

/// Parsed description of a dataset on disk.
///
/// The manifest file is flat `key=value` text (blank lines and `#`
/// comments allowed, unknown keys rejected) with keys `name`, `task`,
/// `features_path`, `labels_path` and optional `has_header` (default
/// false, applies to both files), `positive_token` (default "1") and
/// `negative_token` (default "0"). Relative paths resolve against the
/// manifest's directory.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub name: String,
    pub task: Task,
    pub features_path: PathBuf,
    pub labels_path: PathBuf,
    pub has_header: bool,
    pub positive_token: String,
    pub negative_token: String,
}

impl DatasetManifest {
    /// Reads and validates a manifest file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        let display = path.display().to_string();

        let mut name = None;
        let mut task = None;
        let mut features_path = None;
        let mut labels_path = None;
        let mut has_header = false;
        let mut positive_token = "1".to_string();
        let mut negative_token = "0".to_string();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Data {
                path: display.clone(),
                message: format!("line {}: expected key=value, got `{line}`", lineno + 1),
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "name" => name = Some(value.to_string()),
                "task" => {
                    task = Some(match value {
                        "multiclass" => Task::Multiclass,
                        "multilabel" => Task::Multilabel,
                        other => {
                            return Err(Error::Data {
                                path: display.clone(),
                                message: format!(
                                    "line {}: task must be multiclass or multilabel, got `{other}`",
                                    lineno + 1
                                ),
                            })
                        }
                    })
                }
                "features_path" => features_path = Some(dir.join(value)),
                "labels_path" => labels_path = Some(dir.join(value)),
                "has_header" => {
                    has_header = match value {
                        "true" | "1" => true,
                        "false" | "0" => false,
                        other => {
                            return Err(Error::Data {
                                path: display.clone(),
                                message: format!(
                                    "line {}: has_header must be true/false, got `{other}`",
                                    lineno + 1
                                ),
                            })
                        }
                    }
                }
                "positive_token" => positive_token = value.to_string(),
                "negative_token" => negative_token = value.to_string(),
                other => {
                    return Err(Error::Data {
                        path: display.clone(),
                        message: format!("line {}: unknown key `{other}`", lineno + 1),
                    })
                }
            }
        }

        let missing = |what: &str| Error::Data {
            path: display.clone(),
            message: format!("missing required key `{what}`"),
        };
        Ok(DatasetManifest {
            name: name.ok_or_else(|| missing("name"))?,
            task: task.ok_or_else(|| missing("task"))?,
            features_path: features_path.ok_or_else(|| missing("features_path"))?,
            labels_path: labels_path.ok_or_else(|| missing("labels_path"))?,
            has_header,
            positive_token,
            negative_token,
        })
    }
}

/// An in-memory dataset: features plus ±1 labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub task: Task,
    pub x: DenseMatrix,
    pub y: LabelMatrix,
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        self.x.rows()
    }

    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    pub fn n_labels(&self) -> usize {
        self.y.cols()
    }

    /// Row subset, in the given index order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            task: self.task,
            x: self.x.select_rows(indices),
            y: self.y.select_rows(indices),
        }
    }
}

/// Loads features and labels per the manifest and decodes labels to ±1.
pub fn load_dataset(manifest: &DatasetManifest) -> Result<Dataset> {
    let x = read_numeric_csv(&manifest.features_path, manifest.has_header)?;
    let labels_display = manifest.labels_path.display().to_string();

    let y = match manifest.task {
        Task::Multilabel => {
            let cells = read_token_csv(&manifest.labels_path, manifest.has_header)?;
            decode_multilabel_tokens(
                &cells,
                &manifest.positive_token,
                &manifest.negative_token,
                &labels_display,
            )?
        }
        Task::Multiclass => {
            let cells = read_token_csv(&manifest.labels_path, manifest.has_header)?;
            let ids = decode_class_ids(&cells, &labels_display)?;
            let m = ids.iter().copied().max().unwrap_or(0) + 1;
            encode_multiclass(&ids, m)?
        }
    };

    if x.rows() != y.rows() {
        return Err(Error::Data {
            path: labels_display,
            message: format!(
                "row count mismatch: {} feature rows vs {} label rows",
                x.rows(),
                y.rows()
            ),
        });
    }
    Ok(Dataset {
        name: manifest.name.clone(),
        task: manifest.task,
        x,
        y,
    })
}

/// One-hot ±1 encoding of class ids: row i has +1 at its class, −1
/// elsewhere. Ids must lie in [0, m).
pub fn encode_multiclass(class_ids: &[usize], m: usize) -> Result<LabelMatrix> {
    if class_ids.is_empty() || m == 0 {
        return Err(Error::Parameter {
            name: "class_ids",
            value: class_ids.len() as f64,
            requirement: "need at least one id and one class",
        });
    }
    let mut out = DenseMatrix::filled(class_ids.len(), m, -1.0);
    for (i, &id) in class_ids.iter().enumerate() {
        if id >= m {
            return Err(Error::Parameter {
                name: "class id",
                value: id as f64,
                requirement: "must be < the class count",
            });
        }
        out.set(i, id, 1.0);
    }
    LabelMatrix::from_dense(out)
}

/// Per-column min/max pairs used by the affine [−1, 1] normalization.
#[derive(Debug, Clone)]
pub struct ColumnRanges(Vec<(f64, f64)>);

/// Computes each column's (min, max) over the given matrix.
pub fn column_ranges(x: &DenseMatrix) -> ColumnRanges {
    let (n, d) = x.shape();
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    for i in 0..n {
        for (j, r) in ranges.iter_mut().enumerate() {
            let v = x.get(i, j);
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    }
    ColumnRanges(ranges)
}

/// Affine map of each column j through x′ = 2(x − min_j)/(max_j − min_j) − 1.
/// Columns with max == min map to all zero.
pub fn apply_normalization(x: &DenseMatrix, ranges: &ColumnRanges) -> DenseMatrix {
    let (n, d) = x.shape();
    assert_eq!(d, ranges.0.len(), "range count must match columns");
    let mut out = DenseMatrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            let (lo, hi) = ranges.0[j];
            let v = if hi > lo {
                2.0 * (x.get(i, j) - lo) / (hi - lo) - 1.0
            } else {
                0.0
            };
            out.set(i, j, v);
        }
    }
    out
}

/// Normalizes features to [−1, 1] column-wise using the matrix's own
/// ranges; the min and max of every non-constant column map exactly to
/// −1 and 1.
pub fn normalize_features(x: &DenseMatrix) -> DenseMatrix {
    apply_normalization(x, &column_ranges(x))
}

/// Uniform sample without replacement of `target` indices from
/// 0..n_total, deterministic in `seed`; identity when n_total ≤ target.
/// Returned indices are sorted ascending.
pub fn subsample(n_total: usize, target: usize, seed: u64) -> Vec<usize> {
    assert!(target >= 1, "subsample target must be >= 1");
    if n_total <= target {
        return (0..n_total).collect();
    }
    let mut indices: Vec<usize> = (0..n_total).collect();
    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut indices);
    indices.truncate(target);
    indices.sort_unstable();
    indices
}

/// Seeded permutation split into k test blocks of size ⌊n/k⌋ or ⌈n/k⌉
/// (the first n mod k blocks take the larger size); fold i tests on
/// block i and trains on the rest. Blocks are disjoint and exhaustive.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 || k > n {
        return Err(Error::Parameter {
            name: "k",
            value: k as f64,
            requirement: "need 2 <= k <= n",
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut perm);

    let base = n / k;
    let remainder = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < remainder);
        let test: Vec<usize> = perm[start..start + size].to_vec();
        let train: Vec<usize> = perm[..start]
            .iter()
            .chain(&perm[start + size..])
            .copied()
            .collect();
        folds.push((train, test));
        start += size;
    }
    Ok(folds)
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(|l| l.trim_end_matches('\r').to_string())
        .filter(|l| !l.trim().is_empty())
        .collect())
}

/// Parses a comma-delimited numeric CSV into a matrix. Cell errors carry
/// the 1-based file line and column.
pub fn read_numeric_csv(path: impl AsRef<Path>, has_header: bool) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let lines = read_lines(path)?;
    let data_lines: Vec<(usize, &String)> = lines
        .iter()
        .enumerate()
        .skip(usize::from(has_header))
        .collect();
    if data_lines.is_empty() {
        return Err(Error::Data {
            path: display,
            message: "no data rows".into(),
        });
    }

    let mut cols = None;
    let mut data = Vec::new();
    for (lineno, line) in &data_lines {
        let cells: Vec<&str> = line.split(',').collect();
        match cols {
            None => cols = Some(cells.len()),
            Some(c) if c != cells.len() => {
                return Err(Error::Data {
                    path: display,
                    message: format!(
                        "line {}: expected {c} columns, found {}",
                        lineno + 1,
                        cells.len()
                    ),
                })
            }
            _ => {}
        }
        for (colno, cell) in cells.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line: lineno + 1,
                column: colno + 1,
                message: format!("not a number: `{}`", cell.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    path: display.clone(),
                    line: lineno + 1,
                    column: colno + 1,
                    message: "non-finite value".into(),
                });
            }
            data.push(v);
        }
    }
    DenseMatrix::from_vec(data_lines.len(), cols.unwrap(), data)
}

/// Raw token grid of a CSV file, for label decoding.
fn read_token_csv(path: &Path, has_header: bool) -> Result<Vec<(usize, Vec<String>)>> {
    let lines = read_lines(path)?;
    let rows: Vec<(usize, Vec<String>)> = lines
        .iter()
        .enumerate()
        .skip(usize::from(has_header))
        .map(|(lineno, line)| {
            (
                lineno,
                line.split(',').map(|c| c.trim().to_string()).collect(),
            )
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::Data {
            path: path.display().to_string(),
            message: "no data rows".into(),
        });
    }
    Ok(rows)
}

fn decode_multilabel_tokens(
    rows: &[(usize, Vec<String>)],
    positive: &str,
    negative: &str,
    path: &str,
) -> Result<LabelMatrix> {
    let m = rows[0].1.len();
    let mut data = Vec::with_capacity(rows.len() * m);
    for (lineno, cells) in rows {
        if cells.len() != m {
            return Err(Error::Data {
                path: path.to_string(),
                message: format!(
                    "line {}: expected {m} label columns, found {}",
                    lineno + 1,
                    cells.len()
                ),
            });
        }
        for (colno, cell) in cells.iter().enumerate() {
            if cell == positive {
                data.push(1.0);
            } else if cell == negative {
                data.push(-1.0);
            } else {
                return Err(Error::Parse {
                    path: path.to_string(),
                    line: lineno + 1,
                    column: colno + 1,
                    message: format!(
                        "unknown label token `{cell}` (expected `{positive}` or `{negative}`)"
                    ),
                });
            }
        }
    }
    LabelMatrix::from_dense(DenseMatrix::from_vec(rows.len(), m, data)?)
}

fn decode_class_ids(rows: &[(usize, Vec<String>)], path: &str) -> Result<Vec<usize>> {
    let mut ids = Vec::with_capacity(rows.len());
    for (lineno, cells) in rows {
        if cells.len() != 1 {
            return Err(Error::Data {
                path: path.to_string(),
                message: format!(
                    "line {}: multiclass labels must have one column, found {}",
                    lineno + 1,
                    cells.len()
                ),
            });
        }
        let id: usize = cells[0].parse().map_err(|_| Error::Parse {
            path: path.to_string(),
            line: lineno + 1,
            column: 1,
            message: format!("not a non-negative class id: `{}`", cells[0]),
        })?;
        ids.push(id);
    }
    Ok(ids)
}
