//! Evaluation metrics and split audits: average precision, per-cluster rank
//! correlation, leakage fractions over arbitrary splits, and the greedy
//! dissimilarity-packing diversity count.

use std::io::{Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::molio::Fingerprint;
use crate::simgraph::tanimoto_unchecked;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub id: String,
    pub truth: f64,
    pub score: f64,
    pub cluster: Option<u64>,
}

/// Prediction table consumed from `id,truth,score[,cluster]` CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTable {
    pub rows: Vec<PredictionRow>,
}

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("prediction table is empty")]
    EmptyTable,
    #[error("labels are degenerate: need at least one positive and one negative")]
    DegenerateLabels,
    #[error("truth values must be 0 or 1 in binary mode (row id '{0}')")]
    NonBinaryTruth(String),
    #[error("row id '{0}' has no cluster; cluster ids are required in lo mode")]
    MissingCluster(String),
    #[error("score is not finite (row id '{0}')")]
    BadScore(String),
    #[error("fingerprint width mismatch: {a} bits vs {b} bits")]
    WidthMismatch { a: u32, b: u32 },
    #[error("both split sides must be nonempty")]
    EmptySide,
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("duplicate id '{0}' in prediction table")]
    DuplicateId(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PredictionTable {
    pub fn read_csv(reader: impl Read) -> Result<PredictionTable, MetricError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = r
            .headers()
            .map_err(|e| MetricError::Csv {
                line: 1,
                message: e.to_string(),
            })?
            .clone();
        let cols: Vec<&str> = headers.iter().collect();
        let has_cluster = match cols.as_slice() {
            ["id", "truth", "score"] => false,
            ["id", "truth", "score", "cluster"] => true,
            _ => {
                return Err(MetricError::Csv {
                    line: 1,
                    message: format!(
                        "expected header 'id,truth,score[,cluster]', found '{}'",
                        cols.join(",")
                    ),
                })
            }
        };
        let mut rows = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for record in r.records() {
            let record = record.map_err(|e| MetricError::Csv {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let field = |i: usize| record.get(i).unwrap_or("");
            let id = field(0).to_string();
            if !seen.insert(id.clone()) {
                return Err(MetricError::DuplicateId(id));
            }
            let parse = |name: &str, raw: &str| -> Result<f64, MetricError> {
                raw.parse().map_err(|_| MetricError::Csv {
                    line,
                    message: format!("invalid {name} '{raw}'"),
                })
            };
            let truth = parse("truth", field(1))?;
            let score = parse("score", field(2))?;
            let cluster = if has_cluster {
                Some(field(3).parse().map_err(|_| MetricError::Csv {
                    line,
                    message: format!("invalid cluster '{}'", field(3)),
                })?)
            } else {
                None
            };
            rows.push(PredictionRow {
                id,
                truth,
                score,
                cluster,
            });
        }
        Ok(PredictionTable { rows })
    }
}

/// Average precision: descending-score sweep with tied scores entering as
/// one group, summing (recall step) x (precision after the group). No
/// interpolation, so constant scores collapse to the prevalence.
pub fn pr_auc(table: &PredictionTable) -> Result<f64, MetricError> {
    if table.rows.is_empty() {
        return Err(MetricError::EmptyTable);
    }
    let mut positives = 0u64;
    for row in &table.rows {
        if !row.score.is_finite() {
            return Err(MetricError::BadScore(row.id.clone()));
        }
        if row.truth == 1.0 {
            positives += 1;
        } else if row.truth != 0.0 {
            return Err(MetricError::NonBinaryTruth(row.id.clone()));
        }
    }
    let negatives = table.rows.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricError::DegenerateLabels);
    }

    let mut order: Vec<usize> = (0..table.rows.len()).collect();
    order.sort_by(|&a, &b| {
        table.rows[b]
            .score
            .partial_cmp(&table.rows[a].score)
            .expect("scores are finite")
    });

    let mut tp = 0u64;
    let mut seen = 0u64;
    let mut ap_numerator = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let mut group_tp = 0u64;
        while j < order.len() && table.rows[order[j]].score == table.rows[order[i]].score {
            if table.rows[order[j]].truth == 1.0 {
                group_tp += 1;
            }
            j += 1;
        }
        tp += group_tp;
        seen += (j - i) as u64;
        if group_tp > 0 {
            let precision = tp as f64 / seen as f64;
            ap_numerator += group_tp as f64 * precision;
        }
        i = j;
    }
    Ok(ap_numerator / positives as f64)
}

/// Fractional (average) ranks, 1-based; ties share their mean rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let mean_rank = (i + 1 + j) as f64 / 2.0; // mean of ranks i+1 ..= j
        for &idx in &order[i..j] {
            ranks[idx] = mean_rank;
        }
        i = j;
    }
    ranks
}

/// Spearman rank correlation with average-rank tie handling. A side with
/// zero rank variance (constant values, or a single point) scores 0.
pub fn spearman(truth: &[f64], predictions: &[f64]) -> f64 {
    assert_eq!(truth.len(), predictions.len());
    if truth.len() < 2 {
        return 0.0;
    }
    let rx = average_ranks(truth);
    let ry = average_ranks(predictions);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in rx.iter().zip(&ry) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rho within each cluster, arithmetic mean across clusters.
pub fn mean_cluster_spearman(table: &PredictionTable) -> Result<f64, MetricError> {
    if table.rows.is_empty() {
        return Err(MetricError::EmptyTable);
    }
    let mut clusters: std::collections::BTreeMap<u64, (Vec<f64>, Vec<f64>)> =
        std::collections::BTreeMap::new();
    for row in &table.rows {
        let Some(cluster) = row.cluster else {
            return Err(MetricError::MissingCluster(row.id.clone()));
        };
        if !row.score.is_finite() {
            return Err(MetricError::BadScore(row.id.clone()));
        }
        let entry = clusters.entry(cluster).or_default();
        entry.0.push(row.truth);
        entry.1.push(row.score);
    }
    let mut sum = 0.0;
    let count = clusters.len() as f64;
    for (truth, pred) in clusters.values() {
        sum += spearman(truth, pred);
    }
    Ok(sum / count)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: u64,
}

/// Leakage audit of an arbitrary split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub n_train: usize,
    pub n_test: usize,
    pub threshold: f64,
    /// Share of test molecules whose nearest training molecule is at or
    /// above the threshold.
    pub leakage_fraction: f64,
    pub n_leaked: usize,
    /// Nearest-train similarity per test molecule, in test order.
    pub nearest_similarity: Vec<f64>,
    pub histogram: Vec<HistogramBin>,
}

const HISTOGRAM_BIN_WIDTH: f64 = 0.05;
const HISTOGRAM_BINS: usize = 20;

/// Exact all-pairs audit: nearest-train similarity for every test molecule,
/// the leakage fraction at the threshold, and a fixed-bin histogram
/// (`[0, 0.05, ..., 1.0]`, top edge inclusive).
pub fn audit_split(
    train: &[Fingerprint],
    test: &[Fingerprint],
    threshold: f64,
) -> Result<AuditReport, MetricError> {
    if train.is_empty() || test.is_empty() {
        return Err(MetricError::EmptySide);
    }
    let width = train[0].nbits();
    for fp in train.iter().chain(test) {
        if fp.nbits() != width {
            return Err(MetricError::WidthMismatch {
                a: width,
                b: fp.nbits(),
            });
        }
    }
    let mut nearest = Vec::with_capacity(test.len());
    for t in test {
        let best = train
            .iter()
            .map(|s| tanimoto_unchecked(t, s))
            .fold(0.0f64, f64::max);
        nearest.push(best);
    }
    let n_leaked = nearest.iter().filter(|&&s| s >= threshold).count();
    // Edges via integer ratios so 0.15 serializes as 0.15, not 0.15000...2.
    let mut histogram: Vec<HistogramBin> = (0..HISTOGRAM_BINS)
        .map(|i| HistogramBin {
            bin_lo: i as f64 * 5.0 / 100.0,
            bin_hi: (i + 1) as f64 * 5.0 / 100.0,
            count: 0,
        })
        .collect();
    for &s in &nearest {
        let bin = ((s / HISTOGRAM_BIN_WIDTH) as usize).min(HISTOGRAM_BINS - 1);
        histogram[bin].count += 1;
    }
    Ok(AuditReport {
        n_train: train.len(),
        n_test: test.len(),
        threshold,
        leakage_fraction: n_leaked as f64 / test.len() as f64,
        n_leaked,
        nearest_similarity: nearest,
        histogram,
    })
}

impl AuditReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Histogram as `bin_lo,bin_hi,count` CSV.
    pub fn write_histogram_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "bin_lo,bin_hi,count")?;
        for bin in &self.histogram {
            writeln!(w, "{:.2},{:.2},{}", bin.bin_lo, bin.bin_hi, bin.count)?;
        }
        Ok(())
    }
}

/// Greedy dissimilarity packing: walk molecules in dataset order, keep each
/// one whose similarity to everything already kept is strictly below the
/// threshold. The count lower-bounds the maximum packing.
pub fn n_circles(fps: &[Fingerprint], threshold: f64) -> usize {
    assert!(threshold > 0.0 && threshold <= 1.0);
    let mut kept: Vec<&Fingerprint> = Vec::new();
    for fp in fps {
        if kept.iter().all(|k| tanimoto_unchecked(k, fp) < threshold) {
            kept.push(fp);
        }
    }
    kept.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricMode {
    Hi,
    Lo,
}

/// Constant-prediction baseline: the tie-grouped average precision of a
/// constant score is the prevalence, and constant predictions have rank
/// correlation 0 by convention.
pub fn dummy_baseline(table: &PredictionTable, mode: MetricMode) -> Result<f64, MetricError> {
    let constant = PredictionTable {
        rows: table
            .rows
            .iter()
            .map(|r| PredictionRow {
                score: 0.0,
                ..r.clone()
            })
            .collect(),
    };
    match mode {
        MetricMode::Hi => pr_auc(&constant),
        MetricMode::Lo => mean_cluster_spearman(&constant),
    }
}
