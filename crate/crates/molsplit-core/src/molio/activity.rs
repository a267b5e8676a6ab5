//! Activity preprocessing: nM measurements to the negative log-molar scale,
//! binarization, and duplicate resolution.

use thiserror::Error;

use super::smiles::{parse_smiles, SmilesError};
use super::{
    morgan_fingerprint, Dataset, DatasetFormat, DatasetSchema, FingerprintConfig, FpSource, Record,
};

/// nM equivalent of 10 uM; inequality rows beyond it cannot be binarized.
const AMBIGUITY_CUTOFF_NM: f64 = 10_000.0;
/// Binary activity threshold on the log scale: label 1 iff pX > 6.
const BINARY_PX_THRESHOLD: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivityMode {
    /// Label 1 iff pX > 6; ambiguous inequality rows are discarded;
    /// duplicate SMILES groups with conflicting labels are discarded.
    Binary,
    /// Keep only `=` rows with 5 < pX < 9; duplicate SMILES groups with a
    /// pX range above 1.0 are discarded, the rest collapse to the median.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    Less,
    Greater,
}

impl Relation {
    pub fn parse(s: &str) -> Option<Relation> {
        match s {
            "=" => Some(Relation::Equal),
            "<" => Some(Relation::Less),
            ">" => Some(Relation::Greater),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawActivity {
    pub smiles: String,
    pub value_nm: f64,
    pub relation: Relation,
}

#[derive(Debug, Error)]
pub enum ActivityError {
    #[error("row {row}: non-positive activity value {value}")]
    NonPositiveValue { row: usize, value: f64 },
    #[error("no records survived preprocessing")]
    EmptyOutput,
    #[error("smiles '{smiles}': {source}")]
    Smiles {
        smiles: String,
        #[source]
        source: SmilesError,
    },
}

/// Negative log-molar activity: `pX = 9 - log10(value in nM)`.
pub fn pchembl(value_nm: f64) -> f64 {
    9.0 - value_nm.log10()
}

/// Convert raw nM measurements into a labeled dataset.
///
/// Record ids are the SMILES strings themselves (unique after grouping).
/// The recorded value is the group's median pX; in binary mode the label is
/// `pX > 6` for every surviving row, so value and label never contradict.
pub fn preprocess_activity(
    raw: &[RawActivity],
    mode: ActivityMode,
    config: &FingerprintConfig,
) -> Result<Dataset, ActivityError> {
    for (row, r) in raw.iter().enumerate() {
        if !(r.value_nm > 0.0) {
            return Err(ActivityError::NonPositiveValue {
                row,
                value: r.value_nm,
            });
        }
    }

    // Per-row filtering; groups keep first-appearance order.
    let mut order: Vec<String> = Vec::new();
    let mut groups: std::collections::HashMap<String, Vec<f64>> = std::collections::HashMap::new();
    for r in raw {
        let px = pchembl(r.value_nm);
        let keep = match mode {
            ActivityMode::Binary => match r.relation {
                Relation::Equal => true,
                Relation::Less => r.value_nm <= AMBIGUITY_CUTOFF_NM,
                Relation::Greater => r.value_nm >= AMBIGUITY_CUTOFF_NM,
            },
            ActivityMode::Continuous => {
                r.relation == Relation::Equal && px > 5.0 && px < 9.0
            }
        };
        if !keep {
            continue;
        }
        groups
            .entry(r.smiles.clone())
            .or_insert_with(|| {
                order.push(r.smiles.clone());
                Vec::new()
            })
            .push(px);
    }

    let mut records = Vec::new();
    for smiles in order {
        let pxs = &groups[&smiles];
        match mode {
            ActivityMode::Binary => {
                let labels: Vec<bool> = pxs.iter().map(|&px| px > BINARY_PX_THRESHOLD).collect();
                if labels.iter().any(|&l| l != labels[0]) {
                    continue; // conflicting binarized activities
                }
                records.push((smiles, median(pxs), Some(labels[0])));
            }
            ActivityMode::Continuous => {
                let min = pxs.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = pxs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if max - min > 1.0 {
                    continue;
                }
                records.push((smiles, median(pxs), None));
            }
        }
    }
    if records.is_empty() {
        return Err(ActivityError::EmptyOutput);
    }

    let has_label = mode == ActivityMode::Binary;
    let records = records
        .into_iter()
        .map(|(smiles, px, label)| {
            let mol = parse_smiles(&smiles).map_err(|source| ActivityError::Smiles {
                smiles: smiles.clone(),
                source,
            })?;
            Ok(Record {
                id: smiles.clone(),
                smiles: Some(smiles),
                fingerprint: morgan_fingerprint(&mol, config.radius, config.nbits),
                value: Some(px),
                label,
            })
        })
        .collect::<Result<Vec<_>, ActivityError>>()?;

    Ok(Dataset {
        records,
        schema: DatasetSchema {
            format: DatasetFormat::SmilesCsv,
            has_value: true,
            has_label,
        },
        fp_source: FpSource::Computed {
            radius: config.radius,
            nbits: config.nbits,
        },
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(smiles: &str, value_nm: f64, relation: Relation) -> RawActivity {
        RawActivity {
            smiles: smiles.to_string(),
            value_nm,
            relation,
        }
    }

    fn cfg() -> FingerprintConfig {
        FingerprintConfig::default()
    }

    #[test]
    fn boundary_px_six_is_inactive() {
        let ds = preprocess_activity(
            &[raw("CCO", 1000.0, Relation::Equal)],
            ActivityMode::Binary,
            &cfg(),
        )
        .unwrap();
        assert_eq!(ds.records[0].value, Some(6.0));
        assert_eq!(ds.records[0].label, Some(false));
    }

    #[test]
    fn px_seven_is_active() {
        let ds = preprocess_activity(
            &[raw("CCO", 100.0, Relation::Equal)],
            ActivityMode::Binary,
            &cfg(),
        )
        .unwrap();
        assert_eq!(ds.records[0].value, Some(7.0));
        assert_eq!(ds.records[0].label, Some(true));
    }

    #[test]
    fn continuous_duplicates_with_wide_range_are_discarded() {
        // pX 6.2 and 7.5: range 1.3 > 1.0, so the group goes away entirely.
        let rows = [
            raw("CCO", 10f64.powf(9.0 - 6.2), Relation::Equal),
            raw("CCO", 10f64.powf(9.0 - 7.5), Relation::Equal),
            raw("CCN", 100.0, Relation::Equal),
        ];
        let ds = preprocess_activity(&rows, ActivityMode::Continuous, &cfg()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.records[0].id, "CCN");
    }

    #[test]
    fn continuous_duplicates_collapse_to_median() {
        let rows = [
            raw("CCO", 10f64.powf(9.0 - 6.2), Relation::Equal),
            raw("CCO", 10f64.powf(9.0 - 6.8), Relation::Equal),
            raw("CCO", 10f64.powf(9.0 - 6.4), Relation::Equal),
        ];
        let ds = preprocess_activity(&rows, ActivityMode::Continuous, &cfg()).unwrap();
        assert_eq!(ds.len(), 1);
        let px = ds.records[0].value.unwrap();
        assert!((px - 6.4).abs() < 1e-9);
    }

    #[test]
    fn ambiguous_inequalities_are_discarded_in_binary_mode() {
        // "< with a value beyond 10 uM" and "> with a value under 10 uM"
        // cannot be binarized reliably.
        let rows = [
            raw("CCO", 50_000.0, Relation::Less),
            raw("CCN", 100.0, Relation::Greater),
            raw("CCC", 100.0, Relation::Less),
        ];
        let ds = preprocess_activity(&rows, ActivityMode::Binary, &cfg()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.records[0].id, "CCC");
        assert_eq!(ds.records[0].label, Some(true));
    }

    #[test]
    fn binary_conflicting_duplicates_are_discarded() {
        let rows = [
            raw("CCO", 100.0, Relation::Equal),  // pX 7 -> 1
            raw("CCO", 5000.0, Relation::Equal), // pX ~5.3 -> 0
            raw("CCN", 10.0, Relation::Equal),
        ];
        let ds = preprocess_activity(&rows, ActivityMode::Binary, &cfg()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.records[0].id, "CCN");
    }

    #[test]
    fn continuous_mode_keeps_only_equals_within_window() {
        let rows = [
            raw("CCO", 0.1, Relation::Equal),   // pX 10: outside window
            raw("CCN", 10_000.0, Relation::Equal), // pX 5: outside window (not strict)
            raw("CCC", 100.0, Relation::Less),  // inequality: dropped
            raw("CCCC", 100.0, Relation::Equal), // pX 7: kept
        ];
        let ds = preprocess_activity(&rows, ActivityMode::Continuous, &cfg()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.records[0].id, "CCCC");
        assert_eq!(ds.records[0].label, None);
    }

    #[test]
    fn non_positive_value_is_an_error() {
        match preprocess_activity(
            &[raw("CCO", 0.0, Relation::Equal)],
            ActivityMode::Binary,
            &cfg(),
        ) {
            Err(ActivityError::NonPositiveValue { row: 0, .. }) => {}
            other => panic!("expected non-positive error, got {other:?}"),
        }
    }

    #[test]
    fn empty_output_is_an_error() {
        match preprocess_activity(
            &[raw("CCO", 50_000.0, Relation::Less)],
            ActivityMode::Binary,
            &cfg(),
        ) {
            Err(ActivityError::EmptyOutput) => {}
            other => panic!("expected empty output error, got {other:?}"),
        }
    }

    #[test]
    fn binary_labels_never_contradict_px() {
        let rows: Vec<RawActivity> = (1..60)
            .map(|i| {
                let rel = match i % 3 {
                    0 => Relation::Equal,
                    1 => Relation::Less,
                    _ => Relation::Greater,
                };
                raw(
                    &format!("{}C", "C".repeat(i % 7 + 1)),
                    7.0 * f64::from(i as u32) * 37.0,
                    rel,
                )
            })
            .collect();
        if let Ok(ds) = preprocess_activity(&rows, ActivityMode::Binary, &cfg()) {
            for r in &ds.records {
                assert_eq!(r.label.unwrap(), r.value.unwrap() > 6.0);
            }
        }
    }
}
