//! Dataset ingestion, fingerprints and activity preprocessing.

use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod activity;
pub mod morgan;
pub mod smiles;

pub use activity::{preprocess_activity, ActivityError, ActivityMode, RawActivity, Relation};
pub use morgan::morgan_fingerprint;
pub use smiles::{parse_smiles, MolecularGraph, SmilesError};

/// Fixed-width binary bit vector over substructure environments.
///
/// All fingerprints in one dataset share the same width; the popcount is
/// cached at construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    words: Vec<u64>,
    nbits: u32,
    popcount: u32,
}

impl Fingerprint {
    pub fn zeros(nbits: u32) -> Fingerprint {
        assert!(nbits > 0 && nbits % 64 == 0, "width must be a multiple of 64");
        Fingerprint {
            words: vec![0; (nbits / 64) as usize],
            nbits,
            popcount: 0,
        }
    }

    pub fn from_indices(nbits: u32, indices: impl IntoIterator<Item = u32>) -> Fingerprint {
        let mut fp = Fingerprint::zeros(nbits);
        for i in indices {
            fp.set(i);
        }
        fp
    }

    pub fn set(&mut self, bit: u32) {
        assert!(bit < self.nbits, "bit {bit} out of range {}", self.nbits);
        let word = &mut self.words[(bit / 64) as usize];
        let mask = 1u64 << (bit % 64);
        if *word & mask == 0 {
            *word |= mask;
            self.popcount += 1;
        }
    }

    pub fn get(&self, bit: u32) -> bool {
        assert!(bit < self.nbits);
        self.words[(bit / 64) as usize] & (1u64 << (bit % 64)) != 0
    }

    pub fn nbits(&self) -> u32 {
        self.nbits
    }

    /// Cached number of set bits.
    pub fn popcount(&self) -> u32 {
        self.popcount
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Lowercase hex of length `nbits / 4`. Hex digit `j` covers bits
    /// `4j..4j+3`, with bit `4j` in the digit's most significant position.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity((self.nbits / 4) as usize);
        for j in 0..(self.nbits / 4) {
            let mut nibble = 0u8;
            for k in 0..4 {
                if self.get(4 * j + k) {
                    nibble |= 1 << (3 - k);
                }
            }
            s.push(char::from_digit(u32::from(nibble), 16).unwrap());
        }
        s
    }

    /// Inverse of [`Fingerprint::to_hex`]. Uppercase digits are accepted.
    pub fn from_hex(hex: &str) -> Result<Fingerprint, String> {
        let n = hex.len();
        if n == 0 || n % 16 != 0 {
            return Err(format!(
                "fingerprint hex length {n} does not encode a multiple of 64 bits"
            ));
        }
        let nbits = (n * 4) as u32;
        let mut fp = Fingerprint::zeros(nbits);
        for (j, c) in hex.chars().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| format!("invalid hex digit '{c}' at position {j}"))?
                as u8;
            for k in 0..4 {
                if nibble & (1 << (3 - k)) != 0 {
                    fp.set((4 * j + k) as u32);
                }
            }
        }
        Ok(fp)
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({} bits, {} set)", self.nbits, self.popcount)
    }
}

/// How the fingerprints of a dataset were obtained; recorded in manifests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum FpSource {
    Computed { radius: u32, nbits: u32 },
    Precomputed { nbits: u32 },
}

impl FpSource {
    pub fn nbits(&self) -> u32 {
        match *self {
            FpSource::Computed { nbits, .. } | FpSource::Precomputed { nbits } => nbits,
        }
    }
}

/// Fingerprint generation settings for SMILES inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FingerprintConfig {
    pub radius: u32,
    pub nbits: u32,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        FingerprintConfig {
            radius: 2,
            nbits: 1024,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    SmilesCsv,
    FingerprintCsv,
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetFormat::SmilesCsv => write!(f, "smiles-csv"),
            DatasetFormat::FingerprintCsv => write!(f, "fingerprint-csv"),
        }
    }
}

/// Columns present in the source file; fold CSVs are written back with the
/// same schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetSchema {
    pub format: DatasetFormat,
    pub has_value: bool,
    pub has_label: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub smiles: Option<String>,
    pub fingerprint: Fingerprint,
    pub value: Option<f64>,
    pub label: Option<bool>,
}

/// A molecular dataset with one materialized fingerprint per record.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<Record>,
    pub schema: DatasetSchema,
    pub fp_source: FpSource,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn nbits(&self) -> u32 {
        self.fp_source.nbits()
    }

    pub fn fingerprints(&self) -> Vec<Fingerprint> {
        self.records.iter().map(|r| r.fingerprint.clone()).collect()
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("invalid header: {0}")]
    Header(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: {source}")]
    Smiles {
        line: u64,
        #[source]
        source: SmilesError,
    },
    #[error("duplicate id '{id}' at line {line}")]
    DuplicateId { id: String, line: u64 },
    #[error("mixed fingerprint widths: expected {expected} bits, found {found} bits at line {line}")]
    MixedWidth { expected: u32, found: u32, line: u64 },
}

fn row_err(line: u64, message: impl Into<String>) -> DataError {
    DataError::Row {
        line,
        message: message.into(),
    }
}

/// Load a dataset from `smiles-csv` (`id,smiles[,value][,label]`) or
/// `fingerprint-csv` (`id,fp[,value][,label]`, lowercase hex of length
/// `nbits/4`). SMILES inputs get Morgan fingerprints per `config`;
/// fingerprint inputs are ingested verbatim for exact interop with
/// externally computed bit vectors.
pub fn load_dataset(
    path: impl AsRef<Path>,
    format: DatasetFormat,
    config: &FingerprintConfig,
) -> Result<Dataset, DataError> {
    let file = File::open(path.as_ref())?;
    read_dataset(BufReader::new(file), format, config)
}

pub fn read_dataset(
    reader: impl Read,
    format: DatasetFormat,
    config: &FingerprintConfig,
) -> Result<Dataset, DataError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| DataError::Header(e.to_string()))?
        .clone();
    let schema = parse_header(&headers, format)?;

    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut width: Option<u32> = None;
    for row in csv_reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            row_err(line, e.to_string())
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let id = row.get(0).unwrap_or("").to_string();
        if id.is_empty() {
            return Err(row_err(line, "empty id"));
        }
        if !seen.insert(id.clone()) {
            return Err(DataError::DuplicateId { id, line });
        }
        let (smiles, fingerprint) = match format {
            DatasetFormat::SmilesCsv => {
                let smi = row.get(1).unwrap_or("");
                let mol = parse_smiles(smi).map_err(|source| DataError::Smiles { line, source })?;
                (
                    Some(smi.to_string()),
                    morgan_fingerprint(&mol, config.radius, config.nbits),
                )
            }
            DatasetFormat::FingerprintCsv => {
                let hex = row.get(1).unwrap_or("");
                let fp = Fingerprint::from_hex(hex).map_err(|m| row_err(line, m))?;
                match width {
                    None => width = Some(fp.nbits()),
                    Some(expected) if expected != fp.nbits() => {
                        return Err(DataError::MixedWidth {
                            expected,
                            found: fp.nbits(),
                            line,
                        })
                    }
                    _ => {}
                }
                (None, fp)
            }
        };
        let mut col = 2;
        let value = if schema.has_value {
            let raw = row.get(col).unwrap_or("");
            col += 1;
            let v: f64 = raw
                .parse()
                .map_err(|_| row_err(line, format!("invalid value '{raw}'")))?;
            if !v.is_finite() {
                return Err(row_err(line, format!("non-finite value '{raw}'")));
            }
            Some(v)
        } else {
            None
        };
        let label = if schema.has_label {
            let raw = row.get(col).unwrap_or("");
            match raw {
                "0" => Some(false),
                "1" => Some(true),
                _ => return Err(row_err(line, format!("invalid label '{raw}' (expected 0 or 1)"))),
            }
        } else {
            None
        };
        records.push(Record {
            id,
            smiles,
            fingerprint,
            value,
            label,
        });
    }

    let fp_source = match format {
        DatasetFormat::SmilesCsv => FpSource::Computed {
            radius: config.radius,
            nbits: config.nbits,
        },
        DatasetFormat::FingerprintCsv => FpSource::Precomputed {
            nbits: width.unwrap_or(config.nbits),
        },
    };
    Ok(Dataset {
        records,
        schema,
        fp_source,
    })
}

fn parse_header(headers: &csv::StringRecord, format: DatasetFormat) -> Result<DatasetSchema, DataError> {
    let second = match format {
        DatasetFormat::SmilesCsv => "smiles",
        DatasetFormat::FingerprintCsv => "fp",
    };
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 2 || cols[0] != "id" || cols[1] != second {
        return Err(DataError::Header(format!(
            "expected 'id,{second}[,value][,label]', found '{}'",
            cols.join(",")
        )));
    }
    let mut has_value = false;
    let mut has_label = false;
    match &cols[2..] {
        [] => {}
        ["value"] => has_value = true,
        ["label"] => has_label = true,
        ["value", "label"] => {
            has_value = true;
            has_label = true;
        }
        rest => {
            return Err(DataError::Header(format!(
                "unexpected trailing columns '{}'",
                rest.join(",")
            )))
        }
    }
    Ok(DatasetSchema {
        format,
        has_value,
        has_label,
    })
}

/// Write `indices` of the dataset back out under its own schema. Passing a
/// cluster lookup appends a `cluster` column (used by the Lo test folds).
pub fn write_subset_csv(
    ds: &Dataset,
    indices: &[usize],
    cluster_of: Option<&dyn Fn(usize) -> Option<usize>>,
    writer: impl Write,
) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(BufWriter::new(writer));
    let mut header: Vec<&str> = vec!["id"];
    header.push(match ds.schema.format {
        DatasetFormat::SmilesCsv => "smiles",
        DatasetFormat::FingerprintCsv => "fp",
    });
    if ds.schema.has_value {
        header.push("value");
    }
    if ds.schema.has_label {
        header.push("label");
    }
    if cluster_of.is_some() {
        header.push("cluster");
    }
    w.write_record(&header).map_err(csv_io)?;
    for &i in indices {
        let r = &ds.records[i];
        let mut row: Vec<String> = vec![r.id.clone()];
        row.push(match ds.schema.format {
            DatasetFormat::SmilesCsv => r.smiles.clone().unwrap_or_default(),
            DatasetFormat::FingerprintCsv => r.fingerprint.to_hex(),
        });
        if ds.schema.has_value {
            row.push(format_float(r.value.expect("schema has value")));
        }
        if ds.schema.has_label {
            row.push(if r.label.expect("schema has label") { "1" } else { "0" }.to_string());
        }
        if let Some(lookup) = cluster_of {
            row.push(lookup(i).map(|c| c.to_string()).unwrap_or_default());
        }
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> DataError {
    DataError::Row {
        line: 0,
        message: e.to_string(),
    }
}

/// Shortest round-trip float formatting; keeps CSV output byte-stable.
pub(crate) fn format_float(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}
