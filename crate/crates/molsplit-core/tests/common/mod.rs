//! Shared generators for the integration and acceptance suites.

use molsplit_core::molio::{
    Dataset, DatasetFormat, DatasetSchema, Fingerprint, FpSource, Record,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub const SYNTH_NBITS: u32 = 512;

/// Synthetic dataset of planted similarity islands plus background noise.
///
/// Island members share a ~30-bit base pattern with a couple of flips, so
/// intra-island Tanimoto sits far above 0.4 while molecules from different
/// islands (and the sparse random noise) sit far below it. Values are
/// spread around a per-island center so many islands clear the Lo
/// value-spread floors.
pub fn synthetic_dataset(seed: u64, n: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n);
    while records.len() < n {
        let remaining = n - records.len();
        if rng.gen_bool(0.25) || remaining < 4 {
            // Noise molecule: sparse random pattern.
            let bits: Vec<u32> = (0..SYNTH_NBITS).filter(|_| rng.gen_bool(0.05)).collect();
            push_record(&mut records, bits, rng.gen_range(4.0..9.0));
        } else {
            let size = rng.gen_range(4..=25).min(remaining);
            let base: Vec<u32> = (0..SYNTH_NBITS).filter(|_| rng.gen_bool(0.06)).collect();
            let center_value = rng.gen_range(5.0..8.0);
            for _ in 0..size {
                let mut bits = base.clone();
                // Flip a couple of bits per member.
                for _ in 0..2 {
                    if !bits.is_empty() {
                        let drop = rng.gen_range(0..bits.len());
                        bits.swap_remove(drop);
                    }
                    bits.push(rng.gen_range(0..SYNTH_NBITS));
                }
                bits.sort_unstable();
                bits.dedup();
                push_record(&mut records, bits, center_value + rng.gen_range(-1.5..1.5));
            }
        }
    }
    Dataset {
        records,
        schema: DatasetSchema {
            format: DatasetFormat::FingerprintCsv,
            has_value: true,
            has_label: false,
        },
        fp_source: FpSource::Precomputed { nbits: SYNTH_NBITS },
    }
}

fn push_record(records: &mut Vec<Record>, bits: Vec<u32>, value: f64) {
    let id = format!("m{}", records.len());
    records.push(Record {
        id,
        smiles: None,
        fingerprint: Fingerprint::from_indices(SYNTH_NBITS, bits),
        value: Some(value),
        label: None,
    });
}

/// Random vertex-weighted graph for solver comparisons.
pub fn random_weighted_graph(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    edge_prob: f64,
    max_weight: u64,
) -> (Vec<u64>, Vec<(usize, usize)>) {
    let n = rng.gen_range(2..=max_n);
    let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_weight)).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    (weights, edges)
}
