//! Circular (Morgan-style) substructure fingerprints.
//!
//! Environment identifiers are hashed with FNV-1a (64-bit offset basis
//! `0xcbf29ce484222325`, prime `0x100000001b3`) over little-endian `u64`
//! field encodings, finished with the splitmix64 avalanche. The function is
//! pinned here because bit positions must stay stable across releases; do
//! not change it without bumping the dataset format version.

use super::smiles::MolecularGraph;
use super::Fingerprint;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(fields: &[u64]) -> u64 {
    let mut h = FNV_OFFSET;
    for field in fields {
        for byte in field.to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    splitmix64_finish(h)
}

fn splitmix64_finish(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Initial atom identifier from reindexing-invariant properties only:
/// element, degree, formal charge, aromaticity and attached hydrogen count.
fn atom_invariant(mol: &MolecularGraph, idx: usize, degree: usize) -> u64 {
    let atom = &mol.atoms[idx];
    fnv1a(&[
        atom.element.code(),
        degree as u64,
        atom.charge as i64 as u64,
        u64::from(atom.aromatic),
        u64::from(mol.attached_h(idx)),
    ])
}

/// Circular fingerprint of the given radius folded into `nbits` bits.
///
/// Deterministic and invariant under atom reindexing: every iteration hashes
/// the sorted `(bond order, neighbor identifier)` pairs, so the result does
/// not depend on input atom order. ECFP4 corresponds to radius 2.
pub fn morgan_fingerprint(mol: &MolecularGraph, radius: u32, nbits: u32) -> Fingerprint {
    assert!(
        nbits >= 64 && nbits.is_power_of_two(),
        "nbits must be a power of two >= 64, got {nbits}"
    );
    let adj = mol.neighbor_lists();
    let mut ids: Vec<u64> = (0..mol.atoms.len())
        .map(|v| atom_invariant(mol, v, adj[v].len()))
        .collect();

    let mut fp = Fingerprint::zeros(nbits);
    for &id in &ids {
        fp.set((id % u64::from(nbits)) as u32);
    }
    for _ in 0..radius {
        let mut next = Vec::with_capacity(ids.len());
        for v in 0..ids.len() {
            let mut env: Vec<(u64, u64)> = adj[v]
                .iter()
                .map(|&(u, order)| (order.code(), ids[u]))
                .collect();
            env.sort_unstable();
            let mut fields = Vec::with_capacity(1 + 2 * env.len());
            fields.push(ids[v]);
            for (order, id) in env {
                fields.push(order);
                fields.push(id);
            }
            next.push(fnv1a(&fields));
        }
        for &id in &next {
            fp.set((id % u64::from(nbits)) as u32);
        }
        ids = next;
    }
    fp
}

#[cfg(test)]
mod tests {
    use super::super::smiles::parse_smiles;
    use super::*;

    #[test]
    fn reindexing_invariance_from_equivalent_smiles() {
        let a = parse_smiles("OCC").unwrap();
        let b = parse_smiles("CCO").unwrap();
        assert_eq!(
            morgan_fingerprint(&a, 2, 1024),
            morgan_fingerprint(&b, 2, 1024)
        );
    }

    #[test]
    fn radius_zero_distinguishes_elements() {
        let c = parse_smiles("C").unwrap();
        let o = parse_smiles("O").unwrap();
        let fp_c = morgan_fingerprint(&c, 0, 1024);
        let fp_o = morgan_fingerprint(&o, 0, 1024);
        assert_eq!(fp_c.popcount(), 1);
        assert_eq!(fp_o.popcount(), 1);
        assert_ne!(fp_c, fp_o);
    }

    #[test]
    fn deterministic_across_repeated_computations() {
        let mol = parse_smiles("c1ccccc1").unwrap();
        let first = morgan_fingerprint(&mol, 2, 1024);
        for _ in 0..1000 {
            assert_eq!(first, morgan_fingerprint(&mol, 2, 1024));
        }
    }

    #[test]
    fn radius_widens_the_environment_set() {
        let mol = parse_smiles("CC(=O)Oc1ccccc1C(=O)O").unwrap();
        let r0 = morgan_fingerprint(&mol, 0, 2048);
        let r2 = morgan_fingerprint(&mol, 2, 2048);
        assert!(r2.popcount() > r0.popcount());
    }

    #[test]
    #[should_panic(expected = "power of two")]
    fn rejects_non_power_of_two_width() {
        let mol = parse_smiles("C").unwrap();
        morgan_fingerprint(&mol, 2, 1000);
    }
}
