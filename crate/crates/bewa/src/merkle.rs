//! Binary Merkle trees over ledger entry hashes with membership proofs.
//! An odd node at any level is paired with a duplicate of itself; a single
//! leaf is its own root.

use crate::error::{BewaError, Result};
use crate::hashing::{sha256_concat, Hash32};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipProof {
    pub leaf: Hash32,
    pub path: Vec<(Hash32, Side)>,
    pub root: Hash32,
}

pub fn merkle_root(leaves: &[Hash32]) -> Result<Hash32> {
    if leaves.is_empty() {
        return Err(BewaError::EmptyEpoch);
    }
    let mut level: Vec<Hash32> = leaves.to_vec();
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        for pair in level.chunks(2) {
            let right = if pair.len() == 2 { &pair[1] } else { &pair[0] };
            next.push(sha256_concat(&pair[0], right));
        }
        level = next;
    }
    Ok(level[0])
}

/// Build the membership proof for the leaf at `index`.
pub fn prove(leaves: &[Hash32], index: usize) -> Result<MembershipProof> {
    if leaves.is_empty() {
        return Err(BewaError::EmptyEpoch);
    }
    if index >= leaves.len() {
        return Err(BewaError::UnknownLeaf);
    }
    let mut path = Vec::new();
    let mut level: Vec<Hash32> = leaves.to_vec();
    let mut pos = index;
    while level.len() > 1 {
        let sibling_pos = if pos % 2 == 0 { pos + 1 } else { pos - 1 };
        let sibling = if sibling_pos < level.len() {
            level[sibling_pos]
        } else {
            level[pos] // odd node duplicated
        };
        let side = if pos % 2 == 0 { Side::Right } else { Side::Left };
        path.push((sibling, side));

        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        for pair in level.chunks(2) {
            let right = if pair.len() == 2 { &pair[1] } else { &pair[0] };
            next.push(sha256_concat(&pair[0], right));
        }
        level = next;
        pos /= 2;
    }
    Ok(MembershipProof {
        leaf: leaves[index],
        path,
        root: level[0],
    })
}

/// Walk the path from the leaf to the root; true iff it reproduces the root.
pub fn verify(proof: &MembershipProof) -> bool {
    let mut acc = proof.leaf;
    for (sibling, side) in &proof.path {
        acc = match side {
            Side::Right => sha256_concat(&acc, sibling),
            Side::Left => sha256_concat(sibling, &acc),
        };
    }
    acc == proof.root
}
