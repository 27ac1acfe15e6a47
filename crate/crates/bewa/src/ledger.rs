//! Tamper-evident provenance ledger: hash-chained signed entries, per-epoch
//! Merkle anchoring with membership proofs, audit queries, and a binary file
//! format with an algorithm-declaring header.
//!
//! Single writer; readers work over immutable views. Epochs seal at a
//! barrier with no in-flight appends.

use crate::claim::{Caid, Ccs, Timestamp};
use crate::error::{BewaError, Result};
use crate::hashing::{sha256_concat, CanonicalHasher, Hash32, HASH_ALGORITHM_ID};
use crate::keys::{KeyRegistry, SIGNATURE_ALGORITHM_ID};
use crate::merkle::{self, MembershipProof};
use ed25519_dalek::SigningKey;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TxType {
    Insert,
    Update,
    Deprecate,
    Anchor,
}

impl TxType {
    fn code(self) -> u8 {
        match self {
            TxType::Insert => 0,
            TxType::Update => 1,
            TxType::Deprecate => 2,
            TxType::Anchor => 3,
        }
    }

    fn from_code(c: u8) -> Result<Self> {
        Ok(match c {
            0 => TxType::Insert,
            1 => TxType::Update,
            2 => TxType::Deprecate,
            3 => TxType::Anchor,
            other => {
                return Err(BewaError::MalformedLedger(format!(
                    "unknown tx type {other}"
                )))
            }
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TxType::Insert => "INSERT",
            TxType::Update => "UPDATE",
            TxType::Deprecate => "DEPRECATE",
            TxType::Anchor => "ANCHOR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub seq: u64,
    pub tx_type: TxType,
    pub ccs: Ccs,
    /// Free-form operation descriptor (cause of the transition).
    pub op: String,
    pub pi_after: f64,
    pub t: Timestamp,
    pub actor: Caid,
    /// Hex signature by the actor over the body hash.
    pub signature: String,
    pub entry_hash: Hash32,
    pub prev_hash: Hash32,
}

impl LedgerEntry {
    /// Canonical body bytes: everything except the signature and the chain
    /// hashes, length-prefix framed.
    fn body_bytes(
        seq: u64,
        tx_type: TxType,
        ccs: &str,
        op: &str,
        pi_after: f64,
        t: Timestamp,
        actor: &str,
    ) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + ccs.len() + op.len() + actor.len());
        out.extend_from_slice(&seq.to_be_bytes());
        out.push(tx_type.code());
        for field in [ccs, op] {
            out.extend_from_slice(&(field.len() as u32).to_be_bytes());
            out.extend_from_slice(field.as_bytes());
        }
        out.extend_from_slice(&pi_after.to_bits().to_be_bytes());
        out.extend_from_slice(&t.to_be_bytes());
        out.extend_from_slice(&(actor.len() as u32).to_be_bytes());
        out.extend_from_slice(actor.as_bytes());
        out
    }

    pub fn body(&self) -> Vec<u8> {
        Self::body_bytes(
            self.seq,
            self.tx_type,
            &self.ccs,
            &self.op,
            self.pi_after,
            self.t,
            &self.actor,
        )
    }

    /// Chain rule: the genesis entry hashes its body alone; every later
    /// entry hashes body followed by the predecessor hash.
    pub fn chain_hash(body: &[u8], seq: u64, prev: &Hash32) -> Hash32 {
        if seq == 1 {
            crate::hashing::sha256(body)
        } else {
            sha256_concat(body, prev)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRoot {
    pub epoch: u64,
    /// Ledger seq range covered (inclusive).
    pub first_seq: u64,
    pub last_seq: u64,
    pub merkle_root: Hash32,
    pub committed_at: Timestamp,
    /// Commitment hash over root and nonce for external anchoring.
    pub commitment: Hash32,
    pub nonce: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainVerdict {
    Ok,
    /// First sequence number whose hash link or signature fails.
    Broken(u64),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
    pub epochs: Vec<EpochRoot>,
    /// Sovereign spaces: per-claim writer authorisation.
    pub sovereign: BTreeMap<Ccs, BTreeSet<Caid>>,
    /// Claims whose trace has been superseded; further writes must extend
    /// the successor.
    pub superseded: BTreeMap<Ccs, Ccs>,
    /// Sequence of the first entry not yet covered by an epoch.
    next_epoch_start: u64,
}

pub struct TxBody<'a> {
    pub tx_type: TxType,
    pub ccs: &'a str,
    pub op: &'a str,
    pub pi_after: f64,
    pub t: Timestamp,
    pub actor: &'a str,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Grant an actor write access to a claim's sovereign space.
    pub fn authorize(&mut self, ccs: &str, caid: &str) {
        self.sovereign
            .entry(ccs.to_string())
            .or_default()
            .insert(caid.to_string());
    }

    fn authorized(&self, ccs: &str, caid: &str) -> bool {
        self.sovereign
            .get(ccs)
            .map(|set| set.contains(caid))
            .unwrap_or(false)
    }

    /// Append a signed transaction. The writer must belong to the claim's
    /// sovereign space (INSERTs implicitly create it around the actor), and
    /// superseded traces refuse further state transitions.
    pub fn append_tx(
        &mut self,
        body: TxBody<'_>,
        keys: &KeyRegistry,
        signer: &SigningKey,
    ) -> Result<&LedgerEntry> {
        if body.tx_type == TxType::Insert {
            self.authorize(body.ccs, body.actor);
        }
        if body.tx_type != TxType::Anchor && !self.authorized(body.ccs, body.actor) {
            return Err(BewaError::UnauthorizedWriter);
        }
        if matches!(body.tx_type, TxType::Update | TxType::Insert)
            && self.superseded.contains_key(body.ccs)
        {
            return Err(BewaError::SupersededTrace);
        }
        // the registered key for the actor must match the signing key
        let registered = keys.public_hex(body.actor)?;
        let actual = hex::encode(signer.verifying_key().to_bytes());
        if registered != actual {
            return Err(BewaError::SignatureFailure);
        }

        let seq = self.entries.len() as u64 + 1;
        let prev_hash: Hash32 = match self.entries.last() {
            Some(prev) => prev.entry_hash,
            None => [0u8; 32],
        };
        let bytes = LedgerEntry::body_bytes(
            seq,
            body.tx_type,
            body.ccs,
            body.op,
            body.pi_after,
            body.t,
            body.actor,
        );
        let body_hash = crate::hashing::sha256(&bytes);
        let signature = KeyRegistry::sign_bytes(signer, &body_hash);
        let entry_hash = LedgerEntry::chain_hash(&bytes, seq, &prev_hash);

        self.entries.push(LedgerEntry {
            seq,
            tx_type: body.tx_type,
            ccs: body.ccs.to_string(),
            op: body.op.to_string(),
            pi_after: body.pi_after,
            t: body.t,
            actor: body.actor.to_string(),
            signature,
            entry_hash,
            prev_hash,
        });
        if body.tx_type == TxType::Deprecate {
            self.superseded
                .insert(body.ccs.to_string(), body.op.to_string());
        }
        Ok(self.entries.last().expect("just pushed"))
    }

    /// Recompute every hash link and signature. Two verifiers over the same
    /// bytes always agree; the verdict is a value, not an error.
    pub fn verify_chain(&self, keys: &KeyRegistry) -> ChainVerdict {
        let mut prev: Hash32 = [0u8; 32];
        for entry in &self.entries {
            let body = entry.body();
            if entry.prev_hash != prev {
                return ChainVerdict::Broken(entry.seq);
            }
            let expect = LedgerEntry::chain_hash(&body, entry.seq, &prev);
            if expect != entry.entry_hash {
                return ChainVerdict::Broken(entry.seq);
            }
            let body_hash = crate::hashing::sha256(&body);
            if !keys.verify_for(&entry.actor, &body_hash, &entry.signature) {
                return ChainVerdict::Broken(entry.seq);
            }
            prev = entry.entry_hash;
        }
        ChainVerdict::Ok
    }

    /// Seal all uncovered entries into an epoch: Merkle root over their
    /// entry hashes plus a nonce commitment for external anchoring.
    pub fn seal_epoch(&mut self, committed_at: Timestamp, nonce: u64) -> Result<&EpochRoot> {
        let first = self.next_epoch_start.max(1);
        let last = self.entries.len() as u64;
        if first > last {
            return Err(BewaError::EmptyEpoch);
        }
        let leaves: Vec<Hash32> = self.entries[(first - 1) as usize..last as usize]
            .iter()
            .map(|e| e.entry_hash)
            .collect();
        let root = merkle::merkle_root(&leaves)?;
        let mut commit = CanonicalHasher::new();
        commit.field_bytes(&root).field_u64(nonce);
        let epoch = EpochRoot {
            epoch: self.epochs.len() as u64 + 1,
            first_seq: first,
            last_seq: last,
            merkle_root: root,
            committed_at,
            commitment: commit.finish(),
            nonce,
        };
        self.epochs.push(epoch);
        self.next_epoch_start = last + 1;
        Ok(self.epochs.last().expect("just pushed"))
    }

    pub fn epoch(&self, number: u64) -> Option<&EpochRoot> {
        self.epochs.iter().find(|e| e.epoch == number)
    }

    fn epoch_leaves(&self, epoch: &EpochRoot) -> Vec<Hash32> {
        self.entries[(epoch.first_seq - 1) as usize..epoch.last_seq as usize]
            .iter()
            .map(|e| e.entry_hash)
            .collect()
    }

    /// Membership proof for a ledger entry inside its sealed epoch.
    pub fn prove_membership(&self, seq: u64, epoch_number: u64) -> Result<MembershipProof> {
        let epoch = self
            .epoch(epoch_number)
            .ok_or(BewaError::UnknownLeaf)?
            .clone();
        if seq < epoch.first_seq || seq > epoch.last_seq {
            return Err(BewaError::UnknownLeaf);
        }
        let leaves = self.epoch_leaves(&epoch);
        merkle::prove(&leaves, (seq - epoch.first_seq) as usize)
    }

    /// Latest proof-bearing entry for a claim inside an epoch.
    pub fn prove_claim(&self, ccs: &str, epoch_number: u64) -> Result<MembershipProof> {
        let epoch = self
            .epoch(epoch_number)
            .ok_or(BewaError::UnknownLeaf)?
            .clone();
        let seq = self.entries[(epoch.first_seq - 1) as usize..epoch.last_seq as usize]
            .iter()
            .rev()
            .find(|e| e.ccs == ccs)
            .map(|e| e.seq)
            .ok_or(BewaError::UnknownLeaf)?;
        self.prove_membership(seq, epoch_number)
    }

    /// System-wide digest: Merkle root over every per-claim trace head.
    pub fn system_digest(&self) -> Result<Hash32> {
        let mut heads: BTreeMap<&str, Hash32> = BTreeMap::new();
        for e in &self.entries {
            heads.insert(&e.ccs, e.entry_hash);
        }
        if heads.is_empty() {
            return Err(BewaError::EmptyEpoch);
        }
        let leaves: Vec<Hash32> = heads.into_values().collect();
        merkle::merkle_root(&leaves)
    }

    /// Entries for one claim within an inclusive time window, in seq order.
    pub fn audit_query(&self, ccs: &str, t_a: Timestamp, t_b: Timestamp) -> Result<Vec<&LedgerEntry>> {
        if t_a > t_b {
            return Err(BewaError::InvertedRange);
        }
        Ok(self
            .entries
            .iter()
            .filter(|e| e.ccs == ccs && e.t >= t_a && e.t <= t_b)
            .collect())
    }

    pub fn entries_for(&self, ccs: &str) -> Vec<&LedgerEntry> {
        self.entries.iter().filter(|e| e.ccs == ccs).collect()
    }

    // ---- binary file format ----
    //
    // header: magic "BEWALDG1", u16 hash-alg len + bytes, u16 sig-alg len +
    // bytes. records: u32 length prefix, then the canonical body bytes
    // followed by prev_hash(32) entry_hash(32) u16 sig len + sig bytes.

    const MAGIC: &'static [u8; 8] = b"BEWALDG1";

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut out: Vec<u8> = Vec::new();
        out.extend_from_slice(Self::MAGIC);
        for alg in [HASH_ALGORITHM_ID, SIGNATURE_ALGORITHM_ID] {
            out.extend_from_slice(&(alg.len() as u16).to_be_bytes());
            out.extend_from_slice(alg.as_bytes());
        }
        for e in &self.entries {
            let body = e.body();
            let sig = e.signature.as_bytes();
            let record_len = body.len() + 64 + 2 + sig.len();
            out.extend_from_slice(&(record_len as u32).to_be_bytes());
            out.extend_from_slice(&(body.len() as u32).to_be_bytes());
            out.extend_from_slice(&body);
            out.extend_from_slice(&e.prev_hash);
            out.extend_from_slice(&e.entry_hash);
            out.extend_from_slice(&(sig.len() as u16).to_be_bytes());
            out.extend_from_slice(sig);
        }
        let mut file = std::fs::File::create(path)?;
        file.write_all(&out)?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut cur = 0usize;
        let take = |cur: &mut usize, n: usize| -> Result<&[u8]> {
            if *cur + n > bytes.len() {
                return Err(BewaError::MalformedLedger("truncated".into()));
            }
            let slice = &bytes[*cur..*cur + n];
            *cur += n;
            Ok(slice)
        };
        if take(&mut cur, 8)? != Self::MAGIC {
            return Err(BewaError::MalformedLedger("bad magic".into()));
        }
        for expected in [HASH_ALGORITHM_ID, SIGNATURE_ALGORITHM_ID] {
            let len = u16::from_be_bytes(take(&mut cur, 2)?.try_into().unwrap()) as usize;
            let alg = std::str::from_utf8(take(&mut cur, len)?)
                .map_err(|_| BewaError::MalformedLedger("bad algorithm id".into()))?;
            if alg != expected {
                return Err(BewaError::MalformedLedger(format!(
                    "unsupported algorithm {alg}"
                )));
            }
        }
        let mut ledger = Ledger::new();
        while cur < bytes.len() {
            let _record_len = u32::from_be_bytes(take(&mut cur, 4)?.try_into().unwrap());
            let body_len =
                u32::from_be_bytes(take(&mut cur, 4)?.try_into().unwrap()) as usize;
            let body = take(&mut cur, body_len)?.to_vec();
            let prev_hash: Hash32 = take(&mut cur, 32)?.try_into().unwrap();
            let entry_hash: Hash32 = take(&mut cur, 32)?.try_into().unwrap();
            let sig_len = u16::from_be_bytes(take(&mut cur, 2)?.try_into().unwrap()) as usize;
            let signature = String::from_utf8(take(&mut cur, sig_len)?.to_vec())
                .map_err(|_| BewaError::MalformedLedger("bad signature encoding".into()))?;
            ledger
                .entries
                .push(Self::parse_body(&body, prev_hash, entry_hash, signature)?);
        }
        // rebuild derived maps
        for e in &ledger.entries {
            if e.tx_type == TxType::Insert {
                ledger
                    .sovereign
                    .entry(e.ccs.clone())
                    .or_default()
                    .insert(e.actor.clone());
            }
            if e.tx_type == TxType::Deprecate {
                ledger.superseded.insert(e.ccs.clone(), e.op.clone());
            }
        }
        ledger.next_epoch_start = ledger.entries.len() as u64 + 1;
        Ok(ledger)
    }

    fn parse_body(
        body: &[u8],
        prev_hash: Hash32,
        entry_hash: Hash32,
        signature: String,
    ) -> Result<LedgerEntry> {
        let mut cur = 0usize;
        let take = |cur: &mut usize, n: usize| -> Result<&[u8]> {
            if *cur + n > body.len() {
                return Err(BewaError::MalformedLedger("truncated body".into()));
            }
            let slice = &body[*cur..*cur + n];
            *cur += n;
            Ok(slice)
        };
        let seq = u64::from_be_bytes(take(&mut cur, 8)?.try_into().unwrap());
        let tx_type = TxType::from_code(take(&mut cur, 1)?[0])?;
        let read_str = |cur: &mut usize| -> Result<String> {
            let len = u32::from_be_bytes(take(cur, 4)?.try_into().unwrap()) as usize;
            String::from_utf8(take(cur, len)?.to_vec())
                .map_err(|_| BewaError::MalformedLedger("bad utf8".into()))
        };
        let ccs = read_str(&mut cur)?;
        let op = read_str(&mut cur)?;
        let pi_after = f64::from_bits(u64::from_be_bytes(take(&mut cur, 8)?.try_into().unwrap()));
        let t = i64::from_be_bytes(take(&mut cur, 8)?.try_into().unwrap());
        let actor = read_str(&mut cur)?;
        Ok(LedgerEntry {
            seq,
            tx_type,
            ccs,
            op,
            pi_after,
            t,
            actor,
            signature,
            entry_hash,
            prev_hash,
        })
    }
}
