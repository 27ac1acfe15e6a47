//! Canonical identification, metadata validation, versioning, and temporal
//! anchoring of claims and authors. Everything else in the engine references
//! records from this store.

use crate::error::{BewaError, Result};
use crate::hashing::{to_hex, CanonicalHasher};
use crate::keys::KeyRegistry;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Seconds since the Unix epoch.
pub type Timestamp = i64;
/// Hex-encoded 32-byte canonical claim signature.
pub type Ccs = String;
/// Hex-encoded 32-byte canonical author identifier.
pub type Caid = String;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorIdentity {
    pub caid: Caid,
    pub orcid: Option<String>,
    pub disambiguated_name: String,
    pub affiliation: String,
}

/// Derive the canonical author identifier. An absent ORCID hashes as an
/// empty field; the caller must then supply an already disambiguated name.
pub fn canonical_author_id(
    orcid: Option<&str>,
    name: &str,
    affiliation: &str,
) -> Result<AuthorIdentity> {
    if name.trim().is_empty() {
        return Err(BewaError::EmptyName);
    }
    let mut h = CanonicalHasher::new();
    h.field_str(orcid.unwrap_or(""))
        .field_str(name)
        .field_str(affiliation);
    Ok(AuthorIdentity {
        caid: to_hex(&h.finish()),
        orcid: orcid.map(str::to_owned),
        disambiguated_name: name.to_owned(),
        affiliation: affiliation.to_owned(),
    })
}

/// Derive the canonical claim signature binding text, author, and time.
pub fn canonical_claim_signature(
    normalized_form: &str,
    author: &Caid,
    asserted_at: Timestamp,
) -> Result<Ccs> {
    if normalized_form.trim().is_empty() {
        return Err(BewaError::EmptyClaim);
    }
    let mut h = CanonicalHasher::new();
    h.field_str(normalized_form)
        .field_str(author)
        .field_i64(asserted_at);
    Ok(to_hex(&h.finish()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rct,
    Observational,
    MetaAnalysis,
    Theoretical,
    Simulation,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticalFrame {
    Frequentist,
    Bayesian,
    Nonparametric,
    None,
}

/// Contextual signature: claims are epistemic equivalents only when both the
/// normalized form and the full tag match.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextTag {
    pub concept: String,
    pub method: Method,
    pub statistical_frame: StatisticalFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpistemicStatus {
    Verifiable,
    Refutable,
    Undecidable,
}

/// Declared relation of a new version to its predecessor. A restatement must
/// carry a byte-identical normalized form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VersionRelation {
    Refines,
    Corrects,
    Restates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub ccs: Ccs,
    pub normalized_form: String,
    pub author: Caid,
    pub asserted_at: Timestamp,
    pub context: ContextTag,
    pub domain_set: Vec<String>,
    pub version: u32,
    pub parent_ccs: Option<Ccs>,
    pub relation: Option<VersionRelation>,
    /// Supplied by the corpus; the engine does not run a decidability oracle.
    pub epistemic_status: EpistemicStatus,
}

impl ClaimRecord {
    /// Build a first-version record, computing its signature from the fields.
    pub fn new(
        normalized_form: &str,
        author: &Caid,
        asserted_at: Timestamp,
        context: ContextTag,
        domain_set: Vec<String>,
        epistemic_status: EpistemicStatus,
    ) -> Result<Self> {
        let ccs = canonical_claim_signature(normalized_form, author, asserted_at)?;
        Ok(Self {
            ccs,
            normalized_form: normalized_form.to_owned(),
            author: author.clone(),
            asserted_at,
            context,
            domain_set,
            version: 1,
            parent_ccs: None,
            relation: None,
            epistemic_status,
        })
    }

    /// Recompute the signature from stored fields; must equal `self.ccs`.
    pub fn recompute_ccs(&self) -> Result<Ccs> {
        canonical_claim_signature(&self.normalized_form, &self.author, self.asserted_at)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VenueInfo {
    pub name: String,
    /// Reputational index in [0,1].
    pub reputation: f64,
    /// Review transparency in [0,1].
    pub transparency: f64,
    /// Corpus compliance rate in [0,1].
    pub compliance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicationStatus {
    Untested,
    Replicated,
    Failed,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFlags {
    pub verifiable: bool,
    pub indexed: bool,
    pub peer_reviewed: bool,
}

impl SourceFlags {
    pub fn authoritative(&self) -> bool {
        self.verifiable && self.indexed && self.peer_reviewed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetadataRecord {
    pub caid: Caid,
    pub ccs: Ccs,
    pub doi: String,
    pub published_at: Timestamp,
    pub venue: VenueInfo,
    pub funding: Option<String>,
    pub replication_status: ReplicationStatus,
    pub source_flags: SourceFlags,
    pub schema_complete: bool,
    /// Hex hash of the signed content.
    pub content_hash: String,
    /// Hex-encoded detached signature over `content_hash`.
    pub signature: Option<String>,
    /// Hex-encoded public key of the signer.
    pub signer_key: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectionReason {
    MissingField(String),
    BadSignature,
    SourceNotAuthoritative,
    ExclusivityOverflow(String),
    RiskGate(String),
    InvalidEntry(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub complete: bool,
    /// None when the record carries no signature.
    pub signature_ok: Option<bool>,
    pub admissible: bool,
    pub reasons: Vec<RejectionReason>,
}

/// Validate completeness (every referential anchor present) and, when a
/// signature is attached, its cryptographic integrity. Rejection is a value.
pub fn validate_metadata(record: &MetadataRecord, keys: &KeyRegistry) -> AdmissibilityReport {
    let mut reasons = Vec::new();
    let mut check = |name: &str, empty: bool| {
        if empty {
            reasons.push(RejectionReason::MissingField(name.to_string()));
        }
    };
    check("caid", record.caid.is_empty());
    check("ccs", record.ccs.is_empty());
    check("doi", record.doi.is_empty());
    check("published_at", record.published_at <= 0);
    check("venue", record.venue.name.is_empty());
    let complete = reasons.is_empty() && record.schema_complete;
    if reasons.is_empty() && !record.schema_complete {
        reasons.push(RejectionReason::MissingField("schema_complete".into()));
    }

    let signature_ok = match (&record.signature, &record.signer_key) {
        (Some(sig), Some(key)) => {
            Some(keys.verify_hex(&record.content_hash, sig, key))
        }
        (Some(_), None) | (None, Some(_)) => Some(false),
        (None, None) => None,
    };
    if signature_ok == Some(false) {
        reasons.push(RejectionReason::BadSignature);
    }

    AdmissibilityReport {
        complete,
        signature_ok,
        admissible: complete && signature_ok != Some(false),
        reasons,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersionEntry {
    pub version: u32,
    pub record: ClaimRecord,
    pub recorded_at: Timestamp,
}

/// Append-only chain of claim versions, totally ordered by timestamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersionChain {
    pub ccs_root: Ccs,
    pub entries: Vec<VersionEntry>,
}

impl VersionChain {
    pub fn new(first: ClaimRecord, recorded_at: Timestamp) -> Self {
        Self {
            ccs_root: first.ccs.clone(),
            entries: vec![VersionEntry {
                version: first.version,
                record: first,
                recorded_at,
            }],
        }
    }

    pub fn head(&self) -> &ClaimRecord {
        &self.entries.last().expect("chain is never empty").record
    }
}

/// Extend a version chain. Prior entries are untouched; the checks enforce
/// strict temporal order, a contiguous version number, an intact parent
/// link, and a declared revision relation.
pub fn append_version(chain: &mut VersionChain, next: ClaimRecord) -> Result<()> {
    let last = chain.head().clone();
    if next.version != last.version + 1 {
        return Err(BewaError::VersionGap);
    }
    if next.asserted_at <= last.asserted_at {
        return Err(BewaError::NonMonotoneTimestamp);
    }
    if next.parent_ccs.as_deref() != Some(last.ccs.as_str()) {
        return Err(BewaError::BrokenParentLink);
    }
    match next.relation {
        None => return Err(BewaError::MissingRelation),
        Some(VersionRelation::Restates) if next.normalized_form != last.normalized_form => {
            return Err(BewaError::RestatementMismatch)
        }
        Some(_) => {}
    }
    let recorded_at = next.asserted_at;
    chain.entries.push(VersionEntry {
        version: next.version,
        record: next,
        recorded_at,
    });
    Ok(())
}

/// Interval during which a claim version is active. An open anchor has no
/// end; support edges from an anchor that closed before the supported claim
/// started are rejected by the graph layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalAnchor {
    pub tau_start: Timestamp,
    pub tau_end: Option<Timestamp>,
}

pub fn anchor_interval(start: Timestamp, end: Option<Timestamp>) -> Result<TemporalAnchor> {
    if let Some(e) = end {
        if e < start {
            return Err(BewaError::InvertedInterval);
        }
    }
    Ok(TemporalAnchor {
        tau_start: start,
        tau_end: end,
    })
}

impl TemporalAnchor {
    /// Whether this anchor can temporally support a claim starting at `start`.
    pub fn can_support(&self, start: Timestamp) -> bool {
        match self.tau_end {
            Some(end) => end >= start,
            None => true,
        }
    }
}

/// In-memory claim store: immutable records, version chains, anchors, and
/// author identities. Mutation goes through a single writer.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ClaimStore {
    pub claims: BTreeMap<Ccs, ClaimRecord>,
    pub metadata: BTreeMap<Ccs, MetadataRecord>,
    pub chains: BTreeMap<Ccs, VersionChain>,
    pub anchors: BTreeMap<Ccs, TemporalAnchor>,
    pub authors: BTreeMap<Caid, AuthorIdentity>,
    /// Declared mutual-exclusivity groups: group id -> member claims.
    pub exclusive_groups: BTreeMap<String, Vec<Ccs>>,
}

impl ClaimStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, ccs: &str) -> Result<&ClaimRecord> {
        self.claims
            .get(ccs)
            .ok_or_else(|| BewaError::UnknownClaim(ccs.to_string()))
    }

    pub fn contains(&self, ccs: &str) -> bool {
        self.claims.contains_key(ccs)
    }

    pub fn insert_claim(&mut self, record: ClaimRecord, metadata: MetadataRecord) {
        self.chains.insert(
            record.ccs.clone(),
            VersionChain::new(record.clone(), record.asserted_at),
        );
        self.metadata.insert(record.ccs.clone(), metadata);
        self.claims.insert(record.ccs.clone(), record);
    }

    pub fn set_anchor(&mut self, ccs: &str, anchor: TemporalAnchor) -> Result<()> {
        if !self.contains(ccs) {
            return Err(BewaError::UnknownClaim(ccs.to_string()));
        }
        self.anchors.insert(ccs.to_string(), anchor);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::KeyRegistry;

    fn tag() -> ContextTag {
        ContextTag {
            concept: "enzyme-inhibition".into(),
            method: Method::Rct,
            statistical_frame: StatisticalFrame::Frequentist,
        }
    }

    #[test]
    fn caid_matches_reference_hash() {
        let id =
            canonical_author_id(Some("0000-0002-1825-0097"), "A. Turing", "NPL").unwrap();
        // Pinned from an independent hashing utility.
        assert_eq!(
            id.caid,
            "1acaf4206a52a03f9297db3e90cb9153e7b64fd454c151717183e4cb7234ac20"
        );
        let again =
            canonical_author_id(Some("0000-0002-1825-0097"), "A. Turing", "NPL").unwrap();
        assert_eq!(id.caid, again.caid);
    }

    #[test]
    fn caid_without_orcid_hashes_empty_field() {
        let id = canonical_author_id(None, "A. Turing", "NPL").unwrap();
        assert_eq!(
            id.caid,
            "575f7d098adcc60e3a61be8cb5231d64c05d255941fbdc20f37359aeabe4b3b1"
        );
    }

    #[test]
    fn empty_name_rejected() {
        assert_eq!(
            canonical_author_id(Some(""), "  ", "X").unwrap_err(),
            BewaError::EmptyName
        );
    }

    #[test]
    fn ccs_matches_reference_and_separates_timestamps() {
        let caid =
            "1acaf4206a52a03f9297db3e90cb9153e7b64fd454c151717183e4cb7234ac20".to_string();
        let c1 =
            canonical_claim_signature("Inhibits(ProteinX,EnzymeY)", &caid, 1_700_000_000)
                .unwrap();
        assert_eq!(
            c1,
            "1827f419b6b3fac1871fb84319a8170f659bd0301ea6f293c2fc61303078d781"
        );
        let c2 =
            canonical_claim_signature("Inhibits(ProteinX,EnzymeY)", &caid, 1_700_000_001)
                .unwrap();
        assert_eq!(
            c2,
            "2bfdef24bc9e3a13f93656777c0a5c07f8d7f8f665622ad6590cb0d9dd42a66a"
        );
        assert_ne!(c1, c2);
        assert_eq!(
            canonical_claim_signature("", &caid, 0).unwrap_err(),
            BewaError::EmptyClaim
        );
    }

    fn record_v(author: &Caid, version: u32, t: Timestamp, parent: Option<Ccs>) -> ClaimRecord {
        let form = "Inhibits(ProteinX,EnzymeY)";
        let ccs = canonical_claim_signature(form, author, t).unwrap();
        ClaimRecord {
            ccs,
            normalized_form: form.into(),
            author: author.clone(),
            asserted_at: t,
            context: tag(),
            domain_set: vec!["biochem".into()],
            version,
            parent_ccs: parent,
            relation: if version > 1 {
                Some(VersionRelation::Restates)
            } else {
                None
            },
            epistemic_status: EpistemicStatus::Verifiable,
        }
    }

    #[test]
    fn version_chain_happy_path_and_rejections() {
        let author = canonical_author_id(None, "A. Turing", "NPL").unwrap().caid;
        let v1 = record_v(&author, 1, 100, None);
        let v1_ccs = v1.ccs.clone();
        let mut chain = VersionChain::new(v1, 100);

        let v2 = record_v(&author, 2, 200, Some(v1_ccs.clone()));
        append_version(&mut chain, v2).unwrap();
        assert_eq!(chain.entries.len(), 2);
        assert_eq!(chain.head().version, 2);

        // equal timestamp: strict order violated
        let bad_t = record_v(&author, 3, 200, Some(chain.head().ccs.clone()));
        assert_eq!(
            append_version(&mut chain, bad_t).unwrap_err(),
            BewaError::NonMonotoneTimestamp
        );

        // broken parent link
        let bad_p = record_v(&author, 3, 300, Some(v1_ccs));
        assert_eq!(
            append_version(&mut chain, bad_p).unwrap_err(),
            BewaError::BrokenParentLink
        );

        // version gap
        let bad_v = record_v(&author, 5, 300, Some(chain.head().ccs.clone()));
        assert_eq!(
            append_version(&mut chain, bad_v).unwrap_err(),
            BewaError::VersionGap
        );
    }

    #[test]
    fn restatement_requires_identical_text() {
        let author = canonical_author_id(None, "B", "Inst").unwrap().caid;
        let v1 = record_v(&author, 1, 100, None);
        let parent = v1.ccs.clone();
        let mut chain = VersionChain::new(v1, 100);
        let mut v2 = record_v(&author, 2, 200, Some(parent));
        v2.normalized_form = "Inhibits(ProteinX,EnzymeZ)".into();
        v2.ccs = canonical_claim_signature(&v2.normalized_form, &author, 200).unwrap();
        assert_eq!(
            append_version(&mut chain, v2).unwrap_err(),
            BewaError::RestatementMismatch
        );
    }

    #[test]
    fn anchors() {
        assert_eq!(
            anchor_interval(100, Some(200)).unwrap(),
            TemporalAnchor {
                tau_start: 100,
                tau_end: Some(200)
            }
        );
        assert!(anchor_interval(100, None).unwrap().can_support(1_000_000));
        assert_eq!(
            anchor_interval(200, Some(100)).unwrap_err(),
            BewaError::InvertedInterval
        );
        let closed = anchor_interval(100, Some(200)).unwrap();
        assert!(closed.can_support(150));
        assert!(!closed.can_support(201));
    }

    fn complete_metadata() -> MetadataRecord {
        MetadataRecord {
            caid: "a".repeat(64),
            ccs: "b".repeat(64),
            doi: "10.1000/demo".into(),
            published_at: 1_600_000_000,
            venue: VenueInfo {
                name: "J. Repro. Sci.".into(),
                reputation: 0.8,
                transparency: 0.7,
                compliance: 0.9,
            },
            funding: None,
            replication_status: ReplicationStatus::Untested,
            source_flags: SourceFlags {
                verifiable: true,
                indexed: true,
                peer_reviewed: true,
            },
            schema_complete: true,
            content_hash: "c".repeat(64),
            signature: None,
            signer_key: None,
        }
    }

    #[test]
    fn metadata_missing_doi_is_inadmissible() {
        let keys = KeyRegistry::new();
        let mut record = complete_metadata();
        record.doi.clear();
        let report = validate_metadata(&record, &keys);
        assert!(!report.admissible);
        assert!(report
            .reasons
            .contains(&RejectionReason::MissingField("doi".into())));
    }

    #[test]
    fn metadata_signature_paths() {
        let mut keys = KeyRegistry::new();
        let (caid, signing) = keys.generate("signer");
        let mut record = complete_metadata();
        record.caid = caid.clone();

        // valid signature over the content hash
        let sig = KeyRegistry::sign_hex(&signing, &record.content_hash).unwrap();
        record.signature = Some(sig);
        record.signer_key = Some(keys.public_hex(&caid).unwrap());
        let report = validate_metadata(&record, &keys);
        assert_eq!(report.signature_ok, Some(true));
        assert!(report.admissible);

        // flip one byte of the signed content
        let mut tampered = record.clone();
        tampered.content_hash = format!("d{}", &tampered.content_hash[1..]);
        let report = validate_metadata(&tampered, &keys);
        assert_eq!(report.signature_ok, Some(false));
        assert!(!report.admissible);
        assert!(report.reasons.contains(&RejectionReason::BadSignature));
    }

    #[test]
    fn admissibility_monotone_in_completeness() {
        // adding a missing field never flips admissible true -> false
        let keys = KeyRegistry::new();
        let mut record = complete_metadata();
        record.doi.clear();
        let before = validate_metadata(&record, &keys);
        record.doi = "10.1000/added".into();
        let after = validate_metadata(&record, &keys);
        assert!(!before.admissible);
        assert!(after.admissible);
    }
}
