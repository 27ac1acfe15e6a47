//! Corpus file schema and parsing. A corpus is one JSON document holding an
//! array of claim entries with author, context, metadata, and optional
//! signature material; timestamps are RFC 3339 and convert to epoch seconds
//! on ingestion.

use crate::claim::{
    ContextTag, EpistemicStatus, Method, ReplicationStatus, SourceFlags, StatisticalFrame,
    Timestamp, VenueInfo,
};
use crate::error::{BewaError, Result};
use chrono::DateTime;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusAuthor {
    #[serde(default)]
    pub orcid: Option<String>,
    pub name: String,
    #[serde(default)]
    pub affiliation: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusContext {
    pub concept: String,
    pub method: Method,
    pub statistical_frame: StatisticalFrame,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusVenue {
    pub name: String,
    #[serde(rename = "R")]
    pub reputation: f64,
    #[serde(rename = "T")]
    pub transparency: f64,
    #[serde(rename = "C")]
    pub compliance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusSourceFlags {
    pub verifiable: bool,
    pub indexed: bool,
    pub peer_reviewed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusMetadata {
    pub doi: String,
    /// RFC 3339.
    pub published_at: String,
    pub venue: CorpusVenue,
    #[serde(default)]
    pub funding: Option<String>,
    pub replication_status: ReplicationStatus,
    pub source_flags: CorpusSourceFlags,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub normalized_form: String,
    pub author: CorpusAuthor,
    /// RFC 3339.
    pub asserted_at: String,
    pub context: CorpusContext,
    #[serde(default)]
    pub domains: Vec<String>,
    pub metadata: CorpusMetadata,
    #[serde(default)]
    pub epistemic_status: Option<EpistemicStatus>,
    /// Declared mutual-exclusivity group; members share a probability budget.
    #[serde(default)]
    pub exclusive_group: Option<String>,
    /// Normalized forms of corpus entries this claim deductively entails.
    /// Entailment is asserted by the corpus, never derived by the engine.
    #[serde(default)]
    pub entails: Vec<String>,
    /// Normalized forms of corpus entries this claim contradicts.
    #[serde(default)]
    pub contradicts: Vec<String>,
    #[serde(default)]
    pub signature: Option<String>,
    #[serde(default)]
    pub signer_key: Option<String>,
}

pub fn parse_rfc3339(s: &str) -> Result<Timestamp> {
    DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.timestamp())
        .map_err(|e| BewaError::MalformedCorpus(format!("bad timestamp {s:?}: {e}")))
}

pub fn load_corpus(path: &Path) -> Result<Vec<CorpusEntry>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| BewaError::MalformedCorpus(format!("{}: {e}", path.display())))?;
    parse_corpus(&text)
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    serde_json::from_str(text).map_err(|e| BewaError::MalformedCorpus(e.to_string()))
}

impl CorpusEntry {
    pub fn context_tag(&self) -> ContextTag {
        ContextTag {
            concept: self.context.concept.clone(),
            method: self.context.method,
            statistical_frame: self.context.statistical_frame,
        }
    }

    pub fn venue_info(&self) -> VenueInfo {
        VenueInfo {
            name: self.metadata.venue.name.clone(),
            reputation: self.metadata.venue.reputation,
            transparency: self.metadata.venue.transparency,
            compliance: self.metadata.venue.compliance,
        }
    }

    pub fn source_flags(&self) -> SourceFlags {
        SourceFlags {
            verifiable: self.metadata.source_flags.verifiable,
            indexed: self.metadata.source_flags.indexed,
            peer_reviewed: self.metadata.source_flags.peer_reviewed,
        }
    }
}

/// Evidence fixture file: typed events keyed by target claim signature.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EvidenceFixture {
    Citation {
        target_ccs: String,
        citing_doc_id: String,
        t: String,
        credibility: f64,
        intent: crate::credibility::CitationIntent,
        cluster_id: String,
    },
    Replication {
        target_ccs: String,
        replicating_doc_id: String,
        t: String,
        outcome: crate::credibility::ReplicationOutcome,
        weight: f64,
        #[serde(default)]
        authors: Vec<String>,
        #[serde(default)]
        institutions: Vec<String>,
        #[serde(default)]
        funding: Vec<String>,
        #[serde(default)]
        conditions: Vec<String>,
        #[serde(default)]
        domain: String,
    },
    Support {
        target_ccs: String,
        kind: crate::kernel::EvidenceKind,
        quality: f64,
        source_doc: String,
        t: String,
    },
}

pub fn load_evidence(path: &Path) -> Result<Vec<EvidenceFixture>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| BewaError::MalformedCorpus(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| BewaError::MalformedCorpus(e.to_string()))
}

/// Embedding sidecar: claim signature -> raw float vector.
pub fn load_embeddings(
    path: &Path,
) -> Result<std::collections::BTreeMap<String, Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| BewaError::MalformedCorpus(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| BewaError::MalformedCorpus(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_corpus() {
        let text = r#"[
          {
            "normalized_form": "Inhibits(ProteinX,EnzymeY)",
            "author": {"orcid": "0000-0002-1825-0097", "name": "A. Turing", "affiliation": "NPL"},
            "asserted_at": "2023-11-14T22:13:20Z",
            "context": {"concept": "enzyme-inhibition", "method": "rct", "statistical_frame": "frequentist"},
            "domains": ["biochem"],
            "metadata": {
              "doi": "10.1000/x1",
              "published_at": "2023-11-01T00:00:00Z",
              "venue": {"name": "J. Demo", "R": 0.8, "T": 0.7, "C": 0.9},
              "replication_status": "untested",
              "source_flags": {"verifiable": true, "indexed": true, "peer_reviewed": true}
            }
          }
        ]"#;
        let entries = parse_corpus(text).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(parse_rfc3339(&entries[0].asserted_at).unwrap(), 1_700_000_000);
        assert!(entries[0].source_flags().authoritative());
    }

    #[test]
    fn malformed_corpus_is_whole_file_error() {
        assert!(matches!(
            parse_corpus("{not json"),
            Err(BewaError::MalformedCorpus(_))
        ));
        assert!(matches!(
            parse_rfc3339("not-a-date"),
            Err(BewaError::MalformedCorpus(_))
        ));
    }

    #[test]
    fn empty_corpus_is_fine() {
        assert!(parse_corpus("[]").unwrap().is_empty());
    }
}
