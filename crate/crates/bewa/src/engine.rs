//! Engine orchestration: single-writer pipeline tying the claim store,
//! belief kernel, belief graph, credibility scoring, and provenance ledger
//! together. Every belief transition flows through here so the ledger, the
//! kernel history, and the live state can never disagree.

use crate::claim::{
    anchor_interval, canonical_author_id, canonical_claim_signature, validate_metadata, Caid, Ccs,
    ClaimRecord, ClaimStore, EpistemicStatus, MetadataRecord, RejectionReason, ReplicationStatus,
    TemporalAnchor, Timestamp,
};
use crate::config::EngineConfig;
use crate::corpus::{parse_rfc3339, CorpusEntry, EvidenceFixture};
use crate::credibility::{
    author_score, citation_influence, replication_score, AuthorProfile, AuthorScoreParams,
    CitationEvent, CitationIntent, ClaimProvenance, ReplicationEvent, ReplicationOutcome,
};
use crate::error::{BewaError, Result};
use crate::graph::{
    detect_conflicts, propagate, quarantine, resolve_contradiction, suppress_retraction,
    BeliefGraph, ConflictEdge, Edge, PropagationReport, ResolutionOutcome,
};
use crate::kernel::{
    self, decay, prior, probation_step, reinforce, weighted_update, BeliefState, BeliefStatus,
    EvidenceKind, EvidenceUnit, PriorInputs, TransitionCause,
};
use crate::keys::KeyRegistry;
use crate::ledger::{ChainVerdict, Ledger, TxBody, TxType};
use ed25519_dalek::SigningKey;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

/// Reference to one piece of applied evidence, kept per claim for audit
/// justifications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRef {
    pub kind: EvidenceKind,
    pub source_doc: String,
    pub t: Timestamp,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted: Vec<Ccs>,
    pub rejected: Vec<RejectionTrace>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RejectionTrace {
    pub index: usize,
    pub normalized_form: String,
    pub reasons: Vec<RejectionReason>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimScores {
    pub ccs: Ccs,
    pub pi: f64,
    pub citation_raw: f64,
    pub citation_adjusted: f64,
    pub replication_raw: f64,
    pub replication_damped: f64,
    pub composite_support: f64,
}

#[derive(Serialize, Deserialize)]
struct StoredKey {
    caid: Caid,
    seed_hex: String,
}

/// The orchestrated engine. Writes are serialised through `&mut self`;
/// read-only snapshots (the graph, the ledger) may be shared freely.
#[derive(Serialize, Deserialize)]
pub struct Engine {
    pub config: EngineConfig,
    pub store: ClaimStore,
    pub graph: BeliefGraph,
    pub ledger: Ledger,
    pub keys: KeyRegistry,
    pub profiles: BTreeMap<Caid, AuthorProfile>,
    /// Priors as computed at ingestion (exclusivity bookkeeping).
    pub priors: BTreeMap<Ccs, f64>,
    /// Per-claim applied-evidence references (audit justifications).
    pub justifications: BTreeMap<Ccs, Vec<EvidenceRef>>,
    /// Citation and replication event logs per claim.
    pub citations: BTreeMap<Ccs, Vec<CitationEvent>>,
    pub replications: BTreeMap<Ccs, Vec<ReplicationEvent>>,
    /// Declared contradiction pairs awaiting detection.
    pub declared_contradictions: Vec<(Ccs, Ccs)>,
    /// Antisimilarity scores supplied with the corpus.
    pub antisim_scores: Vec<(Ccs, Ccs, f64)>,
    /// Per-domain risk profile overrides.
    pub domain_risk: BTreeMap<String, f64>,
    /// Running prior budget per declared exclusivity group.
    exclusive_budget: BTreeMap<String, f64>,
    /// Ed25519 seeds for actors this engine signs for.
    signing_seeds: BTreeMap<Caid, String>,
    system_caid: Caid,
}

pub const SYSTEM_ACTOR: &str = "bewa-system";

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        let mut keys = KeyRegistry::new();
        let mut seeds = BTreeMap::new();
        let (caid, signing) = keys.generate(SYSTEM_ACTOR);
        seeds.insert(caid.clone(), hex::encode(signing.to_bytes()));
        Self {
            config,
            store: ClaimStore::new(),
            graph: BeliefGraph::new(),
            ledger: Ledger::new(),
            keys,
            profiles: BTreeMap::new(),
            priors: BTreeMap::new(),
            justifications: BTreeMap::new(),
            citations: BTreeMap::new(),
            replications: BTreeMap::new(),
            declared_contradictions: Vec::new(),
            antisim_scores: Vec::new(),
            domain_risk: BTreeMap::new(),
            exclusive_budget: BTreeMap::new(),
            signing_seeds: seeds,
            system_caid: caid,
        }
    }

    fn signing_key(&self, caid: &str) -> Result<SigningKey> {
        let seed_hex = self.signing_seeds.get(caid).ok_or(BewaError::UnknownKey)?;
        let bytes = hex::decode(seed_hex).map_err(|_| BewaError::UnknownKey)?;
        let seed: [u8; 32] = bytes.try_into().map_err(|_| BewaError::UnknownKey)?;
        Ok(SigningKey::from_bytes(&seed))
    }

    /// Ensure a signing identity exists for an actor, generating one when
    /// absent.
    pub fn ensure_actor(&mut self, caid: &str) {
        if !self.signing_seeds.contains_key(caid) {
            let (_, signing) = self.keys.generate(caid);
            self.signing_seeds
                .insert(caid.to_string(), hex::encode(signing.to_bytes()));
        }
    }

    fn ledger_tx(
        &mut self,
        tx_type: TxType,
        ccs: &str,
        op: &str,
        pi_after: f64,
        t: Timestamp,
        actor: &str,
    ) -> Result<()> {
        let signer = self.signing_key(actor)?;
        self.ledger.append_tx(
            TxBody {
                tx_type,
                ccs,
                op,
                pi_after,
                t,
                actor,
            },
            &self.keys,
            &signer,
        )?;
        Ok(())
    }

    pub fn state(&self, ccs: &str) -> Result<&BeliefState> {
        self.graph.node(ccs)
    }

    pub fn upsert_profile(&mut self, profile: AuthorProfile) {
        self.profiles.insert(profile.caid.clone(), profile);
    }

    pub fn author_score_of(&self, caid: &str) -> Option<f64> {
        let p = self.profiles.get(caid)?;
        let c = &self.config.credibility;
        author_score(
            p,
            &AuthorScoreParams {
                beta: c.beta,
                theta1: c.theta1,
                theta2: c.theta2,
                mu_max: c.mu_max,
            },
        )
        .ok()
    }

    pub fn set_domain_risk(&mut self, domain: &str, risk: f64) {
        self.domain_risk.insert(domain.to_string(), risk);
    }

    fn effective_domain_risk(&self, domain: &str) -> f64 {
        self.domain_risk.get(domain).copied().unwrap_or_else(|| {
            let p = &self.config.utility;
            (p.lambda_fp_default + p.lambda_fn_default) / (p.lambda_fp_max + p.lambda_fn_max)
        })
    }

    /// Ingest one corpus document: validate each entry, derive canonical
    /// identifiers, compute priors, enforce source, risk, and exclusivity
    /// gates, and record accepted claims in the store, graph, and ledger.
    /// Per-entry failures are returned as rejection traces, never thrown.
    pub fn ingest_corpus(&mut self, entries: &[CorpusEntry], now: Timestamp) -> Result<IngestReport> {
        let mut report = IngestReport {
            accepted: vec![],
            rejected: vec![],
        };
        let mut by_form: BTreeMap<String, Ccs> = BTreeMap::new();
        for (index, entry) in entries.iter().enumerate() {
            match self.ingest_entry(entry, now) {
                Ok(ccs) => {
                    by_form.insert(entry.normalized_form.clone(), ccs.clone());
                    report.accepted.push(ccs);
                }
                Err(reasons) => report.rejected.push(RejectionTrace {
                    index,
                    normalized_form: entry.normalized_form.clone(),
                    reasons,
                }),
            }
        }
        // second pass: asserted entailments and contradictions between
        // accepted entries become deductive edges and declared conflicts
        for entry in entries {
            let Some(from) = by_form.get(&entry.normalized_form).cloned() else {
                continue;
            };
            for target_form in &entry.entails {
                if let Some(to) = by_form.get(target_form).cloned() {
                    self.add_edge(Edge {
                        from: from.clone(),
                        to,
                        kind: crate::graph::EdgeKind::Deductive,
                        weight: 1.0,
                    })?;
                }
            }
            for target_form in &entry.contradicts {
                if let Some(other) = by_form.get(target_form).cloned() {
                    self.declare_contradiction(&from, &other)?;
                }
            }
        }
        Ok(report)
    }

    fn ingest_entry(
        &mut self,
        entry: &CorpusEntry,
        now: Timestamp,
    ) -> std::result::Result<Ccs, Vec<RejectionReason>> {
        let invalid = |e: BewaError| vec![RejectionReason::InvalidEntry(e.to_string())];

        let author = canonical_author_id(
            entry.author.orcid.as_deref(),
            &entry.author.name,
            &entry.author.affiliation,
        )
        .map_err(invalid)?;
        let asserted_at = parse_rfc3339(&entry.asserted_at).map_err(invalid)?;
        let published_at = parse_rfc3339(&entry.metadata.published_at).map_err(invalid)?;
        let ccs = canonical_claim_signature(&entry.normalized_form, &author.caid, asserted_at)
            .map_err(invalid)?;

        // entry content hash binds the signature material
        let content_hash = {
            let mut h = crate::hashing::CanonicalHasher::new();
            h.field_str(&entry.normalized_form)
                .field_str(&author.caid)
                .field_i64(asserted_at)
                .field_str(&entry.metadata.doi);
            crate::hashing::to_hex(&h.finish())
        };
        let metadata = MetadataRecord {
            caid: author.caid.clone(),
            ccs: ccs.clone(),
            doi: entry.metadata.doi.clone(),
            published_at,
            venue: entry.venue_info(),
            funding: entry.metadata.funding.clone(),
            replication_status: entry.metadata.replication_status,
            source_flags: entry.source_flags(),
            schema_complete: !entry.metadata.doi.is_empty()
                && !entry.metadata.venue.name.is_empty()
                && published_at > 0,
            content_hash,
            signature: entry.signature.clone(),
            signer_key: entry.signer_key.clone(),
        };

        let admissibility = validate_metadata(&metadata, &self.keys);
        if !admissibility.admissible {
            return Err(admissibility.reasons);
        }
        if !metadata.source_flags.authoritative() {
            return Err(vec![RejectionReason::SourceNotAuthoritative]);
        }
        // high-risk domains demand authoritative, replicated claims
        for domain in &entry.domains {
            if self.effective_domain_risk(domain) > self.config.utility.gamma_risk
                && metadata.replication_status != ReplicationStatus::Replicated
            {
                return Err(vec![RejectionReason::RiskGate(domain.clone())]);
            }
        }
        if self.store.contains(&ccs) {
            return Err(vec![RejectionReason::InvalidEntry(
                "duplicate claim signature".into(),
            )]);
        }

        let inputs = PriorInputs {
            author_trust: self.author_score_of(&author.caid),
            venue_credibility: Some(entry.metadata.venue.reputation),
            methodological_rigour: None,
            domain_base_rate: None,
        };
        let pi0 = prior(&inputs, &self.config.kernel.prior_weights).map_err(invalid)?;

        // declared exclusivity groups share a unit probability budget
        if let Some(group) = &entry.exclusive_group {
            let used = self.exclusive_budget.get(group).copied().unwrap_or(0.0);
            if used + pi0 > 1.0 + 1e-9 {
                return Err(vec![RejectionReason::ExclusivityOverflow(group.clone())]);
            }
            self.exclusive_budget.insert(group.clone(), used + pi0);
        }

        let record = ClaimRecord::new(
            &entry.normalized_form,
            &author.caid,
            asserted_at,
            entry.context_tag(),
            entry.domains.clone(),
            entry.epistemic_status.unwrap_or(EpistemicStatus::Undecidable),
        )
        .map_err(invalid)?;

        self.store.authors.insert(author.caid.clone(), author.clone());
        if let Some(group) = &entry.exclusive_group {
            self.store
                .exclusive_groups
                .entry(group.clone())
                .or_default()
                .push(ccs.clone());
        }
        self.store.insert_claim(record, metadata);
        self.priors.insert(ccs.clone(), pi0);

        let probation = &self.config.kernel.probation;
        let state = if self.config.kernel.probation_enabled {
            BeliefState::new(ccs.clone(), probation.pi_initial, BeliefStatus::Probational, now)
        } else {
            BeliefState::new(ccs.clone(), pi0, BeliefStatus::Canonical, now)
        };
        let pi_initial = state.pi;
        self.graph.insert_node(state);

        self.ensure_actor(&author.caid);
        self.ledger_tx(TxType::Insert, &ccs, "ingest", pi_initial, now, &author.caid.clone())
            .map_err(invalid)?;
        // the engine co-writes the claim's sovereign space
        self.ledger.authorize(&ccs, &self.system_caid.clone());
        Ok(ccs)
    }

    pub fn ingest_corpus_file(&mut self, path: &Path, now: Timestamp) -> Result<IngestReport> {
        let entries = crate::corpus::load_corpus(path)?;
        self.ingest_corpus(&entries, now)
    }

    /// Append a later version of an existing claim.
    pub fn append_claim_version(&mut self, parent_ccs: &str, next: ClaimRecord, now: Timestamp) -> Result<Ccs> {
        let root = self
            .store
            .chains
            .values()
            .find(|c| c.head().ccs == parent_ccs)
            .map(|c| c.ccs_root.clone())
            .ok_or_else(|| BewaError::UnknownClaim(parent_ccs.to_string()))?;
        let ccs = next.ccs.clone();
        let chain = self.store.chains.get_mut(&root).expect("chain exists");
        crate::claim::append_version(chain, next.clone())?;
        self.store.claims.insert(ccs.clone(), next.clone());
        let author = next.author.clone();
        // superseded predecessor is deprecated; the new version gets a state
        self.ensure_actor(&author);
        self.ledger_tx(TxType::Deprecate, parent_ccs, &ccs, 0.0, now, &author.clone())?;
        let probation = &self.config.kernel.probation;
        let state = BeliefState::new(
            ccs.clone(),
            probation.pi_initial,
            if self.config.kernel.probation_enabled {
                BeliefStatus::Probational
            } else {
                BeliefStatus::Canonical
            },
            now,
        );
        let pi = state.pi;
        self.graph.insert_node(state);
        self.ledger_tx(TxType::Insert, &ccs, "version", pi, now, &author)?;
        self.ledger.authorize(&ccs, &self.system_caid.clone());
        Ok(ccs)
    }

    pub fn set_anchor(&mut self, ccs: &str, start: Timestamp, end: Option<Timestamp>) -> Result<TemporalAnchor> {
        let anchor = anchor_interval(start, end)?;
        self.store.set_anchor(ccs, anchor)?;
        Ok(anchor)
    }

    /// Insert a typed support edge, honouring temporal coherence: a closed
    /// supporter anchor that ended before the supported claim started is
    /// rejected.
    pub fn add_edge(&mut self, edge: Edge) -> Result<()> {
        if let (Some(anchor), Ok(target)) =
            (self.store.anchors.get(&edge.from), self.store.get(&edge.to))
        {
            if !anchor.can_support(target.asserted_at) {
                return Err(BewaError::InvertedInterval);
            }
        }
        self.graph.add_edge(edge)
    }

    /// Apply one evidence unit to a claim. Supportive kinds above the
    /// reinforcement threshold reset the decay clock; weaker support folds
    /// in under the smoothing cap; contradictions run the counter-evidence
    /// operator with contradiction-mass bookkeeping. Every transition lands
    /// in the ledger.
    pub fn apply_evidence(&mut self, ccs: &str, unit: &EvidenceUnit) -> Result<f64> {
        let cfg = self.config.kernel.clone();
        let weight = kernel::evidence_weight(unit, &cfg);
        let state = self.graph.node(ccs)?.clone();
        if state.status == BeliefStatus::TerminallyDiscredited {
            return Ok(state.pi); // no transition, belief pinned at zero
        }

        let mut next = match unit.kind {
            EvidenceKind::Contradiction => {
                let outcome = kernel::contradict(state.pi, weight, state.contradiction_mass, &cfg)?;
                let mut s = state.clone();
                s.pi = outcome.pi;
                s.contradiction_mass = outcome.kappa;
                if let Some(status) = outcome.status {
                    s.status = status;
                }
                s.record(unit.t, TransitionCause::Contradiction);
                s
            }
            _ if state.status == BeliefStatus::Probational => {
                // probational belief follows the maturation function; the
                // evidence is logged and scored but does not move pi here
                state.clone()
            }
            _ => {
                if weight > cfg.theta_reinforce {
                    reinforce(&state, weight, unit.t, cfg.theta_reinforce)?
                } else {
                    let target = weighted_update(state.pi, weight)?;
                    let mut s = state.clone();
                    let step =
                        (target - s.pi).clamp(-cfg.delta_smoothing, cfg.delta_smoothing);
                    s.pi += step;
                    s.record(unit.t, TransitionCause::Update);
                    s
                }
            }
        };

        match unit.kind {
            EvidenceKind::Replication => {
                next.replication_count += 1;
                next.evidence_mass += weight;
            }
            EvidenceKind::Citation => {
                next.citation_count += 1;
                next.evidence_mass += weight;
            }
            EvidenceKind::Endorsement => next.evidence_mass += weight,
            EvidenceKind::Contradiction => {}
        }
        let pi = next.pi;
        *self.graph.node_mut(ccs)? = next;
        self.justifications
            .entry(ccs.to_string())
            .or_default()
            .push(EvidenceRef {
                kind: unit.kind,
                source_doc: unit.source_doc.clone(),
                t: unit.t,
                weight,
            });
        self.ledger_tx(
            TxType::Update,
            ccs,
            match unit.kind {
                EvidenceKind::Replication => "replication",
                EvidenceKind::Endorsement => "endorsement",
                EvidenceKind::Citation => "citation",
                EvidenceKind::Contradiction => "contradiction",
            },
            pi,
            unit.t,
            &self.system_caid.clone(),
        )?;
        Ok(pi)
    }

    /// Record a structured citation event and fold it into belief.
    pub fn apply_citation(&mut self, event: CitationEvent) -> Result<()> {
        let ccs = event.cited_ccs.clone();
        self.graph.node(&ccs)?;
        let kind = match event.intent {
            CitationIntent::Supportive => Some(EvidenceKind::Citation),
            CitationIntent::Refuting => Some(EvidenceKind::Contradiction),
            CitationIntent::Neutral => None,
        };
        if let Some(kind) = kind {
            self.apply_evidence(
                &ccs,
                &EvidenceUnit {
                    kind,
                    quality: event.credibility,
                    source_doc: event.citing_doc_id.clone(),
                    t: event.t,
                },
            )?;
        }
        self.citations.entry(ccs).or_default().push(event);
        Ok(())
    }

    /// Record a structured replication event; successful outcomes reinforce,
    /// failures count as contradictions, inconclusive outcomes only log.
    pub fn apply_replication(&mut self, event: ReplicationEvent) -> Result<()> {
        let ccs = event.target_ccs.clone();
        self.graph.node(&ccs)?;
        let kind = match event.outcome {
            ReplicationOutcome::Success => Some(EvidenceKind::Replication),
            ReplicationOutcome::Failed => Some(EvidenceKind::Contradiction),
            ReplicationOutcome::Inconclusive => None,
        };
        if let Some(kind) = kind {
            self.apply_evidence(
                &ccs,
                &EvidenceUnit {
                    kind,
                    quality: event.weight,
                    source_doc: event.replicating_doc_id.clone(),
                    t: event.t,
                },
            )?;
        }
        self.replications.entry(ccs).or_default().push(event);
        Ok(())
    }

    pub fn apply_evidence_fixture(&mut self, fixture: &EvidenceFixture) -> Result<()> {
        match fixture {
            EvidenceFixture::Citation {
                target_ccs,
                citing_doc_id,
                t,
                credibility,
                intent,
                cluster_id,
            } => self.apply_citation(CitationEvent {
                citing_doc_id: citing_doc_id.clone(),
                cited_ccs: target_ccs.clone(),
                t: parse_rfc3339(t)?,
                credibility: *credibility,
                intent: *intent,
                cluster_id: cluster_id.clone(),
            }),
            EvidenceFixture::Replication {
                target_ccs,
                replicating_doc_id,
                t,
                outcome,
                weight,
                authors,
                institutions,
                funding,
                conditions,
                domain,
            } => self.apply_replication(ReplicationEvent {
                replicating_doc_id: replicating_doc_id.clone(),
                target_ccs: target_ccs.clone(),
                outcome: *outcome,
                weight: *weight,
                authors: authors.iter().cloned().collect(),
                institutions: institutions.iter().cloned().collect(),
                funding: funding.iter().cloned().collect(),
                conditions: conditions.iter().cloned().collect(),
                domain: domain.clone(),
                t: parse_rfc3339(t)?,
            }),
            EvidenceFixture::Support {
                target_ccs,
                kind,
                quality,
                source_doc,
                t,
            } => self
                .apply_evidence(
                    target_ccs,
                    &EvidenceUnit {
                        kind: *kind,
                        quality: *quality,
                        source_doc: source_doc.clone(),
                        t: parse_rfc3339(t)?,
                    },
                )
                .map(|_| ()),
        }
    }

    /// Topological isolation of a claim (inverse degree).
    fn isolation(&self, ccs: &str) -> f64 {
        let degree = self
            .graph
            .edges
            .iter()
            .filter(|e| e.from == ccs || e.to == ccs)
            .count();
        1.0 / (1.0 + degree as f64)
    }

    /// Apply temporal decay to every eligible claim. Probational claims
    /// follow their own lifecycle; terminally discredited beliefs stay
    /// pinned. Changed beliefs are ledgered.
    pub fn decay_tick(&mut self, now: Timestamp) -> Result<usize> {
        let kernel_cfg = self.config.kernel.clone();
        let targets: Vec<Ccs> = self.graph.nodes.keys().cloned().collect();
        let mut changed = 0usize;
        for ccs in targets {
            let state = self.graph.nodes[&ccs].clone();
            match state.status {
                BeliefStatus::Probational | BeliefStatus::TerminallyDiscredited => continue,
                _ => {}
            }
            if now < state.last_reinforced_at {
                return Err(BewaError::ClockRegression);
            }
            let isolation = self.isolation(&ccs);
            let next = decay(
                &state,
                now,
                &kernel_cfg.decay,
                isolation,
                kernel_cfg.epsilon_stale,
            )?;
            if (next.pi - state.pi).abs() > 0.0 {
                let pi = next.pi;
                *self.graph.node_mut(&ccs)? = next;
                self.ledger_tx(TxType::Update, &ccs, "decay", pi, now, &self.system_caid.clone())?;
                changed += 1;
            }
        }
        Ok(changed)
    }

    /// Advance the probation lifecycle of every probational claim using its
    /// accumulated citation and replication scores.
    pub fn probation_tick(&mut self, now: Timestamp) -> Result<usize> {
        let cfg = self.config.clone();
        let targets: Vec<Ccs> = self
            .graph
            .nodes
            .iter()
            .filter(|(_, s)| s.status == BeliefStatus::Probational)
            .map(|(k, _)| k.clone())
            .collect();
        let mut moved = 0usize;
        for ccs in targets {
            let state = self.graph.nodes[&ccs].clone();
            let citation = self
                .citations
                .get(&ccs)
                .map(|events| {
                    citation_influence(
                        events,
                        now,
                        cfg.credibility.lambda_citation_per_day,
                        cfg.credibility.epsilon_entropy,
                        events
                            .iter()
                            .map(|e| e.cluster_id.as_str())
                            .collect::<BTreeSet<_>>()
                            .len()
                            .max(1),
                    )
                    .map(|s| s.adjusted)
                })
                .transpose()?
                .unwrap_or(0.0);
            let replication = self
                .replications
                .get(&ccs)
                .map(|events| {
                    let provenance = self.claim_provenance(&ccs);
                    replication_score(events, &provenance).damped
                })
                .unwrap_or(0.0);
            let next = probation_step(&state, citation, replication, now, &cfg.kernel.probation)?;
            if next != state {
                let (pi, status) = (next.pi, next.status);
                *self.graph.node_mut(&ccs)? = next;
                self.ledger_tx(
                    TxType::Update,
                    &ccs,
                    match status {
                        BeliefStatus::Canonical => "probation_promote",
                        BeliefStatus::Stale => "probation_expire",
                        _ => "probation_mature",
                    },
                    pi,
                    now,
                    &self.system_caid.clone(),
                )?;
                moved += 1;
            }
        }
        Ok(moved)
    }

    fn claim_provenance(&self, ccs: &str) -> ClaimProvenance {
        let mut p = ClaimProvenance::default();
        if let Ok(record) = self.store.get(ccs) {
            p.authors.insert(record.author.clone());
        }
        if let Some(meta) = self.store.metadata.get(ccs) {
            p.institutions.insert(meta.venue.name.clone());
            if let Some(f) = &meta.funding {
                p.funding.insert(f.clone());
            }
        }
        p
    }

    /// Run one propagation pass to fixpoint. The propagated view is stored
    /// on the graph; kernel beliefs are untouched.
    pub fn propagate(&mut self) -> PropagationReport {
        propagate(&mut self.graph, &self.config.graph)
    }

    pub fn declare_contradiction(&mut self, a: &str, b: &str) -> Result<()> {
        self.graph.node(a)?;
        self.graph.node(b)?;
        self.declared_contradictions
            .push((a.to_string(), b.to_string()));
        Ok(())
    }

    /// Detect conflicts among declared and antisimilar pairs, then resolve
    /// every coherence violation via the evidence-ratio protocol.
    pub fn resolve_conflicts(&mut self, now: Timestamp) -> Result<Vec<(Ccs, Ccs)>> {
        let cfg = self.config.graph.clone();
        let declared = self.declared_contradictions.clone();
        let antisim = self.antisim_scores.clone();
        let scan = detect_conflicts(&mut self.graph, &declared, &antisim, &cfg)?;
        let mut resolved = Vec::new();
        for (a, b) in scan.violations {
            let edge = self
                .graph
                .conflict_edges
                .iter()
                .find(|c| {
                    (c.a == a && c.b == b) || (c.a == b && c.b == a)
                })
                .cloned()
                .expect("violation implies conflict edge");
            match resolve_contradiction(
                &mut self.graph,
                &edge,
                self.config.kernel.pi_dagger,
                &cfg,
                now,
            ) {
                Ok(outcome) => {
                    let (pi_a, pi_b) = match outcome {
                        ResolutionOutcome::Rescaled { pi_a, pi_b } => (pi_a, pi_b),
                        ResolutionOutcome::OneSided { .. } => {
                            (self.graph.nodes[&a].pi, self.graph.nodes[&b].pi)
                        }
                    };
                    self.ledger_tx(TxType::Update, &a, "conflict_resolution", pi_a, now, &self.system_caid.clone())?;
                    self.ledger_tx(TxType::Update, &b, "conflict_resolution", pi_b, now, &self.system_caid.clone())?;
                    resolved.push((a, b));
                }
                Err(BewaError::NoEvidence) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(resolved)
    }

    /// Count of currently active conflict pairs (both beliefs above the
    /// conflict relevance threshold).
    pub fn active_conflicts(&self) -> usize {
        self.graph
            .conflict_edges
            .iter()
            .chain(self.pseudo_conflicts().iter())
            .filter(|c| {
                self.graph.nodes.get(&c.a).map(|s| s.pi).unwrap_or(0.0)
                    > self.config.graph.delta_conflict
                    && self.graph.nodes.get(&c.b).map(|s| s.pi).unwrap_or(0.0)
                        > self.config.graph.delta_conflict
            })
            .count()
    }

    /// Declared pairs that never materialised as conflict edges (beliefs
    /// were below threshold at detection time) still count as latent
    /// contradictions for reporting.
    fn pseudo_conflicts(&self) -> Vec<ConflictEdge> {
        self.declared_contradictions
            .iter()
            .filter(|(a, b)| {
                !self.graph.conflict_edges.iter().any(|c| {
                    (&c.a == a && &c.b == b) || (&c.a == b && &c.b == a)
                })
            })
            .map(|(a, b)| ConflictEdge {
                a: a.clone(),
                b: b.clone(),
                source: crate::graph::ConflictSource::DeclaredEntailment,
                strength: 1.0,
            })
            .collect()
    }

    /// Quarantine the minimal-belief violating set and ledger the masking.
    pub fn quarantine_pass(&mut self, now: Timestamp) -> Result<BTreeSet<Ccs>> {
        let set = quarantine(&mut self.graph, self.config.graph.theta_coherence, now);
        for ccs in &set {
            let pi = self.graph.nodes[ccs].pi;
            self.ledger_tx(TxType::Update, ccs, "quarantine", pi, now, &self.system_caid.clone())?;
        }
        Ok(set)
    }

    /// Retract a claim: deprecate its trace, penalise the author profile,
    /// and suppress unsupported descendants.
    pub fn retract(&mut self, ccs: &str, t_r: Timestamp) -> Result<Vec<Ccs>> {
        let record = self.store.get(ccs)?.clone();
        if let Some(profile) = self.profiles.get_mut(&record.author) {
            profile.retracted_pubs += 1;
            if profile.total_pubs > 0 {
                profile.retraction_rate =
                    f64::from(profile.retracted_pubs) / f64::from(profile.total_pubs);
            }
        }
        {
            let state = self.graph.node_mut(ccs)?;
            state.pi = 0.0;
            state.record(t_r, TransitionCause::RetractionSuppression);
        }
        self.ledger_tx(TxType::Deprecate, ccs, "retraction", 0.0, t_r, &self.system_caid.clone())?;
        let suppressed = suppress_retraction(
            &mut self.graph,
            ccs,
            self.config.graph.epsilon_floor,
            self.config.kernel.theta_reinforce,
            t_r,
        )?;
        for s in &suppressed {
            let pi = self.graph.nodes[s].pi;
            self.ledger_tx(TxType::Update, s, "retraction_suppression", pi, t_r, &self.system_caid.clone())?;
        }
        Ok(suppressed)
    }

    /// Gate claims whose truth utility falls below the propagation floor.
    pub fn utility_gate_pass(&mut self, utilities: &BTreeMap<Ccs, f64>) {
        let floor = self.config.utility.delta_floor;
        for (ccs, state) in self.graph.nodes.iter_mut() {
            if let Some(u) = utilities.get(ccs) {
                state.propagation_gated = crate::utility::propagation_gate(*u, floor);
            }
        }
    }

    /// Seal the current epoch and anchor its root in the ledger.
    pub fn seal_epoch(&mut self, now: Timestamp, nonce: u64) -> Result<u64> {
        let root_hex = {
            let epoch = self.ledger.seal_epoch(now, nonce)?;
            (epoch.epoch, crate::hashing::to_hex(&epoch.merkle_root))
        };
        let (number, hex) = root_hex;
        self.ledger_tx(
            TxType::Anchor,
            &format!("epoch:{number}"),
            &hex,
            0.0,
            now,
            &self.system_caid.clone(),
        )?;
        Ok(number)
    }

    pub fn verify_ledger(&self) -> ChainVerdict {
        self.ledger.verify_chain(&self.keys)
    }

    /// Belief of a claim as of a past instant, reconstructed from the ledger
    /// rather than live state.
    pub fn belief_as_of(&self, ccs: &str, as_of: Timestamp) -> Option<f64> {
        self.ledger
            .entries
            .iter()
            .filter(|e| e.ccs == ccs && e.t <= as_of && e.tx_type != TxType::Anchor)
            .next_back()
            .map(|e| e.pi_after)
    }

    /// Composite credibility scores of one claim.
    pub fn claim_scores(&self, ccs: &str, now: Timestamp) -> Result<ClaimScores> {
        let state = self.state(ccs)?;
        let c = &self.config.credibility;
        let citations = self.citations.get(ccs).cloned().unwrap_or_default();
        let clusters = citations
            .iter()
            .map(|e| e.cluster_id.as_str())
            .collect::<BTreeSet<_>>()
            .len()
            .max(1);
        let citation = citation_influence(
            &citations,
            now,
            c.lambda_citation_per_day,
            c.epsilon_entropy,
            clusters,
        )?;
        let replications = self.replications.get(ccs).cloned().unwrap_or_default();
        let replication = replication_score(&replications, &self.claim_provenance(ccs));
        let composite = crate::credibility::composite_support(
            citation.adjusted,
            replication.damped,
            &[],
        );
        Ok(ClaimScores {
            ccs: ccs.to_string(),
            pi: state.pi,
            citation_raw: citation.raw,
            citation_adjusted: citation.adjusted,
            replication_raw: replication.raw,
            replication_damped: replication.damped,
            composite_support: composite,
        })
    }

    // ---- persistence ----

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_vec_pretty(self).map_err(|e| BewaError::Io(e.to_string()))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| BewaError::Io(e.to_string()))
    }
}
