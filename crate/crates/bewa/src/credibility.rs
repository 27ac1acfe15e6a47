//! Author scores, retraction penalties, peer-review engagement, citation
//! influence with decay and entropy penalties, and replication scores with
//! the semantic-equivalence extension. These feed priors and evidence
//! weights.
//!
//! All logarithms are natural; the simulation module's entropy metric (bits)
//! is the one deliberate exception engine-wide.

use crate::claim::{Caid, Ccs, Timestamp};
use crate::error::{BewaError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const SECONDS_PER_DAY: f64 = 86_400.0;

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReviewRecord {
    /// Editor- or community-assigned quality; missing values impute 0.5.
    pub quality: Option<f64>,
    pub verified: bool,
    pub t: Timestamp,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuthorProfile {
    pub caid: Caid,
    /// Replication success rate over testable claims only.
    pub replication_rate: f64,
    pub retraction_rate: f64,
    /// Field-normalised citation count, >= 0.
    pub citation_norm: f64,
    pub reviews: Vec<ReviewRecord>,
    pub editorial_roles: u32,
    pub years_active: f64,
    pub total_pubs: u32,
    pub retracted_pubs: u32,
    pub institutional_trust: f64,
}

impl AuthorProfile {
    pub fn new(caid: Caid) -> Self {
        Self {
            caid,
            replication_rate: 0.0,
            retraction_rate: 0.0,
            citation_norm: 0.0,
            reviews: vec![],
            editorial_roles: 0,
            years_active: 0.0,
            total_pubs: 0,
            retracted_pubs: 0,
            institutional_trust: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementScores {
    /// Raw count-based engagement.
    pub mu: f64,
    /// Quality-adjusted engagement (missing review quality imputed 0.5).
    pub mu_star: f64,
    /// Institutional-trust overlay, capped at mu_max.
    pub mu_dagger: f64,
}

/// Peer review engagement. The experience denominator keeps long careers
/// from inflating the score; zero activity scores zero regardless of tenure.
pub fn peer_engagement(
    p: &AuthorProfile,
    theta1: f64,
    theta2: f64,
    mu_max: f64,
) -> EngagementScores {
    let denom = 1.0 + (1.0 + p.years_active).ln();
    let roles = theta2 * f64::from(p.editorial_roles);
    let mu = (theta1 * p.reviews.len() as f64 + roles) / denom;
    let quality_sum: f64 = p.reviews.iter().map(|r| r.quality.unwrap_or(0.5)).sum();
    let mu_star = (theta1 * quality_sum + roles) / denom;
    let mu_dagger = (p.institutional_trust * mu_star).min(mu_max);
    EngagementScores {
        mu,
        mu_star,
        mu_dagger,
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AuthorScoreParams {
    pub beta: [f64; 4],
    pub theta1: f64,
    pub theta2: f64,
    pub mu_max: f64,
}

/// Composite author score in (0,1): increasing in replication rate and peer
/// engagement, decreasing in retraction rate, with logarithmic (anti-gaming)
/// citation gain. The engagement term is the trust-overlaid mu-dagger.
pub fn author_score(p: &AuthorProfile, params: &AuthorScoreParams) -> Result<f64> {
    if params.beta.iter().any(|b| *b < 0.0) {
        return Err(BewaError::NegativeWeight);
    }
    let [b1, b2, b3, b4] = params.beta;
    let mu = peer_engagement(p, params.theta1, params.theta2, params.mu_max).mu_dagger;
    Ok(sigmoid(
        b1 * p.replication_rate + b2 * (1.0 + p.citation_norm).ln() - b3 * p.retraction_rate
            + b4 * mu,
    ))
}

/// Retraction penalty: sublinear in career size so early-career authors are
/// not disproportionately punished.
pub fn retraction_penalty(retracted: u32, total: f64, gamma: f64) -> f64 {
    gamma * f64::from(retracted) / (1.0 + (1.0 + total).ln())
}

/// Retraction-adjusted score with replicability-weighted recovery. Any
/// recorded retraction keeps the score strictly below 1 permanently.
pub fn retraction_adjusted_score(
    base_score: f64,
    p: &AuthorProfile,
    gamma: f64,
    eta: f64,
) -> Result<f64> {
    if gamma < 0.0 || eta < 0.0 {
        return Err(BewaError::NegativeWeight);
    }
    let penalty = retraction_penalty(p.retracted_pubs, f64::from(p.total_pubs), gamma);
    let adjusted = (base_score - penalty + eta * p.replication_rate).clamp(0.0, 1.0);
    if p.retracted_pubs > 0 {
        Ok(adjusted.min(1.0 - 1e-9))
    } else {
        Ok(adjusted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CitationIntent {
    Refuting,
    Neutral,
    Supportive,
}

impl CitationIntent {
    pub fn sign(self) -> f64 {
        match self {
            CitationIntent::Refuting => -1.0,
            CitationIntent::Neutral => 0.0,
            CitationIntent::Supportive => 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CitationEvent {
    pub citing_doc_id: String,
    pub cited_ccs: Ccs,
    pub t: Timestamp,
    /// Credibility of the citing document in [0,1].
    pub credibility: f64,
    pub intent: CitationIntent,
    /// Venue/author cluster for the entropy penalty.
    pub cluster_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CitationScores {
    /// Raw decayed, intent-signed influence.
    pub raw: f64,
    /// Entropy-penalised influence.
    pub adjusted: f64,
    /// Cluster entropy ratio in [0,1]; 0 means maximal redundancy.
    pub entropy_ratio: f64,
}

/// Citation influence with exponential temporal decay and an entropy penalty
/// against redundant citation clusters. `lambda_per_day` decays per elapsed
/// day; `cluster_count` is the K the entropy ratio normalises against, with
/// the single-cluster ratio defined as 0 (maximal redundancy).
pub fn citation_influence(
    events: &[CitationEvent],
    now: Timestamp,
    lambda_per_day: f64,
    epsilon: f64,
    cluster_count: usize,
) -> Result<CitationScores> {
    if events.iter().any(|e| e.t > now) {
        return Err(BewaError::FutureCitation);
    }
    let raw: f64 = events
        .iter()
        .map(|e| {
            let days = (now - e.t) as f64 / SECONDS_PER_DAY;
            e.intent.sign() * (-lambda_per_day * days).exp() * e.credibility
        })
        .sum();

    let entropy_ratio = if cluster_count <= 1 || events.is_empty() {
        0.0
    } else {
        let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
        for e in events {
            *counts.entry(e.cluster_id.as_str()).or_default() += 1;
        }
        let n = events.len() as f64;
        let entropy: f64 = counts
            .values()
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum();
        (entropy / (cluster_count as f64).ln()).clamp(0.0, 1.0)
    };

    let adjusted = raw * (1.0 - epsilon * (1.0 - entropy_ratio));
    Ok(CitationScores {
        raw,
        adjusted,
        entropy_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicationOutcome {
    Failed,
    Inconclusive,
    Success,
}

impl ReplicationOutcome {
    pub fn sign(self) -> f64 {
        match self {
            ReplicationOutcome::Failed => -1.0,
            ReplicationOutcome::Inconclusive => 0.0,
            ReplicationOutcome::Success => 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplicationEvent {
    pub replicating_doc_id: String,
    pub target_ccs: Ccs,
    pub outcome: ReplicationOutcome,
    /// Credibility weight of the replicating study.
    pub weight: f64,
    pub authors: BTreeSet<Caid>,
    pub institutions: BTreeSet<String>,
    pub funding: BTreeSet<String>,
    pub conditions: BTreeSet<String>,
    pub domain: String,
    pub t: Timestamp,
}

/// Provenance sets of the original claim, against which replication
/// independence is judged.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ClaimProvenance {
    pub authors: BTreeSet<Caid>,
    pub institutions: BTreeSet<String>,
    pub funding: BTreeSet<String>,
}

impl ClaimProvenance {
    fn independent(&self, e: &ReplicationEvent) -> bool {
        e.authors.is_disjoint(&self.authors)
            && e.institutions.is_disjoint(&self.institutions)
            && e.funding.is_disjoint(&self.funding)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationScores {
    /// Signed sum over independent events.
    pub raw: f64,
    /// Log-damped score; the damping extends oddly to the negative branch so
    /// failed replications stay penalising.
    pub damped: f64,
    pub qualifying_events: usize,
}

pub fn replication_score(
    events: &[ReplicationEvent],
    origin: &ClaimProvenance,
) -> ReplicationScores {
    let qualifying: Vec<&ReplicationEvent> =
        events.iter().filter(|e| origin.independent(e)).collect();
    let raw: f64 = qualifying
        .iter()
        .map(|e| e.outcome.sign() * e.weight)
        .sum();
    let damped = if raw >= 0.0 {
        (1.0 + raw).ln()
    } else {
        -(1.0 - raw).ln()
    };
    ReplicationScores {
        raw,
        damped,
        qualifying_events: qualifying.len(),
    }
}

/// Unit-normalised embedding vector used for semantic equivalence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub values: Vec<f64>,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(BewaError::NotNormalized);
        }
        Ok(Self { values })
    }

    /// Normalise an arbitrary non-zero vector.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(BewaError::NotNormalized);
        }
        Ok(Self {
            values: values.into_iter().map(|v| v / norm).collect(),
        })
    }

    pub fn dims(&self) -> usize {
        self.values.len()
    }
}

/// Cosine similarity between unit vectors; exactly symmetric.
pub fn semantic_equivalence(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(BewaError::DimensionMismatch);
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x * y)
        .sum())
}

/// Extend a claim's damped replication score with discounted scores of its
/// semantic equivalents. Every equivalent must clear the threshold.
pub fn extended_replication(
    own_damped: f64,
    equivalents: &[(Ccs, f64, f64)], // (ccs, similarity alpha, damped score)
    eta: f64,
    theta_s: f64,
) -> Result<f64> {
    if equivalents.iter().any(|(_, alpha, _)| *alpha <= theta_s) {
        return Err(BewaError::ThresholdViolation);
    }
    Ok(own_damped
        + eta
            * equivalents
                .iter()
                .map(|(_, alpha, damped)| alpha * damped)
                .sum::<f64>())
}

/// Composite external support handed to the reinforcement check: citation
/// influence plus replication impact plus belief-weighted equivalent support.
pub fn composite_support(
    citation_influence: f64,
    replication_impact: f64,
    equivalent_support: &[(f64, f64)], // (semantic weight, neighbor belief)
) -> f64 {
    citation_influence
        + replication_impact
        + equivalent_support
            .iter()
            .map(|(w, pi)| w * pi)
            .sum::<f64>()
}

/// Attenuate an author score into a foreign domain by the affinity
/// coefficient; never exceeds the home-domain score.
pub fn cross_domain_score(home_score: f64, affinity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&affinity) {
        return Err(BewaError::AffinityOutOfRange);
    }
    Ok(home_score * affinity)
}
