//! Engine configuration.
//!
//! Every tunable constant lives here, serde-loadable from one versioned TOML
//! or JSON file. Defaults are the engine's pinned calibration; per-domain
//! overrides belong in deployment config, not code.

use crate::error::{BewaError, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    /// Recorded in ledger headers; the engine only implements sha-256.
    pub hash_algorithm: String,
    /// Recorded in ledger headers; the engine only implements ed25519.
    pub signature_algorithm: String,
    pub credibility: CredibilityConfig,
    pub kernel: KernelConfig,
    pub graph: GraphConfig,
    pub utility: UtilityParams,
    pub api: ApiConfig,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            hash_algorithm: "sha-256".into(),
            signature_algorithm: "ed25519".into(),
            credibility: CredibilityConfig::default(),
            kernel: KernelConfig::default(),
            graph: GraphConfig::default(),
            utility: UtilityParams::default(),
            api: ApiConfig::default(),
        }
    }
}

impl EngineConfig {
    /// Load from a TOML or JSON file, keyed on extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            serde_json::from_str(&text).map_err(|e| BewaError::Io(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| BewaError::Io(e.to_string()))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CredibilityConfig {
    /// Author score weights (replication, citation, retraction, engagement).
    pub beta: [f64; 4],
    /// Retraction penalty steepness.
    pub gamma_retraction: f64,
    /// Replicability recovery factor.
    pub eta_recovery: f64,
    /// Review-count weight in peer engagement.
    pub theta1: f64,
    /// Editorial-role weight in peer engagement.
    pub theta2: f64,
    /// Editorial impact multiplier.
    pub omega_editorial: f64,
    /// Hard cap on the trust-overlaid engagement score.
    pub mu_max: f64,
    /// Citation entropy penalty strength.
    pub epsilon_entropy: f64,
    /// Citation decay rate per day (half-life of one year).
    pub lambda_citation_per_day: f64,
    /// Semantic equivalence threshold.
    pub theta_s: f64,
    /// Semantic discount factor for replication via equivalence.
    pub eta_equivalence: f64,
}

impl Default for CredibilityConfig {
    fn default() -> Self {
        Self {
            beta: [2.0, 0.5, 2.0, 1.0],
            gamma_retraction: 0.5,
            eta_recovery: 0.25,
            theta1: 1.0,
            theta2: 2.0,
            omega_editorial: 2.0,
            mu_max: 5.0,
            epsilon_entropy: 0.5,
            lambda_citation_per_day: std::f64::consts::LN_2 / 365.0,
            theta_s: 0.85,
            eta_equivalence: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayMode {
    /// Literal exponential decay toward 0.
    ToZero,
    /// Entropy-consistent decay toward the neutral 0.5.
    ToNeutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContradictionForm {
    /// Multiplicative downdate pi * (1 - w').
    Multiplicative,
    /// Bayes-form downdate with likelihood 1 - w'.
    Bayes,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelConfig {
    /// Supportive likelihood scale (replication, endorsement).
    pub lambda_plus: f64,
    /// Contradiction likelihood scale.
    pub lambda_minus: f64,
    /// Citation likelihood scale.
    pub eta_citation: f64,
    /// Reinforcement threshold: evidence above it resets the decay clock.
    pub theta_reinforce: f64,
    /// Contradiction mass beyond which belief collapses to probation.
    pub theta_contradict: f64,
    /// Probationary collapse value.
    pub pi_dagger: f64,
    /// Contradiction mass beyond which a claim is terminally discredited.
    pub kappa_max: f64,
    /// Per-event smoothing cap on posterior movement.
    pub delta_smoothing: f64,
    /// Beliefs below this are marked stale.
    pub epsilon_stale: f64,
    /// Prior combination weights for (author, venue, method, base-rate).
    pub prior_weights: [f64; 4],
    pub contradiction_form: ContradictionForm,
    pub decay: DecayConfig,
    /// Newly ingested claims start probational when set.
    pub probation_enabled: bool,
    pub probation: ProbationConfig,
    /// Minimum qualifying replications for a reset.
    pub gamma_reset: u32,
    /// Minimum belief a replication must carry to qualify for a reset.
    pub delta_reset: f64,
    /// Reset modifier calibration constant.
    pub eta_reset: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            lambda_plus: 1.0,
            lambda_minus: 1.0,
            eta_citation: 0.8,
            theta_reinforce: 0.55,
            theta_contradict: 1.5,
            pi_dagger: 0.01,
            kappa_max: 3.0,
            delta_smoothing: 0.2,
            epsilon_stale: 0.01,
            prior_weights: [0.4, 0.2, 0.2, 0.2],
            contradiction_form: ContradictionForm::Multiplicative,
            decay: DecayConfig::default(),
            probation_enabled: true,
            probation: ProbationConfig::default(),
            gamma_reset: 2,
            delta_reset: 0.5,
            eta_reset: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DecayConfig {
    pub mode: DecayMode,
    /// Base decay rate per day.
    pub lambda_base: f64,
    /// Age coefficient (log-amplified with claim age).
    pub alpha_age: f64,
    /// Isolation coefficient.
    pub beta_isolation: f64,
    /// Replication count granting decay immunity.
    pub rho_min: u32,
    /// Citation count granting decay immunity (jointly with rho_min).
    pub kappa_min_citations: u32,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            mode: DecayMode::ToZero,
            lambda_base: 0.01,
            alpha_age: 0.0,
            beta_isolation: 0.0,
            rho_min: 2,
            kappa_min_citations: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbationConfig {
    /// Initial probationary belief.
    pub pi_initial: f64,
    /// Citation maturation weight.
    pub lambda_citation: f64,
    /// Replication maturation weight.
    pub lambda_replication: f64,
    /// Promotion threshold.
    pub pi_min: f64,
    /// Maximum probation duration in days.
    pub delta_max_days: f64,
    /// Post-expiry decay rate per day.
    pub lambda_expiry: f64,
}

impl Default for ProbationConfig {
    fn default() -> Self {
        Self {
            pi_initial: 0.05,
            lambda_citation: 0.1,
            lambda_replication: 0.3,
            pi_min: 0.5,
            delta_max_days: 180.0,
            lambda_expiry: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Sorted-signature asynchronous sweeps; fully reproducible.
    Deterministic,
    /// High-impact nodes first (by absolute last delta).
    Priority,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphConfig {
    pub damping: f64,
    pub delta_convergence: f64,
    pub max_iters: u32,
    pub schedule: Schedule,
    /// Conflict-edge instantiation threshold on both beliefs.
    pub delta_conflict: f64,
    /// Coherence threshold: both above it is a violation to resolve.
    pub theta_coherence: f64,
    /// Cluster instability flag threshold.
    pub theta_instability: f64,
    /// Semantic anti-similarity threshold for conflict detection.
    pub theta_antisim: f64,
    /// Retraction suppression belief floor.
    pub epsilon_floor: f64,
    /// Linkage weight components (semantic, logical, evidential).
    pub alpha_linkage: [f64; 3],
    /// Per-edge-type propagation decay factors.
    pub edge_decay: EdgeDecay,
    /// Conflict coexistence slack.
    pub epsilon_coexistence: f64,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            damping: 0.5,
            delta_convergence: 1e-6,
            max_iters: 100,
            schedule: Schedule::Deterministic,
            delta_conflict: 0.5,
            theta_coherence: 0.6,
            theta_instability: 0.15,
            theta_antisim: 0.9,
            epsilon_floor: 0.05,
            alpha_linkage: [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            edge_decay: EdgeDecay::default(),
            epsilon_coexistence: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeDecay {
    pub deductive: f64,
    pub evidential: f64,
    pub semantic: f64,
    pub contrapositive: f64,
    pub replicative: f64,
}

impl Default for EdgeDecay {
    fn default() -> Self {
        Self {
            deductive: 1.0,
            evidential: 1.0,
            semantic: 1.0,
            contrapositive: 1.0,
            replicative: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct UtilityParams {
    /// Truth-utility weights (replication, distinctiveness, influence, echo).
    pub lambda: [f64; 4],
    /// Propagation floor: claims with utility below it are gated.
    pub delta_floor: f64,
    /// Domain risk threshold demanding authoritative replicated claims.
    pub gamma_risk: f64,
    /// Normalization maxima for false-positive / false-negative loss.
    pub lambda_fp_max: f64,
    pub lambda_fn_max: f64,
    /// Default per-claim loss weights when a domain supplies none.
    pub lambda_fp_default: f64,
    pub lambda_fn_default: f64,
    /// True-positive utility gain.
    pub u_tp: f64,
    /// Freshness window in days.
    pub freshness_days: f64,
    /// Multiplier applied to fresh claims with pending replication.
    pub freshness_boost: f64,
    /// Scale on the (1 - rho_d) risk attenuation factor.
    pub risk_attenuation: f64,
}

impl Default for UtilityParams {
    fn default() -> Self {
        Self {
            lambda: [1.0, 1.0, 1.0, 1.0],
            delta_floor: 0.0,
            gamma_risk: 0.75,
            lambda_fp_max: 1.0,
            lambda_fn_max: 1.0,
            lambda_fp_default: 0.5,
            lambda_fn_default: 0.5,
            u_tp: 1.0,
            freshness_days: 90.0,
            freshness_boost: 1.25,
            risk_attenuation: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ApiConfig {
    pub bind: String,
    /// Requests per principal per minute.
    pub rate_limit_per_minute: u32,
    /// Accepted bearer tokens. Overridden by BEWA_TOKENS_FILE when set.
    pub tokens: Vec<String>,
}

impl Default for ApiConfig {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1:8420".into(),
            rate_limit_per_minute: 100,
            tokens: vec![],
        }
    }
}
