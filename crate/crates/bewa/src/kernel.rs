//! Per-claim probabilistic core: prior formation, weighted Bayesian updates,
//! contradiction downdates, temporal decay, reinforcement resets, and the
//! probation lifecycle.
//!
//! Every operation is a pure state transition: old state in, new state out.
//! The engine serialises writes per claim; snapshots are freely shareable.

use crate::claim::{Ccs, Timestamp};
use crate::config::{ContradictionForm, DecayConfig, DecayMode, KernelConfig, ProbationConfig};
use crate::credibility::{sigmoid, SECONDS_PER_DAY};
use crate::error::{BewaError, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefStatus {
    Probational,
    Canonical,
    Stale,
    Quarantined,
    TerminallyDiscredited,
}

impl BeliefStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            BeliefStatus::Probational => "probational",
            BeliefStatus::Canonical => "canonical",
            BeliefStatus::Stale => "stale",
            BeliefStatus::Quarantined => "quarantined",
            BeliefStatus::TerminallyDiscredited => "terminally_discredited",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionCause {
    Ingest,
    Prior,
    Update,
    Contradiction,
    Decay,
    Reinforce,
    ReplicativeReset,
    ProbationMature,
    ProbationPromote,
    ProbationExpire,
    ConflictResolution,
    Quarantine,
    Partition,
    RetractionSuppression,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub t: Timestamp,
    pub pi: f64,
    pub cause: TransitionCause,
}

/// Belief state of one claim. `pi` is the claim's own evidence-level belief;
/// the graph layer derives a propagated network view from it without writing
/// back, so the kernel history stays the single source of truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    pub ccs: Ccs,
    pub pi: f64,
    pub status: BeliefStatus,
    pub last_reinforced_at: Timestamp,
    pub created_at: Timestamp,
    /// Belief at the start of the current decay streak (reset bound input).
    pub pre_decay_snapshot: f64,
    /// Accumulated contradiction mass.
    pub contradiction_mass: f64,
    pub history: Vec<HistoryEntry>,
    /// Supportive evidence mass, consumed by conflict resolution.
    pub evidence_mass: f64,
    pub replication_count: u32,
    pub citation_count: u32,
    /// Set when truth utility falls below the propagation floor.
    pub propagation_gated: bool,
    /// Outgoing influence multiplier, attenuated by cluster instability.
    pub propagation_factor: f64,
}

impl BeliefState {
    pub fn new(ccs: Ccs, pi: f64, status: BeliefStatus, t: Timestamp) -> Self {
        Self {
            ccs,
            pi,
            status,
            last_reinforced_at: t,
            created_at: t,
            pre_decay_snapshot: pi,
            contradiction_mass: 0.0,
            history: vec![HistoryEntry {
                t,
                pi,
                cause: TransitionCause::Ingest,
            }],
            evidence_mass: 0.0,
            replication_count: 0,
            citation_count: 0,
            propagation_gated: false,
            propagation_factor: 1.0,
        }
    }

    pub fn record(&mut self, t: Timestamp, cause: TransitionCause) {
        self.history.push(HistoryEntry {
            t,
            pi: self.pi,
            cause,
        });
    }

    /// Masked states neither send nor receive during propagation.
    pub fn propagation_masked(&self) -> bool {
        matches!(
            self.status,
            BeliefStatus::Probational | BeliefStatus::Quarantined
        ) || self.propagation_gated
    }
}

/// Prior inputs; absence is distinguishable from zero.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct PriorInputs {
    pub author_trust: Option<f64>,
    pub venue_credibility: Option<f64>,
    pub methodological_rigour: Option<f64>,
    pub domain_base_rate: Option<f64>,
}

/// Prior formation: a weight-renormalised convex combination of the present
/// inputs with the absent mass assigned to the neutral 0.5. With nothing
/// known the prior is exactly 1/2; otherwise the result is clamped into
/// [0.01, 0.99] so no claim starts dogmatically settled.
pub fn prior(inputs: &PriorInputs, weights: &[f64; 4]) -> Result<f64> {
    if weights.iter().any(|w| *w < 0.0) {
        return Err(BewaError::NegativeWeight);
    }
    let pairs = [
        (inputs.author_trust, weights[0]),
        (inputs.venue_credibility, weights[1]),
        (inputs.methodological_rigour, weights[2]),
        (inputs.domain_base_rate, weights[3]),
    ];
    for (v, _) in &pairs {
        if let Some(x) = v {
            if !(0.0..=1.0).contains(x) {
                return Err(BewaError::InputOutOfRange);
            }
        }
    }
    let present: Vec<(f64, f64)> = pairs.iter().filter_map(|(v, w)| v.map(|x| (x, *w))).collect();
    if present.is_empty() {
        return Ok(0.5);
    }
    let total: f64 = present.iter().map(|(_, w)| w).sum();
    let scale = if total > 1.0 { 1.0 / total } else { 1.0 };
    let weighted: f64 = present.iter().map(|(x, w)| x * w * scale).sum();
    let used: f64 = total * scale;
    Ok((weighted + (1.0 - used) * 0.5).clamp(0.01, 0.99))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    Replication,
    Endorsement,
    Citation,
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceUnit {
    pub kind: EvidenceKind,
    /// Quality score in [0,1].
    pub quality: f64,
    pub source_doc: String,
    pub t: Timestamp,
}

/// Map evidence quality to a likelihood weight per kind. The clamp keeps the
/// weight strictly inside (0,1): dogmatic evidence is inadmissible. The
/// contradiction branch is the counter-weight consumed by [`contradict`].
pub fn evidence_weight(e: &EvidenceUnit, cfg: &KernelConfig) -> f64 {
    let value = match e.kind {
        EvidenceKind::Replication | EvidenceKind::Endorsement => {
            cfg.lambda_plus * sigmoid(e.quality)
        }
        EvidenceKind::Contradiction => cfg.lambda_minus * sigmoid(-e.quality),
        EvidenceKind::Citation => cfg.eta_citation * sigmoid(e.quality),
    };
    value.clamp(1e-6, 1.0 - 1e-6)
}

/// One weighted Bayesian update: pi' = pi*w / (pi*w + (1-pi)*(1-w)).
/// Neutral evidence (w = 1/2) is the identity; w above 1/2 raises belief.
pub fn weighted_update(pi: f64, w: f64) -> Result<f64> {
    if !(w > 0.0 && w < 1.0) {
        return Err(BewaError::DegenerateWeight);
    }
    let numerator = pi * w;
    Ok(numerator / (numerator + (1.0 - pi) * (1.0 - w)))
}

/// Fold an evidence sequence into a posterior in time order. Each step's
/// movement is capped at `delta_cap` (epistemic regularisation); with the cap
/// slack the fold equals the closed product form over likelihoods, and is
/// therefore order-independent.
pub fn cumulative_posterior(
    pi0: f64,
    evidence: &[EvidenceUnit],
    cfg: &KernelConfig,
    delta_cap: f64,
) -> Result<f64> {
    if evidence.windows(2).any(|w| w[0].t > w[1].t) {
        return Err(BewaError::UnsortedEvidence);
    }
    let mut pi = pi0;
    for e in evidence {
        let target = weighted_update(pi, evidence_weight(e, cfg))?;
        let step = (target - pi).clamp(-delta_cap, delta_cap);
        pi += step;
    }
    Ok(pi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContradictOutcome {
    pub pi: f64,
    pub kappa: f64,
    pub status: Option<BeliefStatus>,
    /// Set when accumulated mass crossed the collapse threshold.
    pub collapsed: bool,
}

/// Apply counter-evidence of weight `w'`. The default operator is the
/// multiplicative downdate pi*(1-w'); the Bayes form treats (1-w') as the
/// evidence likelihood. Accumulated contradiction mass beyond the collapse
/// threshold pins belief to the probationary value; beyond kappa_max the
/// claim is terminally discredited and its belief is zero permanently.
pub fn contradict(
    pi: f64,
    counter_weight: f64,
    kappa: f64,
    cfg: &KernelConfig,
) -> Result<ContradictOutcome> {
    if !(0.0..=1.0).contains(&counter_weight) {
        return Err(BewaError::DegenerateWeight);
    }
    let kappa_next = kappa + counter_weight;
    if kappa_next > cfg.kappa_max {
        return Ok(ContradictOutcome {
            pi: 0.0,
            kappa: kappa_next,
            status: Some(BeliefStatus::TerminallyDiscredited),
            collapsed: true,
        });
    }
    if kappa_next > cfg.theta_contradict {
        return Ok(ContradictOutcome {
            pi: cfg.pi_dagger,
            kappa: kappa_next,
            status: Some(BeliefStatus::Probational),
            collapsed: true,
        });
    }
    let pi_next = match cfg.contradiction_form {
        ContradictionForm::Multiplicative => pi * (1.0 - counter_weight),
        ContradictionForm::Bayes => {
            let w = (1.0 - counter_weight).clamp(1e-9, 1.0 - 1e-9);
            weighted_update(pi, w)?
        }
    };
    Ok(ContradictOutcome {
        pi: pi_next,
        kappa: kappa_next,
        status: None,
        collapsed: false,
    })
}

/// Compound decay rate: base rate plus log-amplified age plus isolation.
pub fn compound_rate(cfg: &DecayConfig, age_days: f64, isolation: f64) -> f64 {
    cfg.lambda_base + cfg.alpha_age * (1.0 + age_days.max(0.0)).ln() + cfg.beta_isolation * isolation
}

/// Exponential decay of unreinforced belief toward the mode's attractor.
/// Claims with enough replications and citations are decay-immune. The
/// pre-decay snapshot is retained at the start of a decay streak so a later
/// replicative reset can bound its recovery.
pub fn decay(
    state: &BeliefState,
    now: Timestamp,
    cfg: &DecayConfig,
    isolation: f64,
    epsilon_stale: f64,
) -> Result<BeliefState> {
    if now < state.last_reinforced_at {
        return Err(BewaError::ClockRegression);
    }
    let mut next = state.clone();
    if state.replication_count >= cfg.rho_min && state.citation_count >= cfg.kappa_min_citations {
        return Ok(next); // decay immunity
    }
    let dt_days = (now - state.last_reinforced_at) as f64 / SECONDS_PER_DAY;
    if dt_days == 0.0 {
        return Ok(next);
    }
    let age_days = (now - state.created_at) as f64 / SECONDS_PER_DAY;
    let rate = compound_rate(cfg, age_days, isolation);
    let factor = (-rate * dt_days).exp();
    if state
        .history
        .last()
        .map(|h| h.cause != TransitionCause::Decay)
        .unwrap_or(true)
    {
        next.pre_decay_snapshot = state.pi;
    }
    next.pi = match cfg.mode {
        DecayMode::ToZero => state.pi * factor,
        DecayMode::ToNeutral => 0.5 + (state.pi - 0.5) * factor,
    };
    if next.pi < epsilon_stale && next.status == BeliefStatus::Canonical {
        next.status = BeliefStatus::Stale;
    }
    next.record(now, TransitionCause::Decay);
    Ok(next)
}

/// Belief half-life in days under a constant compound rate.
pub fn half_life(rate: f64) -> Result<f64> {
    if rate <= 0.0 {
        return Err(BewaError::ZeroRate);
    }
    Ok(std::f64::consts::LN_2 / rate)
}

/// A reinforcement event: evidence strictly above the threshold resets the
/// decay clock, applies its update, and clears staleness.
pub fn reinforce(
    state: &BeliefState,
    weight: f64,
    t: Timestamp,
    theta_r: f64,
) -> Result<BeliefState> {
    if weight <= theta_r {
        return Err(BewaError::BelowThreshold);
    }
    let mut next = state.clone();
    next.pi = weighted_update(state.pi, weight)?;
    next.last_reinforced_at = t;
    if next.status == BeliefStatus::Stale {
        next.status = BeliefStatus::Canonical;
    }
    next.pre_decay_snapshot = next.pi;
    next.record(t, TransitionCause::Reinforce);
    Ok(next)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResetReplication {
    pub pi: f64,
    pub weight: f64,
    pub domain: String,
}

/// Recompute belief from independent replications. Only replications with
/// belief above `delta_reset` qualify; all domains must match the claim's
/// domain or be bridged by the cross-domain map. The recovered belief is
/// bounded by the reset modifier times the pre-decay snapshot, and terminally
/// discredited claims are immune.
pub fn replicative_reset(
    state: &BeliefState,
    replications: &[ResetReplication],
    claim_domains: &[String],
    cross_map: &[(String, String)],
    cfg: &KernelConfig,
    now: Timestamp,
) -> Result<BeliefState> {
    if state.status == BeliefStatus::TerminallyDiscredited {
        return Err(BewaError::TerminallyDiscredited);
    }
    for r in replications {
        let domain_ok = claim_domains.contains(&r.domain)
            || cross_map.iter().any(|(a, b)| {
                (a == &r.domain && claim_domains.contains(b))
                    || (b == &r.domain && claim_domains.contains(a))
            });
        if !domain_ok {
            return Err(BewaError::DomainMismatch);
        }
    }
    let qualifying: Vec<&ResetReplication> = replications
        .iter()
        .filter(|r| r.pi > cfg.delta_reset)
        .collect();
    if (qualifying.len() as u32) < cfg.gamma_reset {
        return Err(BewaError::InsufficientReplications);
    }
    let weight_sum: f64 = qualifying.iter().map(|r| r.weight).sum();
    if weight_sum <= 0.0 {
        return Err(BewaError::InsufficientReplications);
    }
    let mean: f64 = qualifying.iter().map(|r| r.weight * r.pi).sum::<f64>() / weight_sum;
    let modifier = (1.0f64).min((1.0 + qualifying.len() as f64).ln() * cfg.eta_reset);
    let mut next = state.clone();
    next.pi = mean.min(modifier * state.pre_decay_snapshot);
    next.last_reinforced_at = now;
    if next.status == BeliefStatus::Stale {
        next.status = BeliefStatus::Canonical;
    }
    next.record(now, TransitionCause::ReplicativeReset);
    Ok(next)
}

/// One probation lifecycle step. Maturation grows from the probationary
/// floor with citation and replication support; reaching the promotion
/// threshold inside the window promotes to canonical, while expiry decays
/// the floor value and archives the claim as stale.
pub fn probation_step(
    state: &BeliefState,
    citation_score: f64,
    replication_score: f64,
    now: Timestamp,
    cfg: &ProbationConfig,
) -> Result<BeliefState> {
    if state.status != BeliefStatus::Probational {
        return Err(BewaError::NotProbational);
    }
    let mut next = state.clone();
    let maturation = (cfg.pi_initial
        + cfg.lambda_citation * citation_score
        + cfg.lambda_replication * replication_score)
        .clamp(0.0, 1.0);
    let deadline = state.created_at + (cfg.delta_max_days * SECONDS_PER_DAY) as Timestamp;
    if maturation >= cfg.pi_min && now <= deadline {
        next.pi = maturation;
        next.status = BeliefStatus::Canonical;
        next.last_reinforced_at = now;
        next.pre_decay_snapshot = maturation;
        next.record(now, TransitionCause::ProbationPromote);
    } else if now >= deadline {
        let overdue_days = (now - deadline) as f64 / SECONDS_PER_DAY;
        next.pi = cfg.pi_initial * (-cfg.lambda_expiry * overdue_days).exp();
        next.status = BeliefStatus::Stale;
        next.record(now, TransitionCause::ProbationExpire);
    } else {
        next.pi = maturation;
        next.record(now, TransitionCause::ProbationMature);
    }
    Ok(next)
}

/// Binary Shannon entropy in natural units; 0log0 taken as 0.
pub fn belief_entropy(pi: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.ln() };
    term(pi) + term(1.0 - pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> KernelConfig {
        KernelConfig::default()
    }

    #[test]
    fn prior_neutrality_and_fixed_point() {
        let w = [0.4, 0.2, 0.2, 0.2];
        assert_eq!(prior(&PriorInputs::default(), &w).unwrap(), 0.5);

        let all_half = PriorInputs {
            author_trust: Some(0.5),
            venue_credibility: Some(0.5),
            methodological_rigour: Some(0.5),
            domain_base_rate: Some(0.5),
        };
        for weights in [[0.4, 0.2, 0.2, 0.2], [0.9, 0.9, 0.9, 0.9], [0.1, 0.0, 0.0, 0.0]] {
            assert!((prior(&all_half, &weights).unwrap() - 0.5).abs() < 1e-12);
        }

        let all_one = PriorInputs {
            author_trust: Some(1.0),
            venue_credibility: Some(1.0),
            methodological_rigour: Some(1.0),
            domain_base_rate: Some(1.0),
        };
        assert_eq!(prior(&all_one, &[0.25; 4]).unwrap(), 0.99);

        let bad = PriorInputs {
            author_trust: Some(1.5),
            ..Default::default()
        };
        assert_eq!(
            prior(&bad, &[0.25; 4]).unwrap_err(),
            BewaError::InputOutOfRange
        );
    }

    #[test]
    fn evidence_weight_branches() {
        let cfg = cfg();
        let e = |kind, quality| EvidenceUnit {
            kind,
            quality,
            source_doc: "d".into(),
            t: 0,
        };
        assert!((evidence_weight(&e(EvidenceKind::Replication, 0.0), &cfg) - 0.5).abs() < 1e-12);
        let w = evidence_weight(&e(EvidenceKind::Citation, 1.0), &cfg);
        assert!((w - 0.584_846_862_904_003_9).abs() < 1e-12);
        let w = evidence_weight(&e(EvidenceKind::Contradiction, 1.0), &cfg);
        assert!((w - 0.268_941_421_369_995_1).abs() < 1e-12);
    }

    #[test]
    fn weighted_update_examples() {
        assert!((weighted_update(0.2, 0.5).unwrap() - 0.2).abs() < 1e-15);
        assert!((weighted_update(0.5, 0.7).unwrap() - 0.7).abs() < 1e-15);
        assert!((weighted_update(0.6, 0.9).unwrap() - 0.931_034_482_758_620_8).abs() < 1e-12);
        assert_eq!(
            weighted_update(0.5, 0.0).unwrap_err(),
            BewaError::DegenerateWeight
        );
        assert_eq!(
            weighted_update(0.5, 1.0).unwrap_err(),
            BewaError::DegenerateWeight
        );
    }

    #[test]
    fn update_contradict_duality() {
        // weighted_update(pi, w) then weighted_update(result, 1-w) returns pi
        for pi in [0.1, 0.3, 0.5, 0.77] {
            for w in [0.2, 0.5, 0.9] {
                let up = weighted_update(pi, w).unwrap();
                let back = weighted_update(up, 1.0 - w).unwrap();
                assert!((back - pi).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cumulative_posterior_examples() {
        let cfg = cfg();
        assert_eq!(cumulative_posterior(0.5, &[], &cfg, 1.0).unwrap(), 0.5);

        // two supports of weight 0.7 each: 0.7 then 0.49/0.58
        // (weight 0.7 arises from replication quality ln(7/3)-inverse; build
        // the sequence directly at the update level instead)
        let mut pi = 0.5;
        for _ in 0..2 {
            pi = weighted_update(pi, 0.7).unwrap();
        }
        assert!((pi - 0.844_827_586_206_896_6).abs() < 1e-12);

        // smoothing cap: a near-certain support moves at most delta
        let mut c = cfg.clone();
        c.lambda_plus = 0.99 / sigmoid(1.0); // weight 0.99 at quality 1
        let e = EvidenceUnit {
            kind: EvidenceKind::Replication,
            quality: 1.0,
            source_doc: "d".into(),
            t: 0,
        };
        let w = evidence_weight(&e, &c);
        assert!((w - 0.99).abs() < 1e-12);
        let capped = cumulative_posterior(0.5, &[e], &c, 0.2).unwrap();
        assert!((capped - 0.7).abs() < 1e-12);
    }

    #[test]
    fn cumulative_posterior_rejects_unsorted() {
        let cfg = cfg();
        let e = |t| EvidenceUnit {
            kind: EvidenceKind::Citation,
            quality: 0.5,
            source_doc: "d".into(),
            t,
        };
        assert_eq!(
            cumulative_posterior(0.5, &[e(10), e(5)], &cfg, 1.0).unwrap_err(),
            BewaError::UnsortedEvidence
        );
    }

    #[test]
    fn contradiction_examples() {
        let cfg = cfg();
        let out = contradict(0.6, 0.0, 0.0, &cfg).unwrap();
        assert_eq!(out.pi, 0.6);
        let out = contradict(0.6, 1.0, 0.0, &cfg).unwrap();
        assert_eq!(out.pi, 0.0);
        let out = contradict(0.6, 0.5, 0.0, &cfg).unwrap();
        assert!((out.pi - 0.30).abs() < 1e-12);
    }

    #[test]
    fn contradiction_collapse_and_terminal() {
        let cfg = cfg();
        // crossing theta_contradict pins belief to the probationary value
        let out = contradict(0.6, 0.8, 1.0, &cfg).unwrap();
        assert!(out.collapsed);
        assert_eq!(out.pi, cfg.pi_dagger);
        assert_eq!(out.status, Some(BeliefStatus::Probational));

        // crossing kappa_max is terminal
        let out = contradict(0.6, 0.9, 2.5, &cfg).unwrap();
        assert_eq!(out.pi, 0.0);
        assert_eq!(out.status, Some(BeliefStatus::TerminallyDiscredited));
    }

    #[test]
    fn bayes_contradiction_form() {
        let mut cfg = cfg();
        cfg.contradiction_form = ContradictionForm::Bayes;
        // w' = 0.5 is neutral under the Bayes form
        let out = contradict(0.6, 0.5, 0.0, &cfg).unwrap();
        assert!((out.pi - 0.6).abs() < 1e-12);
        // stronger counter-weight lowers belief more
        let strong = contradict(0.6, 0.9, 0.0, &cfg).unwrap();
        let weak = contradict(0.6, 0.6, 0.0, &cfg).unwrap();
        assert!(strong.pi < weak.pi && weak.pi < 0.6);
    }

    fn state(pi: f64) -> BeliefState {
        BeliefState::new("c".repeat(64), pi, BeliefStatus::Canonical, 0)
    }

    fn decay_cfg(rate: f64, mode: DecayMode) -> DecayConfig {
        DecayConfig {
            mode,
            lambda_base: rate,
            alpha_age: 0.0,
            beta_isolation: 0.0,
            rho_min: u32::MAX,
            kappa_min_citations: u32::MAX,
        }
    }

    const DAY: Timestamp = 86_400;

    #[test]
    fn decay_examples() {
        let s = state(0.8);
        let cfg = decay_cfg(std::f64::consts::LN_2, DecayMode::ToZero);

        // zero elapsed: unchanged
        let out = decay(&s, 0, &cfg, 0.0, 0.01).unwrap();
        assert_eq!(out.pi, 0.8);

        // one day at ln2/day halves it
        let out = decay(&s, DAY, &cfg, 0.0, 0.01).unwrap();
        assert!((out.pi - 0.4).abs() < 1e-12);
        assert_eq!(out.pre_decay_snapshot, 0.8);

        // neutral mode contracts toward 1/2
        let cfg = decay_cfg(std::f64::consts::LN_2, DecayMode::ToNeutral);
        let out = decay(&state(0.9), DAY, &cfg, 0.0, 0.01).unwrap();
        assert!((out.pi - 0.7).abs() < 1e-12);

        // clock regression rejected
        let mut late = state(0.5);
        late.last_reinforced_at = 100;
        assert_eq!(
            decay(&late, 50, &cfg, 0.0, 0.01).unwrap_err(),
            BewaError::ClockRegression
        );
    }

    #[test]
    fn decay_immunity_and_stale() {
        let mut s = state(0.8);
        s.replication_count = 5;
        s.citation_count = 5;
        let mut cfg = decay_cfg(std::f64::consts::LN_2, DecayMode::ToZero);
        cfg.rho_min = 2;
        cfg.kappa_min_citations = 3;
        let out = decay(&s, 10 * DAY, &cfg, 0.0, 0.01).unwrap();
        assert_eq!(out.pi, 0.8); // immune

        let cfg = decay_cfg(std::f64::consts::LN_2, DecayMode::ToZero);
        let out = decay(&state(0.5), 10 * DAY, &cfg, 0.0, 0.01).unwrap();
        assert!(out.pi < 0.01);
        assert_eq!(out.status, BeliefStatus::Stale);
    }

    #[test]
    fn snapshot_survives_decay_streak() {
        let cfg = decay_cfg(0.1, DecayMode::ToZero);
        let s = state(0.8);
        let first = decay(&s, DAY, &cfg, 0.0, 0.001).unwrap();
        let second = decay(&first, 2 * DAY, &cfg, 0.0, 0.001).unwrap();
        assert_eq!(second.pre_decay_snapshot, 0.8);
    }

    #[test]
    fn half_life_examples() {
        assert!((half_life(std::f64::consts::LN_2).unwrap() - 1.0).abs() < 1e-12);
        assert!((half_life(0.1).unwrap() - 6.931_471_805_599_452).abs() < 1e-12);
        assert!((half_life(2.0 * std::f64::consts::LN_2).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(half_life(0.0).unwrap_err(), BewaError::ZeroRate);
    }

    #[test]
    fn reinforce_examples() {
        let mut s = state(0.2);
        s.status = BeliefStatus::Stale;

        // exactly at the threshold is not enough
        assert_eq!(
            reinforce(&s, 0.55, 100, 0.55).unwrap_err(),
            BewaError::BelowThreshold
        );

        let out = reinforce(&s, 0.9, 100, 0.55).unwrap();
        assert!((out.pi - 0.692_307_692_307_692_3).abs() < 1e-12);
        assert_eq!(out.status, BeliefStatus::Canonical);
        assert_eq!(out.last_reinforced_at, 100);

        // same-timestamp reinforcement is idempotent on the clock
        let again = reinforce(&out, 0.9, 100, 0.55).unwrap();
        assert_eq!(again.last_reinforced_at, 100);
    }

    #[test]
    fn replicative_reset_examples() {
        let cfg = cfg();
        let domains = vec!["bio".to_string()];
        let reps = |pis: &[f64]| -> Vec<ResetReplication> {
            pis.iter()
                .map(|p| ResetReplication {
                    pi: *p,
                    weight: 1.0,
                    domain: "bio".into(),
                })
                .collect()
        };

        // terminally discredited: immune
        let mut dead = state(0.0);
        dead.status = BeliefStatus::TerminallyDiscredited;
        assert_eq!(
            replicative_reset(&dead, &reps(&[0.8, 0.9]), &domains, &[], &cfg, 10).unwrap_err(),
            BewaError::TerminallyDiscredited
        );

        // weighted mean, unbound (snapshot high)
        let mut s = state(0.1);
        s.pre_decay_snapshot = 2.0; // force the bound slack for the arithmetic check
        let out = replicative_reset(&s, &reps(&[0.8, 0.9]), &domains, &[], &cfg, 10).unwrap();
        assert!((out.pi - 0.85).abs() < 1e-12);

        // bound binds: modifier * snapshot = 0.5 * ... ; choose snapshot 0.8
        // with eta such that modifier = 0.5
        let mut c = cfg.clone();
        c.eta_reset = 0.5 / (1.0f64 + 2.0).ln();
        let mut s = state(0.1);
        s.pre_decay_snapshot = 0.8;
        let out = replicative_reset(&s, &reps(&[0.8, 0.9]), &domains, &[], &c, 10).unwrap();
        assert!((out.pi - 0.4).abs() < 1e-12);

        // insufficient qualifying replications
        assert_eq!(
            replicative_reset(&state(0.1), &reps(&[0.8]), &domains, &[], &cfg, 10).unwrap_err(),
            BewaError::InsufficientReplications
        );
        // low-belief replications do not qualify
        assert_eq!(
            replicative_reset(&state(0.1), &reps(&[0.3, 0.4]), &domains, &[], &cfg, 10)
                .unwrap_err(),
            BewaError::InsufficientReplications
        );

        // domain mismatch without a cross-map entry
        let foreign = vec![ResetReplication {
            pi: 0.9,
            weight: 1.0,
            domain: "cs".into(),
        }];
        assert_eq!(
            replicative_reset(&state(0.1), &foreign, &domains, &[], &cfg, 10).unwrap_err(),
            BewaError::DomainMismatch
        );
        // bridged by the cross-domain map (still too few to reset)
        let bridge = vec![("cs".to_string(), "bio".to_string())];
        assert_eq!(
            replicative_reset(&state(0.1), &foreign, &domains, &bridge, &cfg, 10).unwrap_err(),
            BewaError::InsufficientReplications
        );
    }

    #[test]
    fn reset_bound_holds() {
        let cfg = cfg();
        let domains = vec!["bio".to_string()];
        for snapshot in [0.1, 0.4, 0.9] {
            let mut s = state(0.05);
            s.pre_decay_snapshot = snapshot;
            let reps: Vec<ResetReplication> = (0..3)
                .map(|_| ResetReplication {
                    pi: 0.95,
                    weight: 1.0,
                    domain: "bio".into(),
                })
                .collect();
            let out = replicative_reset(&s, &reps, &domains, &[], &cfg, 10).unwrap();
            let modifier = 1.0f64.min((1.0f64 + 3.0).ln() * cfg.eta_reset);
            assert!(out.pi <= modifier * snapshot + 1e-12);
        }
    }

    fn probation_cfg() -> ProbationConfig {
        ProbationConfig::default()
    }

    #[test]
    fn probation_lifecycle() {
        let cfg = probation_cfg();
        let mut s = state(0.05);
        s.status = BeliefStatus::Probational;

        // no support: stays at the floor, still probational
        let out = probation_step(&s, 0.0, 0.0, 10 * DAY, &cfg).unwrap();
        assert_eq!(out.pi, 0.05);
        assert_eq!(out.status, BeliefStatus::Probational);

        // enough support: promoted
        let out = probation_step(&s, 2.0, 1.0, 10 * DAY, &cfg).unwrap();
        assert!((out.pi - 0.55).abs() < 1e-12);
        assert_eq!(out.status, BeliefStatus::Canonical);

        // exactly at the deadline, unpromoted: floor value, archived
        let deadline = (cfg.delta_max_days * SECONDS_PER_DAY) as Timestamp;
        let out = probation_step(&s, 0.0, 0.0, deadline, &cfg).unwrap();
        assert!((out.pi - cfg.pi_initial).abs() < 1e-12);
        assert_eq!(out.status, BeliefStatus::Stale);

        // past the deadline the floor decays exponentially
        let out = probation_step(&s, 0.0, 0.0, deadline + 20 * DAY, &cfg).unwrap();
        let expect = cfg.pi_initial * (-cfg.lambda_expiry * 20.0).exp();
        assert!((out.pi - expect).abs() < 1e-12);

        // non-probational input rejected
        let canonical = state(0.5);
        assert_eq!(
            probation_step(&canonical, 0.0, 0.0, 0, &cfg).unwrap_err(),
            BewaError::NotProbational
        );
    }

    #[test]
    fn probational_states_are_masked() {
        let mut s = state(0.05);
        s.status = BeliefStatus::Probational;
        assert!(s.propagation_masked());
        s.status = BeliefStatus::Quarantined;
        assert!(s.propagation_masked());
        s.status = BeliefStatus::Canonical;
        assert!(!s.propagation_masked());
        s.propagation_gated = true;
        assert!(s.propagation_masked());
    }

    #[test]
    fn entropy_direction_under_neutral_decay() {
        let cfg = decay_cfg(0.3, DecayMode::ToNeutral);
        for i in 1..100 {
            let pi = i as f64 / 100.0;
            let out = decay(&state(pi), DAY, &cfg, 0.0, 0.0).unwrap();
            assert!(belief_entropy(out.pi) + 1e-12 >= belief_entropy(pi));
        }
        // to-zero mode: entropy rises only while belief exceeds 1/2
        let cfg = decay_cfg(0.05, DecayMode::ToZero);
        for i in 51..100 {
            let pi = i as f64 / 100.0;
            let out = decay(&state(pi), DAY, &cfg, 0.0, 0.0).unwrap();
            if out.pi > 0.5 {
                assert!(belief_entropy(out.pi) + 1e-12 >= belief_entropy(pi));
            }
        }
    }

    #[test]
    fn gradual_confirmation_count_matches_oracle() {
        // independent oracle: odds multiply by w/(1-w) each step
        let w: f64 = 0.7;
        let mut odds = 1.0; // pi = 0.5
        let mut oracle_steps = 0;
        while odds / (1.0 + odds) <= 0.99 {
            odds *= w / (1.0 - w);
            oracle_steps += 1;
        }
        assert_eq!(oracle_steps, 6);

        let mut pi = 0.5;
        let mut steps = 0;
        while pi <= 0.99 {
            pi = weighted_update(pi, w).unwrap();
            steps += 1;
            assert!(steps <= 12);
        }
        assert_eq!(steps, oracle_steps);
    }

    #[test]
    fn non_retroactivity_of_history() {
        let mut s = state(0.5);
        s.record(10, TransitionCause::Update);
        let prefix = serde_json::to_vec(&s.history).unwrap();
        let mut later = s.clone();
        later.pi = 0.9;
        later.record(20, TransitionCause::Update);
        let prefix_after = serde_json::to_vec(&later.history[..s.history.len()]).unwrap();
        assert_eq!(prefix, prefix_after);
    }
}
