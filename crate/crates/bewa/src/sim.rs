//! Synthetic belief-network generation and epoch-driven experiments.
//!
//! A generated network is a seeded random DAG of synthetic claims with
//! planted ground truth, injected conflicts between opposite-truth nodes,
//! and initial beliefs drawn uniformly from [0.4, 0.6] through the prior
//! path. The run loop injects evidence per regime, applies decay ticks,
//! propagates to fixpoint, resolves contradictions, and logs every belief
//! transition to the ledger. Everything is deterministic per seed.
//!
//! The recorded belief matrix holds the kernel-level (ledgered) beliefs;
//! the propagated network view is reported separately. Simulation entropy
//! is measured in bits, unlike the kernel's natural-log convention.

use crate::claim::{Ccs, Timestamp};
use crate::config::EngineConfig;
use crate::corpus::{
    CorpusAuthor, CorpusContext, CorpusEntry, CorpusMetadata, CorpusSourceFlags, CorpusVenue,
};
use crate::engine::Engine;
use crate::error::{BewaError, Result};
use crate::graph::{Edge, EdgeKind};
use crate::kernel::{EvidenceKind, EvidenceUnit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

const EPOCH_SECONDS: i64 = 86_400;
const T0: Timestamp = 1_600_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuthorImpact {
    Uniform,
    PowerLaw,
    ExpDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceRegime {
    /// Apply evidence the epoch it is drawn.
    Incremental,
    /// Accumulate and apply at each reassessment boundary.
    Batch,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TreatmentConfig {
    /// Fraction of nodes receiving replication treatment.
    pub fraction: f64,
    /// Per-epoch replication probability for treated nodes.
    pub probability: f64,
    pub quality: f64,
}

impl Default for TreatmentConfig {
    fn default() -> Self {
        Self {
            fraction: 0.3,
            probability: 0.5,
            quality: 0.9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub n_nodes: usize,
    /// Edge density over ordered pairs.
    pub edge_density: f64,
    /// Conflict pairs as a fraction of edge count.
    pub contradiction_ratio: f64,
    /// Decay ticks every this many epochs.
    pub reassess_interval: u32,
    pub author_impact: AuthorImpact,
    pub evidence_regime: EvidenceRegime,
    pub epochs: u32,
    pub seed: u64,
    /// Per-epoch supporting-evidence probability for true claims.
    pub p_true_support: f64,
    /// Per-epoch supporting-evidence probability for false claims.
    pub p_false_support: f64,
    /// Per-epoch contradicting-evidence probabilities.
    pub p_true_contra: f64,
    pub p_false_contra: f64,
    /// Disable all evidence injection (decay-only studies).
    pub evidence_enabled: bool,
    /// Run the contradiction-resolution protocol each epoch.
    pub resolve_conflicts: bool,
    /// Replication treatment cohort, when lift is under study.
    pub treatment: Option<TreatmentConfig>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_nodes: 100,
            edge_density: 0.02,
            contradiction_ratio: 0.15,
            reassess_interval: 1,
            author_impact: AuthorImpact::Uniform,
            evidence_regime: EvidenceRegime::Incremental,
            epochs: 100,
            seed: 42,
            p_true_support: 0.6,
            p_false_support: 0.2,
            p_true_contra: 0.1,
            p_false_contra: 0.4,
            evidence_enabled: true,
            resolve_conflicts: true,
            treatment: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(BewaError::BadConfig("need at least 2 nodes".into()));
        }
        if !(0.0..=1.0).contains(&self.edge_density) {
            return Err(BewaError::BadConfig("edge_density outside [0,1]".into()));
        }
        if !(0.0..=1.0).contains(&self.contradiction_ratio) {
            return Err(BewaError::BadConfig(
                "contradiction_ratio outside [0,1]".into(),
            ));
        }
        if self.reassess_interval == 0 {
            return Err(BewaError::BadConfig("reassess_interval must be >= 1".into()));
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: SimConfig = if path.extension().and_then(|e| e.to_str()) == Some("json") {
            serde_json::from_str(&text).map_err(|e| BewaError::BadConfig(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| BewaError::BadConfig(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A generated network: the engine carrying it plus planted ground truth.
pub struct SimNetwork {
    pub engine: Engine,
    pub nodes: Vec<Ccs>,
    /// Planted truth value per node (1.0 or 0.0).
    pub ground_truth: BTreeMap<Ccs, f64>,
    pub edges: usize,
    pub conflicts: usize,
    pub treated: BTreeSet<Ccs>,
}

fn impact_sample(rng: &mut ChaCha20Rng, dist: AuthorImpact) -> f64 {
    let u: f64 = rng.r#gen();
    match dist {
        AuthorImpact::Uniform => u,
        AuthorImpact::PowerLaw => u.powf(4.0),
        AuthorImpact::ExpDecay => (-(1.0 - u).ln() / 3.0).clamp(0.0, 1.0),
    }
}

/// Generate the synthetic network. Initial beliefs land in [0.4, 0.6] by
/// driving the prior's venue term with a uniform draw; ground truth is a
/// seeded fair coin; conflicts are planted between opposite-truth nodes so
/// contradiction pressure is epistemically meaningful.
pub fn generate_network(cfg: &SimConfig, engine_cfg: EngineConfig) -> Result<SimNetwork> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut engine_cfg = engine_cfg;
    engine_cfg.kernel.probation_enabled = false;
    let mut engine = Engine::new(engine_cfg);

    // claims: prior = 0.4 + 0.2 * venue_reputation with these weights
    let entries: Vec<CorpusEntry> = (0..cfg.n_nodes)
        .map(|i| {
            let reputation: f64 = rng.r#gen();
            CorpusEntry {
                normalized_form: format!("SimClaim({i:05})"),
                author: CorpusAuthor {
                    orcid: None,
                    name: format!("sim-author-{:03}", i % (cfg.n_nodes / 5 + 1)),
                    affiliation: "sim-institute".into(),
                },
                asserted_at: "2020-09-13T12:26:40Z".into(),
                context: CorpusContext {
                    concept: "sim-concept".into(),
                    method: crate::claim::Method::Simulation,
                    statistical_frame: crate::claim::StatisticalFrame::Bayesian,
                },
                domains: vec!["sim".into()],
                metadata: CorpusMetadata {
                    doi: format!("10.5555/sim-{i:05}"),
                    published_at: "2020-09-13T12:26:40Z".into(),
                    venue: CorpusVenue {
                        name: "SimVenue".into(),
                        reputation,
                        transparency: 0.8,
                        compliance: 0.8,
                    },
                    funding: None,
                    replication_status: crate::claim::ReplicationStatus::Untested,
                    source_flags: CorpusSourceFlags {
                        verifiable: true,
                        indexed: true,
                        peer_reviewed: true,
                    },
                },
                epistemic_status: Some(crate::claim::EpistemicStatus::Verifiable),
                exclusive_group: None,
                signature: None,
                signer_key: None,
            }
        })
        .collect();
    let report = engine.ingest_corpus(&entries, T0)?;
    if report.accepted.len() != cfg.n_nodes {
        return Err(BewaError::BadConfig(format!(
            "generator rejected {} entries",
            report.rejected.len()
        )));
    }
    let nodes = report.accepted;

    // ground truth: seeded fair coin
    let mut ground_truth = BTreeMap::new();
    for ccs in &nodes {
        let truth = if rng.r#gen::<bool>() { 1.0 } else { 0.0 };
        ground_truth.insert(ccs.clone(), truth);
    }

    // random DAG over the ingestion order
    let mut edge_count = 0usize;
    for i in 0..cfg.n_nodes {
        for j in (i + 1)..cfg.n_nodes {
            if rng.r#gen::<f64>() < cfg.edge_density {
                let weight = 0.3 + 0.6 * rng.r#gen::<f64>();
                engine.add_edge(Edge {
                    from: nodes[i].clone(),
                    to: nodes[j].clone(),
                    kind: EdgeKind::Evidential,
                    weight,
                })?;
                edge_count += 1;
            }
        }
    }

    // conflicts between opposite-truth nodes
    let target_conflicts = (cfg.contradiction_ratio * edge_count as f64).round() as usize;
    let true_nodes: Vec<&Ccs> = nodes.iter().filter(|n| ground_truth[*n] == 1.0).collect();
    let false_nodes: Vec<&Ccs> = nodes.iter().filter(|n| ground_truth[*n] == 0.0).collect();
    let mut used: BTreeSet<(Ccs, Ccs)> = BTreeSet::new();
    let mut planted = 0usize;
    let mut attempts = 0usize;
    while planted < target_conflicts
        && attempts < target_conflicts * 50
        && !true_nodes.is_empty()
        && !false_nodes.is_empty()
    {
        attempts += 1;
        let a = true_nodes[rng.gen_range(0..true_nodes.len())].clone();
        let b = false_nodes[rng.gen_range(0..false_nodes.len())].clone();
        let key = if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        if used.insert(key) {
            engine.declare_contradiction(&a, &b)?;
            planted += 1;
        }
    }

    // replication treatment cohort
    let mut treated = BTreeSet::new();
    if let Some(t) = &cfg.treatment {
        let count = ((cfg.n_nodes as f64) * t.fraction).round() as usize;
        let mut pool: Vec<&Ccs> = nodes.iter().collect();
        for _ in 0..count.min(pool.len()) {
            let idx = rng.gen_range(0..pool.len());
            treated.insert(pool.swap_remove(idx).clone());
        }
    }

    Ok(SimNetwork {
        engine,
        nodes,
        ground_truth,
        edges: edge_count,
        conflicts: planted,
        treated,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Mean absolute deviation from planted truth, per claim.
    pub tau_per_claim: BTreeMap<Ccs, f64>,
    /// Mean tau over true claims, cumulative through each epoch.
    pub tau_true_series: Vec<f64>,
    /// Active contradiction counts per epoch (index 0 = baseline).
    pub contradiction_series: Vec<usize>,
    /// Contradiction suppression index at the final epoch.
    pub kappa: Option<f64>,
    /// Mean belief uplift of the treated cohort over the untreated.
    pub rho_lift: Option<f64>,
    /// Mean binary belief entropy in bits, per epoch.
    pub entropy_series: Vec<f64>,
    /// First epoch where the mean absolute belief change fell below 1e-3.
    pub convergence_epoch: Option<u32>,
    /// Mean |pi - truth| over true claims at the final epoch.
    pub final_deviation_true: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub node_order: Vec<Ccs>,
    pub ground_truth: BTreeMap<Ccs, f64>,
    /// Row per recorded state (initial + one per epoch), column per node.
    pub pi_matrix: Vec<Vec<f64>>,
    pub metrics: MetricsReport,
    /// Propagated network view at the final epoch.
    pub final_propagated: BTreeMap<Ccs, f64>,
}

/// Mean binary Shannon entropy (bits) over a belief row.
pub fn metric_graph_entropy(beliefs: &[f64]) -> f64 {
    let h = |p: f64| {
        let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
        term(p) + term(1.0 - p)
    };
    if beliefs.is_empty() {
        return 0.0;
    }
    beliefs.iter().map(|p| h(*p)).sum::<f64>() / beliefs.len() as f64
}

/// Mean absolute deviation of a belief series from its planted truth.
pub fn metric_truth_convergence(series: &[f64], truth: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(BewaError::EmptySeries);
    }
    Ok(series.iter().map(|w| (w - truth).abs()).sum::<f64>() / series.len() as f64)
}

/// Contradiction suppression: 1 - |final| / |baseline|.
pub fn metric_contradiction_suppression(now: usize, baseline: usize) -> Result<f64> {
    if baseline == 0 {
        return Err(BewaError::NoInitialContradictions);
    }
    Ok(1.0 - now as f64 / baseline as f64)
}

/// Mean belief uplift of one cohort over another across an interval.
pub fn metric_replication_lift(
    treated_delta: &[f64],
    control_delta: &[f64],
) -> Result<f64> {
    if treated_delta.is_empty() || control_delta.is_empty() {
        return Err(BewaError::EmptyCohort);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(mean(treated_delta) - mean(control_delta))
}

/// Run the epoch loop over a generated network.
pub fn run(cfg: &SimConfig, network: &mut SimNetwork) -> Result<SimReport> {
    cfg.validate()?;
    // separate stream from generation so layout and dynamics stay independent
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let nodes = network.nodes.clone();
    let truth = network.ground_truth.clone();

    let snapshot = |engine: &Engine| -> Vec<f64> {
        nodes
            .iter()
            .map(|n| engine.state(n).map(|s| s.pi).unwrap_or(0.0))
            .collect()
    };

    let mut pi_matrix: Vec<Vec<f64>> = vec![snapshot(&network.engine)];
    let mut contradiction_series = vec![network.engine.active_conflicts()];
    let mut entropy_series = vec![metric_graph_entropy(&pi_matrix[0])];
    let mut tau_true_series: Vec<f64> = Vec::new();
    let mut convergence_epoch = None;
    let mut pending: Vec<(Ccs, EvidenceUnit)> = Vec::new();

    for epoch in 1..=cfg.epochs {
        let t = T0 + i64::from(epoch) * EPOCH_SECONDS;

        if cfg.evidence_enabled {
            for ccs in &nodes {
                let is_true = truth[ccs] == 1.0;
                let (p_support, p_contra) = if is_true {
                    (cfg.p_true_support, cfg.p_true_contra)
                } else {
                    (cfg.p_false_support, cfg.p_false_contra)
                };
                if rng.r#gen::<f64>() < p_support {
                    let quality = impact_sample(&mut rng, cfg.author_impact);
                    pending.push((
                        ccs.clone(),
                        EvidenceUnit {
                            kind: EvidenceKind::Endorsement,
                            quality,
                            source_doc: format!("sim-support-{epoch}-{ccs:.8}"),
                            t,
                        },
                    ));
                }
                if rng.r#gen::<f64>() < p_contra {
                    let quality = impact_sample(&mut rng, cfg.author_impact);
                    pending.push((
                        ccs.clone(),
                        EvidenceUnit {
                            kind: EvidenceKind::Contradiction,
                            quality,
                            source_doc: format!("sim-contra-{epoch}-{ccs:.8}"),
                            t,
                        },
                    ));
                }
                if network.treated.contains(ccs) {
                    if let Some(treatment) = &cfg.treatment {
                        if rng.r#gen::<f64>() < treatment.probability {
                            pending.push((
                                ccs.clone(),
                                EvidenceUnit {
                                    kind: EvidenceKind::Replication,
                                    quality: treatment.quality,
                                    source_doc: format!("sim-rep-{epoch}-{ccs:.8}"),
                                    t,
                                },
                            ));
                        }
                    }
                }
            }
            let flush = match cfg.evidence_regime {
                EvidenceRegime::Incremental => true,
                EvidenceRegime::Batch => epoch % cfg.reassess_interval == 0 || epoch == cfg.epochs,
            };
            if flush {
                for (ccs, unit) in pending.drain(..) {
                    network.engine.apply_evidence(&ccs, &unit)?;
                }
            }
        }

        if epoch % cfg.reassess_interval == 0 {
            network.engine.decay_tick(t)?;
        }
        network.engine.propagate();
        if cfg.resolve_conflicts {
            network.engine.resolve_conflicts(t)?;
        }

        let row = snapshot(&network.engine);
        entropy_series.push(metric_graph_entropy(&row));
        contradiction_series.push(network.engine.active_conflicts());

        // cumulative mean tau over true claims
        let mut true_tau = 0.0;
        let mut true_count = 0usize;
        for (idx, ccs) in nodes.iter().enumerate() {
            if truth[ccs] == 1.0 {
                let series: Vec<f64> = pi_matrix[1..]
                    .iter()
                    .map(|r| r[idx])
                    .chain(std::iter::once(row[idx]))
                    .collect();
                true_tau += metric_truth_convergence(&series, 1.0)?;
                true_count += 1;
            }
        }
        if true_count > 0 {
            tau_true_series.push(true_tau / true_count as f64);
        }

        if convergence_epoch.is_none() {
            let prev = pi_matrix.last().expect("at least the initial row");
            let mean_delta = row
                .iter()
                .zip(prev)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
                / row.len() as f64;
            if mean_delta < 1e-3 {
                convergence_epoch = Some(epoch);
            }
        }
        pi_matrix.push(row);
    }

    let final_row = pi_matrix.last().expect("epochs recorded");
    let mut tau_per_claim = BTreeMap::new();
    for (idx, ccs) in nodes.iter().enumerate() {
        let series: Vec<f64> = pi_matrix[1..].iter().map(|r| r[idx]).collect();
        let tau = if series.is_empty() {
            0.0
        } else {
            metric_truth_convergence(&series, truth[ccs])?
        };
        tau_per_claim.insert(ccs.clone(), tau);
    }

    let true_indices: Vec<usize> = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| truth[*n] == 1.0)
        .map(|(i, _)| i)
        .collect();
    let final_deviation_true = if true_indices.is_empty() {
        0.0
    } else {
        true_indices
            .iter()
            .map(|&i| (final_row[i] - 1.0).abs())
            .sum::<f64>()
            / true_indices.len() as f64
    };

    let kappa = metric_contradiction_suppression(
        *contradiction_series.last().expect("non-empty"),
        contradiction_series[0],
    )
    .ok();

    let rho_lift = if network.treated.is_empty() {
        None
    } else {
        let delta_of = |set: bool| -> Vec<f64> {
            nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| network.treated.contains(*n) == set)
                .map(|(i, _)| final_row[i] - pi_matrix[0][i])
                .collect()
        };
        metric_replication_lift(&delta_of(true), &delta_of(false)).ok()
    };

    let final_propagated = network.engine.graph.propagated.clone();
    Ok(SimReport {
        config: cfg.clone(),
        node_order: nodes,
        ground_truth: truth,
        pi_matrix,
        metrics: MetricsReport {
            tau_per_claim,
            tau_true_series,
            contradiction_series,
            kappa,
            rho_lift,
            entropy_series,
            convergence_epoch,
            final_deviation_true,
        },
        final_propagated,
    })
}

/// Convenience wrapper: generate and run in one call.
pub fn simulate(cfg: &SimConfig, engine_cfg: EngineConfig) -> Result<SimReport> {
    let mut network = generate_network(cfg, engine_cfg)?;
    run(cfg, &mut network)
}

/// CSV export of the belief matrix: header of node ids, one row per epoch.
pub fn matrix_csv(report: &SimReport) -> String {
    let mut out = String::from("epoch");
    for n in &report.node_order {
        out.push(',');
        out.push_str(&n[..12.min(n.len())]);
    }
    out.push('\n');
    for (i, row) in report.pi_matrix.iter().enumerate() {
        out.push_str(&i.to_string());
        for v in row {
            out.push(',');
            out.push_str(&format!("{v:.9}"));
        }
        out.push('\n');
    }
    out
}
