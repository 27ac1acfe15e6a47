//! Truth-promotion scoring, risk-aware utility weighting, and
//! application-level prioritisation over the belief graph. Pure read-side
//! computations over graph snapshots.

use crate::claim::{Ccs, Timestamp};
use crate::config::UtilityParams;
use crate::credibility::SECONDS_PER_DAY;
use crate::error::{BewaError, Result};
use crate::graph::BeliefGraph;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Ground-truth labels from fixtures or simulation; the engine never infers
/// them. Claims outside the verified-true set count as false for scoring.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TruthLabels {
    pub verified_true: BTreeSet<Ccs>,
}

/// Linear truth-promoting utility over replication, distinctiveness,
/// verified influence, and the echo penalty.
pub fn truth_utility(r: f64, d: f64, v: f64, b: f64, lambda: &[f64; 4]) -> f64 {
    lambda[0] * r + lambda[1] * d + lambda[2] * v - lambda[3] * b
}

/// Gate flag: utilities below the floor are barred from long-range
/// propagation.
pub fn propagation_gate(utility: f64, floor: f64) -> bool {
    utility < floor
}

/// Directional influence over the foundational DAG: the maximum over
/// directed paths of the product of edge weights, never exceeding 1.
/// Computed by depth-first memoisation; the foundational subgraph is acyclic
/// by construction.
pub fn influence_coefficients(graph: &BeliefGraph, source: &str) -> BTreeMap<Ccs, f64> {
    let mut best: BTreeMap<Ccs, f64> = BTreeMap::new();
    let mut stack: Vec<(Ccs, f64)> = vec![(source.to_string(), 1.0)];
    while let Some((cur, acc)) = stack.pop() {
        for e in graph.edges.iter().filter(|e| e.kind.foundational()) {
            if e.from == cur {
                let k = (acc * e.weight).min(1.0);
                let entry = best.entry(e.to.clone()).or_insert(0.0);
                if k > *entry {
                    *entry = k;
                    stack.push((e.to.clone(), k));
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthPromotion {
    /// Signed score: true-descendant mass minus false-descendant mass.
    pub tau: f64,
    pub tau_positive: f64,
    pub tau_negative: f64,
}

/// Truth promotion of a claim: influence-weighted belief mass over its
/// verified-true descendants minus the same sum over false-labelled ones. A
/// claim with no descendants scores zero.
pub fn truth_promotion_score(
    graph: &BeliefGraph,
    ccs: &str,
    labels: &TruthLabels,
) -> Result<TruthPromotion> {
    graph.node(ccs)?;
    let kappa = influence_coefficients(graph, ccs);
    let mut positive = 0.0;
    let mut negative = 0.0;
    for (descendant, k) in &kappa {
        let pi = graph.nodes[descendant].pi;
        if labels.verified_true.contains(descendant) {
            positive += k * pi;
        } else {
            negative -= k * pi;
        }
    }
    Ok(TruthPromotion {
        tau: positive + negative,
        tau_positive: positive,
        tau_negative: negative,
    })
}

/// Min-max normalise scores within one update cycle. Constant vectors map
/// to zero.
pub fn normalize_scores(scores: &BTreeMap<Ccs, f64>) -> BTreeMap<Ccs, f64> {
    let (min, max) = scores.values().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(*v), hi.max(*v))
    });
    scores
        .iter()
        .map(|(k, v)| {
            let norm = if max > min { (v - min) / (max - min) } else { 0.0 };
            (k.clone(), norm)
        })
        .collect()
}

/// Three-case epistemic loss against a binary truth state.
pub fn epistemic_loss(pi: f64, truth: bool, theta: f64, lambda_fp: f64, lambda_fn: f64) -> f64 {
    if pi < theta && truth {
        lambda_fn
    } else if pi >= theta && !truth {
        lambda_fp
    } else {
        0.0
    }
}

/// Expected utility of acting on a belief.
pub fn weighted_belief_utility(pi: f64, u_tp: f64, lambda_fp: f64) -> f64 {
    pi * u_tp - (1.0 - pi) * lambda_fp
}

/// Mean normalised loss mass of a domain. Domains above the risk threshold
/// demand authoritative, replicated claims at ingestion.
pub fn domain_risk(losses: &[(f64, f64)], params: &UtilityParams) -> Result<f64> {
    if losses.is_empty() {
        return Err(BewaError::EmptyDomain);
    }
    let denom = params.lambda_fp_max + params.lambda_fn_max;
    let sum: f64 = losses.iter().map(|(fp, fnn)| (fp + fnn) / denom).sum();
    Ok((sum / losses.len() as f64).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFunctional {
    Rank,
    Filter,
    TopK,
}

/// Relevance filter of an application class: a pure predicate over domain
/// and context tags.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RelevanceFilter {
    /// Claim must carry at least one of these domains (empty = any).
    pub domains: BTreeSet<String>,
    /// Exact concept match when set.
    pub concept: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApplicationClass {
    pub id: String,
    pub relevance: RelevanceFilter,
    /// Acceptable epistemic risk threshold.
    pub risk_threshold: f64,
    pub output: OutputFunctional,
    pub u_tp: f64,
    pub lambda_fp: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankedClaim {
    pub ccs: Ccs,
    pub score: f64,
    pub pi: f64,
}

pub struct RankInput<'a> {
    pub ccs: &'a str,
    pub pi: f64,
    /// Semantic similarity to the query in [-1,1].
    pub similarity: f64,
    pub domain_risk: f64,
    pub age_days: f64,
    pub replication_pending: bool,
}

/// Query-adaptive priority: belief times its clamped utility projection,
/// shaped by query similarity and attenuated by domain risk, with a
/// freshness boost for young claims whose replication is still pending.
/// Monotone non-decreasing in belief and similarity for fixed other factors.
pub fn priority_score(input: &RankInput<'_>, app: &ApplicationClass, params: &UtilityParams) -> f64 {
    let utility = weighted_belief_utility(input.pi, app.u_tp, app.lambda_fp).max(0.0);
    let similarity_shape = 0.5 + 0.5 * input.similarity.clamp(-1.0, 1.0);
    let risk_shape = (1.0 - params.risk_attenuation * input.domain_risk).max(0.0);
    let fresh = input.age_days < params.freshness_days && input.replication_pending;
    let boost = if fresh { params.freshness_boost } else { 1.0 };
    input.pi * utility * similarity_shape * risk_shape * boost
}

/// Filter by the application's relevance predicate, score, and return the
/// stable-sorted top k (descending score, ties by ascending signature).
pub fn prioritize(
    graph: &BeliefGraph,
    claims: &BTreeMap<Ccs, (Vec<String>, Option<String>, Timestamp)>,
    app: &ApplicationClass,
    similarities: &BTreeMap<Ccs, f64>,
    domain_risks: &BTreeMap<String, f64>,
    replication_pending: &BTreeSet<Ccs>,
    now: Timestamp,
    k: usize,
    params: &UtilityParams,
) -> Vec<RankedClaim> {
    let mut scored: Vec<RankedClaim> = Vec::new();
    for (ccs, (domains, concept, asserted_at)) in claims {
        let Some(state) = graph.nodes.get(ccs) else {
            continue;
        };
        if !app.relevance.domains.is_empty()
            && !domains.iter().any(|d| app.relevance.domains.contains(d))
        {
            continue;
        }
        if let Some(want) = &app.relevance.concept {
            if concept.as_ref() != Some(want) {
                continue;
            }
        }
        let risk = domains
            .iter()
            .filter_map(|d| domain_risks.get(d))
            .fold(0.0f64, |a, b| a.max(*b));
        let input = RankInput {
            ccs,
            pi: state.pi,
            similarity: similarities.get(ccs).copied().unwrap_or(0.0),
            domain_risk: risk,
            age_days: (now - asserted_at) as f64 / SECONDS_PER_DAY,
            replication_pending: replication_pending.contains(ccs),
        };
        scored.push(RankedClaim {
            ccs: ccs.clone(),
            score: priority_score(&input, app, params),
            pi: state.pi,
        });
    }
    scored.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap()
            .then_with(|| a.ccs.cmp(&b.ccs))
    });
    scored.truncate(k);
    scored
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, EdgeKind};
    use crate::kernel::{BeliefState, BeliefStatus};

    fn graph_with(nodes: &[(&str, f64)]) -> BeliefGraph {
        let mut g = BeliefGraph::new();
        for (ccs, pi) in nodes {
            g.insert_node(BeliefState::new(
                ccs.to_string(),
                *pi,
                BeliefStatus::Canonical,
                0,
            ));
        }
        g
    }

    #[test]
    fn truth_utility_examples() {
        let l = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(truth_utility(0.0, 0.0, 0.0, 0.0, &l), 0.0);
        assert!((truth_utility(2.0, 1.0, 1.0, 3.0, &l) - 1.0).abs() < 1e-12);
        // rising echo penalty strictly lowers utility
        let low = truth_utility(1.0, 1.0, 1.0, 0.5, &l);
        let high = truth_utility(1.0, 1.0, 1.0, 5.0, &l);
        assert!(high < low);
    }

    #[test]
    fn tps_examples() {
        let mut g = graph_with(&[("root", 0.5), ("t", 0.9), ("f", 0.4)]);
        g.add_edge(Edge {
            from: "root".into(),
            to: "t".into(),
            kind: EdgeKind::Deductive,
            weight: 0.8,
        })
        .unwrap();
        g.add_edge(Edge {
            from: "root".into(),
            to: "f".into(),
            kind: EdgeKind::Deductive,
            weight: 0.5,
        })
        .unwrap();
        let labels = TruthLabels {
            verified_true: BTreeSet::from(["t".to_string()]),
        };

        // leaf: no descendants, zero score
        let leaf = truth_promotion_score(&g, "t", &labels).unwrap();
        assert_eq!(leaf.tau, 0.0);

        let tps = truth_promotion_score(&g, "root", &labels).unwrap();
        assert!((tps.tau_positive - 0.72).abs() < 1e-12);
        assert!((tps.tau_negative + 0.20).abs() < 1e-12);
        assert!((tps.tau - 0.52).abs() < 1e-12);

        assert_eq!(
            truth_promotion_score(&g, "missing", &labels).unwrap_err(),
            BewaError::UnknownClaim("missing".into())
        );
    }

    #[test]
    fn influence_takes_strongest_path() {
        let mut g = graph_with(&[("a", 0.5), ("b", 0.5), ("c", 0.5)]);
        for (f, t, w) in [("a", "b", 0.9), ("b", "c", 0.9), ("a", "c", 0.5)] {
            g.add_edge(Edge {
                from: f.into(),
                to: t.into(),
                kind: EdgeKind::Deductive,
                weight: w,
            })
            .unwrap();
        }
        let k = influence_coefficients(&g, "a");
        assert!((k["c"] - 0.81).abs() < 1e-12); // through b beats direct 0.5
    }

    #[test]
    fn normalization_bounds() {
        let scores: BTreeMap<Ccs, f64> =
            [("a".to_string(), 0.2), ("b".to_string(), 0.9), ("c".to_string(), 0.5)]
                .into_iter()
                .collect();
        let n = normalize_scores(&scores);
        assert_eq!(n["a"], 0.0);
        assert_eq!(n["b"], 1.0);
        assert!(n["c"] > 0.0 && n["c"] < 1.0);

        // constant vector maps to zero
        let flat: BTreeMap<Ccs, f64> =
            [("a".to_string(), 0.4), ("b".to_string(), 0.4)].into_iter().collect();
        let n = normalize_scores(&flat);
        assert!(n.values().all(|v| *v == 0.0));
    }

    #[test]
    fn loss_cases() {
        assert_eq!(epistemic_loss(0.9, true, 0.5, 2.0, 3.0), 0.0);
        assert_eq!(epistemic_loss(0.9, false, 0.5, 2.0, 3.0), 2.0);
        assert_eq!(epistemic_loss(0.3, true, 0.5, 2.0, 3.0), 3.0);
    }

    #[test]
    fn belief_utility_examples() {
        assert_eq!(weighted_belief_utility(1.0, 0.7, 0.3), 0.7);
        assert_eq!(weighted_belief_utility(0.0, 0.7, 0.3), -0.3);
        assert!((weighted_belief_utility(0.5, 1.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn domain_risk_examples() {
        let p = UtilityParams::default();
        assert_eq!(domain_risk(&[(0.0, 0.0)], &p).unwrap(), 0.0);
        let r = domain_risk(&[(0.5, 0.5), (0.5, 0.5)], &p).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert_eq!(
            domain_risk(&[(0.9, 0.7)], &p).unwrap(),
            (0.9 + 0.7) / 2.0
        );
        assert_eq!(domain_risk(&[], &p).unwrap_err(), BewaError::EmptyDomain);
    }

    fn app() -> ApplicationClass {
        ApplicationClass {
            id: "default".into(),
            relevance: RelevanceFilter::default(),
            risk_threshold: 1.0,
            output: OutputFunctional::TopK,
            u_tp: 1.0,
            lambda_fp: 0.0,
        }
    }

    #[test]
    fn priority_monotone_in_pi_and_similarity() {
        let a = app();
        let p = UtilityParams::default();
        let score = |pi: f64, sim: f64| {
            priority_score(
                &RankInput {
                    ccs: "x",
                    pi,
                    similarity: sim,
                    domain_risk: 0.2,
                    age_days: 400.0,
                    replication_pending: false,
                },
                &a,
                &p,
            )
        };
        assert!(score(0.9, 0.5) > score(0.5, 0.5));
        assert!(score(0.5, 0.9) > score(0.5, 0.1));
    }

    #[test]
    fn rank_invariance_under_affine_utility_rescale() {
        // with lambda_fp = 0 the ranking is invariant under u_tp -> a*u + b
        let p = UtilityParams::default();
        let inputs = [(0.9, 0.1), (0.5, 0.9), (0.7, 0.4)];
        let rank = |u: f64| -> Vec<usize> {
            let mut idx: Vec<usize> = (0..inputs.len()).collect();
            let mut a = app();
            a.u_tp = u;
            let scores: Vec<f64> = inputs
                .iter()
                .map(|(pi, sim)| {
                    priority_score(
                        &RankInput {
                            ccs: "x",
                            pi: *pi,
                            similarity: *sim,
                            domain_risk: 0.0,
                            age_days: 400.0,
                            replication_pending: false,
                        },
                        &a,
                        &p,
                    )
                })
                .collect();
            idx.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).unwrap());
            idx
        };
        let base = rank(1.0);
        assert_eq!(base, rank(3.0));
        assert_eq!(base, rank(0.5));
    }

    #[test]
    fn prioritize_filters_sorts_and_tiebreaks() {
        let g = graph_with(&[("a", 0.9), ("b", 0.5), ("c", 0.9), ("d", 0.9)]);
        let claims: BTreeMap<Ccs, (Vec<String>, Option<String>, Timestamp)> = [
            ("a".to_string(), (vec!["bio".to_string()], None, 0i64)),
            ("b".to_string(), (vec!["bio".to_string()], None, 0)),
            ("c".to_string(), (vec!["bio".to_string()], None, 0)),
            ("d".to_string(), (vec!["cs".to_string()], None, 0)),
        ]
        .into_iter()
        .collect();
        let mut a = app();
        a.relevance.domains = BTreeSet::from(["bio".to_string()]);
        let p = UtilityParams::default();
        let ranked = prioritize(
            &g,
            &claims,
            &a,
            &BTreeMap::new(),
            &BTreeMap::new(),
            &BTreeSet::new(),
            1_000_000_000,
            10,
            &p,
        );
        // d filtered out; higher-pi first; a/c tie broken by signature
        assert_eq!(
            ranked.iter().map(|r| r.ccs.as_str()).collect::<Vec<_>>(),
            vec!["a", "c", "b"]
        );

        // no claims pass the filter
        a.relevance.domains = BTreeSet::from(["physics".to_string()]);
        let ranked = prioritize(
            &g,
            &claims,
            &a,
            &BTreeMap::new(),
            &BTreeMap::new(),
            &BTreeSet::new(),
            0,
            10,
            &p,
        );
        assert!(ranked.is_empty());
    }
}
