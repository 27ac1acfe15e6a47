//! Typed claim graph: linkage construction, Noisy-OR belief propagation to a
//! fixpoint, conflict detection and resolution, instability scoring, min-cut
//! cluster partitioning, quarantine, and retraction suppression.
//!
//! Structures iterate in claim-signature order everywhere, so identical
//! graph + config always yields bit-identical belief vectors.

use crate::claim::{Ccs, Timestamp};
use crate::config::GraphConfig;
use crate::credibility::sigmoid;
use crate::error::{BewaError, Result};
use crate::kernel::{BeliefState, BeliefStatus, TransitionCause};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Deductive,
    Evidential,
    Semantic,
    Contrapositive,
    Replicative,
}

impl EdgeKind {
    /// Edge kinds whose subgraph must stay acyclic.
    pub fn foundational(self) -> bool {
        matches!(self, EdgeKind::Deductive | EdgeKind::Replicative)
    }

    pub fn relation_label(self) -> &'static str {
        match self {
            EdgeKind::Deductive => "entails",
            EdgeKind::Evidential => "supports",
            EdgeKind::Semantic => "semantic",
            EdgeKind::Contrapositive => "contrapositive",
            EdgeKind::Replicative => "replicates",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: Ccs,
    pub to: Ccs,
    pub kind: EdgeKind,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictSource {
    DeclaredEntailment,
    SemanticAntisim,
    Statistical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictEdge {
    pub a: Ccs,
    pub b: Ccs,
    pub source: ConflictSource,
    pub strength: f64,
}

impl ConflictEdge {
    fn key(&self) -> (Ccs, Ccs) {
        ordered_pair(&self.a, &self.b)
    }
}

fn ordered_pair(a: &str, b: &str) -> (Ccs, Ccs) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub members: BTreeSet<Ccs>,
    pub instability: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BeliefGraph {
    pub nodes: BTreeMap<Ccs, BeliefState>,
    pub edges: Vec<Edge>,
    pub conflict_edges: Vec<ConflictEdge>,
    pub epoch: u64,
    /// Network view from the last propagation; never written back into the
    /// kernel states, so re-running propagation is idempotent.
    pub propagated: BTreeMap<Ccs, f64>,
    /// Semantically+evidentially linked pairs lacking a logical edge, queued
    /// for offline induction. No belief effect.
    pub induction_queue: Vec<(Ccs, Ccs)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationReport {
    pub beliefs: BTreeMap<Ccs, f64>,
    pub iterations: u32,
    pub converged: bool,
    /// Oscillating strongly connected sets frozen mid-run, if any.
    pub frozen: Vec<BTreeSet<Ccs>>,
}

impl BeliefGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_node(&mut self, state: BeliefState) {
        self.nodes.insert(state.ccs.clone(), state);
    }

    pub fn node(&self, ccs: &str) -> Result<&BeliefState> {
        self.nodes
            .get(ccs)
            .ok_or_else(|| BewaError::UnknownClaim(ccs.to_string()))
    }

    pub fn node_mut(&mut self, ccs: &str) -> Result<&mut BeliefState> {
        self.nodes
            .get_mut(ccs)
            .ok_or_else(|| BewaError::UnknownClaim(ccs.to_string()))
    }

    /// Current belief of a node as the graph layer sees it.
    pub fn belief(&self, ccs: &str) -> Result<f64> {
        Ok(self.node(ccs)?.pi)
    }

    /// Insert an edge, rejecting unknown endpoints and any edge that would
    /// close a cycle in the foundational (deductive/replicative) subgraph.
    pub fn add_edge(&mut self, edge: Edge) -> Result<()> {
        if !self.nodes.contains_key(&edge.from) {
            return Err(BewaError::UnknownClaim(edge.from));
        }
        if !self.nodes.contains_key(&edge.to) {
            return Err(BewaError::UnknownClaim(edge.to));
        }
        if edge.kind.foundational() && self.foundational_reaches(&edge.to, &edge.from) {
            return Err(BewaError::FoundationalCycle);
        }
        self.edges.push(edge);
        Ok(())
    }

    fn foundational_reaches(&self, from: &str, target: &str) -> bool {
        if from == target {
            return true;
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([from.to_string()]);
        while let Some(cur) = queue.pop_front() {
            for e in self.edges.iter().filter(|e| e.kind.foundational()) {
                if e.from == cur && seen.insert(e.to.clone()) {
                    if e.to == target {
                        return true;
                    }
                    queue.push_back(e.to.clone());
                }
            }
        }
        false
    }

    pub fn parents_of(&self, ccs: &str) -> Vec<&Edge> {
        self.edges.iter().filter(|e| e.to == ccs).collect()
    }

    pub fn add_conflict(&mut self, edge: ConflictEdge) {
        let key = edge.key();
        if !self.conflict_edges.iter().any(|c| c.key() == key) {
            self.conflict_edges.push(edge);
        }
    }
}

/// Linkage triple: which of the semantic / logical / evidential relations
/// hold between a claim pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkageTriple {
    pub semantic: bool,
    pub logical: bool,
    pub evidential: bool,
}

/// Build an edge from a linkage decomposition. The weight combines the three
/// components under weights summing to one; the kind follows the dominant
/// contribution. A semantic+evidential pair without a logical link is queued
/// for induction instead of receiving automatic belief effect.
pub fn link_claims(
    graph: &mut BeliefGraph,
    a: &str,
    b: &str,
    lambda: LinkageTriple,
    similarity: f64,
    shared_evidence: f64,
    alpha: [f64; 3],
) -> Result<Option<Edge>> {
    if (alpha.iter().sum::<f64>() - 1.0).abs() > 1e-9 || alpha.iter().any(|a| *a < 0.0) {
        return Err(BewaError::BadWeights);
    }
    graph.node(a)?;
    graph.node(b)?;
    if !lambda.semantic && !lambda.logical && !lambda.evidential {
        return Ok(None);
    }
    if lambda.semantic && lambda.evidential && !lambda.logical {
        graph.induction_queue.push((a.to_string(), b.to_string()));
    }
    let c_sem = if lambda.semantic { alpha[0] * similarity } else { 0.0 };
    let c_log = if lambda.logical { alpha[1] } else { 0.0 };
    let c_evd = if lambda.evidential {
        alpha[2] * shared_evidence
    } else {
        0.0
    };
    let weight = (c_sem + c_log + c_evd).clamp(0.0, 1.0);
    let kind = if c_log >= c_sem && c_log >= c_evd && lambda.logical {
        EdgeKind::Deductive
    } else if c_evd >= c_sem && lambda.evidential {
        EdgeKind::Evidential
    } else {
        EdgeKind::Semantic
    };
    let edge = Edge {
        from: a.to_string(),
        to: b.to_string(),
        kind,
        weight,
    };
    graph.add_edge(edge.clone())?;
    Ok(Some(edge))
}

fn edge_decay(cfg: &GraphConfig, kind: EdgeKind) -> f64 {
    match kind {
        EdgeKind::Deductive => cfg.edge_decay.deductive,
        EdgeKind::Evidential => cfg.edge_decay.evidential,
        EdgeKind::Semantic => cfg.edge_decay.semantic,
        EdgeKind::Contrapositive => cfg.edge_decay.contrapositive,
        EdgeKind::Replicative => cfg.edge_decay.replicative,
    }
}

/// Asynchronous Noisy-OR sweeps to a global fixpoint.
///
/// Each unmasked node aggregates its unmasked parents:
/// `1 - (1 - leak) * prod(1 - w_ij * pi_i)` with the node's own kernel
/// belief as the leak term, damped toward the previous iterate. The leak is
/// frozen at call entry, so the fixpoint is a pure function of the kernel
/// state and re-running moves nothing. Masked nodes (probational,
/// quarantined, utility-gated, frozen) neither send nor receive.
pub fn propagate(graph: &mut BeliefGraph, cfg: &GraphConfig) -> PropagationReport {
    let mut beliefs: BTreeMap<Ccs, f64> =
        graph.nodes.iter().map(|(k, v)| (k.clone(), v.pi)).collect();
    let leak = beliefs.clone();
    let masked: BTreeSet<Ccs> = graph
        .nodes
        .iter()
        .filter(|(_, s)| s.propagation_masked())
        .map(|(k, _)| k.clone())
        .collect();
    let mut frozen: BTreeSet<Ccs> = BTreeSet::new();
    let mut frozen_sets: Vec<BTreeSet<Ccs>> = Vec::new();

    // incoming-edge index with per-type decay and sender attenuation
    let mut incoming: BTreeMap<&str, Vec<(&str, f64)>> = BTreeMap::new();
    for e in &graph.edges {
        if masked.contains(&e.from) || masked.contains(&e.to) {
            continue;
        }
        let attenuation = graph
            .nodes
            .get(&e.from)
            .map(|s| s.propagation_factor)
            .unwrap_or(1.0);
        incoming
            .entry(e.to.as_str())
            .or_default()
            .push((e.from.as_str(), e.weight * edge_decay(cfg, e.kind) * attenuation));
    }

    let order: Vec<Ccs> = graph.nodes.keys().cloned().collect();
    let mut last_delta = f64::INFINITY;
    let mut stall = 0u32;
    let mut iterations = 0u32;
    let mut converged = false;

    while iterations < cfg.max_iters {
        iterations += 1;
        let mut sweep: Vec<&Ccs> = order.iter().collect();
        if cfg.schedule == crate::config::Schedule::Priority {
            // deterministic high-impact ordering: biggest distance from its
            // leak first, signature as the tiebreak
            sweep.sort_by(|x, y| {
                let dx = (beliefs[*x] - leak[*x]).abs();
                let dy = (beliefs[*y] - leak[*y]).abs();
                dy.partial_cmp(&dx).unwrap().then_with(|| x.cmp(y))
            });
        }
        let mut max_delta: f64 = 0.0;
        for ccs in sweep {
            if masked.contains(ccs) || frozen.contains(ccs) {
                continue;
            }
            let Some(parents) = incoming.get(ccs.as_str()) else {
                continue;
            };
            let mut survive = 1.0 - leak[ccs];
            for (parent, w) in parents {
                if frozen.contains(*parent) {
                    // frozen senders still emit their held value
                }
                survive *= 1.0 - w * beliefs[*parent];
            }
            let noisy_or = 1.0 - survive;
            let current = beliefs[ccs];
            let next = (1.0 - cfg.damping) * current + cfg.damping * noisy_or;
            let delta = (next - current).abs();
            if delta > max_delta {
                max_delta = delta;
            }
            beliefs.insert(ccs.clone(), next);
        }
        if max_delta < cfg.delta_convergence {
            converged = true;
            break;
        }
        // oscillation handling: if the global delta fails to shrink for 10
        // consecutive sweeps, freeze the smallest unstable SCC and go on
        if max_delta >= last_delta {
            stall += 1;
            if stall >= 10 {
                if let Some(set) = smallest_unstable_scc(graph, &beliefs, &leak, &frozen, cfg) {
                    frozen.extend(set.iter().cloned());
                    frozen_sets.push(set);
                }
                stall = 0;
            }
        } else {
            stall = 0;
        }
        last_delta = max_delta;
    }

    graph.propagated = beliefs.clone();
    PropagationReport {
        beliefs,
        iterations,
        converged,
        frozen: frozen_sets,
    }
}

/// Smallest strongly connected component (Tarjan over the unmasked edge set)
/// restricted to nodes still moving; ties by lexicographic first member.
fn smallest_unstable_scc(
    graph: &BeliefGraph,
    beliefs: &BTreeMap<Ccs, f64>,
    leak: &BTreeMap<Ccs, f64>,
    frozen: &BTreeSet<Ccs>,
    cfg: &GraphConfig,
) -> Option<BTreeSet<Ccs>> {
    let moving: BTreeSet<&Ccs> = beliefs
        .iter()
        .filter(|(k, v)| {
            !frozen.contains(*k) && ((**v) - leak[*k]).abs() > cfg.delta_convergence
        })
        .map(|(k, _)| k)
        .collect();
    let sccs = strongly_connected(graph, &moving);
    sccs.into_iter()
        .filter(|s| s.len() > 1)
        .min_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then_with(|| a.iter().next().cmp(&b.iter().next()))
        })
}

fn strongly_connected(graph: &BeliefGraph, scope: &BTreeSet<&Ccs>) -> Vec<BTreeSet<Ccs>> {
    // iterative Tarjan
    let nodes: Vec<&Ccs> = scope.iter().copied().collect();
    let index_of: BTreeMap<&str, usize> =
        nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for e in &graph.edges {
        if let (Some(&u), Some(&v)) = (index_of.get(e.from.as_str()), index_of.get(e.to.as_str()))
        {
            adj[u].push(v);
        }
    }
    let n = nodes.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut counter = 0usize;
    let mut out: Vec<BTreeSet<Ccs>> = Vec::new();

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut pi)) = work.last_mut() {
            if *pi == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *pi < adj[v].len() {
                let w = adj[v][*pi];
                *pi += 1;
                if index[w] == usize::MAX {
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = BTreeSet::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.insert(nodes[w].clone());
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Empirically measure how deep a perturbation travels, and the analytic
/// bound it must respect given the minimum edge decay factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceDepth {
    pub max_affected_depth: u32,
    pub bound: u32,
    pub within_bound: bool,
}

pub fn bounded_influence_check(
    graph: &BeliefGraph,
    perturbed: &str,
    delta: f64,
    epsilon: f64,
    cfg: &GraphConfig,
) -> Result<InfluenceDepth> {
    graph.node(perturbed)?;
    let mut baseline = graph.clone();
    let base = propagate(&mut baseline, cfg);

    let mut shifted = graph.clone();
    {
        let node = shifted.node_mut(perturbed)?;
        node.pi = (node.pi + delta).clamp(0.0, 1.0);
    }
    let moved = propagate(&mut shifted, cfg);

    // BFS depth from the perturbed node over directed edges
    let mut depth: BTreeMap<&str, u32> = BTreeMap::new();
    depth.insert(perturbed, 0);
    let mut queue = VecDeque::from([perturbed.to_string()]);
    while let Some(cur) = queue.pop_front() {
        let d = depth[cur.as_str()];
        for e in graph.edges.iter().filter(|e| e.from == cur) {
            if !depth.contains_key(e.to.as_str()) {
                depth.insert(e.to.as_str(), d + 1);
                queue.push_back(e.to.clone());
            }
        }
    }

    let mut max_affected = 0u32;
    for (ccs, d) in &depth {
        if *d == 0 {
            continue;
        }
        let change = (moved.beliefs[*ccs] - base.beliefs[*ccs]).abs();
        if change >= epsilon {
            max_affected = max_affected.max(*d);
        }
    }

    let min_gamma = [
        cfg.edge_decay.deductive,
        cfg.edge_decay.evidential,
        cfg.edge_decay.semantic,
        cfg.edge_decay.contrapositive,
        cfg.edge_decay.replicative,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let bound = if delta == 0.0 {
        0
    } else if min_gamma > 0.0 && min_gamma < 1.0 {
        ((epsilon / delta).ln() / min_gamma.ln()).ceil().max(0.0) as u32
    } else {
        u32::MAX
    };
    Ok(InfluenceDepth {
        max_affected_depth: max_affected,
        bound,
        within_bound: max_affected <= bound,
    })
}

/// Declared or semantic contradiction pairs whose beliefs both clear the
/// relevance threshold become conflict edges; the violation set additionally
/// clears the coherence threshold and demands resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictScan {
    pub edges: Vec<ConflictEdge>,
    /// Pairs violating the no-persistent-contradiction axiom.
    pub violations: Vec<(Ccs, Ccs)>,
}

pub fn detect_conflicts(
    graph: &mut BeliefGraph,
    declared: &[(Ccs, Ccs)],
    antisim: &[(Ccs, Ccs, f64)],
    cfg: &GraphConfig,
) -> Result<ConflictScan> {
    let mut fresh = Vec::new();
    let mut push = |graph: &mut BeliefGraph, a: &Ccs, b: &Ccs, source, strength| -> Result<()> {
        let pa = graph.belief(a)?;
        let pb = graph.belief(b)?;
        if pa > cfg.delta_conflict && pb > cfg.delta_conflict {
            let edge = ConflictEdge {
                a: a.clone(),
                b: b.clone(),
                source,
                strength,
            };
            graph.add_conflict(edge.clone());
            fresh.push(edge);
        }
        Ok(())
    };
    for (a, b) in declared {
        push(graph, a, b, ConflictSource::DeclaredEntailment, 1.0)?;
    }
    for (a, b, score) in antisim {
        if *score >= cfg.theta_antisim {
            push(graph, a, b, ConflictSource::SemanticAntisim, *score)?;
        }
    }
    let mut violations = Vec::new();
    for c in &graph.conflict_edges {
        let pa = graph.nodes[&c.a].pi;
        let pb = graph.nodes[&c.b].pi;
        if pa > cfg.theta_coherence && pb > cfg.theta_coherence {
            violations.push((c.a.clone(), c.b.clone()));
        }
    }
    Ok(ConflictScan {
        edges: fresh,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ResolutionOutcome {
    /// Both sides rescaled by the evidence log-ratio.
    Rescaled { pi_a: f64, pi_b: f64 },
    /// One side carried no evidence; it collapsed to the probationary value.
    OneSided { winner: Ccs, loser: Ccs },
}

/// Resolve one conflict edge: rescale both beliefs by the logistic of the
/// evidence log-ratio, tag both unstable (attenuating their outgoing
/// influence by their cluster's instability), and enforce coexistence
/// (pi_a + pi_b <= 1 + eps) by proportional rescale.
pub fn resolve_contradiction(
    graph: &mut BeliefGraph,
    edge: &ConflictEdge,
    pi_dagger: f64,
    cfg: &GraphConfig,
    now: Timestamp,
) -> Result<ResolutionOutcome> {
    let mass_a = graph.node(&edge.a)?.evidence_mass;
    let mass_b = graph.node(&edge.b)?.evidence_mass;

    if mass_a <= 0.0 && mass_b <= 0.0 {
        return Err(BewaError::NoEvidence);
    }
    if mass_a <= 0.0 || mass_b <= 0.0 {
        let (winner, loser) = if mass_a > 0.0 {
            (edge.a.clone(), edge.b.clone())
        } else {
            (edge.b.clone(), edge.a.clone())
        };
        let state = graph.node_mut(&loser)?;
        state.pi = pi_dagger;
        state.record(now, TransitionCause::ConflictResolution);
        return Ok(ResolutionOutcome::OneSided { winner, loser });
    }

    let delta = (mass_a / mass_b).ln();
    let mut pi_a = graph.nodes[&edge.a].pi * sigmoid(delta);
    let mut pi_b = graph.nodes[&edge.b].pi * sigmoid(-delta);
    let cap = 1.0 + cfg.epsilon_coexistence;
    if pi_a + pi_b > cap {
        let scale = cap / (pi_a + pi_b);
        pi_a *= scale;
        pi_b *= scale;
    }

    // instability sampled over the conflict component containing the pair
    let component = conflict_component(graph, &edge.a);
    let iota = instability(graph, &component)?;
    for (ccs, pi) in [(&edge.a, pi_a), (&edge.b, pi_b)] {
        let state = graph.node_mut(ccs)?;
        state.pi = pi;
        state.propagation_factor *= 1.0 - iota;
        state.record(now, TransitionCause::ConflictResolution);
    }
    Ok(ResolutionOutcome::Rescaled { pi_a, pi_b })
}

/// Connected component of the conflict-edge graph containing `seed`.
pub fn conflict_component(graph: &BeliefGraph, seed: &str) -> BTreeSet<Ccs> {
    let mut seen: BTreeSet<Ccs> = BTreeSet::from([seed.to_string()]);
    let mut queue = VecDeque::from([seed.to_string()]);
    while let Some(cur) = queue.pop_front() {
        for c in &graph.conflict_edges {
            for (x, y) in [(&c.a, &c.b), (&c.b, &c.a)] {
                if x == &cur && seen.insert(y.clone()) {
                    queue.push_back(y.clone());
                }
            }
        }
    }
    seen
}

/// Conflict-mass density of a cluster: sum of belief products over internal
/// conflict edges, normalised by the squared member count.
pub fn instability(graph: &BeliefGraph, members: &BTreeSet<Ccs>) -> Result<f64> {
    if members.is_empty() {
        return Err(BewaError::EmptyCluster);
    }
    let sum: f64 = graph
        .conflict_edges
        .iter()
        .filter(|c| members.contains(&c.a) && members.contains(&c.b))
        .map(|c| graph.nodes[&c.a].pi * graph.nodes[&c.b].pi)
        .sum();
    Ok(sum / (members.len() as f64).powi(2))
}

pub fn cluster_report(graph: &BeliefGraph, members: BTreeSet<Ccs>, theta: f64) -> Result<ClusterReport> {
    let iota = instability(graph, &members)?;
    Ok(ClusterReport {
        members,
        instability: iota,
        flagged: iota > theta,
    })
}

/// Split a flagged cluster along the minimum conflict-flow cut, recursing
/// until every piece is calm or a singleton. Cut weights are the belief
/// products across conflict edges; ties resolve to the cut isolating the
/// lexicographically smallest side.
pub fn partition_cluster(
    graph: &BeliefGraph,
    members: &BTreeSet<Ccs>,
    theta: f64,
) -> Result<Vec<BTreeSet<Ccs>>> {
    let iota = instability(graph, members)?;
    if iota <= theta {
        return Err(BewaError::NotFlagged);
    }
    let mut result = Vec::new();
    let mut work = vec![members.clone()];
    while let Some(cluster) = work.pop() {
        if cluster.len() <= 1 || instability(graph, &cluster)? <= theta {
            result.push(cluster);
            continue;
        }
        let (left, right) = min_conflict_cut(graph, &cluster);
        if left.is_empty() || right.is_empty() {
            result.push(cluster); // no further cut possible
            continue;
        }
        work.push(left);
        work.push(right);
    }
    result.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
    Ok(result)
}

/// Deterministic global min cut over conflict-flow weights. Exhaustive over
/// bipartitions for small clusters (exact, with the documented tie-break);
/// Stoer–Wagner with ordered tie-breaking beyond.
fn min_conflict_cut(graph: &BeliefGraph, members: &BTreeSet<Ccs>) -> (BTreeSet<Ccs>, BTreeSet<Ccs>) {
    let nodes: Vec<&Ccs> = members.iter().collect();
    let n = nodes.len();
    let index: BTreeMap<&str, usize> =
        nodes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut w = vec![vec![0.0f64; n]; n];
    for c in &graph.conflict_edges {
        if let (Some(&i), Some(&j)) = (index.get(c.a.as_str()), index.get(c.b.as_str())) {
            let weight = graph.nodes[&c.a].pi * graph.nodes[&c.b].pi;
            w[i][j] += weight;
            w[j][i] += weight;
        }
    }

    if n <= 16 {
        // enumerate bipartitions; subsets ordered so smaller, lexicographically
        // earlier sides come first and win ties
        let mut best: Option<(f64, BTreeSet<Ccs>)> = None;
        let mut subsets: Vec<u32> = (1..(1u32 << n) - 1).collect();
        subsets.sort_by_key(|s| (s.count_ones(), *s));
        for mask in subsets {
            if mask & 1 == 0 && best.is_some() {
                // canonical form: only evaluate sides containing node 0 once
                // both orientations enumerate; the ordering already prefers
                // smaller masks, so just skip nothing and rely on strict '<'
            }
            let mut cut = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    let crosses = ((mask >> i) & 1) != ((mask >> j) & 1);
                    if crosses {
                        cut += w[i][j];
                    }
                }
            }
            let better = match &best {
                None => true,
                Some((bw, _)) => cut < bw - 1e-15,
            };
            if better {
                let side: BTreeSet<Ccs> = (0..n)
                    .filter(|i| (mask >> i) & 1 == 1)
                    .map(|i| nodes[i].clone())
                    .collect();
                best = Some((cut, side));
            }
        }
        let (_, side) = best.expect("cluster has at least 2 nodes");
        let other: BTreeSet<Ccs> = members.difference(&side).cloned().collect();
        (side, other)
    } else {
        stoer_wagner(&nodes, &w)
    }
}

fn stoer_wagner(nodes: &[&Ccs], weights: &[Vec<f64>]) -> (BTreeSet<Ccs>, BTreeSet<Ccs>) {
    let n = nodes.len();
    let mut w: Vec<Vec<f64>> = weights.to_vec();
    let mut groups: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best_cut = f64::INFINITY;
    let mut best_side: Vec<usize> = Vec::new();

    while active.len() > 1 {
        let mut a: Vec<usize> = vec![active[0]];
        let mut candidates: Vec<usize> = active[1..].to_vec();
        let mut conn: BTreeMap<usize, f64> =
            candidates.iter().map(|&v| (v, w[active[0]][v])).collect();
        while !candidates.is_empty() {
            // deterministic: max connectivity, smallest index tiebreak
            let (&next, _) = conn
                .iter()
                .max_by(|(i, x), (j, y)| x.partial_cmp(y).unwrap().then_with(|| j.cmp(i)))
                .unwrap();
            candidates.retain(|&v| v != next);
            conn.remove(&next);
            a.push(next);
            for &v in &candidates {
                *conn.get_mut(&v).unwrap() += w[next][v];
            }
        }
        let t = *a.last().unwrap();
        let s = a[a.len() - 2];
        let cut_weight: f64 = active.iter().filter(|&&v| v != t).map(|&v| w[t][v]).sum();
        if cut_weight < best_cut - 1e-15 {
            best_cut = cut_weight;
            best_side = groups[t].clone();
        }
        // merge t into s
        let t_group = groups[t].clone();
        groups[s].extend(t_group);
        for &v in &active {
            if v != s && v != t {
                let add = w[t][v];
                w[s][v] += add;
                w[v][s] += add;
            }
        }
        active.retain(|&v| v != t);
    }
    let side: BTreeSet<Ccs> = best_side.iter().map(|&i| nodes[i].clone()).collect();
    let all: BTreeSet<Ccs> = nodes.iter().map(|c| (*c).clone()).collect();
    let other: BTreeSet<Ccs> = all.difference(&side).cloned().collect();
    (side, other)
}

/// Minimal total-belief set whose removal clears every coherence violation:
/// a minimum-weight vertex cover of the violation pairs. Exact for
/// components up to 20 nodes; greedy (drop the lower-belief side of each
/// violation) beyond. Quarantined nodes are masked from propagation.
pub fn quarantine(graph: &mut BeliefGraph, theta_c: f64, now: Timestamp) -> BTreeSet<Ccs> {
    let violations: Vec<(Ccs, Ccs)> = graph
        .conflict_edges
        .iter()
        .filter(|c| graph.nodes[&c.a].pi > theta_c && graph.nodes[&c.b].pi > theta_c)
        .map(|c| ordered_pair(&c.a, &c.b))
        .collect();
    let set = quarantine_set(
        &violations,
        &graph.nodes.iter().map(|(k, v)| (k.clone(), v.pi)).collect(),
    );
    for ccs in &set {
        if let Some(state) = graph.nodes.get_mut(ccs) {
            state.status = BeliefStatus::Quarantined;
            state.record(now, TransitionCause::Quarantine);
        }
    }
    set
}

/// Pure quarantine-set computation over violation pairs and beliefs.
pub fn quarantine_set(
    violations: &[(Ccs, Ccs)],
    beliefs: &BTreeMap<Ccs, f64>,
) -> BTreeSet<Ccs> {
    let mut result = BTreeSet::new();
    // split into connected components
    let mut remaining: Vec<(Ccs, Ccs)> = violations.to_vec();
    while let Some(seed) = remaining.first().cloned() {
        let mut comp_nodes: BTreeSet<Ccs> = BTreeSet::from([seed.0.clone(), seed.1.clone()]);
        let mut comp_edges: Vec<(Ccs, Ccs)> = Vec::new();
        loop {
            let mut grew = false;
            remaining.retain(|(a, b)| {
                if comp_nodes.contains(a) || comp_nodes.contains(b) {
                    comp_nodes.insert(a.clone());
                    comp_nodes.insert(b.clone());
                    comp_edges.push((a.clone(), b.clone()));
                    grew = true;
                    false
                } else {
                    true
                }
            });
            if !grew {
                break;
            }
        }
        result.extend(cover_component(&comp_nodes, &comp_edges, beliefs));
    }
    result
}

fn cover_component(
    nodes: &BTreeSet<Ccs>,
    edges: &[(Ccs, Ccs)],
    beliefs: &BTreeMap<Ccs, f64>,
) -> BTreeSet<Ccs> {
    let ordered: Vec<&Ccs> = nodes.iter().collect();
    let n = ordered.len();
    if n <= 20 {
        let index: BTreeMap<&str, usize> = ordered
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let pairs: Vec<(usize, usize)> = edges
            .iter()
            .map(|(a, b)| (index[a.as_str()], index[b.as_str()]))
            .collect();
        let mut best: Option<(f64, u32)> = None;
        for mask in 0u32..(1 << n) {
            if pairs
                .iter()
                .all(|(i, j)| (mask >> i) & 1 == 1 || (mask >> j) & 1 == 1)
            {
                let total: f64 = (0..n)
                    .filter(|i| (mask >> i) & 1 == 1)
                    .map(|i| beliefs[ordered[i]])
                    .sum();
                let better = match best {
                    None => true,
                    Some((bw, bm)) => {
                        total < bw - 1e-15
                            || ((total - bw).abs() <= 1e-15
                                && mask.count_ones() < bm.count_ones())
                            || ((total - bw).abs() <= 1e-15
                                && mask.count_ones() == bm.count_ones()
                                && mask < bm)
                    }
                };
                if better {
                    best = Some((total, mask));
                }
            }
        }
        let (_, mask) = best.expect("full set always covers");
        (0..n)
            .filter(|i| (mask >> i) & 1 == 1)
            .map(|i| ordered[i].clone())
            .collect()
    } else {
        // greedy: remove the lower-belief side of each uncovered violation
        let mut cover = BTreeSet::new();
        for (a, b) in edges {
            if cover.contains(a) || cover.contains(b) {
                continue;
            }
            if beliefs[a] <= beliefs[b] {
                cover.insert(a.clone());
            } else {
                cover.insert(b.clone());
            }
        }
        cover
    }
}

/// Cap every foundational descendant of a retracted claim at the floor
/// unless it keeps an independent evidential parent above the exemption
/// threshold. History before the retraction timestamp is untouched.
pub fn suppress_retraction(
    graph: &mut BeliefGraph,
    retracted: &str,
    epsilon_floor: f64,
    theta_exempt: f64,
    t_r: Timestamp,
) -> Result<Vec<Ccs>> {
    graph.node(retracted)?;
    // descendants over deductive/replicative edges
    let mut descendants: BTreeSet<Ccs> = BTreeSet::new();
    let mut queue = VecDeque::from([retracted.to_string()]);
    while let Some(cur) = queue.pop_front() {
        for e in graph.edges.iter().filter(|e| e.kind.foundational()) {
            if e.from == cur && !descendants.contains(&e.to) && e.to != retracted {
                descendants.insert(e.to.clone());
                queue.push_back(e.to.clone());
            }
        }
    }
    let mut suppressed = Vec::new();
    for ccs in &descendants {
        let exempt = graph.edges.iter().any(|e| {
            e.to == *ccs
                && e.kind == EdgeKind::Evidential
                && e.weight > theta_exempt
                && e.from != retracted
                && !descendants.contains(&e.from)
        });
        if exempt {
            continue;
        }
        let state = graph.nodes.get_mut(ccs).expect("descendant exists");
        if state.pi > epsilon_floor {
            state.pi = epsilon_floor;
            state.record(t_r, TransitionCause::RetractionSuppression);
            suppressed.push(ccs.clone());
        }
    }
    Ok(suppressed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GraphConfig;

    fn node(ccs: &str, pi: f64) -> BeliefState {
        BeliefState::new(ccs.to_string(), pi, BeliefStatus::Canonical, 0)
    }

    fn graph_with(nodes: &[(&str, f64)]) -> BeliefGraph {
        let mut g = BeliefGraph::new();
        for (ccs, pi) in nodes {
            g.insert_node(node(ccs, *pi));
        }
        g
    }

    fn cfg() -> GraphConfig {
        GraphConfig::default()
    }

    #[test]
    fn link_claims_cases() {
        let mut g = graph_with(&[("a", 0.5), ("b", 0.5)]);
        let alpha = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        let none = LinkageTriple {
            semantic: false,
            logical: false,
            evidential: false,
        };
        assert!(link_claims(&mut g, "a", "b", none, 0.9, 0.9, alpha)
            .unwrap()
            .is_none());

        let all = LinkageTriple {
            semantic: true,
            logical: true,
            evidential: true,
        };
        let e = link_claims(&mut g, "a", "b", all, 1.0, 1.0, alpha)
            .unwrap()
            .unwrap();
        assert!((e.weight - 1.0).abs() < 1e-12);
        assert_eq!(e.kind, EdgeKind::Deductive);

        let sem = LinkageTriple {
            semantic: true,
            logical: false,
            evidential: false,
        };
        let mut g2 = graph_with(&[("a", 0.5), ("b", 0.5)]);
        let e = link_claims(&mut g2, "a", "b", sem, 0.9, 0.0, [0.5, 0.3, 0.2])
            .unwrap()
            .unwrap();
        assert!((e.weight - 0.45).abs() < 1e-12);
        assert_eq!(e.kind, EdgeKind::Semantic);

        // bad weights
        assert_eq!(
            link_claims(&mut g2, "a", "b", sem, 0.9, 0.0, [0.5, 0.5, 0.5]).unwrap_err(),
            BewaError::BadWeights
        );
    }

    #[test]
    fn induction_queue_captures_soft_logic_candidates() {
        let mut g = graph_with(&[("a", 0.5), ("b", 0.5)]);
        let triple = LinkageTriple {
            semantic: true,
            logical: false,
            evidential: true,
        };
        link_claims(&mut g, "a", "b", triple, 0.9, 1.0, [1.0 / 3.0; 3]).unwrap();
        assert_eq!(g.induction_queue, vec![("a".to_string(), "b".to_string())]);
    }

    #[test]
    fn foundational_cycle_rejected() {
        let mut g = graph_with(&[("a", 0.5), ("b", 0.5), ("c", 0.5)]);
        let edge = |from: &str, to: &str, kind| Edge {
            from: from.into(),
            to: to.into(),
            kind,
            weight: 1.0,
        };
        g.add_edge(edge("a", "b", EdgeKind::Deductive)).unwrap();
        g.add_edge(edge("b", "c", EdgeKind::Replicative)).unwrap();
        assert_eq!(
            g.add_edge(edge("c", "a", EdgeKind::Deductive)).unwrap_err(),
            BewaError::FoundationalCycle
        );
        // non-foundational cycles are permitted
        g.add_edge(edge("c", "a", EdgeKind::Semantic)).unwrap();
    }

    #[test]
    fn propagate_no_edges_is_identity() {
        let mut g = graph_with(&[("a", 0.3), ("b", 0.8)]);
        let report = propagate(&mut g, &cfg());
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.beliefs["a"], 0.3);
        assert_eq!(report.beliefs["b"], 0.8);
    }

    #[test]
    fn propagate_single_parent_noisy_or() {
        // chain a -> b with w = 1, leak(b) = 0, damping 1
        let mut g = graph_with(&[("a", 0.5), ("b", 0.0)]);
        g.add_edge(Edge {
            from: "a".into(),
            to: "b".into(),
            kind: EdgeKind::Evidential,
            weight: 1.0,
        })
        .unwrap();
        let mut c = cfg();
        c.damping = 1.0;
        let report = propagate(&mut g, &c);
        assert!(report.converged);
        assert!((report.beliefs["b"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn propagate_two_parent_noisy_or() {
        let mut g = graph_with(&[("p1", 0.5), ("p2", 0.5), ("z", 0.0)]);
        for p in ["p1", "p2"] {
            g.add_edge(Edge {
                from: p.into(),
                to: "z".into(),
                kind: EdgeKind::Evidential,
                weight: 1.0,
            })
            .unwrap();
        }
        let mut c = cfg();
        c.damping = 1.0;
        let report = propagate(&mut g, &c);
        assert!((report.beliefs["z"] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn propagate_idempotent_and_deterministic() {
        let mut g = graph_with(&[("a", 0.6), ("b", 0.4), ("c", 0.2), ("d", 0.7)]);
        for (f, t, w) in [("a", "b", 0.8), ("b", "c", 0.5), ("d", "c", 0.9), ("a", "d", 0.3)] {
            g.add_edge(Edge {
                from: f.into(),
                to: t.into(),
                kind: EdgeKind::Evidential,
                weight: w,
            })
            .unwrap();
        }
        let c = cfg();
        let first = propagate(&mut g.clone(), &c);
        let second = propagate(&mut g, &c);
        assert_eq!(first.beliefs, second.beliefs); // deterministic

        // idempotence: propagating the already-propagated graph moves nothing
        // beyond the convergence threshold because leaks are kernel beliefs
        let mut again = g.clone();
        let third = propagate(&mut again, &c);
        for (k, v) in &third.beliefs {
            assert!((v - second.beliefs[k]).abs() <= c.delta_convergence);
        }
    }

    #[test]
    fn masked_nodes_do_not_move_or_send() {
        let mut g = graph_with(&[("a", 0.9), ("b", 0.1), ("q", 0.9)]);
        g.node_mut("b").unwrap().status = BeliefStatus::Probational;
        g.node_mut("q").unwrap().status = BeliefStatus::Quarantined;
        g.add_edge(Edge {
            from: "a".into(),
            to: "b".into(),
            kind: EdgeKind::Evidential,
            weight: 1.0,
        })
        .unwrap();
        g.add_edge(Edge {
            from: "q".into(),
            to: "a".into(),
            kind: EdgeKind::Evidential,
            weight: 1.0,
        })
        .unwrap();
        let report = propagate(&mut g, &cfg());
        assert_eq!(report.beliefs["b"], 0.1); // receives nothing
        assert_eq!(report.beliefs["a"], 0.9); // quarantined parent sends nothing
    }

    #[test]
    fn influence_depth_on_path() {
        // ten-node path with gamma = 0.5 per hop
        let names: Vec<String> = (0..10).map(|i| format!("n{i:02}")).collect();
        let mut g = BeliefGraph::new();
        for n in &names {
            g.insert_node(node(n, 0.5));
        }
        for w in names.windows(2) {
            g.add_edge(Edge {
                from: w[0].clone(),
                to: w[1].clone(),
                kind: EdgeKind::Evidential,
                weight: 1.0,
            })
            .unwrap();
        }
        let mut c = cfg();
        c.edge_decay.evidential = 0.5;
        c.damping = 1.0;
        let out = bounded_influence_check(&g, "n00", 0.1, 0.01, &c).unwrap();
        assert_eq!(out.bound, 4);
        assert!(out.within_bound, "depth {} exceeded bound", out.max_affected_depth);

        // zero perturbation: nothing moves
        let out = bounded_influence_check(&g, "n00", 0.0, 0.01, &c).unwrap();
        assert_eq!(out.max_affected_depth, 0);

        // isolated node
        let mut g2 = graph_with(&[("solo", 0.5)]);
        g2.insert_node(node("other", 0.5));
        let out = bounded_influence_check(&g2, "solo", 0.2, 0.01, &c).unwrap();
        assert_eq!(out.max_affected_depth, 0);
    }

    #[test]
    fn conflict_detection_thresholds() {
        let mut g = graph_with(&[("a", 0.9), ("b", 0.8), ("c", 0.3)]);
        let scan = detect_conflicts(
            &mut g,
            &[("a".into(), "b".into()), ("a".into(), "c".into())],
            &[],
            &cfg(),
        )
        .unwrap();
        assert_eq!(scan.edges.len(), 1); // a-c fails the belief threshold
        assert_eq!(scan.violations.len(), 1); // both above theta_coherence

        // antisim pair
        let mut g = graph_with(&[("a", 0.7), ("b", 0.7)]);
        let scan = detect_conflicts(&mut g, &[], &[("a".into(), "b".into(), 0.95)], &cfg()).unwrap();
        assert_eq!(scan.edges[0].source, ConflictSource::SemanticAntisim);

        // below antisim threshold: ignored
        let mut g = graph_with(&[("a", 0.7), ("b", 0.7)]);
        let scan = detect_conflicts(&mut g, &[], &[("a".into(), "b".into(), 0.5)], &cfg()).unwrap();
        assert!(scan.edges.is_empty());
    }

    fn conflicted_pair(mass_a: f64, mass_b: f64) -> (BeliefGraph, ConflictEdge) {
        let mut g = graph_with(&[("a", 0.9), ("b", 0.9)]);
        g.node_mut("a").unwrap().evidence_mass = mass_a;
        g.node_mut("b").unwrap().evidence_mass = mass_b;
        let edge = ConflictEdge {
            a: "a".into(),
            b: "b".into(),
            source: ConflictSource::DeclaredEntailment,
            strength: 1.0,
        };
        g.add_conflict(edge.clone());
        (g, edge)
    }

    #[test]
    fn resolution_symmetry_and_ratio() {
        // equal evidence: both scaled by sigma(0) = 1/2
        let (mut g, edge) = conflicted_pair(1.0, 1.0);
        match resolve_contradiction(&mut g, &edge, 0.01, &cfg(), 10).unwrap() {
            ResolutionOutcome::Rescaled { pi_a, pi_b } => {
                assert!((pi_a - 0.45).abs() < 1e-12);
                assert!((pi_b - 0.45).abs() < 1e-12);
            }
            other => panic!("unexpected outcome {other:?}"),
        }

        // evidence ratio e: delta = 1
        let (mut g, edge) = conflicted_pair(std::f64::consts::E, 1.0);
        match resolve_contradiction(&mut g, &edge, 0.01, &cfg(), 10).unwrap() {
            ResolutionOutcome::Rescaled { pi_a, pi_b } => {
                assert!((pi_a - 0.9 * 0.731_058_578_630_004_9).abs() < 1e-9);
                assert!((pi_b - 0.9 * 0.268_941_421_369_995_1).abs() < 1e-9);
                // sigma(x) + sigma(-x) = 1, so the pair sums to 0.9
                assert!((pi_a + pi_b - 0.9).abs() < 1e-12);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn resolution_one_sided_and_empty() {
        let (mut g, edge) = conflicted_pair(1.0, 0.0);
        match resolve_contradiction(&mut g, &edge, 0.01, &cfg(), 10).unwrap() {
            ResolutionOutcome::OneSided { winner, loser } => {
                assert_eq!(winner, "a");
                assert_eq!(loser, "b");
                assert_eq!(g.nodes["b"].pi, 0.01);
                assert_eq!(g.nodes["a"].pi, 0.9);
            }
            other => panic!("unexpected outcome {other:?}"),
        }

        let (mut g, edge) = conflicted_pair(0.0, 0.0);
        assert_eq!(
            resolve_contradiction(&mut g, &edge, 0.01, &cfg(), 10).unwrap_err(),
            BewaError::NoEvidence
        );
    }

    #[test]
    fn instability_examples() {
        let g = graph_with(&[("a", 0.9), ("b", 0.9)]);
        let members: BTreeSet<Ccs> = ["a".to_string(), "b".to_string()].into();
        // no conflict edges -> 0
        assert_eq!(instability(&g, &members).unwrap(), 0.0);

        let (g, _) = conflicted_pair(1.0, 1.0);
        let members: BTreeSet<Ccs> = ["a".to_string(), "b".to_string()].into();
        assert!((instability(&g, &members).unwrap() - 0.2025).abs() < 1e-12);

        // triangle of unit beliefs: 3 / 9
        let mut g = graph_with(&[("a", 1.0), ("b", 1.0), ("c", 1.0)]);
        for (x, y) in [("a", "b"), ("b", "c"), ("a", "c")] {
            g.add_conflict(ConflictEdge {
                a: x.into(),
                b: y.into(),
                source: ConflictSource::DeclaredEntailment,
                strength: 1.0,
            });
        }
        let members: BTreeSet<Ccs> = ["a".to_string(), "b".to_string(), "c".to_string()].into();
        assert!((instability(&g, &members).unwrap() - 1.0 / 3.0).abs() < 1e-12);

        assert_eq!(
            instability(&g, &BTreeSet::new()).unwrap_err(),
            BewaError::EmptyCluster
        );
    }

    #[test]
    fn partition_two_node_cluster() {
        let (g, _) = conflicted_pair(1.0, 1.0);
        let members: BTreeSet<Ccs> = ["a".to_string(), "b".to_string()].into();
        let parts = partition_cluster(&g, &members, 0.15).unwrap();
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().all(|p| p.len() == 1));
    }

    #[test]
    fn partition_triangle_tiebreak_isolates_smallest() {
        let mut g = graph_with(&[("a", 0.9), ("b", 0.9), ("c", 0.9)]);
        for (x, y) in [("a", "b"), ("b", "c"), ("a", "c")] {
            g.add_conflict(ConflictEdge {
                a: x.into(),
                b: y.into(),
                source: ConflictSource::DeclaredEntailment,
                strength: 1.0,
            });
        }
        let members: BTreeSet<Ccs> =
            ["a".to_string(), "b".to_string(), "c".to_string()].into();
        let parts = partition_cluster(&g, &members, 0.15).unwrap();
        // the first cut isolates the lexicographically smallest node
        assert!(parts.contains(&BTreeSet::from(["a".to_string()])));
    }

    #[test]
    fn partition_requires_flag() {
        let g = graph_with(&[("a", 0.1), ("b", 0.1)]);
        let members: BTreeSet<Ccs> = ["a".to_string(), "b".to_string()].into();
        assert_eq!(
            partition_cluster(&g, &members, 0.15).unwrap_err(),
            BewaError::NotFlagged
        );
    }

    #[test]
    fn quarantine_examples() {
        // single violating pair: the lower-belief node goes
        let (mut g, _) = conflicted_pair(1.0, 1.0);
        g.node_mut("b").unwrap().pi = 0.6;
        let set = quarantine(&mut g, 0.5, 10);
        assert_eq!(set, BTreeSet::from(["b".to_string()]));
        assert_eq!(g.nodes["b"].status, BeliefStatus::Quarantined);

        // no violations: empty set
        let mut g = graph_with(&[("a", 0.9), ("b", 0.2)]);
        g.add_conflict(ConflictEdge {
            a: "a".into(),
            b: "b".into(),
            source: ConflictSource::DeclaredEntailment,
            strength: 1.0,
        });
        assert!(quarantine(&mut g, 0.6, 10).is_empty());

        // 3-clique with beliefs .9/.8/.7: cover = the two smaller
        let mut g = graph_with(&[("x", 0.9), ("y", 0.8), ("z", 0.7)]);
        for (a, b) in [("x", "y"), ("y", "z"), ("x", "z")] {
            g.add_conflict(ConflictEdge {
                a: a.into(),
                b: b.into(),
                source: ConflictSource::DeclaredEntailment,
                strength: 1.0,
            });
        }
        let set = quarantine(&mut g, 0.5, 10);
        assert_eq!(set, BTreeSet::from(["y".to_string(), "z".to_string()]));
    }

    #[test]
    fn retraction_suppression() {
        let mut g = graph_with(&[("r", 0.9), ("x", 0.8), ("y", 0.8), ("s", 0.9)]);
        let edge = |from: &str, to: &str, kind, weight| Edge {
            from: from.into(),
            to: to.into(),
            kind,
            weight,
        };
        g.add_edge(edge("r", "x", EdgeKind::Deductive, 1.0)).unwrap();
        g.add_edge(edge("r", "y", EdgeKind::Deductive, 1.0)).unwrap();
        g.add_edge(edge("s", "y", EdgeKind::Evidential, 0.9)).unwrap();

        let suppressed = suppress_retraction(&mut g, "r", 0.05, 0.55, 100).unwrap();
        assert_eq!(suppressed, vec!["x".to_string()]);
        assert_eq!(g.nodes["x"].pi, 0.05);
        assert_eq!(g.nodes["y"].pi, 0.8); // independently supported
        assert_eq!(g.nodes["s"].pi, 0.9);

        // retracted leaf: nothing changes
        let mut g = graph_with(&[("leaf", 0.9), ("other", 0.5)]);
        assert!(suppress_retraction(&mut g, "leaf", 0.05, 0.55, 100)
            .unwrap()
            .is_empty());
    }
}
