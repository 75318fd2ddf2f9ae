//! Evaluation harness: motif count reports with concentration KL
//! divergence, holdout construction for link and motif prediction, and
//! AUC/AP ranking metrics.

use crate::census::{census3, enumerate_instances, MotifInstance, MotifType};
use crate::graph::{Graph, NodeId};
use crate::score::ScoreMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("holdout requires a connected graph")]
    NotConnected,
    #[error("graph too saturated to sample {kind}: needed {needed}, found {found}")]
    NegativesExhausted {
        kind: &'static str,
        needed: usize,
        found: usize,
    },
    #[error("rank metrics need non-empty positive and negative score lists")]
    EmptyScores,
}

/// Smoothing floor applied to zero probability categories before computing
/// KL divergence.
pub const KL_SMOOTHING: f64 = 1e-9;

/// `KL(p ‖ q)` in nats. Zero categories are floored at [`KL_SMOOTHING`] and
/// both distributions renormalized, which keeps the divergence nonnegative
/// and zero exactly on identical inputs.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions must have equal arity");
    let floor = |dist: &[f64]| -> Vec<f64> {
        let floored: Vec<f64> = dist.iter().map(|&x| x.max(KL_SMOOTHING)).collect();
        let total: f64 = floored.iter().sum();
        floored.into_iter().map(|x| x / total).collect()
    };
    let (p, q) = (floor(p), floor(q));
    p.iter().zip(&q).map(|(&pi, &qi)| pi * (pi / qi).ln()).sum()
}

/// Motif count summary of one graph.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MotifCounts {
    #[serde(rename = "V")]
    pub v: u64,
    #[serde(rename = "T")]
    pub t: u64,
}

/// Count/concentration comparison of a generated graph against the input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MotifReport {
    pub input_counts: MotifCounts,
    pub generated_counts: MotifCounts,
    /// Generated count divided by input count; absent when the input has no
    /// motif of that type.
    pub normalized_v: Option<f64>,
    pub normalized_t: Option<f64>,
    pub input_concentration: (f64, f64),
    pub generated_concentration: (f64, f64),
    /// `KL(input ‖ generated)` over the (C_V, C_T) pair, in nats.
    pub kl: f64,
}

/// Compares motif statistics of `generated` against `input`.
pub fn motif_report(input: &Graph, generated: &Graph) -> MotifReport {
    let a = census3(input);
    let b = census3(generated);
    let normalize = |inp: u64, gen: u64| (inp > 0).then(|| gen as f64 / inp as f64);
    MotifReport {
        input_counts: MotifCounts {
            v: a.count_v,
            t: a.count_t,
        },
        generated_counts: MotifCounts {
            v: b.count_v,
            t: b.count_t,
        },
        normalized_v: normalize(a.count_v, b.count_v),
        normalized_t: normalize(a.count_t, b.count_t),
        input_concentration: (a.conc_v(), a.conc_t()),
        generated_concentration: (b.conc_v(), b.conc_t()),
        kl: kl_divergence(&[a.conc_v(), a.conc_t()], &[b.conc_v(), b.conc_t()]),
    }
}

/// Train/test split for link and motif prediction.
#[derive(Debug, Clone)]
pub struct HoldoutSplit {
    /// Input graph minus the removed test edges; always connected.
    pub train_graph: Graph,
    /// Sampled motifs that lost at least one edge to the split.
    pub test_motifs: Vec<MotifInstance>,
    /// Equally many non-motifs: open wedges posing as triangles, and
    /// single-edge triples posing as wedges (center first).
    pub test_non_motifs: Vec<(MotifType, [NodeId; 3])>,
    pub test_edges: Vec<(NodeId, NodeId)>,
    pub test_non_edges: Vec<(NodeId, NodeId)>,
}

/// Bookkeeping from the split: how many candidate removals connectivity
/// allowed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitStats {
    pub requested_removals: usize,
    pub achieved_removals: usize,
}

impl SplitStats {
    /// True when connectivity blocked more than half the requested removals.
    pub fn degraded(&self) -> bool {
        self.achieved_removals * 2 < self.requested_removals
    }
}

fn still_connected_without(adjacency: &[HashSet<NodeId>], from: NodeId, to: NodeId) -> bool {
    // BFS with early exit; the removed edge is already absent from adjacency
    let mut seen: HashSet<NodeId> = HashSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v as usize] {
            if w == to {
                return true;
            }
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    false
}

/// Samples `test_fraction` of all 3-node motifs, removes as many of their
/// edges as connectivity allows, and builds the matched negative sets:
/// uniformly sampled non-edges for link prediction, and structurally close
/// non-motifs for motif prediction.
pub fn split_holdout(
    graph: &Graph,
    test_fraction: f64,
    seed: u64,
) -> Result<(HoldoutSplit, SplitStats), EvalError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(EvalError::InvalidFraction(test_fraction));
    }
    if !graph.is_connected() || graph.node_count() == 0 {
        return Err(EvalError::NotConnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut instances = enumerate_instances(graph, MotifType::V);
    instances.extend(enumerate_instances(graph, MotifType::T));
    let sample_size = (test_fraction * instances.len() as f64).round() as usize;
    let picked = rand::seq::index::sample(
        &mut rng,
        instances.len().max(1),
        sample_size.min(instances.len()),
    );
    let sampled: Vec<MotifInstance> = picked.iter().map(|i| instances[i]).collect();

    let mut candidates: Vec<(NodeId, NodeId)> = sampled
        .iter()
        .flat_map(|inst| inst.edges())
        .map(|(u, v)| (u.min(v), u.max(v)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    candidates.shuffle(&mut rng);

    let mut adjacency: Vec<HashSet<NodeId>> = (0..graph.node_count() as NodeId)
        .map(|v| graph.neighbors(v).iter().copied().collect())
        .collect();
    let mut removed: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for &(u, v) in &candidates {
        adjacency[u as usize].remove(&v);
        adjacency[v as usize].remove(&u);
        if still_connected_without(&adjacency, u, v) {
            removed.insert((u, v));
        } else {
            adjacency[u as usize].insert(v);
            adjacency[v as usize].insert(u);
        }
    }

    let stats = SplitStats {
        requested_removals: candidates.len(),
        achieved_removals: removed.len(),
    };

    let train_edges: Vec<(NodeId, NodeId)> =
        graph.edges().filter(|e| !removed.contains(e)).collect();
    let train_graph = Graph::from_edges(graph.node_count(), train_edges)
        .expect("subset of a simple graph is simple");
    debug_assert!(train_graph.is_connected());

    let test_motifs: Vec<MotifInstance> = sampled
        .iter()
        .filter(|inst| {
            inst.edges()
                .iter()
                .any(|&(u, v)| removed.contains(&(u.min(v), u.max(v))))
        })
        .copied()
        .collect();
    let test_edges: Vec<(NodeId, NodeId)> = removed.into_iter().collect();

    let test_non_edges = sample_non_edges(graph, test_edges.len(), &mut rng)?;
    let test_non_motifs = sample_non_motifs(graph, &test_motifs, &mut rng)?;

    Ok((
        HoldoutSplit {
            train_graph,
            test_motifs,
            test_non_motifs,
            test_edges,
            test_non_edges,
        },
        stats,
    ))
}

fn sample_non_edges(
    graph: &Graph,
    needed: usize,
    rng: &mut impl Rng,
) -> Result<Vec<(NodeId, NodeId)>, EvalError> {
    let n = graph.node_count();
    let possible = n * (n - 1) / 2 - graph.edge_count();
    if possible < needed {
        return Err(EvalError::NegativesExhausted {
            kind: "non-edges",
            needed,
            found: possible,
        });
    }
    let mut out: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    while out.len() < needed {
        let u = rng.random_range(0..n) as NodeId;
        let v = rng.random_range(0..n) as NodeId;
        if u == v || graph.has_edge(u, v) {
            continue;
        }
        out.insert((u.min(v), u.max(v)));
    }
    Ok(out.into_iter().collect())
}

/// Hard negatives per motif type: for T, open wedges of the full graph
/// (claimed triangles missing one edge); for V, triples with exactly one
/// edge present, centered on one of its endpoints.
fn sample_non_motifs(
    graph: &Graph,
    positives: &[MotifInstance],
    rng: &mut impl Rng,
) -> Result<Vec<(MotifType, [NodeId; 3])>, EvalError> {
    let needed_t = positives.iter().filter(|i| i.motif == MotifType::T).count();
    let needed_v = positives.len() - needed_t;
    let n = graph.node_count();
    let edges: Vec<(NodeId, NodeId)> = graph.edges().collect();
    let mut out = Vec::with_capacity(positives.len());
    let mut used: HashSet<(MotifType, [NodeId; 3])> = HashSet::new();

    // wedge centers for the T negatives
    let centers: Vec<NodeId> = (0..n as NodeId).filter(|&v| graph.degree(v) >= 2).collect();
    let mut found_t = 0usize;
    let mut attempts = 0usize;
    let cap_t = 1000 * needed_t.max(1);
    while found_t < needed_t {
        attempts += 1;
        if attempts > cap_t {
            return Err(EvalError::NegativesExhausted {
                kind: "open-wedge non-motifs",
                needed: needed_t,
                found: found_t,
            });
        }
        if centers.is_empty() {
            return Err(EvalError::NegativesExhausted {
                kind: "open-wedge non-motifs",
                needed: needed_t,
                found: 0,
            });
        }
        let c = centers[rng.random_range(0..centers.len())];
        let nbrs = graph.neighbors(c);
        let a = nbrs[rng.random_range(0..nbrs.len())];
        let b = nbrs[rng.random_range(0..nbrs.len())];
        if a == b || graph.has_edge(a, b) {
            continue;
        }
        // triangle scoring is symmetric in the triple, store it sorted
        let mut sorted = [c, a, b];
        sorted.sort_unstable();
        if used.insert((MotifType::T, sorted)) {
            out.push((MotifType::T, sorted));
            found_t += 1;
        }
    }

    let mut found_v = 0usize;
    attempts = 0;
    let cap_v = 1000 * needed_v.max(1);
    while found_v < needed_v {
        attempts += 1;
        if attempts > cap_v {
            return Err(EvalError::NegativesExhausted {
                kind: "single-edge non-motifs",
                needed: needed_v,
                found: found_v,
            });
        }
        let (a, b) = edges[rng.random_range(0..edges.len())];
        let c = rng.random_range(0..n) as NodeId;
        if c == a || c == b || graph.has_edge(a, c) || graph.has_edge(b, c) {
            continue;
        }
        let center = if rng.random::<bool>() { a } else { b };
        let other = if center == a { b } else { a };
        let triple = [center, other.min(c), other.max(c)];
        if used.insert((MotifType::V, triple)) {
            out.push((MotifType::V, triple));
            found_v += 1;
        }
    }

    Ok(out)
}

/// Scores edges and motif-shaped triples against a score matrix: an edge
/// scores its entry, a triple the arithmetic mean of its constituent edges
/// (2 for a wedge with the given center, 3 for a triangle).
pub fn score_items(
    scores: &ScoreMatrix,
    edges: &[(NodeId, NodeId)],
    triples: &[(MotifType, [NodeId; 3])],
) -> (Vec<f64>, Vec<f64>) {
    let edge_scores = edges.iter().map(|&(u, v)| scores.get(u, v)).collect();
    let triple_scores = triples
        .iter()
        .map(|&(motif, [a, b, c])| match motif {
            MotifType::V => (scores.get(a, b) + scores.get(a, c)) / 2.0,
            MotifType::T => (scores.get(a, b) + scores.get(a, c) + scores.get(b, c)) / 3.0,
        })
        .collect();
    (edge_scores, triple_scores)
}

/// Ranking quality of positive vs negative scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankMetrics {
    pub auc: f64,
    pub ap: f64,
}

/// AUC in the Mann–Whitney form (ties count 1/2) and average precision with
/// pessimistic tie-breaking (negatives ranked above equal-scoring
/// positives).
pub fn rank_metrics(pos_scores: &[f64], neg_scores: &[f64]) -> Result<RankMetrics, EvalError> {
    if pos_scores.is_empty() || neg_scores.is_empty() {
        return Err(EvalError::EmptyScores);
    }

    // AUC via rank sums with midranks for ties
    let mut all: Vec<(f64, bool)> = pos_scores
        .iter()
        .map(|&s| (s, true))
        .chain(neg_scores.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum_pos = 0.0;
    let mut i = 0usize;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // ranks are 1-based; tied block [i, j) shares the average rank
        let midrank = (i + 1 + j) as f64 / 2.0;
        for item in &all[i..j] {
            if item.1 {
                rank_sum_pos += midrank;
            }
        }
        i = j;
    }
    let np = pos_scores.len() as f64;
    let nn = neg_scores.len() as f64;
    let auc = (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);

    // AP: descending scores, negatives first within a tie
    let mut ranked = all;
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    let mut true_positives = 0usize;
    let mut precision_sum = 0.0;
    for (rank0, &(_, is_pos)) in ranked.iter().enumerate() {
        if is_pos {
            true_positives += 1;
            precision_sum += true_positives as f64 / (rank0 + 1) as f64;
        }
    }
    let ap = precision_sum / np;

    Ok(RankMetrics { auc, ap })
}
