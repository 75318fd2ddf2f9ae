//! Pluggable walk-distribution model: a smoothed second-order Markov chain
//! fitted on sampled walks. Stands in for an externally trained neural walk
//! generator; the interface boundary is the walk file, so imported walks
//! flow through the same downstream stages.

use crate::census::{census3, edge_participation};
use crate::graph::{Graph, NodeId};
use crate::score::{ScoreError, ScoreMatrix};
use crate::seeds;
use crate::walk::{motif_biased_weights, sample_walks, BiasKind, WalkConfig, WalkError, WalkSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot fit a model on an empty walk set")]
    EmptyWalkSet,
    #[error("walk node {id} out of range for {n} nodes")]
    NodeOutOfRange { id: NodeId, n: usize },
    #[error("walk transition {0} → {1} is not an edge of the training graph")]
    NonEdgeTransition(NodeId, NodeId),
    #[error("smoothing must be nonnegative and finite, got {0}")]
    InvalidSmoothing(f64),
    #[error("generation config: {0}")]
    InvalidConfig(String),
    #[error("node {0} has no neighbors in the training graph")]
    IsolatedNode(NodeId),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Score(#[from] ScoreError),
}

/// Sparse count row: observed successors with their counts, sorted by node.
#[derive(Debug, Clone, Default)]
struct CountRow {
    items: Vec<(NodeId, u64)>,
    total: u64,
}

impl CountRow {
    fn count(&self, node: NodeId) -> u64 {
        self.items
            .binary_search_by_key(&node, |&(v, _)| v)
            .map(|i| self.items[i].1)
            .unwrap_or(0)
    }
}

fn freeze(map: HashMap<NodeId, u64>) -> CountRow {
    let mut items: Vec<(NodeId, u64)> = map.into_iter().collect();
    items.sort_unstable_by_key(|&(v, _)| v);
    let total = items.iter().map(|&(_, c)| c).sum();
    CountRow { items, total }
}

/// Second-order Markov walk model with additive smoothing δ over the
/// training graph's adjacency. Unseen `(prev, cur)` states fall back to the
/// first-order table, then to uniform over `adj(cur)`.
#[derive(Debug, Clone)]
pub struct WalkModel {
    graph: Graph,
    order2: HashMap<(NodeId, NodeId), CountRow>,
    order1: HashMap<NodeId, CountRow>,
    starts: CountRow,
    delta: f64,
}

impl WalkModel {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Transition probabilities from `(prev, cur)` over `adj(cur)`:
    /// `(count + δ) / (total + δ·deg(cur))` using the deepest fitted table
    /// that has observations for the state.
    pub fn transition(
        &self,
        prev: Option<NodeId>,
        cur: NodeId,
    ) -> Result<Vec<(NodeId, f64)>, ModelError> {
        let nbrs = self.graph.neighbors(cur);
        if nbrs.is_empty() {
            return Err(ModelError::IsolatedNode(cur));
        }
        let row = self.active_row(prev, cur);
        let deg = nbrs.len() as f64;
        Ok(match row {
            Some(row) => {
                let denom = row.total as f64 + self.delta * deg;
                nbrs.iter()
                    .map(|&x| (x, (row.count(x) as f64 + self.delta) / denom))
                    .collect()
            }
            None => nbrs.iter().map(|&x| (x, 1.0 / deg)).collect(),
        })
    }

    fn active_row(&self, prev: Option<NodeId>, cur: NodeId) -> Option<&CountRow> {
        if let Some(t) = prev {
            if let Some(row) = self.order2.get(&(t, cur)) {
                if row.total > 0 {
                    return Some(row);
                }
            }
        }
        self.order1.get(&cur).filter(|row| row.total > 0)
    }

    fn sample_next(
        &self,
        prev: Option<NodeId>,
        cur: NodeId,
        rng: &mut impl Rng,
    ) -> Result<NodeId, ModelError> {
        let nbrs = self.graph.neighbors(cur);
        if nbrs.is_empty() {
            return Err(ModelError::IsolatedNode(cur));
        }
        match self.active_row(prev, cur) {
            Some(row) => {
                let total = row.total as f64 + self.delta * nbrs.len() as f64;
                let mut r = rng.random::<f64>() * total;
                for &x in nbrs {
                    r -= row.count(x) as f64 + self.delta;
                    if r <= 0.0 {
                        return Ok(x);
                    }
                }
                Ok(*nbrs.last().expect("non-empty"))
            }
            None => {
                let i = rng.random_range(0..nbrs.len());
                Ok(nbrs[i])
            }
        }
    }

    fn sample_start(&self, rng: &mut impl Rng) -> NodeId {
        let mut r = rng.random::<f64>() * self.starts.total as f64;
        for &(node, count) in &self.starts.items {
            r -= count as f64;
            if r <= 0.0 {
                return node;
            }
        }
        self.starts.items.last().expect("fitted on walks").0
    }
}

/// Fits the Markov model on walks sampled from `graph`. Every transition in
/// the walks must be a graph edge.
pub fn fit_markov(walks: &WalkSet, graph: &Graph, delta: f64) -> Result<WalkModel, ModelError> {
    if walks.is_empty() {
        return Err(ModelError::EmptyWalkSet);
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(ModelError::InvalidSmoothing(delta));
    }
    let n = graph.node_count();
    let mut order2: HashMap<(NodeId, NodeId), HashMap<NodeId, u64>> = HashMap::new();
    let mut order1: HashMap<NodeId, HashMap<NodeId, u64>> = HashMap::new();
    let mut starts: HashMap<NodeId, u64> = HashMap::new();

    for walk in walks.iter() {
        let Some(&first) = walk.first() else {
            continue;
        };
        for &v in walk {
            if v as usize >= n {
                return Err(ModelError::NodeOutOfRange { id: v, n });
            }
        }
        *starts.entry(first).or_insert(0) += 1;
        for pair in walk.windows(2) {
            if !graph.has_edge(pair[0], pair[1]) {
                return Err(ModelError::NonEdgeTransition(pair[0], pair[1]));
            }
            *order1
                .entry(pair[0])
                .or_default()
                .entry(pair[1])
                .or_insert(0) += 1;
        }
        for window in walk.windows(3) {
            *order2
                .entry((window[0], window[1]))
                .or_default()
                .entry(window[2])
                .or_insert(0) += 1;
        }
    }
    if starts.is_empty() {
        return Err(ModelError::EmptyWalkSet);
    }

    Ok(WalkModel {
        graph: graph.clone(),
        order2: order2.into_iter().map(|(k, m)| (k, freeze(m))).collect(),
        order1: order1.into_iter().map(|(k, m)| (k, freeze(m))).collect(),
        starts: freeze(starts),
        delta,
    })
}

/// Generates `count` walks of `length` nodes from the model. Start nodes
/// follow the empirical start distribution; each walk has its own RNG stream
/// keyed by `(seed, walk index)`.
pub fn generate_walks(
    model: &WalkModel,
    count: usize,
    length: usize,
    seed: u64,
) -> Result<WalkSet, ModelError> {
    if count == 0 {
        return Err(ModelError::InvalidConfig("walk count must be ≥ 1".into()));
    }
    if length < 2 {
        return Err(ModelError::InvalidConfig(format!(
            "walk length must be at least 2, got {length}"
        )));
    }
    let walks: Result<Vec<Vec<NodeId>>, ModelError> = (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let mut walk = Vec::with_capacity(length);
            let start = model.sample_start(&mut rng);
            walk.push(start);
            let mut prev = None;
            let mut cur = start;
            for _ in 1..length {
                let next = model.sample_next(prev, cur, &mut rng)?;
                walk.push(next);
                prev = Some(cur);
                cur = next;
            }
            Ok(walk)
        })
        .collect();
    Ok(WalkSet::new(walks?))
}

/// Builds one view's score matrix end to end: motif-biased weights →
/// training walks → Markov fit → generated walks → score matrix.
/// Deterministic in `(graph, kind, cfg, budgets, delta, seed)`.
pub fn build_view(
    graph: &Graph,
    kind: BiasKind,
    cfg: &WalkConfig,
    train_walks: usize,
    gen_walks: usize,
    delta: f64,
    seed: u64,
) -> Result<ScoreMatrix, ModelError> {
    let counts = edge_participation(graph);
    let census = census3(graph);
    let weights = motif_biased_weights(&counts, &census, kind)?;
    let train = sample_walks(
        graph,
        &weights,
        cfg,
        train_walks,
        seeds::derive(seed, "view-train", 0),
    )?;
    let model = fit_markov(&train, graph, delta)?;
    let generated = generate_walks(
        &model,
        gen_walks,
        cfg.walk_length(),
        seeds::derive(seed, "view-generate", 0),
    )?;
    Ok(ScoreMatrix::from_walks(&generated, graph.node_count())?)
}
