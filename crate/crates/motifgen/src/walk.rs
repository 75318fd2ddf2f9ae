//! Motif-biased edge weights and second-order biased random walks. The
//! three graph views share this machinery and differ only in their
//! [`BiasKind`].

use crate::census::{EdgeMotifCounts, MotifCensus};
use crate::graph::{Graph, NodeId, NodeIdMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use thiserror::Error;

/// Weight assigned to edges that participate in no 3-node motif, where the
/// participation-weighted average is undefined. Keeps every edge reachable.
pub const MOTIF_FREE_WEIGHT: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("graph has no 3-node motifs; biased weights are undefined")]
    NoMotifs,
    #[error("node {0} has no neighbors")]
    IsolatedNode(NodeId),
    #[error("invalid walk config: {0}")]
    InvalidConfig(String),
    #[error("weights were not built for this graph (missing edge {{{0}, {1}}})")]
    WeightMismatch(NodeId, NodeId),
    #[error("walk references node {id} outside the graph ({n} nodes)")]
    NodeOutOfRange { id: NodeId, n: usize },
    #[error("unknown external node id {0} in walk file")]
    UnknownExternalId(u64),
    #[error("walk file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which motif type the walk weights push towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BiasKind {
    /// Unit weights: the plain second-order walk (view S₁).
    None,
    /// Weights favoring wedge-heavy edges (view S₂).
    TowardV,
    /// Weights favoring triangle-heavy edges (view S₃).
    TowardT,
}

/// Per-edge walk weights for one view.
#[derive(Debug, Clone)]
pub struct BiasedWeights {
    kind: BiasKind,
    beta: Option<f64>,
    weights: BTreeMap<(NodeId, NodeId), f64>,
}

impl BiasedWeights {
    pub fn kind(&self) -> BiasKind {
        self.kind
    }

    /// Mixing parameter β; `None` for the unbiased view.
    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// Weight of edge {u,v}. Unit for the unbiased view; `None` if the
    /// weights were built for a graph that lacks this edge.
    pub fn get(&self, u: NodeId, v: NodeId) -> Option<f64> {
        match self.kind {
            BiasKind::None => Some(1.0),
            _ => self.weights.get(&(u.min(v), u.max(v))).copied(),
        }
    }

    /// Wraps explicit per-edge weights, e.g. supplied by an external
    /// process instead of the motif-participation formula. Weights must be
    /// positive and the kind must not be `None` (whose weights are
    /// implicitly 1).
    pub fn from_edge_weights(
        kind: BiasKind,
        weights: impl IntoIterator<Item = ((NodeId, NodeId), f64)>,
    ) -> Result<Self, WalkError> {
        if kind == BiasKind::None {
            return Err(WalkError::InvalidConfig(
                "explicit weights require a biased kind".into(),
            ));
        }
        let mut map = BTreeMap::new();
        for ((u, v), w) in weights {
            if !(w.is_finite() && w > 0.0) {
                return Err(WalkError::InvalidConfig(format!(
                    "edge weight must be positive, got {w} for {{{u}, {v}}}"
                )));
            }
            map.insert((u.min(v), u.max(v)), w);
        }
        Ok(Self {
            kind,
            beta: None,
            weights: map,
        })
    }
}

/// Computes the per-edge weights for a view:
/// `w = (β·n_V + (1−β)·n_T) / (n_V + n_T)` with
/// `β = max{C_V, C_T}` toward V and `β = 1 − max{C_V, C_T}` toward T.
/// Motif-free edges get [`MOTIF_FREE_WEIGHT`].
pub fn motif_biased_weights(
    counts: &EdgeMotifCounts,
    census: &MotifCensus,
    kind: BiasKind,
) -> Result<BiasedWeights, WalkError> {
    if kind == BiasKind::None {
        return Ok(BiasedWeights {
            kind,
            beta: None,
            weights: BTreeMap::new(),
        });
    }
    if census.total() == 0 {
        return Err(WalkError::NoMotifs);
    }
    let c_max = census.conc_v().max(census.conc_t());
    let beta = match kind {
        BiasKind::TowardV => c_max,
        BiasKind::TowardT => 1.0 - c_max,
        BiasKind::None => unreachable!(),
    };
    let weights = counts
        .iter()
        .map(|(&edge, &(n_v, n_t))| {
            let denom = n_v + n_t;
            let w = if denom == 0 {
                MOTIF_FREE_WEIGHT
            } else {
                (beta * n_v as f64 + (1.0 - beta) * n_t as f64) / denom as f64
            };
            (edge, w)
        })
        .collect();
    Ok(BiasedWeights {
        kind,
        beta: Some(beta),
        weights,
    })
}

/// Second-order walk parameters: return bias `p`, in-out bias `q`, and the
/// number of nodes per walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    p: f64,
    q: f64,
    walk_length: usize,
}

impl WalkConfig {
    pub fn new(p: f64, q: f64, walk_length: usize) -> Result<Self, WalkError> {
        if !(p.is_finite() && p > 0.0) || !(q.is_finite() && q > 0.0) {
            return Err(WalkError::InvalidConfig(format!(
                "p and q must be positive, got p={p}, q={q}"
            )));
        }
        if walk_length < 2 {
            return Err(WalkError::InvalidConfig(format!(
                "walk_length must be at least 2, got {walk_length}"
            )));
        }
        Ok(Self { p, q, walk_length })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn walk_length(&self) -> usize {
        self.walk_length
    }
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            p: 1.0,
            q: 1.0,
            walk_length: 16,
        }
    }
}

/// A batch of walks; node sequences whose consecutive pairs are graph edges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WalkSet {
    walks: Vec<Vec<NodeId>>,
}

impl WalkSet {
    pub fn new(walks: Vec<Vec<NodeId>>) -> Self {
        Self { walks }
    }

    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[NodeId]> {
        self.walks.iter().map(Vec::as_slice)
    }

    /// Total number of steps, i.e. Σ (len − 1).
    pub fn total_steps(&self) -> usize {
        self.walks.iter().map(|w| w.len().saturating_sub(1)).sum()
    }
}

/// Writes one walk per line, space-separated external node ids.
pub fn write_walks<W: Write>(
    walks: &WalkSet,
    ids: &NodeIdMap,
    mut writer: W,
) -> Result<(), WalkError> {
    for walk in walks.iter() {
        let mut first = true;
        for &v in walk {
            if first {
                first = false;
            } else {
                write!(writer, " ")?;
            }
            write!(writer, "{}", ids.external(v))?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

/// Reads a walk file written by [`write_walks`], mapping external ids back
/// to internal ones.
pub fn read_walks<R: BufRead>(reader: R, ids: &NodeIdMap) -> Result<WalkSet, WalkError> {
    let mut walks = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut walk = Vec::new();
        for tok in trimmed.split_whitespace() {
            let ext = tok.parse::<u64>().map_err(|_| WalkError::Parse {
                line: idx + 1,
                msg: format!("malformed node id {tok:?}"),
            })?;
            let v = ids.internal(ext).ok_or(WalkError::UnknownExternalId(ext))?;
            walk.push(v);
        }
        if walk.len() < 2 {
            return Err(WalkError::Parse {
                line: idx + 1,
                msg: "walk shorter than two nodes".into(),
            });
        }
        walks.push(walk);
    }
    Ok(WalkSet { walks })
}

/// Reusable second-order walk sampler for one `(graph, weights, config)`
/// triple. Weight lookups are pre-aligned with the adjacency lists.
pub struct WalkSampler<'a> {
    graph: &'a Graph,
    aligned: Vec<Vec<f64>>,
    p_inv: f64,
    q_inv: f64,
}

impl<'a> WalkSampler<'a> {
    pub fn new(
        graph: &'a Graph,
        weights: &BiasedWeights,
        cfg: &WalkConfig,
    ) -> Result<Self, WalkError> {
        let mut aligned = Vec::with_capacity(graph.node_count());
        for v in 0..graph.node_count() as NodeId {
            let row: Result<Vec<f64>, WalkError> = graph
                .neighbors(v)
                .iter()
                .map(|&x| weights.get(v, x).ok_or(WalkError::WeightMismatch(v, x)))
                .collect();
            aligned.push(row?);
        }
        Ok(Self {
            graph,
            aligned,
            p_inv: 1.0 / cfg.p(),
            q_inv: 1.0 / cfg.q(),
        })
    }

    /// Unnormalized transition weights from `cur`, aligned with
    /// `graph.neighbors(cur)`. `α = 1/p` toward the previous node, `1` toward
    /// its neighbors, `1/q` otherwise; the first step has `α ≡ 1`.
    fn step_weights(&self, prev: Option<NodeId>, cur: NodeId, buf: &mut Vec<f64>) {
        let nbrs = self.graph.neighbors(cur);
        let base = &self.aligned[cur as usize];
        buf.clear();
        match prev {
            None => buf.extend_from_slice(base),
            Some(t) => {
                let t_adj = self.graph.neighbors(t);
                for (i, &x) in nbrs.iter().enumerate() {
                    let alpha = if x == t {
                        self.p_inv
                    } else if t_adj.binary_search(&x).is_ok() {
                        1.0
                    } else {
                        self.q_inv
                    };
                    buf.push(alpha * base[i]);
                }
            }
        }
    }

    /// Normalized transition distribution over the neighbors of `cur`.
    pub fn transition_distribution(
        &self,
        prev: Option<NodeId>,
        cur: NodeId,
    ) -> Result<Vec<(NodeId, f64)>, WalkError> {
        let nbrs = self.graph.neighbors(cur);
        if nbrs.is_empty() {
            return Err(WalkError::IsolatedNode(cur));
        }
        let mut buf = Vec::with_capacity(nbrs.len());
        self.step_weights(prev, cur, &mut buf);
        let total: f64 = buf.iter().sum();
        Ok(nbrs.iter().zip(buf).map(|(&x, w)| (x, w / total)).collect())
    }

    fn sample_step(
        &self,
        prev: Option<NodeId>,
        cur: NodeId,
        buf: &mut Vec<f64>,
        rng: &mut impl Rng,
    ) -> Result<NodeId, WalkError> {
        let nbrs = self.graph.neighbors(cur);
        if nbrs.is_empty() {
            return Err(WalkError::IsolatedNode(cur));
        }
        self.step_weights(prev, cur, buf);
        let total: f64 = buf.iter().sum();
        let mut r = rng.random::<f64>() * total;
        for (i, &w) in buf.iter().enumerate() {
            r -= w;
            if r <= 0.0 {
                return Ok(nbrs[i]);
            }
        }
        Ok(*nbrs.last().expect("non-empty neighbor list"))
    }

    fn sample_walk(&self, length: usize, rng: &mut impl Rng) -> Result<Vec<NodeId>, WalkError> {
        let n = self.graph.node_count();
        let start = rng.random_range(0..n) as NodeId;
        let mut walk = Vec::with_capacity(length);
        let mut buf = Vec::new();
        walk.push(start);
        let mut prev = None;
        let mut cur = start;
        for _ in 1..length {
            let next = self.sample_step(prev, cur, &mut buf, rng)?;
            walk.push(next);
            prev = Some(cur);
            cur = next;
        }
        Ok(walk)
    }
}

/// One-shot transition distribution from state `(prev, cur)`; see
/// [`WalkSampler::transition_distribution`]. Building a [`WalkSampler`] is
/// cheaper when many states are queried.
pub fn transition_distribution(
    graph: &Graph,
    weights: &BiasedWeights,
    prev: Option<NodeId>,
    cur: NodeId,
    cfg: &WalkConfig,
) -> Result<Vec<(NodeId, f64)>, WalkError> {
    WalkSampler::new(graph, weights, cfg)?.transition_distribution(prev, cur)
}

/// Samples `count` second-order walks. Start nodes are uniform; each walk
/// draws from its own RNG stream keyed by `(seed, walk index)`, so output is
/// identical regardless of thread count.
pub fn sample_walks(
    graph: &Graph,
    weights: &BiasedWeights,
    cfg: &WalkConfig,
    count: usize,
    seed: u64,
) -> Result<WalkSet, WalkError> {
    if count == 0 {
        return Err(WalkError::InvalidConfig("walk count must be ≥ 1".into()));
    }
    if let Some(v) = (0..graph.node_count() as NodeId).find(|&v| graph.degree(v) == 0) {
        return Err(WalkError::IsolatedNode(v));
    }
    let sampler = WalkSampler::new(graph, weights, cfg)?;
    let walks: Result<Vec<Vec<NodeId>>, WalkError> = (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            sampler.sample_walk(cfg.walk_length(), &mut rng)
        })
        .collect();
    Ok(WalkSet { walks: walks? })
}
