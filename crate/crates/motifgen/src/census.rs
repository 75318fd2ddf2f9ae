//! Exact 3-node motif census: open wedges (V) and triangles (T), per-edge
//! participation counts, concentrations, a degree-preserving random
//! baseline, and 4-cycle counting.
//!
//! Counting is induced: a closed triple is a triangle, never a wedge.

use crate::graph::{degree_preserving_rewire, Graph, NodeId};
use crate::seeds;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("baseline needs at least one sample")]
    NoSamples,
}

/// The two connected 3-node motif shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MotifType {
    /// Open wedge: two edges sharing a vertex, leaves non-adjacent.
    V,
    /// Triangle.
    T,
}

/// Global motif counts and concentrations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MotifCensus {
    pub count_v: u64,
    pub count_t: u64,
}

impl MotifCensus {
    pub fn total(&self) -> u64 {
        self.count_v + self.count_t
    }

    /// Fraction of all 3-node motifs that are wedges; 0 when there are none.
    pub fn conc_v(&self) -> f64 {
        let m = self.total();
        if m == 0 {
            0.0
        } else {
            self.count_v as f64 / m as f64
        }
    }

    pub fn conc_t(&self) -> f64 {
        let m = self.total();
        if m == 0 {
            0.0
        } else {
            self.count_t as f64 / m as f64
        }
    }
}

/// Per-edge motif participation: for edge {i,j}, how many wedges and
/// triangles contain that edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMotifCounts {
    counts: BTreeMap<(NodeId, NodeId), (u64, u64)>,
}

impl EdgeMotifCounts {
    /// `(wedges, triangles)` for the edge {u,v}; `None` for non-edges.
    pub fn get(&self, u: NodeId, v: NodeId) -> Option<(u64, u64)> {
        self.counts.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(NodeId, NodeId), &(u64, u64))> {
        self.counts.iter()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// One concrete motif occurrence. Wedges are stored center-first with
/// ascending leaves; triangles as an ascending triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MotifInstance {
    pub motif: MotifType,
    pub nodes: [NodeId; 3],
}

impl MotifInstance {
    /// The edges making up this instance (2 for a wedge, 3 for a triangle).
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let [a, b, c] = self.nodes;
        match self.motif {
            MotifType::V => vec![(a, b), (a, c)],
            MotifType::T => vec![(a, b), (a, c), (b, c)],
        }
    }
}

fn common_neighbor_count(graph: &Graph, u: NodeId, v: NodeId) -> u64 {
    let (mut a, mut b) = (graph.neighbors(u), graph.neighbors(v));
    if a.len() > b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let mut count = 0u64;
    let mut lo = 0usize;
    for &x in a {
        match b[lo..].binary_search(&x) {
            Ok(pos) => {
                count += 1;
                lo += pos + 1;
            }
            Err(pos) => lo += pos,
        }
    }
    count
}

/// Exact global 3-node motif census. Triangles by sorted-adjacency
/// intersection over edges; induced wedges as `Σ_v C(deg(v), 2) − 3·M_T`.
pub fn census3(graph: &Graph) -> MotifCensus {
    let triangle_sides: u64 = graph
        .edges()
        .map(|(u, v)| common_neighbor_count(graph, u, v))
        .sum();
    debug_assert_eq!(triangle_sides % 3, 0);
    let count_t = triangle_sides / 3;
    let pairs_at_center: u64 = (0..graph.node_count() as NodeId)
        .map(|v| {
            let d = graph.degree(v) as u64;
            d * (d.saturating_sub(1)) / 2
        })
        .sum();
    let count_v = pairs_at_center - 3 * count_t;
    MotifCensus { count_v, count_t }
}

/// Per-edge participation counts: `n_T = |adj(i) ∩ adj(j)|` and
/// `n_V = deg(i) + deg(j) − 2 − 2·n_T`.
pub fn edge_participation(graph: &Graph) -> EdgeMotifCounts {
    let counts = graph
        .edges()
        .map(|(u, v)| {
            let n_t = common_neighbor_count(graph, u, v);
            let n_v = (graph.degree(u) + graph.degree(v)) as u64 - 2 - 2 * n_t;
            ((u, v), (n_v, n_t))
        })
        .collect();
    EdgeMotifCounts { counts }
}

/// All induced instances of one motif type, in lexicographic order of the
/// stored node triple.
pub fn enumerate_instances(graph: &Graph, motif: MotifType) -> Vec<MotifInstance> {
    let mut out = Vec::new();
    match motif {
        MotifType::T => {
            for (u, v) in graph.edges() {
                for &w in graph.neighbors(u) {
                    if w > v && graph.has_edge(v, w) {
                        out.push(MotifInstance {
                            motif,
                            nodes: [u, v, w],
                        });
                    }
                }
            }
        }
        MotifType::V => {
            for c in 0..graph.node_count() as NodeId {
                let nbrs = graph.neighbors(c);
                for (i, &a) in nbrs.iter().enumerate() {
                    for &b in &nbrs[i + 1..] {
                        if !graph.has_edge(a, b) {
                            out.push(MotifInstance {
                                motif,
                                nodes: [c, a, b],
                            });
                        }
                    }
                }
            }
        }
    }
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
    out
}

/// Mean motif concentrations `(R_V, R_T)` over degree-preserving rewirings.
pub fn random_baseline(
    graph: &Graph,
    samples: usize,
    swap_attempts: usize,
    seed: u64,
) -> Result<(f64, f64), CensusError> {
    if samples == 0 {
        return Err(CensusError::NoSamples);
    }
    let mut sum_v = 0.0;
    let mut sum_t = 0.0;
    for sample in 0..samples {
        let rewired = degree_preserving_rewire(
            graph,
            swap_attempts,
            seeds::derive(seed, "baseline", sample as u64),
        );
        let census = census3(&rewired);
        sum_v += census.conc_v();
        sum_t += census.conc_t();
    }
    Ok((sum_v / samples as f64, sum_t / samples as f64))
}

/// Number of 4-cycles (not necessarily induced), counted as cyclic node
/// quadruples up to rotation and reflection. Each cycle has two diagonal
/// pairs, so `Σ_{u<w} C(codeg(u,w), 2)` counts every cycle exactly twice.
pub fn count_four_cycles(graph: &Graph) -> u64 {
    let mut codegree: HashMap<(NodeId, NodeId), u64> = HashMap::new();
    for c in 0..graph.node_count() as NodeId {
        let nbrs = graph.neighbors(c);
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                *codegree.entry((a, b)).or_insert(0) += 1;
            }
        }
    }
    let doubled: u64 = codegree.values().map(|&c| c * (c - 1) / 2).sum();
    debug_assert_eq!(doubled % 2, 0);
    doubled / 2
}

/// Census report as emitted by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusReport {
    #[serde(rename = "count_V")]
    pub count_v: u64,
    #[serde(rename = "count_T")]
    pub count_t: u64,
    #[serde(rename = "conc_V")]
    pub conc_v: f64,
    #[serde(rename = "conc_T")]
    pub conc_t: f64,
    #[serde(rename = "R_V")]
    pub r_v: f64,
    #[serde(rename = "R_T")]
    pub r_t: f64,
    pub four_cycles: u64,
}
