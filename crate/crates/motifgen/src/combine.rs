//! Combination of the three view score matrices into an output graph:
//! entry-wise averaging followed by standard edge sampling (scheme I), and
//! stochastic per-step view/motif sampling that adds whole motifs
//! (scheme II).

use crate::graph::{Graph, NodeId};
use crate::score::ScoreMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CombineError {
    #[error("view dimensions differ: {0} vs {1} nodes")]
    DimensionMismatch(usize, usize),
    #[error("score support has {available} positive entries, need {needed}")]
    InsufficientSupport { needed: usize, available: usize },
    #[error(
        "could not reach {target} edges within {iterations} iterations ({reached} placed); \
         score support too thin"
    )]
    AssemblyStalled {
        target: usize,
        reached: usize,
        iterations: usize,
    },
    #[error("invalid combine config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Scheme II parameters: view-selection probabilities, max-score selection
/// probability, and the output edge budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombineConfig {
    p1: f64,
    p2: f64,
    p3: f64,
    p_s: f64,
    target_edges: usize,
}

impl CombineConfig {
    pub fn new(
        p1: f64,
        p2: f64,
        p3: f64,
        p_s: f64,
        target_edges: usize,
    ) -> Result<Self, CombineError> {
        for (name, p) in [("p1", p1), ("p2", p2), ("p3", p3)] {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(CombineError::InvalidConfig(format!(
                    "{name} must be in [0,1], got {p}"
                )));
            }
        }
        if (p1 + p2 + p3 - 1.0).abs() > 1e-9 {
            return Err(CombineError::InvalidConfig(format!(
                "view probabilities must sum to 1, got {}",
                p1 + p2 + p3
            )));
        }
        if !(p_s.is_finite() && (0.0..=1.0).contains(&p_s)) {
            return Err(CombineError::InvalidConfig(format!(
                "p_s must be in [0,1], got {p_s}"
            )));
        }
        if target_edges == 0 {
            return Err(CombineError::InvalidConfig(
                "target_edges must be at least 1".into(),
            ));
        }
        Ok(Self {
            p1,
            p2,
            p3,
            p_s,
            target_edges,
        })
    }

    pub fn view_probabilities(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }

    pub fn p_s(&self) -> f64 {
        self.p_s
    }

    pub fn target_edges(&self) -> usize {
        self.target_edges
    }
}

/// The three views S₁ (unbiased), S₂ (toward V), S₃ (toward T).
#[derive(Debug, Clone)]
pub struct ViewSet {
    pub s1: ScoreMatrix,
    pub s2: ScoreMatrix,
    pub s3: ScoreMatrix,
}

impl ViewSet {
    pub fn new(s1: ScoreMatrix, s2: ScoreMatrix, s3: ScoreMatrix) -> Result<Self, CombineError> {
        for s in [&s2, &s3] {
            if s.n() != s1.n() {
                return Err(CombineError::DimensionMismatch(s1.n(), s.n()));
            }
        }
        Ok(Self { s1, s2, s3 })
    }

    pub fn n(&self) -> usize {
        self.s1.n()
    }
}

/// Scheme I: entry-wise mean of the three views.
pub fn average_scores(views: &ViewSet) -> ScoreMatrix {
    let mut keys: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for s in [&views.s1, &views.s2, &views.s3] {
        keys.extend(s.entries().map(|(&e, _)| e));
    }
    let mut out = ScoreMatrix::zeros(views.n());
    for (u, v) in keys {
        let sum = views.s1.get(u, v) + views.s2.get(u, v) + views.s3.get(u, v);
        out.add(u, v, sum / 3.0)
            .expect("keys come from valid views");
    }
    out
}

/// Edges of one motif paired with their current scores in the active view.
type ScoredMotif = Vec<((NodeId, NodeId), f64)>;

fn canonical(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    (u.min(v), u.max(v))
}

fn sample_from_row(
    row: &BTreeMap<NodeId, f64>,
    exclude: Option<NodeId>,
    rng: &mut impl Rng,
) -> Option<NodeId> {
    let total: f64 = row
        .iter()
        .filter(|&(&k, _)| Some(k) != exclude)
        .map(|(_, &w)| w)
        .sum();
    if total <= 0.0 {
        return None;
    }
    let mut r = rng.random::<f64>() * total;
    let mut last = None;
    for (&k, &w) in row {
        if Some(k) == exclude {
            continue;
        }
        last = Some(k);
        r -= w;
        if r <= 0.0 {
            return Some(k);
        }
    }
    last
}

/// NetGAN-style edge assembly: pick a node uniformly among those with a
/// positive row sum, sample a neighbor from the row-normalized scores, keep
/// the edge if new, until `m` distinct edges are placed.
pub fn sample_edges_by_score(
    scores: &ScoreMatrix,
    m: usize,
    seed: u64,
) -> Result<Graph, CombineError> {
    if scores.support_size() < m {
        return Err(CombineError::InsufficientSupport {
            needed: m,
            available: scores.support_size(),
        });
    }
    let rows: Vec<BTreeMap<NodeId, f64>> = scores
        .rows()
        .into_iter()
        .map(|row| row.into_iter().collect())
        .collect();
    let alive: Vec<NodeId> = rows
        .iter()
        .enumerate()
        .filter(|(_, row)| !row.is_empty())
        .map(|(v, _)| v as NodeId)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    // a.s. termination is guaranteed by the support check; the cap only
    // guards against degenerate float masses
    let cap = 20_000usize.saturating_mul(m).max(100_000);
    let mut iterations = 0usize;
    while edges.len() < m {
        iterations += 1;
        if iterations > cap {
            return Err(CombineError::AssemblyStalled {
                target: m,
                reached: edges.len(),
                iterations,
            });
        }
        let node = alive[rng.random_range(0..alive.len())];
        let Some(neighbor) = sample_from_row(&rows[node as usize], None, &mut rng) else {
            continue;
        };
        edges.insert(canonical(node, neighbor));
    }
    Ok(Graph::from_edges(scores.n(), edges)?)
}

#[derive(Clone, Copy, Debug)]
struct HeapEntry {
    score: f64,
    pair: (NodeId, NodeId),
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max score first; among equal scores the smallest pair wins
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.pair.cmp(&self.pair))
    }
}

/// Working copy of one view during assembly: symmetric rows of the
/// remaining entries, a lazily invalidated max-heap, and the set of nodes
/// whose rows are still non-empty. Entry values never change, they are only
/// removed, so heap entries stay valid exactly while present in `rows`.
struct ViewState {
    rows: Vec<BTreeMap<NodeId, f64>>,
    heap: BinaryHeap<HeapEntry>,
    alive: Vec<NodeId>,
    alive_pos: Vec<usize>,
}

impl ViewState {
    fn new(scores: &ScoreMatrix) -> Self {
        let mut rows: Vec<BTreeMap<NodeId, f64>> = vec![BTreeMap::new(); scores.n()];
        let mut heap = BinaryHeap::with_capacity(scores.support_size());
        for (&(u, v), &s) in scores.entries() {
            rows[u as usize].insert(v, s);
            rows[v as usize].insert(u, s);
            heap.push(HeapEntry {
                score: s,
                pair: (u, v),
            });
        }
        let alive: Vec<NodeId> = rows
            .iter()
            .enumerate()
            .filter(|(_, row)| !row.is_empty())
            .map(|(v, _)| v as NodeId)
            .collect();
        let mut alive_pos = vec![usize::MAX; scores.n()];
        for (pos, &v) in alive.iter().enumerate() {
            alive_pos[v as usize] = pos;
        }
        Self {
            rows,
            heap,
            alive,
            alive_pos,
        }
    }

    fn kill(&mut self, v: NodeId) {
        let pos = self.alive_pos[v as usize];
        if pos == usize::MAX {
            return;
        }
        self.alive.swap_remove(pos);
        self.alive_pos[v as usize] = usize::MAX;
        if pos < self.alive.len() {
            let moved = self.alive[pos];
            self.alive_pos[moved as usize] = pos;
        }
    }

    /// Removes {u,v} from both rows ("sampling without replacement").
    fn consume(&mut self, u: NodeId, v: NodeId) {
        if self.rows[u as usize].remove(&v).is_some() && self.rows[u as usize].is_empty() {
            self.kill(u);
        }
        if self.rows[v as usize].remove(&u).is_some() && self.rows[v as usize].is_empty() {
            self.kill(v);
        }
    }

    fn pop_max(&mut self) -> Option<((NodeId, NodeId), f64)> {
        while let Some(entry) = self.heap.pop() {
            if self.rows[entry.pair.0 as usize].contains_key(&entry.pair.1) {
                return Some((entry.pair, entry.score));
            }
        }
        None
    }

    fn sample_alive(&self, rng: &mut impl Rng) -> Option<NodeId> {
        if self.alive.is_empty() {
            None
        } else {
            Some(self.alive[rng.random_range(0..self.alive.len())])
        }
    }
}

/// The best wedge through edge {u,v}: a third node `k` with a positive
/// remaining score to `u` or `v`, maximizing the mean of the two edge
/// scores. Ties go to the lexicographically smallest `(center, k)`.
fn best_wedge(
    state: &ViewState,
    u: NodeId,
    v: NodeId,
    s_uv: f64,
) -> Option<((NodeId, NodeId), f64)> {
    let mut best: Option<(f64, (NodeId, NodeId), f64)> = None;
    for (center, other) in [(u, v), (v, u)] {
        for (&k, &w) in &state.rows[center as usize] {
            if k == other {
                continue;
            }
            let mean = (s_uv + w) / 2.0;
            if best.is_none_or(|(b, _, _)| mean > b) {
                best = Some((mean, canonical(center, k), w));
            }
        }
    }
    best.map(|(_, edge, w)| (edge, w))
}

/// The best triangle through edge {u,v}: a third node `k` with positive
/// remaining scores to both endpoints, maximizing the mean edge score.
fn best_triangle(
    state: &ViewState,
    u: NodeId,
    v: NodeId,
    s_uv: f64,
) -> Option<[((NodeId, NodeId), f64); 2]> {
    let (row_u, row_v) = (&state.rows[u as usize], &state.rows[v as usize]);
    let (small, large, small_is_u) = if row_u.len() <= row_v.len() {
        (row_u, row_v, true)
    } else {
        (row_v, row_u, false)
    };
    let mut best: Option<(f64, NodeId, f64, f64)> = None;
    for (&k, &w_small) in small {
        if k == u || k == v {
            continue;
        }
        if let Some(&w_large) = large.get(&k) {
            let (s_uk, s_vk) = if small_is_u {
                (w_small, w_large)
            } else {
                (w_large, w_small)
            };
            let mean = (s_uv + s_uk + s_vk) / 3.0;
            if best.is_none_or(|(b, _, _, _)| mean > b) {
                best = Some((mean, k, s_uk, s_vk));
            }
        }
    }
    best.map(|(_, k, s_uk, s_vk)| [(canonical(u, k), s_uk), (canonical(v, k), s_vk)])
}

/// Scheme II assembly ("MMGAN"): per step, choose a view with probabilities
/// `(p1, p2, p3)`, then with probability `p_s` take the highest-scoring
/// remaining entry of that view and add the best whole motif through it
/// (falling back triangle → wedge → edge), consuming the used entries;
/// otherwise sample a node and one or two of its score-weighted neighbors
/// and add the corresponding edge, wedge, or triangle. Duplicate edges are
/// skipped without consuming budget; the loop stops the moment the output
/// reaches `target_edges`, truncating a motif mid-addition if necessary.
///
/// In the random branch a triangle's closing edge {n₂,n₃} is added even
/// when no view scored that pair: closing score wedges is what lets this
/// scheme synthesize triangles the views only hint at, so output edges are
/// contained in the union of view supports plus its wedge closures.
pub fn mmgan_assemble(
    views: &ViewSet,
    cfg: &CombineConfig,
    seed: u64,
) -> Result<Graph, CombineError> {
    let m = cfg.target_edges();
    let mut states = [
        ViewState::new(&views.s1),
        ViewState::new(&views.s2),
        ViewState::new(&views.s3),
    ];
    let probs = cfg.view_probabilities();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut output: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let max_iterations = 10 * m;

    'assembly: for _ in 0..max_iterations {
        if output.len() >= m {
            break;
        }
        let view_idx = {
            let r = rng.random::<f64>();
            if r < probs[0] {
                0
            } else if r < probs[0] + probs[1] {
                1
            } else {
                2
            }
        };
        let max_score = rng.random::<f64>() < cfg.p_s();
        let state = &mut states[view_idx];

        // the motif's edges with their current scores, and whether the
        // entries are consumed from the view afterwards
        let (mut motif, consume): (ScoredMotif, bool) = if max_score {
            let Some((edge, s_uv)) = state.pop_max() else {
                continue; // this view is exhausted; other views may still work
            };
            let (u, v) = edge;
            let mut motif = vec![(edge, s_uv)];
            match view_idx {
                0 => {}
                1 => {
                    if let Some(extra) = best_wedge(state, u, v, s_uv) {
                        motif.push(extra);
                    }
                }
                _ => {
                    if let Some(extra) = best_triangle(state, u, v, s_uv) {
                        motif.extend(extra);
                    } else if let Some(extra) = best_wedge(state, u, v, s_uv) {
                        motif.push(extra);
                    }
                }
            }
            (motif, true)
        } else {
            let Some(n1) = state.sample_alive(&mut rng) else {
                continue;
            };
            let Some(n2) = sample_from_row(&state.rows[n1 as usize], None, &mut rng) else {
                continue;
            };
            let mut motif = vec![(canonical(n1, n2), state.rows[n1 as usize][&n2])];
            if view_idx >= 1 {
                if let Some(n3) = sample_from_row(&state.rows[n1 as usize], Some(n2), &mut rng) {
                    motif.push((canonical(n1, n3), state.rows[n1 as usize][&n3]));
                    if view_idx == 2 {
                        let closing = canonical(n2, n3);
                        let s = state.rows[n2 as usize].get(&n3).copied().unwrap_or(0.0);
                        motif.push((closing, s));
                    }
                }
            }
            (motif, false)
        };

        // place edges in descending score order so budget truncation keeps
        // the strongest part of the motif
        motif.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        for (edge, _) in motif {
            if consume {
                states[view_idx].consume(edge.0, edge.1);
            }
            output.insert(edge);
            if output.len() >= m {
                break 'assembly;
            }
        }
    }

    if output.len() < m {
        return Err(CombineError::AssemblyStalled {
            target: m,
            reached: output.len(),
            iterations: max_iterations,
        });
    }
    Ok(Graph::from_edges(views.n(), output)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::census3;
    use crate::model::build_view;
    use crate::walk::{BiasKind, WalkConfig};
    use std::collections::{HashMap, HashSet};

    fn matrix(n: usize, entries: &[(NodeId, NodeId, f64)]) -> ScoreMatrix {
        let mut s = ScoreMatrix::zeros(n);
        for &(u, v, w) in entries {
            s.add(u, v, w).unwrap();
        }
        s
    }

    #[test]
    fn averaging_is_entrywise_mean() {
        let s1 = matrix(3, &[(1, 2, 3.0)]);
        let s2 = matrix(3, &[(1, 2, 6.0)]);
        let s3 = matrix(3, &[(1, 2, 9.0)]);
        let avg = average_scores(&ViewSet::new(s1, s2, s3).unwrap());
        assert_eq!(avg.get(1, 2), 6.0);
    }

    #[test]
    fn averaging_identical_views_is_identity() {
        let s = matrix(4, &[(0, 1, 2.0), (1, 3, 5.0)]);
        let avg = average_scores(&ViewSet::new(s.clone(), s.clone(), s.clone()).unwrap());
        assert_eq!(avg, s);
    }

    #[test]
    fn averaging_with_empty_views_divides_by_three() {
        let s1 = matrix(3, &[(0, 1, 3.0), (0, 2, 9.0)]);
        let avg = average_scores(
            &ViewSet::new(s1, ScoreMatrix::zeros(3), ScoreMatrix::zeros(3)).unwrap(),
        );
        assert_eq!(avg.get(0, 1), 1.0);
        assert_eq!(avg.get(0, 2), 3.0);
    }

    #[test]
    fn averaging_is_linear_in_scale() {
        let s1 = matrix(3, &[(0, 1, 1.0), (1, 2, 2.0)]);
        let s2 = matrix(3, &[(0, 2, 4.0)]);
        let s3 = matrix(3, &[(0, 1, 5.0)]);
        let base = average_scores(&ViewSet::new(s1.clone(), s2.clone(), s3.clone()).unwrap());
        let scale = |s: &ScoreMatrix, c: f64| {
            let mut out = ScoreMatrix::zeros(s.n());
            for (&(u, v), &w) in s.entries() {
                out.add(u, v, c * w).unwrap();
            }
            out
        };
        let scaled = average_scores(
            &ViewSet::new(scale(&s1, 2.5), scale(&s2, 2.5), scale(&s3, 2.5)).unwrap(),
        );
        for (&(u, v), &w) in base.entries() {
            assert!((scaled.get(u, v) - 2.5 * w).abs() < 1e-12);
        }
    }

    #[test]
    fn view_set_rejects_dimension_mismatch() {
        let err = ViewSet::new(
            ScoreMatrix::zeros(3),
            ScoreMatrix::zeros(4),
            ScoreMatrix::zeros(3),
        )
        .unwrap_err();
        assert!(matches!(err, CombineError::DimensionMismatch(3, 4)));
    }

    #[test]
    fn config_validation() {
        assert!(CombineConfig::new(1.0 / 6.0, 1.0 / 3.0, 0.5, 0.25, 10).is_ok());
        assert!(CombineConfig::new(0.5, 0.5, 0.5, 0.25, 10).is_err());
        assert!(CombineConfig::new(0.5, 0.5, 0.0, 1.5, 10).is_err());
        assert!(CombineConfig::new(0.5, 0.5, 0.0, 0.5, 0).is_err());
    }

    #[test]
    fn single_entry_forces_the_edge() {
        let s = matrix(3, &[(1, 2, 4.0)]);
        let g = sample_edges_by_score(&s, 1, 9).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn sampled_graph_has_m_edges_inside_support() {
        let s = matrix(
            5,
            &[
                (0, 1, 1.0),
                (0, 2, 2.0),
                (1, 2, 3.0),
                (2, 3, 1.0),
                (3, 4, 5.0),
                (0, 4, 2.0),
            ],
        );
        for m in 1..=6 {
            let g = sample_edges_by_score(&s, m, 42 + m as u64).unwrap();
            assert_eq!(g.edge_count(), m);
            for (u, v) in g.edges() {
                assert!(s.get(u, v) > 0.0);
            }
        }
    }

    #[test]
    fn insufficient_support_is_an_error() {
        let s = matrix(3, &[(0, 1, 1.0)]);
        assert!(matches!(
            sample_edges_by_score(&s, 2, 0),
            Err(CombineError::InsufficientSupport {
                needed: 2,
                available: 1
            })
        ));
    }

    #[test]
    fn two_stage_chain_matches_hand_computed_probability() {
        // entries {0,1}: 3, {0,2}: 1; nodes with positive rows: 0, 1, 2.
        // P(edge {0,1}) = 1/3·(3/4) + 1/3·1 + 1/3·0 = 7/12
        let s = matrix(3, &[(0, 1, 3.0), (0, 2, 1.0)]);
        let trials = 10_000;
        let mut hits = 0;
        for seed in 0..trials {
            let g = sample_edges_by_score(&s, 1, seed).unwrap();
            if g.has_edge(0, 1) {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        assert!(
            (freq - 7.0 / 12.0).abs() < 0.02,
            "frequency {freq}, expected {}",
            7.0 / 12.0
        );
    }

    #[test]
    fn max_score_branch_reconstructs_triangle() {
        let s3 = matrix(3, &[(0, 1, 5.0), (0, 2, 4.0), (1, 2, 3.0)]);
        let views = ViewSet::new(ScoreMatrix::zeros(3), ScoreMatrix::zeros(3), s3).unwrap();
        let cfg = CombineConfig::new(0.0, 0.0, 1.0, 1.0, 3).unwrap();
        let g = mmgan_assemble(&views, &cfg, 5).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(0, 1) && g.has_edge(0, 2) && g.has_edge(1, 2));
    }

    #[test]
    fn assembly_is_deterministic() {
        let s = matrix(
            6,
            &[
                (0, 1, 3.0),
                (1, 2, 2.0),
                (2, 0, 1.0),
                (2, 3, 4.0),
                (3, 4, 2.0),
                (4, 5, 1.0),
                (5, 3, 2.0),
            ],
        );
        let views = ViewSet::new(s.clone(), s.clone(), s).unwrap();
        let cfg = CombineConfig::new(1.0 / 6.0, 1.0 / 3.0, 0.5, 0.25, 5).unwrap();
        let a = mmgan_assemble(&views, &cfg, 31).unwrap();
        let b = mmgan_assemble(&views, &cfg, 31).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn assembly_hits_exact_edge_budget_within_closed_support() {
        let s1 = matrix(6, &[(0, 1, 3.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 2.0)]);
        let s2 = matrix(6, &[(0, 2, 1.0), (1, 2, 5.0), (4, 5, 2.0)]);
        let s3 = matrix(6, &[(0, 1, 1.0), (0, 2, 2.0), (1, 2, 2.0), (3, 5, 1.0)]);
        let union: HashSet<(NodeId, NodeId)> = [&s1, &s2, &s3]
            .into_iter()
            .flat_map(|s| s.entries().map(|(&e, _)| e))
            .collect();
        // output edges either carry a score or close a scored wedge
        let admissible = |(u, v): (NodeId, NodeId)| {
            union.contains(&(u, v))
                || (0..6u32).any(|z| {
                    union.contains(&(z.min(u), z.max(u))) && union.contains(&(z.min(v), z.max(v)))
                })
        };
        let views = ViewSet::new(s1, s2, s3).unwrap();
        for m in 1..=union.len() {
            let cfg = CombineConfig::new(0.2, 0.3, 0.5, 0.25, m).unwrap();
            let g = mmgan_assemble(&views, &cfg, 77 + m as u64).unwrap();
            assert_eq!(g.edge_count(), m);
            for edge in g.edges() {
                assert!(admissible(edge), "edge {edge:?} outside closed support");
            }
        }
    }

    #[test]
    fn random_branch_closes_scored_wedges() {
        // S₃ scores only the wedge 1–0–2, so reaching 3 edges forces the
        // closing edge {1,2} that no view scored
        let s3 = matrix(3, &[(0, 1, 1.0), (0, 2, 1.0)]);
        let views = ViewSet::new(ScoreMatrix::zeros(3), ScoreMatrix::zeros(3), s3).unwrap();
        let cfg = CombineConfig::new(0.0, 0.0, 1.0, 0.0, 3).unwrap();
        let g = mmgan_assemble(&views, &cfg, 8).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(1, 2));
    }

    #[test]
    fn assembly_rejects_unreachable_budget() {
        // a single scored pair admits no wedge closures either
        let s = matrix(4, &[(0, 1, 1.0)]);
        let views = ViewSet::new(s.clone(), s.clone(), s).unwrap();
        let cfg = CombineConfig::new(1.0 / 6.0, 1.0 / 3.0, 0.5, 0.25, 3).unwrap();
        assert!(matches!(
            mmgan_assemble(&views, &cfg, 0),
            Err(CombineError::AssemblyStalled {
                target: 3,
                reached: 1,
                ..
            })
        ));
    }

    #[test]
    fn pure_s1_random_branch_matches_single_view_assembly() {
        // with p1 = 1 and p_s = 0 the scheme II loop performs exactly the
        // NetGAN edge assembly over S₁; compare per-edge frequencies
        let s = matrix(
            5,
            &[
                (0, 1, 5.0),
                (0, 2, 1.0),
                (1, 2, 2.0),
                (1, 3, 1.0),
                (2, 4, 3.0),
                (3, 4, 2.0),
            ],
        );
        let views = ViewSet::new(s.clone(), ScoreMatrix::zeros(5), ScoreMatrix::zeros(5)).unwrap();
        let cfg = CombineConfig::new(1.0, 0.0, 0.0, 0.0, 3).unwrap();
        let runs = 1500;
        let mut freq_mmgan: HashMap<(NodeId, NodeId), f64> = HashMap::new();
        let mut freq_single: HashMap<(NodeId, NodeId), f64> = HashMap::new();
        for seed in 0..runs {
            for (tally, graph) in [
                (&mut freq_mmgan, mmgan_assemble(&views, &cfg, seed).unwrap()),
                (
                    &mut freq_single,
                    sample_edges_by_score(&s, 3, seed + 10_000).unwrap(),
                ),
            ] {
                for edge in graph.edges() {
                    *tally.entry(edge).or_insert(0.0) += 1.0 / runs as f64;
                }
            }
        }
        for (&edge, _) in s.entries() {
            let a = freq_mmgan.get(&edge).copied().unwrap_or(0.0);
            let b = freq_single.get(&edge).copied().unwrap_or(0.0);
            assert!(
                (a - b).abs() < 0.05,
                "edge {edge:?}: scheme II {a:.3} vs single-view {b:.3}"
            );
        }
    }

    #[test]
    fn motif_weighted_assembly_recovers_more_triangles() {
        // triangle-rich input: three triangles in a chain plus wedge fluff
        let g = Graph::from_edges(
            12,
            [
                (0, 1),
                (1, 2),
                (2, 0),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 3),
                (5, 6),
                (6, 7),
                (7, 8),
                (8, 6),
                (8, 9),
                (9, 10),
                (9, 11),
            ],
        )
        .unwrap();
        let cfg = WalkConfig::default();
        let m = g.edge_count();
        let mut wins = 0;
        let seeds = 50;
        for seed in 0..seeds {
            let views = ViewSet::new(
                build_view(&g, BiasKind::None, &cfg, 150, 150, 0.1, seed).unwrap(),
                build_view(&g, BiasKind::TowardV, &cfg, 150, 150, 0.1, seed).unwrap(),
                build_view(&g, BiasKind::TowardT, &cfg, 150, 150, 0.1, seed).unwrap(),
            )
            .unwrap();
            let combine_cfg = CombineConfig::new(1.0 / 6.0, 1.0 / 3.0, 0.5, 0.25, m).unwrap();
            let mmgan = mmgan_assemble(&views, &combine_cfg, 1000 + seed).unwrap();
            let single = sample_edges_by_score(&views.s1, m, 2000 + seed).unwrap();
            if census3(&mmgan).count_t >= census3(&single).count_t {
                wins += 1;
            }
        }
        assert!(
            wins * 10 >= seeds * 8,
            "triangle-count wins: {wins}/{seeds}"
        );
    }
}
