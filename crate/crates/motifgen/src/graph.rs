//! Undirected simple graph over dense node ids, with edge-list I/O,
//! connectivity, edge overlap, and degree-preserving randomization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{BufRead, Write};
use thiserror::Error;

/// Internal node identifier; graphs always use the dense range `0..n`.
pub type NodeId = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("reference graph has no edges")]
    NoEdges,
    #[error("graphs span different node universes ({left} vs {right} nodes)")]
    UniverseMismatch { left: usize, right: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node id {id} out of range for {n} nodes")]
    NodeOutOfRange { id: NodeId, n: usize },
    #[error("unknown external node id {0}")]
    UnknownExternalId(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Undirected simple graph. No self-loops, no duplicate edges; every
/// neighbor list is sorted and `i ∈ adj(j) ⇔ j ∈ adj(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes from an edge list. Rejects self-loops,
    /// duplicates, and out-of-range endpoints.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        let mut count = 0usize;
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for id in [u, v] {
                if id as usize >= n {
                    return Err(GraphError::NodeOutOfRange { id, n });
                }
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            count += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(pair) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u as NodeId, pair[0]));
            }
        }
        Ok(Self {
            adj,
            edge_count: count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v as usize].len()
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        (u as usize) < self.adj.len() && self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Iterates every edge once as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nbrs)| {
            let u = u as NodeId;
            nbrs.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([0 as NodeId]);
        seen[0] = true;
        let mut reached = 1usize;
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == self.adj.len()
    }
}

/// Bijection between external node ids (as found in input files) and the
/// dense internal ids used everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIdMap {
    to_external: Vec<u64>,
    to_internal: HashMap<u64, NodeId>,
}

impl NodeIdMap {
    /// Identity mapping for graphs built in memory.
    pub fn identity(n: usize) -> Self {
        Self {
            to_external: (0..n as u64).collect(),
            to_internal: (0..n as u64).map(|i| (i, i as NodeId)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.to_external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_external.is_empty()
    }

    pub fn external(&self, v: NodeId) -> u64 {
        self.to_external[v as usize]
    }

    pub fn internal(&self, external: u64) -> Option<NodeId> {
        self.to_internal.get(&external).copied()
    }

    fn insert(&mut self, external: u64) -> NodeId {
        if let Some(&v) = self.to_internal.get(&external) {
            return v;
        }
        let v = self.to_external.len() as NodeId;
        self.to_external.push(external);
        self.to_internal.insert(external, v);
        v
    }

    /// Restriction to a subset of nodes, e.g. after extracting a component.
    /// `new_to_old[new]` is the old internal id now called `new`.
    pub fn restricted(&self, new_to_old: &[NodeId]) -> Self {
        let to_external: Vec<u64> = new_to_old
            .iter()
            .map(|&old| self.to_external[old as usize])
            .collect();
        let to_internal = to_external
            .iter()
            .enumerate()
            .map(|(new, &ext)| (ext, new as NodeId))
            .collect();
        Self {
            to_external,
            to_internal,
        }
    }
}

/// Result of ingesting an edge-list file.
#[derive(Debug)]
pub struct ParsedEdgeList {
    pub graph: Graph,
    pub ids: NodeIdMap,
    /// Self-loops and repeated edges silently dropped during ingestion.
    pub dropped: usize,
}

/// Parses a whitespace-separated "u v" edge list. Lines starting with `#`
/// and blank lines are skipped; duplicate edges and self-loops are dropped
/// (counted in `dropped`); external ids are remapped to `0..n` in order of
/// first appearance.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<ParsedEdgeList, GraphError> {
    let mut ids = NodeIdMap {
        to_external: Vec::new(),
        to_internal: HashMap::new(),
    };
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut seen: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut dropped = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(GraphError::Parse {
                    line: line_no,
                    msg: format!("expected two node ids, got {trimmed:?}"),
                })
            }
        };
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| GraphError::Parse {
                line: line_no,
                msg: format!("malformed node id {tok:?}"),
            })
        };
        let (ea, eb) = (parse(a)?, parse(b)?);
        if ea == eb {
            dropped += 1;
            continue;
        }
        let u = ids.insert(ea);
        let v = ids.insert(eb);
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push(key);
        } else {
            dropped += 1;
        }
    }

    let graph = Graph::from_edges(ids.len(), edges)?;
    Ok(ParsedEdgeList {
        graph,
        ids,
        dropped,
    })
}

/// Writes one "u v" line per edge with `u < v` in external ids, sorted,
/// newline-terminated.
pub fn write_edge_list<W: Write>(
    graph: &Graph,
    ids: &NodeIdMap,
    mut writer: W,
) -> Result<(), GraphError> {
    let mut lines: Vec<(u64, u64)> = graph
        .edges()
        .map(|(u, v)| {
            let (a, b) = (ids.external(u), ids.external(v));
            (a.min(b), a.max(b))
        })
        .collect();
    lines.sort_unstable();
    for (a, b) in lines {
        writeln!(writer, "{a} {b}")?;
    }
    Ok(())
}

/// Induced subgraph on the largest connected component, ids re-densified in
/// ascending order of the old ids. Ties between equal-sized components go to
/// the one containing the smallest internal id. Returns the subgraph and the
/// `new → old` id table.
pub fn largest_connected_component(graph: &Graph) -> Result<(Graph, Vec<NodeId>), GraphError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut component = vec![usize::MAX; n];
    let mut sizes: Vec<usize> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0usize;
        let mut queue = VecDeque::from([start as NodeId]);
        component[start] = id;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in graph.neighbors(v) {
                if component[w as usize] == usize::MAX {
                    component[w as usize] = id;
                    queue.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    // Components are discovered in ascending order of their minimum node id,
    // so the first maximal-size component wins ties.
    let best = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(id, _)| id)
        .expect("n > 0");

    let new_to_old: Vec<NodeId> = (0..n as NodeId)
        .filter(|&v| component[v as usize] == best)
        .collect();
    let mut old_to_new = vec![NodeId::MAX; n];
    for (new, &old) in new_to_old.iter().enumerate() {
        old_to_new[old as usize] = new as NodeId;
    }
    let edges = graph
        .edges()
        .filter(|&(u, _)| component[u as usize] == best)
        .map(|(u, v)| (old_to_new[u as usize], old_to_new[v as usize]));
    let sub = Graph::from_edges(new_to_old.len(), edges.collect::<Vec<_>>())?;
    Ok((sub, new_to_old))
}

/// Fraction of the reference graph's edges present in `candidate`:
/// `|E(candidate) ∩ E(reference)| / |E(reference)|`.
pub fn edge_overlap(candidate: &Graph, reference: &Graph) -> Result<f64, GraphError> {
    if candidate.node_count() != reference.node_count() {
        return Err(GraphError::UniverseMismatch {
            left: candidate.node_count(),
            right: reference.node_count(),
        });
    }
    if reference.edge_count() == 0 {
        return Err(GraphError::NoEdges);
    }
    let shared = candidate
        .edges()
        .filter(|&(u, v)| reference.has_edge(u, v))
        .count();
    Ok(shared as f64 / reference.edge_count() as f64)
}

/// Degree-preserving randomization by repeated double-edge swaps: edges
/// {a,b}, {c,d} become {a,d}, {c,b}. Swaps that would create a self-loop or
/// duplicate edge are rejected, so the output is simple and every node keeps
/// its exact degree. Graphs with fewer than two edges are returned unchanged.
pub fn degree_preserving_rewire(graph: &Graph, swap_attempts: usize, seed: u64) -> Graph {
    if graph.edge_count() < 2 {
        return graph.clone();
    }
    let mut edges: Vec<(NodeId, NodeId)> = graph.edges().collect();
    let mut present: HashSet<(NodeId, NodeId)> = edges.iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = |u: NodeId, v: NodeId| (u.min(v), u.max(v));

    for _ in 0..swap_attempts {
        let i = rng.random_range(0..edges.len());
        let j = rng.random_range(0..edges.len());
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if rng.random::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        // proposed replacement: {a, d} and {c, b}
        if a == d || c == b {
            continue;
        }
        let new_i = key(a, d);
        let new_j = key(c, b);
        if new_i == new_j || present.contains(&new_i) || present.contains(&new_j) {
            continue;
        }
        present.remove(&edges[i]);
        present.remove(&edges[j]);
        present.insert(new_i);
        present.insert(new_j);
        edges[i] = new_i;
        edges[j] = new_j;
    }

    Graph::from_edges(graph.node_count(), edges).expect("swaps preserve simplicity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn parse(text: &str) -> ParsedEdgeList {
        parse_edge_list(Cursor::new(text)).expect("parse")
    }

    #[test]
    fn parses_plain_edge_list() {
        let parsed = parse("0 1\n1 2\n");
        assert_eq!(parsed.graph.node_count(), 3);
        assert_eq!(
            parsed.graph.edges().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2)]
        );
        assert_eq!(parsed.dropped, 0);
    }

    #[test]
    fn drops_duplicates_and_self_loops() {
        let parsed = parse("0 1\n1 0\n0 0\n");
        assert_eq!(parsed.graph.node_count(), 2);
        assert_eq!(parsed.graph.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(parsed.dropped, 2);
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let parsed = parse("# header\n\n10 20\n  # indented comment\n20 30\n");
        assert_eq!(parsed.graph.node_count(), 3);
        assert_eq!(parsed.graph.edge_count(), 2);
        assert_eq!(parsed.ids.external(0), 10);
        assert_eq!(parsed.ids.internal(30), Some(2));
    }

    #[test]
    fn reports_parse_error_with_line_number() {
        let err = parse_edge_list(Cursor::new("0 1\nx 2\n")).unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_token_count() {
        assert!(parse_edge_list(Cursor::new("0 1 2\n")).is_err());
        assert!(parse_edge_list(Cursor::new("0\n")).is_err());
    }

    #[test]
    fn serializer_emits_sorted_external_pairs() {
        let parsed = parse("5 3\n3 1\n");
        let mut out = Vec::new();
        write_edge_list(&parsed.graph, &parsed.ids, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1 3\n3 5\n");
    }

    #[test]
    fn lcc_breaks_ties_by_smallest_internal_id() {
        // two disjoint triangles plus an isolated-ish pendant pair
        let g =
            Graph::from_edges(8, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (6, 7)]).unwrap();
        let (lcc, new_to_old) = largest_connected_component(&g).unwrap();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(lcc.edge_count(), 3);
        assert_eq!(new_to_old, vec![0, 1, 2]);
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let (lcc, new_to_old) = largest_connected_component(&g).unwrap();
        assert_eq!(lcc, g);
        assert_eq!(new_to_old, vec![0, 1, 2, 3]);
    }

    #[test]
    fn lcc_rejects_empty_graph() {
        let g = Graph::from_edges(0, []).unwrap();
        assert!(matches!(
            largest_connected_component(&g),
            Err(GraphError::EmptyGraph)
        ));
    }

    #[test]
    fn overlap_identity_and_disjoint() {
        let a = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(edge_overlap(&a, &a).unwrap(), 1.0);
        let b = Graph::from_edges(4, [(0, 2), (1, 3)]).unwrap();
        assert_eq!(edge_overlap(&b, &a).unwrap(), 0.0);
    }

    #[test]
    fn overlap_counts_against_reference() {
        let reference =
            Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let candidate =
            Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 4)]).unwrap();
        assert_eq!(edge_overlap(&candidate, &reference).unwrap(), 0.5);
    }

    #[test]
    fn overlap_requires_reference_edges() {
        let a = Graph::from_edges(2, [(0, 1)]).unwrap();
        let empty = Graph::from_edges(2, []).unwrap();
        assert!(matches!(edge_overlap(&a, &empty), Err(GraphError::NoEdges)));
    }

    #[test]
    fn rewire_zero_attempts_is_identity() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(degree_preserving_rewire(&g, 0, 7), g);
    }

    #[test]
    fn rewire_leaves_k4_fixed() {
        // K4 is the only simple graph with degree sequence (3,3,3,3)
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let rewired = degree_preserving_rewire(&k4, 500, 13);
        assert_eq!(rewired, k4);
    }

    #[test]
    fn rewire_actually_rewires() {
        let cycle: Vec<(NodeId, NodeId)> = (0..20).map(|i| (i, (i + 1) % 20)).collect();
        let g = Graph::from_edges(20, cycle).unwrap();
        let rewired = degree_preserving_rewire(&g, 200, 3);
        assert_ne!(rewired, g);
        assert_eq!(rewired.degree_sequence(), g.degree_sequence());
    }

    proptest! {
        #[test]
        fn parse_serialize_round_trips(edge_list in proptest::collection::vec((0u64..30, 0u64..30), 0..60)) {
            let text: String = edge_list.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
            let first = parse(&text);
            let mut serialized = Vec::new();
            write_edge_list(&first.graph, &first.ids, &mut serialized).unwrap();
            let second = parse(std::str::from_utf8(&serialized).unwrap());
            let canon = |p: &ParsedEdgeList| {
                let mut edges: Vec<(u64, u64)> = p
                    .graph
                    .edges()
                    .map(|(u, v)| {
                        let (a, b) = (p.ids.external(u), p.ids.external(v));
                        (a.min(b), a.max(b))
                    })
                    .collect();
                edges.sort_unstable();
                edges
            };
            prop_assert_eq!(canon(&first), canon(&second));
        }

        #[test]
        fn rewire_preserves_degree_sequence(
            edge_list in proptest::collection::vec((0u32..25, 0u32..25), 1..80),
            attempts in 0usize..400,
            seed in 0u64..1000,
        ) {
            let mut seen = HashSet::new();
            let edges: Vec<(NodeId, NodeId)> = edge_list
                .into_iter()
                .filter(|&(u, v)| u != v)
                .map(|(u, v)| (u.min(v), u.max(v)))
                .filter(|e| seen.insert(*e))
                .collect();
            let g = Graph::from_edges(25, edges).unwrap();
            let rewired = degree_preserving_rewire(&g, attempts, seed);
            prop_assert_eq!(rewired.degree_sequence(), g.degree_sequence());
            prop_assert_eq!(rewired.edge_count(), g.edge_count());
        }

        #[test]
        fn lcc_is_connected_induced_subgraph(
            edge_list in proptest::collection::vec((0u32..20, 0u32..20), 1..50),
        ) {
            let mut seen = HashSet::new();
            let edges: Vec<(NodeId, NodeId)> = edge_list
                .into_iter()
                .filter(|&(u, v)| u != v)
                .map(|(u, v)| (u.min(v), u.max(v)))
                .filter(|e| seen.insert(*e))
                .collect();
            let g = Graph::from_edges(20, edges).unwrap();
            let (lcc, new_to_old) = largest_connected_component(&g).unwrap();
            prop_assert!(lcc.is_connected());
            // induced: edges of lcc are exactly g's edges among kept nodes
            for (u, v) in lcc.edges() {
                prop_assert!(g.has_edge(new_to_old[u as usize], new_to_old[v as usize]));
            }
            let kept: HashSet<NodeId> = new_to_old.iter().copied().collect();
            let expected = g
                .edges()
                .filter(|(u, v)| kept.contains(u) && kept.contains(v))
                .count();
            prop_assert_eq!(lcc.edge_count(), expected);
        }
    }

    #[test]
    fn id_map_round_trips() {
        let parsed = parse("100 7\n7 42\n");
        for v in 0..parsed.graph.node_count() as NodeId {
            assert_eq!(parsed.ids.internal(parsed.ids.external(v)), Some(v));
        }
    }
}
