//! Shared integration-test helpers: brute-force oracles over bitmask
//! adjacency (independent of the library's counting paths) and synthetic
//! graph builders.
//!
//! Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]

use motifgen::graph::{Graph, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

/// Oracle-side adjacency as one u64 bitmask per node; limited to n ≤ 64.
pub struct MaskGraph {
    pub n: usize,
    mask: Vec<u64>,
}

impl MaskGraph {
    pub fn from_graph(graph: &Graph) -> Self {
        assert!(graph.node_count() <= 64, "oracle supports up to 64 nodes");
        let mut mask = vec![0u64; graph.node_count()];
        for (u, v) in graph.edges() {
            mask[u as usize] |= 1 << v;
            mask[v as usize] |= 1 << u;
        }
        Self {
            n: graph.node_count(),
            mask,
        }
    }

    pub fn has(&self, u: usize, v: usize) -> bool {
        self.mask[u] >> v & 1 == 1
    }
}

pub struct BruteCensus {
    pub count_v: u64,
    pub count_t: u64,
    pub per_edge: BTreeMap<(NodeId, NodeId), (u64, u64)>,
    /// Wedges center-first with ascending leaves, lexicographically sorted.
    pub instances_v: Vec<[NodeId; 3]>,
    /// Triangles as ascending triples, lexicographically sorted.
    pub instances_t: Vec<[NodeId; 3]>,
}

/// O(n³) enumeration over all node triples.
pub fn brute_census(graph: &Graph) -> BruteCensus {
    let m = MaskGraph::from_graph(graph);
    let mut census = BruteCensus {
        count_v: 0,
        count_t: 0,
        per_edge: graph.edges().map(|e| (e, (0, 0))).collect(),
        instances_v: Vec::new(),
        instances_t: Vec::new(),
    };
    for a in 0..m.n {
        for b in (a + 1)..m.n {
            for c in (b + 1)..m.n {
                let edges = [
                    (a, b, m.has(a, b)),
                    (a, c, m.has(a, c)),
                    (b, c, m.has(b, c)),
                ];
                let present = edges.iter().filter(|e| e.2).count();
                if present == 3 {
                    census.count_t += 1;
                    census
                        .instances_t
                        .push([a as NodeId, b as NodeId, c as NodeId]);
                    for (x, y, _) in edges {
                        census
                            .per_edge
                            .get_mut(&(x as NodeId, y as NodeId))
                            .unwrap()
                            .1 += 1;
                    }
                } else if present == 2 {
                    census.count_v += 1;
                    // the center is incident to both present edges
                    let center = if edges[0].2 && edges[1].2 {
                        a
                    } else if edges[0].2 && edges[2].2 {
                        b
                    } else {
                        c
                    };
                    let mut leaves: Vec<NodeId> = [a, b, c]
                        .into_iter()
                        .filter(|&x| x != center)
                        .map(|x| x as NodeId)
                        .collect();
                    leaves.sort_unstable();
                    census
                        .instances_v
                        .push([center as NodeId, leaves[0], leaves[1]]);
                    for (x, y, here) in edges {
                        if here {
                            census
                                .per_edge
                                .get_mut(&(x as NodeId, y as NodeId))
                                .unwrap()
                                .0 += 1;
                        }
                    }
                }
            }
        }
    }
    census.instances_v.sort_unstable();
    census.instances_t.sort_unstable();
    census
}

/// O(n⁴) enumeration: every 4-subset hosts up to three distinct 4-cycles,
/// one per pairing of opposite corners.
pub fn brute_four_cycles(graph: &Graph) -> u64 {
    let m = MaskGraph::from_graph(graph);
    let mut count = 0u64;
    for a in 0..m.n {
        for b in (a + 1)..m.n {
            for c in (b + 1)..m.n {
                for d in (c + 1)..m.n {
                    let cycles = [
                        [(a, b), (b, c), (c, d), (d, a)],
                        [(a, b), (b, d), (d, c), (c, a)],
                        [(a, c), (c, b), (b, d), (d, a)],
                    ];
                    for cycle in cycles {
                        if cycle.iter().all(|&(x, y)| m.has(x, y)) {
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    count
}

/// Erdős–Rényi-style random graph (possibly disconnected).
pub fn random_graph(n: usize, density: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in (u + 1)..n as NodeId {
            if rng.random::<f64>() < density {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("generator emits unique canonical pairs")
}

/// Connected random graph: a random spanning tree plus `extra` random edges.
pub fn connected_random_graph(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: BTreeSet<(NodeId, NodeId)> = (1..n as NodeId)
        .map(|v| {
            let u = rng.random_range(0..v);
            (u.min(v), u.max(v))
        })
        .collect();
    let target = (n - 1 + extra).min(n * (n - 1) / 2);
    while edges.len() < target {
        let u = rng.random_range(0..n) as NodeId;
        let v = rng.random_range(0..n) as NodeId;
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    Graph::from_edges(n, edges).expect("simple by construction")
}

/// A connected graph rich in both wedges and triangles: a chain of
/// triangles with pendant paths sprinkled on, reminiscent of sparse social
/// graphs where wedges dominate but triangles are significant.
pub fn triangle_rich_graph(triangles: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut next: NodeId = 0;
    let mut hub = 0;
    for t in 0..triangles {
        let (a, b, c) = (next, next + 1, next + 2);
        edges.push((a, b));
        edges.push((a, c));
        edges.push((b, c));
        if t > 0 {
            edges.push((hub, a));
        }
        hub = c;
        next += 3;
    }
    // pendant paths off random triangle nodes
    let anchors = next;
    for _ in 0..triangles {
        let anchor = rng.random_range(0..anchors);
        let len = rng.random_range(1..4u32);
        let mut prev = anchor;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    Graph::from_edges(next as usize, edges).expect("simple by construction")
}

/// Directory where benchmark edge lists live, overridable via
/// `MOTIFGEN_DATA_DIR`.
pub fn data_dir() -> PathBuf {
    std::env::var_os("MOTIFGEN_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR"))
                .join("../..")
                .join("data")
        })
}

/// Loads `data/<name>.txt` and reduces it to its largest connected
/// component; `None` when the file is absent.
pub fn load_dataset(name: &str) -> Option<Graph> {
    let path = data_dir().join(format!("{name}.txt"));
    let file = std::fs::File::open(&path).ok()?;
    let parsed = motifgen::graph::parse_edge_list(std::io::BufReader::new(file))
        .unwrap_or_else(|e| panic!("failed to parse {}: {e}", path.display()));
    let (lcc, _) = motifgen::graph::largest_connected_component(&parsed.graph)
        .unwrap_or_else(|e| panic!("failed to extract LCC of {}: {e}", path.display()));
    Some(lcc)
}
