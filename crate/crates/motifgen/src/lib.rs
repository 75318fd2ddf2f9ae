//! Generation of graphs that preserve the 3-node motif statistics of an
//! input graph, built from three differently biased second-order random
//! walks ("views") whose edge-score matrices are combined into an output
//! graph, plus an evaluation harness for motif counts, concentration
//! divergence, and link/motif prediction.

pub mod census;
pub mod combine;
pub mod eval;
pub mod graph;
pub mod model;
pub mod pipeline;
pub mod score;
pub mod seeds;
pub mod walk;

pub use census::{census3, count_four_cycles, edge_participation, MotifCensus, MotifType};
pub use combine::{average_scores, mmgan_assemble, sample_edges_by_score, CombineConfig, ViewSet};
pub use eval::{motif_report, rank_metrics, score_items, split_holdout, RankMetrics};
pub use graph::{
    degree_preserving_rewire, edge_overlap, largest_connected_component, parse_edge_list, Graph,
    NodeId, NodeIdMap,
};
pub use model::{build_view, fit_markov, generate_walks, WalkModel};
pub use score::ScoreMatrix;
pub use walk::{
    motif_biased_weights, sample_walks, transition_distribution, BiasKind, BiasedWeights,
    WalkConfig, WalkSet,
};
