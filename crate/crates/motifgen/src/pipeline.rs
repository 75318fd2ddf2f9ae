//! End-to-end orchestration: resolved configuration, stage composition,
//! reproducible artifacts with a manifest.

use crate::census::{census3, count_four_cycles, random_baseline, CensusError, CensusReport};
use crate::combine::{
    average_scores, mmgan_assemble, sample_edges_by_score, CombineConfig, CombineError, ViewSet,
};
use crate::eval::{motif_report, rank_metrics, score_items, split_holdout, EvalError, RankMetrics};
use crate::graph::{
    edge_overlap, largest_connected_component, parse_edge_list, write_edge_list, Graph, GraphError,
    NodeIdMap,
};
use crate::model::{build_view, ModelError};
use crate::score::ScoreError;
use crate::seeds;
use crate::walk::{
    motif_biased_weights, sample_walks, write_walks, BiasKind, WalkConfig, WalkError,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Combine(#[from] CombineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("serialization: {0}")]
    Serialize(String),
}

impl PipelineError {
    /// Exit code classification: 1 for bad inputs, 2 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_)
            | PipelineError::Io { .. }
            | PipelineError::Graph(_)
            | PipelineError::Walk(
                WalkError::NoMotifs
                | WalkError::InvalidConfig(_)
                | WalkError::Parse { .. }
                | WalkError::UnknownExternalId(_)
                | WalkError::Io(_),
            )
            | PipelineError::Model(ModelError::Walk(WalkError::NoMotifs))
            | PipelineError::Score(
                ScoreError::Parse { .. } | ScoreError::UnknownExternalId(_) | ScoreError::Io(_),
            )
            | PipelineError::Eval(EvalError::InvalidFraction(_)) => 1,
            _ => 2,
        }
    }
}

/// Walk-stage settings: node2vec biases, walk length, and the per-phase
/// walk budget expressed as a multiple of the edge count.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct WalkSettings {
    pub p: f64,
    pub q: f64,
    pub walk_length: usize,
    /// Each phase (training, generation) draws enough walks for
    /// `steps_factor · |E|` steps, unless overridden below.
    pub steps_factor: f64,
    pub train_walks: Option<usize>,
    pub gen_walks: Option<usize>,
    /// Fixed Markov smoothing; when absent the pipeline tunes over
    /// `delta_grid` to the largest value reaching `overlap_target`.
    pub delta: Option<f64>,
    pub delta_grid: Vec<f64>,
    pub overlap_target: f64,
}

impl Default for WalkSettings {
    fn default() -> Self {
        Self {
            p: 1.0,
            q: 1.0,
            walk_length: 16,
            steps_factor: 100.0,
            train_walks: None,
            gen_walks: None,
            delta: None,
            delta_grid: vec![1.0, 0.1, 0.01, 0.0],
            overlap_target: 0.6,
        }
    }
}

/// Scheme II mixing probabilities; edge counts of the three motif shapes
/// motivate the 1/6, 1/3, 1/2 defaults.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CombineSettings {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p_s: f64,
}

impl Default for CombineSettings {
    fn default() -> Self {
        Self {
            p1: 1.0 / 6.0,
            p2: 1.0 / 3.0,
            p3: 1.0 / 2.0,
            p_s: 0.25,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    pub test_fraction: f64,
    pub baseline_samples: usize,
    /// Rewiring budget per baseline sample, as a multiple of |E|.
    pub baseline_swap_factor: usize,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            test_fraction: 0.2,
            baseline_samples: 5,
            baseline_swap_factor: 10,
        }
    }
}

/// Full pipeline configuration. The seed is mandatory at run time; there is
/// deliberately no wall-clock fallback.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: Option<u64>,
    pub walk: WalkSettings,
    pub combine: CombineSettings,
    pub eval: EvalSettings,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, PipelineError> {
        let cfg: Self = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String, PipelineError> {
        toml::to_string(self).map_err(|e| PipelineError::Serialize(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.walk_config()?;
        self.combine_config(1)?;
        if !(self.eval.test_fraction > 0.0 && self.eval.test_fraction < 1.0) {
            return Err(PipelineError::Config(format!(
                "test_fraction must be in (0,1), got {}",
                self.eval.test_fraction
            )));
        }
        if self.eval.baseline_samples == 0 {
            return Err(PipelineError::Config("baseline_samples must be ≥ 1".into()));
        }
        if self.walk.steps_factor <= 0.0 {
            return Err(PipelineError::Config(
                "steps_factor must be positive".into(),
            ));
        }
        if let Some(d) = self.walk.delta {
            if !(d.is_finite() && d >= 0.0) {
                return Err(PipelineError::Config(format!("delta must be ≥ 0, got {d}")));
            }
        }
        if self.walk.delta.is_none() && self.walk.delta_grid.is_empty() {
            return Err(PipelineError::Config(
                "either delta or a non-empty delta_grid is required".into(),
            ));
        }
        Ok(())
    }

    pub fn walk_config(&self) -> Result<WalkConfig, PipelineError> {
        Ok(WalkConfig::new(
            self.walk.p,
            self.walk.q,
            self.walk.walk_length,
        )?)
    }

    pub fn combine_config(&self, target_edges: usize) -> Result<CombineConfig, PipelineError> {
        Ok(CombineConfig::new(
            self.combine.p1,
            self.combine.p2,
            self.combine.p3,
            self.combine.p_s,
            target_edges,
        )?)
    }

    /// `(train_walks, gen_walks)` for a graph, honoring explicit overrides.
    pub fn walk_budget(&self, graph: &Graph) -> (usize, usize) {
        let steps = (self.walk.steps_factor * graph.edge_count() as f64).ceil() as usize;
        let per_walk = self.walk.walk_length.saturating_sub(1).max(1);
        let derived = steps.div_ceil(per_walk).max(1);
        (
            self.walk.train_walks.unwrap_or(derived),
            self.walk.gen_walks.unwrap_or(derived),
        )
    }
}

/// Input graph after ingestion: largest connected component with its
/// external-id table.
pub struct LoadedGraph {
    pub graph: Graph,
    pub ids: NodeIdMap,
    pub dropped_lines: usize,
    pub original_nodes: usize,
    pub original_edges: usize,
}

/// Parses an edge-list file and restricts to the largest connected
/// component, which every later stage assumes.
pub fn load_input(path: &Path) -> Result<LoadedGraph, PipelineError> {
    let file = fs::File::open(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed = parse_edge_list(BufReader::new(file))?;
    let (original_nodes, original_edges) = (parsed.graph.node_count(), parsed.graph.edge_count());
    let (lcc, new_to_old) = largest_connected_component(&parsed.graph)?;
    let ids = parsed.ids.restricted(&new_to_old);
    Ok(LoadedGraph {
        graph: lcc,
        ids,
        dropped_lines: parsed.dropped,
        original_nodes,
        original_edges,
    })
}

/// Builds the three views with per-view derived seeds.
pub fn build_views(
    graph: &Graph,
    cfg: &PipelineConfig,
    delta: f64,
    seed: u64,
) -> Result<ViewSet, PipelineError> {
    let walk_cfg = cfg.walk_config()?;
    let (train_walks, gen_walks) = cfg.walk_budget(graph);
    let mut views = Vec::with_capacity(3);
    for (index, kind) in [BiasKind::None, BiasKind::TowardV, BiasKind::TowardT]
        .into_iter()
        .enumerate()
    {
        views.push(build_view(
            graph,
            kind,
            &walk_cfg,
            train_walks,
            gen_walks,
            delta,
            seeds::derive(seed, "view", index as u64),
        )?);
    }
    let s3 = views.pop().expect("three views");
    let s2 = views.pop().expect("three views");
    let s1 = views.pop().expect("three views");
    Ok(ViewSet::new(s1, s2, s3)?)
}

/// Outcome of smoothing selection.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeltaChoice {
    pub delta: f64,
    /// Edge overlap of the provisional S₁ graph, when tuning ran.
    pub overlap: Option<f64>,
}

/// Picks the Markov smoothing: a fixed value when configured, otherwise the
/// largest grid value whose provisional S₁-generated graph reaches the
/// overlap target against the input.
pub fn resolve_delta(
    graph: &Graph,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<(DeltaChoice, Vec<String>), PipelineError> {
    let mut warnings = Vec::new();
    if let Some(delta) = cfg.walk.delta {
        return Ok((
            DeltaChoice {
                delta,
                overlap: None,
            },
            warnings,
        ));
    }
    let walk_cfg = cfg.walk_config()?;
    let (train_walks, gen_walks) = cfg.walk_budget(graph);
    let mut grid: Vec<f64> = cfg.walk.delta_grid.clone();
    grid.sort_by(|a, b| b.total_cmp(a));
    let mut fallback: Option<(f64, f64)> = None;
    for (index, &delta) in grid.iter().enumerate() {
        let s1 = build_view(
            graph,
            BiasKind::None,
            &walk_cfg,
            train_walks,
            gen_walks,
            delta,
            seeds::derive(seed, "delta-tune", index as u64),
        )?;
        let provisional = match sample_edges_by_score(
            &s1,
            graph.edge_count(),
            seeds::derive(seed, "delta-tune-sample", index as u64),
        ) {
            Ok(g) => g,
            Err(CombineError::InsufficientSupport { needed, available }) => {
                warnings.push(format!(
                    "delta {delta}: provisional S1 support {available} below edge count {needed}"
                ));
                continue;
            }
            Err(other) => return Err(other.into()),
        };
        let overlap = edge_overlap(&provisional, graph)?;
        if overlap >= cfg.walk.overlap_target {
            return Ok((
                DeltaChoice {
                    delta,
                    overlap: Some(overlap),
                },
                warnings,
            ));
        }
        if fallback.is_none_or(|(_, best)| overlap > best) {
            fallback = Some((delta, overlap));
        }
    }
    let (delta, overlap) = fallback.ok_or_else(|| {
        PipelineError::Config("delta grid exhausted without a usable smoothing value".into())
    })?;
    warnings.push(format!(
        "no grid delta reached overlap {}; using delta {delta} (overlap {overlap:.4})",
        cfg.walk.overlap_target
    ));
    Ok((
        DeltaChoice {
            delta,
            overlap: Some(overlap),
        },
        warnings,
    ))
}

/// Census stage output assembly.
pub fn census_stage(
    graph: &Graph,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<CensusReport, PipelineError> {
    let census = census3(graph);
    let (r_v, r_t) = random_baseline(
        graph,
        cfg.eval.baseline_samples,
        cfg.eval.baseline_swap_factor * graph.edge_count(),
        seeds::derive(seed, "census-baseline", 0),
    )?;
    Ok(CensusReport {
        count_v: census.count_v,
        count_t: census.count_t,
        conc_v: census.conc_v(),
        conc_t: census.conc_t(),
        r_v,
        r_t,
        four_cycles: count_four_cycles(graph),
    })
}

/// Which score matrix backs prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictMatrix {
    S1,
    Avg,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictReport {
    pub link: RankMetrics,
    pub motif: RankMetrics,
    pub matrix: PredictMatrix,
    pub requested_removals: usize,
    pub achieved_removals: usize,
}

/// Motif/link prediction: hold out motifs, rebuild the score matrix on the
/// train graph, score held-out items, rank.
pub fn predict_stage(
    graph: &Graph,
    cfg: &PipelineConfig,
    delta: f64,
    matrix: PredictMatrix,
    seed: u64,
) -> Result<(PredictReport, Vec<String>), PipelineError> {
    let mut warnings = Vec::new();
    let (split, stats) = split_holdout(
        graph,
        cfg.eval.test_fraction,
        seeds::derive(seed, "holdout", 0),
    )?;
    if stats.degraded() {
        warnings.push(format!(
            "connectivity limited edge removals to {}/{} candidates",
            stats.achieved_removals, stats.requested_removals
        ));
    }
    let scores = match matrix {
        PredictMatrix::Avg => {
            let views = build_views(
                &split.train_graph,
                cfg,
                delta,
                seeds::derive(seed, "predict-views", 0),
            )?;
            average_scores(&views)
        }
        PredictMatrix::S1 => {
            let walk_cfg = cfg.walk_config()?;
            let (train_walks, gen_walks) = cfg.walk_budget(&split.train_graph);
            build_view(
                &split.train_graph,
                BiasKind::None,
                &walk_cfg,
                train_walks,
                gen_walks,
                delta,
                seeds::derive(seed, "predict-views", 0),
            )?
        }
    };

    let positives: Vec<(crate::census::MotifType, [crate::graph::NodeId; 3])> = split
        .test_motifs
        .iter()
        .map(|inst| (inst.motif, inst.nodes))
        .collect();
    let (pos_edge_scores, pos_motif_scores) = score_items(&scores, &split.test_edges, &positives);
    let (neg_edge_scores, neg_motif_scores) =
        score_items(&scores, &split.test_non_edges, &split.test_non_motifs);

    let link = rank_metrics(&pos_edge_scores, &neg_edge_scores)?;
    let motif = rank_metrics(&pos_motif_scores, &neg_motif_scores)?;
    Ok((
        PredictReport {
            link,
            motif,
            matrix,
            requested_removals: stats.requested_removals,
            achieved_removals: stats.achieved_removals,
        },
        warnings,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountsBlock {
    pub input: crate::eval::MotifCounts,
    pub generated: crate::eval::MotifCounts,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizedBlock {
    #[serde(rename = "V")]
    pub v: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConcentrationPair {
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcentrationBlock {
    pub input: ConcentrationPair,
    pub generated: ConcentrationPair,
}

/// Full evaluation report for one generated graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub motif_counts: CountsBlock,
    pub normalized_counts: NormalizedBlock,
    pub concentrations: ConcentrationBlock,
    pub kl: f64,
    pub link: Option<RankMetrics>,
    pub motif: Option<RankMetrics>,
    pub four_cycle_normalized: Option<f64>,
}

/// Compares a generated graph against the input: motif report plus the
/// 4-cycle count ratio.
pub fn evaluate_stage(input: &Graph, generated: &Graph) -> EvalReport {
    let report = motif_report(input, generated);
    let input_cycles = count_four_cycles(input);
    let four_cycle_normalized =
        (input_cycles > 0).then(|| count_four_cycles(generated) as f64 / input_cycles as f64);
    EvalReport {
        motif_counts: CountsBlock {
            input: report.input_counts,
            generated: report.generated_counts,
        },
        normalized_counts: NormalizedBlock {
            v: report.normalized_v,
            t: report.normalized_t,
        },
        concentrations: ConcentrationBlock {
            input: ConcentrationPair {
                v: report.input_concentration.0,
                t: report.input_concentration.1,
            },
            generated: ConcentrationPair {
                v: report.generated_concentration.0,
                t: report.generated_concentration.1,
            },
        },
        kl: report.kl,
        link: None,
        motif: None,
        four_cycle_normalized,
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub name: String,
    pub path: String,
    pub stage: String,
    pub sha256: String,
}

/// Reproducibility record accompanying every run directory. A run that
/// failed mid-way still writes its manifest with `partial: true` so the
/// artifacts produced so far are accounted for.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub repetition: usize,
    pub config_sha256: String,
    pub delta: Option<f64>,
    pub delta_overlap: Option<f64>,
    pub partial: bool,
    pub error: Option<String>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<ArtifactEntry>,
}

/// One run directory in flight: collects artifacts and their hashes.
pub struct RunDir {
    root: PathBuf,
    artifacts: Vec<ArtifactEntry>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, PipelineError> {
        fs::create_dir_all(root).map_err(|source| PipelineError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(Self {
            root: root.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write_artifact(
        &mut self,
        name: &str,
        stage: &str,
        bytes: &[u8],
    ) -> Result<PathBuf, PipelineError> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|source| PipelineError::Io {
            path: path.clone(),
            source,
        })?;
        self.artifacts.push(ArtifactEntry {
            name: name.to_string(),
            path: name.to_string(),
            stage: stage.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(
        &mut self,
        name: &str,
        stage: &str,
        value: &T,
    ) -> Result<PathBuf, PipelineError> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| PipelineError::Serialize(e.to_string()))?;
        bytes.push(b'\n');
        self.write_artifact(name, stage, &bytes)
    }

    /// Writes the manifest itself (not listed as an artifact).
    pub fn finish(self, manifest: &Manifest) -> Result<(), PipelineError> {
        let path = self.root.join("manifest.json");
        let mut bytes = serde_json::to_vec_pretty(manifest)
            .map_err(|e| PipelineError::Serialize(e.to_string()))?;
        bytes.push(b'\n');
        fs::write(&path, bytes).map_err(|source| PipelineError::Io { path, source })
    }

    pub fn artifacts(&self) -> &[ArtifactEntry] {
        &self.artifacts
    }
}

/// Serializes a graph to edge-list bytes.
pub fn edge_list_bytes(graph: &Graph, ids: &NodeIdMap) -> Result<Vec<u8>, PipelineError> {
    let mut bytes = Vec::new();
    write_edge_list(graph, ids, &mut bytes)?;
    Ok(bytes)
}

fn execute_stages(
    input: &LoadedGraph,
    cfg: &PipelineConfig,
    seed: u64,
    run: &mut RunDir,
    warnings: &mut Vec<String>,
    metrics: &mut BTreeMap<String, f64>,
    delta_choice: &mut Option<DeltaChoice>,
) -> Result<(), PipelineError> {
    let graph = &input.graph;
    let ids = &input.ids;

    run.write_artifact("input_lcc.txt", "ingest", &edge_list_bytes(graph, ids)?)?;

    let census = census_stage(graph, cfg, seed)?;
    run.write_json("census.json", "census", &census)?;
    metrics.insert("census.count_T".into(), census.count_t as f64);

    let (choice, delta_warnings) = resolve_delta(graph, cfg, seed)?;
    warnings.extend(delta_warnings);
    *delta_choice = Some(choice);

    // training-walk export for external walk models
    {
        let walk_cfg = cfg.walk_config()?;
        let (train_walks, _) = cfg.walk_budget(graph);
        let weights = motif_biased_weights(
            &crate::census::edge_participation(graph),
            &census3(graph),
            BiasKind::None,
        )?;
        let walks = sample_walks(
            graph,
            &weights,
            &walk_cfg,
            train_walks,
            seeds::derive(seed, "walk-export", 0),
        )?;
        let mut bytes = Vec::new();
        write_walks(&walks, ids, &mut bytes)?;
        run.write_artifact("walks_train.txt", "walks", &bytes)?;
    }

    let views = build_views(graph, cfg, choice.delta, seed)?;
    for (name, view) in [("s1", &views.s1), ("s2", &views.s2), ("s3", &views.s3)] {
        let mut bytes = Vec::new();
        view.write(ids, &mut bytes)?;
        run.write_artifact(&format!("{name}.scores"), "views", &bytes)?;
    }

    let target = graph.edge_count();
    let averaged = average_scores(&views);
    let generated_avg =
        sample_edges_by_score(&averaged, target, seeds::derive(seed, "generate-avg", 0))?;
    run.write_artifact(
        "generated_avg.txt",
        "generate",
        &edge_list_bytes(&generated_avg, ids)?,
    )?;

    let combine_cfg = cfg.combine_config(target)?;
    let generated_mmgan = mmgan_assemble(
        &views,
        &combine_cfg,
        seeds::derive(seed, "generate-mmgan", 0),
    )?;
    run.write_artifact(
        "generated_mmgan.txt",
        "generate",
        &edge_list_bytes(&generated_mmgan, ids)?,
    )?;

    for (name, generated) in [("avg", &generated_avg), ("mmgan", &generated_mmgan)] {
        let report = evaluate_stage(graph, generated);
        run.write_json(&format!("eval_{name}.json"), "evaluate", &report)?;
        if let Some(t) = report.normalized_counts.t {
            metrics.insert(format!("{name}.normalized_T"), t);
        }
        if let Some(v) = report.normalized_counts.v {
            metrics.insert(format!("{name}.normalized_V"), v);
        }
        metrics.insert(format!("{name}.kl"), report.kl);
    }

    let (predict, predict_warnings) =
        predict_stage(graph, cfg, choice.delta, PredictMatrix::Avg, seed)?;
    warnings.extend(predict_warnings);
    run.write_json("predict.json", "predict", &predict)?;
    metrics.insert("predict.link_auc".into(), predict.link.auc);
    metrics.insert("predict.link_ap".into(), predict.link.ap);
    metrics.insert("predict.motif_auc".into(), predict.motif.auc);
    metrics.insert("predict.motif_ap".into(), predict.motif.ap);
    Ok(())
}

/// Runs every stage into `out_dir`: census, walk export, views, both
/// generation schemes, per-scheme evaluation, and prediction. The manifest
/// and resolved config record the master seed, so re-running them
/// reproduces the artifacts byte for byte; stage RNG streams key off
/// `(master seed, repetition)`. On stage failure the manifest is still
/// written, flagged `partial`, before the error propagates.
pub fn run_pipeline_once(
    input: &LoadedGraph,
    cfg: &PipelineConfig,
    master_seed: u64,
    repetition: usize,
    out_dir: &Path,
) -> Result<(Manifest, BTreeMap<String, f64>), PipelineError> {
    let stage_seed = seeds::derive(master_seed, "rep", repetition as u64);
    let mut run = RunDir::create(out_dir)?;
    let mut warnings = Vec::new();
    if input.dropped_lines > 0 {
        warnings.push(format!(
            "{} duplicate/self-loop lines dropped during ingestion",
            input.dropped_lines
        ));
    }
    let mut metrics: BTreeMap<String, f64> = BTreeMap::new();
    let mut delta_choice: Option<DeltaChoice> = None;

    let config_toml = {
        let mut resolved = cfg.clone();
        resolved.seed = Some(master_seed);
        resolved.to_toml_string()?
    };
    run.write_artifact("config.toml", "config", config_toml.as_bytes())?;

    let outcome = execute_stages(
        input,
        cfg,
        stage_seed,
        &mut run,
        &mut warnings,
        &mut metrics,
        &mut delta_choice,
    );

    let manifest = Manifest {
        tool: "motifgen".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: master_seed,
        repetition,
        config_sha256: sha256_hex(config_toml.as_bytes()),
        delta: delta_choice.as_ref().map(|c| c.delta),
        delta_overlap: delta_choice.as_ref().and_then(|c| c.overlap),
        partial: outcome.is_err(),
        error: outcome.as_ref().err().map(|e| e.to_string()),
        warnings,
        artifacts: run.artifacts().to_vec(),
    };
    run.finish(&manifest)?;
    outcome.map(|()| (manifest, metrics))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// Aggregates per-repetition metrics into mean ± standard deviation.
pub fn summarize(per_rep: &[BTreeMap<String, f64>]) -> BTreeMap<String, MeanStd> {
    let mut out = BTreeMap::new();
    if per_rep.is_empty() {
        return out;
    }
    let keys: std::collections::BTreeSet<&String> = per_rep.iter().flat_map(|m| m.keys()).collect();
    for key in keys {
        let values: Vec<f64> = per_rep.iter().filter_map(|m| m.get(key)).copied().collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        out.insert(
            key.clone(),
            MeanStd {
                mean,
                std: var.sqrt(),
            },
        );
    }
    out
}

/// Repetition driver: one run per derived seed, each in its own
/// subdirectory when `repeats > 1`, plus a summary report.
pub fn run_pipeline(
    input: &LoadedGraph,
    cfg: &PipelineConfig,
    seed: u64,
    out_dir: &Path,
    repeats: usize,
) -> Result<(), PipelineError> {
    if repeats == 0 {
        return Err(PipelineError::Config("repeats must be at least 1".into()));
    }
    let mut per_rep = Vec::with_capacity(repeats);
    for rep in 0..repeats {
        let dir = if repeats == 1 {
            out_dir.to_path_buf()
        } else {
            out_dir.join(format!("rep_{rep}"))
        };
        let (_, metrics) = run_pipeline_once(input, cfg, seed, rep, &dir)?;
        per_rep.push(metrics);
    }
    if repeats > 1 {
        let summary = summarize(&per_rep);
        let mut bytes = serde_json::to_vec_pretty(&summary)
            .map_err(|e| PipelineError::Serialize(e.to_string()))?;
        bytes.push(b'\n');
        let path = out_dir.join("summary.json");
        fs::write(&path, bytes).map_err(|source| PipelineError::Io { path, source })?;
    }
    Ok(())
}
