use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use motifgen::census::{census3, edge_participation};
use motifgen::combine::{average_scores, mmgan_assemble, sample_edges_by_score, ViewSet};
use motifgen::graph::parse_edge_list;
use motifgen::pipeline::{
    build_views, census_stage, edge_list_bytes, evaluate_stage, load_input, predict_stage,
    run_pipeline, sha256_hex, PipelineConfig, PipelineError, PredictMatrix,
};
use motifgen::score::ScoreMatrix;
use motifgen::seeds::derive as seeds_derive;
use motifgen::walk::{motif_biased_weights, read_walks, sample_walks, write_walks, BiasKind};
use serde::Serialize;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "motifgen",
    version,
    about = "Generate graphs that preserve 3-node motif statistics via multi-view biased random walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BiasArg {
    None,
    V,
    T,
}

impl From<BiasArg> for BiasKind {
    fn from(value: BiasArg) -> Self {
        match value {
            BiasArg::None => BiasKind::None,
            BiasArg::V => BiasKind::TowardV,
            BiasArg::T => BiasKind::TowardT,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum SchemeArg {
    Avg,
    Mmgan,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixArg {
    S1,
    Avg,
}

#[derive(Subcommand)]
enum Command {
    /// Motif census of the input's largest connected component
    Census {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Output JSON path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        baseline_samples: usize,
        /// Rewiring budget per baseline sample, as a multiple of |E|
        #[arg(long, default_value_t = 10)]
        swap_factor: usize,
    },
    /// Sample second-order biased walks and export them
    Walks {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = BiasArg::None)]
        bias: BiasArg,
        /// Number of walks; derived from --steps-factor when omitted
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 100.0)]
        steps_factor: f64,
        #[arg(long, default_value_t = 16)]
        length: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the three view score matrices (s1/s2/s3.scores)
    Views {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// Directory with externally generated s1/s2/s3.walks files; when
        /// given, score matrices are built from those walks directly
        #[arg(long)]
        from_walks: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 100.0)]
        steps_factor: f64,
        #[arg(long, default_value_t = 16)]
        length: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
    /// Generate an output graph from the views
    Generate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Directory with prebuilt s1/s2/s3.scores; views are rebuilt when
        /// omitted
        #[arg(long)]
        views: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 100.0)]
        steps_factor: f64,
        #[arg(long, default_value_t = 16)]
        length: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 1.0 / 6.0)]
        p1: f64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        p2: f64,
        #[arg(long, default_value_t = 0.5)]
        p3: f64,
        #[arg(long, default_value_t = 0.25)]
        p_s: f64,
    },
    /// Compare a generated graph's motif statistics against the input
    Evaluate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        generated: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Link and motif prediction on a holdout split
    Predict {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        #[arg(long, value_enum, default_value_t = MatrixArg::Avg)]
        matrix: MatrixArg,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 100.0)]
        steps_factor: f64,
        #[arg(long, default_value_t = 16)]
        length: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline: census, walks, views, both schemes, evaluation,
    /// prediction, manifest
    Pipeline {
        #[arg(long)]
        input: PathBuf,
        /// Master seed; may also come from the config file
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// TOML config; CLI flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Fixed Markov smoothing, disabling grid tuning
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        steps_factor: Option<f64>,
        #[arg(long)]
        test_fraction: Option<f64>,
    },
}

#[derive(Serialize)]
struct GenerateManifest {
    scheme: String,
    seed: u64,
    target_edges: usize,
    p1: f64,
    p2: f64,
    p3: f64,
    p_s: f64,
    view_sha256: [String; 3],
    output_sha256: String,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| PipelineError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    fs::write(path, bytes).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), PipelineError> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| PipelineError::Serialize(e.to_string()))?;
    bytes.push(b'\n');
    match out {
        Some(path) => write_output(path, &bytes),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|source| PipelineError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn walk_flags_config(
    p: f64,
    q: f64,
    length: usize,
    steps_factor: f64,
    delta: Option<f64>,
) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = PipelineConfig::default();
    cfg.walk.p = p;
    cfg.walk.q = q;
    cfg.walk.walk_length = length;
    cfg.walk.steps_factor = steps_factor;
    cfg.walk.delta = delta;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Census {
            input,
            seed,
            out,
            baseline_samples,
            swap_factor,
        } => {
            let loaded = load_input(&input)?;
            let mut cfg = PipelineConfig::default();
            cfg.eval.baseline_samples = baseline_samples;
            cfg.eval.baseline_swap_factor = swap_factor;
            let report = census_stage(&loaded.graph, &cfg, seed)?;
            emit_json(out.as_deref(), &report)
        }
        Command::Walks {
            input,
            seed,
            bias,
            count,
            steps_factor,
            length,
            p,
            q,
            out,
        } => {
            let loaded = load_input(&input)?;
            let cfg = walk_flags_config(p, q, length, steps_factor, None)?;
            let walk_cfg = cfg.walk_config()?;
            let weights = motif_biased_weights(
                &edge_participation(&loaded.graph),
                &census3(&loaded.graph),
                bias.into(),
            )?;
            let count = count.unwrap_or_else(|| cfg.walk_budget(&loaded.graph).0);
            let walks = sample_walks(&loaded.graph, &weights, &walk_cfg, count, seed)?;
            let mut bytes = Vec::new();
            write_walks(&walks, &loaded.ids, &mut bytes)?;
            write_output(&out, &bytes)
        }
        Command::Views {
            input,
            seed,
            delta,
            from_walks,
            out_dir,
            steps_factor,
            length,
            p,
            q,
        } => {
            let loaded = load_input(&input)?;
            fs::create_dir_all(&out_dir).map_err(|source| PipelineError::Io {
                path: out_dir.clone(),
                source,
            })?;
            let views = match from_walks {
                Some(dir) => {
                    let mut matrices = Vec::with_capacity(3);
                    for name in ["s1", "s2", "s3"] {
                        let path = dir.join(format!("{name}.walks"));
                        let file = fs::File::open(&path).map_err(|source| PipelineError::Io {
                            path: path.clone(),
                            source,
                        })?;
                        let walks = read_walks(BufReader::new(file), &loaded.ids)?;
                        matrices.push(ScoreMatrix::from_walks(&walks, loaded.graph.node_count())?);
                    }
                    let s3 = matrices.pop().expect("three views");
                    let s2 = matrices.pop().expect("three views");
                    let s1 = matrices.pop().expect("three views");
                    ViewSet::new(s1, s2, s3)?
                }
                None => {
                    let cfg = walk_flags_config(p, q, length, steps_factor, Some(delta))?;
                    build_views(&loaded.graph, &cfg, delta, seed)?
                }
            };
            for (name, view) in [("s1", &views.s1), ("s2", &views.s2), ("s3", &views.s3)] {
                let mut bytes = Vec::new();
                view.write(&loaded.ids, &mut bytes)?;
                write_output(&out_dir.join(format!("{name}.scores")), &bytes)?;
            }
            Ok(())
        }
        Command::Generate {
            input,
            seed,
            scheme,
            views,
            out,
            delta,
            steps_factor,
            length,
            p,
            q,
            p1,
            p2,
            p3,
            p_s,
        } => {
            let loaded = load_input(&input)?;
            let view_set = match views {
                Some(dir) => {
                    let mut matrices = Vec::with_capacity(3);
                    for name in ["s1", "s2", "s3"] {
                        let path = dir.join(format!("{name}.scores"));
                        let file = fs::File::open(&path).map_err(|source| PipelineError::Io {
                            path: path.clone(),
                            source,
                        })?;
                        matrices.push(ScoreMatrix::read(BufReader::new(file), &loaded.ids)?);
                    }
                    let s3 = matrices.pop().expect("three views");
                    let s2 = matrices.pop().expect("three views");
                    let s1 = matrices.pop().expect("three views");
                    ViewSet::new(s1, s2, s3)?
                }
                None => {
                    let cfg = walk_flags_config(p, q, length, steps_factor, Some(delta))?;
                    build_views(&loaded.graph, &cfg, delta, seed)?
                }
            };
            let target = loaded.graph.edge_count();
            let generated = match scheme {
                SchemeArg::Avg => {
                    let averaged = average_scores(&view_set);
                    sample_edges_by_score(&averaged, target, seeds_derive(seed, "generate-avg", 0))?
                }
                SchemeArg::Mmgan => {
                    let combine_cfg =
                        motifgen::combine::CombineConfig::new(p1, p2, p3, p_s, target)?;
                    mmgan_assemble(
                        &view_set,
                        &combine_cfg,
                        seeds_derive(seed, "generate-mmgan", 0),
                    )?
                }
            };
            let bytes = edge_list_bytes(&generated, &loaded.ids)?;
            write_output(&out, &bytes)?;

            let view_sha256 = [&view_set.s1, &view_set.s2, &view_set.s3].map(|s| {
                let mut buf = Vec::new();
                s.write(&loaded.ids, &mut buf).expect("in-memory write");
                sha256_hex(&buf)
            });
            let manifest = GenerateManifest {
                scheme: match scheme {
                    SchemeArg::Avg => "avg".into(),
                    SchemeArg::Mmgan => "mmgan".into(),
                },
                seed,
                target_edges: target,
                p1,
                p2,
                p3,
                p_s,
                view_sha256,
                output_sha256: sha256_hex(&bytes),
            };
            let manifest_path = out.with_extension("manifest.json");
            emit_json(Some(&manifest_path), &manifest)
        }
        Command::Evaluate {
            input,
            generated,
            out,
        } => {
            let loaded = load_input(&input)?;
            // the generated graph is evaluated as-is, without LCC extraction
            let file = fs::File::open(&generated).map_err(|source| PipelineError::Io {
                path: generated.clone(),
                source,
            })?;
            let parsed = parse_edge_list(BufReader::new(file))?;
            let report = evaluate_stage(&loaded.graph, &parsed.graph);
            emit_json(out.as_deref(), &report)
        }
        Command::Predict {
            input,
            seed,
            test_fraction,
            matrix,
            delta,
            steps_factor,
            length,
            p,
            q,
            out,
        } => {
            let loaded = load_input(&input)?;
            let mut cfg = walk_flags_config(p, q, length, steps_factor, Some(delta))?;
            cfg.eval.test_fraction = test_fraction;
            cfg.validate()?;
            let matrix = match matrix {
                MatrixArg::S1 => PredictMatrix::S1,
                MatrixArg::Avg => PredictMatrix::Avg,
            };
            let (report, warnings) = predict_stage(&loaded.graph, &cfg, delta, matrix, seed)?;
            for warning in warnings {
                eprintln!("warning: {warning}");
            }
            emit_json(out.as_deref(), &report)
        }
        Command::Pipeline {
            input,
            seed,
            out,
            config,
            repeats,
            delta,
            steps_factor,
            test_fraction,
        } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|source| PipelineError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    PipelineConfig::from_toml_str(&text)?
                }
                None => PipelineConfig::default(),
            };
            if let Some(seed) = seed {
                cfg.seed = Some(seed);
            }
            if let Some(delta) = delta {
                cfg.walk.delta = Some(delta);
            }
            if let Some(factor) = steps_factor {
                cfg.walk.steps_factor = factor;
            }
            if let Some(fraction) = test_fraction {
                cfg.eval.test_fraction = fraction;
            }
            cfg.validate()?;
            let seed = cfg.seed.ok_or_else(|| {
                PipelineError::Config("a seed is required (--seed or config file)".into())
            })?;
            let loaded = load_input(&input)?;
            run_pipeline(&loaded, &cfg, seed, &out, repeats)
        }
    }
}
