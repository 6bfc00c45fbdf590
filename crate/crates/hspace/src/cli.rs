//! The `hspace` command line: argument definitions and one function per
//! subcommand.
//!
//! Every setting can come from a flag, from the `--config` file (same name
//! without dashes) or from its default, in that order of precedence. The
//! resolved settings are written at the top of each output file, and
//! reruns with the same settings produce identical bytes.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use hspace_core::baselines::{HybridMode, KatzConfig, SpmConfig, HYBRID_EPS};
use hspace_core::embed::{embed, select_params, EmbeddingConfig, Solver, TuneConfig};
use hspace_core::eval::{random_split, EvalReport, ExperimentConfig};
use hspace_core::geo::{Metric, ScanConfig, DEFAULT_PAIR_BUDGET};
use hspace_core::graph::LabeledGraph;
use hspace_core::model::{generate, ModelParams, MuMode};
use hspace_core::rng::derive_seed;
use hspace_core::theory::{theoretical_auc_with_error, EndpointWeighting, P2Mode, TheoryModel, TheoryParams};
use hspace_core::NodeIdMap;
use serde_json::json;

use crate::config::{parse_dim_grid, parse_real_grid, Settings};
use crate::error::{CliError, Result};
use crate::experiment::{parse_methods, run_experiment_parallel, scan_grid_parallel, thread_pool, MethodContext};
use crate::io::{
    create_output, fmt_f64, read_coordinates, read_edge_list, write_edge_list, write_json, write_node_map,
    write_positions, write_table, Metadata, ParseOptions,
};

macro_rules! keyword_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq)]
        pub enum $name {
            $($variant),+
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s.to_ascii_lowercase().as_str() {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!("expected one of: {}", [$($text),+].join(", "))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self {
                    $($name::$variant => $text),+
                })
            }
        }
    };
}

keyword_enum!(
    /// Output encoding of result tables.
    Format { Csv => "csv", Json => "json" }
);
keyword_enum!(
    /// `long`: one row per method. `wide`: one row per metric, one column
    /// per method.
    Layout { Long => "long", Wide => "wide" }
);
keyword_enum!(SolverArg { Auto => "auto", Dense => "dense", Lanczos => "lanczos" });
keyword_enum!(MetricArg { Euclidean => "euclidean", Haversine => "haversine" });
keyword_enum!(HybridArg { Quotient => "quotient", Product => "product" });
keyword_enum!(
    /// `relative`: `katz-alpha` is a fraction of `1/λ_max`. `absolute`: it
    /// is the attenuation itself.
    KatzScale { Relative => "relative", Absolute => "absolute" }
);
keyword_enum!(P2Arg { Corrected => "corrected", AsWritten => "as-written" });
keyword_enum!(WeightingArg { SizeBiased => "size-biased", Plain => "plain" });

/// `calibrated`, `literal`, or a positive number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuArg(pub MuMode);

impl FromStr for MuArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "calibrated" => Ok(MuArg(MuMode::Calibrated)),
            "literal" => Ok(MuArg(MuMode::Literal)),
            t => match t.parse::<f64>() {
                Ok(x) if x > 0.0 && x.is_finite() => Ok(MuArg(MuMode::Fixed(x))),
                _ => Err("expected calibrated, literal or a positive number".into()),
            },
        }
    }
}

impl fmt::Display for MuArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            MuMode::Calibrated => f.write_str("calibrated"),
            MuMode::Literal => f.write_str("literal"),
            MuMode::Fixed(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hspace", version, about = "Hidden-space embedding and link prediction for undirected networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed the giant component of a network and write its coordinates.
    Embed(EmbedArgs),
    /// Compare link-prediction methods on repeated train/probe splits.
    Evaluate(EvaluateArgs),
    /// Draw a network from the geometric scale-free model.
    Generate(GenerateArgs),
    /// Spearman correlation of hidden and real distances over an (α, d) grid.
    Correlate(CorrelateArgs),
    /// Predicted AUC of distance-based prediction in the geometric model.
    Theory(TheoryArgs),
    /// Pick (α, d) maximising HS AUC on a validation split.
    Tune(TuneArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat `key = value` settings file; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge list: two node labels per line, `%` and `#` comment lines.
    #[arg(value_name = "EDGES")]
    pub input: PathBuf,
    /// Field separator (default: whitespace).
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Reject non-integer node labels.
    #[arg(long)]
    pub numeric_only: bool,
}

#[derive(Debug, Args)]
pub struct EmbedOpts {
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of hidden coordinates.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub eig_tol: Option<f64>,
    #[arg(long)]
    pub solver: Option<SolverArg>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub embed: EmbedOpts,
    #[command(flatten)]
    pub common: Common,
    /// Output prefix: writes PREFIX.coords.csv, PREFIX.eigen.json and
    /// PREFIX.nodes.csv.
    #[arg(long, value_name = "PREFIX")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableOut {
    #[arg(long)]
    pub format: Option<Format>,
    /// Output file (default: standard output).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub embed: EmbedOpts,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: TableOut,
    /// Comma-separated list from CN, AA, RA, Jaccard, Katz, SPM, HS, Random
    /// and hybrid:<X>.
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long)]
    pub probe_fraction: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Sampled AUC comparisons per repetition (default: min(10^6, 1000·|probe|)).
    #[arg(long)]
    pub auc_comparisons: Option<usize>,
    /// Skip precision (saves one pass over all non-edges per method).
    #[arg(long)]
    pub no_precision: bool,
    #[arg(long)]
    pub katz_alpha: Option<f64>,
    #[arg(long)]
    pub katz_scale: Option<KatzScale>,
    #[arg(long)]
    pub spm_fraction: Option<f64>,
    #[arg(long)]
    pub spm_reps: Option<usize>,
    #[arg(long)]
    pub hybrid_mode: Option<HybridArg>,
    /// Offset added to the hidden distance in quotient mode.
    #[arg(long)]
    pub hybrid_eps: Option<f64>,
    #[arg(long)]
    pub layout: Option<Layout>,
    /// Row label in the wide layout (default: input file stem).
    #[arg(long)]
    pub network: Option<String>,
}

#[derive(Debug, Args)]
pub struct ModelOpts {
    /// Number of generated nodes before isolated ones are removed.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub k0: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub mean_degree: Option<f64>,
    /// Kernel scale: calibrated, literal, or a number.
    #[arg(long)]
    pub mu: Option<MuArg>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub model: ModelOpts,
    /// Dimension of the unit hypercube.
    #[arg(long)]
    pub space_dim: Option<usize>,
    #[command(flatten)]
    pub common: Common,
    /// Output prefix: writes PREFIX.edges.txt and PREFIX.coords.csv.
    #[arg(long, value_name = "PREFIX")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridOpts {
    /// α grid, `start:step:end` or a comma list.
    #[arg(long)]
    pub alphas: Option<String>,
    /// Dimension grid, `start:end`, `start:step:end` or a comma list.
    #[arg(long)]
    pub dims: Option<String>,
    #[arg(long)]
    pub eig_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Node positions: `label,x1,…,xD` rows.
    #[arg(long, value_name = "FILE")]
    pub coords: PathBuf,
    #[command(flatten)]
    pub grid: GridOpts,
    #[arg(long)]
    pub metric: Option<MetricArg>,
    /// Node pairs compared; larger graphs are subsampled.
    #[arg(long)]
    pub pair_budget: Option<usize>,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: TableOut,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub model: ModelOpts,
    /// Evaluate over a β grid instead of the single `--beta`.
    #[arg(long)]
    pub betas: Option<String>,
    #[arg(long)]
    pub p2_mode: Option<P2Arg>,
    #[arg(long)]
    pub weighting: Option<WeightingArg>,
    #[arg(long)]
    pub panels: Option<usize>,
    #[arg(long)]
    pub degree_panels: Option<usize>,
    #[arg(long)]
    pub tail_mass: Option<f64>,
    /// Also report the change under doubled quadrature resolution.
    #[arg(long)]
    pub check_resolution: bool,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: TableOut,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridOpts,
    #[arg(long)]
    pub probe_fraction: Option<f64>,
    /// Non-edges per probe edge in the validation AUC.
    #[arg(long)]
    pub non_edge_factor: Option<usize>,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: TableOut,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Embed(a) => cmd_embed(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Correlate(a) => cmd_correlate(a),
        Command::Theory(a) => cmd_theory(a),
        Command::Tune(a) => cmd_tune(a),
    }
}

fn load_input(s: &mut Settings, a: &InputArgs) -> Result<LabeledGraph> {
    s.record("input", a.input.display());
    let delimiter = s.optional("delimiter", a.delimiter)?;
    let numeric_only = s.value("numeric-only", a.numeric_only.then_some(true), false)?;
    let opts = ParseOptions {
        delimiter,
        numeric_only,
        ..ParseOptions::default()
    };
    Ok(read_edge_list(&a.input, &opts)?.giant_component())
}

fn embedding_config(s: &mut Settings, e: &EmbedOpts) -> Result<EmbeddingConfig> {
    let mut cfg = EmbeddingConfig::new(s.value("alpha", e.alpha, 1.0)?, s.value("dim", e.dim, 3)?);
    cfg.eig_tol = s.value("eig-tol", e.eig_tol, cfg.eig_tol)?;
    cfg.solver = match s.value("solver", e.solver, SolverArg::Auto)? {
        SolverArg::Auto => Solver::Auto,
        SolverArg::Dense => Solver::Dense,
        SolverArg::Lanczos => Solver::Lanczos,
    };
    Ok(cfg)
}

/// Output paths are not part of the recorded settings, so the same run
/// written to two places produces the same bytes.
fn out_path(s: &mut Settings, flag: Option<PathBuf>) -> Result<Option<PathBuf>> {
    let p = s.optional::<String>("out", flag.map(|p| p.display().to_string()))?;
    Ok(p.map(PathBuf::from))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn finish(mut s: Settings, command: &str) -> Result<Metadata> {
    s.forget("out");
    Ok(Metadata::new(command, s.finish()?))
}

fn write_result(
    out: Option<&Path>,
    format: Format,
    meta: &Metadata,
    header: &[String],
    rows: &[Vec<String>],
    json_body: serde_json::Value,
) -> Result<()> {
    let w = create_output(out)?;
    match format {
        Format::Csv => write_table(w, meta, header, rows),
        Format::Json => write_json(w, meta, json_body),
    }
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn cmd_embed(a: EmbedArgs) -> Result<()> {
    let mut s = Settings::load(a.common.config.as_deref())?;
    let g = load_input(&mut s, &a.input)?;
    let cfg = embedding_config(&mut s, &a.embed)?;
    s.value("seed", a.common.seed, 0u64)?;
    let prefix = out_path(&mut s, a.out)?.ok_or_else(|| CliError::usage("embed needs --out PREFIX"))?;
    let meta = finish(s, "embed")?;

    let e = embed(&g.graph, &cfg)?;
    let columns: Vec<String> = (1..=e.dim()).map(|i| format!("c{i}")).collect();
    write_positions(
        create_output(Some(&with_suffix(&prefix, ".coords.csv")))?,
        &meta,
        &g.labels,
        &columns,
        |i| e.coords(i),
    )?;
    write_json(
        create_output(Some(&with_suffix(&prefix, ".eigen.json")))?,
        &meta,
        json!({
            "nodes": g.graph.node_count(),
            "edges": g.graph.edge_count(),
            "eigenvalues": e.eigenvalues(),
            "max_residual": e.max_residual(),
        }),
    )?;
    write_node_map(create_output(Some(&with_suffix(&prefix, ".nodes.csv")))?, &g.labels, Some(&meta))
}

fn report_json(r: &EvalReport) -> serde_json::Value {
    json!({
        "method": r.method,
        "auc": r.auc,
        "auc_stderr": r.auc_stderr,
        "precision": r.precision,
        "precision_stderr": r.precision_stderr,
        "n_comparisons": r.n_comparisons,
        "repetitions": r.repetitions,
        "error": r.error,
    })
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let mut s = Settings::load(a.common.config.as_deref())?;
    let g = load_input(&mut s, &a.input)?;
    let embedding = embedding_config(&mut s, &a.embed)?;
    let seed = s.value("seed", a.common.seed, 0u64)?;
    let katz = KatzConfig {
        katz_alpha: s.value("katz-alpha", a.katz_alpha, KatzConfig::default().katz_alpha)?,
        auto_scale: s.value("katz-scale", a.katz_scale, KatzScale::Relative)? == KatzScale::Relative,
        ..KatzConfig::default()
    };
    let spm_default = SpmConfig::default();
    let spm = SpmConfig {
        perturb_fraction: s.value("spm-fraction", a.spm_fraction, spm_default.perturb_fraction)?,
        repetitions: s.value("spm-reps", a.spm_reps, spm_default.repetitions)?,
        seed,
        ..spm_default
    };
    let hybrid = match s.value("hybrid-mode", a.hybrid_mode, HybridArg::Quotient)? {
        HybridArg::Product => HybridMode::Product,
        HybridArg::Quotient => HybridMode::Quotient {
            eps: s.value("hybrid-eps", a.hybrid_eps, HYBRID_EPS)?,
        },
    };
    let ctx = MethodContext {
        embedding,
        katz,
        spm,
        hybrid,
        seed,
    };
    let methods = parse_methods(&s.value("methods", a.methods, "CN,AA,RA,Jaccard,Katz,SPM,HS".to_string())?, &ctx)?;
    let cfg = ExperimentConfig {
        probe_fraction: s.value("probe-fraction", a.probe_fraction, 0.1)?,
        repetitions: s.value("reps", a.reps, 10)?,
        seed,
        auc_comparisons: s.optional("auc-comparisons", a.auc_comparisons)?,
        precision: !s.value("no-precision", a.no_precision.then_some(true), false)?,
    };
    let format = s.value("format", a.output.format, Format::Csv)?;
    let layout = s.value("layout", a.layout, Layout::Long)?;
    let stem = a.input.input.file_stem().map_or("network".into(), |x| x.to_string_lossy().into_owned());
    let network = s.value("network", a.network, stem)?;
    let out = out_path(&mut s, a.output.out)?;
    let meta = finish(s, "evaluate")?;

    let pool = thread_pool()?;
    let reports = run_experiment_parallel(&pool, &g.graph, &methods, &cfg)?;

    let (header, rows) = match layout {
        Layout::Long => (
            strings([
                "network",
                "method",
                "auc",
                "auc_stderr",
                "precision",
                "precision_stderr",
                "n_comparisons",
                "repetitions",
                "error",
            ]),
            reports
                .iter()
                .map(|r| {
                    vec![
                        network.clone(),
                        r.method.clone(),
                        fmt_f64(r.auc),
                        fmt_f64(r.auc_stderr),
                        fmt_f64(r.precision),
                        fmt_f64(r.precision_stderr),
                        r.n_comparisons.to_string(),
                        r.repetitions.to_string(),
                        r.error.clone().unwrap_or_default(),
                    ]
                })
                .collect(),
        ),
        Layout::Wide => {
            let mut header = strings(["network", "metric"]);
            header.extend(reports.iter().map(|r| r.method.clone()));
            let row = |metric: &str, f: &dyn Fn(&EvalReport) -> f64| {
                let mut r = vec![network.clone(), metric.to_string()];
                r.extend(reports.iter().map(|x| fmt_f64(f(x))));
                r
            };
            (header, vec![row("auc", &|r| r.auc), row("precision", &|r| r.precision)])
        }
    };
    let body = json!({
        "network": network,
        "nodes": g.graph.node_count(),
        "edges": g.graph.edge_count(),
        "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
    });
    write_result(out.as_deref(), format, &meta, &header, &rows, body)?;
    match reports.iter().find_map(|r| r.error.as_ref().map(|e| (&r.method, e))) {
        Some((m, e)) => Err(CliError::Compute(hspace_core::Error::InvalidConfig(format!(
            "method {m} failed: {e}"
        )))),
        None => Ok(()),
    }
}

fn model_params(s: &mut Settings, m: &ModelOpts, seed: u64) -> Result<ModelParams> {
    let d = ModelParams::default();
    Ok(ModelParams {
        n: s.value("nodes", m.nodes, d.n)?,
        gamma: s.value("gamma", m.gamma, d.gamma)?,
        k0: s.value("k0", m.k0, d.k0)?,
        beta: s.value("beta", m.beta, d.beta)?,
        mean_degree: s.value("mean-degree", m.mean_degree, d.mean_degree)?,
        mu: s.value("mu", m.mu, MuArg(d.mu))?.0,
        seed,
        ..d
    })
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let mut s = Settings::load(a.common.config.as_deref())?;
    let seed = s.value("seed", a.common.seed, 0u64)?;
    let mut params = model_params(&mut s, &a.model, seed)?;
    params.dim = s.value("space-dim", a.space_dim, params.dim)?;
    let prefix = out_path(&mut s, a.out)?.ok_or_else(|| CliError::usage("generate needs --out PREFIX"))?;
    params.validate()?;
    let mut meta = finish(s, "generate")?;

    let inst = generate(&params)?;
    meta.config.insert("resolved-mu".into(), fmt_f64(inst.mu));
    let labels = NodeIdMap::from_ordered(inst.original_ids.iter().map(|i| i.to_string()).collect());
    let g = LabeledGraph {
        graph: inst.graph,
        labels,
    };
    let edges_path = with_suffix(&prefix, ".edges.txt");
    write_edge_list(create_output(Some(&edges_path))?, &g, Some(&meta)).map_err(|e| CliError::io(&edges_path, e))?;
    let columns: Vec<String> = match params.dim {
        1 => strings(["x"]),
        2 => strings(["x", "y"]),
        3 => strings(["x", "y", "z"]),
        d => (1..=d).map(|i| format!("x{i}")).collect(),
    };
    write_positions(
        create_output(Some(&with_suffix(&prefix, ".coords.csv")))?,
        &meta,
        &g.labels,
        &columns,
        |i| inst.coords.position(i),
    )
}

fn cmd_correlate(a: CorrelateArgs) -> Result<()> {
    let mut s = Settings::load(a.common.config.as_deref())?;
    let g = load_input(&mut s, &a.input)?;
    s.record("coords", a.coords.display());
    let alphas = parse_real_grid(&s.value("alphas", a.grid.alphas, "0:0.05:2".to_string())?)?;
    let dims = parse_dim_grid(&s.value("dims", a.grid.dims, "1:40".to_string())?)?;
    let metric = match s.value("metric", a.metric, MetricArg::Euclidean)? {
        MetricArg::Euclidean => Metric::Euclidean,
        MetricArg::Haversine => Metric::Haversine,
    };
    let cfg = ScanConfig {
        pair_budget: s.value("pair-budget", a.pair_budget, DEFAULT_PAIR_BUDGET)?,
        seed: s.value("seed", a.common.seed, 0u64)?,
        eig_tol: s.value("eig-tol", a.grid.eig_tol, 1e-8)?,
    };
    let format = s.value("format", a.output.format, Format::Csv)?;
    let out = out_path(&mut s, a.output.out)?;
    let meta = finish(s, "correlate")?;

    let coords = read_coordinates(&a.coords, &g.labels, metric)?;
    let pool = thread_pool()?;
    let scan = scan_grid_parallel(&pool, &g.graph, &coords, &alphas, &dims, &cfg)?;

    let mut header = vec!["alpha".to_string()];
    header.extend(dims.iter().map(|d| format!("d={d}")));
    let rows: Vec<Vec<String>> = alphas
        .iter()
        .enumerate()
        .map(|(ai, a)| {
            let mut r = vec![fmt_f64(*a)];
            r.extend((0..dims.len()).map(|di| fmt_f64(scan.get(ai, di))));
            r
        })
        .collect();
    let best = scan.argmax();
    let body = json!({
        "alphas": alphas,
        "dims": dims,
        "spearman": (0..alphas.len())
            .map(|ai| (0..dims.len()).map(|di| scan.get(ai, di)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "argmax": best.map(|(a, d, v)| json!({"alpha": a, "dim": d, "spearman": v})),
        "errors": scan.errors.iter().map(|(ai, di, e)| json!({
            "alpha": alphas[*ai],
            "dim": dims[*di],
            "error": e,
        })).collect::<Vec<_>>(),
    });
    write_result(out.as_deref(), format, &meta, &header, &rows, body)?;
    if best.is_none() {
        let why = scan.errors.first().map_or(String::new(), |e| e.2.clone());
        return Err(CliError::Compute(hspace_core::Error::InvalidConfig(format!(
            "no grid cell could be evaluated: {why}"
        ))));
    }
    Ok(())
}

fn cmd_theory(a: TheoryArgs) -> Result<()> {
    let mut s = Settings::load(a.common.config.as_deref())?;
    let seed = s.value("seed", a.common.seed, 0u64)?;
    let m = model_params(&mut s, &a.model, seed)?;
    let d = TheoryParams::default();
    let params = TheoryParams {
        gamma: m.gamma,
        k0: m.k0,
        beta: m.beta,
        mean_degree: m.mean_degree,
        n: m.n,
        mu: m.mu,
        p2_mode: match s.value("p2-mode", a.p2_mode, P2Arg::Corrected)? {
            P2Arg::Corrected => P2Mode::Corrected,
            P2Arg::AsWritten => P2Mode::AsWritten,
        },
        weighting: match s.value("weighting", a.weighting, WeightingArg::SizeBiased)? {
            WeightingArg::SizeBiased => EndpointWeighting::SizeBiased,
            WeightingArg::Plain => EndpointWeighting::Plain,
        },
        panels: s.value("panels", a.panels, d.panels)?,
        degree_panels: s.value("degree-panels", a.degree_panels, d.degree_panels)?,
        tail_mass: s.value("tail-mass", a.tail_mass, d.tail_mass)?,
    };
    let betas = match s.optional("betas", a.betas)? {
        Some(g) => parse_real_grid(&g)?,
        None => vec![params.beta],
    };
    let check = s.value("check-resolution", a.check_resolution.then_some(true), false)?;
    let format = s.value("format", a.output.format, Format::Csv)?;
    let out = out_path(&mut s, a.output.out)?;
    let meta = finish(s, "theory")?;

    let pool = thread_pool()?;
    let results: Vec<Result<(f64, f64, f64)>> = pool.install(|| {
        use rayon::prelude::*;
        betas
            .par_iter()
            .map(|&beta| {
                let p = TheoryParams { beta, ..params.clone() };
                let mu = TheoryModel::new(&p)?.mu();
                let (auc, delta) = if check {
                    theoretical_auc_with_error(&p)?
                } else {
                    (TheoryModel::new(&p)?.auc()?, f64::NAN)
                };
                Ok((mu, auc, delta))
            })
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut header = strings(["beta", "mu", "auc"]);
    if check {
        header.push("resolution_delta".into());
    }
    let rows: Vec<Vec<String>> = betas
        .iter()
        .zip(&results)
        .map(|(b, (mu, auc, delta))| {
            let mut r = vec![fmt_f64(*b), fmt_f64(*mu), fmt_f64(*auc)];
            if check {
                r.push(fmt_f64(*delta));
            }
            r
        })
        .collect();
    let body = json!({
        "curve": betas.iter().zip(&results).map(|(b, (mu, auc, delta))| {
            let mut o = json!({"beta": b, "mu": mu, "auc": auc});
            if check {
                o["resolution_delta"] = json!(delta);
            }
            o
        }).collect::<Vec<_>>(),
    });
    write_result(out.as_deref(), format, &meta, &header, &rows, body)
}

fn cmd_tune(a: TuneArgs) -> Result<()> {
    let mut s = Settings::load(a.common.config.as_deref())?;
    let g = load_input(&mut s, &a.input)?;
    let alphas = parse_real_grid(&s.value("alphas", a.grid.alphas, "0:0.05:2".to_string())?)?;
    let dims = parse_dim_grid(&s.value("dims", a.grid.dims, "1:40".to_string())?)?;
    let probe_fraction = s.value("probe-fraction", a.probe_fraction, 0.1)?;
    let seed = s.value("seed", a.common.seed, 0u64)?;
    let cfg = TuneConfig {
        eig_tol: s.value("eig-tol", a.grid.eig_tol, 1e-8)?,
        seed: derive_seed(seed, 1),
        non_edge_factor: s.value("non-edge-factor", a.non_edge_factor, 10)?,
    };
    let format = s.value("format", a.output.format, Format::Csv)?;
    let out = out_path(&mut s, a.output.out)?;
    let meta = finish(s, "tune")?;

    let split = random_split(&g.graph, probe_fraction, derive_seed(seed, 0))?;
    let r = select_params(&split, &alphas, &dims, &cfg)?;

    let header = strings(["kind", "alpha", "dim", "auc"]);
    let mut rows = vec![vec!["selected".into(), fmt_f64(r.alpha), r.dim.to_string(), fmt_f64(r.auc)]];
    rows.extend(
        r.alpha_profile
            .iter()
            .map(|(a, auc)| vec!["alpha_profile".into(), fmt_f64(*a), r.scan_dim.to_string(), fmt_f64(*auc)]),
    );
    rows.extend(
        r.dim_profile
            .iter()
            .map(|(d, auc)| vec!["dim_profile".into(), fmt_f64(r.alpha), d.to_string(), fmt_f64(*auc)]),
    );
    let body = json!({
        "selected": {"alpha": r.alpha, "dim": r.dim, "auc": r.auc},
        "alpha_profile": r.alpha_profile.iter().map(|(a, auc)| json!({"alpha": a, "dim": r.scan_dim, "auc": auc})).collect::<Vec<_>>(),
        "dim_profile": r.dim_profile.iter().map(|(d, auc)| json!({"alpha": r.alpha, "dim": d, "auc": auc})).collect::<Vec<_>>(),
    });
    write_result(out.as_deref(), format, &meta, &header, &rows, body)
}
