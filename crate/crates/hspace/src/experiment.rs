//! Method lists and thread-parallel drivers for the experiment loops.

use hspace_core::baselines::{HybridMode, KatzConfig, SpmConfig};
use hspace_core::embed::EmbeddingConfig;
use hspace_core::eval::{aggregate, run_repetition, EvalReport, ExperimentConfig, MethodSpec};
use hspace_core::geo::{scan_grid, CoordinateSet, GridScan, ScanConfig};
use hspace_core::Graph;
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Names accepted in a method list; `hybrid:<X>` takes any of the
/// non-hybrid ones.
pub const METHOD_NAMES: &[&str] = &["CN", "AA", "RA", "Jaccard", "Katz", "SPM", "HS", "Random", "hybrid:<X>"];

/// Parameters shared by the methods of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodContext {
    pub embedding: EmbeddingConfig,
    pub katz: KatzConfig,
    pub spm: SpmConfig,
    pub hybrid: HybridMode,
    pub seed: u64,
}

fn parse_one(name: &str, ctx: &MethodContext) -> Option<MethodSpec> {
    Some(match name.to_ascii_lowercase().as_str() {
        "cn" => MethodSpec::Cn,
        "aa" => MethodSpec::Aa,
        "ra" => MethodSpec::Ra,
        "jaccard" => MethodSpec::Jaccard,
        "katz" => MethodSpec::Katz(ctx.katz.clone()),
        "spm" => MethodSpec::Spm(ctx.spm.clone()),
        "hs" => MethodSpec::Hs(ctx.embedding.clone()),
        "random" => MethodSpec::Random { seed: ctx.seed },
        _ => return None,
    })
}

/// Parses a comma-separated method list such as `CN,HS,hybrid:RA`.
pub fn parse_methods(list: &str, ctx: &MethodContext) -> Result<Vec<MethodSpec>> {
    let unknown = |name: &str| {
        CliError::usage(format!(
            "unknown method {name:?}; valid methods: {}",
            METHOD_NAMES.join(", ")
        ))
    };
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim) {
        let spec = match name.split_once(':') {
            Some((h, base)) if h.eq_ignore_ascii_case("hybrid") => MethodSpec::Hybrid {
                base: Box::new(parse_one(base, ctx).ok_or_else(|| unknown(name))?),
                hs: ctx.embedding.clone(),
                mode: ctx.hybrid,
            },
            _ => parse_one(name, ctx).ok_or_else(|| unknown(name))?,
        };
        if out.contains(&spec) {
            return Err(CliError::usage(format!("method {name:?} listed twice")));
        }
        out.push(spec);
    }
    Ok(out)
}

/// Thread pool sized by `HS_THREADS` (unset or `0`: one thread per core).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var("HS_THREADS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::usage(format!("HS_THREADS must be a non-negative integer, got {s:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start thread pool: {e}")))
}

/// Same result as the sequential driver: repetitions run concurrently but
/// each draws from its own derived seed, and outcomes are folded in
/// repetition order.
pub fn run_experiment_parallel(
    pool: &rayon::ThreadPool,
    g: &Graph,
    methods: &[MethodSpec],
    cfg: &ExperimentConfig,
) -> Result<Vec<EvalReport>> {
    if cfg.repetitions == 0 {
        return Err(CliError::usage("at least one repetition is required"));
    }
    if methods.is_empty() {
        return Err(CliError::usage("no methods given"));
    }
    let reps: Vec<_> = pool.install(|| {
        (0..cfg.repetitions)
            .into_par_iter()
            .map(|r| run_repetition(g, methods, cfg, r))
            .collect()
    });
    Ok(aggregate(methods, &reps))
}

/// Grid scan with one job per `α` row.
pub fn scan_grid_parallel(
    pool: &rayon::ThreadPool,
    g: &Graph,
    c: &CoordinateSet,
    alphas: &[f64],
    dims: &[usize],
    cfg: &ScanConfig,
) -> Result<GridScan> {
    let rows: Vec<_> = pool.install(|| {
        alphas
            .par_iter()
            .map(|&a| scan_grid(g, c, &[a], dims, cfg))
            .collect()
    });
    let mut values = Vec::with_capacity(alphas.len() * dims.len());
    let mut errors = Vec::new();
    for (ai, row) in rows.into_iter().enumerate() {
        let row = row?;
        values.extend(row.values);
        errors.extend(row.errors.into_iter().map(|(_, di, e)| (ai, di, e)));
    }
    Ok(GridScan {
        alphas: alphas.to_vec(),
        dims: dims.to_vec(),
        values,
        errors,
    })
}
