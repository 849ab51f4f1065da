use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use idim::cache::DiskCache;
use idim::csvio::{format_f64, read_dataset, write_atomic, write_dataset_to, write_table_to};
use idim::report::{Bundle, EstimateEntry, EstimateReport, SCHEMA_VERSION, TOOL, TOOL_VERSION};
use idim::runner::{analyze, fit_timings, run_suite_parallel, time_grid, InstantClock, Timing};
use idim::{Error, Result};
use idim_core::datasets::{benchmark_suite, generate, ManifoldSpec, REGISTRY};
use idim_core::local::{default_local_k, local_estimate};
use idim_core::pipeline::{cell_seed, preprocess, Clock, PreprocessConfig, SuiteConfig};
use idim_core::{estimate_with, Dataset, EstimatorParams, Method};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "idim",
    version,
    about = "Intrinsic dimension estimation for point clouds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate global IDs of one CSV dataset.
    Estimate(EstimateArgs),
    /// Estimate the ID of every point's k-NN neighbourhood.
    Local(LocalArgs),
    /// Generate a synthetic manifold with known ID.
    Generate(GenerateArgs),
    /// Run every method on a corpus and derive consensus and correlations.
    Benchmark(BenchmarkArgs),
    /// Fit T = c * N_obj^alpha * N_var^beta to timings.
    RuntimeModel(RuntimeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Estimator parameter overrides; unset flags keep the defaults.
#[derive(Args)]
struct ParamArgs {
    /// Neighbours k (MOM, MADA, TLE, MiND_ML).
    #[arg(long)]
    nn_k: Option<usize>,
    /// Lower neighbour count k1 (CorrInt, MLE).
    #[arg(long)]
    nn_k1: Option<usize>,
    /// Upper neighbour count k2 (CorrInt, MLE).
    #[arg(long)]
    nn_k2: Option<usize>,
    #[arg(long)]
    alpha_fo: Option<f64>,
    #[arg(long)]
    alpha_ratio: Option<f64>,
    #[arg(long)]
    alpha_fan: Option<f64>,
    #[arg(long)]
    beta_fan: Option<f64>,
    /// Fraction of largest TwoNN ratios discarded.
    #[arg(long)]
    twonn_discard: Option<f64>,
    /// Neighbours of the KNN graph estimator.
    #[arg(long)]
    knn_graph_k: Option<usize>,
    /// FisherS separability threshold.
    #[arg(long)]
    fisher_alpha: Option<f64>,
    #[arg(long)]
    ess_k: Option<usize>,
    #[arg(long)]
    ess_d_max: Option<usize>,
    #[arg(long)]
    danco_k: Option<usize>,
    #[arg(long)]
    danco_d_max: Option<usize>,
    /// Points per DANCo calibration sample.
    #[arg(long)]
    danco_n_cal: Option<usize>,
    #[arg(long)]
    danco_samples_per_dim: Option<usize>,
    #[arg(long)]
    danco_seed: Option<u64>,
}

impl ParamArgs {
    fn params(&self) -> EstimatorParams {
        let mut p = EstimatorParams::default();
        fn set<T: Copy>(dst: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *dst = v;
            }
        }
        set(&mut p.nn.k, self.nn_k);
        set(&mut p.nn.k1, self.nn_k1);
        set(&mut p.nn.k2, self.nn_k2);
        set(&mut p.alpha_fo, self.alpha_fo);
        set(&mut p.alpha_ratio, self.alpha_ratio);
        set(&mut p.alpha_fan, self.alpha_fan);
        set(&mut p.beta_fan, self.beta_fan);
        set(&mut p.twonn_discard, self.twonn_discard);
        set(&mut p.knn_graph.k, self.knn_graph_k);
        set(&mut p.fisher.alpha, self.fisher_alpha);
        set(&mut p.ess_k, self.ess_k);
        if self.ess_d_max.is_some() {
            p.ess_d_max = self.ess_d_max;
        }
        set(&mut p.danco.k, self.danco_k);
        set(&mut p.danco.d_max, self.danco_d_max);
        set(&mut p.danco.n_cal, self.danco_n_cal);
        set(&mut p.danco.samples_per_dim, self.danco_samples_per_dim);
        set(&mut p.danco.seed, self.danco_seed);
        p
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated method ids, or `all`.
    #[arg(long, default_value = "all")]
    methods: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Min-max scale and deduplicate before estimating.
    #[arg(long)]
    preprocess: bool,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct LocalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    method: String,
    /// Neighbourhood size; defaults to min(100, N_obj - 1).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    name: String,
    /// Intrinsic dimension.
    #[arg(long)]
    d: usize,
    /// Ambient dimension.
    #[arg(long = "D")]
    big_d: usize,
    #[arg(long, default_value_t = 2500)]
    n: usize,
    /// Standard deviation of isotropic Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Suite {
    Synthetic,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Built-in corpus.
    #[arg(
        long,
        value_enum,
        conflicts_with = "input_dir",
        required_unless_present = "input_dir"
    )]
    suite: Option<Suite>,
    /// Directory of CSV datasets.
    #[arg(long)]
    input_dir: Option<PathBuf>,
    /// Points per synthetic dataset.
    #[arg(long, default_value_t = 2500)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "all")]
    methods: String,
    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Directory receiving the report bundle.
    #[arg(long, alias = "out")]
    output_dir: PathBuf,
    /// Skip min-max scaling, deduplication and the row cap.
    #[arg(long)]
    no_normalize: bool,
    /// Max-abs distance under which scaled rows or columns are duplicates.
    #[arg(long, default_value_t = 1e-8)]
    dedup_tolerance: f64,
    #[arg(long, default_value_t = 100_000)]
    max_rows: usize,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct RuntimeArgs {
    /// CSV with columns n_obj, n_var, seconds and optionally method.
    /// Without it the grid below is timed.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "lpca_FO,MLE")]
    methods: String,
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000")]
    n_obj: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    n_var: Vec<usize>,
    /// Runs per grid point; the median is kept.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Local(a) => cmd_local(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Benchmark(a) => cmd_benchmark(a),
        Command::RuntimeModel(a) => cmd_runtime(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("idim: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn parse_methods(s: &str) -> Result<Vec<Method>> {
    if s.trim() == "all" {
        return Ok(Method::ALL.to_vec());
    }
    let mut out = Vec::new();
    for id in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m: Method = id.parse().map_err(|_| {
            let known: Vec<&str> = Method::ALL.iter().map(|m| m.id()).collect();
            Error::Usage(format!(
                "unknown method '{id}'; known: {}",
                known.join(", ")
            ))
        })?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::Usage("no methods selected".into()));
    }
    Ok(out)
}

/// Writes `bytes` atomically to `path`, or to standard output.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, |w| w.write_all(bytes)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn flush_warnings(cache: &DiskCache) {
    for w in cache.take_warnings() {
        eprintln!("idim: warning: {w}");
    }
}

fn load_input(path: &Path, normalize: bool, seed: u64) -> Result<Dataset> {
    let data = read_dataset(path)?;
    if normalize {
        Ok(preprocess(
            &data,
            &PreprocessConfig {
                seed,
                ..Default::default()
            },
        )?)
    } else {
        Ok(data)
    }
}

fn cmd_estimate(a: EstimateArgs) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    let data = load_input(&a.input, a.preprocess, a.seed)?;
    let params = a.params.params();
    let cache = DiskCache::from_env();
    let clock = InstantClock::new();
    let mut entries = Vec::with_capacity(methods.len());
    for m in methods {
        let t0 = clock.now();
        let seed = cell_seed(a.seed, data.name(), m);
        let e = estimate_with(&data, m, &params, seed, &cache)
            .unwrap_or_else(|err| idim_core::IdEstimate::invalid(m.id(), err.to_string()));
        entries.push(EstimateEntry::new(e, clock.now() - t0));
    }
    flush_warnings(&cache);
    let report = EstimateReport::new(&data, a.seed, entries);
    let bytes = match a.format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?,
    };
    emit(a.output.as_deref(), &bytes)?;
    if report.any_valid() {
        Ok(())
    } else {
        Err(Error::NoValidResults(format!(
            "every method failed on {}",
            a.input.display()
        )))
    }
}

fn cmd_local(a: LocalArgs) -> Result<()> {
    let method = parse_methods(&a.method)?;
    let [method] = method[..] else {
        return Err(Error::Usage("--method takes exactly one method".into()));
    };
    let data = read_dataset(&a.input)?;
    let k = a.k.unwrap_or_else(|| default_local_k(data.n_obj()));
    let cache = DiskCache::from_env();
    let field = local_estimate(&data, method, k, &a.params.params(), a.seed, &cache)?;
    flush_warnings(&cache);
    let header = ["row_index", "local_id", "valid"].map(String::from);
    let rows: Vec<Vec<String>> = (0..data.n_obj())
        .map(|i| {
            vec![
                i.to_string(),
                format_f64(field.values[i]),
                field.valid[i].to_string(),
            ]
        })
        .collect();
    let mut bytes = Vec::new();
    write_table_to(&mut bytes, &header, &rows).map_err(|e| Error::io("<memory>", e))?;
    emit(a.output.as_deref(), &bytes)?;
    if field.n_invalid == data.n_obj() {
        return Err(Error::NoValidResults(
            "no point received a valid local ID".into(),
        ));
    }
    Ok(())
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    if !REGISTRY.contains(&a.name.as_str()) {
        return Err(Error::Usage(format!(
            "unknown dataset '{}'; known: {}",
            a.name,
            REGISTRY.join(", ")
        )));
    }
    let spec = ManifoldSpec::new(&a.name, a.d, a.big_d, a.n, a.seed).with_noise(a.noise);
    let data = generate(&spec)?;
    let mut bytes = Vec::new();
    write_dataset_to(&mut bytes, &data).map_err(|e| Error::io("<memory>", e))?;
    emit(a.output.as_deref(), &bytes)
}

#[derive(Serialize)]
struct BenchmarkEcho {
    suite: Option<Suite>,
    input_dir: Option<PathBuf>,
    n: Option<usize>,
    /// Generator ID of each synthetic dataset.
    true_ids: Option<Vec<usize>>,
    methods: Vec<String>,
    suite_config: SuiteConfig,
}

fn read_corpus(dir: &Path) -> Result<Vec<Dataset>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e.map_err(|e| Error::io(dir, e))?.path();
        if p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) {
            paths.push(p);
        }
    }
    paths.sort();
    paths.iter().map(|p| read_dataset(p)).collect()
}

fn cmd_benchmark(a: BenchmarkArgs) -> Result<()> {
    let methods = parse_methods(&a.methods)?;
    let (datasets, true_ids) = match (&a.suite, &a.input_dir) {
        (Some(Suite::Synthetic), _) => {
            let (d, ids): (Vec<_>, Vec<_>) = benchmark_suite(a.n, a.seed)?.into_iter().unzip();
            (d, Some(ids))
        }
        (None, Some(dir)) => (read_corpus(dir)?, None),
        (None, None) => return Err(Error::Usage("give --suite or --input-dir".into())),
    };
    if datasets.is_empty() {
        return Err(Error::NoValidResults(
            "no CSV datasets in the input directory".into(),
        ));
    }
    let config = SuiteConfig {
        preprocess: PreprocessConfig {
            max_rows: a.max_rows,
            dedup_tolerance: a.dedup_tolerance,
            seed: a.seed,
            ..Default::default()
        },
        normalize: !a.no_normalize,
        params: a.params.params(),
        seed: a.seed,
    };
    let cache = DiskCache::from_env();
    let clock = InstantClock::new();
    let report = run_suite_parallel(&datasets, &methods, &config, &cache, &clock, a.jobs)?;
    flush_warnings(&cache);
    let analysis = analyze(report);
    for w in &analysis.report.warnings {
        eprintln!("idim: warning: {w}");
    }
    let echo = BenchmarkEcho {
        suite: a.suite,
        input_dir: a.input_dir.clone(),
        n: a.suite.map(|_| a.n),
        true_ids,
        methods: methods.iter().map(|m| m.id().to_string()).collect(),
        suite_config: config,
    };
    Bundle::render(&analysis, &echo)?.write(&a.output_dir)?;
    if analysis.any_valid() {
        Ok(())
    } else {
        Err(Error::NoValidResults(
            "no cell produced a valid estimate".into(),
        ))
    }
}

#[derive(Serialize)]
struct ModelEntry {
    method: String,
    model: Option<idim_core::pipeline::RuntimeModel>,
    error: Option<String>,
}

#[derive(Serialize)]
struct RuntimeDocument {
    schema_version: u32,
    tool: &'static str,
    tool_version: &'static str,
    models: Vec<ModelEntry>,
    timings: Vec<Timing>,
}

fn read_timings(path: &Path) -> Result<Vec<Timing>> {
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(&data[..]);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Format {
            path: path.into(),
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    let col = |name: &str| header.iter().position(|h| h == name);
    let (Some(io), Some(iv), Some(is)) = (col("n_obj"), col("n_var"), col("seconds")) else {
        return Err(Error::Format {
            path: path.into(),
            message: "need columns n_obj, n_var, seconds".into(),
        });
    };
    let im = col("method");
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Format {
            path: path.into(),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |j: usize| Error::Parse {
            path: path.into(),
            line,
            column: header[j].clone(),
            message: format!("'{}' is not a valid number", &rec[j]),
        };
        out.push(Timing {
            method: im.map_or_else(|| "all".to_string(), |j| rec[j].to_string()),
            n_obj: rec[io].parse().map_err(|_| bad(io))?,
            n_var: rec[iv].parse().map_err(|_| bad(iv))?,
            seconds: rec[is].parse().map_err(|_| bad(is))?,
        });
    }
    Ok(out)
}

fn cmd_runtime(a: RuntimeArgs) -> Result<()> {
    let timings = match &a.input {
        Some(p) => read_timings(p)?,
        None => {
            let methods = parse_methods(&a.methods)?;
            let cache = DiskCache::from_env();
            let t = time_grid(
                &methods,
                &a.n_obj,
                &a.n_var,
                a.repeats,
                &a.params.params(),
                &cache,
                a.seed,
            )?;
            flush_warnings(&cache);
            t
        }
    };
    let models: Vec<ModelEntry> = fit_timings(&timings)
        .into_iter()
        .map(|(method, r)| match r {
            Ok(m) => ModelEntry {
                method,
                model: Some(m),
                error: None,
            },
            Err(e) => ModelEntry {
                method,
                model: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let any = models.iter().any(|m| m.model.is_some());
    let doc = RuntimeDocument {
        schema_version: SCHEMA_VERSION,
        tool: TOOL,
        tool_version: TOOL_VERSION,
        models,
        timings,
    };
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    emit(a.output.as_deref(), &bytes)?;
    if any {
        Ok(())
    } else {
        Err(Error::NoValidResults(
            "no runtime model could be fitted".into(),
        ))
    }
}
