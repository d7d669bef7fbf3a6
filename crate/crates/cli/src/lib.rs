//! Subcommands of the `embedcap` binary. Each command writes its artifacts
//! plus a `manifest.json` that echoes the arguments and hashes every input
//! and output file.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use embedcap::free_embed::{solve, EmbeddingPair, Objective, OptimizerConfig};
use embedcap::limit::{
    generate, small_split, train_split, AttributeVocabulary, BeirDataset, GenConfig, NameLists, Pattern, TrainParams,
    BUILTIN_VOCAB_SIZE,
};
use embedcap::metrics::GraphMetricsReport;
use embedcap::qrel::{check_rop, make_rt_certificate, QrelMatrix, RankCertificate};
use embedcap::retrieval::{
    dense_search, recall_at_k, Bm25Params, DenseVectorStore, InvertedIndex, PhraseIndex, RetrievalRun, Truncation,
};
use embedcap::sweep::{find_critical_n, fit_cubic, write_sweep_csv, FitReport, ScanConfig, SweepPoint, REFERENCE_CRITICAL_N};

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "embedcap", version, about = "Capacity experiments for single-vector embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a LIMIT-style dataset in BEIR layout.
    Gen(GenArgs),
    /// Optimize free embeddings for a qrel matrix.
    Solve(SolveArgs),
    /// Scan critical n over a range of dimensions and fit a cubic.
    Sweep(SweepArgs),
    /// Fit a cubic to (d, critical_n) points and extrapolate.
    Fit(FitArgs),
    /// Qrel graph density and query strength.
    Metrics(MetricsArgs),
    /// Recall of lexical and dense retrievers on a dataset.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternArg {
    Dense,
    Random,
    Cycle,
    Disjoint,
}

impl From<PatternArg> for Pattern {
    fn from(p: PatternArg) -> Self {
        match p {
            PatternArg::Dense => Pattern::Dense,
            PatternArg::Random => Pattern::Random,
            PatternArg::Cycle => Pattern::Cycle,
            PatternArg::Disjoint => Pattern::Disjoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Pair,
    Set,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = OptimizerConfig::default().temperature)]
    pub temperature: f64,
    #[arg(long = "lr", default_value_t = OptimizerConfig::default().learning_rate)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = OptimizerConfig::default().max_steps)]
    pub max_steps: usize,
    #[arg(long, default_value_t = OptimizerConfig::default().patience)]
    pub patience: usize,
    #[arg(long, default_value_t = OptimizerConfig::default().restarts)]
    pub restarts: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Pair)]
    pub objective: ObjectiveArg,
}

impl OptimizerArgs {
    fn config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            objective: match self.objective {
                ObjectiveArg::Pair => Objective::PairInfoNce,
                ObjectiveArg::Set => Objective::SetInfoNce,
            },
            temperature: self.temperature,
            learning_rate: self.learning_rate,
            max_steps: self.max_steps,
            patience: self.patience,
            restarts: self.restarts,
            seed,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = PatternArg::Dense)]
    pub pattern: PatternArg,
    #[arg(long, default_value_t = 50_000)]
    pub docs: usize,
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 45)]
    pub attrs_per_doc: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// One attribute per line; the built-in vocabulary when absent.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long, requires = "last_names")]
    pub first_names: Option<PathBuf>,
    #[arg(long, requires = "first_names")]
    pub last_names: Option<PathBuf>,
    /// Queries in the optional training split.
    #[arg(long, default_value_t = 0)]
    pub train_size: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Qrels TSV; when absent, qrels are generated from --pattern.
    #[arg(long)]
    pub qrels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PatternArg::Dense)]
    pub pattern: PatternArg,
    #[arg(long, default_value_t = 46)]
    pub docs: usize,
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Inclusive range such as `4..12`, `4:12` or `4-12`.
    #[arg(long, conflicts_with = "dim")]
    pub dim_range: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// First n scanned; defaults to k + 1.
    #[arg(long)]
    pub n_start: Option<usize>,
    #[arg(long, default_value_t = ScanConfig::default().confirm_restarts)]
    pub confirm_restarts: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Record wall-clock seconds in the CSV (makes reruns differ).
    #[arg(long)]
    pub timings: bool,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV with `d` and `critical_n` columns, e.g. a sweep.csv.
    #[arg(long, required_unless_present = "reference")]
    pub input: Option<PathBuf>,
    /// Fit the built-in reference table of critical values for d = 4..45.
    #[arg(long)]
    pub reference: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub report: ReportFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub qrels: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub report: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Row label for the printed summary.
    #[arg(long, default_value = "qrels")]
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    Bm25,
    PhraseTfidf,
    Dense,
}

impl SystemArg {
    fn tag(self) -> &'static str {
        match self {
            SystemArg::Bm25 => "bm25",
            SystemArg::PhraseTfidf => "phrase_tfidf",
            SystemArg::Dense => "dense",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value = "test")]
    pub split: String,
    #[arg(long = "system", value_enum, required = true)]
    pub systems: Vec<SystemArg>,
    /// Directory with `queries.jsonl` and `docs.jsonl` vector files.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    #[arg(long)]
    pub truncate: Option<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 10, 20, 100])]
    pub k: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub report: ReportFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    args: &'a [String],
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn hash_inputs(paths: &[Option<&PathBuf>]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for p in paths.iter().flatten() {
        out.insert(p.display().to_string(), sha256_file(p)?);
    }
    Ok(out)
}

/// Hashes of every file under `root` except the manifest, keyed by the
/// relative path.
fn hash_tree(root: &Path) -> Result<BTreeMap<String, String>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, String>) -> Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else if path.file_name().is_some_and(|n| n != "manifest.json") {
                let rel = path.strip_prefix(root)?.to_string_lossy().replace('\\', "/");
                out.insert(rel, sha256_file(&path)?);
            }
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out)?;
    Ok(out)
}

fn write_manifest(
    dir: &Path,
    command: &str,
    args: &[String],
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
) -> Result<()> {
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        args,
        seed,
        inputs,
        outputs: hash_tree(dir)?,
    };
    write_json(&dir.join("manifest.json"), &manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run_from<I, T>(argv: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv)?;
    run(cli, &argv[1.min(argv.len())..])
}

pub fn run(cli: Cli, args: &[String]) -> Result<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a, args),
        Command::Solve(a) => cmd_solve(&a, args),
        Command::Sweep(a) => cmd_sweep(&a, args),
        Command::Fit(a) => cmd_fit(&a),
        Command::Metrics(a) => cmd_metrics(&a),
        Command::Eval(a) => cmd_eval(&a, args),
    }
}

pub fn cmd_gen(a: &GenArgs, args: &[String]) -> Result<()> {
    let vocab = match &a.vocab {
        Some(p) => AttributeVocabulary::from_reader(open(p)?)?,
        None => AttributeVocabulary::builtin(BUILTIN_VOCAB_SIZE),
    };
    let names = match (&a.first_names, &a.last_names) {
        (Some(f), Some(l)) => NameLists::from_readers(open(f)?, open(l)?)?,
        _ => NameLists::builtin(),
    };
    let cfg = GenConfig {
        pattern: a.pattern.into(),
        n_docs: a.docs,
        n_queries: a.queries,
        k: a.k,
        attrs_per_doc: a.attrs_per_doc,
        seed: a.seed,
    };
    let ds = generate(&cfg, &vocab, &names)?;
    fs::create_dir_all(&a.out)?;
    ds.to_beir().write_dir(&a.out, "test")?;
    let small = small_split(&ds)?;
    small.to_beir().write_dir(&a.out.join("small"), "test")?;
    if a.train_size > 0 {
        let params = TrainParams { k: a.k, attrs_per_doc: a.attrs_per_doc, ..TrainParams::default() };
        let train = train_split(&vocab, &ds.query_attributes(), a.train_size, a.seed.wrapping_add(1), &params, &names)?;
        train.to_beir().write_dir(&a.out.join("train"), "train")?;
    }
    log::info!(
        "wrote {} docs, {} queries ({} docs in the small split) to {}",
        ds.corpus.len(),
        ds.queries.len(),
        small.corpus.len(),
        a.out.display()
    );
    let inputs = hash_inputs(&[a.vocab.as_ref(), a.first_names.as_ref(), a.last_names.as_ref()])?;
    write_manifest(&a.out, "gen", args, Some(a.seed), inputs)
}

#[derive(Debug, Serialize)]
struct SolveReport {
    dim: usize,
    num_queries: usize,
    num_docs: usize,
    solved: bool,
    rop_verified: bool,
    steps_run: usize,
    final_loss: f64,
    accuracy: f64,
    restart: usize,
    certificate: Option<RankCertificate>,
    config: OptimizerConfig,
}

pub fn cmd_solve(a: &SolveArgs, args: &[String]) -> Result<()> {
    let qrels = match &a.qrels {
        Some(p) => QrelMatrix::read_tsv(open(p)?, None)?,
        None => embedcap::limit::pattern_qrels(a.pattern.into(), a.docs, a.queries, a.k, a.seed)?,
    };
    let cfg = a.optimizer.config(a.seed);
    let res = solve(&qrels, a.dim, &cfg)?;
    let scores = res.embeddings.scores();
    let rop = check_rop(&qrels, &scores)?;
    let certificate = if rop { make_rt_certificate(&qrels, &scores)?.map(|c| c.with_dimension(a.dim)) } else { None };
    log::info!("d={} solved={} accuracy={:.4} steps={}", a.dim, res.solved, res.accuracy, res.steps_run);

    fs::create_dir_all(a.out.join("vectors"))?;
    export_vectors(&res.embeddings, &qrels, &a.out.join("vectors"))?;
    let (num_queries, num_docs) = qrels.shape();
    write_json(
        &a.out.join("result.json"),
        &SolveReport {
            dim: a.dim,
            num_queries,
            num_docs,
            solved: res.solved,
            rop_verified: rop,
            steps_run: res.steps_run,
            final_loss: res.final_loss,
            accuracy: res.accuracy,
            restart: res.restart,
            certificate,
            config: cfg,
        },
    )?;
    write_manifest(&a.out, "solve", args, Some(a.seed), hash_inputs(&[a.qrels.as_ref()])?)
}

/// `queries.jsonl` and `docs.jsonl` keyed by the qrel ids.
pub fn export_vectors(e: &EmbeddingPair, qrels: &QrelMatrix, dir: &Path) -> Result<()> {
    DenseVectorStore::from_columns(qrels.query_ids(), &e.queries)?.save(&dir.join("queries.jsonl"))?;
    DenseVectorStore::from_columns(qrels.doc_ids(), &e.docs)?.save(&dir.join("docs.jsonl"))?;
    Ok(())
}

pub fn parse_dim_range(s: &str) -> Result<(usize, usize)> {
    let (lo, hi) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once(':'))
        .or_else(|| s.split_once('-'))
        .with_context(|| format!("dimension range '{s}' is not of the form LO..HI"))?;
    let lo: usize = lo.trim().parse().with_context(|| format!("bad lower bound in '{s}'"))?;
    let hi: usize = hi.trim().parse().with_context(|| format!("bad upper bound in '{s}'"))?;
    if lo == 0 || lo > hi {
        bail!("dimension range '{s}' must satisfy 1 <= LO <= HI");
    }
    Ok((lo, hi))
}

pub fn cmd_sweep(a: &SweepArgs, args: &[String]) -> Result<()> {
    let (lo, hi) = match (&a.dim_range, a.dim) {
        (Some(r), _) => parse_dim_range(r)?,
        (None, Some(d)) => (d, d),
        (None, None) => bail!("one of --dim-range or --dim is required"),
    };
    let cfg = a.optimizer.config(a.seed);
    cfg.validate()?;
    let scan = ScanConfig {
        n_start: a.n_start.unwrap_or(a.k + 1),
        confirm_restarts: a.confirm_restarts,
        ..ScanConfig::default()
    };
    fs::create_dir_all(&a.out)?;
    let mut points: Vec<SweepPoint> = Vec::new();
    let mut failure = None;
    for d in lo..=hi {
        match find_critical_n(d, a.k, &cfg, &scan) {
            Ok(p) => {
                log::info!("d={d}: critical n = {}", p.critical_n);
                points.push(p);
                // flushed after every point so that partial results survive errors
                write_sweep_csv(BufWriter::new(File::create(a.out.join("sweep.csv"))?), &points, a.timings)?;
            }
            Err(e) => {
                failure = Some(anyhow::Error::new(e).context(format!("sweep failed at d={d}")));
                break;
            }
        }
    }
    write_sweep_csv(BufWriter::new(File::create(a.out.join("sweep.csv"))?), &points, a.timings)?;
    if a.timings {
        write_json(&a.out.join("trials.json"), &points)?;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.d as f64, p.critical_n as f64)).collect();
    if xy.len() >= 4 {
        write_json(&a.out.join("fit.json"), &FitReport::new(&fit_cubic(&xy)?))?;
    } else {
        log::warn!("{} sweep point(s): at least 4 are needed for a cubic fit, skipping it", xy.len());
    }
    write_manifest(&a.out, "sweep", args, Some(a.seed), BTreeMap::new())
}

#[derive(serde::Deserialize)]
struct CriticalRow {
    d: f64,
    critical_n: f64,
}

pub fn read_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: CriticalRow = row.with_context(|| format!("reading {}", path.display()))?;
        out.push((row.d, row.critical_n));
    }
    Ok(out)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn cmd_fit(a: &FitArgs) -> Result<()> {
    let points = match &a.input {
        Some(p) if !a.reference => read_points(p)?,
        _ => REFERENCE_CRITICAL_N.iter().map(|&(d, n)| (d as f64, n as f64)).collect(),
    };
    let report = FitReport::new(&fit_cubic(&points)?);
    let text = match a.report {
        ReportFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
        ReportFormat::Csv => {
            let c = report.coefficients;
            let mut s = format!("c0,c1,c2,c3,r_squared\n{},{},{},{},{}\n\nd,critical_n\n", c[0], c[1], c[2], c[3], report.r_squared);
            for e in &report.extrapolation {
                s += &format!("{},{}\n", e.d, e.critical_n);
            }
            s
        }
    };
    emit(a.out.as_ref(), &text)
}

pub fn cmd_metrics(a: &MetricsArgs) -> Result<()> {
    let qrels = QrelMatrix::read_tsv(open(&a.qrels)?, None)?;
    let r = GraphMetricsReport::compute(&qrels)?;
    eprintln!("{}", r.table_row(&a.name));
    let text = match a.report {
        ReportFormat::Json => serde_json::to_string_pretty(&r)? + "\n",
        ReportFormat::Csv => format!(
            "doc_graph_density,doc_graph_nodes,doc_graph_edges,query_graph_density,query_graph_nodes,query_graph_edges,average_query_strength\n{},{},{},{},{},{},{}\n",
            r.doc_graph_density,
            r.doc_graph_nodes,
            r.doc_graph_edges,
            r.query_graph_density,
            r.query_graph_nodes,
            r.query_graph_edges,
            r.average_query_strength
        ),
    };
    emit(a.out.as_ref(), &text)
}

/// Recall (in percent) per requested k and system. `effective_k` is
/// `min(k, corpus size)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecallRow {
    pub k: usize,
    pub effective_k: usize,
    pub recall: BTreeMap<String, f64>,
}

pub fn evaluate(a: &EvalArgs) -> Result<(Vec<RecallRow>, Vec<RetrievalRun>)> {
    let ds = BeirDataset::read_dir(&a.dataset, &a.split)?;
    let n_docs = ds.corpus.len();
    let depth = a.k.iter().copied().max().unwrap_or(1).min(n_docs).max(1);
    let mut runs = Vec::new();
    for &system in &a.systems {
        let run = match system {
            SystemArg::Bm25 => {
                let idx = InvertedIndex::build(ds.corpus.iter().map(|d| (d.id.as_str(), d.text.as_str())));
                idx.search_all(&ds.queries, depth, Bm25Params::default(), system.tag())?
            }
            SystemArg::PhraseTfidf => PhraseIndex::build(&ds.corpus)?.search_all(&ds.queries, depth, system.tag())?,
            SystemArg::Dense => {
                let dir = a.vectors.as_ref().context("--system dense needs --vectors")?;
                let docs = DenseVectorStore::load(&dir.join("docs.jsonl"))?;
                let queries = DenseVectorStore::load(&dir.join("queries.jsonl"))?;
                let have: std::collections::HashSet<&str> = docs.ids().iter().map(String::as_str).collect();
                if let Some(d) = ds.corpus.iter().find(|d| !have.contains(d.id.as_str())) {
                    bail!("vectors lack corpus document {}", d.id);
                }
                let t = a.truncate.map_or(Truncation::Full, Truncation::To);
                dense_search(&docs, &queries, t, depth, system.tag())?
            }
        };
        runs.push(run);
    }
    let mut rows = Vec::new();
    for &k in &a.k {
        let effective_k = k.min(n_docs);
        let mut recall = BTreeMap::new();
        for run in &runs {
            recall.insert(run.tag.clone(), 100.0 * recall_at_k(run, &ds.qrels, effective_k)?);
        }
        rows.push(RecallRow { k, effective_k, recall });
    }
    Ok((rows, runs))
}

pub fn cmd_eval(a: &EvalArgs, args: &[String]) -> Result<()> {
    let (rows, runs) = evaluate(a)?;
    fs::create_dir_all(a.out.join("runs"))?;
    for run in &runs {
        let mut w = BufWriter::new(File::create(a.out.join("runs").join(format!("{}.trec", run.tag)))?);
        run.write_trec(&mut w)?;
        w.flush()?;
    }
    match a.report {
        ReportFormat::Json => write_json(&a.out.join("recall.json"), &rows)?,
        ReportFormat::Csv => {
            let tags: Vec<&str> = runs.iter().map(|r| r.tag.as_str()).collect();
            let mut s = format!("k,effective_k,{}\n", tags.join(","));
            for row in &rows {
                let vals: Vec<String> = tags.iter().map(|t| format!("{:.4}", row.recall[*t])).collect();
                s += &format!("{},{},{}\n", row.k, row.effective_k, vals.join(","));
            }
            fs::write(a.out.join("recall.csv"), s)?;
        }
    }
    for row in &rows {
        let capped = if row.effective_k < row.k { " (capped at corpus size)" } else { "" };
        let vals: Vec<String> = row.recall.iter().map(|(t, v)| format!("{t}={v:.2}")).collect();
        eprintln!("recall@{}{capped}: {}", row.effective_k, vals.join(" "));
    }
    let mut inputs = hash_tree(&a.dataset)?
        .into_iter()
        .map(|(k, v)| (format!("{}/{k}", a.dataset.display()), v))
        .collect::<BTreeMap<_, _>>();
    if let Some(v) = &a.vectors {
        for f in ["queries.jsonl", "docs.jsonl"] {
            let p = v.join(f);
            if p.exists() {
                inputs.insert(p.display().to_string(), sha256_file(&p)?);
            }
        }
    }
    write_manifest(&a.out, "eval", args, None, inputs)
}
