use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use vsearch_core::analysis::{analyze, emit_report, join, BinScheme};
use vsearch_core::dataset::DEFAULT_MASTER_SEED;
use vsearch_core::finetune::{build_finetune_dataset, build_transfer_evals, ImageRef, TransferSeeds, TRAIN_SEED};
use vsearch_core::{build_dataset, DatasetSpec, Family, Manifest, Mode, ScoreRecord};
use vsearch_harness::mock::{mock_by_name, MOCK_NAMES};
use vsearch_harness::runner::{read_jsonl, write_jsonl, write_jsonl_to};
use vsearch_harness::{
    run_trials, score_trials, AdapterConfig, HttpAdapter, LoadedDataset, ModelAdapter, ResponseCache, RetryPolicy,
    TrialRecord,
};

#[derive(Parser)]
#[command(name = "vsearch", version, about = "Visual-search evaluation toolkit for multimodal models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cells,
    Coordinates,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Cells => Mode::Cells,
            ModeArg::Coordinates => Mode::Coordinates,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BinsArg {
    Human,
    Finetune,
    None,
}

#[derive(Subcommand)]
enum Command {
    /// Render a stimulus dataset (manifest.json + PNGs).
    Generate {
        /// circle-sizes, two-among-five, t-among-l or light-priors
        #[arg(long)]
        family: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
        /// Images per (condition, set size).
        #[arg(long, default_value_t = 1)]
        trials: u32,
        /// Largest distractor count (defaults to the family maximum).
        #[arg(long)]
        max_n: Option<u32>,
    },
    /// Send a dataset to a model and record raw replies as JSON lines.
    Run {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Adapter config JSON, or `mock:<name>` for a built-in mock.
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 4)]
        parallel: usize,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Trial records output (defaults to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the random mock.
        #[arg(long, default_value_t = 0)]
        mock_seed: u64,
    },
    /// Parse and score trial records against a manifest.
    Score {
        #[arg(long)]
        trials: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate score files into curves, correlations and bias tables.
    Analyze {
        #[arg(long, num_args = 1.., required = true)]
        scores: Vec<PathBuf>,
        #[arg(long, num_args = 1.., required = true)]
        manifest: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "none")]
        bins: BinsArg,
    },
    /// Write a chat-format fine-tuning set with images.
    FinetuneExport {
        #[arg(long, value_parser = ["10", "100", "1000"])]
        n: String,
        #[arg(long, default_value_t = TRAIN_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Embed images as data URIs instead of relative paths.
        #[arg(long)]
        inline_images: bool,
    },
    /// Write the four transfer evaluation datasets (set sizes 0-99).
    TransferEvals {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        trials: u32,
    },
    /// Serve the human-baseline session API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Directory for per-session event logs; in-memory if omitted.
        #[arg(long)]
        log_dir: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
        /// Static files (e.g. a participant front end) served at `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

fn parse_family(s: &str) -> Result<Family> {
    Family::from_slug(s).with_context(|| {
        let all: Vec<_> = Family::ALL.iter().map(|f| f.slug()).collect();
        format!("unknown family {s:?}; expected one of {}", all.join(", "))
    })
}

fn adapter_for(model: &str, dataset: &LoadedDataset, mock_seed: u64) -> Result<Box<dyn ModelAdapter>> {
    if let Some(name) = model.strip_prefix("mock:") {
        return mock_by_name(name, &dataset.manifest, mock_seed)
            .with_context(|| format!("unknown mock {name:?}; expected one of {}", MOCK_NAMES.join(", ")));
    }
    let config = AdapterConfig::read(Path::new(model))?;
    Ok(Box::new(HttpAdapter::new(config)?))
}

async fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { family, out, seed, trials, max_n } => {
            let family = parse_family(&family)?;
            let mut spec = DatasetSpec::full(family, trials, seed);
            if let Some(max) = max_n {
                spec.set_sizes = (0..=max).collect();
            }
            let dataset = build_dataset(&spec)?;
            dataset.write_to(&out)?;
            eprintln!("wrote {} images to {}", dataset.scenes.len(), out.display());
        }
        Command::Run { dataset, mode, model, parallel, cache, out, mock_seed } => {
            let data = LoadedDataset::load(&dataset).with_context(|| format!("loading {}", dataset.display()))?;
            let adapter = adapter_for(&model, &data, mock_seed)?;
            let cache = match cache {
                Some(p) => ResponseCache::open(&p).with_context(|| format!("opening cache {}", p.display()))?,
                None => ResponseCache::in_memory(),
            };
            let records =
                run_trials(adapter.as_ref(), &data, mode.into(), parallel, &cache, &RetryPolicy::default()).await?;
            let failed = records.iter().filter(|r| r.error.is_some()).count();
            let cached = records.iter().filter(|r| r.cached).count();
            match out {
                Some(p) => write_jsonl(&p, &records)?,
                None => write_jsonl_to(std::io::stdout().lock(), &records)?,
            }
            eprintln!("{} trials, {cached} from cache, {failed} failed", records.len());
        }
        Command::Score { trials, manifest, out } => {
            let records: Vec<TrialRecord> = read_jsonl(&trials)?;
            let manifest = Manifest::read(&manifest)?;
            let scores = score_trials(&records, &manifest).map_err(anyhow::Error::msg)?;
            write_jsonl(&out, &scores)?;
            eprintln!("scored {} trials", scores.len());
        }
        Command::Analyze { scores, manifest, out, bins } => {
            let mut all: Vec<ScoreRecord> = Vec::new();
            for p in &scores {
                all.extend(read_jsonl::<ScoreRecord>(p).with_context(|| format!("reading {}", p.display()))?);
            }
            let manifests =
                manifest.iter().map(|p| Manifest::read(p).with_context(|| format!("reading {}", p.display()))).collect::<Result<Vec<_>>>()?;
            let joined = join(&all, &manifests)?;
            let scheme = match bins {
                BinsArg::Human => BinScheme::Human,
                BinsArg::Finetune => BinScheme::Finetune,
                BinsArg::None => BinScheme::None,
            };
            let report = analyze(&joined, scheme)?;
            let index = emit_report(&report, &out)?;
            eprintln!("wrote {} report entries to {}", index.entries.len(), out.display());
        }
        Command::FinetuneExport { n, seed, out, inline_images } => {
            let n: usize = n.parse()?;
            let set = build_finetune_dataset(n, seed)?;
            let images = if inline_images { ImageRef::InlineBase64 } else { ImageRef::RelativePath };
            set.write_to(&out, images)?;
            eprintln!("wrote {n} examples to {}", out.display());
        }
        Command::TransferEvals { out, trials } => {
            for eval in build_transfer_evals(TransferSeeds::default(), trials)? {
                let dir = out.join(eval.name);
                eval.dataset.write_to(&dir)?;
                eprintln!("{}: {} images", eval.name, eval.dataset.scenes.len());
            }
        }
        Command::Serve { addr, log_dir, seed, static_dir } => {
            use vsearch_trials_server::{app, serve, store::Store, AppState};
            let store = match &log_dir {
                Some(dir) => Store::open(dir)?,
                None => Store::in_memory(),
            };
            let state = Arc::new(AppState { store, master_seed: seed });
            let listener = tokio::net::TcpListener::bind(&addr).await.with_context(|| format!("binding {addr}"))?;
            eprintln!("listening on http://{}", listener.local_addr()?);
            serve(listener, app(state, static_dir.as_deref())).await?;
        }
    }
    Ok(())
}

#[tokio::main]
async fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    if let Err(e) = run(Cli::parse()).await {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
