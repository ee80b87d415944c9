//! `sda`: augment CoNLL-U corpora, report coverage, train the toy encoder,
//! evaluate it on STS pairs and check its gradients.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sda_core::augment::{
    augment_corpus, pairs_to_jsonl, AugmentConfig, Augmenter, AuxLexicon, Method, NegLexicon, RuleStrategy,
    SynonymLexicon,
};
use sda_core::conllu::{parse_conllu, ParsedSentence};
use sda_core::eval::{coverage_stats, evaluate_sts, parse_sts_tsv};
use sda_core::synth::synthetic_corpus;
use sda_core::trainer::{check_config, parse_config, trace_csv, train_with, Checkpoint, ConfigFile};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "sda", version, about = "Syntax-guided sentence augmentation and contrastive training")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one anchor/positive pair per sentence as JSON lines.
    Augment {
        #[command(flatten)]
        opts: AugmentOpts,
        #[arg(long = "out", value_name = "FILE.jsonl")]
        output: PathBuf,
    },
    /// Print the share of sentences a method changes, as JSON.
    Stats {
        #[command(flatten)]
        opts: AugmentOpts,
    },
    /// Train the encoder; writes a checkpoint and a step,loss trace.
    Train {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "FILE.conllu")]
        corpus: PathBuf,
        #[arg(long = "out", value_name = "CKPT")]
        output: PathBuf,
        #[arg(long, value_name = "CSV")]
        trace: PathBuf,
    },
    /// Print the Spearman correlation of a checkpoint on an STS file.
    Eval {
        #[arg(long, value_name = "CKPT")]
        ckpt: PathBuf,
        #[arg(long, value_name = "FILE.tsv")]
        sts: PathBuf,
    },
    /// Compare analytic and finite-difference gradients.
    Gradcheck {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Cascade,
    Random,
}

#[derive(Args)]
struct AugmentOpts {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[arg(long = "in", value_name = "FILE.conllu")]
    input: PathBuf,
    /// Random seed; 42 when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Rate for crop, del and mask.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, value_enum, default_value = "cascade")]
    strategy: StrategyArg,
    #[arg(long, value_name = "FILE")]
    aux_lexicon: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    neg_lexicon: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    syn_lexicon: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s.parse::<Method>() {
        Ok(Method::Identity) | Err(_) => Err(format!(
            "expected one of pi, aa, dn, crop, del, syn, mask, rep, randpunct; got {s:?}"
        )),
        Ok(m) => Ok(m),
    }
}

/// Why a run failed; each kind has its own exit code.
enum Failure {
    Usage(String),
    Data(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Check(_) => 3,
        }
    }
}

fn data_err(path: &Path, e: impl Display) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| data_err(path, e))
}

/// Writes via a temporary file in the target directory and renames it.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| data_err(path, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| data_err(path, e))?;
    tmp.as_file().sync_all().map_err(|e| data_err(path, e))?;
    tmp.persist(path).map_err(|e| data_err(path, e.error))?;
    Ok(())
}

fn read_corpus(path: &Path) -> Result<Vec<ParsedSentence>, Failure> {
    parse_conllu(&read(path)?).map_err(|e| data_err(path, e))
}

fn load<T, E: Display>(path: &Path, parse: impl Fn(&str) -> Result<T, E>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|e| data_err(path, e))
}

fn augment_config(opts: &AugmentOpts) -> Result<AugmentConfig, Failure> {
    let mut config = AugmentConfig {
        strategy: match opts.strategy {
            StrategyArg::Cascade => RuleStrategy::Cascade,
            StrategyArg::Random => RuleStrategy::UniformRandom,
        },
        rate: opts.rate,
        ..AugmentConfig::default()
    };
    if let Some(p) = &opts.aux_lexicon {
        config.aux = load(p, AuxLexicon::parse)?;
    }
    if let Some(p) = &opts.neg_lexicon {
        config.neg = load(p, NegLexicon::parse)?;
    }
    if let Some(p) = &opts.syn_lexicon {
        config.synonyms = Some(load(p, SynonymLexicon::parse)?);
    }
    Ok(config)
}

fn augmenter(opts: &AugmentOpts) -> Result<(Augmenter, u64), Failure> {
    let config = augment_config(opts)?;
    let augmenter = Augmenter::new(opts.method, &config).map_err(|e| Failure::Usage(e.to_string()))?;
    let seed = opts.seed.unwrap_or(DEFAULT_SEED);
    eprintln!("seed: {seed}");
    Ok((augmenter, seed))
}

fn augment(opts: &AugmentOpts, output: &Path) -> Result<(), Failure> {
    let (augmenter, seed) = augmenter(opts)?;
    let corpus = read_corpus(&opts.input)?;
    let pairs = augment_corpus(&corpus, &augmenter, seed);
    write_atomic(output, &pairs_to_jsonl(&pairs))?;
    let changed = pairs.iter().filter(|p| p.changed).count();
    eprintln!("{changed}/{} sentences changed", pairs.len());
    Ok(())
}

fn stats(opts: &AugmentOpts) -> Result<(), Failure> {
    let (augmenter, seed) = augmenter(opts)?;
    let corpus = read_corpus(&opts.input)?;
    let report = coverage_stats(&corpus, &augmenter, seed).map_err(|e| data_err(&opts.input, e))?;
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    Ok(())
}

/// Reads a config file and the lexicons it names, resolved against the
/// file's directory.
fn read_config(path: &Path) -> Result<(ConfigFile, PathBuf), Failure> {
    let config = load(path, parse_config)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut config = config;
    let augment = &mut config.train.augment;
    if let Some(p) = &config.aux_lexicon {
        augment.aux = load(&base.join(p), AuxLexicon::parse)?;
    }
    if let Some(p) = &config.neg_lexicon {
        augment.neg = load(&base.join(p), NegLexicon::parse)?;
    }
    if let Some(p) = &config.syn_lexicon {
        augment.synonyms = Some(load(&base.join(p), SynonymLexicon::parse)?);
    }
    Augmenter::new(config.train.method, augment).map_err(|e| data_err(path, e))?;
    eprintln!("seed: {}", config.train.seed);
    Ok((config, base))
}

fn train_cmd(config_path: &Path, corpus_path: &Path, output: &Path, trace: &Path) -> Result<(), Failure> {
    let (config, _) = read_config(config_path)?;
    let corpus = read_corpus(corpus_path)?;
    let steps_per_epoch = corpus.len().div_ceil(config.train.batch_size);
    let total = steps_per_epoch * config.train.epochs;
    let out = train_with(&corpus, &config.train, |step, loss| {
        if step % 50 == 0 || step == total {
            eprintln!("step {step}/{total} loss {loss:.6}");
        }
    })
    .map_err(|e| data_err(corpus_path, e))?;
    write_atomic(output, &Checkpoint::from_encoder(&out.encoder, config.train.seed).to_json())?;
    write_atomic(trace, &trace_csv(&out.trace))?;
    Ok(())
}

fn eval_cmd(ckpt: &Path, sts: &Path) -> Result<(), Failure> {
    let checkpoint = load(ckpt, Checkpoint::from_json)?;
    eprintln!("seed: {}", checkpoint.seed);
    let encoder = checkpoint.into_encoder().map_err(|e| data_err(ckpt, e))?;
    let examples = load(sts, parse_sts_tsv)?;
    let r = evaluate_sts(&encoder, &examples).map_err(|e| data_err(sts, e))?;
    println!("{r:.4}");
    Ok(())
}

fn gradcheck_cmd(config_path: &Path) -> Result<(), Failure> {
    let (config, base) = read_config(config_path)?;
    let corpus = match &config.corpus {
        Some(p) => read_corpus(&base.join(p))?,
        None => synthetic_corpus(config.train.batch_size.max(2), config.train.seed),
    };
    let report = check_config(&corpus, &config).map_err(|e| data_err(config_path, e))?;
    println!(
        "checked {} parameters, max relative error {:.3e} (tolerance {:.0e})",
        report.checked, report.max_relative_error, report.tolerance
    );
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "gradient check failed on {} parameters; worst {:?}",
            report.offending.len(),
            report.worst
        )))
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("SDA_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("SDA_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Augment { opts, output } => augment(&opts, &output),
        Command::Stats { opts } => stats(&opts),
        Command::Train {
            config,
            corpus,
            output,
            trace,
        } => train_cmd(&config, &corpus, &output, &trace),
        Command::Eval { ckpt, sts } => eval_cmd(&ckpt, &sts),
        Command::Gradcheck { config } => gradcheck_cmd(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(m) | Failure::Data(m) | Failure::Check(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
