use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use bowsense::harness::bench::write_runtime_csv;
use bowsense::harness::sweep::{noise_grid, write_csv};
use bowsense::{
    add_noise, bench_runtime, evaluate, load_dictionary, mutual_coherence, order_words, read_word_list,
    sentence_to_bow, sweep, synthesize, Dictionary, NoiseSpec, QuestTrace, Snr, SolverConfig, SolverKind, SynonymTable,
    WordLexicon,
};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "bowsense", version, about = "Recover bag-of-words actions from sums of word embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mutual coherence of the dictionary (JSON)
    Analyze(DictArgs),
    /// Recover one sentence from its (optionally noisy) embedding sum
    Recover(RecoverArgs),
    /// Replay a trace through one solver (JSON report)
    Evaluate(EvaluateArgs),
    /// Grid of solvers and noise levels (CSV)
    Sweep(SweepArgs),
    /// Solver runtime table (CSV)
    Bench(BenchArgs),
}

#[derive(Args)]
struct DictArgs {
    /// GloVe-format embeddings file
    #[arg(long, default_value = "data/game_glove50.txt")]
    embeddings: PathBuf,
    /// One token per line; restricts and orders the dictionary
    #[arg(long, default_value = "data/game_words.txt")]
    words: PathBuf,
}

#[derive(Args)]
struct SolverArgs {
    /// Beam width for ikomp / ikomp-paper
    #[arg(long = "K", short = 'K', default_value_t = 20)]
    k: usize,
    /// Maximum number of words per sentence
    #[arg(long = "L", short = 'L', default_value_t = 4)]
    l: usize,
    /// FISTA regularization; the L1 weight is 1/(2 lambda)
    #[arg(long, default_value_t = 5.0)]
    fista_lambda: f64,
    #[arg(long, default_value_t = 20_000)]
    fista_max_iter: usize,
    /// Clip negatives inside FISTA iterations
    #[arg(long)]
    fista_nonnegative: bool,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            max_words: self.l,
            beam_width: self.k,
            fista_lambda: self.fista_lambda,
            fista_max_iter: self.fista_max_iter,
            fista_nonnegative: self.fista_nonnegative,
            ..SolverConfig::default()
        }
    }
}

#[derive(Args)]
struct RecoverArgs {
    #[command(flatten)]
    dict: DictArgs,
    #[arg(long)]
    sentence: String,
    #[arg(long, default_value = "ikomp")]
    solver: SolverKind,
    #[command(flatten)]
    solver_args: SolverArgs,
    /// Signal-to-noise norm ratio; `inf` for none
    #[arg(long, default_value = "inf")]
    snr: Snr,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Word-class lexicon used to order the recovered words
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    trace: PathBuf,
    #[command(flatten)]
    dict: DictArgs,
    #[arg(long, default_value = "ikomp")]
    solver: SolverKind,
    #[command(flatten)]
    solver_args: SolverArgs,
    #[arg(long, default_value = "inf")]
    snr: Snr,
    /// Probability a demonstration is replaced by another action of the trace
    #[arg(long, default_value_t = 0.0)]
    wrong_p: f64,
    /// Probability a demonstration is reworded with synonyms
    #[arg(long, default_value_t = 0.0)]
    synonym_p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON object mapping a token to its synonyms
    #[arg(long)]
    synonyms: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Include per-step outcomes in the report
    #[arg(long)]
    per_step: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    trace: PathBuf,
    #[command(flatten)]
    dict: DictArgs,
    #[arg(long, value_delimiter = ',', default_value = "omp,iomp,ikomp")]
    solvers: Vec<SolverKind>,
    #[command(flatten)]
    solver_args: SolverArgs,
    #[arg(long, value_delimiter = ',', default_value = "inf")]
    snr_grid: Vec<Snr>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    wrong_p_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    synonym_p_grid: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    synonyms: Option<PathBuf>,
    /// Output CSV; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    dict: DictArgs,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Solver variants as `solver` or `solver:K`
    #[arg(long, value_delimiter = ',', default_value = "omp,iomp,ikomp:3,ikomp:20,ikomp:112,fista")]
    solvers: Vec<String>,
    #[arg(long = "L", short = 'L', default_value_t = 4)]
    l: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl DictArgs {
    fn load(&self) -> anyhow::Result<Dictionary> {
        let words = read_word_list(&self.words)?;
        Ok(load_dictionary(&self.embeddings, Some(&words))?)
    }
}

fn load_synonyms(path: Option<&Path>) -> anyhow::Result<SynonymTable> {
    Ok(path.map(SynonymTable::load).transpose()?.unwrap_or_default())
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn analyze(args: DictArgs) -> anyhow::Result<()> {
    let dict = args.load()?;
    let report = mutual_coherence(&dict)?;
    let mut value = serde_json::to_value(&report)?;
    value["d"] = json!(dict.len());
    value["m"] = json!(dict.dim());
    print_json(&value)
}

fn recover(args: RecoverArgs) -> anyhow::Result<()> {
    let dict = args.dict.load()?;
    let cfg = args.solver_args.config();
    cfg.validate()?;
    let gold = sentence_to_bow(&args.sentence, &dict)?;
    let y = add_noise(&synthesize(&dict, &gold)?, args.snr, args.seed)?;
    let best = args.solver.solve(&dict, &y, &cfg)?.into_iter().next().expect("at least one candidate");

    let sentence = match &args.lexicon {
        Some(p) if !best.bow.is_empty() => {
            let lex = WordLexicon::load(p)?;
            lex.check_against(&dict)?;
            order_words(&best.bow, &lex, &dict)?
        }
        _ => best.bow.tokens(&dict).join(" "),
    };
    print_json(&json!({
        "solver": args.solver,
        "input": args.sentence,
        "recovered": best.bow.to_token_counts(&dict),
        "sentence": sentence,
        "residual": best.residual_norm_sq,
        "correct": best.bow == gold,
    }))
}

fn evaluate_cmd(args: EvaluateArgs) -> anyhow::Result<()> {
    let dict = args.dict.load()?;
    let trace = QuestTrace::load(&args.trace)?;
    let synonyms = load_synonyms(args.synonyms.as_deref())?;
    let lexicon = args.lexicon.as_ref().map(WordLexicon::load).transpose()?;
    if let Some(lex) = &lexicon {
        lex.check_against(&dict)?;
    }
    let noise =
        NoiseSpec { snr: args.snr, wrong_action_prob: args.wrong_p, synonym_prob: args.synonym_p, seed: args.seed };
    let mut report =
        evaluate(&trace, &dict, lexicon.as_ref(), args.solver, &args.solver_args.config(), &noise, &synonyms)?;
    if !args.per_step {
        report.per_step.clear();
    }
    print_json(&serde_json::to_value(&report)?)
}

fn sweep_cmd(args: SweepArgs) -> anyhow::Result<()> {
    let dict = args.dict.load()?;
    let trace = QuestTrace::load(&args.trace)?;
    let synonyms = load_synonyms(args.synonyms.as_deref())?;
    let grid = noise_grid(&args.snr_grid, &args.wrong_p_grid, &args.synonym_p_grid, args.seed);
    let rows = sweep(&trace, &dict, None, &args.solvers, &args.solver_args.config(), &grid, args.repeats, &synonyms)?;
    write_csv(&rows, output(args.out.as_deref())?)?;
    Ok(())
}

fn parse_variant(variant: &str, l: usize) -> anyhow::Result<(SolverKind, SolverConfig)> {
    let (name, k) = match variant.split_once(':') {
        Some((name, k)) => (name, Some(k.parse::<usize>().with_context(|| format!("bad beam width in {variant:?}"))?)),
        None => (variant, None),
    };
    let solver: SolverKind = name.parse()?;
    let cfg = SolverConfig { max_words: l, beam_width: k.unwrap_or(1), ..SolverConfig::default() };
    Ok((solver, cfg))
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    let dict = args.dict.load()?;
    let variants = args.solvers.iter().map(|s| parse_variant(s, args.l)).collect::<anyhow::Result<Vec<_>>>()?;
    let rows = bench_runtime(&dict, &variants, args.samples, args.seed)?;
    write_runtime_csv(&rows, output(args.out.as_deref())?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Recover(a) => recover(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
