//! Command line front end over the library.
//!
//! Exit codes: 0 on success, 1 when the inputs are well formed files
//! with bad content (rule errors, unparseable lines under `--strict`,
//! mismatched corpora), 2 on I/O trouble. Diagnostics go to stderr;
//! stdout carries only payload.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{
    apply_rules, replay_trace, run_corpus, run_corpus_parallel, EngineConfig,
};
use crate::metrics::{evaluate, EvalCorpus};
use crate::phrases::{
    compare_reports, phrase_report, read_alignment_corpus, ExtractionMode, PhraseError,
};
use crate::ruleset::{RuleSet, BUILTIN_RULES_TEXT};
use crate::tags::TagRegistry;
use crate::treebank::parse_tree;

#[derive(Parser)]
#[command(
    name = "treeorder",
    version,
    about = "Reorder parsed sentences with declarative rules, score translations, count phrase pairs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reorder a corpus of bracketed parse trees into token lines
    Reorder(ReorderArgs),
    /// Show every rule firing for each input tree
    Trace(TraceArgs),
    /// Check a rule file and list what it defines
    RulesValidate(RulesValidateArgs),
    /// Score a hypothesis file against reference translations
    Eval(EvalArgs),
    /// Count alignment-consistent phrase pairs, optionally against a baseline
    PhraseStats(PhraseStatsArgs),
}

#[derive(Args)]
struct RuleOpts {
    /// Rule source: `builtin`, a rule file path, or `only:ID,ID` to
    /// restrict the builtin set
    #[arg(long, default_value = "builtin")]
    rules: String,
    /// Restrict firing to these comma separated rule ids
    #[arg(long)]
    only: Option<String>,
    /// Extra tag class definitions, one `name = LABEL ...` per line
    #[arg(long)]
    tags: Option<PathBuf>,
    /// Keep rewriting each node until no rule matches there
    #[arg(long)]
    fixpoint: bool,
    /// Firings allowed per node in fixpoint mode
    #[arg(long, default_value_t = 10)]
    max_iterations: usize,
}

#[derive(Args)]
struct ReorderArgs {
    #[command(flatten)]
    rules: RuleOpts,
    /// Treat unparseable lines as fatal instead of passing tokens through
    #[arg(long)]
    strict: bool,
    /// Worker threads; 0 means one per core
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Input file, stdin when absent
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output file, stdout when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    rules: RuleOpts,
    /// One JSON trace object per line instead of the readable layout
    #[arg(long)]
    json: bool,
    /// Re-run each trace against its input and verify the output
    #[arg(long)]
    replay: bool,
    /// Input file, stdin when absent
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output file, stdout when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RulesValidateArgs {
    /// Rule source: `builtin` or a rule file path
    #[arg(long, default_value = "builtin")]
    rules: String,
    /// Extra tag class definitions
    #[arg(long)]
    tags: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Hypothesis translations, one per line
    #[arg(long)]
    hyp: PathBuf,
    /// Reference files, each line-parallel with the hypotheses
    #[arg(long, required = true, num_args = 1..)]
    refs: Vec<PathBuf>,
    /// Highest n-gram order for BLEU
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    /// Highest n-gram order for NIST
    #[arg(long, default_value_t = 5)]
    nist_n: usize,
    /// Add-one smoothing for BLEU orders two and up
    #[arg(long)]
    smooth: bool,
    /// Emit the full report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Extended,
}

#[derive(Args)]
struct PhraseStatsArgs {
    /// Source-side sentences, one per line
    #[arg(long)]
    source: PathBuf,
    /// Target-side sentences, line-parallel with the source
    #[arg(long)]
    target: PathBuf,
    /// Word alignments as `i-j` pairs, line-parallel with the source
    #[arg(long)]
    alignment: PathBuf,
    /// Baseline triple to diff against: source, target, alignment
    #[arg(long, num_args = 3, value_names = ["SOURCE", "TARGET", "ALIGNMENT"])]
    compare: Option<Vec<PathBuf>>,
    /// Shortest source phrase to count
    #[arg(long, default_value_t = 2)]
    min_len: usize,
    /// Longest source phrase to extract and count
    #[arg(long, default_value_t = 7)]
    max_len: usize,
    /// Unaligned-word handling at target span edges
    #[arg(long, value_enum, default_value_t = ModeArg::Extended)]
    mode: ModeArg,
    /// Emit the count table as JSON
    #[arg(long)]
    json: bool,
}

enum Failure {
    Content(String),
    Io(String),
}

type CliResult = Result<(), Failure>;

fn content(msg: impl Into<String>) -> Failure {
    Failure::Content(msg.into())
}

fn io_fail(context: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", context.display()))
}

pub fn run() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Content(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.cmd {
        Cmd::Reorder(args) => reorder(args),
        Cmd::Trace(args) => trace(args),
        Cmd::RulesValidate(args) => rules_validate(args),
        Cmd::Eval(args) => eval(args),
        Cmd::PhraseStats(args) => phrase_stats(args),
    }
}

fn load_registry(tags: Option<&Path>) -> Result<TagRegistry, Failure> {
    let mut registry = TagRegistry::builtin();
    if let Some(path) = tags {
        let text = std::fs::read_to_string(path).map_err(|e| io_fail(path, e))?;
        registry
            .load_definitions(&text, false)
            .map_err(|e| content(format!("{}: {e}", path.display())))?;
    }
    Ok(registry)
}

/// Resolves `--rules`/`--only`/`--tags` into a rule set plus the
/// enabled-id set, if any.
fn load_rules(opts: &RuleOpts) -> Result<(RuleSet, Option<BTreeSet<String>>), Failure> {
    let registry = load_registry(opts.tags.as_deref())?;
    let (text, path, mut enabled): (String, String, Option<BTreeSet<String>>) =
        if opts.rules == "builtin" {
            (BUILTIN_RULES_TEXT.to_string(), "builtin rules".into(), None)
        } else if let Some(ids) = opts.rules.strip_prefix("only:") {
            (
                BUILTIN_RULES_TEXT.to_string(),
                "builtin rules".into(),
                Some(split_ids(ids)),
            )
        } else {
            let path = PathBuf::from(&opts.rules);
            let text = std::fs::read_to_string(&path).map_err(|e| io_fail(&path, e))?;
            (text, path.display().to_string(), None)
        };
    let rules = RuleSet::from_text(&text, registry)
        .map_err(|e| content(format!("{path}: {e}")))?;
    if let Some(ids) = &opts.only {
        enabled = Some(split_ids(ids));
    }
    if let Some(ids) = &enabled {
        for id in ids {
            if rules.get(id).is_none() {
                return Err(content(format!("unknown rule id `{id}`")));
            }
        }
    }
    Ok((rules, enabled))
}

fn split_ids(ids: &str) -> BTreeSet<String> {
    ids.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

fn engine_config(opts: &RuleOpts, enabled: Option<BTreeSet<String>>) -> EngineConfig {
    EngineConfig { fixpoint: opts.fixpoint, max_iterations: opts.max_iterations, enabled }
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>, Failure> {
    match path {
        None => Ok(Box::new(BufReader::new(io::stdin()))),
        Some(p) => {
            let f = File::open(p).map_err(|e| io_fail(p, e))?;
            Ok(Box::new(BufReader::new(f)))
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) => {
            let f = File::create(p).map_err(|e| io_fail(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn stream_fail(e: io::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn reorder(args: ReorderArgs) -> CliResult {
    let (rules, enabled) = load_rules(&args.rules)?;
    let config = engine_config(&args.rules, enabled);
    let input = open_input(args.input.as_deref())?;
    let mut output = open_output(args.output.as_deref())?;

    let summary = if args.strict {
        let mut summary = crate::engine::CorpusSummary::default();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(stream_fail)?;
            let lineno = i + 1;
            summary.lines += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                summary.blank_lines += 1;
                writeln!(output).map_err(stream_fail)?;
                continue;
            }
            let tree = parse_tree(trimmed)
                .map_err(|e| content(format!("line {lineno}: {e}")))?;
            let (out, trace) = apply_rules(&tree, &rules, &config)
                .map_err(|e| content(format!("line {lineno}: {e}")))?;
            for step in &trace.steps {
                *summary.firings.entry(step.rule_id.clone()).or_insert(0) += 1;
            }
            writeln!(output, "{}", out.tokens().join(" ")).map_err(stream_fail)?;
        }
        summary
    } else if args.jobs == 1 {
        run_corpus(input, &rules, &config, &mut output).map_err(stream_fail)?
    } else {
        run_corpus_parallel(input, &rules, &config, &mut output, args.jobs)
            .map_err(stream_fail)?
    };
    output.flush().map_err(stream_fail)?;

    let fired: u64 = summary.firings.values().sum();
    eprintln!(
        "{} lines ({} blank), {} parse failures, {} engine failures, {} firings",
        summary.lines, summary.blank_lines, summary.parse_failures, summary.engine_failures, fired
    );
    if !summary.firings.is_empty() {
        let parts: Vec<String> =
            summary.firings.iter().map(|(id, n)| format!("{id}={n}")).collect();
        eprintln!("firings by rule: {}", parts.join(" "));
    }
    Ok(())
}

fn fmt_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(ToString::to_string).collect::<Vec<_>>().join(".")
    }
}

fn trace(args: TraceArgs) -> CliResult {
    let (rules, enabled) = load_rules(&args.rules)?;
    let config = engine_config(&args.rules, enabled);
    let input = open_input(args.input.as_deref())?;
    let mut output = open_output(args.output.as_deref())?;

    let mut replayed = 0u64;
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(stream_fail)?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            writeln!(output).map_err(stream_fail)?;
            continue;
        }
        let tree = parse_tree(trimmed).map_err(|e| content(format!("line {lineno}: {e}")))?;
        let (out, trace) =
            apply_rules(&tree, &rules, &config).map_err(|e| content(format!("line {lineno}: {e}")))?;
        if args.replay {
            let again = replay_trace(&tree, &trace, &rules)
                .map_err(|e| content(format!("line {lineno}: replay failed: {e}")))?;
            if again != out {
                return Err(content(format!("line {lineno}: replay diverged")));
            }
            replayed += 1;
        }
        if args.json {
            let json = serde_json::to_string(&trace)
                .map_err(|e| content(format!("line {lineno}: {e}")))?;
            writeln!(output, "{json}").map_err(stream_fail)?;
        } else {
            writeln!(output, "# line {lineno}").map_err(stream_fail)?;
            writeln!(output, "input:  {}", trace.input_tokens.join(" ")).map_err(stream_fail)?;
            for step in &trace.steps {
                writeln!(
                    output,
                    "  {} @ {}: {} -> {}",
                    step.rule_id,
                    fmt_path(&step.path),
                    step.before.join(" "),
                    step.after.join(" ")
                )
                .map_err(stream_fail)?;
            }
            writeln!(output, "output: {}", trace.output_tokens.join(" ")).map_err(stream_fail)?;
        }
    }
    output.flush().map_err(stream_fail)?;
    if args.replay {
        eprintln!("replay ok ({replayed} lines)");
    }
    Ok(())
}

fn rules_validate(args: RulesValidateArgs) -> CliResult {
    let opts = RuleOpts {
        rules: args.rules,
        only: None,
        tags: args.tags,
        fixpoint: false,
        max_iterations: 10,
    };
    let (rules, _) = load_rules(&opts)?;
    let mut out = BufWriter::new(io::stdout());
    for rule in rules.rules() {
        writeln!(
            out,
            "{:<8} p{:<3} {}({} : {})",
            rule.id,
            rule.priority,
            rule.category,
            rule.lhs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
            rule.rhs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
        )
        .map_err(stream_fail)?;
    }
    out.flush().map_err(stream_fail)?;
    eprintln!("{} rules ok", rules.len());
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>, Failure> {
    let f = File::open(path).map_err(|e| io_fail(path, e))?;
    BufReader::new(f).lines().collect::<Result<_, _>>().map_err(|e| io_fail(path, e))
}

fn eval(args: EvalArgs) -> CliResult {
    let hyp = read_lines(&args.hyp)?;
    let mut refs = Vec::new();
    for path in &args.refs {
        let lines = read_lines(path)?;
        if lines.len() != hyp.len() {
            return Err(content(format!(
                "{} has {} lines but {} has {}",
                args.hyp.display(),
                hyp.len(),
                path.display(),
                lines.len()
            )));
        }
        refs.push(lines);
    }
    let corpus = EvalCorpus::from_lines(&hyp, &refs).map_err(|e| content(e.to_string()))?;
    let report = evaluate(&corpus, args.max_n, args.nist_n, args.smooth)
        .map_err(|e| content(e.to_string()))?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(|e| content(e.to_string()))?);
    } else {
        println!(
            "BLEU {:.4} NIST {:.4} mWER {:.2} mPER {:.2}",
            report.bleu, report.nist, report.mwer, report.mper
        );
    }
    Ok(())
}

fn load_phrase_counts(
    source: &Path,
    target: &Path,
    alignment: &Path,
    args: &PhraseStatsArgs,
    mode: ExtractionMode,
) -> Result<crate::phrases::PhraseCounts, Failure> {
    let corpus = read_alignment_corpus(
        BufReader::new(File::open(source).map_err(|e| io_fail(source, e))?),
        BufReader::new(File::open(target).map_err(|e| io_fail(target, e))?),
        BufReader::new(File::open(alignment).map_err(|e| io_fail(alignment, e))?),
    )
    .map_err(|e| match e {
        PhraseError::Io(e) => Failure::Io(e.to_string()),
        other => content(other.to_string()),
    })?;
    Ok(phrase_report(&corpus, args.min_len, args.max_len, mode).counts())
}

fn phrase_stats(args: PhraseStatsArgs) -> CliResult {
    if args.min_len < 1 || args.min_len > args.max_len {
        return Err(content(format!(
            "bad length range {}..={}",
            args.min_len, args.max_len
        )));
    }
    let mode = match args.mode {
        ModeArg::Strict => ExtractionMode::Strict,
        ModeArg::Extended => ExtractionMode::Extended,
    };
    let counts = load_phrase_counts(&args.source, &args.target, &args.alignment, &args, mode)?;

    let Some(compare) = &args.compare else {
        if args.json {
            println!(
                "{}",
                serde_json::to_string_pretty(&counts).map_err(|e| content(e.to_string()))?
            );
        } else {
            println!("{:>3} {:>12} {:>12}", "len", "total", "distinct");
            for len in counts.min_len..=counts.max_len {
                println!(
                    "{:>3} {:>12} {:>12}",
                    len,
                    counts.totals.get(&len).copied().unwrap_or(0),
                    counts.distinct.get(&len).copied().unwrap_or(0)
                );
            }
        }
        return Ok(());
    };

    // The main triple is the variant; `--compare` names the baseline.
    let baseline = load_phrase_counts(&compare[0], &compare[1], &compare[2], &args, mode)?;
    let rows = compare_reports(&baseline, &counts).map_err(|e| content(e.to_string()))?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows).map_err(|e| content(e.to_string()))?);
    } else {
        let pct = |p: Option<f64>| p.map_or("-".to_string(), |v| format!("{v:.2}"));
        println!(
            "{:>3} {:>12} {:>12} {:>9} {:>8} {:>12} {:>12} {:>9} {:>8}",
            "len",
            "base_total",
            "total",
            "IOBL",
            "%IOBL",
            "base_dist",
            "distinct",
            "IOBL",
            "%IOBL"
        );
        for row in rows {
            println!(
                "{:>3} {:>12} {:>12} {:>9} {:>8} {:>12} {:>12} {:>9} {:>8}",
                row.len,
                row.baseline_total,
                row.variant_total,
                row.total_iobl,
                pct(row.total_pct),
                row.baseline_distinct,
                row.variant_distinct,
                row.distinct_iobl,
                pct(row.distinct_pct)
            );
        }
    }
    Ok(())
}
