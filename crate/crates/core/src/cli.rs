//! Command-line front end: `gsv classify | extract | bias | bench`.
//!
//! Exit codes: `classify` returns 0/1/2 for EXP_ERROR/POLY_ERROR/
//! NON_EXTRACTABLE; `extract` returns 2 for a non-extractable source.
//! Parse and validation failures return 64, tree or enumeration guard
//! violations 65, I/O failures 74.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::classifier::{check_mvd, classify, mvr_witness, Category};
use crate::corpus;
use crate::error::GsvError;
use crate::extractors::{
    select, table_from_json, AnyExtractor, ConstantPlus, Extractor, ExtractorKind, MultiBitFast, MultiBitNaive,
    OutputKind,
};
use crate::model::{sample_sequence, ConstantDie, SourceSpec, Strategy, StrategyTree};
use crate::oracle::{self, ExtractorTable};
use crate::rational::{self, Rational};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_GUARD: i32 = 65;
pub const EXIT_IO: i32 = 74;
pub const EXIT_NOT_EXTRACTABLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gsv", version, about = "Classify generalized SV sources and extract randomness from them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide NK, NK+ and HNK and report the extraction category.
    Classify(ClassifyArgs),
    /// Sample a sequence under a strategy and run an extractor on it.
    Extract(ExtractArgs),
    /// Exact worst-case bias of an extractor for a range of sample counts.
    Bias(BiasArgs),
    /// Wall-time medians of the naive and list-based multi-bit extractors.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the result to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Source JSON file or preset (e1, e2, fair-coin, two-dice, sv, sv:<delta>).
    #[arg(long)]
    pub source: String,
    /// Also construct and verify an MVR witness at this epsilon.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// With --epsilon, also report MVD(epsilon, delta) for that witness.
    #[arg(long)]
    pub delta: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub source: String,
    /// threshold, bit-exp, multibit-naive, multibit-fast, constant or table:<path>.
    #[arg(long, default_value = "bit-exp")]
    pub extractor: String,
    /// Error parameter for the threshold extractor.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Number of samples.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Output bits for the multi-bit extractors.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Strategy tree JSON file, "worst-case" or "constant:<die>".
    #[arg(long, default_value = "constant:0")]
    pub strategy: String,
    /// Write one CSV row per sample: t, die, face, psi, state.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    #[arg(long)]
    pub source: String,
    #[arg(long, default_value = "bit-exp")]
    pub extractor: String,
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Sample counts: a single value or an inclusive range "a..b".
    #[arg(long, default_value = "1..8")]
    pub n: String,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Evaluate under this strategy instead of the worst case.
    #[arg(long)]
    pub strategy: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "fair-coin")]
    pub source: String,
    /// Comma-separated sample counts.
    #[arg(long, default_value = "200")]
    pub n: String,
    /// Comma-separated output lengths.
    #[arg(long, default_value = "1,14")]
    pub m: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repetitions per cell (at least 5).
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Skip the naive extractor.
    #[arg(long)]
    pub fast_only: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    Gsv(GsvError),
    Io(String),
}

impl From<GsvError> for CliError {
    fn from(e: GsvError) -> Self {
        CliError::Gsv(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Gsv(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Gsv(GsvError::TreeLimit { .. } | GsvError::EnumLimit { .. }) => EXIT_GUARD,
            CliError::Gsv(GsvError::NotHnk) => EXIT_NOT_EXTRACTABLE,
            CliError::Gsv(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Bias(a) => cmd_bias(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gsv: {e}");
            e.exit_code()
        }
    }
}

pub fn load_source(arg: &str) -> CliResult<SourceSpec> {
    let path = Path::new(arg);
    let looks_like_path = arg.contains(std::path::MAIN_SEPARATOR) || arg.ends_with(".json");
    if path.is_file() || looks_like_path {
        let text = fs::read_to_string(path)?;
        Ok(SourceSpec::from_json(&text)?)
    } else {
        Ok(corpus::preset(arg)?)
    }
}

fn parse_opt(value: &Option<String>) -> CliResult<Option<Rational>> {
    Ok(value.as_deref().map(rational::parse).transpose()?)
}

fn emit(output: &OutputArgs, body: &str) -> CliResult<()> {
    match &output.out {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn json_text(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    text
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(e.to_string());
    writer.write_record(header).map_err(err)?;
    for row in rows {
        writer.write_record(row).map_err(err)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn category_code(category: Category) -> i32 {
    match category {
        Category::ExpError => 0,
        Category::PolyError => 1,
        Category::NonExtractable => 2,
    }
}

pub fn cmd_classify(args: &ClassifyArgs) -> CliResult<i32> {
    let spec = load_source(&args.source)?;
    let report = classify(&spec)?;
    let epsilon = parse_opt(&args.epsilon)?;
    let delta = parse_opt(&args.delta)?;
    if delta.is_some() && epsilon.is_none() {
        return Err(GsvError::Parameter("--delta needs --epsilon".into()).into());
    }
    let mut mvr = Value::Null;
    let mut mvd = Value::Null;
    if let Some(eps) = &epsilon {
        if report.hnk.holds {
            let witness = mvr_witness(&spec, eps)?;
            if let Some(delta) = &delta {
                mvd = Value::Bool(check_mvd(&spec, &witness.values, eps, delta)?);
            }
            mvr = serde_json::to_value(&witness).expect("witness serializes");
        }
    }
    let body = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut value = json!({
                "faces": spec.face_labels,
                "category": report.category.as_str(),
                "report": serde_json::to_value(&report).expect("report serializes"),
            });
            if epsilon.is_some() {
                value["mvr_witness"] = mvr;
            }
            if delta.is_some() {
                value["mvd"] = mvd;
            }
            json_text(&value)
        }
        Format::Csv => csv_text(
            &["category", "nk", "nk_plus", "hnk"],
            &[vec![
                report.category.as_str().to_string(),
                report.nk.holds.to_string(),
                report.nk_plus.holds.to_string(),
                report.hnk.holds.to_string(),
            ]],
        )?,
    };
    emit(&args.output, &body)?;
    Ok(category_code(report.category))
}

fn build_extractor(spec: &SourceSpec, name: &str, epsilon: Option<&Rational>, m: usize) -> CliResult<(AnyExtractor, Option<Vec<Rational>>)> {
    if name == "constant" {
        return Ok((AnyExtractor::Constant(ConstantPlus), None));
    }
    if let Some(path) = name.strip_prefix("table:") {
        let text = fs::read_to_string(path)?;
        let table = table_from_json(&text, spec.num_faces())?;
        return Ok((AnyExtractor::Table(table), None));
    }
    let kind: ExtractorKind = name.parse()?;
    let (ext, witness) = select(spec, kind, epsilon, m)?;
    Ok((ext, Some(witness.values)))
}

fn table_samples(ext: &AnyExtractor) -> Option<usize> {
    match ext {
        AnyExtractor::Table(t) => Some(t.n),
        _ => None,
    }
}

fn resolve_strategy(
    spec: &SourceSpec,
    name: &str,
    table: &ExtractorTable<&AnyExtractor>,
) -> CliResult<Box<dyn Strategy>> {
    if let Some(die) = name.strip_prefix("constant:") {
        let die: usize = die
            .parse()
            .map_err(|_| GsvError::Parameter(format!("bad die index in strategy {name:?}")))?;
        if die >= spec.num_dice() {
            return Err(GsvError::Strategy { die, dice: spec.num_dice() }.into());
        }
        return Ok(Box::new(ConstantDie(die)));
    }
    if name == "worst-case" {
        return Ok(match table.output_kind() {
            OutputKind::Bit => {
                let report = oracle::exact_extremes(spec, table)?;
                let tree = if report.max_expectation >= -report.min_expectation.clone() {
                    report.max_strategy
                } else {
                    report.min_strategy
                };
                Box::new(tree)
            }
            OutputKind::Index { m } => Box::new(oracle::exact_multibit_error(spec, table, m)?.1),
        });
    }
    let text = fs::read_to_string(name)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| GsvError::Parse(format!("strategy file: {e}")))?;
    let tree = StrategyTree::from_json(&value, &spec.face_labels)?;
    if tree.max_die() >= spec.num_dice() {
        return Err(GsvError::Strategy { die: tree.max_die(), dice: spec.num_dice() }.into());
    }
    Ok(Box::new(tree))
}

fn output_text(out: crate::extractors::Output, kind: OutputKind) -> String {
    match kind {
        OutputKind::Bit => out.to_string(),
        OutputKind::Index { m } => out.bits(m),
    }
}

pub fn cmd_extract(args: &ExtractArgs) -> CliResult<i32> {
    let spec = load_source(&args.source)?;
    let epsilon = parse_opt(&args.epsilon)?;
    let (ext, psi) = match build_extractor(&spec, &args.extractor, epsilon.as_ref(), args.m) {
        Err(CliError::Gsv(GsvError::NotHnk)) => {
            eprintln!("gsv: source is NON_EXTRACTABLE");
            return Ok(EXIT_NOT_EXTRACTABLE);
        }
        other => other?,
    };
    let n = table_samples(&ext).unwrap_or(args.n);
    let table = ExtractorTable::new(&ext, n);
    let strategy = resolve_strategy(&spec, &args.strategy, &table)?;
    let faces = sample_sequence(&spec, strategy.as_ref(), n, args.seed)?;

    let mut state = ext.start();
    let mut rows = Vec::with_capacity(if args.transcript.is_some() { n } else { 0 });
    for (t, &f) in faces.iter().enumerate() {
        ext.absorb(&mut state, f);
        if args.transcript.is_some() {
            rows.push(vec![
                (t + 1).to_string(),
                strategy.choose(&faces[..t]).to_string(),
                spec.face_labels[f].clone(),
                psi.as_ref().map(|p| rational::format(&p[f])).unwrap_or_default(),
                state.summary(),
            ]);
        }
    }
    let out = ext.output(&state);
    if let Some(path) = &args.transcript {
        fs::write(path, csv_text(&["t", "die", "face", "psi", "state"], &rows)?)?;
    }
    let kind = ext.output_kind();
    let m = match kind {
        OutputKind::Bit => 1,
        OutputKind::Index { m } => m,
    };
    let output = output_text(out, kind);
    let body = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&json!({
            "extractor": args.extractor,
            "n": n,
            "m": m,
            "seed": args.seed,
            "strategy": args.strategy,
            "witness": psi.as_ref().map(|p| p.iter().map(rational::format).collect::<Vec<_>>()),
            "output": output,
        })),
        Format::Csv => csv_text(
            &["extractor", "n", "m", "seed", "output"],
            &[vec![args.extractor.clone(), n.to_string(), m.to_string(), args.seed.to_string(), output]],
        )?,
    };
    emit(&args.output, &body)?;
    Ok(0)
}

pub fn parse_range(text: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Gsv(GsvError::Parameter(format!("bad sample range {text:?}; use N or A..B")));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        Ok(vec![text.trim().parse().map_err(|_| bad())?])
    }
}

pub fn parse_list(text: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Gsv(GsvError::Parameter(format!("bad list entry {t:?} in {text:?}"))))
        })
        .collect()
}

pub fn cmd_bias(args: &BiasArgs) -> CliResult<i32> {
    let spec = load_source(&args.source)?;
    let epsilon = parse_opt(&args.epsilon)?;
    let (ext, _) = match build_extractor(&spec, &args.extractor, epsilon.as_ref(), args.m) {
        Err(CliError::Gsv(GsvError::NotHnk)) => {
            eprintln!("gsv: source is NON_EXTRACTABLE");
            return Ok(EXIT_NOT_EXTRACTABLE);
        }
        other => other?,
    };
    let ns = match table_samples(&ext) {
        Some(n) => vec![n],
        None => parse_range(&args.n)?,
    };
    let mut rows: Vec<(usize, Rational)> = Vec::new();
    let mut details: Vec<Value> = Vec::new();
    for &n in &ns {
        let table = ExtractorTable::new(&ext, n);
        let fixed = args.strategy.as_deref().map(|s| resolve_strategy(&spec, s, &table)).transpose()?;
        let (bias, detail) = match (table.output_kind(), fixed) {
            (OutputKind::Bit, None) => {
                let report = oracle::exact_extremes(&spec, &table)?;
                (report.bias.clone(), report.to_json(&spec.face_labels))
            }
            (OutputKind::Bit, Some(s)) => {
                let e = oracle::expectation(&oracle::output_distribution(&spec, s.as_ref(), &table)?)?;
                let b = num_traits::Signed::abs(&e);
                (b.clone(), json!({ "expectation": rational::format(&e) }))
            }
            (OutputKind::Index { m }, None) => {
                let (tv, tree) = oracle::exact_multibit_error(&spec, &table, m)?;
                (tv, json!({ "strategy": tree.to_json(&spec.face_labels) }))
            }
            (OutputKind::Index { m }, Some(s)) => (oracle::multibit_error_under(&spec, s.as_ref(), &table, m)?, Value::Null),
        };
        let mut entry = json!({ "n": n, "bias": rational::format(&bias) });
        if !detail.is_null() {
            entry["detail"] = detail;
        }
        details.push(entry);
        rows.push((n, bias));
    }
    let body = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            oracle::write_bias_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
        Format::Json => json_text(&Value::Array(details)),
    };
    emit(&args.output, &body)?;
    Ok(0)
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let k = samples.len();
    if k % 2 == 1 {
        samples[k / 2]
    } else {
        (samples[k / 2 - 1] + samples[k / 2]) / 2.0
    }
}

/// Median wall time in seconds of `f` over `reps` runs, and its last result.
pub fn time_median<R>(reps: usize, mut f: impl FnMut() -> R) -> (f64, R) {
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let r = f();
        times.push(start.elapsed().as_secs_f64());
        last = Some(r);
    }
    (median(times), last.expect("at least one repetition"))
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<i32> {
    let spec = load_source(&args.source)?;
    let reps = args.reps.max(5);
    let (_, witness) = match select(&spec, ExtractorKind::MultibitFast, None, 1) {
        Err(GsvError::NotHnk) => {
            eprintln!("gsv: source is NON_EXTRACTABLE");
            return Ok(EXIT_NOT_EXTRACTABLE);
        }
        other => other?,
    };
    let psi = witness.values;
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for &n in &parse_list(&args.n)? {
        let faces = sample_sequence(&spec, &ConstantDie(0), n, args.seed)?;
        for &m in &parse_list(&args.m)? {
            let fast = MultiBitFast::new(&psi, m)?;
            let (fast_s, fast_out) = time_median(reps, || fast.extract(&faces));
            let naive = if args.fast_only || m > crate::extractors::NAIVE_M_LIMIT {
                None
            } else {
                let naive = MultiBitNaive::new(&psi, m)?;
                Some(time_median(reps, || naive.extract(&faces)))
            };
            let (naive_s, speedup, matches) = match &naive {
                Some((t, out)) => (format!("{t:.6}"), format!("{:.2}", t / fast_s), (*out == fast_out).to_string()),
                None => (String::new(), String::new(), String::new()),
            };
            json_rows.push(json!({
                "n": n, "m": m, "reps": reps,
                "naive_median_s": naive.as_ref().map(|(t, _)| *t),
                "fast_median_s": fast_s,
                "outputs_match": naive.as_ref().map(|(_, out)| *out == fast_out),
            }));
            rows.push(vec![n.to_string(), m.to_string(), reps.to_string(), naive_s, format!("{fast_s:.6}"), speedup, matches]);
        }
    }
    let body = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_text(
            &["n", "m", "reps", "naive_median_s", "fast_median_s", "speedup", "outputs_match"],
            &rows,
        )?,
        Format::Json => json_text(&Value::Array(json_rows)),
    };
    emit(&args.output, &body)?;
    Ok(0)
}
