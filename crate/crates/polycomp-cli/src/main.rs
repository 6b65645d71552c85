//! Command-line front end: compress and decompress polygon corpora, build
//! shared dictionaries and models, generate synthetic corpora, and report
//! statistics and benchmarks.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polycomp::alphabet::{parse_alphabet, Alphabet};
use polycomp::bench::{render_report, run_bench, train_models};
use polycomp::codecs::var::{reduced_var_payload, VarProfile};
use polycomp::codecs::{CodecContext, CodecKind};
use polycomp::corpus::{
    compute_stats, format_corpus, format_polygon, generate_corpus, parse_corpus,
    parse_corpus_lossy, GenParams, StatsOptions,
};
use polycomp::entropy::huffman::HuffmanCode;
use polycomp::entropy::model::{
    build_digit_model, build_value_counts, parse_digit_model, parse_value_counts,
    serialize_digit_model, serialize_value_counts, SymbolModel,
};
use polycomp::framing::{frame_message, unframe_message, MessagePart, MESSAGE_BUDGET};
use polycomp::rsd::{
    build_dictionary, parse_dictionary, serialize_dictionary, DictMode, RsdDictionary,
};
use polycomp::transforms::{
    dequantize, from_delta_consec, from_delta_min, quantize, to_delta_consec, to_delta_min,
    DeltaSeq, GeoPolygon, IntPolygon, Origin, Precision, TransformKind,
};

#[derive(Parser)]
#[command(
    name = "polycomp",
    version,
    about = "Lossless short-text codecs for small geographic polygons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a polygon corpus to payload lines or framed messages.
    Compress(CompressArgs),
    /// Decompress payload lines or framed messages back to a corpus.
    Decompress(DecompressArgs),
    /// Build a repeated-substring dictionary from a corpus.
    DictBuild(DictBuildArgs),
    /// Build a digit or value model from a corpus.
    ModelBuild(ModelBuildArgs),
    /// Report distribution statistics over a corpus.
    Stats(StatsArgs),
    /// Generate a seeded synthetic corpus.
    GenCorpus(GenCorpusArgs),
    /// Benchmark every codec over a corpus.
    Bench(BenchArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Input file, '-' for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Output file, stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GeoArgs {
    /// Quantized origin as 'x,y'.
    #[arg(long, default_value = "1600,6000")]
    origin: String,
    /// Coordinate precision digits (2 or 3).
    #[arg(long, default_value_t = 2)]
    precision: u8,
}

#[derive(Args)]
struct CodecArgs {
    /// Codec: comma, fixed, comma70, fixed70, var, var-rsd, big, poly, ae,
    /// golomb, huffman, lzw.
    #[arg(long, default_value = "poly")]
    codec: String,
    /// Transform: delta-min or delta.
    #[arg(long, default_value = "delta")]
    transform: String,
    /// Dictionary file from dict-build (repeatable, one per transform).
    #[arg(long)]
    dict: Vec<PathBuf>,
    /// Model file from model-build (repeatable).
    #[arg(long)]
    model: Vec<PathBuf>,
    /// Fixed Rice parameter M (a power of two) for the golomb codec.
    #[arg(long)]
    golomb_m: Option<u64>,
}

#[derive(Args)]
struct CompressArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    geo: GeoArgs,
    #[command(flatten)]
    codec: CodecArgs,
    /// Emit sentinel-framed fragments instead of bare payloads.
    #[arg(long)]
    frame: bool,
    /// Message text placed before each framed polygon; implies --frame.
    #[arg(long)]
    message: Option<String>,
    /// Message length budget for the over-budget warning.
    #[arg(long, default_value_t = MESSAGE_BUDGET)]
    budget: usize,
    /// Skip lines that fail to parse or encode instead of stopping.
    #[arg(long)]
    skip_errors: bool,
}

#[derive(Args)]
struct DecompressArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    geo: GeoArgs,
    #[command(flatten)]
    codec: CodecArgs,
    /// Treat input lines as framed messages; codec and transform come from
    /// each frame instead of the flags.
    #[arg(long)]
    frame: bool,
    /// Skip lines that fail to decode instead of stopping.
    #[arg(long)]
    skip_errors: bool,
}

#[derive(Args)]
struct DictBuildArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    geo: GeoArgs,
    /// Transform: delta-min or delta.
    #[arg(long, default_value = "delta-min")]
    transform: String,
    /// Counting mode: fixed or sliding.
    #[arg(long, default_value = "sliding")]
    mode: String,
    /// Maximum dictionary entries.
    #[arg(long, default_value_t = 16)]
    capacity: usize,
}

#[derive(Args)]
struct ModelBuildArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    geo: GeoArgs,
    /// Model kind: digit (for ae) or value (for huffman).
    #[arg(long, default_value = "digit")]
    kind: String,
    /// Transform: delta-min or delta.
    #[arg(long, default_value = "delta-min")]
    transform: String,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    geo: GeoArgs,
    /// Keep zero offsets and zero differences in the delta statistics.
    #[arg(long)]
    include_zero_deltas: bool,
    /// Directory for per-quantity histogram CSV files.
    #[arg(long)]
    hist_dir: Option<PathBuf>,
    /// Skip malformed lines instead of stopping.
    #[arg(long)]
    skip_errors: bool,
}

#[derive(Args)]
struct GenCorpusArgs {
    /// Output file, stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    min_points: usize,
    #[arg(long, default_value_t = 24)]
    max_points: usize,
    /// Probability of a zero offset component.
    #[arg(long, default_value_t = 0.15)]
    zero_prob: f64,
    /// Target mean offset, zeros included.
    #[arg(long, default_value_t = 40.0)]
    mean_delta: f64,
    #[arg(long, default_value_t = 349)]
    max_delta: u32,
    #[arg(long, default_value_t = 274)]
    max_consec_diff: u32,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    geo: GeoArgs,
    /// Dictionary counting mode used for training: fixed or sliding.
    #[arg(long, default_value = "sliding")]
    dict_mode: String,
    /// Dictionary capacity used for training.
    #[arg(long, default_value_t = 16)]
    capacity: usize,
    /// Skip malformed lines instead of stopping.
    #[arg(long)]
    skip_errors: bool,
}

enum CliError {
    Usage(String),
    Data(String),
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compress(args) => compress(args),
        Command::Decompress(args) => decompress(args),
        Command::DictBuild(args) => dict_build(args),
        Command::ModelBuild(args) => model_build(args),
        Command::Stats(args) => stats(args),
        Command::GenCorpus(args) => gen_corpus(args),
        Command::Bench(args) => bench(args),
    }
}

fn alphabet() -> CliResult<&'static Alphabet> {
    match std::env::var_os("POLYCOMP_ALPHABET") {
        None => Ok(Alphabet::canonical()),
        Some(path) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| usage(format!("POLYCOMP_ALPHABET {}: {e}", path.to_string_lossy())))?;
            let a = parse_alphabet(&text).map_err(|e| usage(format!("POLYCOMP_ALPHABET: {e}")))?;
            Ok(Box::leak(Box::new(a)))
        }
    }
}

fn read_input(input: &str) -> CliResult<String> {
    if input == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| data(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(input).map_err(|e| data(format!("{input}: {e}")))
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| data(format!("{}: {e}", path.to_string_lossy()))),
        None => {
            io::stdout()
                .write_all(content.as_bytes())
                .and_then(|_| io::stdout().flush())
                .map_err(|e| data(format!("stdout: {e}")))
        }
    }
}

impl GeoArgs {
    fn origin(&self) -> CliResult<Origin> {
        let (x, y) = self
            .origin
            .split_once(',')
            .ok_or_else(|| usage(format!("origin '{}' is not 'x,y'", self.origin)))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| usage(format!("origin component '{s}' is not a number")))
        };
        Ok(Origin {
            x: parse(x)?,
            y: parse(y)?,
        })
    }

    fn precision(&self) -> CliResult<Precision> {
        Precision::from_digits(self.precision).map_err(|e| usage(e.to_string()))
    }
}

fn parse_transform(s: &str) -> CliResult<TransformKind> {
    TransformKind::parse_token(s).map_err(|e| usage(e.to_string()))
}

fn parse_codec(s: &str) -> CliResult<CodecKind> {
    CodecKind::parse_token(s).map_err(|e| usage(e.to_string()))
}

fn parse_mode(s: &str) -> CliResult<DictMode> {
    DictMode::parse_token(s).map_err(|e| usage(e.to_string()))
}

fn load_corpus(text: &str, skip_errors: bool) -> CliResult<Vec<GeoPolygon>> {
    if skip_errors {
        let (polys, errors) = parse_corpus_lossy(text);
        for e in &errors {
            eprintln!("warning: {e}");
        }
        Ok(polys)
    } else {
        parse_corpus(text).map_err(data)
    }
}

/// Owned codec artifacts loaded from files, slotted by the transform each
/// file declares.
#[derive(Default)]
struct Artifacts {
    dict_min: Option<RsdDictionary>,
    dict_consec: Option<RsdDictionary>,
    digit_min: Option<SymbolModel<char>>,
    digit_consec: Option<SymbolModel<char>>,
    huffman_min: Option<HuffmanCode>,
    huffman_consec: Option<HuffmanCode>,
}

impl Artifacts {
    fn load(dicts: &[PathBuf], models: &[PathBuf]) -> CliResult<Artifacts> {
        let mut art = Artifacts::default();
        let occupied = |what: &str, path: &PathBuf| {
            usage(format!(
                "{what} for the transform of {} was already given",
                path.to_string_lossy()
            ))
        };
        for path in dicts {
            let text =
                fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.to_string_lossy())))?;
            let dict = parse_dictionary(&text).map_err(data)?;
            let slot = match dict.transform() {
                TransformKind::DeltaMin => &mut art.dict_min,
                TransformKind::DeltaConsec => &mut art.dict_consec,
            };
            if slot.is_some() {
                return Err(occupied("a dictionary", path));
            }
            *slot = Some(dict);
        }
        for path in models {
            let text =
                fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.to_string_lossy())))?;
            let header_kind = text
                .lines()
                .next()
                .unwrap_or("")
                .split_whitespace()
                .nth(1)
                .unwrap_or("")
                .to_string();
            match header_kind.as_str() {
                "digit" => {
                    let (model, kind) = parse_digit_model(&text).map_err(data)?;
                    let slot = match kind {
                        TransformKind::DeltaMin => &mut art.digit_min,
                        TransformKind::DeltaConsec => &mut art.digit_consec,
                    };
                    if slot.is_some() {
                        return Err(occupied("a digit model", path));
                    }
                    *slot = Some(model);
                }
                "value" => {
                    let (counts, kind) = parse_value_counts(&text).map_err(data)?;
                    let code = HuffmanCode::from_counts(&counts).map_err(data)?;
                    let slot = match kind {
                        TransformKind::DeltaMin => &mut art.huffman_min,
                        TransformKind::DeltaConsec => &mut art.huffman_consec,
                    };
                    if slot.is_some() {
                        return Err(occupied("a value model", path));
                    }
                    *slot = Some(code);
                }
                other => {
                    return Err(data(format!(
                        "{}: unknown model kind '{other}'",
                        path.to_string_lossy()
                    )))
                }
            }
        }
        Ok(art)
    }

    fn context<'a>(
        &'a self,
        a: &'a Alphabet,
        origin: Origin,
        golomb_m: Option<u64>,
    ) -> CodecContext<'a> {
        CodecContext {
            alphabet: a,
            origin,
            dict_min: self.dict_min.as_ref(),
            dict_consec: self.dict_consec.as_ref(),
            digit_model_min: self.digit_min.as_ref(),
            digit_model_consec: self.digit_consec.as_ref(),
            huffman_min: self.huffman_min.as_ref(),
            huffman_consec: self.huffman_consec.as_ref(),
            golomb_m,
        }
    }
}

fn seq_for(ip: &IntPolygon, kind: TransformKind, origin: Origin) -> polycomp::Result<DeltaSeq> {
    match kind {
        TransformKind::DeltaMin => to_delta_min(ip, origin),
        TransformKind::DeltaConsec => to_delta_consec(ip, origin),
    }
}

fn compress(args: CompressArgs) -> CliResult<()> {
    let a = alphabet()?;
    let origin = args.geo.origin()?;
    let precision = args.geo.precision()?;
    let codec = parse_codec(&args.codec.codec)?;
    let kind = parse_transform(&args.codec.transform)?;
    let art = Artifacts::load(&args.codec.dict, &args.codec.model)?;
    let ctx = art.context(a, origin, args.codec.golomb_m);
    let framing = args.frame || args.message.is_some();

    let text = read_input(&args.io.input)?;
    let polys = load_corpus(&text, args.skip_errors)?;
    let mut out = String::new();
    let mut count = 0usize;
    let mut orig_sum = 0usize;
    let mut comp_sum = 0usize;
    let mut over_budget = 0usize;
    for (i, poly) in polys.iter().enumerate() {
        let encoded = quantize(poly, precision)
            .and_then(|ip| seq_for(&ip, kind, origin))
            .and_then(|ds| ctx.encode_with(codec, &ds));
        let enc = match encoded {
            Ok(enc) => enc,
            Err(e) if args.skip_errors => {
                eprintln!("warning: polygon {}: {e}", i + 1);
                continue;
            }
            Err(e) => return Err(data(format!("polygon {}: {e}", i + 1))),
        };
        orig_sum += format_polygon(poly, precision).chars().count();
        comp_sum += enc.payload.chars().count();
        let line = if framing {
            let mut parts = Vec::new();
            if let Some(message) = &args.message {
                if !message.is_empty() {
                    parts.push(MessagePart::Text(message.clone()));
                }
            }
            parts.push(MessagePart::Polygon(enc));
            let msg = frame_message(&parts, a).map_err(data)?;
            if msg.chars().count() > args.budget {
                over_budget += 1;
                eprintln!(
                    "warning: message {} is {} chars, budget {}",
                    i + 1,
                    msg.chars().count(),
                    args.budget
                );
            }
            msg
        } else {
            enc.payload
        };
        out.push_str(&line);
        out.push('\n');
        count += 1;
    }
    write_output(&args.io.out, &out)?;
    if count > 0 {
        eprintln!(
            "compressed {count} polygons: mean {:.1} chars from {:.1} ({:.1}% of original){}",
            comp_sum as f64 / count as f64,
            orig_sum as f64 / count as f64,
            100.0 * comp_sum as f64 / orig_sum as f64,
            if over_budget > 0 {
                format!(", {over_budget} over budget")
            } else {
                String::new()
            }
        );
    } else {
        eprintln!("compressed 0 polygons");
    }
    Ok(())
}

fn decompress(args: DecompressArgs) -> CliResult<()> {
    let a = alphabet()?;
    let origin = args.geo.origin()?;
    let precision = args.geo.precision()?;
    let art = Artifacts::load(&args.codec.dict, &args.codec.model)?;
    let ctx = art.context(a, origin, args.codec.golomb_m);
    let codec = parse_codec(&args.codec.codec)?;
    let kind = parse_transform(&args.codec.transform)?;

    let text = read_input(&args.io.input)?;
    let mut out = String::new();
    let mut count = 0usize;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let decoded = (|| -> polycomp::Result<Vec<GeoPolygon>> {
            let mut ring_texts = Vec::new();
            if args.frame {
                for part in unframe_message(line, a)? {
                    if let MessagePart::Polygon(enc) = part {
                        let ds = ctx.decode_with(enc.codec, enc.transform, &enc.payload)?;
                        ring_texts.push(rebuild(&ds, precision)?);
                    }
                }
            } else {
                let ds = ctx.decode_with(codec, kind, line.trim())?;
                ring_texts.push(rebuild(&ds, precision)?);
            }
            Ok(ring_texts)
        })();
        match decoded {
            Ok(polys) => {
                for poly in polys {
                    out.push_str(&format_polygon(&poly, precision));
                    out.push('\n');
                    count += 1;
                }
            }
            Err(e) if args.skip_errors => eprintln!("warning: line {}: {e}", i + 1),
            Err(e) => return Err(data(format!("line {}: {e}", i + 1))),
        }
    }
    write_output(&args.io.out, &out)?;
    eprintln!("decompressed {count} polygons");
    Ok(())
}

fn rebuild(ds: &DeltaSeq, precision: Precision) -> polycomp::Result<GeoPolygon> {
    let ip = match ds.kind() {
        TransformKind::DeltaMin => from_delta_min(ds, precision),
        TransformKind::DeltaConsec => from_delta_consec(ds, precision),
    }?;
    Ok(dequantize(&ip))
}

fn dict_build(args: DictBuildArgs) -> CliResult<()> {
    let a = alphabet()?;
    let origin = args.geo.origin()?;
    let precision = args.geo.precision()?;
    let kind = parse_transform(&args.transform)?;
    let mode = parse_mode(&args.mode)?;
    let polys = load_corpus(&read_input(&args.io.input)?, false)?;
    let payloads = polys
        .iter()
        .map(|p| {
            let ip = quantize(p, precision)?;
            let ds = seq_for(&ip, kind, origin)?;
            reduced_var_payload(&ds, a)
        })
        .collect::<polycomp::Result<Vec<_>>>()
        .map_err(data)?;
    let base = VarProfile::for_transform(kind, true).base;
    let dict = build_dictionary(&payloads, mode, kind, base, args.capacity, a).map_err(data)?;
    write_output(&args.io.out, &serialize_dictionary(&dict))?;
    eprintln!("built {} entries from {} polygons", dict.len(), polys.len());
    Ok(())
}

fn model_build(args: ModelBuildArgs) -> CliResult<()> {
    let origin = args.geo.origin()?;
    let precision = args.geo.precision()?;
    let kind = parse_transform(&args.transform)?;
    let polys = load_corpus(&read_input(&args.io.input)?, false)?;
    let seqs = polys
        .iter()
        .map(|p| {
            let ip = quantize(p, precision)?;
            seq_for(&ip, kind, origin)
        })
        .collect::<polycomp::Result<Vec<_>>>()
        .map_err(data)?;
    let serialized = match args.kind.as_str() {
        "digit" => {
            let ctx = CodecContext::bare(Alphabet::canonical(), origin);
            let payloads = seqs
                .iter()
                .map(|ds| Ok(ctx.encode_with(CodecKind::Fixed, ds)?.payload))
                .collect::<polycomp::Result<Vec<_>>>()
                .map_err(data)?;
            let model = build_digit_model(&payloads).map_err(data)?;
            serialize_digit_model(&model, kind)
        }
        "value" => {
            let counts: BTreeMap<u64, u64> = build_value_counts(&seqs);
            serialize_value_counts(&counts, kind)
        }
        other => return Err(usage(format!("model kind '{other}' is not digit or value"))),
    };
    write_output(&args.io.out, &serialized)?;
    eprintln!("modeled {} polygons", polys.len());
    Ok(())
}

fn stats(args: StatsArgs) -> CliResult<()> {
    let origin = args.geo.origin()?;
    let precision = args.geo.precision()?;
    let polys = load_corpus(&read_input(&args.io.input)?, args.skip_errors)?;
    let opts = StatsOptions {
        include_zero_deltas: args.include_zero_deltas,
        origin,
        precision,
    };
    let report = compute_stats(&polys, &opts).map_err(data)?;
    if let Some(dir) = &args.hist_dir {
        fs::create_dir_all(dir).map_err(|e| data(format!("{}: {e}", dir.to_string_lossy())))?;
        for (name, q) in &report.quantities {
            let mut csv = String::from("value,count\n");
            for (value, count) in &q.histogram {
                csv.push_str(&format!("{value},{count}\n"));
            }
            let path = dir.join(format!("{name}.csv"));
            fs::write(&path, csv).map_err(|e| data(format!("{}: {e}", path.to_string_lossy())))?;
        }
    }
    write_output(&args.io.out, &report.to_csv())?;
    Ok(())
}

fn gen_corpus(args: GenCorpusArgs) -> CliResult<()> {
    let params = GenParams {
        count: args.count,
        seed: args.seed,
        min_points: args.min_points,
        max_points: args.max_points,
        zero_prob: args.zero_prob,
        mean_delta: args.mean_delta,
        max_delta: args.max_delta,
        max_consec_diff: args.max_consec_diff,
        ..Default::default()
    };
    let polys = generate_corpus(&params).map_err(|e| usage(e.to_string()))?;
    write_output(&args.out, &format_corpus(&polys, Precision::Centi))?;
    eprintln!("generated {} polygons with seed {}", polys.len(), params.seed);
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult<()> {
    let a = alphabet()?;
    let origin = args.geo.origin()?;
    let precision = args.geo.precision()?;
    let mode = parse_mode(&args.dict_mode)?;
    let polys = load_corpus(&read_input(&args.io.input)?, args.skip_errors)?;
    let models = train_models(&polys, precision, origin, mode, args.capacity, a).map_err(data)?;
    let report = run_bench(&polys, precision, origin, &models, a).map_err(data)?;
    write_output(&args.io.out, &render_report(&report))?;
    Ok(())
}
