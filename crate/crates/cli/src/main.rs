use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlab::blocks::good_word_capped;
use nlab::pointclass::{family_from_spec, Pi03Family};
use nlab::rational::{to_decimal_string, to_fraction_string};
use nlab::reduce::{
    d2_reduce, d2_reduce_general, omega_reduce, pack_bits, unpack_bits, verify_stage, D2Config,
    D2Run, OmegaConfig, StageReport,
};
use nlab::{density, Error, EventuallyPeriodicWord, WindowCounter, Word};

/// Exploring finite-order normality and the reductions onto it.
#[derive(Parser)]
#[command(name = "nlab", version)]
struct Cli {
    /// Largest number of digits any command may produce or hold.
    #[arg(long, global = true, env = "NLAB_MAX_DIGITS", default_value_t = 1 << 22)]
    max_digits: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the least de Bruijn word of the given order.
    Debruijn {
        #[arg(long, default_value_t = 2)]
        base: u8,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Block-frequency deviations of a digit stream at several truncations.
    Analyze(AnalyzeArgs),
    /// Two-difference reduction with the binary blocks.
    ReduceD2 {
        #[command(flatten)]
        pair: PairArgs,
        /// Output digits to produce.
        #[arg(long)]
        bits: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Two-difference reduction separating order-r from order-s normality in base b.
    ReduceGeneral {
        #[arg(long)]
        base: u8,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[command(flatten)]
        pair: PairArgs,
        /// Output digits to produce.
        #[arg(long)]
        digits: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// ω-difference reduction over a triple-indexed family.
    ReduceDomega {
        #[arg(long)]
        family: PathBuf,
        #[command(flatten)]
        x: InputArgs,
        /// Last stage to run.
        #[arg(long)]
        stages: u64,
        /// Record stages whose modulus conditions cannot be met instead of failing.
        #[arg(long)]
        allow_unmet: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Digit file: ASCII digits or a packed-bits stream.
    #[arg(long, conflicts_with = "word", required_unless_present = "word")]
    input: Option<PathBuf>,
    /// Eventually periodic input written "pre:period".
    #[arg(long)]
    word: Option<String>,
    #[arg(long, default_value_t = 2)]
    base: u8,
    /// Block length.
    #[arg(long)]
    k: usize,
    /// Strictly increasing prefix lengths; entries may be written 2^e.
    #[arg(long, value_delimiter = ',', required = true)]
    truncations: Vec<String>,
    /// Also report the density of this pattern.
    #[arg(long)]
    pattern: Option<String>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// Input sequence written "pre:period".
    #[arg(long, conflicts_with = "x_file", required_unless_present = "x_file")]
    x: Option<String>,
    /// Input digits from a file, for finite inputs.
    #[arg(long)]
    x_file: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    /// Family document for L.
    #[arg(long)]
    l: PathBuf,
    /// Family document for F.
    #[arg(long)]
    f: PathBuf,
    /// Replace F with L ∩ F before reducing.
    #[arg(long)]
    normalize: bool,
    #[command(flatten)]
    x: InputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Digit stream destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stage report destination (JSON).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the stream as packed bits (base 2 only).
    #[arg(long)]
    packed: bool,
}

enum Failure {
    Validation(String),
    Cap(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceCap { .. } | Error::SearchCap { .. } => Failure::Cap(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Cap(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Validation(_) => "validation",
            Failure::Cap(_) => "resource_cap",
            Failure::Invariant(_) => "invariant",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Cap(m) | Failure::Invariant(m) => m,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let diag = serde_json::json!({"error": f.kind(), "message": f.message()});
            eprintln!("{diag}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let cap = cli.max_digits;
    match cli.command {
        Command::Debruijn {
            base,
            order,
            format,
        } => {
            let w = good_word_capped(base, order, cap)?;
            match format {
                Format::Text => println!("{w}"),
                Format::Json => println!(
                    "{}",
                    serde_json::json!({"base": base, "order": order, "word": w.to_string()})
                ),
            }
            Ok(())
        }
        Command::Analyze(args) => analyze(args, cap),
        Command::ReduceD2 { pair, bits, out } => {
            check_budget(bits, cap)?;
            let (l, f) = (load_family(&pair.l)?, load_family(&pair.f)?);
            let x = input_stream(&pair.x)?;
            let mut config = D2Config::new(bits).normalized(pair.normalize);
            config.max_block_len = cap;
            let run = d2_reduce(&l, &f, x, config)?.run()?;
            finish_d2(run, &out)
        }
        Command::ReduceGeneral {
            base,
            r,
            s,
            pair,
            digits,
            out,
        } => {
            check_budget(digits, cap)?;
            let (l, f) = (load_family(&pair.l)?, load_family(&pair.f)?);
            let x = input_stream(&pair.x)?;
            let mut config = D2Config::new(digits).normalized(pair.normalize);
            config.max_block_len = cap;
            let run = d2_reduce_general(base, r, s, &l, &f, x, config)?.run()?;
            finish_d2(run, &out)
        }
        Command::ReduceDomega {
            family,
            x,
            stages,
            allow_unmet,
            out,
        } => {
            let fam = load_family(&family)?;
            let x = input_stream(&x)?;
            let mut config = OmegaConfig::new(stages).strict(!allow_unmet);
            config.max_word_len = cap;
            let run = omega_reduce(&fam, x, config)?.run()?;
            for r in run.stages.iter().filter(|r| r.unmet.is_none()) {
                if !verify_stage(&StageReport::Omega(r.clone()), &run.digits) {
                    return Err(Failure::Invariant(format!(
                        "stage {} failed re-verification",
                        r.stage
                    )));
                }
            }
            write_outputs(
                &run.digits,
                &serde_json::to_value(&run).expect("report"),
                &out,
            )
        }
    }
}

fn check_budget(n: u64, cap: usize) -> CmdResult {
    if n > cap as u64 {
        return Err(Error::ResourceCap {
            what: "requested output".into(),
            requested: n as u128,
            cap,
        }
        .into());
    }
    Ok(())
}

fn load_family(path: &Path) -> Result<Pi03Family, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    family_from_spec(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn read_digits(path: &Path, base: u8) -> Result<Word, Failure> {
    let bytes =
        fs::read(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    if bytes.starts_with(b"NLAB-BITS") {
        let w = unpack_bits(&bytes)?;
        if base != 2 {
            return Err(Error::BaseMismatch {
                left: base,
                right: 2,
            }
            .into());
        }
        return Ok(w);
    }
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::Validation(format!("{}: not UTF-8 text", path.display())))?;
    let compact: String = text.split_whitespace().collect();
    Ok(Word::parse(base, &compact)?)
}

fn input_stream(args: &InputArgs) -> Result<Box<dyn Iterator<Item = u8>>, Failure> {
    match (&args.x, &args.x_file) {
        (Some(spec), _) => {
            let w = EventuallyPeriodicWord::parse(2, spec)?;
            let digits: Vec<u8> = w
                .digits()
                .take(w.preperiod().len() + w.period().len())
                .collect();
            let pre = w.preperiod().len();
            let period = digits[pre..].to_vec();
            let head = digits[..pre].to_vec();
            Ok(Box::new(head.into_iter().chain(period.into_iter().cycle())))
        }
        (None, Some(path)) => Ok(Box::new(read_digits(path, 2)?.into_digits().into_iter())),
        (None, None) => Err(Failure::Validation("an input sequence is required".into())),
    }
}

fn finish_d2(run: D2Run, out: &OutputArgs) -> CmdResult {
    for r in &run.stages {
        if !verify_stage(&StageReport::D2(r.clone()), &run.digits) {
            return Err(Failure::Invariant(format!(
                "stage {} failed re-verification",
                r.stage
            )));
        }
    }
    write_outputs(
        &run.digits,
        &serde_json::to_value(&run).expect("report"),
        out,
    )
}

fn write_outputs(digits: &Word, report: &serde_json::Value, out: &OutputArgs) -> CmdResult {
    let body = if out.packed {
        pack_bits(digits)?
    } else {
        let mut s = digits.to_string().into_bytes();
        s.push(b'\n');
        s
    };
    match &out.out {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().write_all(&body)?,
    }
    if let Some(path) = &out.report {
        let text = serde_json::to_string_pretty(report).expect("report");
        fs::write(path, text + "\n")?;
    }
    Ok(())
}

fn parse_truncation(s: &str) -> Result<u64, Failure> {
    let s = s.trim();
    let bad = || Failure::Validation(format!("bad truncation {s:?}"));
    let v = match s.split_once('^') {
        Some((b, e)) => {
            let b: u64 = b.parse().map_err(|_| bad())?;
            let e: u32 = e.parse().map_err(|_| bad())?;
            b.checked_pow(e).ok_or_else(bad)?
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v == 0 {
        return Err(bad());
    }
    Ok(v)
}

fn analyze(args: AnalyzeArgs, cap: usize) -> CmdResult {
    let truncs = args
        .truncations
        .iter()
        .map(|s| parse_truncation(s))
        .collect::<Result<Vec<u64>, _>>()?;
    if truncs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Validation(
            "truncations must be strictly increasing".into(),
        ));
    }
    let longest = *truncs.last().expect("at least one truncation");
    let stream: Word = match (&args.input, &args.word) {
        (Some(path), _) => read_digits(path, args.base)?,
        (None, Some(spec)) => {
            check_budget(longest, cap)?;
            EventuallyPeriodicWord::parse(args.base, spec)?.prefix(longest as usize)
        }
        (None, None) => unreachable!("clap requires an input"),
    };
    let pattern = args
        .pattern
        .as_deref()
        .map(|p| Word::parse(args.base, p))
        .transpose()?;
    if args.k == 0 {
        return Err(Failure::Validation("k must be positive".into()));
    }
    let mut counter = WindowCounter::new(args.base, args.k, cap)?;

    let sink: Box<dyn Write> = match &args.csv {
        Some(path) => Box::new(fs::File::create(path)?),
        None => Box::new(io::stdout()),
    };
    let mut csv = csv::Writer::from_writer(sink);
    let mut header = vec![
        "truncation",
        "max_deviation",
        "max_deviation_decimal",
        "argmax",
    ];
    if pattern.is_some() {
        header.extend(["pattern", "density", "density_decimal"]);
    }
    csv.write_record(&header).map_err(csv_err)?;
    let mut fed = 0usize;
    for &s in &truncs {
        let s = s as usize;
        let mut row = vec![s.to_string()];
        if s > stream.len() || s < args.k {
            row.extend(["insufficient".to_string(), String::new(), String::new()]);
            if pattern.is_some() {
                row.extend([String::new(), String::new(), String::new()]);
            }
        } else {
            counter.extend(&stream.digits()[fed..s]);
            fed = s;
            let (dev, arg) = counter.max_deviation()?;
            row.extend([
                to_fraction_string(&dev),
                to_decimal_string(&dev, 12),
                arg.to_string(),
            ]);
            if let Some(p) = &pattern {
                let d = density(p, &stream.prefix(s))?;
                row.extend([
                    p.to_string(),
                    to_fraction_string(&d),
                    to_decimal_string(&d, 12),
                ]);
            }
        }
        csv.write_record(&row).map_err(csv_err)?;
    }
    csv.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Validation(e.to_string())
}
