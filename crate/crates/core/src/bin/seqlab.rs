use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

use seqlab::automata::check_language_equals_greedy;
use seqlab::beta::{dominant_root, DEFAULT_ROOT_TOLERANCE};
use seqlab::files::{load_spec, read_prefix, write_prefix, LoadedSpec};
use seqlab::measures::{correlation_profile, well_distribution_profile, CorrelationOptions, DEFAULT_BUDGET};
use seqlab::morphic::{build_phi_nu, cross_check_morphic_vs_automatic, SequencePrefix};
use seqlab::numeration::GenealogicalIndex;
use seqlab::report::{CertificateEntry, InputInfo, MeasureRow, RunReport, Timing};
use seqlab::source::{sequence_preset, system_preset, Numeration, SequenceSource};
use seqlab::witness::{build_certificate, find_collisions, largest_m, verify_certificate, witness_from_words};
use seqlab::{Digit, Error};

#[derive(Parser)]
#[command(
    name = "seqlab",
    version,
    about = "Numeration systems, automatic sequences and their correlation measures"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cap on elementary steps for exact evaluation.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Seed for sampled mode.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Show a numeration system.
    Numsys {
        #[command(flatten)]
        input: SystemInput,
        #[arg(long, value_enum, default_value_t = Emit::Values)]
        emit: Emit,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Write a sequence prefix file.
    Generate {
        #[command(flatten)]
        input: SequenceInput,
        #[arg(short = 'n', long)]
        n: usize,
    },
    /// Exact or sampled correlation / well-distribution table.
    Measure {
        #[command(flatten)]
        input: SequenceInput,
        /// Prefix file to measure instead of a generator.
        #[arg(long, conflicts_with_all = ["preset", "spec"])]
        prefix: Option<PathBuf>,
        /// Comma-separated correlation orders.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        orders: Vec<usize>,
        /// Inclusive range `a..b`, or a single N.
        #[arg(long = "n-range", default_value = "1..64")]
        n_range: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// Shapes drawn per order in sampled mode.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Measure well-distribution instead of correlation.
        #[arg(long)]
        well: bool,
    },
    /// Build and verify a correlation certificate of even order.
    Certify {
        #[command(flatten)]
        input: SequenceInput,
        /// Even correlation order 2k.
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(short = 'm', long = "m", conflicts_with = "target_n")]
        m: Option<usize>,
        /// Choose the largest M whose certificate fits in N.
        #[arg(long = "target-n")]
        target_n: Option<usize>,
        /// Prefix length bounding M when neither --m nor --target-n is given.
        #[arg(long, default_value_t = 1 << 20)]
        capacity: usize,
        /// Comma-separated colliding words instead of the scanned ones.
        #[arg(long, value_delimiter = ',')]
        words: Option<Vec<String>>,
    },
    /// Compare independent constructions of a sequence.
    Crosscheck {
        #[command(flatten)]
        input: SequenceInput,
        #[arg(short = 'n', long, default_value_t = 1000)]
        n: usize,
    },
}

#[derive(Args)]
struct SystemInput {
    /// base2, base3, base10, fibonacci, phi2, ex41
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    preset: Option<String>,
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct SequenceInput {
    /// thue_morse, fib_sum_digits, cantor, ex41, champernowne, periodic:<pattern>, constant[:<symbol>]
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Recurrence,
    Values,
    Automaton,
    Language,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

enum Failure {
    Lib(Error),
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::BudgetExceeded { .. }) => 3,
            Failure::Lib(Error::VerificationFailed { .. } | Error::Mismatch { .. }) | Failure::Verification(_) => 1,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e @ Error::BudgetExceeded { .. }) => format!("{e} (try --mode sampled or a larger --budget)"),
            Failure::Lib(e) => e.to_string(),
            Failure::Input(m) | Failure::Verification(m) => m.clone(),
        }
    }
}

type Outcome = Result<String, Failure>;

fn read_file(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_system(input: &SystemInput) -> Result<(Numeration, InputInfo), Failure> {
    if let Some(name) = &input.preset {
        return Ok((
            system_preset(name)?,
            InputInfo::new("preset", name, format!("system:{name}").as_bytes()),
        ));
    }
    let path = input.spec.as_ref().expect("clap enforces one input");
    let bytes = read_file(path)?;
    let LoadedSpec { numeration, source } = load_spec(path)?;
    let numeration = numeration
        .or_else(|| source.and_then(|s| s.numeration().cloned()))
        .ok_or_else(|| Failure::Input("spec file has no `system` table".into()))?;
    Ok((numeration, InputInfo::new("spec", &path.display().to_string(), &bytes)))
}

fn load_sequence(input: &SequenceInput) -> Result<(SequenceSource, InputInfo), Failure> {
    if let Some(name) = &input.preset {
        return Ok((
            sequence_preset(name)?,
            InputInfo::new("preset", name, format!("sequence:{name}").as_bytes()),
        ));
    }
    let path = input
        .spec
        .as_ref()
        .ok_or_else(|| Failure::Input("give --preset or --spec".into()))?;
    let bytes = read_file(path)?;
    let source = load_spec(path)?
        .source
        .ok_or_else(|| Failure::Input("spec file describes no sequence".into()))?;
    Ok((source, InputInfo::new("spec", &path.display().to_string(), &bytes)))
}

fn parse_range(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Input(format!("bad --n-range {text:?}; expected `a..b` or `N`"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (text, text),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_word(text: &str) -> Result<Vec<Digit>, Failure> {
    text.chars()
        .map(|c| {
            c.to_digit(10)
                .ok_or_else(|| Failure::Input(format!("word {text:?} must consist of decimal digits")))
        })
        .collect()
}

fn numsys(input: &SystemInput, emit: Emit, count: usize) -> Outcome {
    let (num, _) = load_system(input)?;
    let mut out = String::new();
    match emit {
        Emit::Values => {
            let values: Vec<String> = (0..count).map(|i| num.system.value(i).to_string()).collect();
            writeln!(out, "{}", values.join(" ")).unwrap();
        }
        Emit::Recurrence => {
            writeln!(out, "{}", num.system.recurrence()).unwrap();
            if let Some(beta) = &num.beta {
                writeln!(out, "quasi-greedy expansion of 1: {beta}").unwrap();
            }
            writeln!(out, "digits: 0..={}", num.system.max_digit()).unwrap();
            match dominant_root(num.system.recurrence(), 64, DEFAULT_ROOT_TOLERANCE) {
                Ok(root) => writeln!(out, "dominant root: {:.9}", root.beta).unwrap(),
                Err(e) => writeln!(out, "dominant root: {e}").unwrap(),
            }
        }
        Emit::Automaton => out.push_str(&num.language()?.to_table()),
        Emit::Language => {
            let index = GenealogicalIndex::new(num.language()?);
            for w in index.iter().take(count) {
                let text: String = w.iter().map(|d| d.to_string()).collect();
                writeln!(out, "{}", if text.is_empty() { "ε" } else { &text }).unwrap();
            }
        }
    }
    Ok(out)
}

fn generate(input: &SequenceInput, n: usize) -> Outcome {
    let (src, _) = load_sequence(input)?;
    Ok(write_prefix(&src.generate(n)?)?)
}

#[allow(clippy::too_many_arguments)]
fn measure(
    cli: &Cli,
    input: &SequenceInput,
    prefix: &Option<PathBuf>,
    orders: &[usize],
    n_range: &str,
    mode: ModeArg,
    samples: usize,
    well: bool,
) -> Outcome {
    let start = Instant::now();
    let (lo, hi) = parse_range(n_range)?;
    let (s, info): (SequencePrefix, InputInfo) = match prefix {
        Some(path) => {
            let bytes = read_file(path)?;
            let text =
                String::from_utf8(bytes.clone()).map_err(|_| Failure::Input("prefix file is not UTF-8".into()))?;
            (
                read_prefix(&text)?,
                InputInfo::new("prefix", &path.display().to_string(), &bytes),
            )
        }
        None => {
            let (src, info) = load_sequence(input)?;
            (src.generate(hi)?, info)
        }
    };
    let opts = match mode {
        ModeArg::Exact => CorrelationOptions::exact(cli.budget),
        ModeArg::Sampled => CorrelationOptions {
            budget: cli.budget,
            sampled: Some((samples, cli.seed)),
        },
    };
    let mut report = RunReport::new(
        "measure",
        info,
        json!({
            "measure": if well { "well_distribution" } else { "correlation" },
            "orders": if well { vec![] } else { orders.to_vec() },
            "n_range": [lo, hi],
            "mode": if mode == ModeArg::Exact { "exact" } else { "sampled" },
            "samples": if mode == ModeArg::Sampled { Some(samples) } else { None },
            "seed": if mode == ModeArg::Sampled { Some(cli.seed) } else { None },
            "budget": cli.budget.to_string(),
        }),
    );
    if well {
        for r in well_distribution_profile(&s, hi, cli.budget)?
            .iter()
            .filter(|r| r.n >= lo)
        {
            report.rows.push(MeasureRow::from(r));
        }
    } else {
        for &k in orders {
            for r in correlation_profile(&s, hi, k, &opts)?.iter().filter(|r| r.n >= lo) {
                report.rows.push(MeasureRow::from(r));
            }
        }
    }
    report.timing = Timing {
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(match cli.format.unwrap_or(Format::Csv) {
        Format::Json => report.to_json(),
        _ => report.to_csv(),
    })
}

#[allow(clippy::too_many_arguments)]
fn certify(
    cli: &Cli,
    input: &SequenceInput,
    order: usize,
    m: Option<usize>,
    target_n: Option<usize>,
    capacity: usize,
    words: &Option<Vec<String>>,
) -> Outcome {
    let start = Instant::now();
    if order == 0 || order % 2 == 1 {
        return Err(Failure::Input(format!(
            "--order must be even and positive, got {order}"
        )));
    }
    let (src, info) = load_sequence(input)?;
    let num = src
        .numeration()
        .ok_or_else(|| Failure::Input(format!("{} is not given by a DFAO", src.name)))?;
    let p = src.product()?;
    let witness = match words {
        Some(ws) => {
            let ws = ws.iter().map(|w| parse_word(w)).collect::<Result<Vec<_>, _>>()?;
            if ws.len() != order {
                return Err(Failure::Input(format!(
                    "order {order} needs {order} words, got {}",
                    ws.len()
                )));
            }
            witness_from_words(&p, &num.system, ws)?
        }
        None => find_collisions(&p, &num.system, order / 2)?,
    };
    let m = match (m, target_n) {
        (Some(m), _) => m,
        (None, bound) => {
            let bound = bound.unwrap_or(capacity);
            largest_m(&witness, &num.system, bound)?
                .ok_or_else(|| Failure::Input(format!("no certificate fits in {bound} symbols")))?
        }
    };
    let cert = build_certificate(&witness, &num.system, m)?;
    let need = cert.implied_n();
    let len: usize = usize::try_from(&need)
        .ok()
        .filter(|&n| n <= 1 << 28)
        .ok_or_else(|| Failure::Input(format!("certificate needs a prefix of {need} symbols")))?;
    let s = src.generate(len)?;
    let result = verify_certificate(&s, &cert);
    let verified = result.as_ref().is_ok_and(|c| c.verified);
    let state = p.dfa().state_names()[witness.state].clone();
    let entry = CertificateEntry::new(
        &witness,
        state,
        result.as_ref().map_or_else(|_| cert.clone(), |c| c.clone()),
    );
    let mut report = RunReport::new(
        "certify",
        info,
        json!({ "order": order, "M": m, "words": words, "target_n": target_n, "capacity": capacity }),
    );
    report.certificates.push(entry.clone());
    report.timing = Timing {
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let out = match cli.format.unwrap_or(Format::Json) {
        Format::Json => report.to_json(),
        _ => {
            let c = &entry.certificate;
            let mut t = String::new();
            writeln!(
                t,
                "words: {} (state {}, {} zeros appended)",
                entry.words.join(", "),
                entry.state,
                entry.zeros
            )
            .unwrap();
            writeln!(t, "M = {}, U(M) = {}", c.m, c.block).unwrap();
            let pos: Vec<String> = c.positions.iter().map(BigUint::to_string).collect();
            writeln!(t, "D = ({})", pos.join(",")).unwrap();
            writeln!(t, "verified: {}", c.verified).unwrap();
            writeln!(t, "C_{}(s, N) >= {} for N >= {}", c.order, c.block, entry.implied_n).unwrap();
            t
        }
    };
    match result {
        Ok(_) if verified => Ok(out),
        Ok(_) => Err(Failure::Verification("certificate did not verify".into())),
        Err(e) => {
            emit(cli, &out).map_err(Failure::Input)?;
            Err(e.into())
        }
    }
}

fn crosscheck(input: &SequenceInput, n: usize) -> Outcome {
    let (src, _) = load_sequence(input)?;
    let (Some(num), Some(dfao)) = (src.numeration(), src.dfao()) else {
        return Err(Failure::Input(format!(
            "{} is not given by a DFAO; nothing to compare",
            src.name
        )));
    };
    let mut out = String::new();
    let width = num.width() as f64;
    let len = ((2e5f64).ln() / width.ln()).floor().clamp(1.0, 16.0) as usize;
    if let Some(w) = check_language_equals_greedy(num.language()?, &num.system, len)? {
        return Err(Failure::Verification(format!(
            "language automaton disagrees with greedy on {w:?}"
        )));
    }
    writeln!(out, "ok: language automaton equals greedy words up to length {len}").unwrap();
    let index = GenealogicalIndex::new(num.language()?);
    for (i, w) in index.iter().take(n).enumerate() {
        if w != num.system.rep_u64(i as u64) {
            return Err(Failure::Verification(format!(
                "word {i} of the language is not rep({i})"
            )));
        }
    }
    writeln!(out, "ok: genealogical order equals rep(n) for n < {n}").unwrap();
    let p = src.product()?;
    build_phi_nu(&p)?;
    cross_check_morphic_vs_automatic(&p, dfao, &num.system, n)?;
    writeln!(
        out,
        "ok: morphic construction equals the automatic sequence for N = {n}"
    )
    .unwrap();
    Ok(out)
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    match &cli.command {
        Command::Numsys { input, emit, count } => numsys(input, *emit, *count),
        Command::Generate { input, n } => generate(input, *n),
        Command::Measure {
            input,
            prefix,
            orders,
            n_range,
            mode,
            samples,
            well,
        } => measure(cli, input, prefix, orders, n_range, *mode, *samples, *well),
        Command::Certify {
            input,
            order,
            m,
            target_n,
            capacity,
            words,
        } => certify(cli, input, *order, *m, *target_n, *capacity, words),
        Command::Crosscheck { input, n } => crosscheck(input, *n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => match emit(&cli, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
