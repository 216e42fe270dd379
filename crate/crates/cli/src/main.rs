use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tm_antipower::antipower;
use tm_antipower::asymptotics;
use tm_antipower::extremal;
use tm_antipower::kappa;
use tm_antipower::lemmas::{self, LemmaId, LemmaReport};
use tm_antipower::thue_morse;
use tm_antipower::{Error, Ratio};

#[derive(Parser)]
#[command(
    name = "tm-antipower",
    version,
    about = "Antipower structure of Thue-Morse prefixes"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for sweeps and verification grids; output is identical
    /// for every value.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

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
    /// Letter t_N, or the base-B digit sum of N with --base.
    Letter {
        n: u64,
        #[arg(long)]
        base: Option<u64>,
    },
    /// The first LEN letters.
    Prefix { len: u64 },
    /// Whether t_N = t_M.
    Equiv { n: u64, m: u64 },
    /// Whether the length-N·K prefix is a K-antipower.
    Check {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
    },
    /// 𝔎(N) with its witness pair.
    Kappa {
        n: u64,
        /// Maximum number of blocks to scan.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// γ(K), Γ(K), and the odd n outside F(K).
    Extremal { k: u64 },
    /// 𝔎(n)/n for odd n in [LO, HI].
    SweepKappa { lo: u64, hi: u64 },
    /// γ(k)/k and Γ(k)/k for k in [LO, HI].
    SweepExtremal {
        lo: u64,
        hi: u64,
        /// Emit dyadic-window minima and maxima instead of per-k rows.
        #[arg(long)]
        windows: bool,
    },
    /// Run a finite-range lemma verifier.
    Verify(VerifyArgs),
    /// Compare 𝔎(n) for odd n in (3·2^I, 2^(I+2)·(1 - margin)) against 𝔎(3·2^I + 1).
    Conjecture {
        i: u32,
        #[arg(long, default_value = "0")]
        margin: Ratio,
    },
}

#[derive(Args)]
struct VerifyArgs {
    lemma: LemmaId,
    /// Exponent range, `LO..HI` (inclusive) or a single value.
    #[arg(long = "i", value_parser = parse_range)]
    i: Option<RangeInclusive<u32>>,
    #[arg(long)]
    k_shift: Option<u32>,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long)]
    i_max: Option<u32>,
    #[arg(long)]
    c_max: Option<u64>,
    #[arg(long)]
    ordinal_max: Option<u64>,
    #[arg(long)]
    k_max: Option<u64>,
    #[arg(long)]
    exp: Option<u32>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (parse(lo)?, parse(hi.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok(lo..=hi)
}

enum Failure {
    Verification,
    Library(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Library(Error::Output(e.to_string()))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Library(Error::Output(e.to_string()))
    }
}

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::CapExceeded { .. } | Error::ResourceLimit { .. } => 3,
        _ => 2,
    }
}

fn json_line<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[derive(Serialize)]
struct LetterOutput {
    n: u64,
    base: u64,
    letter: u64,
}

#[derive(Serialize)]
struct PrefixOutput {
    len: u64,
    word: thue_morse::FiniteWord,
}

#[derive(Serialize)]
struct EquivOutput {
    n: u64,
    m: u64,
    equivalent: bool,
}

#[derive(Serialize)]
struct CheckOutput {
    n: u64,
    k: u64,
    verdict: tm_antipower::AntipowerVerdict,
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let format = cli.format;
    match &cli.command {
        &Command::Letter { n, base } => {
            let base = base.unwrap_or(2);
            let letter = thue_morse::generalized_letter(base, n)?;
            match format {
                Format::Text => writeln!(out, "{letter}")?,
                Format::Csv => writeln!(out, "n,base,letter\n{n},{base},{letter}")?,
                Format::Json => json_line(out, &LetterOutput { n, base, letter })?,
            }
        }
        &Command::Prefix { len } => {
            let word = thue_morse::prefix(len)?;
            match format {
                Format::Text => writeln!(out, "{word}")?,
                Format::Csv => writeln!(out, "len,word\n{len},{word}")?,
                Format::Json => json_line(out, &PrefixOutput { len, word })?,
            }
        }
        &Command::Equiv { n, m } => {
            let equivalent = thue_morse::equivalent(n, m);
            match format {
                Format::Text => writeln!(out, "{equivalent}")?,
                Format::Csv => writeln!(out, "n,m,equivalent\n{n},{m},{equivalent}")?,
                Format::Json => json_line(out, &EquivOutput { n, m, equivalent })?,
            }
        }
        &Command::Check { n, k } => {
            let verdict = antipower::ap_verdict(n, k)?;
            let (c, later) = verdict
                .witness
                .map_or((String::new(), String::new()), |(a, b)| {
                    (a.to_string(), b.to_string())
                });
            match format {
                Format::Text => match verdict.witness {
                    None => writeln!(out, "n={n} k={k} antipower")?,
                    Some((a, b)) => writeln!(
                        out,
                        "n={n} k={k} not an antipower: blocks {a} and {b} are equal"
                    )?,
                },
                Format::Csv => writeln!(
                    out,
                    "n,k,is_antipower,witness_c,witness_cprime\n{n},{k},{},{c},{later}",
                    verdict.is_antipower
                )?,
                Format::Json => json_line(out, &CheckOutput { n, k, verdict })?,
            }
        }
        &Command::Kappa { n, cap } => {
            let r = kappa::kappa(n, cap)?;
            match format {
                Format::Text => writeln!(
                    out,
                    "n={} kappa={} witness=({}, {})",
                    r.n, r.kappa, r.witness.0, r.witness.1
                )?,
                Format::Csv => writeln!(
                    out,
                    "n,kappa,witness_c,witness_cprime\n{},{},{},{}",
                    r.n, r.kappa, r.witness.0, r.witness.1
                )?,
                Format::Json => json_line(out, &r)?,
            }
        }
        &Command::Extremal { k } => {
            let r = extremal::extremal(k)?;
            let big = r.big_gamma.map(|g| g.to_string()).unwrap_or_default();
            let complement: Vec<String> = r.complement.iter().map(u64::to_string).collect();
            match format {
                Format::Text => writeln!(
                    out,
                    "k={} gamma={} Gamma={} complement=[{}]",
                    r.k,
                    r.gamma,
                    if big.is_empty() { "absent" } else { &big },
                    complement.join(", ")
                )?,
                Format::Csv => writeln!(
                    out,
                    "k,gamma,Gamma,complement\n{},{},{},{}",
                    r.k,
                    r.gamma,
                    big,
                    complement.join(" ")
                )?,
                Format::Json => json_line(out, &r)?,
            }
        }
        &Command::SweepKappa { lo, hi } => {
            let samples = asymptotics::sweep_kappa(lo, hi)?;
            match format {
                Format::Text => {
                    for s in &samples {
                        writeln!(
                            out,
                            "n={} kappa={} witness=({}, {}) ratio={} ({})",
                            s.record.n,
                            s.record.kappa,
                            s.record.witness.0,
                            s.record.witness.1,
                            s.sample.ratio,
                            s.sample.ratio.to_decimal()
                        )?;
                    }
                }
                Format::Csv => asymptotics::write_kappa_csv(&samples, &mut *out)?,
                Format::Json => json_line(out, &samples)?,
            }
        }
        &Command::SweepExtremal { lo, hi, windows } => {
            let samples = asymptotics::sweep_extremal(lo, hi)?;
            if windows {
                let series = asymptotics::extremal_series(&samples);
                match format {
                    Format::Text => {
                        for (name, ws) in &series {
                            for w in ws {
                                writeln!(
                                    out,
                                    "{name} [2^{}, 2^{}) min={} at {} max={} at {}",
                                    w.exp,
                                    w.exp + 1,
                                    w.min.to_decimal(),
                                    w.argmin,
                                    w.max.to_decimal(),
                                    w.argmax
                                )?;
                            }
                        }
                    }
                    Format::Csv => asymptotics::write_windows_csv(&series, &mut *out)?,
                    Format::Json => json_line(out, &series)?,
                }
            } else {
                match format {
                    Format::Text => {
                        for s in &samples {
                            let big = s.big_gamma.map_or("absent".to_owned(), |g| {
                                format!("{} ({})", g.value, g.ratio.to_decimal())
                            });
                            writeln!(
                                out,
                                "k={} gamma={} ({}) Gamma={}",
                                s.k,
                                s.gamma.value,
                                s.gamma.ratio.to_decimal(),
                                big
                            )?;
                        }
                    }
                    Format::Csv => asymptotics::write_extremal_csv(&samples, &mut *out)?,
                    Format::Json => json_line(out, &samples)?,
                }
            }
        }
        Command::Verify(args) => {
            let report = verify(args)?;
            match format {
                Format::Text => out.write_all(report.to_text().as_bytes())?,
                Format::Csv => write_report_csv(&report, out)?,
                Format::Json => json_line(out, &report)?,
            }
            if !report.passed() {
                return Err(Failure::Verification);
            }
        }
        &Command::Conjecture { i, margin } => {
            let r = asymptotics::conjecture_scan(i, margin)?;
            let violations: Vec<String> = r.violations.iter().map(u64::to_string).collect();
            match format {
                Format::Text => {
                    writeln!(
                        out,
                        "i={} margin={} reference=kappa({})={} window=({}, {}) candidates={} violations={} fraction={}",
                        r.i,
                        r.margin,
                        r.reference.n,
                        r.reference.kappa,
                        r.window.0,
                        r.window.1,
                        r.candidates,
                        r.violations.len(),
                        r.violation_fraction().to_decimal()
                    )?;
                    if r.is_empty_window() {
                        writeln!(out, "empty window")?;
                    } else if !violations.is_empty() {
                        writeln!(out, "violating n: {}", violations.join(" "))?;
                    }
                }
                Format::Csv => writeln!(
                    out,
                    "i,margin_num,margin_den,reference_n,reference_kappa,window_lo,window_hi,candidates,violations\n{},{},{},{},{},{},{},{},{}",
                    r.i,
                    r.margin.num,
                    r.margin.den,
                    r.reference.n,
                    r.reference.kappa,
                    r.window.0,
                    r.window.1,
                    r.candidates,
                    violations.join(" ")
                )?,
                Format::Json => json_line(out, &r)?,
            }
        }
    }
    Ok(())
}

fn range_or(args: &VerifyArgs, default: RangeInclusive<u32>) -> RangeInclusive<u32> {
    args.i.clone().unwrap_or(default)
}

fn per_exponent(
    range: RangeInclusive<u32>,
    verify: impl Fn(u32) -> tm_antipower::Result<LemmaReport>,
) -> Result<LemmaReport, Failure> {
    Ok(lemmas::over_exponents(range, verify)?.expect("ranges are nonempty"))
}

fn verify(args: &VerifyArgs) -> Result<LemmaReport, Failure> {
    let mut report = match args.lemma {
        LemmaId::DigitSum => lemmas::verify_digit_sum_prop(args.exp.unwrap_or(20))?,
        LemmaId::DigitTables => lemmas::verify_digit_tables(range_or(args, 5..=62))?,
        LemmaId::ShiftCriterion => lemmas::verify_shift_criterion(
            args.n_max.unwrap_or(63),
            args.i_max.unwrap_or(6),
            args.c_max.unwrap_or(256),
        )?,
        LemmaId::Congruence => {
            lemmas::verify_congruence(args.n_max.unwrap_or(99), args.ordinal_max.unwrap_or(4096))?
        }
        LemmaId::Doubling => {
            lemmas::verify_doubling(args.n_max.unwrap_or(512), args.k_max.unwrap_or(32))?
        }
        LemmaId::WordHygiene => lemmas::verify_word_hygiene(args.exp.unwrap_or(20))?,
        LemmaId::EightX => per_exponent(range_or(args, 5..=12), lemmas::verify_8x_family)?,
        LemmaId::ThirtyTwoX => per_exponent(range_or(args, 5..=12), lemmas::verify_32x_family)?,
        LemmaId::CloseToHigh => {
            let k_shift = args.k_shift.unwrap_or(2);
            per_exponent(range_or(args, 19..=21), |i| {
                lemmas::verify_close_to_high(i, k_shift)
            })?
        }
        LemmaId::PowerOffset => per_exponent(range_or(args, 5..=16), lemmas::verify_power_offset)?,
        LemmaId::ExactFamilies => lemmas::verify_exact_families(range_or(args, 5..=8))?,
        LemmaId::Window17Over6 => {
            per_exponent(range_or(args, 10..=14), lemmas::verify_window_17_6)?
        }
    };
    if report.entries.iter().any(|e| e.param("i").is_some()) {
        report.notes.push(match report.holds_from("i") {
            Some(i) => format!("every tested point with i >= {i} passes"),
            None => "the largest tested i has a failing point".to_owned(),
        });
    }
    Ok(report)
}

fn write_report_csv(report: &LemmaReport, out: &mut dyn Write) -> Result<(), Failure> {
    writeln!(out, "lemma,params,verdict,observed,counterexample")?;
    let join = |ps: &[lemmas::Param]| {
        ps.iter()
            .map(|p| format!("{}={}", p.name, p.value))
            .collect::<Vec<_>>()
            .join(";")
    };
    for e in &report.entries {
        let verdict = match e.verdict {
            lemmas::Verdict::Pass => "pass",
            lemmas::Verdict::Fail => "fail",
        };
        let cx = e
            .counterexample
            .as_ref()
            .map(|c| c.detail.replace('"', "'"))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},\"{}\"",
            report.lemma,
            join(&e.params),
            verdict,
            join(&e.observed),
            cx
        )?;
    }
    Ok(())
}

fn run_with_jobs(cli: &Cli, out: &mut Vec<u8>) -> Result<(), Failure> {
    #[cfg(feature = "parallel")]
    if let Some(jobs) = cli.jobs {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("--jobs {jobs}: {e}")))?;
        return pool.install(|| run(cli, out));
    }
    run(cli, out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut buffer = Vec::new();
    let result = run_with_jobs(&cli, &mut buffer);
    if let Err(e) = sink.write_all(&buffer).and_then(|()| sink.flush()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("verification failed: see counterexamples above");
            ExitCode::from(1)
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
