//! Command-line front end: share dealing, seeded session execution, attack
//! experiments, and the property suite.
//!
//! Exit codes: 0 success/accepted, 2 validation error, 3 verification
//! rejected, 4 I/O error, 5 property-suite failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use qtss::adversary::{
    self, exhaustive_fake_share, exhaustive_intercept_resend, exhaustive_lying_measurer,
    exhaustive_state_replacement, AttackStrategy, ExhaustiveRates,
};
use qtss::gf::{FieldElement, PrimeModulus};
use qtss::properties;
use qtss::protocol::{
    classical_phase, run_honest_session, DealerSecrets, SessionParams, Transcript,
    TranscriptExport, Verdict,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_REJECTED: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_PROPERTIES: u8 = 5;

#[derive(Parser)]
#[command(name = "qtss", version, about = "threshold quantum secret sharing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deal classical shares of a fresh private value
    Deal(DealArgs),
    /// Run one full secret sharing session
    Run(RunArgs),
    /// Run an attack experiment and report detection rates
    Attack(AttackArgs),
    /// Run the property suite
    Properties(PropertiesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    InterceptResend,
    FakeShare,
    LyingMeasurer,
    StateReplacement,
}

#[derive(Args)]
struct CommonOut {
    /// Output file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// JSON is canonical; CSV mirrors its fields in fixed column order
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct DealArgs {
    #[arg(long, default_value_t = 7)]
    d: u64,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Master seed; drawn from entropy (and echoed) when omitted
    #[arg(long)]
    seed: Option<u64>,
    /// Include the private value in the output
    #[arg(long)]
    unsafe_dump: bool,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 7)]
    d: u64,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Number of active participants; defaults to n
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 3)]
    s1: u64,
    #[arg(long, default_value_t = 2)]
    s2: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Have this participant (0-based line index) use a wrong component
    #[arg(long)]
    corrupt_participant: Option<usize>,
    /// Include dealer secrets in the exported transcript
    #[arg(long)]
    unsafe_dump: bool,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 7)]
    d: u64,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 3)]
    s1: u64,
    #[arg(long, default_value_t = 2)]
    s2: u64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Hop index where the attacker strikes (also the cheater's line index)
    #[arg(long, default_value_t = 0)]
    position: usize,
    /// Enumerate all attacker and measurement branches exactly instead of
    /// sampling; small d only
    #[arg(long)]
    exhaustive: bool,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct PropertiesArgs {
    /// Dimensions to check
    #[arg(long, value_delimiter = ',', default_values_t = vec![3u64, 5, 7, 11])]
    d: Vec<u64>,
    /// Negative-control hook: perturb one amplitude so the suite must fail
    #[arg(long, hide = true)]
    perturb: bool,
}

enum CliError {
    Validation(String),
    Rejected,
    Io(String),
    Properties,
}

impl From<qtss::protocol::ProtocolError> for CliError {
    fn from(e: qtss::protocol::ProtocolError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<qtss::gf::GfError> for CliError {
    fn from(e: qtss::gf::GfError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<qtss::sss::SssError> for CliError {
    fn from(e: qtss::sss::SssError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Deal(args) => cmd_deal(args),
        Command::Run(args) => cmd_run(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Properties(args) => cmd_properties(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(CliError::Rejected) => {
            eprintln!("verification rejected");
            ExitCode::from(EXIT_REJECTED)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(CliError::Properties) => ExitCode::from(EXIT_PROPERTIES),
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| rand::rng().random())
}

fn emit(out: &CommonOut, json: String, csv: String) -> Result<(), CliError> {
    let content = match out.format {
        OutputFormat::Json => json,
        OutputFormat::Csv => csv,
    };
    match &out.output {
        Some(path) => std::fs::write(path, content).map_err(|e| CliError::Io(e.to_string())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report types");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ShareFile {
    version: u32,
    d: u64,
    t: usize,
    n: usize,
    seed: u64,
    shares: Vec<ShareEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    private_value: Option<u64>,
}

#[derive(Serialize)]
struct ShareEntry {
    x: u64,
    y: u64,
}

fn cmd_deal(args: DealArgs) -> Result<(), CliError> {
    let d = PrimeModulus::new(args.d)?;
    let params = SessionParams::new(d, args.t, args.n, args.t)?;
    let seed = resolve_seed(args.seed);
    let mut rng = adversary::trial_rng(seed, 0);
    let deal = classical_phase(&params, &mut rng)?;
    let file = ShareFile {
        version: 1,
        d: args.d,
        t: args.t,
        n: args.n,
        seed,
        shares: deal
            .shares
            .iter()
            .map(|s| ShareEntry { x: s.x.value(), y: s.y.value() })
            .collect(),
        private_value: args.unsafe_dump.then_some(deal.s.value()),
    };
    let mut csv = String::from("d,t,n,seed,x,y\n");
    for s in &file.shares {
        writeln!(csv, "{},{},{},{},{},{}", file.d, file.t, file.n, file.seed, s.x, s.y).unwrap();
    }
    emit(&args.out, to_pretty_json(&file), csv)
}

#[derive(Serialize)]
struct RunFile {
    seed: u64,
    #[serde(flatten)]
    transcript: TranscriptExport,
}

fn transcript_csv(seed: u64, t: &TranscriptExport) -> String {
    let verdict = match t.verdict {
        Verdict::Accepted => "accepted",
        Verdict::Rejected => "rejected",
    };
    let mut csv = String::from("seed,version,d,t,n,m,r1,r2,r3,rec1,rec2,rec3,verdict\n");
    writeln!(
        csv,
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        seed,
        t.version,
        t.d,
        t.t,
        t.n,
        t.m,
        t.results[0],
        t.results[1],
        t.results[2],
        t.recovered[0],
        t.recovered[1],
        t.recovered[2],
        verdict
    )
    .unwrap();
    csv
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let d = PrimeModulus::new(args.d)?;
    let m = args.m.unwrap_or(args.n);
    let params = SessionParams::new(d, args.t, args.n, m)?;
    let s1 = d.element(args.s1);
    let s2 = d.element(args.s2);
    let seed = resolve_seed(args.seed);
    let mut rng = adversary::trial_rng(seed, 0);

    match args.corrupt_participant {
        None => {
            let deal = classical_phase(&params, &mut rng)?;
            let transcript = run_honest_session(&params, s1, s2, &deal, &mut rng)?;
            let export = transcript.export(args.unsafe_dump);
            finish_run(args, seed, transcript.verdict, transcript.recovered, s1, s2, export)
        }
        Some(idx) => {
            if idx >= m {
                return Err(CliError::Validation(format!(
                    "corrupt participant index {idx} out of line of {m}"
                )));
            }
            let outcome = adversary::run_attacked_session(
                &params,
                s1,
                s2,
                AttackStrategy::FakeShareParticipant { cheater_index: idx },
                &mut rng,
            )?;
            let transcript = Transcript {
                d: args.d,
                t: args.t,
                n: args.n,
                active_xs: params.active_xs().to_vec(),
                hops: Vec::new(),
                results: outcome.results,
                exchanged: outcome.exchanged.clone(),
                recovered: outcome.recovered,
                verdict: outcome.verdict,
                results_published_first: true,
                dealer: Some(DealerSecrets::derive(s1, s2, d.zero())?),
            };
            let export = transcript.export(args.unsafe_dump);
            finish_run(args, seed, outcome.verdict, outcome.recovered, s1, s2, export)
        }
    }
}

fn finish_run(
    args: RunArgs,
    seed: u64,
    verdict: Verdict,
    recovered: [FieldElement; 3],
    s1: FieldElement,
    s2: FieldElement,
    export: TranscriptExport,
) -> Result<(), CliError> {
    eprintln!(
        "verdict: {:?}, recovered: ({}, {}, {})",
        verdict, recovered[0], recovered[1], recovered[2]
    );
    let file = RunFile { seed, transcript: export };
    emit(&args.out, to_pretty_json(&file), transcript_csv(seed, &file.transcript))?;
    if verdict == Verdict::Rejected || recovered[0] != s1 || recovered[1] != s2 {
        return Err(CliError::Rejected);
    }
    Ok(())
}

#[derive(Serialize)]
struct ExhaustiveFile {
    strategy: String,
    d: u64,
    detected: u128,
    attacker_learned: u128,
    total: u128,
    detection_rate: f64,
}

fn cmd_attack(args: AttackArgs) -> Result<(), CliError> {
    let d = PrimeModulus::new(args.d)?;
    let m = args.m.unwrap_or(args.n);
    let params = SessionParams::new(d, args.t, args.n, m)?;
    let s1 = d.element(args.s1);
    let s2 = d.element(args.s2);
    if args.position >= m {
        return Err(CliError::Validation(format!(
            "position {} out of line of {m}",
            args.position
        )));
    }

    if args.exhaustive {
        let cap = if matches!(args.strategy, StrategyArg::StateReplacement) { 7 } else { 31 };
        if args.d > cap {
            return Err(CliError::Validation(format!(
                "exhaustive enumeration capped at d <= {cap} for this strategy"
            )));
        }
        let secrets = DealerSecrets::derive(s1, s2, d.zero())?;
        let (name, rates): (&str, ExhaustiveRates) = match args.strategy {
            StrategyArg::InterceptResend => {
                ("intercept-resend", exhaustive_intercept_resend(&secrets))
            }
            StrategyArg::FakeShare => ("fake-share", exhaustive_fake_share(&secrets)),
            StrategyArg::LyingMeasurer => ("lying-measurer", exhaustive_lying_measurer(&secrets)),
            StrategyArg::StateReplacement => {
                ("state-replacement", exhaustive_state_replacement(&secrets))
            }
        };
        let file = ExhaustiveFile {
            strategy: name.to_string(),
            d: args.d,
            detected: rates.detected,
            attacker_learned: rates.attacker_learned,
            total: rates.total,
            detection_rate: rates.detection_rate(),
        };
        let csv = format!(
            "strategy,d,detected,attacker_learned,total,detection_rate\n{},{},{},{},{},{}\n",
            file.strategy, file.d, file.detected, file.attacker_learned, file.total,
            file.detection_rate
        );
        return emit(&args.out, to_pretty_json(&file), csv);
    }

    if args.trials == 0 {
        return Err(CliError::Validation("trials must be >= 1".into()));
    }
    let seed = resolve_seed(args.seed);
    let report = match args.strategy {
        StrategyArg::InterceptResend => {
            adversary::run_intercept_resend(&params, s1, s2, args.position, args.trials, seed)?
        }
        StrategyArg::FakeShare => {
            adversary::run_fake_share(&params, s1, s2, args.position, args.trials, seed)?
        }
        StrategyArg::LyingMeasurer => {
            adversary::run_lying_measurer(&params, s1, s2, args.trials, seed)?
        }
        StrategyArg::StateReplacement => {
            adversary::run_state_replacement(&params, s1, s2, args.position, args.trials, seed)?
        }
    };
    let csv = format!(
        "strategy,d,t,n,m,trials,detected,undetected_wrong_secret,attacker_learned_secret,\
         detection_rate,ci_low,ci_high,prediction,seed\n\
         {},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        report.strategy,
        report.d,
        report.t,
        report.n,
        report.m,
        report.trials,
        report.detected,
        report.undetected_wrong_secret,
        report.attacker_learned_secret,
        report.detection_rate,
        report.ci95[0],
        report.ci95[1],
        report.prediction,
        report.seed
    );
    emit(&args.out, to_pretty_json(&report), csv)
}

fn cmd_properties(args: PropertiesArgs) -> Result<(), CliError> {
    let mut failed = false;
    for (name, result) in properties::run_all(&args.d, args.perturb) {
        match result {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failed = true;
            }
        }
    }
    if failed {
        Err(CliError::Properties)
    } else {
        Ok(())
    }
}
