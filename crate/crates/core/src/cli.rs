//! The `dyncons` command line: generate, run, check, oracle, batch, report.
//!
//! Exit codes: 0 on success, 1 when a checker fails (or on I/O trouble while
//! writing), 2 on usage, parse, or infeasibility errors.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::adversary::{
    churn, complete_then_rings, expander, random_single_root, reversing_line, short_window,
    stable_window, static_line, static_star, two_roots, AdversaryError, ExpanderConfig, Scenario,
    StableWindowConfig,
};
use crate::consensus::UnlockRule;
use crate::graph_core::{
    causal_distance, find_r_st, Interval, ProcessId, Round, RoundProfile,
};
use crate::harness::{
    batch, check_all, read_csv, read_trace, run, summarize, write_csv, write_trace, BatchRow,
    BatchSpec, CheckerVerdict, Family, HarnessError, Outcome, RunOptions, Witness,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dyncons", version, about = "Consensus in dynamic directed networks: generators, simulator, oracle, checkers")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated scenario and print its oracle summary.
    Generate(GenerateArgs),
    /// Simulate a scenario, write the trace, and run every checker.
    Run(RunArgs),
    /// Re-check a recorded trace against its scenario.
    Check(CheckArgs),
    /// Ask the ground-truth oracle about a scenario.
    Oracle(OracleArgs),
    /// Run a seeded sweep and write a CSV report.
    Batch(BatchArgs),
    /// Aggregate one or more CSV reports.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum GenName {
    StableWindow,
    Churn,
    RandomSingleRoot,
    StaticLine,
    StaticStar,
    ReversingLine,
    TwoRoots,
    CompleteThenRings,
    ShortWindow,
    Expander,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UnlockArg {
    Keep,
    Reset,
}

#[derive(Debug, clap::Args)]
struct GenerateArgs {
    #[arg(long = "gen")]
    generator: GenName,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    horizon: Option<Round>,
    #[arg(long)]
    out: PathBuf,
    /// stable_window: first round of the window.
    #[arg(long, default_value_t = 1)]
    r_st: Round,
    /// stable_window: window length, at least 4D+2.
    #[arg(long)]
    window: Option<Round>,
    /// stable_window: keep one topology for the whole window.
    #[arg(long)]
    static_window: bool,
    /// two_roots: size of the root holding input 0.
    #[arg(long, default_value_t = 2)]
    n0: usize,
    /// two_roots: size of the root holding input 1.
    #[arg(long, default_value_t = 2)]
    n1: usize,
    /// reversing_line: last round before the line flips.
    #[arg(long)]
    kappa: Option<Round>,
    /// short_window: one more window round.
    #[arg(long)]
    extended: bool,
    /// expander: size of the root set (default n/8).
    #[arg(long)]
    root_size: Option<usize>,
    /// expander: degree of the random regular graphs.
    #[arg(long, default_value_t = 4)]
    degree: usize,
    /// expander: keep one topology for all rounds.
    #[arg(long)]
    no_reshuffle: bool,
    /// What unlocking does to lockRound.
    #[arg(long, value_enum, default_value_t = UnlockArg::Keep)]
    unlock_rule: UnlockArg,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    /// Forget approximation labels older than 4D rounds.
    #[arg(long)]
    prune: bool,
    #[arg(long)]
    horizon: Option<Round>,
    /// Skip the approximation invariant checker (saves memory on big runs).
    #[arg(long)]
    no_approx: bool,
}

#[derive(Debug, clap::Args)]
struct CheckArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    trace: PathBuf,
}

#[derive(Debug, clap::Args)]
struct OracleArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// `roots`, `cd P Q R`, `diam R S`, `rst`, or `intervals`.
    #[arg(long, num_args = 1.., allow_hyphen_values = true)]
    query: Vec<String>,
}

#[derive(Debug, clap::Args)]
struct BatchArgs {
    #[arg(long = "gen")]
    family: Family,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    start: u64,
    /// Number of seeds.
    #[arg(long)]
    count: u64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    horizon: Option<Round>,
    #[arg(long)]
    prune: bool,
    /// Also keep approximation states and check their invariants.
    #[arg(long)]
    approx: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
struct ReportArgs {
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CHECK_FAILED,
            message: message.into(),
        }
    }
}

impl From<AdversaryError> for Failure {
    fn from(e: AdversaryError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::usage(e.to_string())
    }
}

type Out<'a> = &'a mut dyn Write;

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: Out, err: Out) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a, out),
        Command::Run(a) => run_cmd(a, out),
        Command::Check(a) => check_cmd(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Batch(a) => batch_cmd(a, out),
        Command::Report(a) => report(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn need<T>(v: Option<T>, flag: &str, generator: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::usage(format!("--{flag} is required for {generator}")))
}

fn build(a: &GenerateArgs) -> Result<Scenario, Failure> {
    let name = a
        .generator
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string();
    let s = match a.generator {
        GenName::StableWindow => {
            let n = need(a.n, "n", &name)?;
            let d = need(a.d, "d", &name)?;
            let window_len = a.window.unwrap_or(4 * d + 2);
            let horizon = a.horizon.unwrap_or(a.r_st + window_len - 1 + d);
            stable_window(StableWindowConfig {
                seed: a.seed,
                n,
                d,
                r_st: a.r_st,
                window_len,
                horizon,
                churn: !a.static_window,
            })?
        }
        GenName::Churn => churn(a.seed, need(a.n, "n", &name)?, need(a.d, "d", &name)?, need(a.horizon, "horizon", &name)?)?,
        GenName::RandomSingleRoot => random_single_root(
            a.seed,
            need(a.n, "n", &name)?,
            need(a.d, "d", &name)?,
            need(a.horizon, "horizon", &name)?,
        )?,
        GenName::StaticLine => static_line(need(a.n, "n", &name)?, need(a.horizon, "horizon", &name)?)?,
        GenName::StaticStar => static_star(need(a.n, "n", &name)?, need(a.horizon, "horizon", &name)?)?,
        GenName::ReversingLine => reversing_line(
            need(a.n, "n", &name)?,
            need(a.kappa, "kappa", &name)?,
            need(a.horizon, "horizon", &name)?,
        )?,
        GenName::TwoRoots => two_roots(a.n0, a.n1, a.horizon.unwrap_or(60))?,
        GenName::CompleteThenRings => complete_then_rings()?,
        GenName::ShortWindow => short_window(
            a.seed,
            need(a.n, "n", &name)?,
            need(a.d, "d", &name)?,
            need(a.horizon, "horizon", &name)?,
            a.extended,
        )?,
        GenName::Expander => {
            let n = need(a.n, "n", &name)?;
            let cfg = ExpanderConfig {
                n,
                root_size: a.root_size.unwrap_or((n / 8).max(1)),
                degree: a.degree,
                alpha_target: 0.0,
                reshuffle: !a.no_reshuffle,
            };
            expander(cfg, a.seed, a.horizon.unwrap_or(40))?
        }
    };
    Ok(s)
}

fn generate(a: GenerateArgs, out: Out) -> Result<i32, Failure> {
    let mut s = build(&a)?;
    s.meta.unlock_rule = match a.unlock_rule {
        UnlockArg::Keep => UnlockRule::KeepLockRound,
        UnlockArg::Reset => UnlockRule::ResetLockRound,
    };
    s.save(&a.out).map_err(|e| Failure::io(e.to_string()))?;
    write_summary(&s, out).map_err(|e| Failure::io(e.to_string()))?;
    Ok(EXIT_OK)
}

fn set_str(set: &std::collections::BTreeSet<ProcessId>) -> String {
    let ids: Vec<String> = set.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

/// Rounds grouped into maximal runs with identical root components.
fn root_runs(profile: &RoundProfile) -> Vec<(Interval, String)> {
    let mut runs: Vec<(Interval, String)> = Vec::new();
    for r in 1..=profile.horizon() {
        let text: Vec<String> = profile.roots(r).roots.iter().map(|c| c.to_string()).collect();
        let text = text.join(" ");
        match runs.last_mut() {
            Some((iv, last)) if *last == text => iv.end = r,
            _ => runs.push((Interval::new(r, r), text)),
        }
    }
    runs
}

fn write_summary(s: &Scenario, out: Out) -> std::io::Result<()> {
    let profile = RoundProfile::compute(&s.rounds);
    let c = s.classify();
    let t = s.horizon();
    writeln!(
        out,
        "generator={} seed={} n={} D={} horizon={}",
        s.meta.generator,
        s.meta.seed,
        s.n(),
        s.d,
        t
    )?;
    let runs: Vec<String> = root_runs(&profile)
        .into_iter()
        .map(|(iv, text)| format!("{iv} {text}"))
        .collect();
    writeln!(out, "root components: {}", runs.join(" | "))?;
    let max_roots = (1..=t).map(|r| profile.roots(r).roots.len()).max().unwrap_or(0);
    writeln!(
        out,
        "roots={max_roots} multi_root_rounds={}/{t}",
        c.report.multi_root_rounds.len()
    )?;
    writeln!(out, "unbounded_stable_roots={}", c.report.unbounded_intervals.len())?;
    match c.report.r_st {
        Some(r) => writeln!(out, "r_ST={r} bound={}", r + 4 * s.d + 1)?,
        None => writeln!(out, "r_ST=NONE")?,
    }
    writeln!(out, "tag={} oracle={}", s.meta.assumption, c.tag)?;
    if c.report.assumption_holds() {
        writeln!(out, "assumption holds")
    } else {
        writeln!(out, "assumption violated")
    }
}

fn verdict_lines(verdicts: &[CheckerVerdict], out: Out) -> std::io::Result<()> {
    for v in verdicts {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

fn exit_for(verdicts: &[CheckerVerdict]) -> i32 {
    if verdicts.iter().any(CheckerVerdict::failed) {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    }
}

fn run_cmd(a: RunArgs, out: Out) -> Result<i32, Failure> {
    let s = Scenario::load(&a.scenario)?;
    let options = RunOptions {
        prune: a.prune,
        horizon_override: a.horizon,
        digests: true,
        keep_states: !a.no_approx,
        crashes: Vec::new(),
    };
    let mut trace = run(&s, &options)?;
    let verdicts = check_all(&trace, &s);
    trace.header.verdicts = verdicts.clone();
    let file = File::create(&a.trace).map_err(|e| Failure::io(format!("{}: {e}", a.trace.display())))?;
    write_trace(&trace, BufWriter::new(file)).map_err(|e| Failure::io(e.to_string()))?;
    let io = |e: std::io::Error| Failure::io(e.to_string());
    writeln!(
        out,
        "decided={}/{} first={} last={}",
        trace.decisions().len(),
        s.n(),
        opt(trace.first_decision()),
        opt(trace.last_decision())
    )
    .map_err(io)?;
    verdict_lines(&verdicts, out).map_err(io)?;
    Ok(exit_for(&verdicts))
}

fn opt(r: Option<Round>) -> String {
    r.map_or_else(|| "-".to_string(), |r| r.to_string())
}

fn check_cmd(a: CheckArgs, out: Out) -> Result<i32, Failure> {
    let s = Scenario::load(&a.scenario)?;
    let file = File::open(&a.trace).map_err(|e| Failure::usage(format!("{}: {e}", a.trace.display())))?;
    let mut trace = read_trace(BufReader::new(file))?;
    if trace.header.scenario_digest != s.digest() {
        return Err(Failure::usage("trace was recorded for a different scenario"));
    }
    let mut options = trace.header.options.clone();
    options.keep_states = true;
    let replay = run(&s, &options)?;
    let mut verdicts = Vec::new();
    let first_diff = (0..trace.rounds.len()).find(|&i| replay.rounds.get(i) != Some(&trace.rounds[i]));
    verdicts.push(match first_diff {
        None => CheckerVerdict {
            name: "REPLAY".into(),
            outcome: Outcome::Pass,
            witness: None,
            note: None,
        },
        Some(i) => CheckerVerdict {
            name: "REPLAY".into(),
            outcome: Outcome::Fail,
            witness: Some(Witness {
                round: i as Round + 1,
                processes: vec![],
                values: vec![],
                detail: "recorded round differs from the replay".into(),
            }),
            note: None,
        },
    });
    if first_diff.is_none() {
        trace.approx_states = replay.approx_states;
    }
    verdicts.extend(check_all(&trace, &s));
    verdict_lines(&verdicts, out).map_err(|e| Failure::io(e.to_string()))?;
    Ok(exit_for(&verdicts))
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, Failure> {
    s.parse()
        .map_err(|_| Failure::usage(format!("bad {what} `{s}`")))
}

fn oracle(a: OracleArgs, out: Out) -> Result<i32, Failure> {
    let s = Scenario::load(&a.scenario)?;
    let q: Vec<&str> = a.query.iter().map(String::as_str).collect();
    let io = |e: std::io::Error| Failure::io(e.to_string());
    let bad = |e: crate::graph_core::GraphError| Failure::usage(e.to_string());
    match q.as_slice() {
        ["roots"] => {
            let profile = RoundProfile::compute(&s.rounds);
            for r in 1..=s.horizon() {
                let roots: Vec<String> = profile.roots(r).roots.iter().map(|c| c.to_string()).collect();
                writeln!(out, "{r}: {}", roots.join(" ")).map_err(io)?;
            }
        }
        ["cd", p, qq, r] => {
            let (p, qq, r) = (
                ProcessId(parse_num(p, "process")?),
                ProcessId(parse_num(qq, "process")?),
                parse_num::<Round>(r, "round")?,
            );
            let d = causal_distance(&s.rounds, r, p, qq).map_err(bad)?;
            writeln!(out, "cd_{r}({p},{qq})={d}").map_err(io)?;
        }
        ["diam", r, e] => {
            let iv = Interval::new(parse_num(r, "round")?, parse_num(e, "round")?);
            let d = crate::graph_core::network_causal_diameter(&s.rounds, iv).map_err(bad)?;
            writeln!(out, "D^{iv}={d}").map_err(io)?;
        }
        ["rst"] => {
            let rep = find_r_st(&s.rounds, s.d).map_err(bad)?;
            writeln!(out, "r_ST={}", rep.r_st.map_or("NONE".to_string(), |r| r.to_string())).map_err(io)?;
        }
        ["intervals"] => {
            let iv = crate::graph_core::vertex_stable_intervals(&s.rounds);
            for rep in iv.intervals {
                writeln!(
                    out,
                    "{} {} D={} bounded_for={}",
                    rep.interval,
                    set_str(&rep.vertex_set),
                    rep.interval_diameter,
                    rep.d_bounded_for.map_or("-".to_string(), |d| d.to_string())
                )
                .map_err(io)?;
            }
        }
        _ => {
            return Err(Failure::usage(format!(
                "unknown query `{}`; expected roots | cd P Q R | diam R S | rst | intervals",
                q.join(" ")
            )))
        }
    }
    Ok(EXIT_OK)
}

fn batch_cmd(a: BatchArgs, out: Out) -> Result<i32, Failure> {
    let spec = BatchSpec {
        family: a.family,
        n: a.n,
        d: a.d,
        horizon: a.horizon,
        prune: a.prune,
        approx: a.approx,
    };
    let seeds: Vec<u64> = (a.start..a.start + a.count).collect();
    let entries = batch(&spec, &seeds)?;
    let rows: Vec<BatchRow> = entries.iter().map(|e| e.row.clone()).collect();
    if let Some(path) = &a.out {
        let file = File::create(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        write_csv(&rows, BufWriter::new(file)).map_err(|e| Failure::io(e.to_string()))?;
    }
    let io = |e: std::io::Error| Failure::io(e.to_string());
    write!(out, "{}", summarize(&rows)).map_err(io)?;
    let mut failed = false;
    for e in &entries {
        for v in &e.failures {
            failed = true;
            writeln!(out, "seed {}: {v}", e.row.seed).map_err(io)?;
        }
    }
    Ok(if failed { EXIT_CHECK_FAILED } else { EXIT_OK })
}

fn report(a: ReportArgs, out: Out) -> Result<i32, Failure> {
    let mut rows = Vec::new();
    for path in &a.inputs {
        let file = File::open(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        rows.extend(read_csv(file)?);
    }
    let summary = summarize(&rows);
    let io = |e: std::io::Error| Failure::io(e.to_string());
    match a.format {
        Format::Text => write!(out, "{summary}").map_err(io)?,
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&summary).expect("summary serializes")
        )
        .map_err(io)?,
    }
    Ok(EXIT_OK)
}
