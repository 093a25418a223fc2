//! `bhs`: run, sweep and inspect black hole search scenarios.
//!
//! Exit status is 0 on success, 1 when a verdict fails (or, for
//! `adversary`, when a failing scenario is found) and 2 on usage errors.

use std::fs;
use std::io::{self, BufReader, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bhs_core::harness::{adversary_search, enumerate, sweep, theorem_scenario, Construction, Family, LabelingMode};
use bhs_core::scenario::default_round_bound;
use bhs_core::{judge, simulate, Labeling, ProtocolId, ScenarioSpec, Trace};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bhs", version, about = "Black hole search in anonymous rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its trace and verdict.
    Run(RunArgs),
    /// Run and judge a family of scenarios, writing a JSON report.
    Sweep(SweepArgs),
    /// Search for the first scenario on which a protocol fails.
    ///
    /// Exits with status 1 when a failing scenario is found and 0 when none is.
    Adversary(AdversaryArgs),
    /// Build a lower-bound construction and run it.
    Theorem(TheoremArgs),
    /// Print a protocol's state machine.
    DumpFsm {
        #[arg(long)]
        protocol: ProtocolId,
    },
    /// Re-run a stored trace and check that it reproduces.
    Replay {
        trace: PathBuf,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    protocol: ProtocolId,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    bh: usize,
    /// Comma-separated homebase nodes.
    #[arg(long, value_delimiter = ',', required = true)]
    homebases: Vec<usize>,
    /// One character per node: `c` when port 1 leads clockwise, `a` otherwise.
    #[arg(long)]
    labeling: Option<Labeling>,
    #[arg(long, conflicts_with = "unoriented")]
    oriented: bool,
    #[arg(long)]
    unoriented: bool,
    /// Tokens per agent; defaults to the protocol's budget.
    #[arg(long)]
    tokens: Option<u8>,
    /// Make tokens unmovable regardless of the protocol.
    #[arg(long)]
    unmovable: bool,
    #[arg(long)]
    bound: Option<u64>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Also write the structured trace to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    protocol: ProtocolId,
    /// Ring sizes, e.g. `6..9` (inclusive) or `7`.
    #[arg(long, value_parser = parse_range)]
    n: RangeInclusive<usize>,
    /// Agent counts; defaults to the protocol minimum up to n-1.
    #[arg(long, value_parser = parse_range)]
    k: Option<RangeInclusive<usize>>,
    /// Every port labeling, up to reflection.
    #[arg(long, conflicts_with = "sampled")]
    exhaustive: bool,
    /// Random placements crossed with random labelings per ring size.
    #[arg(long)]
    sampled: bool,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    placements: usize,
    #[arg(long, default_value_t = 256)]
    labelings: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Where to write the JSON report; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for structured traces of the failure exemplars.
    #[arg(long)]
    traces: Option<PathBuf>,
}

#[derive(Args)]
struct AdversaryArgs {
    #[arg(long)]
    protocol: ProtocolId,
    #[arg(long)]
    agents: usize,
    #[arg(long)]
    tokens: Option<u8>,
    #[arg(long)]
    unmovable: bool,
    #[arg(long, default_value_t = 20)]
    nmax: usize,
}

#[derive(Args)]
struct TheoremArgs {
    #[command(subcommand)]
    construction: ConstructionCmd,
    #[arg(long, value_enum, default_value = "human", global = true)]
    format: Format,
}

#[derive(Subcommand)]
enum ConstructionCmd {
    /// Agents 2(p+1) apart, one unmovable token each, under BHS-Ring-1.
    Periodic {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: usize,
    },
    /// Three agents 4t apart with t unmovable tokens, under BHS-Ring-2.
    ThreeAgents {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
    },
    /// Four mirror-symmetric agents with t unmovable tokens, under BHS-Ring-3.
    MirrorFour {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        x: usize,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok(a..=b)
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn emit_trace(trace: &Trace, format: Format) {
    let verdict = judge(trace);
    match format {
        Format::Human => {
            print!("{}", trace.render_human(trace.spec.protocol.automaton()));
            println!("verdict: {verdict}");
        }
        Format::Structured => {
            print!("{}", trace.to_jsonl());
            println!("{}", serde_json::json!({ "type": "verdict", "verdict": verdict }));
        }
    }
}

fn run(a: RunArgs) -> ExitCode {
    let meta = a.protocol.meta();
    let mut spec = ScenarioSpec::new(a.protocol, a.n, a.bh, a.homebases);
    if a.unoriented || (a.labeling.is_some() && !a.oriented) {
        let labeling = a.labeling.unwrap_or_else(|| Labeling::consistent(a.n));
        spec = spec.unoriented(labeling);
    }
    spec = spec.with_tokens(a.tokens.unwrap_or(meta.tokens_per_agent), meta.movable && !a.unmovable);
    spec.round_bound = a.bound.unwrap_or_else(|| default_round_bound(a.n));
    let trace = match simulate(&spec, a.protocol.automaton()) {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    if let Some(p) = &a.out {
        if let Err(e) = fs::write(p, trace.to_jsonl()) {
            return usage(e);
        }
    }
    emit_trace(&trace, a.format);
    status(judge(&trace).success)
}

fn run_sweep(a: SweepArgs) -> ExitCode {
    let min = a.protocol.meta().min_agents;
    let k = a.k.unwrap_or(min..=*a.n.end());
    let mode = if a.exhaustive {
        LabelingMode::Exhaustive
    } else if a.sampled {
        LabelingMode::Sampled { seed: a.seed, placements: a.placements, labelings: a.labelings }
    } else {
        LabelingMode::Oriented
    };
    let family = Family { protocol: a.protocol, n: a.n, k, mode };
    if let Some(w) = family.budget_warning(bhs_core::harness::DEFAULT_CAP) {
        eprintln!("warning: {w}");
    }
    let report = sweep(enumerate(&family), a.jobs);
    if let Err(e) = write_or_print(a.out.as_deref(), &(report.to_json() + "\n")) {
        return usage(e);
    }
    if let Some(dir) = &a.traces {
        if let Err(e) = fs::create_dir_all(dir) {
            return usage(e);
        }
        for ex in &report.failure_exemplars {
            if let Ok(trace) = simulate(&ex.spec, ex.spec.protocol.automaton()) {
                let path = dir.join(format!("failure-{:08}.jsonl", ex.index));
                if let Err(e) = fs::write(&path, trace.to_jsonl()) {
                    return usage(e);
                }
            }
        }
    }
    eprintln!(
        "{} scenarios, {} succeeded, {} with property violations",
        report.scenarios, report.successes, report.traces_with_violations
    );
    status(report.is_clean())
}

fn run_adversary(a: AdversaryArgs) -> ExitCode {
    let meta = a.protocol.meta();
    if a.nmax < a.agents + 1 {
        return usage("--nmax must be at least agents + 1");
    }
    let tokens = a.tokens.unwrap_or(meta.tokens_per_agent);
    match adversary_search(a.protocol.automaton(), a.agents, tokens, meta.movable && !a.unmovable, a.nmax) {
        Some(hit) => {
            println!("{}", serde_json::to_string(&hit.spec).expect("spec serializes"));
            println!("verdict: {} (after {} scenarios)", hit.verdict, hit.examined);
            ExitCode::from(1)
        }
        None => {
            println!("none");
            ExitCode::SUCCESS
        }
    }
}

fn run_theorem(a: TheoremArgs) -> ExitCode {
    let c = match a.construction {
        ConstructionCmd::Periodic { k, p } => Construction::Periodic { k, p },
        ConstructionCmd::ThreeAgents { t, x, y } => Construction::ThreeAgents { t, x, y },
        ConstructionCmd::MirrorFour { t, x } => Construction::MirrorFour { t, x },
    };
    let specs = match theorem_scenario(c) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let mut all_ok = true;
    for spec in specs {
        let trace = match simulate(&spec, spec.protocol.automaton()) {
            Ok(t) => t,
            Err(e) => return usage(e),
        };
        let verdict = judge(&trace);
        all_ok &= verdict.success;
        match a.format {
            Format::Human => {
                println!("{}", serde_json::to_string(&spec).expect("spec serializes"));
                println!("verdict: {verdict}");
            }
            Format::Structured => emit_trace(&trace, Format::Structured),
        }
    }
    status(all_ok)
}

fn replay(path: &Path, format: Format) -> ExitCode {
    let stored = match fs::File::open(path).map_err(bhs_core::TraceError::from).and_then(|f| Trace::read_jsonl(BufReader::new(f))) {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    let fresh = match simulate(&stored.spec, stored.spec.protocol.automaton()) {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    let (was, now) = (judge(&stored), judge(&fresh));
    if fresh != stored {
        eprintln!("replay diverged: stored {was}, now {now}");
        return ExitCode::from(1);
    }
    emit_trace(&fresh, format);
    status(now.success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Adversary(a) => run_adversary(a),
        Command::Theorem(a) => run_theorem(a),
        Command::DumpFsm { protocol } => {
            print!("{}", protocol.automaton().dump());
            ExitCode::SUCCESS
        }
        Command::Replay { trace, format } => replay(&trace, format),
    }
}
