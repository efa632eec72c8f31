/// `println!` that exits quietly when stdout is closed early.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($t)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("cannot write to stdout: {e}");
        }
    }};
}

mod commands;
mod style;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Stable process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    GoalFailed = 1,
    Inconsistent = 2,
    Parse = 3,
    Usage = 4,
}

/// A command that stopped early, with the message to print on stderr.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure { exit: Exit::Usage, message: message.into() }
    }
}

#[derive(Parser, Debug)]
#[command(name = "privarch", version, about = "Check, prove and simulate privacy architectures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the consistency checks.
    Check(CheckArgs),
    /// Derive each goal with the proof system.
    Prove(ProveArgs),
    /// Print random compatible traces and their final states.
    Simulate(SimulateArgs),
    /// Decide each goal against the bounded trace semantics.
    Verify(VerifyArgs),
    /// Compare prover and semantic verdicts.
    Crosscheck(CrosscheckArgs),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MutationArg {
    DropK5Trust,
}

#[derive(Args, Debug)]
pub struct ProveArgs {
    pub path: PathBuf,
    /// Goal to prove: a 1-based index into the bundle's goals, or a goal in bundle syntax.
    /// Repeatable. Defaults to every goal of the bundle.
    #[arg(long)]
    pub goal: Vec<String>,
    /// Rounds of deduction-rule application.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub json: bool,
    #[arg(long, value_enum, hide = true)]
    pub mutate: Option<MutationArg>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Maximum number of events per trace.
    #[arg(long, default_value_t = 64)]
    pub max_len: usize,
    #[arg(long)]
    pub json: bool,
}

/// Overrides for the bundle's model section.
#[derive(Args, Debug, Clone)]
pub struct BoundsArgs {
    /// Value domain as `LO..HI`.
    #[arg(long)]
    pub domain: Option<String>,
    /// Give every array this range.
    #[arg(long)]
    pub range: Option<usize>,
    /// Dep-licensed adversarial computations allowed per trace.
    #[arg(long)]
    pub max_adversarial: Option<usize>,
    #[arg(long)]
    pub max_states: Option<usize>,
    #[arg(long)]
    pub max_trace_len: Option<usize>,
    /// Try at most this many values for each freely chosen slot.
    #[arg(long)]
    pub value_cap: Option<usize>,
    /// Quantify knowledge over every live state rather than only viable ones.
    #[arg(long)]
    pub literal: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub goal: Vec<String>,
    #[command(flatten)]
    pub bounds: BoundsArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct CrosscheckArgs {
    /// Bundle to check; omit with `--random`.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    pub path: Option<PathBuf>,
    /// Check this many generated architectures instead of a bundle.
    #[arg(long)]
    pub random: Option<usize>,
    /// First seed of the generated batch.
    #[arg(long, default_value_t = 1, requires = "random")]
    pub seed: u64,
    /// Also check every possession atom and every single-equation knowledge and belief atom.
    #[arg(long)]
    pub family: bool,
    #[arg(long)]
    pub goal: Vec<String>,
    #[command(flatten)]
    pub bounds: BoundsArgs,
    #[arg(long)]
    pub json: bool,
    #[arg(long, value_enum, hide = true)]
    pub mutate: Option<MutationArg>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage as u8 } else { 0 });
        }
    };
    let style = match style::Style::from_env() {
        Ok(s) => s,
        Err(m) => {
            eprintln!("error: {m}");
            return ExitCode::from(Exit::Usage as u8);
        }
    };
    let result = match &cli.command {
        Command::Check(a) => commands::check(a, style),
        Command::Prove(a) => commands::prove(a, style),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a, style),
        Command::Crosscheck(a) => commands::crosscheck(a, style),
    };
    match result {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}", f.message.trim_end());
            }
            ExitCode::from(f.exit as u8)
        }
    }
}
