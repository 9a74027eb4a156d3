use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use multiphase::loopmodel::{Domain, TupleKind};
use multiphase::simulator::DEFAULT_MAX_STEPS;
use multiphase_cli::{
    bound, check, convert, hull, load_loop, load_tuple, parse_state, simulate, synth, CheckKind, CmdResult,
    ConvertTarget, SimulateArgs,
};

/// Termination analysis of single-path linear-constraint loops with
/// multiphase ranking functions.
#[derive(Parser)]
#[command(name = "multiphase", version)]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Rat,
    Int,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Rat => Domain::Rational,
            DomainArg::Int => Domain::Integer,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Mlrf,
    Nested,
    Bms,
    WeakBms,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Mlrf,
    Nested,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a multiphase ranking function of increasing depth.
    Synth {
        loop_file: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_depth: usize,
        /// Override the domain declared in the loop file.
        #[arg(long)]
        domain: Option<DomainArg>,
        /// Only look for a linear ranking function.
        #[arg(long)]
        lrf_only: bool,
    },
    /// Check a ranking tuple.
    Check {
        loop_file: PathBuf,
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long, value_enum, default_value = "mlrf")]
        kind: KindArg,
        #[arg(long)]
        domain: Option<DomainArg>,
    },
    /// Linear iteration bound from a multiphase ranking function.
    Bound {
        loop_file: PathBuf,
        #[arg(long)]
        tuple: PathBuf,
        /// Start state, e.g. "x=3,y=5".
        #[arg(long)]
        x0: Option<String>,
        #[arg(long)]
        domain: Option<DomainArg>,
    },
    /// Integer hull of the transition polyhedron.
    Hull { loop_file: PathBuf },
    /// Run a deterministic loop from a start state.
    Simulate {
        loop_file: PathBuf,
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Check this multiphase tuple on every iteration.
        #[arg(long)]
        tuple: Option<PathBuf>,
        /// Write the trace as CSV.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Convert a lexicographic tuple to a multiphase one, or a multiphase
    /// tuple to a nested one.
    Convert {
        loop_file: PathBuf,
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long, value_enum, default_value = "mlrf")]
        to: TargetArg,
        /// Read the input as a weak lexicographic tuple.
        #[arg(long)]
        weak: bool,
        #[arg(long)]
        domain: Option<DomainArg>,
    },
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Synth {
            loop_file,
            max_depth,
            domain,
            lrf_only,
        } => {
            let l = load_loop(&loop_file, domain.map(Into::into))?;
            synth(&l, max_depth, lrf_only)
        }
        Command::Check {
            loop_file,
            tuple,
            kind,
            domain,
        } => {
            let l = load_loop(&loop_file, domain.map(Into::into))?;
            let (tk, ck) = match kind {
                KindArg::Mlrf => (TupleKind::Mlrf, CheckKind::Mlrf),
                KindArg::Nested => (TupleKind::Nested, CheckKind::Nested),
                KindArg::Bms => (TupleKind::BmsLlrf, CheckKind::Bms),
                KindArg::WeakBms => (TupleKind::WeakBmsLlrf, CheckKind::WeakBms),
            };
            let t = load_tuple(&tuple, &l, tk)?;
            check(&l, &t, ck)
        }
        Command::Bound {
            loop_file,
            tuple,
            x0,
            domain,
        } => {
            let l = load_loop(&loop_file, domain.map(Into::into))?;
            let t = load_tuple(&tuple, &l, TupleKind::Mlrf)?;
            let x0 = x0.map(|s| parse_state(&s, &l)).transpose()?;
            bound(&l, &t, x0.as_deref())
        }
        Command::Hull { loop_file } => hull(&load_loop(&loop_file, None)?),
        Command::Simulate {
            loop_file,
            x0,
            max_steps,
            tuple,
            trace_out,
        } => {
            let l = load_loop(&loop_file, None)?;
            let x0 = parse_state(&x0, &l)?;
            let t = tuple.map(|p| load_tuple(&p, &l, TupleKind::Mlrf)).transpose()?;
            simulate(
                &l,
                SimulateArgs {
                    x0: &x0,
                    max_steps,
                    tuple: t.as_ref(),
                    trace_out,
                },
            )
        }
        Command::Convert {
            loop_file,
            tuple,
            to,
            weak,
            domain,
        } => {
            let l = load_loop(&loop_file, domain.map(Into::into))?;
            let (kind, target) = match (to, weak) {
                (TargetArg::Nested, _) => (TupleKind::Mlrf, ConvertTarget::Nested),
                (TargetArg::Mlrf, false) => (TupleKind::BmsLlrf, ConvertTarget::Mlrf),
                (TargetArg::Mlrf, true) => (TupleKind::WeakBmsLlrf, ConvertTarget::Mlrf),
            };
            let t = load_tuple(&tuple, &l, kind)?;
            convert(&l, &t, target, weak)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{}", out.render(cli.json));
            ExitCode::from(out.exit_code() as u8)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
