//! Command-line workbench over the subshift cylinder-algebra library.
//!
//! Exit codes: 0 when the result was computed, 1 when a bound left it
//! undecided, 2 on errors (including invalid input and failed self-checks).

pub mod commands;
pub mod formats;
pub mod load;
pub mod report;
pub mod suites;
pub mod term;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use crate::commands::{Bounds, Ctx};
use crate::report::{Format, Report, Status};

#[derive(Debug, Parser)]
#[command(name = "subshift", version, about = "Cylinder algebras of subshifts over arbitrary alphabets")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Kv)]
    pub format: Format,
    /// Directory for cached minimized automata.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Word length for generators, detector prefixes and relation samples.
    #[arg(long, global = true, default_value_t = Bounds::default().length as u64, value_parser = clap::value_parser!(u64).range(1..=12))]
    pub bound_length: u64,
    /// Probe length for flat presentations.
    #[arg(long, global = true, default_value_t = Bounds::default().probe as u64, value_parser = clap::value_parser!(u64).range(1..=10))]
    pub bound_probe: u64,
    /// Last K-theory stage for automata.
    #[arg(long, global = true, default_value_t = Bounds::default().stages as u64, value_parser = clap::value_parser!(u64).range(2..=32))]
    pub bound_stages: u64,
    /// Atom budget per K-theory stage.
    #[arg(long, global = true, default_value_t = Bounds::default().atoms as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub bound_atoms: u64,
    /// Depth of conjugacy checks and point samples.
    #[arg(long, global = true, default_value_t = Bounds::default().depth as u64, value_parser = clap::value_parser!(u64).range(1..=12))]
    pub bound_depth: u64,
    /// Set budget of the condition (L) search.
    #[arg(long, global = true, default_value_t = Bounds::default().sets as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub bound_sets: u64,
    /// Random terms in relation checks.
    #[arg(long, global = true, default_value_t = Bounds::default().terms as u64, value_parser = clap::value_parser!(u64).range(0..=10_000))]
    pub bound_terms: u64,
}

impl GlobalArgs {
    pub fn ctx(&self) -> Ctx {
        let n = |v: u64| usize::try_from(v).unwrap_or(usize::MAX);
        Ctx {
            bounds: Bounds {
                length: n(self.bound_length),
                probe: n(self.bound_probe),
                stages: n(self.bound_stages),
                atoms: n(self.bound_atoms),
                depth: n(self.bound_depth),
                sets: n(self.bound_sets),
                terms: n(self.bound_terms),
            },
            cache_dir: self.cache_dir.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a presentation file and summarize it.
    Load { file: PathBuf },
    /// Evaluate a Boolean term over cylinder generators.
    Set {
        file: PathBuf,
        term: String,
        /// Also report the relative range r(A, w).
        #[arg(long = "range")]
        ranges: Vec<String>,
    },
    /// K-groups of the unital subshift algebra.
    Ktheory { file: PathBuf },
    /// Condition (L) with a witness, and the singleton detector.
    ConditionL { file: PathBuf },
    /// Points of the compactification.
    Otw {
        file: PathBuf,
        /// Test membership of a finite word in the finite part.
        #[arg(long = "fin")]
        words: Vec<String>,
        /// A point: `pre (per)`, `w .` or `0->`.
        #[arg(long)]
        point: Option<String>,
        /// Cylinder word for the point test.
        #[arg(long)]
        alpha: Option<String>,
        /// Letters excluded after the cylinder word.
        #[arg(long)]
        exclude: Vec<String>,
    },
    /// Check the operator model against the algebra relations.
    Relations { file: PathBuf },
    /// Verify a prefix-code conjugacy between two presentations.
    Conjugacy { source: PathBuf, target: PathBuf, code: PathBuf },
    /// Run the built-in acceptance corpus.
    Corpus,
}

pub fn corpus_report(ctx: &Ctx) -> Report {
    let outcomes = suites::all(ctx);
    let mut r = Report::new();
    for o in &outcomes {
        r.push(format!("criterion.{}", o.id), if o.passed { "PASS" } else { "FAIL" });
        r.push(format!("criterion.{}.detail", o.id), &o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    r.push("failed", failed);
    if failed > 0 {
        r.status = Status::Failed;
    }
    r
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let ctx = cli.global.ctx();
    match &cli.command {
        Command::Load { file } => commands::cmd_load(&ctx, file),
        Command::Set { file, term, ranges } => commands::cmd_set(&ctx, file, term, ranges),
        Command::Ktheory { file } => commands::cmd_ktheory(&ctx, file),
        Command::ConditionL { file } => commands::cmd_condition_l(&ctx, file),
        Command::Otw { file, words, point, alpha, exclude } => {
            commands::cmd_otw(&ctx, file, words, point.as_deref(), alpha.as_deref(), exclude)
        }
        Command::Relations { file } => commands::cmd_relations(&ctx, file),
        Command::Conjugacy { source, target, code } => commands::cmd_conjugacy(&ctx, source, target, code),
        Command::Corpus => Ok(corpus_report(&ctx)),
    }
}

/// Renders the outcome and returns the exit code.
pub fn run(cli: &Cli, out: &mut impl std::io::Write, err: &mut impl std::io::Write) -> i32 {
    match execute(cli) {
        Ok(report) => {
            let _ = out.write_all(report.render(cli.global.format).as_bytes());
            report.status.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}
