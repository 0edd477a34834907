//! `loopcx`: verification suites, commutator pairings, periods and exact tables.
//!
//! Exit status 0 when every check passes, 1 on a mathematical failure (the report
//! carries a witness), 2 on a configuration or input error.

mod commands;
mod config;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use config::{FileConfig, Format, RunConfig};
use loopcx::suites::Model;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "loopcx", version, about = "Central extensions of loop groups, checked numerically")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GlobalOpts {
    /// TOML file with [run], [extension] and [tolerances] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// su2, su(n), so(n), u1, rplus or a product such as su2*u1.
    #[arg(long, global = true)]
    group: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    level: Option<f64>,
    /// Sheet rows and loop samples, "M,N"; powers of two ≥ 32.
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Battery size.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, value_parser = ["cocycle", "path"])]
    model: Option<String>,
    /// trivial, rplus(s,t) or label-bilinear(p/q, [[...]]).
    #[arg(long, global = true)]
    cocycle: Option<String>,
    /// Label group for component labels, e.g. "2,2".
    #[arg(long, global = true)]
    labels: Option<String>,
    /// Replace a check's tolerance: NAME=VALUE. Repeatable.
    #[arg(long = "tol", global = true)]
    tol: Vec<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite, or all of them.
    Verify {
        /// loopspace, cocycles, centralext, abelcoh, xmod, twogroup, fusion, comparison or all.
        suite: String,
    },
    /// Commutator phases of lifted loop pairs with disjoint supports.
    Commutator {
        /// Loop pairs, JSON or (for rplus and u1) CSV.
        loops: PathBuf,
    },
    /// Period of the generating 2-cycle on grids (M, 2M), Richardson-extrapolated.
    Periods {
        #[arg(long, default_value = "basic", value_parser = ["basic", "double"])]
        kind: String,
    },
    /// Skew²/Alt² for a finite abelian group given as "n1,n2,...".
    Torsion { group: String },
    /// Exact tables.
    Table {
        #[command(subcommand)]
        which: TableCmd,
    },
    /// Same as `table skew`.
    Skew { kappa: PathBuf },
}

#[derive(Subcommand)]
enum TableCmd {
    /// skew(κ) of a 2-cocycle file.
    Skew { kappa: PathBuf },
    /// All values of a bihomomorphism file.
    Bihom { bihom: PathBuf },
    /// The level-k sign pairing on Z2 for |k| ≤ max.
    Parity {
        #[arg(long, default_value_t = 6)]
        max: i64,
    },
}

fn build_config(o: &GlobalOpts) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &o.config {
        FileConfig::load(p)?.apply(&mut cfg)?;
    }
    let s = &mut cfg.suite;
    if let Some(v) = &o.group {
        s.group = v.clone();
    }
    if let Some(v) = o.level {
        s.level = v;
    }
    if let Some(v) = &o.grid {
        s.grid = config::parse_grid(v)?;
    }
    if let Some(v) = o.seed {
        s.seed = v;
    }
    if let Some(v) = o.samples {
        s.samples = v;
    }
    if let Some(v) = &o.model {
        s.model = Some(if v == "path" { Model::Path } else { Model::Cocycle });
    }
    if o.cocycle.is_some() {
        s.cocycle = o.cocycle.clone();
    }
    if o.labels.is_some() {
        s.labels = o.labels.clone();
    }
    for t in &o.tol {
        let (k, v) = config::parse_tol(t)?;
        s.tol.insert(k, v);
    }
    if let Some(f) = o.format {
        cfg.format = f;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<commands::Outcome> {
    let cfg = build_config(&cli.opts)?;
    match &cli.cmd {
        Cmd::Verify { suite } => commands::verify(suite, &cfg),
        Cmd::Commutator { loops } => commands::commutator(loops, &cfg),
        Cmd::Periods { kind } => commands::periods(kind, &cfg),
        Cmd::Torsion { group } => commands::torsion(group, &cfg),
        Cmd::Table { which: TableCmd::Skew { kappa } } | Cmd::Skew { kappa } => commands::table_skew(kappa, &cfg),
        Cmd::Table { which: TableCmd::Bihom { bihom } } => commands::table_bihom(bihom, &cfg),
        Cmd::Table { which: TableCmd::Parity { max } } => commands::table_parity(-max..=*max, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = loopcx::thread_cap() {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.opts.out {
        Some(p) => std::fs::write(p, &out.text).map_err(|e| format!("writing {}: {e}", p.display())),
        None => {
            print!("{}", out.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(if out.pass { 0 } else { 1 })
}
