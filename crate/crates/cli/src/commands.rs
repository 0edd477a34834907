//! The subcommands. Each returns the text to emit and whether every check passed.

use crate::config::{Format, RunConfig};
use anyhow::{bail, Context, Result};
use loopcx::abelcoh::{skew, so_parity_pairing, two_torsion_quotient, Bihom, FinAbGroup};
use loopcx::centralext::{tol_equal, Extension};
use loopcx::cocycles::CycleKind;
use loopcx::io::{self, ExactFile, LoopPair, PairingRow, PairingTable};
use loopcx::report::Report;
use loopcx::suites::{self, period_report, Suite};
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

fn json(v: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

pub fn verify(selection: &str, cfg: &RunConfig) -> Result<Outcome> {
    let chosen = Suite::parse_selection(selection)?;
    cfg.suite.validate()?;
    let reports: Vec<Report> = chosen
        .par_iter()
        .map(|s| suites::run(*s, &cfg.suite).with_context(|| format!("suite {s}")))
        .collect::<Result<_>>()?;
    for r in &reports {
        eprintln!("{:<11} {}", r.suite, if r.pass() { "PASS" } else { "FAIL" });
        for c in r.failures() {
            eprintln!(
                "  {}: {:.3e} > {:.3e}{}",
                c.name,
                c.measured,
                c.tol,
                c.witness.as_ref().map(|w| format!(" ({w})")).unwrap_or_default()
            );
        }
    }
    let pass = reports.iter().all(Report::pass);
    let text = match (cfg.format, reports.as_slice()) {
        (Format::Csv, _) => io::reports_csv(&reports)?,
        (Format::Json, [one]) => json(one)?,
        (Format::Json, all) => json(&all)?,
    };
    Ok(Outcome { text, pass })
}

/// Loop pairs from a JSON or CSV file (by extension); CSV uses the configured scalar group.
fn read_pairs(path: &Path, cfg: &RunConfig) -> Result<(RunConfig, Vec<LoopPair>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = cfg.clone();
    let g = cfg.suite.group_spec()?;
    let pairs = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        io::read_loop_pairs_csv(&text, &g)?
    } else {
        let (g2, pairs) = io::read_loop_pairs_json(&text, &g)?;
        cfg.suite.group = g2.name.label();
        cfg.suite.level = g2.level;
        pairs
    };
    if let Some(p) = pairs.first() {
        cfg.suite.grid.1 = p.a.n();
    }
    Ok((cfg, pairs))
}

pub fn commutator(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let (cfg, pairs) = read_pairs(path, cfg)?;
    let ext = cfg.suite.extension()?;
    let cocycle = cfg.suite.loop_cocycle()?;
    let rows = pairs
        .par_iter()
        .map(|p| {
            let phase = ext.commutator_pairing(&p.a, &p.b).with_context(|| format!("pair {}", p.id))?.angle();
            let (expected, tol) = match (&ext, &cocycle) {
                (Extension::Path(_), _) => (0.0, tol_equal(cfg.suite.min_grid())),
                (_, Some(c)) => ((c.eval(&p.a, None, &p.b, None)? - c.eval(&p.b, None, &p.a, None)?).angle(), 1e-12),
                (_, None) => (0.0, 1e-12),
            };
            let gap =
                (phase - expected + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
            Ok(PairingRow { pair: p.id.clone(), phase, expected, tol, pass: gap.abs() <= tol })
        })
        .collect::<Result<Vec<_>>>()?;
    let table = PairingTable::new(rows);
    let text = match cfg.format {
        Format::Csv => table.to_csv()?,
        Format::Json => json(&table)?,
    };
    Ok(Outcome { pass: table.pass(), text })
}

pub fn periods(kind: &str, cfg: &RunConfig) -> Result<Outcome> {
    let kind = match kind {
        "basic" => CycleKind::Basic,
        "double" => CycleKind::Double,
        k => bail!("cycle kind must be basic or double, not '{k}'"),
    };
    cfg.suite.validate()?;
    if !cfg.suite.group_spec()?.is_su2() {
        bail!("periods are computed for su2 only");
    }
    let g = cfg.suite.min_grid();
    let r = period_report(cfg.suite.level, kind, (g, 2 * g));
    eprintln!(
        "period {:.6} = {:.5}·2π, nearest {} (relative gap {:.2e}), ratio {:.2}: {}",
        r.extrapolated,
        r.multiple,
        r.nearest,
        r.relative_gap,
        r.ratio,
        if r.integral { "integral" } else { "NOT integral" }
    );
    let text = match cfg.format {
        Format::Json => json(&r)?,
        Format::Csv => format!(
            "level,kind,coarse_grid,fine_grid,coarse,fine,extrapolated,multiple,nearest,relative_gap,ratio,integral\n{},{:?},{},{},{:e},{:e},{:e},{:e},{},{:e},{:e},{}\n",
            r.level, r.kind, r.grids.0, r.grids.1, r.coarse, r.fine, r.extrapolated, r.multiple, r.nearest, r.relative_gap, r.ratio, r.integral
        ),
    };
    Ok(Outcome { pass: r.integral, text })
}

#[derive(Serialize)]
struct TorsionOut {
    group: String,
    quotient: String,
    orders: Vec<u64>,
    generators: Vec<ExactFile>,
}

pub fn torsion(group: &str, cfg: &RunConfig) -> Result<Outcome> {
    let k = FinAbGroup::parse(group)?;
    let q = two_torsion_quotient(&k);
    let text = match cfg.format {
        Format::Json => json(&TorsionOut {
            group: k.orders_string(),
            quotient: q.describe(),
            orders: q.orders.clone(),
            generators: q.generators.iter().map(ExactFile::of_bihom).collect(),
        })?,
        Format::Csv => {
            let mut s = String::from("generator,i,j,value\n");
            for (n, b) in q.generators.iter().enumerate() {
                for (i, row) in b.matrix().iter().enumerate() {
                    for (j, z) in row.iter().enumerate() {
                        s += &format!("{n},{i},{j},{z}\n");
                    }
                }
            }
            s
        }
    };
    eprintln!("Skew²/Alt² of {} ≅ {}", k.label(), q.describe());
    Ok(Outcome { text, pass: true })
}

fn emit_bihom(b: &Bihom, cfg: &RunConfig) -> Result<String> {
    match cfg.format {
        Format::Json => json(&ExactFile::of_bihom(b)),
        Format::Csv => Ok(io::pairing_table_csv(b.group(), |g, h| b.eval(g, h))?),
    }
}

pub fn table_skew(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let f: ExactFile =
        serde_json::from_str(&std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)?;
    let b = skew(&f.cocycle()?)?;
    eprintln!("skew is {}alternating", if b.is_alternating_exhaustive()? { "" } else { "not " });
    Ok(Outcome { text: emit_bihom(&b, cfg)?, pass: true })
}

pub fn table_bihom(path: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let f: ExactFile =
        serde_json::from_str(&std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)?;
    let b = f.bihom()?;
    if !b.is_bihomomorphism_exhaustive()? {
        bail!("matrix does not define a bihomomorphism");
    }
    Ok(Outcome { text: emit_bihom(&b, cfg)?, pass: true })
}

/// The level-k pairing b₁ᵏ on ℤ₂ for k in `levels`, one row per level.
pub fn table_parity(levels: std::ops::RangeInclusive<i64>, cfg: &RunConfig) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Row {
        level: i64,
        value: String,
        trivial: bool,
    }
    let rows: Vec<Row> = levels
        .map(|k| {
            let b = so_parity_pairing(k);
            Row { level: k, value: b.entry(0, 0).to_string(), trivial: b.is_trivial() }
        })
        .collect();
    let pass = rows.iter().all(|r| r.trivial == (r.level % 2 == 0));
    let text = match cfg.format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut s = String::from("level,b(1,1),trivial\n");
            for r in &rows {
                s += &format!("{},{},{}\n", r.level, r.value, r.trivial);
            }
            s
        }
    };
    Ok(Outcome { text, pass })
}
