//! Run configuration: defaults, then the TOML file, then command-line flags.

use anyhow::{anyhow, bail, Context, Result};
use loopcx::suites::{Model, SuiteConfig};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything a command needs besides its own arguments.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub suite: SuiteConfig,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { suite: SuiteConfig::default(), format: Format::Json }
    }
}

/// A grid given as "M,N", "N" or `[M, N]`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Pair([usize; 2]),
    Text(String),
    One(usize),
}

impl GridSpec {
    pub fn resolve(&self) -> Result<(usize, usize)> {
        match self {
            GridSpec::Pair([m, n]) => Ok((*m, *n)),
            GridSpec::One(n) => Ok((*n, *n)),
            GridSpec::Text(s) => parse_grid(s),
        }
    }
}

pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<usize>().with_context(|| format!("bad grid size '{t}'"));
    match parts.as_slice() {
        [n] => Ok((num(n)?, num(n)?)),
        [m, n] => Ok((num(m)?, num(n)?)),
        _ => bail!("grid must be M,N"),
    }
}

/// The `[run]`, `[extension]` and `[tolerances]` sections of a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub extension: ExtensionSection,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSection {
    pub model: Option<Model>,
    pub group: Option<String>,
    pub level: Option<f64>,
    pub grid: Option<GridSpec>,
    pub cocycle: Option<String>,
    pub labels: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let s = &mut cfg.suite;
        let e = &self.extension;
        if let Some(v) = &e.group {
            s.group = v.clone();
        }
        if let Some(v) = e.level {
            s.level = v;
        }
        if let Some(v) = &e.grid {
            s.grid = v.resolve()?;
        }
        if e.model.is_some() {
            s.model = e.model;
        }
        if e.cocycle.is_some() {
            s.cocycle = e.cocycle.clone();
        }
        if e.labels.is_some() {
            s.labels = e.labels.clone();
        }
        if let Some(v) = self.run.seed {
            s.seed = v;
        }
        if let Some(v) = self.run.samples {
            s.samples = v;
        }
        if let Some(v) = self.run.format {
            cfg.format = v;
        }
        s.tol.extend(self.tolerances.iter().map(|(k, v)| (k.clone(), *v)));
        Ok(())
    }
}

/// Splits `NAME=VALUE`.
pub fn parse_tol(s: &str) -> Result<(String, f64)> {
    let (k, v) = s.rsplit_once('=').ok_or_else(|| anyhow!("tolerance override must be NAME=VALUE"))?;
    let v: f64 = v.trim().parse().with_context(|| format!("bad tolerance '{v}'"))?;
    if !(v >= 0.0) {
        bail!("tolerance must be nonnegative");
    }
    Ok((k.trim().to_string(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_sections_apply() {
        let f: FileConfig = toml::from_str(
            r#"
            [run]
            seed = 7
            format = "csv"
            [extension]
            group = "rplus"
            grid = "32,64"
            cocycle = "rplus(1.0,4.5)"
            [tolerances]
            "Peiffer identity" = 0.5
            "#,
        )
        .unwrap();
        let mut cfg = RunConfig::default();
        f.apply(&mut cfg).unwrap();
        assert_eq!(cfg.suite.grid, (32, 64));
        assert_eq!(cfg.suite.seed, 7);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.suite.tol["Peiffer identity"], 0.5);
        assert!(toml::from_str::<FileConfig>("[run]\nsede = 1").is_err());
    }

    #[test]
    fn grids_and_tolerances_parse() {
        assert_eq!(parse_grid("128,64").unwrap(), (128, 64));
        assert_eq!(parse_grid("64").unwrap(), (64, 64));
        assert!(parse_grid("1,2,3").is_err());
        assert_eq!(parse_tol("a = b=1e-3").unwrap(), ("a = b".into(), 1e-3));
        assert!(parse_tol("x=-1").is_err());
    }
}
