//! Golden fixtures: each `<name>.conf` in a fixture directory is run and its
//! CSV compared against `<name>.csv`.

use crate::commands::run;
use crate::config::{parse_config, Format};
use crate::output::parse_csv;
use anyhow::Context;
use std::path::{Path, PathBuf};

/// Relative tolerance of the numeric comparison.
pub const RTOL: f64 = 1e-8;
const ATOL: f64 = 1e-12;

#[derive(Debug)]
pub struct FixtureResult {
    pub name: String,
    /// `None` on success.
    pub failure: Option<String>,
}

pub fn fixtures(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading fixture directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "conf"))
        .collect();
    v.sort();
    Ok(v)
}

fn render(conf: &Path) -> anyhow::Result<String> {
    let text = std::fs::read_to_string(conf)?;
    let mut cfg = parse_config(&text)?;
    cfg.format = Format::Csv;
    cfg.output = None;
    run(&cfg)?.render(&cfg)
}

fn compare(got: &str, want: &str) -> Result<(), String> {
    let (gc, gr) = parse_csv(got).map_err(|e| e.to_string())?;
    let (wc, wr) = parse_csv(want).map_err(|e| e.to_string())?;
    if gc != wc {
        return Err(format!("columns {gc:?} differ from {wc:?}"));
    }
    if gr.len() != wr.len() {
        return Err(format!("{} rows, expected {}", gr.len(), wr.len()));
    }
    for (i, (g, w)) in gr.iter().zip(&wr).enumerate() {
        for (c, (x, y)) in g.iter().zip(w).enumerate() {
            let ok = match (x, y) {
                (Some(x), Some(y)) => (x - y).abs() <= ATOL + RTOL * y.abs(),
                (None, None) => true,
                _ => false,
            };
            if !ok {
                return Err(format!("row {}, column `{}`: {x:?} vs golden {y:?}", i + 1, gc[c]));
            }
        }
    }
    Ok(())
}

/// Run every fixture; with `update`, rewrite the golden files instead.
pub fn regress(dir: &Path, update: bool) -> anyhow::Result<Vec<FixtureResult>> {
    let mut out = Vec::new();
    for conf in fixtures(dir)? {
        let name = conf.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let golden = conf.with_extension("csv");
        let failure = match render(&conf) {
            Err(e) => Some(format!("{e:#}")),
            Ok(got) if update => {
                std::fs::write(&golden, got)?;
                None
            }
            Ok(got) => match std::fs::read_to_string(&golden) {
                Err(e) => Some(format!("missing golden file {}: {e}", golden.display())),
                Ok(want) => compare(&got, &want).err(),
            },
        };
        out.push(FixtureResult { name, failure });
    }
    Ok(out)
}
