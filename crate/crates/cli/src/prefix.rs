use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use morass_core::morass::{build_prefix, MorassPrefix, MorassReport, SplitRule};
use serde_json::{json, Value};

use crate::report::{Builder, Report};

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// Number of level steps N (levels 0..=N).
    #[arg(long)]
    pub levels: usize,
    /// Splitting rule: zero, top, half, fixed:K or list:K0,K1,...
    #[arg(long, default_value = "zero")]
    pub split: String,
    /// Where to write the prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// A prefix written by `build`.
    pub file: PathBuf,
}

fn surrogates(report: &MorassReport) -> Value {
    json!({
        "checks": report.surrogates.checks,
        "uncovered_top_points": report.coverage_complement,
        "amalgamation_pairs": report.amalgamation_pairs,
        "amalgamated_pairs": report.amalgamated_pairs,
    })
}

fn axioms(b: &mut Builder, p: &MorassPrefix) {
    let report = p.verify_axioms();
    b.checks(report.exact.clone());
    b.result(json!({
        "levels": report.levels,
        "splits": (0..p.top()).map(|a| p.split(a)).collect::<Vec<_>>(),
        "surrogates": surrogates(&report),
    }));
}

pub fn build(a: &BuildArgs) -> anyhow::Result<Report> {
    let rule: SplitRule = a.split.parse()?;
    let mut b = Builder::new("build", json!({ "levels": a.levels, "split": a.split, "out": a.out }));
    let p = build_prefix(a.levels, &rule)?;
    if let Some(out) = &a.out {
        std::fs::write(out, p.to_text()).with_context(|| format!("writing {}", out.display()))?;
    }
    axioms(&mut b, &p);
    Ok(b.finish())
}

pub fn verify(a: &VerifyArgs) -> anyhow::Result<Report> {
    let text = std::fs::read_to_string(&a.file).with_context(|| format!("reading {}", a.file.display()))?;
    let p = MorassPrefix::from_text(&text).with_context(|| format!("parsing {}", a.file.display()))?;
    let mut b = Builder::new("verify", json!({ "file": a.file }));
    axioms(&mut b, &p);
    Ok(b.finish())
}
