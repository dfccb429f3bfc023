use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Subcommand;
use morass_core::cohen::{
    density_check, density_witness, parse_decisions, parse_oracle, pigeonhole_guess, CohenCondition,
};
use morass_core::plam::{compatible, limit_algebra, parse_index, split_extensions, stronger, PCondition};
use morass_core::text::{content_lines, format_rational};
use morass_core::Rational;
use num_traits::{One, Zero};
use serde_json::json;

use crate::report::{Builder, Report};

#[derive(Subcommand, Debug)]
pub enum CohenCommand {
    /// Extend a condition into the dense set of the density argument.
    Dense {
        /// The condition, e.g. `0:1,3:0` (`-` for the empty one).
        #[arg(long, default_value = "-")]
        p: String,
        #[arg(long)]
        nstar: u64,
        /// File of `n value` lines; unlisted coordinates get norm 0.
        #[arg(long)]
        oracle: Option<PathBuf>,
    },
    /// Pigeonhole over a finite set of deciding conditions.
    Guess {
        /// File of `index condition value` lines.
        #[arg(long)]
        decisions: PathBuf,
        /// File of conditions, one per line; defaults to those in the decisions.
        #[arg(long)]
        universe: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum PlamCommand {
    /// Is Q stronger than P?
    Stronger { p: PathBuf, q: PathBuf },
    /// Common extension of P and Q, if any.
    Amalgam {
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chain and antichain extensions over a directory of base conditions.
    Split {
        #[arg(long)]
        base: PathBuf,
        /// Fresh indices, e.g. a1,a4,a9.
        #[arg(long)]
        fresh: String,
    },
    /// Limit of a directed system given as a directory of conditions.
    Limit {
        #[arg(long)]
        system: PathBuf,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_condition(path: &Path) -> anyhow::Result<PCondition> {
    PCondition::from_text(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Every `*.cond` file of a directory, by file name.
fn read_dir(dir: &Path) -> anyhow::Result<Vec<(String, PCondition)>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "cond") {
            let name = path.file_name().expect("file name").to_string_lossy().into_owned();
            out.push((name, read_condition(&path)?));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    if out.is_empty() {
        bail!("no .cond files in {}", dir.display());
    }
    Ok(out)
}

pub fn cohen(c: &CohenCommand) -> anyhow::Result<Report> {
    match c {
        CohenCommand::Dense { p, nstar, oracle } => {
            let p: CohenCondition = p.parse()?;
            let table = match oracle {
                Some(path) => parse_oracle(&read(path)?).with_context(|| format!("parsing {}", path.display()))?,
                None => BTreeMap::new(),
            };
            let norm = |n: usize| table.get(&n).cloned().unwrap_or_else(Rational::zero);
            let mut b = Builder::new(
                "cohen dense",
                json!({ "p": p.to_string(), "nstar": nstar, "oracle": oracle }),
            );
            let d = density_check(&p, *nstar, norm);
            b.verdict("q extends p", p.extended_by(&d.q), "");
            let witness = density_witness(&d.q, *nstar, norm);
            b.verdict(
                "q meets the dense set",
                witness.is_some(),
                witness.map_or(String::new(), |n| format!("at n = {n}")),
            );
            b.result(json!({
                "q": d.q.to_string(),
                "witness": d.witness,
                "reused": d.reused,
                "norm_at_witness": format_rational(&norm(d.witness)),
            }));
            Ok(b.finish())
        }
        CohenCommand::Guess { decisions, universe } => {
            let ds = parse_decisions(&read(decisions)?).with_context(|| format!("parsing {}", decisions.display()))?;
            let universe: Vec<CohenCondition> = match universe {
                Some(path) => content_lines(&read(path)?)
                    .map(|(line, t)| {
                        t.join("")
                            .parse()
                            .with_context(|| format!("{}: line {line}", path.display()))
                    })
                    .collect::<anyhow::Result<_>>()?,
                None => ds
                    .iter()
                    .map(|d| d.condition.clone())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
            };
            let mut b = Builder::new(
                "cohen guess",
                json!({ "decisions": decisions, "indices": ds.len(), "universe": universe.len() }),
            );
            let guess = pigeonhole_guess(&ds, &universe)?;
            let distinct = universe.iter().collect::<BTreeSet<_>>().len();
            let bound = ds.len().div_ceil(distinct);
            b.verdict(
                "pigeonhole bound",
                guess.indices.len() >= bound,
                format!("|A| = {} ≥ {bound}", guess.indices.len()),
            );
            let agrees = ds
                .iter()
                .filter(|d| d.condition == guess.condition)
                .all(|d| guess.values.get(&d.index) == Some(&d.value));
            b.verdict("j↾A = j0", agrees, "");
            b.result(json!({
                "condition": guess.condition.to_string(),
                "size": guess.indices.len(),
                "indices": guess.indices,
                "values": guess.values,
            }));
            Ok(b.finish())
        }
    }
}

pub fn plam(c: &PlamCommand) -> anyhow::Result<Report> {
    match c {
        PlamCommand::Stronger { p, q } => {
            let (pc, qc) = (read_condition(p)?, read_condition(q)?);
            let mut b = Builder::new("plam stronger", json!({ "p": p, "q": q }));
            let holds = stronger(&pc, &qc)?;
            b.verdict(
                "p ≤ q",
                holds,
                if holds { "q is stronger" } else { "q is not stronger" },
            );
            Ok(b.finish())
        }
        PlamCommand::Amalgam { p, q, out } => {
            let (pc, qc) = (read_condition(p)?, read_condition(q)?);
            let mut b = Builder::new("plam amalgam", json!({ "p": p, "q": q, "out": out }));
            let amalgam = compatible(&pc, &qc)?;
            b.verdict("compatible", amalgam.is_some(), "");
            if let Some(r) = &amalgam {
                b.verdict("amalgam stronger than both", stronger(&pc, r)? && stronger(&qc, r)?, "");
                if let Some(out) = out {
                    std::fs::write(out, r.to_text()).with_context(|| format!("writing {}", out.display()))?;
                }
                b.result(json!({ "amalgam": r.to_text() }));
            }
            Ok(b.finish())
        }
        PlamCommand::Split { base, fresh } => {
            let conds = read_dir(base)?;
            let indices: Vec<usize> = fresh
                .split(',')
                .map(|t| parse_index(t.trim()).with_context(|| format!("bad index `{t}`")))
                .collect::<anyhow::Result<_>>()?;
            let base_conds: Vec<PCondition> = conds.iter().map(|(_, c)| c.clone()).collect();
            let mut b = Builder::new(
                "plam split",
                json!({ "base": base, "files": conds.iter().map(|(n, _)| n).collect::<Vec<_>>(), "fresh": indices }),
            );
            let s = split_extensions(&base_conds, &indices)?;
            let k1 = Rational::from_integer(indices.len().into());
            b.verdict("chain norm = k+1", s.chain_norm == k1, format_rational(&s.chain_norm));
            b.verdict(
                "antichain norm = 1",
                s.antichain_norm.is_one(),
                format_rational(&s.antichain_norm),
            );
            if indices.len() > 1 {
                b.verdict(
                    "extensions incompatible",
                    compatible(&s.chain, &s.antichain)?.is_none(),
                    "",
                );
            }
            b.result(json!({
                "chain": s.chain.to_text(),
                "antichain": s.antichain.to_text(),
                "chain_norm": format_rational(&s.chain_norm),
                "antichain_norm": format_rational(&s.antichain_norm),
            }));
            Ok(b.finish())
        }
        PlamCommand::Limit { system } => {
            let conds = read_dir(system)?;
            let mut map = BTreeMap::new();
            for (name, c) in &conds {
                if map.insert(c.w().clone(), c.clone()).is_some() {
                    bail!("{name}: a second condition for the same index set");
                }
            }
            let mut b = Builder::new("plam limit", json!({ "system": system, "conditions": conds.len() }));
            let limit = limit_algebra(&map)?;
            let below = map
                .values()
                .map(|p| stronger(p, &limit.condition))
                .collect::<Result<Vec<_>, _>>()?;
            b.verdict(
                "limit above every p_F",
                below.iter().all(|x| *x),
                format!("{} conditions", below.len()),
            );
            b.verdict(
                "every index is covered",
                limit.undense.is_empty(),
                format!("{:?}", limit.undense),
            );
            b.result(json!({
                "limit": limit.condition.to_text(),
                "dropped_relations": limit.dropped,
            }));
            Ok(b.finish())
        }
    }
}
