use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Subcommand, ValueEnum};
use morass_core::balg::{
    is_c_algebra, norm_with, scenario_bounds, Backend, EmbeddingScenario, Presentation, SimpleFunction,
};
use morass_core::lmodel::{check_theory, GenModel, Variant};
use morass_core::text::{format_rational, parse_rational};
use serde_json::json;

use crate::report::{Builder, Report};
use crate::Global;

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum BackendChoice {
    /// Enumeration up to the budget, propagation above it.
    Auto,
    Enumeration,
    Propagation,
    /// Run both and require agreement.
    Both,
}

#[derive(Args, Debug)]
pub struct NormArgs {
    /// A model or presentation file.
    pub file: PathBuf,
    /// Terms such as `1*g3,-1/2*g7`.
    #[arg(long, allow_hyphen_values = true)]
    pub terms: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub backend: BackendChoice,
}

#[derive(Subcommand, Debug)]
pub enum CalgCommand {
    /// Check that the generators of a c-variant model form a c-algebra.
    Verify {
        file: PathBuf,
        /// Largest |F| for the nice property.
        #[arg(long = "maxF", alias = "max-f", default_value_t = 4)]
        max_f: usize,
    },
}

#[derive(Args, Debug)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub nstar: u64,
    /// The constant c, as p/q or a decimal.
    #[arg(long)]
    pub c: String,
    /// Also check that this ε is admissible.
    #[arg(long)]
    pub epsilon: Option<String>,
}

fn read_model(path: &PathBuf) -> anyhow::Result<GenModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    GenModel::from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn rational(s: &str, what: &str) -> anyhow::Result<morass_core::Rational> {
    parse_rational(s).with_context(|| format!("{what} `{s}` is not a rational"))
}

pub fn norm(a: &NormArgs, g: &Global) -> anyhow::Result<Report> {
    let p = Presentation::from_model(&read_model(&a.file)?);
    let f: SimpleFunction = a.terms.parse()?;
    let budget = g.budget();
    let mut b = Builder::new(
        "norm",
        json!({ "file": a.file, "terms": f.to_string(), "backend": format!("{:?}", a.backend).to_lowercase(), "enum_limit": g.enum_limit }),
    );
    let value = match a.backend {
        BackendChoice::Auto => norm_with(&p, &f, budget.pick(p.gens()), &budget)?,
        BackendChoice::Enumeration => norm_with(&p, &f, Backend::Enumeration, &budget)?,
        BackendChoice::Propagation => norm_with(&p, &f, Backend::Propagation, &budget)?,
        BackendChoice::Both => {
            let e = norm_with(&p, &f, Backend::Enumeration, &budget)?;
            let q = norm_with(&p, &f, Backend::Propagation, &budget)?;
            b.verdict(
                "backends agree",
                e == q,
                format!("{} vs {}", format_rational(&e), format_rational(&q)),
            );
            e
        }
    };
    b.result(json!({ "generators": p.gens(), "norm": format_rational(&value) }));
    Ok(b.finish())
}

pub fn calg(c: &CalgCommand) -> anyhow::Result<Report> {
    let CalgCommand::Verify { file, max_f } = c;
    let m = read_model(file)?;
    let mut b = Builder::new("calg verify", json!({ "file": file, "maxF": max_f }));
    let violations = check_theory(&m, Variant::C);
    b.verdict(
        "theory T",
        violations.is_empty(),
        violations
            .first()
            .map_or(String::new(), |v| format!("{} (witness {:?})", v.clause, v.witness)),
    );
    let report = is_c_algebra(&Presentation::from_model(&m), *max_f);
    b.checks(report.checks);
    b.result(json!({ "generators": m.size(), "bound": report.bound, "families_checked": report.families_checked }));
    Ok(b.finish())
}

pub fn scenario(a: &ScenarioArgs) -> anyhow::Result<Report> {
    let c = rational(&a.c, "c")?;
    let mut b = Builder::new(
        "scenario",
        json!({ "nstar": a.nstar, "c": format_rational(&c), "epsilon": a.epsilon }),
    );
    let report = scenario_bounds(a.nstar, &c)?;
    b.checks(report.checks.clone());
    if let Some(eps) = &a.epsilon {
        let eps = rational(eps, "epsilon")?;
        let admissible = EmbeddingScenario::new(a.nstar, c, eps);
        b.verdict(
            "epsilon admissible",
            admissible.is_ok(),
            admissible.err().map(|e| e.to_string()).unwrap_or_default(),
        );
    }
    b.result(json!({
        "epsilon_max": format_rational(&report.epsilon_max),
        "first_bound": format_rational(&report.first_bound),
        "second_bound": format_rational(&report.second_bound),
    }));
    Ok(b.finish())
}
