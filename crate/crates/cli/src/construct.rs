use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use morass_core::balg::{dichotomy_check, is_c_algebra, zero_generators, Dichotomy, Presentation};
use morass_core::cohen::BitStream;
use morass_core::lmodel::{
    check_theory, construct, embedding_defect, limit_model, minimal_alpha, plan_stages_with, Construction, FreshChoice,
    Variant,
};
use morass_core::morass::{build_prefix, SplitRule};
use serde_json::json;

use crate::report::{Builder, Report};
use crate::Global;

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// Prefix length N; raised to what the stage plan needs.
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    /// Number of stages M.
    #[arg(long, default_value_t = 5)]
    pub stages: usize,
    /// The bits r(0) r(1) ..., e.g. 10110.
    #[arg(long, conflicts_with = "seed")]
    pub bits: Option<String>,
    /// Draw the bits from a seeded generator instead.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "plain")]
    pub variant: Variant,
    /// Splitting rule of the prefix.
    #[arg(long, default_value = "top")]
    pub split: String,
    /// Fresh point choice: least or gap.
    #[arg(long, default_value = "least")]
    pub fresh: FreshChoice,
    /// Largest |F| for the nice-property check (c variant).
    #[arg(long = "maxF", alias = "max-f", default_value_t = 4)]
    pub max_f: usize,
    /// Directory to write the prefix and every level model into.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn write_out(dir: &PathBuf, c: &Construction) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join("prefix.morass"), c.prefix.to_text())?;
    for (alpha, m) in c.models.iter().enumerate() {
        let path = dir.join(format!("level_{alpha:03}.model"));
        std::fs::write(&path, m.to_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn run(a: &ConstructArgs, g: &Global) -> anyhow::Result<Report> {
    let rule: SplitRule = a.split.parse()?;
    let stream = match (&a.bits, a.seed) {
        (Some(bits), _) => BitStream::from_bits(bits)?,
        (None, Some(seed)) => BitStream::from_seed(seed, a.stages),
        (None, None) => bail!("give either --bits or --seed"),
    };
    let needed = minimal_alpha(a.stages, a.variant)[a.stages];
    let levels = a.levels.max(needed).max(1);
    let mut b = Builder::new(
        "construct",
        json!({
            "levels": a.levels,
            "levels_used": levels,
            "stages": a.stages,
            "bits": stream.to_string(),
            "seed": stream.seed,
            "variant": a.variant.to_string(),
            "split": a.split,
            "fresh": format!("{:?}", a.fresh).to_lowercase(),
            "maxF": a.max_f,
            "enum_limit": g.enum_limit,
        }),
    );
    let prefix = build_prefix(levels, &rule)?;
    let plan = plan_stages_with(&prefix, a.stages, a.variant, a.fresh)?;
    let c = match construct(&prefix, &plan, &stream.bits) {
        Ok(c) => c,
        Err(e) => {
            b.verdict("construction", false, e.to_string());
            return Ok(b.finish());
        }
    };
    b.verdict("construction", true, format!("{} levels", c.models.len()));

    let theory = c.models.iter().enumerate().find_map(|(alpha, m)| {
        check_theory(m, a.variant)
            .first()
            .map(|v| format!("level {alpha}: {} (witness {:?})", v.clause, v.witness))
    });
    b.verdict("theory at every level", theory.is_none(), theory.unwrap_or_default());

    let mut embedding = None;
    let mut maps = 0;
    'levels: for alpha in 0..prefix.top() {
        for f in prefix.maps_between(alpha, alpha + 1)? {
            maps += 1;
            if let Some(d) = embedding_defect(&c.models[alpha], &c.models[alpha + 1], &f) {
                embedding = Some(format!("{} from level {alpha}: {d}", f.word_string()));
                break 'levels;
            }
        }
    }
    b.verdict(
        "one-step embeddings",
        embedding.is_none(),
        embedding.unwrap_or_else(|| format!("{maps} maps")),
    );

    let mut dichotomy = None;
    for (n, (fresh, &bit)) in plan.fresh.iter().zip(&c.bits).enumerate() {
        let p = Presentation::from_model(&c.models[plan.alpha[n + 1]]);
        if !dichotomy_check(&p, fresh, Dichotomy::from_bit(bit)) {
            dichotomy = Some(format!(
                "stage {n}: A_n = {fresh:?} is not a {:?}",
                Dichotomy::from_bit(bit)
            ));
            break;
        }
    }
    b.verdict(
        "dichotomy on every A_n",
        dichotomy.is_none(),
        dichotomy.unwrap_or_default(),
    );

    let limit = limit_model(&c);
    b.verdict(
        "limit agrees with the top level",
        limit.is_ok(),
        match &limit {
            Ok(l) => format!("{} routes, {} pairs reached twice", l.routes, l.multi_route_pairs),
            Err(e) => e.to_string(),
        },
    );

    let top = Presentation::from_model(c.top_model());
    let zero = zero_generators(&top);
    b.verdict(
        "generators nonzero",
        zero.is_empty(),
        zero.first()
            .map_or(String::new(), |x| format!("[{x}] = 0 at the top level")),
    );
    if a.variant == Variant::C {
        let report = is_c_algebra(&top, a.max_f);
        for check in report.checks.checks {
            b.verdict(&format!("c-algebra: {}", check.name), check.passed, check.detail);
        }
    }

    if let Some(dir) = &a.out {
        write_out(dir, &c)?;
    }
    b.result(json!({
        "thetas": prefix.levels(),
        "alpha": plan.alpha,
        "fresh": plan.fresh,
        "extra": plan.extra,
        "top_size": c.top_model().size(),
        "top_relations": c.top_model().relation_count(),
    }));
    Ok(b.finish())
}
