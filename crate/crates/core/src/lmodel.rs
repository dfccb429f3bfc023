//! Finite generating structures `I_α` and the stage-by-stage construction.
//!
//! A [`GenModel`] lives on `0..θ` and carries a strict order `≤*`, a
//! disjointness relation `d` and (for the c-variant) block labels `B_n`.
//! [`construct`] builds one model per morass level so that every map of the
//! morass is an embedding, while stage `n` puts the fresh set `A_n` into a
//! `d`-antichain or a `≤*`-chain according to bit `n`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::morass::{MorassError, MorassMap, MorassPrefix};
use crate::text::{content_lines, parse_num, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    /// Language `{≤*, d}`.
    Plain,
    /// Language `{≤*, d, B_n}` with the block axioms.
    C,
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Variant::Plain),
            "c" => Ok(Variant::C),
            other => Err(format!("unknown variant `{other}` (expected plain or c)")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Plain => "plain",
            Variant::C => "c",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("prefix has {available} levels but the stage plan needs {needed}")]
    InsufficientLevels { needed: usize, available: usize },
    #[error("stage {stage}: only {found} fresh points, need {needed}")]
    NotEnoughFresh { stage: usize, needed: usize, found: usize },
    #[error("bit stream has {given} bits, the plan has {stages} stages")]
    BitsTooShort { given: usize, stages: usize },
    #[error("stage {stage}, level {level}: {detail}")]
    ConstructionFailure {
        stage: usize,
        level: usize,
        detail: String,
        pair: Option<(usize, usize)>,
    },
    #[error("limit is ill defined: {0}")]
    IllDefinedLimit(String),
    #[error(transparent)]
    Morass(#[from] MorassError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A finite structure on `0..size`. `≤*` is stored strictly (irreflexive)
/// and `d` as normalised pairs `(x, y)` with `x ≤ y`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct GenModel {
    size: usize,
    leq: BTreeSet<(usize, usize)>,
    dis: BTreeSet<(usize, usize)>,
    blocks: BTreeSet<(usize, usize)>,
}

fn norm(x: usize, y: usize) -> (usize, usize) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

impl GenModel {
    pub fn new(size: usize) -> Self {
        GenModel {
            size,
            ..Default::default()
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.leq.iter().copied()
    }

    pub fn dis_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.dis.iter().copied()
    }

    /// `(point, block)` labels.
    pub fn block_labels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.blocks.iter().copied()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq.contains(&(x, y))
    }

    pub fn dis(&self, x: usize, y: usize) -> bool {
        self.dis.contains(&norm(x, y))
    }

    pub fn block_of(&self, x: usize) -> Option<usize> {
        self.blocks.range((x, 0)..=(x, usize::MAX)).next().map(|&(_, b)| b)
    }

    fn labels_of(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.blocks.range((x, 0)..=(x, usize::MAX)).map(|&(_, b)| b)
    }

    pub fn add_leq(&mut self, x: usize, y: usize) -> bool {
        self.leq.insert((x, y))
    }

    pub fn add_dis(&mut self, x: usize, y: usize) -> bool {
        self.dis.insert(norm(x, y))
    }

    pub fn add_block(&mut self, x: usize, block: usize) -> bool {
        self.blocks.insert((x, block))
    }

    pub fn relation_count(&self) -> usize {
        self.leq.len() + self.dis.len()
    }

    /// Restriction to the initial segment `0..size`.
    pub fn restrict(&self, size: usize) -> GenModel {
        GenModel {
            size,
            leq: self
                .leq
                .iter()
                .filter(|&&(x, y)| x < size && y < size)
                .copied()
                .collect(),
            dis: self
                .dis
                .iter()
                .filter(|&&(x, y)| x < size && y < size)
                .copied()
                .collect(),
            blocks: self.blocks.iter().filter(|&&(x, _)| x < size).copied().collect(),
        }
    }

    /// Closes `≤*` under transitivity. Returns whether anything was added.
    pub fn close_order(&mut self) -> bool {
        let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(x, y) in &self.leq {
            succ.entry(x).or_default().push(y);
        }
        let mut added = Vec::new();
        for &start in succ.keys() {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<usize> = succ[&start].clone();
            while let Some(v) = stack.pop() {
                if !seen.insert(v) {
                    continue;
                }
                if !self.leq.contains(&(start, v)) {
                    added.push((start, v));
                }
                if let Some(next) = succ.get(&v) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        let changed = !added.is_empty();
        self.leq.extend(added);
        changed
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("model {}\n", self.size);
        for (x, y) in &self.leq {
            let _ = writeln!(out, "leq {x} {y}");
        }
        for (x, y) in &self.dis {
            let _ = writeln!(out, "dis {x} {y}");
        }
        for (x, b) in &self.blocks {
            let _ = writeln!(out, "block {x} {b}");
        }
        out
    }

    pub fn from_text(input: &str) -> Result<Self, ParseError> {
        let mut lines = content_lines(input);
        let (line, header) = lines
            .next()
            .ok_or_else(|| ParseError::new(1, "empty input, expected `model θ`"))?;
        if header.len() != 2 || header[0] != "model" {
            return Err(ParseError::new(line, "expected header `model θ`"));
        }
        let mut model = GenModel::new(parse_num(header[1], line, "universe size")?);
        for (line, tokens) in lines {
            if tokens.len() != 3 {
                return Err(ParseError::new(line, "expected `leq|dis|block x y`"));
            }
            let x: usize = parse_num(tokens[1], line, "point")?;
            let y: usize = parse_num(tokens[2], line, "point or block")?;
            if x >= model.size || (tokens[0] != "block" && y >= model.size) {
                return Err(ParseError::new(line, format!("point outside 0..{}", model.size)));
            }
            match tokens[0] {
                "leq" => model.add_leq(x, y),
                "dis" => model.add_dis(x, y),
                "block" => model.add_block(x, y),
                other => return Err(ParseError::new(line, format!("unknown record `{other}`"))),
            };
        }
        Ok(model)
    }
}

/// A violated axiom together with the points witnessing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub clause: &'static str,
    pub witness: Vec<usize>,
}

pub const CLAUSE_ORDER: &str = "≤* is a partial order";
pub const CLAUSE_DIS: &str = "d is symmetric and antireflexive";
pub const CLAUSE_CONTRADICTORY: &str = "d(x,y) and ≤*(x,y) are contradictory";
pub const CLAUSE_ONE_BLOCK: &str = "B_n(x) and B_m(x) are contradictory for n ≠ m";
pub const CLAUSE_TOTAL_BLOCKS: &str = "every point lies in some B_n";
pub const CLAUSE_BLOCK_DIS: &str = "distinct x, y in one B_n satisfy d(x,y)";

/// Checks every clause of the theory for `variant`; an empty list means the
/// model satisfies it.
pub fn check_theory(m: &GenModel, variant: Variant) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |clause, witness: Vec<usize>| out.push(Violation { clause, witness });

    for &(x, y) in &m.leq {
        if x == y {
            flag(CLAUSE_ORDER, vec![x]);
        } else if x < y && m.leq.contains(&(y, x)) {
            flag(CLAUSE_ORDER, vec![x, y]);
        }
    }
    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(x, y) in &m.leq {
        succ.entry(x).or_default().push(y);
    }
    'trans: for (&x, ys) in &succ {
        for &y in ys {
            for &z in succ.get(&y).map(Vec::as_slice).unwrap_or(&[]) {
                if x != z && !m.leq.contains(&(x, z)) {
                    flag(CLAUSE_ORDER, vec![x, y, z]);
                    break 'trans;
                }
            }
        }
    }
    for &(x, y) in &m.dis {
        if x == y {
            flag(CLAUSE_DIS, vec![x]);
        } else if m.leq.contains(&(x, y)) || m.leq.contains(&(y, x)) {
            flag(CLAUSE_CONTRADICTORY, vec![x, y]);
        }
    }

    if variant == Variant::C {
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut last: Option<(usize, usize)> = None;
        for &(x, b) in &m.blocks {
            if let Some((px, pb)) = last {
                if px == x {
                    flag(CLAUSE_ONE_BLOCK, vec![x, pb, b]);
                }
            }
            last = Some((x, b));
            members.entry(b).or_default().push(x);
        }
        for x in 0..m.size {
            if m.block_of(x).is_none() {
                flag(CLAUSE_TOTAL_BLOCKS, vec![x]);
                break;
            }
        }
        'blocks: for (_, xs) in members {
            for (i, &x) in xs.iter().enumerate() {
                for &y in &xs[i + 1..] {
                    if x != y && !m.dis(x, y) {
                        flag(CLAUSE_BLOCK_DIS, vec![x, y]);
                        break 'blocks;
                    }
                }
            }
        }
    }
    out
}

/// Why `f` fails to be an embedding, or `None` if it is one: relations and
/// block labels must be preserved and reflected.
pub fn embedding_defect(src: &GenModel, dst: &GenModel, f: &MorassMap) -> Option<String> {
    if f.domain_size() != src.size {
        return Some(format!(
            "map has domain {}, source has {} points",
            f.domain_size(),
            src.size
        ));
    }
    if f.range().any(|v| v >= dst.size) {
        return Some("map leaves the target universe".to_string());
    }
    for &(x, y) in &src.leq {
        if !dst.leq(f.apply(x), f.apply(y)) {
            return Some(format!("≤*({x},{y}) not preserved"));
        }
    }
    for &(x, y) in &src.dis {
        if !dst.dis(f.apply(x), f.apply(y)) {
            return Some(format!("d({x},{y}) not preserved"));
        }
    }
    for &(u, v) in &dst.leq {
        if let (Some(x), Some(y)) = (f.preimage(u), f.preimage(v)) {
            if !src.leq(x, y) {
                return Some(format!("≤*({u},{v}) not reflected"));
            }
        }
    }
    for &(u, v) in &dst.dis {
        if let (Some(x), Some(y)) = (f.preimage(u), f.preimage(v)) {
            if !src.dis(x, y) {
                return Some(format!("d({u},{v}) not reflected"));
            }
        }
    }
    for x in 0..src.size {
        if !src.labels_of(x).eq(dst.labels_of(f.apply(x))) {
            return Some(format!("block label of {x} not carried to {}", f.apply(x)));
        }
    }
    None
}

pub fn embed_check(src: &GenModel, dst: &GenModel, f: &MorassMap) -> bool {
    embedding_defect(src, dst, f).is_none()
}

/// Levels `α_n` and the fresh points used at each stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StagePlan {
    pub variant: Variant,
    pub alpha: Vec<usize>,
    /// `A_n`, increasing.
    pub fresh: Vec<Vec<usize>>,
    /// `a_n` (c-variant only).
    pub extra: Vec<Option<usize>>,
}

impl StagePlan {
    pub fn stages(&self) -> usize {
        self.fresh.len()
    }
}

/// The minimal α-sequence for `stages` stages: `α_{n+1} = α_n + n + 1`
/// (plain) or `α_n + n + 2` (c-variant).
pub fn minimal_alpha(stages: usize, variant: Variant) -> Vec<usize> {
    let extra = usize::from(variant == Variant::C);
    let mut alpha = vec![0];
    for n in 0..stages {
        alpha.push(alpha[n] + n + 1 + extra);
    }
    alpha
}

/// Points of `θ_γ` outside every range of `ℱ_{β,γ}` for `β ≤ top_source`.
fn fresh_over(p: &MorassPrefix, top_source: usize, gamma: usize) -> Result<Vec<usize>, MorassError> {
    let mut covered = BTreeSet::new();
    for beta in 0..=top_source {
        covered.extend(p.covered(beta, gamma)?);
    }
    Ok((0..p.theta(gamma)).filter(|x| !covered.contains(x)).collect())
}

/// How the fresh sets `A_n` (and `a_n`) are picked among the fresh points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum FreshChoice {
    /// Lexicographically least fresh points.
    #[default]
    Least,
    /// The points `θ_β` for `β = α_n, α_n + 1, …`, each of which first
    /// appears at level `β + 1` outside both one-step ranges.
    Gap,
}

impl FromStr for FreshChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "least" => Ok(FreshChoice::Least),
            "gap" => Ok(FreshChoice::Gap),
            other => Err(format!("unknown fresh choice `{other}` (expected least or gap)")),
        }
    }
}

/// Minimal α-sequence with the lexicographically least fresh sets.
pub fn plan_stages(p: &MorassPrefix, stages: usize, variant: Variant) -> Result<StagePlan, ModelError> {
    plan_stages_with(p, stages, variant, FreshChoice::Least)
}

/// Minimal α-sequence with fresh sets picked by `choice`.
pub fn plan_stages_with(
    p: &MorassPrefix,
    stages: usize,
    variant: Variant,
    choice: FreshChoice,
) -> Result<StagePlan, ModelError> {
    let alpha = minimal_alpha(stages, variant);
    let needed = alpha[stages];
    if needed > p.top() {
        return Err(ModelError::InsufficientLevels {
            needed: needed + 1,
            available: p.top() + 1,
        });
    }
    let mut fresh = Vec::with_capacity(stages);
    let mut extra = Vec::with_capacity(stages);
    for n in 0..stages {
        let candidates = fresh_over(p, alpha[n], alpha[n + 1])?;
        let want = n + 1 + usize::from(variant == Variant::C);
        if candidates.len() < want {
            return Err(ModelError::NotEnoughFresh {
                stage: n,
                needed: want,
                found: candidates.len(),
            });
        }
        let picked: Vec<usize> = match choice {
            FreshChoice::Least => candidates[..want].to_vec(),
            FreshChoice::Gap => (alpha[n]..alpha[n] + want).map(|beta| p.theta(beta)).collect(),
        };
        debug_assert!(picked.iter().all(|x| candidates.binary_search(x).is_ok()));
        fresh.push(picked[..n + 1].to_vec());
        extra.push((variant == Variant::C).then(|| picked[n + 1]));
    }
    Ok(StagePlan {
        variant,
        alpha,
        fresh,
        extra,
    })
}

/// The level-0 structure: a single point, in block 0 for the c-variant.
pub fn initial_model(p: &MorassPrefix, variant: Variant) -> GenModel {
    let mut m = GenModel::new(p.theta(0));
    if variant == Variant::C {
        for x in 0..m.size {
            m.add_block(x, x);
        }
    }
    m
}

struct Extension<'a> {
    prefix: &'a MorassPrefix,
    variant: Variant,
    stage: usize,
    source: usize,
    target: usize,
}

impl Extension<'_> {
    fn fail(&self, level: usize, detail: impl Into<String>, pair: Option<(usize, usize)>) -> ModelError {
        ModelError::ConstructionFailure {
            stage: self.stage,
            level,
            detail: detail.into(),
            pair,
        }
    }

    /// Builds the models on levels `source+1 ..= target` from `base` on
    /// `source`, adding `seed` relations on the target level.
    fn run(&self, base: &GenModel, seed: impl FnOnce(&mut GenModel)) -> Result<Vec<GenModel>, ModelError> {
        let p = self.prefix;
        let (s, g) = (self.source, self.target);
        let mut m = GenModel::new(p.theta(g));
        for f in p.family(s, g)? {
            push_forward(base, &f, &mut m);
        }
        seed(&mut m);

        let inner: Vec<(usize, Vec<MorassMap>)> = (s + 1..g)
            .map(|beta| {
                let maps = p
                    .family(beta, g)
                    .map(|fs| fs.into_iter().filter(|f| !is_inclusion(f)).collect());
                maps.map(|fs| (beta, fs))
            })
            .collect::<Result<_, MorassError>>()?;

        loop {
            let mut changed = m.close_order();
            if self.variant == Variant::C {
                changed |= self.label_fresh_points(&mut m, &inner);
                changed |= close_blocks(&mut m);
            }
            for (beta, maps) in &inner {
                let slice = m.restrict(p.theta(*beta));
                for f in maps {
                    changed |= push_forward(&slice, f, &mut m);
                }
            }
            if !changed {
                break;
            }
        }

        if let Some(&(x, y)) = m.dis.iter().find(|&&(x, y)| m.leq(x, y) || m.leq(y, x)) {
            return Err(self.fail(g, "maps force both d and ≤* on one pair", Some((x, y))));
        }
        if let Some(&(x, _)) = m.leq.iter().find(|&&(x, y)| x == y) {
            return Err(self.fail(g, "≤* became reflexive (a cycle)", Some((x, x))));
        }
        if let Some(v) = check_theory(&m, self.variant).first() {
            let pair = (v.witness.len() >= 2).then(|| (v.witness[0], v.witness[1]));
            return Err(self.fail(g, format!("theory violated: {}", v.clause), pair));
        }

        let built: Vec<GenModel> = (s + 1..=g).map(|beta| m.restrict(p.theta(beta))).collect();
        for beta in s..g {
            let src = if beta == s { base } else { &built[beta - s - 1] };
            let dst = &built[beta - s];
            for f in p.family(beta, beta + 1)? {
                if let Some(defect) = embedding_defect(src, dst, &f) {
                    return Err(self.fail(
                        beta + 1,
                        format!("one-step map {} from level {beta}: {defect}", f.word_string()),
                        None,
                    ));
                }
            }
        }
        Ok(built)
    }

    /// Gives every unlabelled point the least unused block and copies the
    /// label along the inner maps.
    fn label_fresh_points(&self, m: &mut GenModel, inner: &[(usize, Vec<MorassMap>)]) -> bool {
        let mut changed = false;
        let mut used: BTreeSet<usize> = m.blocks.iter().map(|&(_, b)| b).collect();
        for x in 0..m.size {
            if m.block_of(x).is_some() {
                continue;
            }
            let label = (0..).find(|b| !used.contains(b)).expect("unbounded");
            used.insert(label);
            m.add_block(x, label);
            changed = true;
            let mut stack = vec![x];
            while let Some(y) = stack.pop() {
                for (beta, maps) in inner {
                    if y >= self.prefix.theta(*beta) {
                        continue;
                    }
                    for f in maps {
                        let z = f.apply(y);
                        if m.add_block(z, label) {
                            stack.push(z);
                        }
                    }
                }
            }
        }
        changed
    }
}

fn is_inclusion(f: &MorassMap) -> bool {
    f.values.iter().enumerate().all(|(i, &v)| i == v)
}

/// Adds the image of `src` under `f` to `dst`; returns whether anything new
/// was added.
fn push_forward(src: &GenModel, f: &MorassMap, dst: &mut GenModel) -> bool {
    let mut changed = false;
    for &(x, y) in &src.leq {
        changed |= dst.add_leq(f.apply(x), f.apply(y));
    }
    for &(x, y) in &src.dis {
        changed |= dst.add_dis(f.apply(x), f.apply(y));
    }
    for &(x, b) in &src.blocks {
        changed |= dst.add_block(f.apply(x), b);
    }
    changed
}

/// Puts distinct members of each block into `d`.
fn close_blocks(m: &mut GenModel) -> bool {
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(x, b) in &m.blocks {
        members.entry(b).or_default().push(x);
    }
    let mut changed = false;
    for xs in members.values() {
        for (i, &x) in xs.iter().enumerate() {
            for &y in &xs[i + 1..] {
                changed |= m.add_dis(x, y);
            }
        }
    }
    changed
}

/// Builds the models on levels `α_n + 1 ..= α_{n+1}` from the model on
/// `α_n`. `bit = true` makes `A_n` a `≤*`-chain, `false` a `d`-antichain.
pub fn extend_stage(
    p: &MorassPrefix,
    base: &GenModel,
    plan: &StagePlan,
    n: usize,
    bit: bool,
) -> Result<Vec<GenModel>, ModelError> {
    let ext = Extension {
        prefix: p,
        variant: plan.variant,
        stage: n,
        source: plan.alpha[n],
        target: plan.alpha[n + 1],
    };
    let fresh = &plan.fresh[n];
    let extra = plan.extra[n];
    let reachable: Vec<usize> = if extra.is_some() {
        let mut covered = BTreeSet::new();
        for beta in 0..=ext.source {
            covered.extend(p.covered(beta, ext.target)?);
        }
        covered.into_iter().collect()
    } else {
        Vec::new()
    };
    ext.run(base, |m| {
        if bit {
            for w in fresh.windows(2) {
                m.add_leq(w[0], w[1]);
            }
        } else {
            for (i, &x) in fresh.iter().enumerate() {
                for &y in &fresh[i + 1..] {
                    m.add_dis(x, y);
                }
            }
        }
        if let Some(a) = extra {
            for &u in &reachable {
                m.add_dis(a, u);
            }
        }
    })
}

/// Models on every level of the prefix built from a bit stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub prefix: MorassPrefix,
    pub plan: StagePlan,
    pub bits: Vec<bool>,
    /// `models[β]` is `I_β` for every `β ≤ N`.
    pub models: Vec<GenModel>,
}

impl Construction {
    pub fn top_model(&self) -> &GenModel {
        self.models.last().expect("at least one level")
    }

    /// The model on the last stage level `α_M`.
    pub fn stage_model(&self, n: usize) -> &GenModel {
        &self.models[self.plan.alpha[n]]
    }
}

/// Runs every stage of `plan`, then extends freely up to the top of the
/// prefix.
pub fn construct(p: &MorassPrefix, plan: &StagePlan, bits: &[bool]) -> Result<Construction, ModelError> {
    if bits.len() < plan.stages() {
        return Err(ModelError::BitsTooShort {
            given: bits.len(),
            stages: plan.stages(),
        });
    }
    let last = plan.alpha[plan.stages()];
    if last > p.top() {
        return Err(ModelError::InsufficientLevels {
            needed: last + 1,
            available: p.top() + 1,
        });
    }
    let mut models = vec![initial_model(p, plan.variant)];
    for (n, &bit) in bits.iter().enumerate().take(plan.stages()) {
        let built = extend_stage(p, &models[plan.alpha[n]], plan, n, bit)?;
        models.extend(built);
    }
    if last < p.top() {
        let ext = Extension {
            prefix: p,
            variant: plan.variant,
            stage: plan.stages(),
            source: last,
            target: p.top(),
        };
        let built = ext.run(&models[last], |_| {})?;
        models.extend(built);
    }
    Ok(Construction {
        prefix: p.clone(),
        plan: plan.clone(),
        bits: bits[..plan.stages()].to_vec(),
        models,
    })
}

/// Top-level structure obtained by projecting every level along every map,
/// plus route bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitModel {
    pub model: GenModel,
    /// Number of `(level, map)` routes used.
    pub routes: usize,
    /// Top pairs reached by more than one route.
    pub multi_route_pairs: usize,
}

/// Defines the top-level relations by existential projection over all maps
/// `f ∈ ℱ_{α,N}` (and the identity at `N`) and checks that the result agrees
/// with the top model of the construction.
pub fn limit_model(c: &Construction) -> Result<LimitModel, ModelError> {
    let p = &c.prefix;
    let top = p.top();
    let mut model = GenModel::new(p.theta(top));
    let mut hits: HashMap<(u8, usize, usize), usize> = HashMap::new();
    let mut routes = 0;
    for alpha in 0..=top {
        for f in p.family(alpha, top)? {
            routes += 1;
            let src = &c.models[alpha];
            for &(x, y) in &src.leq {
                let pair = (f.apply(x), f.apply(y));
                model.add_leq(pair.0, pair.1);
                *hits.entry((0, pair.0, pair.1)).or_default() += 1;
            }
            for &(x, y) in &src.dis {
                let pair = norm(f.apply(x), f.apply(y));
                model.add_dis(pair.0, pair.1);
                *hits.entry((1, pair.0, pair.1)).or_default() += 1;
            }
            for &(x, b) in &src.blocks {
                model.add_block(f.apply(x), b);
            }
        }
    }
    if let Some(&(x, y)) = model.dis.iter().find(|&&(x, y)| model.leq(x, y) || model.leq(y, x)) {
        return Err(ModelError::IllDefinedLimit(format!(
            "routes disagree on ({x},{y}): both d and ≤*"
        )));
    }
    let mut last: Option<(usize, usize)> = None;
    for &(x, b) in &model.blocks {
        if let Some((px, pb)) = last {
            if px == x {
                return Err(ModelError::IllDefinedLimit(format!(
                    "routes give point {x} the blocks {pb} and {b}"
                )));
            }
        }
        last = Some((x, b));
    }
    if &model != c.top_model() {
        return Err(ModelError::IllDefinedLimit(
            "projection differs from the top-stage model".to_string(),
        ));
    }
    Ok(LimitModel {
        model,
        routes,
        multi_route_pairs: hits.values().filter(|&&n| n > 1).count(),
    })
}
