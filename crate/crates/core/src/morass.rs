//! Finite prefixes of neat simplified (ω,1)-morasses.
//!
//! A prefix of length `N` consists of finite levels `θ_0 < θ_1 < … < θ_N`
//! (each level is the initial segment `0..θ_α` of the naturals) and, for each
//! `α < N`, the one-step family `{id_α, h_α}` from level `α` to `α+1`. The
//! family between arbitrary levels is the closure of the one-step families
//! under composition, so the composition axiom holds by construction.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::report::{Check, CheckList};
use crate::text::{content_lines, parse_num, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorassError {
    #[error("a prefix needs at least one level step, got N = 0")]
    EmptyPrefix,
    #[error("invalid level range: {alpha} .. {gamma}")]
    InvalidRange { alpha: usize, gamma: usize },
    #[error("split point {split} at level {alpha} exceeds the level size {theta}")]
    SplitOutOfRange { alpha: usize, split: usize, theta: usize },
    #[error("split point {split} at level {alpha} equals the level size: h would be the identity")]
    DegenerateSplit { alpha: usize, split: usize },
    #[error("one-step map h_{alpha} is malformed: {reason}")]
    MalformedStep { alpha: usize, reason: String },
    #[error("invalid split rule `{0}`")]
    BadRule(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Chooses the splitting point `k_α` from `(α, θ_α)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SplitRule {
    /// `k_α = 0`: `h_α` shifts the whole level above `θ_α`.
    #[default]
    Zero,
    /// `k_α = θ_α - 1`: only the last point moves, levels grow by two.
    Top,
    /// `k_α = ⌊θ_α / 2⌋`.
    Half,
    /// The same split at every level, clamped to `θ_α - 1`.
    Fixed(usize),
    /// Explicit split per level.
    Explicit(Vec<usize>),
}

impl SplitRule {
    pub fn split(&self, alpha: usize, theta: usize) -> usize {
        match self {
            SplitRule::Zero => 0,
            SplitRule::Top => theta.saturating_sub(1),
            SplitRule::Half => theta / 2,
            SplitRule::Fixed(k) => (*k).min(theta.saturating_sub(1)),
            SplitRule::Explicit(ks) => ks.get(alpha).copied().unwrap_or(0),
        }
    }
}

impl FromStr for SplitRule {
    type Err = MorassError;

    /// Accepts `zero`, `top`, `half`, `fixed:K` and `list:K0,K1,...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MorassError::BadRule(s.to_string());
        match s {
            "zero" => Ok(SplitRule::Zero),
            "top" => Ok(SplitRule::Top),
            "half" => Ok(SplitRule::Half),
            _ => {
                if let Some(k) = s.strip_prefix("fixed:") {
                    k.parse().map(SplitRule::Fixed).map_err(|_| bad())
                } else if let Some(list) = s.strip_prefix("list:") {
                    list.split(',')
                        .map(|t| t.trim().parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map(SplitRule::Explicit)
                        .map_err(|_| bad())
                } else {
                    Err(bad())
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Step {
    Id,
    H,
}

impl Step {
    fn symbol(self) -> char {
        match self {
            Step::Id => 'i',
            Step::H => 'h',
        }
    }
}

/// A map in `ℱ_{source,target}`: a word of one-step choices applied bottom-up,
/// together with the function it induces on `0..θ_source`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MorassMap {
    pub source: usize,
    pub target: usize,
    pub word: Vec<Step>,
    pub values: Vec<usize>,
}

impl MorassMap {
    pub fn identity(level: usize, theta: usize) -> Self {
        MorassMap {
            source: level,
            target: level,
            word: Vec::new(),
            values: (0..theta).collect(),
        }
    }

    pub fn apply(&self, point: usize) -> usize {
        self.values[point]
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn range(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.iter().copied()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    /// `later ∘ self`; `later` must start where `self` ends.
    pub fn then(&self, later: &MorassMap) -> MorassMap {
        assert_eq!(self.target, later.source, "maps do not compose");
        MorassMap {
            source: self.source,
            target: later.target,
            word: self.word.iter().chain(&later.word).copied().collect(),
            values: self.values.iter().map(|&v| later.values[v]).collect(),
        }
    }

    /// Inverse as a partial function on the target level.
    pub fn preimage(&self, point: usize) -> Option<usize> {
        self.values.binary_search(&point).ok()
    }

    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            "e".to_string()
        } else {
            self.word.iter().map(|s| s.symbol()).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorassPrefix {
    levels: Vec<usize>,
    splits: Vec<usize>,
    shifts: Vec<Vec<usize>>,
}

/// The one-step map `h_α` determined by a split point.
pub fn standard_shift(theta: usize, split: usize) -> Vec<usize> {
    (0..theta)
        .map(|i| if i < split { i } else { theta + 1 + (i - split) })
        .collect()
}

/// Builds a prefix with `N` steps, `θ_0 = 1` and `θ_{α+1} = θ_α + (θ_α − k_α) + 1`.
pub fn build_prefix(steps: usize, rule: &SplitRule) -> Result<MorassPrefix, MorassError> {
    if steps == 0 {
        return Err(MorassError::EmptyPrefix);
    }
    let mut levels = vec![1usize];
    let mut splits = Vec::with_capacity(steps);
    let mut shifts = Vec::with_capacity(steps);
    for alpha in 0..steps {
        let theta = levels[alpha];
        let split = rule.split(alpha, theta);
        if split > theta {
            return Err(MorassError::SplitOutOfRange { alpha, split, theta });
        }
        if split == theta {
            return Err(MorassError::DegenerateSplit { alpha, split });
        }
        levels.push(theta + (theta - split) + 1);
        splits.push(split);
        shifts.push(standard_shift(theta, split));
    }
    Ok(MorassPrefix { levels, splits, shifts })
}

/// Result of a successful amalgamation search: `f_l = g ∘ f_l'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Amalgamation {
    pub gamma: usize,
    pub g: MorassMap,
    pub f0_head: MorassMap,
    pub f1_head: MorassMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorassReport {
    pub top: usize,
    pub levels: Vec<usize>,
    /// Exact checks of items 1, 2, 4, 5 and the coverage properties.
    pub exact: CheckList,
    /// Finite surrogates of items 3 and 6; never claims the ω-level axioms.
    pub surrogates: CheckList,
    pub coverage_complement: Vec<usize>,
    pub amalgamation_pairs: usize,
    pub amalgamated_pairs: usize,
}

impl MorassReport {
    pub fn passed(&self) -> bool {
        self.exact.passed()
    }
}

impl MorassPrefix {
    /// Assembles a prefix from raw parts without checking the axioms; use
    /// [`MorassPrefix::verify_axioms`] to find out what is broken.
    pub fn from_parts(levels: Vec<usize>, splits: Vec<usize>, shifts: Vec<Vec<usize>>) -> Self {
        MorassPrefix { levels, splits, shifts }
    }

    /// Index `N` of the top level.
    pub fn top(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn theta(&self, alpha: usize) -> usize {
        self.levels[alpha]
    }

    pub fn split(&self, alpha: usize) -> usize {
        self.splits[alpha]
    }

    pub fn shift(&self, alpha: usize) -> &[usize] {
        &self.shifts[alpha]
    }

    /// Replaces `h_α`; used to construct deliberately broken prefixes.
    pub fn with_shift(mut self, alpha: usize, values: Vec<usize>) -> Self {
        self.shifts[alpha] = values;
        self
    }

    fn check_step(&self, alpha: usize) -> Result<(), MorassError> {
        let theta = self.levels[alpha];
        let next = self.levels[alpha + 1];
        let h = &self.shifts[alpha];
        if h.len() != theta {
            return Err(MorassError::MalformedStep {
                alpha,
                reason: format!("domain has {} points, level has {theta}", h.len()),
            });
        }
        if let Some(&v) = h.iter().find(|&&v| v >= next) {
            return Err(MorassError::MalformedStep {
                alpha,
                reason: format!("value {v} lies outside θ_{} = {next}", alpha + 1),
            });
        }
        if theta > next {
            return Err(MorassError::MalformedStep {
                alpha,
                reason: format!("identity does not fit: θ_{alpha} = {theta} > {next}"),
            });
        }
        Ok(())
    }

    fn one_step(&self, alpha: usize, step: Step) -> MorassMap {
        let values = match step {
            Step::Id => (0..self.levels[alpha]).collect(),
            Step::H => self.shifts[alpha].clone(),
        };
        MorassMap {
            source: alpha,
            target: alpha + 1,
            word: vec![step],
            values,
        }
    }

    /// `ℱ_{α,γ}` for `α ≤ γ`, with `ℱ_{α,α} = {id}`. Words inducing the same
    /// function are merged, keeping the lexicographically least word.
    pub fn family(&self, alpha: usize, gamma: usize) -> Result<Vec<MorassMap>, MorassError> {
        if alpha > gamma || gamma > self.top() {
            return Err(MorassError::InvalidRange { alpha, gamma });
        }
        let mut current = vec![MorassMap::identity(alpha, self.levels[alpha])];
        for beta in alpha..gamma {
            self.check_step(beta)?;
            let steps = [self.one_step(beta, Step::Id), self.one_step(beta, Step::H)];
            let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next: Vec<MorassMap> = Vec::with_capacity(current.len() * 2);
            // `current` is sorted by word, and Id < H, so the first word to
            // reach a function is its least word.
            for f in &current {
                for step in &steps {
                    let g = f.then(step);
                    match seen.get(&g.values) {
                        Some(&idx) if next[idx].word <= g.word => {}
                        Some(&idx) => next[idx] = g,
                        None => {
                            seen.insert(g.values.clone(), next.len());
                            next.push(g);
                        }
                    }
                }
            }
            next.sort_by(|a, b| a.word.cmp(&b.word));
            current = next;
        }
        Ok(current)
    }

    /// `ℱ_{α,γ}` for `α < γ`.
    pub fn maps_between(&self, alpha: usize, gamma: usize) -> Result<Vec<MorassMap>, MorassError> {
        if alpha >= gamma {
            return Err(MorassError::InvalidRange { alpha, gamma });
        }
        self.family(alpha, gamma)
    }

    /// `⋃{rng f : f ∈ ℱ_{α,γ}}`.
    pub fn covered(&self, alpha: usize, gamma: usize) -> Result<BTreeSet<usize>, MorassError> {
        Ok(self.family(alpha, gamma)?.iter().flat_map(|f| f.range()).collect())
    }

    /// `θ_γ \ ⋃{rng f : f ∈ ℱ_{α,γ}}`; empty when `α = γ`.
    pub fn fresh_points(&self, alpha: usize, gamma: usize) -> Result<BTreeSet<usize>, MorassError> {
        if alpha == gamma && gamma <= self.top() {
            return Ok(BTreeSet::new());
        }
        let covered = self.covered(alpha, gamma)?;
        Ok((0..self.levels[gamma]).filter(|p| !covered.contains(p)).collect())
    }

    /// Searches the least `γ` with `β_0, β_1 < γ < N` and maps `g ∈ ℱ_{γ,N}`,
    /// `f_l' ∈ ℱ_{β_l,γ}` such that `f_l = g ∘ f_l'`.
    pub fn amalgamate(&self, f0: &MorassMap, f1: &MorassMap) -> Result<Option<Amalgamation>, MorassError> {
        let top = self.top();
        if f0.target != top || f1.target != top {
            return Err(MorassError::InvalidRange {
                alpha: f0.target.min(f1.target),
                gamma: top,
            });
        }
        let start = f0.source.max(f1.source) + 1;
        for gamma in start..top {
            let head0 = self.family(f0.source, gamma)?;
            let head1 = self.family(f1.source, gamma)?;
            for g in self.family(gamma, top)? {
                let h0 = factor_through(f0, &g, &head0);
                let h1 = factor_through(f1, &g, &head1);
                if let (Some(f0_head), Some(f1_head)) = (h0, h1) {
                    return Ok(Some(Amalgamation {
                        gamma,
                        g,
                        f0_head,
                        f1_head,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Checks the finite-level axioms and the coverage properties, and
    /// evaluates the finite surrogates for the covering and directedness
    /// axioms.
    pub fn verify_axioms(&self) -> MorassReport {
        let top = self.top();
        let mut exact = CheckList::default();
        let mut surrogates = CheckList::default();
        let mut report = MorassReport {
            top,
            levels: self.levels.clone(),
            exact: CheckList::default(),
            surrogates: CheckList::default(),
            coverage_complement: Vec::new(),
            amalgamation_pairs: 0,
            amalgamated_pairs: 0,
        };

        // item 1
        let zero_level = self.levels.iter().position(|&t| t == 0);
        exact.push(match (self.levels.len(), zero_level) {
            (0 | 1, _) => Check::new("item 1", false, "prefix has no level step"),
            (_, Some(a)) => Check::new("item 1", false, format!("θ_{a} = 0")),
            _ => Check::pass("item 1"),
        });
        if self.levels.len() < 2 || self.splits.len() != top || self.shifts.len() != top || zero_level.is_some() {
            exact.push(Check::new(
                "item 2",
                false,
                "prefix shape is inconsistent; remaining checks skipped",
            ));
            report.exact = exact;
            return report;
        }

        // item 2
        let mut item2 = Check::pass("item 2");
        for alpha in 0..top {
            if let Err(e) = self.check_step(alpha) {
                item2 = Check::new("item 2", false, e.to_string());
                break;
            }
            if !self.shifts[alpha].windows(2).all(|w| w[0] < w[1]) {
                item2 = Check::new("item 2", false, format!("h_{alpha} is not order preserving"));
                break;
            }
        }
        let structural = item2.passed;
        exact.push(item2);

        // item 5
        let mut item5 = Check::pass("item 5");
        for alpha in 0..top {
            let theta = self.levels[alpha];
            let k = self.splits[alpha];
            let h = &self.shifts[alpha];
            let fail = if k >= theta || h.len() != theta {
                Some(format!("split point {k} is not a point of θ_{alpha} = {theta}"))
            } else if (0..k).any(|i| h[i] != i) {
                Some(format!("h_{alpha} differs from the identity below {k}"))
            } else if h[k] <= theta {
                Some(format!("h_{alpha}({k}) = {} is not above θ_{alpha} = {theta}", h[k]))
            } else {
                None
            };
            if let Some(detail) = fail {
                item5 = Check::new("item 5", false, detail);
                break;
            }
        }
        exact.push(item5);

        if !structural {
            for name in ["item 4", "coverage monotone", "theta uncovered", "fresh points"] {
                exact.push(Check::new(name, false, "skipped: item 2 failed"));
            }
            report.exact = exact;
            return report;
        }

        let mut families: HashMap<(usize, usize), Vec<MorassMap>> = HashMap::new();
        for alpha in 0..=top {
            for gamma in alpha..=top {
                let fam = self.family(alpha, gamma).expect("structure checked above");
                families.insert((alpha, gamma), fam);
            }
        }
        let ranges: HashMap<(usize, usize), BTreeSet<usize>> = families
            .iter()
            .map(|(&key, fam)| (key, fam.iter().flat_map(|f| f.range()).collect()))
            .collect();

        // item 4
        let mut item4 = Check::pass("item 4");
        'outer: for alpha in 0..top {
            for beta in alpha + 1..top {
                for gamma in beta + 1..=top {
                    let direct: HashSet<&Vec<usize>> = families[&(alpha, gamma)].iter().map(|f| &f.values).collect();
                    let composed: HashSet<Vec<usize>> = families[&(alpha, beta)]
                        .iter()
                        .flat_map(|g| families[&(beta, gamma)].iter().map(move |f| g.then(f).values))
                        .collect();
                    let same = direct.len() == composed.len() && composed.iter().all(|v| direct.contains(v));
                    let monotone = families[&(alpha, gamma)].iter().all(MorassMap::is_strictly_increasing);
                    if !same || !monotone {
                        item4 = Check::new(
                            "item 4",
                            false,
                            format!("ℱ_{{{alpha},{gamma}}} differs from ℱ_{{{beta},{gamma}}} ∘ ℱ_{{{alpha},{beta}}}"),
                        );
                        break 'outer;
                    }
                }
            }
        }
        exact.push(item4);

        let mut inc1 = Check::pass("coverage monotone");
        'inc1: for alpha in 0..=top {
            for beta in alpha..=top {
                for gamma in beta..=top {
                    if !ranges[&(alpha, gamma)].is_subset(&ranges[&(beta, gamma)]) {
                        inc1 = Check::new(
                            "coverage monotone",
                            false,
                            format!("ranges from {alpha} into {gamma} escape those from {beta}"),
                        );
                        break 'inc1;
                    }
                }
            }
        }
        exact.push(inc1);

        let mut inc2 = Check::pass("theta uncovered");
        for alpha in 0..top {
            let theta = self.levels[alpha];
            if theta >= self.levels[alpha + 1] {
                inc2 = Check::new(
                    "theta uncovered",
                    false,
                    format!("θ_{alpha} = {theta} ≥ θ_{}", alpha + 1),
                );
                break;
            }
            if ranges[&(alpha, alpha + 1)].contains(&theta) {
                inc2 = Check::new(
                    "theta uncovered",
                    false,
                    format!("θ_{alpha} = {theta} lies in a range of ℱ_{{{alpha},{}}}", alpha + 1),
                );
                break;
            }
        }
        exact.push(inc2);

        let mut inc3 = Check::pass("fresh points");
        'inc3: for alpha in 0..=top {
            for gamma in alpha..=top {
                let fresh = self.levels[gamma] - ranges[&(alpha, gamma)].len();
                if fresh < gamma - alpha {
                    inc3 = Check::new(
                        "fresh points",
                        false,
                        format!(
                            "only {fresh} fresh points at {gamma} over {alpha}, need {}",
                            gamma - alpha
                        ),
                    );
                    break 'inc3;
                }
            }
        }
        exact.push(inc3);

        // item 3 surrogate: every point is covered except the newest gap point.
        let covered: BTreeSet<usize> = (0..top).flat_map(|a| ranges[&(a, top)].iter().copied()).collect();
        let complement: Vec<usize> = (0..self.levels[top]).filter(|p| !covered.contains(p)).collect();
        let newest_gap = self.levels[top - 1];
        surrogates.push(Check::new(
            "item 3 surrogate",
            complement.iter().all(|&p| p == newest_gap),
            format!(
                "{} of {} top points covered; uncovered {:?}",
                covered.len(),
                self.levels[top],
                complement
            ),
        ));
        report.coverage_complement = complement;

        // item 6 surrogate
        let (pairs, glued, sample) = self.amalgamation_census(&families);
        let detail = match sample {
            Some((a, b)) => format!("{glued}/{pairs} pairs amalgamate below the top; e.g. {a} and {b} do not"),
            None => format!("{glued}/{pairs} pairs amalgamate below the top"),
        };
        surrogates.push(Check::new("item 6 surrogate", glued == pairs, detail));
        report.amalgamation_pairs = pairs;
        report.amalgamated_pairs = glued;

        report.exact = exact;
        report.surrogates = surrogates;
        report
    }

    /// Counts pairs of maps into the top level that factor through a common
    /// `g ∈ ℱ_{γ,N}` with `γ < N`.
    fn amalgamation_census(
        &self,
        families: &HashMap<(usize, usize), Vec<MorassMap>>,
    ) -> (usize, usize, Option<(String, String)>) {
        let top = self.top();
        if top < 2 {
            return (0, 0, None);
        }
        // For each map into the top and each γ, the indices of g ∈ ℱ_{γ,N}
        // through which it factors.
        let mut maps: Vec<(usize, &MorassMap)> = Vec::new();
        for beta in 0..top - 1 {
            for f in &families[&(beta, top)] {
                maps.push((beta, f));
            }
        }
        let mut factors: Vec<Vec<BTreeSet<usize>>> = Vec::with_capacity(maps.len());
        for &(beta, f) in &maps {
            let mut per_gamma = vec![BTreeSet::new(); top];
            for (gamma, slot) in per_gamma.iter_mut().enumerate().take(top).skip(beta + 1) {
                let heads: HashSet<&Vec<usize>> = families[&(beta, gamma)].iter().map(|h| &h.values).collect();
                for (gi, g) in families[&(gamma, top)].iter().enumerate() {
                    if let Some(head) = head_values(f, g) {
                        if heads.contains(&head) {
                            slot.insert(gi);
                        }
                    }
                }
            }
            factors.push(per_gamma);
        }
        let mut pairs = 0;
        let mut glued = 0;
        let mut sample = None;
        for i in 0..maps.len() {
            for j in i..maps.len() {
                pairs += 1;
                let lo = maps[i].0.max(maps[j].0) + 1;
                let ok = (lo..top).any(|gamma| !factors[i][gamma].is_disjoint(&factors[j][gamma]));
                if ok {
                    glued += 1;
                } else if sample.is_none() {
                    sample = Some((
                        format!("{}:{}", maps[i].0, maps[i].1.word_string()),
                        format!("{}:{}", maps[j].0, maps[j].1.word_string()),
                    ));
                }
            }
        }
        (pairs, glued, sample)
    }

    pub fn to_text(&self) -> String {
        let top = self.top();
        let mut out = format!("morass {top}\n");
        for alpha in 0..=top {
            if alpha < top {
                let _ = writeln!(out, "level {alpha} {} {}", self.levels[alpha], self.splits[alpha]);
            } else {
                let _ = writeln!(out, "level {alpha} {} -", self.levels[alpha]);
            }
        }
        for alpha in 0..top {
            let theta = self.levels[alpha];
            if self.shifts[alpha] != standard_shift(theta, self.splits[alpha]) {
                let values: Vec<String> = self.shifts[alpha].iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "h {alpha} {}", values.join(" "));
            }
        }
        out
    }

    /// Parses the text form. Missing `h` lines default to the standard shift
    /// for the recorded split; the result is not axiom-checked.
    pub fn from_text(input: &str) -> Result<Self, MorassError> {
        let mut lines = content_lines(input);
        let (line, header) = lines
            .next()
            .ok_or_else(|| ParseError::new(1, "empty input, expected `morass N`"))?;
        if header.len() != 2 || header[0] != "morass" {
            return Err(ParseError::new(line, "expected header `morass N`").into());
        }
        let top: usize = parse_num(header[1], line, "level count")?;
        let mut levels = Vec::with_capacity(top + 1);
        let mut splits = Vec::with_capacity(top);
        let mut overrides: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        for (line, tokens) in lines {
            match tokens[0] {
                "level" => {
                    if tokens.len() != 4 {
                        return Err(ParseError::new(line, "expected `level α θ k`").into());
                    }
                    let alpha: usize = parse_num(tokens[1], line, "level index")?;
                    if alpha != levels.len() {
                        return Err(
                            ParseError::new(line, format!("expected level {}, found {alpha}", levels.len())).into(),
                        );
                    }
                    levels.push(parse_num::<usize>(tokens[2], line, "level size")?);
                    if alpha < top {
                        splits.push(parse_num::<usize>(tokens[3], line, "split point")?);
                    } else if tokens[3] != "-" {
                        return Err(ParseError::new(line, "top level carries `-` as split").into());
                    }
                }
                "h" => {
                    if tokens.len() < 2 {
                        return Err(ParseError::new(line, "expected `h α v0 v1 ...`").into());
                    }
                    let alpha: usize = parse_num(tokens[1], line, "level index")?;
                    let values = tokens[2..]
                        .iter()
                        .map(|t| parse_num::<usize>(t, line, "point"))
                        .collect::<Result<Vec<_>, _>>()?;
                    overrides.push((line, alpha, values));
                }
                other => return Err(ParseError::new(line, format!("unknown record `{other}`")).into()),
            }
        }
        if levels.len() != top + 1 {
            return Err(ParseError::new(
                input.lines().count().max(1),
                format!("expected {} level lines, found {}", top + 1, levels.len()),
            )
            .into());
        }
        let mut shifts: Vec<Vec<usize>> = (0..top)
            .map(|a| standard_shift(levels[a], splits[a].min(levels[a])))
            .collect();
        for (line, alpha, values) in overrides {
            if alpha >= top {
                return Err(ParseError::new(line, format!("no one-step map at level {alpha}")).into());
            }
            shifts[alpha] = values;
        }
        Ok(MorassPrefix { levels, splits, shifts })
    }
}

/// Values of `f'` with `f = g ∘ f'`, if `rng f ⊆ rng g`.
fn head_values(f: &MorassMap, g: &MorassMap) -> Option<Vec<usize>> {
    f.values.iter().map(|&v| g.preimage(v)).collect()
}

fn factor_through(f: &MorassMap, g: &MorassMap, heads: &[MorassMap]) -> Option<MorassMap> {
    let values = head_values(f, g)?;
    heads.iter().find(|h| h.values == values).cloned()
}
