//! Conditions of ℙ(λ) over a finite index set: Boolean algebras presented
//! over a finite `w ⊆ A` by `≤` and `d` relations.
//!
//! Order convention: `stronger(p, q)` means `p ≤ q`, i.e. `q` is the
//! stronger condition and the algebra of `p` embeds into that of `q` fixing
//! `w_p`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::balg::{self, projection, Assignment, Backend, BalgError, Budget, Presentation, SimpleFunction};
use crate::text::{content_lines, ParseError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlamError {
    #[error("index a{0} is not in w")]
    OutsideW(usize),
    #[error("conditions {0} and {1} have no common extension")]
    NotDirected(usize, usize),
    #[error("the union is not stronger than condition {0}")]
    UnionTooStrong(usize),
    #[error("sequence {seq} is not increasing at step {step}")]
    NotIncreasing { seq: char, step: usize },
    #[error("the sequences are not compatible at step {0}")]
    NotParallel(usize),
    #[error("sequences of different lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("p_F for F = {0:?} has w = {1:?}")]
    WrongSupport(Vec<usize>, Vec<usize>),
    #[error("p_F for F = {0:?} is not below p_F for F = {1:?}")]
    Incoherent(Vec<usize>, Vec<usize>),
    #[error("fresh index a{0} lies in {1} base conditions")]
    Entangled(usize, usize),
    #[error("the split extension is not stronger than base condition {0}")]
    SplitFailed(usize),
    #[error(transparent)]
    Balg(#[from] BalgError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A condition: its index set `w` and relations between indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct PCondition {
    w: BTreeSet<usize>,
    leq: BTreeSet<(usize, usize)>,
    dis: BTreeSet<(usize, usize)>,
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl PCondition {
    /// The free algebra on `w`.
    pub fn free(w: impl IntoIterator<Item = usize>) -> Self {
        PCondition {
            w: w.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn w(&self) -> &BTreeSet<usize> {
        &self.w
    }

    pub fn leq_pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.leq
    }

    pub fn dis_pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.dis
    }

    pub fn relation_count(&self) -> usize {
        self.leq.len() + self.dis.len()
    }

    pub fn add_index(&mut self, a: usize) {
        self.w.insert(a);
    }

    /// Adds `a ≤ b` and restores transitive closure.
    pub fn add_leq(&mut self, a: usize, b: usize) -> Result<(), PlamError> {
        self.check_in(a)?;
        self.check_in(b)?;
        if a != b && self.leq.insert((a, b)) {
            self.close();
        }
        Ok(())
    }

    pub fn add_dis(&mut self, a: usize, b: usize) -> Result<(), PlamError> {
        self.check_in(a)?;
        self.check_in(b)?;
        self.dis.insert(pair(a, b));
        Ok(())
    }

    fn check_in(&self, a: usize) -> Result<(), PlamError> {
        if self.w.contains(&a) {
            Ok(())
        } else {
            Err(PlamError::OutsideW(a))
        }
    }

    fn close(&mut self) {
        loop {
            let mut new = Vec::new();
            for &(a, b) in &self.leq {
                for &(_, c) in self.leq.range((b, 0)..=(b, usize::MAX)) {
                    if a != c && !self.leq.contains(&(a, c)) {
                        new.push((a, c));
                    }
                }
            }
            if new.is_empty() {
                return;
            }
            self.leq.extend(new);
        }
    }

    /// Position of `a` in the increasing enumeration of `w`.
    pub fn local(&self, a: usize) -> Option<usize> {
        self.w.contains(&a).then(|| self.w.range(..a).count())
    }

    fn locals(&self, indices: &BTreeSet<usize>) -> Vec<usize> {
        indices.iter().map(|&a| self.local(a).expect("index in w")).collect()
    }

    /// The presentation over `0..|w|`, generator `i` being the `i`-th index.
    pub fn presentation(&self) -> Presentation {
        let loc = |a| self.local(a).expect("relation inside w");
        Presentation::new(
            self.w.len(),
            self.leq.iter().map(|&(a, b)| (loc(a), loc(b))).collect(),
            self.dis.iter().map(|&(a, b)| (loc(a), loc(b))).collect(),
        )
    }

    /// Stone points restricted to `onto ⊆ w`, as valuations of `onto` in
    /// increasing order.
    pub fn projection(&self, onto: &BTreeSet<usize>, budget: &Budget) -> Result<Vec<Assignment>, PlamError> {
        let p = self.presentation();
        let scope = self.locals(onto);
        Ok(projection(&p, &scope, budget.pick(p.gens()), budget)?)
    }

    pub fn points(&self, budget: &Budget) -> Result<Vec<Assignment>, PlamError> {
        self.projection(&self.w, budget)
    }

    /// Generated by both relation sets over `w_p ∪ w_q`.
    pub fn union(&self, other: &PCondition) -> PCondition {
        let mut out = PCondition {
            w: self.w.union(&other.w).copied().collect(),
            leq: self.leq.union(&other.leq).copied().collect(),
            dis: self.dis.union(&other.dis).copied().collect(),
        };
        out.close();
        out
    }

    pub fn type_code(&self) -> TypeCode {
        let loc = |a| self.local(a).expect("relation inside w");
        TypeCode {
            size: self.w.len(),
            leq: self.leq.iter().map(|&(a, b)| (loc(a), loc(b))).collect(),
            dis: self.dis.iter().map(|&(a, b)| (loc(a), loc(b))).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("cond\nw");
        for a in &self.w {
            write!(s, " a{a}").expect("write to string");
        }
        s.push('\n');
        for (a, b) in &self.leq {
            writeln!(s, "leq a{a} a{b}").expect("write to string");
        }
        for (a, b) in &self.dis {
            writeln!(s, "dis a{a} a{b}").expect("write to string");
        }
        s
    }

    pub fn from_text(input: &str) -> Result<Self, ParseError> {
        let mut lines = content_lines(input);
        match lines.next() {
            Some((_, t)) if t == ["cond"] => {}
            Some((line, _)) => return Err(ParseError::new(line, "expected `cond` header")),
            None => return Err(ParseError::new(1, "empty condition")),
        }
        let mut out = PCondition::default();
        let mut seen_w = false;
        for (line, tokens) in lines {
            let index = |t: &str| parse_index(t).ok_or_else(|| ParseError::new(line, format!("bad index `{t}`")));
            match tokens[0] {
                "w" if !seen_w => {
                    seen_w = true;
                    for t in &tokens[1..] {
                        out.w.insert(index(t)?);
                    }
                }
                "leq" | "dis" if tokens.len() == 3 => {
                    let (a, b) = (index(tokens[1])?, index(tokens[2])?);
                    let r = if tokens[0] == "leq" {
                        out.add_leq(a, b)
                    } else {
                        out.add_dis(a, b)
                    };
                    r.map_err(|e| ParseError::new(line, e.to_string()))?;
                }
                other => return Err(ParseError::new(line, format!("unexpected `{other}`"))),
            }
        }
        Ok(out)
    }
}

/// Accepts `a7` or `7`.
pub fn parse_index(token: &str) -> Option<usize> {
    token.strip_prefix('a').unwrap_or(token).parse().ok()
}

/// Relation pattern under the increasing enumeration of `w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypeCode {
    pub size: usize,
    pub leq: Vec<(usize, usize)>,
    pub dis: Vec<(usize, usize)>,
}

/// `p ≤ q`: `w_p ⊆ w_q` and the points of `q` project onto exactly the
/// points of `p`.
pub fn stronger(p: &PCondition, q: &PCondition) -> Result<bool, PlamError> {
    stronger_with(p, q, &Budget::default())
}

pub fn stronger_with(p: &PCondition, q: &PCondition, budget: &Budget) -> Result<bool, PlamError> {
    if !p.w.is_subset(&q.w) {
        return Ok(false);
    }
    Ok(q.projection(&p.w, budget)? == p.points(budget)?)
}

/// The union amalgam, when `p` and `q` agree on `w_p ∩ w_q`.
pub fn compatible(p: &PCondition, q: &PCondition) -> Result<Option<PCondition>, PlamError> {
    let budget = Budget::default();
    let root: BTreeSet<usize> = p.w.intersection(&q.w).copied().collect();
    if p.projection(&root, &budget)? != q.projection(&root, &budget)? {
        return Ok(None);
    }
    let r = p.union(q);
    if stronger_with(p, &r, &budget)? && stronger_with(q, &r, &budget)? {
        Ok(Some(r))
    } else {
        Ok(None)
    }
}

/// Same type, and `w_p ∩ w_q` is a common initial segment of both index sets
/// (the Δ-system shape of the compatibility argument).
pub fn color_compat(p: &PCondition, q: &PCondition) -> bool {
    if p.type_code() != q.type_code() {
        return false;
    }
    let root = p.w.intersection(&q.w).count();
    p.w.iter().zip(&q.w).take(root).all(|(a, b)| a == b)
}

/// `k` members whose index sets pairwise meet in one common root.
pub fn delta_system(family: &[BTreeSet<usize>], k: usize) -> Option<(Vec<usize>, BTreeSet<usize>)> {
    match k {
        0 => return Some((vec![], BTreeSet::new())),
        1 => return family.first().map(|s| (vec![0], s.clone())),
        _ => {}
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let root: BTreeSet<usize> = family[i].intersection(&family[j]).copied().collect();
            let mut chosen = vec![i, j];
            if grow_sunflower(family, k, &root, j + 1, &mut chosen) {
                return Some((chosen, root));
            }
        }
    }
    None
}

fn grow_sunflower(
    family: &[BTreeSet<usize>],
    k: usize,
    root: &BTreeSet<usize>,
    from: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if chosen.len() == k {
        return true;
    }
    for c in from..family.len() {
        if family.len() - c < k - chosen.len() {
            break;
        }
        let fits = root.is_subset(&family[c])
            && chosen
                .iter()
                .all(|&m| family[m].intersection(&family[c]).count() == root.len());
        if fits {
            chosen.push(c);
            if grow_sunflower(family, k, root, c + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn union_all<'a>(items: impl IntoIterator<Item = &'a PCondition>) -> PCondition {
    items.into_iter().fold(PCondition::default(), |acc, p| acc.union(p))
}

fn verify_upper_bound<'a>(
    bound: &PCondition,
    items: impl IntoIterator<Item = &'a PCondition>,
    fail: impl Fn(usize) -> PlamError,
) -> Result<(), PlamError> {
    for (i, p) in items.into_iter().enumerate() {
        if !stronger(p, bound)? {
            return Err(fail(i));
        }
    }
    Ok(())
}

/// Upper bound of a directed family, by union of the relations.
pub fn directed_close(family: &[PCondition]) -> Result<PCondition, PlamError> {
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if compatible(&family[i], &family[j])?.is_none() {
                return Err(PlamError::NotDirected(i, j));
            }
        }
    }
    let bound = union_all(family);
    verify_upper_bound(&bound, family, PlamError::UnionTooStrong)?;
    Ok(bound)
}

/// Common upper bound of two increasing, pointwise-compatible sequences.
pub fn parallel_close(ps: &[PCondition], qs: &[PCondition]) -> Result<PCondition, PlamError> {
    if ps.len() != qs.len() {
        return Err(PlamError::LengthMismatch(ps.len(), qs.len()));
    }
    for (name, seq) in [('p', ps), ('q', qs)] {
        for step in 1..seq.len() {
            if !stronger(&seq[step - 1], &seq[step])? {
                return Err(PlamError::NotIncreasing { seq: name, step });
            }
        }
    }
    for (step, (p, q)) in ps.iter().zip(qs).enumerate() {
        if compatible(p, q)?.is_none() {
            return Err(PlamError::NotParallel(step));
        }
    }
    let bound = union_all(ps.iter().chain(qs));
    verify_upper_bound(&bound, ps.iter().chain(qs), PlamError::UnionTooStrong)?;
    Ok(bound)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Limit {
    pub condition: PCondition,
    /// Relations of the raw union dropped as redundant.
    pub dropped: usize,
    /// Indices `i` with no `F ∋ i` in the system.
    pub undense: Vec<usize>,
}

/// Colimit of a directed system `F ↦ p_F` with `w_{p_F} = F`: the union of
/// all relations, thinned to a minimal set that keeps every `p_F` below.
pub fn limit_algebra(system: &BTreeMap<BTreeSet<usize>, PCondition>) -> Result<Limit, PlamError> {
    let as_vec = |s: &BTreeSet<usize>| s.iter().copied().collect::<Vec<_>>();
    for (f, p) in system {
        if p.w() != f {
            return Err(PlamError::WrongSupport(as_vec(f), as_vec(p.w())));
        }
    }
    for (f, p) in system {
        for (g, q) in system {
            if f != g && f.is_subset(g) && !stronger(p, q)? {
                return Err(PlamError::Incoherent(as_vec(f), as_vec(g)));
            }
        }
    }
    let raw = union_all(system.values());
    let keys: Vec<&BTreeSet<usize>> = system.keys().collect();
    let below_all = |c: &PCondition| -> Result<Option<usize>, PlamError> {
        for (i, p) in system.values().enumerate() {
            if !stronger(p, c)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    };
    if let Some(i) = below_all(&raw)? {
        return Err(PlamError::Incoherent(as_vec(keys[i]), as_vec(raw.w())));
    }
    let mut current = raw.clone();
    for rel in raw
        .leq
        .iter()
        .map(|&r| (true, r))
        .chain(raw.dis.iter().map(|&r| (false, r)))
    {
        let mut trial = current.clone();
        match rel {
            (true, r) => trial.leq.remove(&r),
            (false, r) => trial.dis.remove(&r),
        };
        if below_all(&trial)?.is_none() {
            current = trial;
        }
    }
    let covered: BTreeSet<usize> = system.keys().flatten().copied().collect();
    Ok(Limit {
        dropped: raw.relation_count() - current.relation_count(),
        undense: raw.w().difference(&covered).copied().collect(),
        condition: current,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Split {
    pub chain: PCondition,
    pub antichain: PCondition,
    #[serde(serialize_with = "ser_rational")]
    pub chain_norm: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub antichain_norm: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::text::format_rational(r))
}

/// Two extensions of the amalgam of `base`: one making `a_{i_0} ≤ … ≤ a_{i_k}`
/// and one making them pairwise disjoint, with the norms of
/// `χ_{a_{i_0}} + … + χ_{a_{i_k}}` in each.
pub fn split_extensions(base: &[PCondition], fresh: &[usize]) -> Result<Split, PlamError> {
    for &a in fresh {
        let owners = base.iter().filter(|p| p.w.contains(&a)).count();
        if owners != 1 {
            return Err(PlamError::Entangled(a, owners));
        }
    }
    let amalgam = directed_close(base)?;
    let mut chain = amalgam.clone();
    for w in fresh.windows(2) {
        chain.add_leq(w[0], w[1])?;
    }
    let mut antichain = amalgam;
    for (i, &a) in fresh.iter().enumerate() {
        for &b in &fresh[i + 1..] {
            antichain.add_dis(a, b)?;
        }
    }
    for q in [&chain, &antichain] {
        verify_upper_bound(q, base, PlamError::SplitFailed)?;
    }
    let norm = |q: &PCondition| -> Result<Rational, PlamError> {
        let gens: Vec<usize> = fresh.iter().map(|&a| q.local(a).expect("fresh index in w")).collect();
        let p = q.presentation();
        Ok(balg::norm_simple(
            &p,
            &SimpleFunction::indicator_sum(&gens),
            &Budget::default(),
        )?)
    };
    Ok(Split {
        chain_norm: norm(&chain)?,
        antichain_norm: norm(&antichain)?,
        chain,
        antichain,
    })
}

/// Compatibility decided by brute force over `2^(w_p ∪ w_q)`: the largest
/// candidate upper bound (all valuations whose restrictions are points of
/// `p` and of `q`) must project onto both point sets.
pub fn compatible_brute(p: &PCondition, q: &PCondition) -> bool {
    let union: Vec<usize> = p.w.union(&q.w).copied().collect();
    assert!(union.len() < 24, "brute force needs a small union");
    let budget = Budget::with_enumeration_limit(24);
    let points = |c: &PCondition| -> BTreeSet<Vec<bool>> {
        balg::stone_points(&c.presentation(), Backend::Enumeration, &budget)
            .expect("within budget")
            .into_iter()
            .map(|a| a.0)
            .collect()
    };
    let (pp, qp) = (points(p), points(q));
    let restrict = |mask: u32, w: &BTreeSet<usize>| -> Vec<bool> {
        w.iter()
            .map(|a| mask >> union.binary_search(a).expect("in union") & 1 == 1)
            .collect()
    };
    let mut seen_p = BTreeSet::new();
    let mut seen_q = BTreeSet::new();
    for mask in 0..1u32 << union.len() {
        let (rp, rq) = (restrict(mask, &p.w), restrict(mask, &q.w));
        if pp.contains(&rp) && qp.contains(&rq) {
            seen_p.insert(rp);
            seen_q.insert(rq);
        }
    }
    seen_p == pp && seen_q == qp
}
