//! The Cohen poset of finite partial functions `ω → 2`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::text::{content_lines, parse_num, ParseError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohenError {
    #[error("no decisions given")]
    NoData,
    #[error("index {0} is decided twice")]
    DuplicateIndex(usize),
    #[error("condition {0} of index {1} is not in the universe")]
    OutsideUniverse(CohenCondition, usize),
    #[error("bad condition `{0}`")]
    BadCondition(String),
    #[error("bad bit string `{0}`")]
    BadBits(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A finite partial function `ω → 2`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CohenCondition(pub BTreeMap<usize, bool>);

impl CohenCondition {
    pub fn new() -> Self {
        CohenCondition::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, bool)>) -> Self {
        CohenCondition(pairs.into_iter().collect())
    }

    pub fn get(&self, n: usize) -> Option<bool> {
        self.0.get(&n).copied()
    }

    pub fn with(&self, n: usize, bit: bool) -> Self {
        let mut q = self.clone();
        q.0.insert(n, bit);
        q
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    /// True iff `other ⊇ self`, i.e. `other` is the stronger condition.
    pub fn extended_by(&self, other: &CohenCondition) -> bool {
        self.0.iter().all(|(n, b)| other.get(*n) == Some(*b))
    }

    /// The union, when the two functions agree on their common domain.
    pub fn compatible(&self, other: &CohenCondition) -> Option<CohenCondition> {
        let mut union = self.clone();
        for (&n, &b) in &other.0 {
            if *union.0.entry(n).or_insert(b) != b {
                return None;
            }
        }
        Some(union)
    }
}

/// `q` extends `p`.
pub fn extends(p: &CohenCondition, q: &CohenCondition) -> bool {
    p.extended_by(q)
}

/// Parses `n:b` pairs separated by commas; `-` or the empty string is `∅`.
impl FromStr for CohenCondition {
    type Err = CohenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut out = CohenCondition::new();
        if s.is_empty() || s == "-" {
            return Ok(out);
        }
        for part in s.split(',') {
            let bad = || CohenError::BadCondition(s.to_string());
            let (n, b) = part.trim().split_once(':').ok_or_else(bad)?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            let b = match b.trim() {
                "0" => false,
                "1" => true,
                _ => return Err(bad()),
            };
            if out.0.insert(n, b).is_some() {
                return Err(bad());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for CohenCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.0.iter().map(|(n, b)| format!("{n}:{}", u8::from(*b))).collect();
        f.write_str(&parts.join(","))
    }
}

/// The bit `r(n)` that the density argument demands at coordinate `n`:
/// 0 iff the ground-model norm is below `n* − 1`.
pub fn demanded_bit(n_star: u64, norm: &Rational) -> bool {
    *norm >= Rational::from_integer((n_star - 1).into())
}

/// Where the dense set was met.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Density {
    pub q: CohenCondition,
    /// The coordinate `n ≥ n*²` witnessing membership.
    pub witness: usize,
    /// Whether `p` itself already was in the dense set.
    pub reused: bool,
}

/// Extends `p` into the dense set of conditions deciding some `n ≥ n*²`
/// against the oracle's norm at `n`. Reuses a coordinate already in
/// `dom(p)` when one qualifies, otherwise adds the least new coordinate.
pub fn density_check(p: &CohenCondition, n_star: u64, oracle: impl Fn(usize) -> Rational) -> Density {
    let start = (n_star * n_star) as usize;
    for (&n, &b) in p.0.range(start..) {
        if demanded_bit(n_star, &oracle(n)) == b {
            return Density {
                q: p.clone(),
                witness: n,
                reused: true,
            };
        }
    }
    let n = (start..).find(|n| !p.0.contains_key(n)).expect("finite domain");
    Density {
        q: p.with(n, demanded_bit(n_star, &oracle(n))),
        witness: n,
        reused: false,
    }
}

/// The least coordinate at which `q` meets the dense set, if any.
pub fn density_witness(q: &CohenCondition, n_star: u64, oracle: impl Fn(usize) -> Rational) -> Option<usize> {
    let start = (n_star * n_star) as usize;
    q.0.range(start..)
        .find(|(&n, &b)| demanded_bit(n_star, &oracle(n)) == b)
        .map(|(&n, _)| n)
}

/// Reads an oracle file of `n value` lines; unlisted coordinates are 0.
pub fn parse_oracle(input: &str) -> Result<BTreeMap<usize, Rational>, ParseError> {
    let mut out = BTreeMap::new();
    for (line, tokens) in content_lines(input) {
        if tokens.len() != 2 {
            return Err(ParseError::new(line, "expected `n value`"));
        }
        let n = parse_num(tokens[0], line, "a coordinate")?;
        let v = crate::text::parse_rational(tokens[1])
            .ok_or_else(|| ParseError::new(line, format!("expected a rational, found `{}`", tokens[1])))?;
        out.insert(n, v);
    }
    Ok(out)
}

/// A finite prefix of the generic real `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BitStream {
    pub bits: Vec<bool>,
    pub seed: Option<u64>,
}

impl BitStream {
    pub fn from_bits(bits: &str) -> Result<Self, CohenError> {
        let bits = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CohenError::BadBits(bits.to_string())),
            })
            .collect::<Result<_, _>>()?;
        Ok(BitStream { bits, seed: None })
    }

    pub fn from_seed(seed: u64, len: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BitStream {
            bits: (0..len).map(|_| rng.gen()).collect(),
            seed: Some(seed),
        }
    }

    pub fn as_condition(&self) -> CohenCondition {
        CohenCondition::from_pairs(self.bits.iter().copied().enumerate())
    }
}

impl fmt::Display for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits
            .iter()
            .try_for_each(|&b| f.write_str(if b { "1" } else { "0" }))
    }
}

/// `p_α ⊩ j(α) = v_α`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub index: usize,
    pub condition: CohenCondition,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Guess {
    pub condition: CohenCondition,
    /// Indices decided by `condition`, increasing.
    pub indices: Vec<usize>,
    /// `j↾A`.
    pub values: BTreeMap<usize, u64>,
}

/// Pigeonhole over a finite universe of conditions: the condition deciding
/// the most indices (least such condition on ties) together with the values
/// it decides.
pub fn pigeonhole_guess(decisions: &[Decision], universe: &[CohenCondition]) -> Result<Guess, CohenError> {
    if decisions.is_empty() {
        return Err(CohenError::NoData);
    }
    let universe: BTreeSet<&CohenCondition> = universe.iter().collect();
    let mut seen = BTreeSet::new();
    let mut groups: BTreeMap<&CohenCondition, Vec<&Decision>> = BTreeMap::new();
    for d in decisions {
        if !seen.insert(d.index) {
            return Err(CohenError::DuplicateIndex(d.index));
        }
        if !universe.contains(&d.condition) {
            return Err(CohenError::OutsideUniverse(d.condition.clone(), d.index));
        }
        groups.entry(&d.condition).or_default().push(d);
    }
    let best = groups.values().map(Vec::len).max().expect("nonempty");
    let (condition, members) = groups
        .into_iter()
        .find(|(_, m)| m.len() == best)
        .expect("a largest group");
    let values: BTreeMap<usize, u64> = members.iter().map(|d| (d.index, d.value)).collect();
    Ok(Guess {
        condition: condition.clone(),
        indices: values.keys().copied().collect(),
        values,
    })
}

/// Reads `index condition value` lines, e.g. `7 0:1,3:0 2`.
pub fn parse_decisions(input: &str) -> Result<Vec<Decision>, CohenError> {
    let mut out = Vec::new();
    for (line, tokens) in content_lines(input) {
        if tokens.len() != 3 {
            return Err(ParseError::new(line, "expected `index condition value`").into());
        }
        out.push(Decision {
            index: parse_num(tokens[0], line, "an index")?,
            condition: tokens[1]
                .parse()
                .map_err(|_| ParseError::new(line, format!("bad condition `{}`", tokens[1])))?,
            value: parse_num(tokens[2], line, "a value")?,
        });
    }
    Ok(out)
}
