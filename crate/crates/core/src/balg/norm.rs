use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::presentation::Presentation;
use super::solver::{projection, Backend, Budget, Solver};
use super::BalgError;
use crate::text::{format_rational, parse_rational};
use crate::Rational;

/// `Σ c_k χ_[g_k]` with exact rational coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimpleFunction {
    pub terms: Vec<(Rational, usize)>,
}

impl SimpleFunction {
    pub fn new(terms: Vec<(Rational, usize)>) -> Self {
        SimpleFunction { terms }
    }

    /// `χ_[g_0] + … + χ_[g_k]`.
    pub fn indicator_sum(gens: &[usize]) -> Self {
        SimpleFunction {
            terms: gens.iter().map(|&g| (Rational::from_integer(1.into()), g)).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        SimpleFunction {
            terms: self.terms.iter().map(|(c, g)| (c * factor, *g)).collect(),
        }
    }

    pub fn plus(&self, other: &SimpleFunction) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SimpleFunction { terms }
    }

    /// Distinct generators, sorted.
    pub fn support(&self) -> Vec<usize> {
        let mut gens: Vec<usize> = self.terms.iter().map(|(_, g)| *g).collect();
        gens.sort_unstable();
        gens.dedup();
        gens
    }

    fn value_on(&self, support: &[usize], bits: &[bool]) -> Rational {
        let mut sum = Rational::zero();
        for (c, g) in &self.terms {
            let i = support.binary_search(g).expect("generator in support");
            if bits[i] {
                sum += c;
            }
        }
        sum
    }
}

/// Parses `c*gN` terms separated by commas, e.g. `1*g3,-1/2*g7`.
impl FromStr for SimpleFunction {
    type Err = BalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut terms = Vec::new();
        for raw in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let bad = || BalgError::BadTerm(raw.to_string());
            let (coef, gen) = raw.split_once('*').ok_or_else(bad)?;
            let coef = parse_rational(coef).ok_or_else(bad)?;
            let gen = gen.trim();
            let gen = gen.strip_prefix('g').unwrap_or(gen);
            terms.push((coef, gen.parse().map_err(|_| bad())?));
        }
        Ok(SimpleFunction { terms })
    }
}

impl fmt::Display for SimpleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, g)| format!("{}*g{g}", format_rational(c)))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Sup-norm on `C(St(𝔄))`: the largest `|Σ{c_k : s(g_k) = 1}|` over points `s`.
pub fn norm_with(
    p: &Presentation,
    f: &SimpleFunction,
    backend: Backend,
    budget: &Budget,
) -> Result<Rational, BalgError> {
    let support = f.support();
    if let Some(&g) = support.iter().find(|&&g| g >= p.gens()) {
        return Err(BalgError::UnknownGenerator { gen: g, gens: p.gens() });
    }
    let mut best = Rational::zero();
    for bits in projection(p, &support, backend, budget)? {
        let v = f.value_on(&support, &bits.0).abs();
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// [`norm_with`] using the backend the budget picks for this presentation.
pub fn norm_simple(p: &Presentation, f: &SimpleFunction, budget: &Budget) -> Result<Rational, BalgError> {
    norm_with(p, f, budget.pick(p.gens()), budget)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dichotomy {
    /// `[i_0], …, [i_k]` pairwise disjoint.
    Antichain,
    /// `[i_0] ≤ … ≤ [i_k]`.
    Chain,
}

impl Dichotomy {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Dichotomy::Chain
        } else {
            Dichotomy::Antichain
        }
    }
}

/// Decides the dichotomy in the algebra itself (not just syntactically).
pub fn dichotomy_check(p: &Presentation, indices: &[usize], case: Dichotomy) -> bool {
    let mut s = Solver::new(p);
    match case {
        Dichotomy::Antichain => indices
            .iter()
            .enumerate()
            .all(|(i, &x)| indices[i + 1..].iter().all(|&y| !s.consistent(&[(x, true), (y, true)]))),
        Dichotomy::Chain => indices
            .windows(2)
            .all(|w| !s.consistent(&[(w[0], true), (w[1], false)])),
    }
}
