use num_traits::{One, Zero};
use serde::Serialize;

use super::BalgError;
use crate::report::{Check, CheckList};
use crate::text::format_rational;
use crate::Rational;

/// The constants `n*`, `c`, `ε` of the norm-contradiction argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingScenario {
    pub n_star: u64,
    pub c: Rational,
    pub epsilon: Rational,
}

impl EmbeddingScenario {
    /// Accepts `ε` only if `0 < ε < ε_max(n*, c)`.
    pub fn new(n_star: u64, c: Rational, epsilon: Rational) -> Result<Self, BalgError> {
        let bounds = scenario_bounds(n_star, &c)?;
        if epsilon <= Rational::zero() || epsilon >= bounds.epsilon_max {
            return Err(BalgError::InvalidScenario(format!(
                "ε = {} is not in (0, {})",
                format_rational(&epsilon),
                format_rational(&bounds.epsilon_max)
            )));
        }
        Ok(EmbeddingScenario { n_star, c, epsilon })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    #[serde(serialize_with = "ser_rational")]
    pub epsilon_max: Rational,
    /// `(n* − c)/n*`.
    #[serde(serialize_with = "ser_rational")]
    pub first_bound: Rational,
    /// `(n*² + 1 − c·n*)/(c·n*² + 1)`.
    #[serde(serialize_with = "ser_rational")]
    pub second_bound: Rational,
    pub checks: CheckList,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// `ε_max = min{(n*−c)/n*, (n*²+1−c·n*)/(c·n*²+1)}` with the two exact
/// inequalities the contradiction rests on.
pub fn scenario_bounds(n_star: u64, c: &Rational) -> Result<ScenarioReport, BalgError> {
    if n_star < 3 {
        return Err(BalgError::InvalidScenario(format!("n* = {n_star} is below 3")));
    }
    let n = Rational::from_integer(n_star.into());
    if *c <= Rational::zero() || *c >= n {
        return Err(BalgError::InvalidScenario(format!(
            "c = {} is not in (0, {n_star})",
            format_rational(c)
        )));
    }
    let one = Rational::one();
    let sq = &n * &n;
    let first_bound = (&n - c) / &n;
    let second_bound = (&sq + &one - c * &n) / (c * &sq + &one);
    let epsilon_max = first_bound.clone().min(second_bound.clone());

    let mut checks = CheckList::default();
    checks.push(Check::new(
        "epsilon_max > 0",
        epsilon_max > Rational::zero(),
        format_rational(&epsilon_max),
    ));
    let ratio = (&sq + &one) / &n;
    checks.push(Check::new(
        "(n*²+1)/n* > n*",
        ratio > n,
        format!("{} > {n_star}", format_rational(&ratio)),
    ));
    let chain_norm = &sq + &one;
    let scale = &n * &n + &one;
    let chain = (&n - &one) + chain_norm / scale;
    checks.push(Check::new(
        "(n*−1) + (n*²+1)/(n*²+1) = n*",
        chain == n,
        format!("{} = {n_star}", format_rational(&chain)),
    ));
    Ok(ScenarioReport {
        epsilon_max,
        first_bound,
        second_bound,
        checks,
    })
}
