use serde::Serialize;

use super::presentation::{Assignment, Presentation};
use super::solver::{stone_points, Backend, Budget};
use super::BalgError;

/// A clopen set of the Stone space, as a membership vector over the points
/// of its [`ElementAlgebra`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Element(Vec<bool>);

impl Element {
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }
}

/// The algebra of a presentation, elements being sets of Stone points.
#[derive(Debug, Clone)]
pub struct ElementAlgebra {
    points: Vec<Assignment>,
}

impl ElementAlgebra {
    pub fn new(p: &Presentation, backend: Backend, budget: &Budget) -> Result<Self, BalgError> {
        Ok(ElementAlgebra {
            points: stone_points(p, backend, budget)?,
        })
    }

    pub fn points(&self) -> &[Assignment] {
        &self.points
    }

    pub fn zero(&self) -> Element {
        Element(vec![false; self.points.len()])
    }

    pub fn one(&self) -> Element {
        Element(vec![true; self.points.len()])
    }

    /// `[g]`, the points sending `g` to 1.
    pub fn generator(&self, g: usize) -> Element {
        Element(self.points.iter().map(|s| s.get(g)).collect())
    }

    pub fn meet(&self, a: &Element, b: &Element) -> Element {
        Element(a.0.iter().zip(&b.0).map(|(x, y)| *x && *y).collect())
    }

    pub fn join(&self, a: &Element, b: &Element) -> Element {
        Element(a.0.iter().zip(&b.0).map(|(x, y)| *x || *y).collect())
    }

    pub fn complement(&self, a: &Element) -> Element {
        Element(a.0.iter().map(|x| !x).collect())
    }

    pub fn join_all<'a>(&self, items: impl IntoIterator<Item = &'a Element>) -> Element {
        items.into_iter().fold(self.zero(), |acc, e| self.join(&acc, e))
    }

    pub fn leq(&self, a: &Element, b: &Element) -> bool {
        a.0.iter().zip(&b.0).all(|(x, y)| !x || *y)
    }

    pub fn disjoint(&self, a: &Element, b: &Element) -> bool {
        self.is_zero(&self.meet(a, b))
    }

    pub fn is_zero(&self, a: &Element) -> bool {
        a.0.iter().all(|x| !x)
    }

    pub fn is_one(&self, a: &Element) -> bool {
        a.0.iter().all(|x| *x)
    }

    /// A point outside `⋃F`, or `None` when `⋁F = 1`.
    pub fn nice_property(&self, family: &[Element]) -> Option<Assignment> {
        let join = self.join_all(family);
        join.0.iter().position(|x| !x).map(|i| self.points[i].clone())
    }
}
