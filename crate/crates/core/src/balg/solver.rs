//! Stone points of a presentation.
//!
//! Every relation is a two-literal clause with at least one negative
//! literal (`x ≤ y` is `¬x ∨ y`, `d(x,y)` is `¬x ∨ ¬y`), so the all-zero
//! valuation is always a point, and a partial valuation extends to a point
//! iff unit propagation from it reaches no conflict: after propagation,
//! setting every open generator to 0 satisfies every clause. The
//! propagation backend relies on this; the enumeration backend does not.

use serde::Serialize;

use super::presentation::{Assignment, Presentation};
use super::BalgError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Backend {
    /// Filter all `2^n` valuations.
    Enumeration,
    /// Backtracking with unit propagation.
    Propagation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Largest generator count the enumeration backend accepts.
    pub enumeration_limit: usize,
    /// Largest number of points or branches the propagation backend visits.
    pub search_limit: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            enumeration_limit: 20,
            search_limit: 1 << 22,
        }
    }
}

impl Budget {
    pub fn with_enumeration_limit(limit: usize) -> Self {
        Budget {
            enumeration_limit: limit,
            ..Budget::default()
        }
    }

    /// Enumeration when it fits, propagation otherwise.
    pub fn pick(&self, gens: usize) -> Backend {
        if gens <= self.enumeration_limit {
            Backend::Enumeration
        } else {
            Backend::Propagation
        }
    }
}

/// Propagation engine over the constraint graph of one presentation.
#[derive(Debug, Clone)]
pub struct Solver {
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    apart: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl Solver {
    pub fn new(p: &Presentation) -> Self {
        let n = p.gens();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        let mut apart = vec![Vec::new(); n];
        for &(x, y) in p.leq() {
            up[x].push(y);
            down[y].push(x);
        }
        for &(x, y) in p.dis() {
            apart[x].push(y);
            if x != y {
                apart[y].push(x);
            }
        }
        Solver {
            up,
            down,
            apart,
            value: vec![None; n],
            trail: Vec::new(),
        }
    }

    pub fn gens(&self) -> usize {
        self.value.len()
    }

    /// Whether `d(x, y)` is a relation of the presentation.
    pub fn is_apart(&self, x: usize, y: usize) -> bool {
        self.apart[x].contains(&y)
    }

    fn set(&mut self, g: usize, v: bool, queue: &mut Vec<(usize, bool)>) -> bool {
        match self.value[g] {
            Some(old) => old == v,
            None => {
                self.value[g] = Some(v);
                self.trail.push(g);
                queue.push((g, v));
                true
            }
        }
    }

    /// Assigns and propagates; returns false on conflict. Assignments made
    /// since `mark` can be undone with [`Solver::undo`].
    fn assume(&mut self, literals: &[(usize, bool)]) -> bool {
        let mut queue = Vec::new();
        for &(g, v) in literals {
            if !self.set(g, v, &mut queue) {
                return false;
            }
        }
        while let Some((g, v)) = queue.pop() {
            if v {
                for i in 0..self.up[g].len() {
                    let y = self.up[g][i];
                    if !self.set(y, true, &mut queue) {
                        return false;
                    }
                }
                for i in 0..self.apart[g].len() {
                    let y = self.apart[g][i];
                    if y == g || !self.set(y, false, &mut queue) {
                        return false;
                    }
                }
            } else {
                for i in 0..self.down[g].len() {
                    let x = self.down[g][i];
                    if !self.set(x, false, &mut queue) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn mark(&self) -> usize {
        self.trail.len()
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let g = self.trail.pop().expect("trail above mark");
            self.value[g] = None;
        }
    }

    /// Whether some point satisfies the given literals.
    pub fn consistent(&mut self, literals: &[(usize, bool)]) -> bool {
        let mark = self.mark();
        let ok = self.assume(literals);
        self.undo(mark);
        ok
    }

    /// The least point (open generators at 0) satisfying the literals.
    pub fn extend(&mut self, literals: &[(usize, bool)]) -> Option<Assignment> {
        let mark = self.mark();
        let ok = self.assume(literals);
        let out = ok.then(|| Assignment(self.value.iter().map(|v| v.unwrap_or(false)).collect()));
        self.undo(mark);
        out
    }

    /// Visits every consistent valuation of `scope` (in lexicographic order,
    /// 0 before 1) that extends to a point.
    pub fn for_each_projection(
        &mut self,
        scope: &[usize],
        limit: usize,
        mut visit: impl FnMut(&[bool]),
    ) -> Result<(), BalgError> {
        let mut current = Vec::with_capacity(scope.len());
        let mut visited = 0usize;
        self.walk(scope, &mut current, limit, &mut visited, &mut visit)
    }

    fn walk(
        &mut self,
        scope: &[usize],
        current: &mut Vec<bool>,
        limit: usize,
        visited: &mut usize,
        visit: &mut impl FnMut(&[bool]),
    ) -> Result<(), BalgError> {
        *visited += 1;
        if *visited > limit {
            return Err(BalgError::TooLarge {
                gens: self.gens(),
                limit,
            });
        }
        let depth = current.len();
        if depth == scope.len() {
            visit(current);
            return Ok(());
        }
        for v in [false, true] {
            let mark = self.mark();
            if self.assume(&[(scope[depth], v)]) {
                current.push(v);
                self.walk(scope, current, limit, visited, visit)?;
                current.pop();
            }
            self.undo(mark);
        }
        Ok(())
    }
}

/// All points of the Stone space, in lexicographic order of the valuation
/// vectors.
pub fn stone_points(p: &Presentation, backend: Backend, budget: &Budget) -> Result<Vec<Assignment>, BalgError> {
    let n = p.gens();
    match backend {
        Backend::Enumeration => {
            if n > budget.enumeration_limit || n >= 64 {
                return Err(BalgError::TooLarge {
                    gens: n,
                    limit: budget.enumeration_limit,
                });
            }
            let mut points: Vec<Assignment> = (0..1u64 << n)
                .map(|mask| Assignment::from_mask(n, mask))
                .filter(|a| a.satisfies(p))
                .collect();
            points.sort();
            Ok(points)
        }
        Backend::Propagation => {
            let scope: Vec<usize> = (0..n).collect();
            let mut points = Vec::new();
            Solver::new(p).for_each_projection(&scope, budget.search_limit, |bits| {
                points.push(Assignment(bits.to_vec()))
            })?;
            Ok(points)
        }
    }
}

/// The set of restrictions of points to `scope`, sorted.
pub fn projection(
    p: &Presentation,
    scope: &[usize],
    backend: Backend,
    budget: &Budget,
) -> Result<Vec<Assignment>, BalgError> {
    let mut out = match backend {
        Backend::Enumeration => {
            let mut all: Vec<Assignment> = stone_points(p, backend, budget)?
                .iter()
                .map(|a| a.project(scope))
                .collect();
            all.dedup();
            all
        }
        Backend::Propagation => {
            let mut out = Vec::new();
            Solver::new(p)
                .for_each_projection(scope, budget.search_limit, |bits| out.push(Assignment(bits.to_vec())))?;
            out
        }
    };
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both(p: &Presentation) -> Vec<Assignment> {
        let budget = Budget::default();
        let a = stone_points(p, Backend::Enumeration, &budget).unwrap();
        let b = stone_points(p, Backend::Propagation, &budget).unwrap();
        assert_eq!(a, b);
        a
    }

    #[test]
    fn free_algebra_on_two_generators_has_four_points() {
        assert_eq!(both(&Presentation::free(2)).len(), 4);
    }

    #[test]
    fn disjoint_pair_excludes_one_one() {
        let points = both(&Presentation::new(2, vec![], vec![(0, 1)]));
        assert_eq!(points.len(), 3);
        assert!(!points.contains(&Assignment(vec![true, true])));
    }

    #[test]
    fn chain_excludes_one_zero() {
        let points = both(&Presentation::new(2, vec![(0, 1)], vec![]));
        assert_eq!(points.len(), 3);
        assert!(!points.contains(&Assignment(vec![true, false])));
    }

    #[test]
    fn enumeration_respects_the_budget() {
        let p = Presentation::free(21);
        assert_eq!(
            stone_points(&p, Backend::Enumeration, &Budget::default()),
            Err(BalgError::TooLarge { gens: 21, limit: 20 })
        );
        let tight = Budget {
            enumeration_limit: 20,
            search_limit: 100,
        };
        assert!(stone_points(&p, Backend::Propagation, &tight).is_err());
    }

    #[test]
    fn extension_is_the_least_point() {
        let p = Presentation::new(4, vec![(0, 1), (1, 2)], vec![(2, 3)]);
        let mut s = Solver::new(&p);
        let a = s.extend(&[(0, true)]).unwrap();
        assert_eq!(a.0, vec![true, true, true, false]);
        assert!(s.extend(&[(0, true), (3, true)]).is_none());
        assert!(s.consistent(&[(3, true)]));
        // the trail is fully undone between queries
        assert_eq!(s.extend(&[]).unwrap(), Assignment::zeros(4));
    }

    #[test]
    fn projection_relative_to_the_full_presentation() {
        // {0,1} alone is free, but d(2,2) zeroes 2 and with it everything below
        let p = Presentation::new(3, vec![(0, 2), (1, 2)], vec![(2, 2)]);
        let proj = projection(&p, &[0, 1], Backend::Propagation, &Budget::default()).unwrap();
        assert_eq!(proj, vec![Assignment(vec![false, false])]);
        let enumerated = projection(&p, &[0, 1], Backend::Enumeration, &Budget::default()).unwrap();
        assert_eq!(proj, enumerated);
    }
}
