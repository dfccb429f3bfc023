use serde::Serialize;

use super::presentation::{Assignment, Presentation};
use super::solver::Solver;
use crate::report::{Check, CheckList};

/// True iff `[g] ≠ 0`, i.e. some point sends `g` to 1.
pub fn generator_nonzero(p: &Presentation, g: usize) -> bool {
    Solver::new(p).consistent(&[(g, true)])
}

/// Generators with `[g] = 0`, increasing.
pub fn zero_generators(p: &Presentation) -> Vec<usize> {
    let mut s = Solver::new(p);
    (0..p.gens()).filter(|&g| !s.consistent(&[(g, true)])).collect()
}

/// A point outside `⋃_{g∈F}[g]`. `raised` is the generator sent to 1 to
/// witness it, if one was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub assignment: Assignment,
    pub raised: Option<usize>,
}

fn witness_with(s: &mut Solver, family: &[usize]) -> Option<Witness> {
    let zeros: Vec<(usize, bool)> = family.iter().map(|&g| (g, false)).collect();
    let base = s.extend(&zeros)?;
    let candidates = (0..s.gens()).filter(|w| !family.contains(w));
    let apart: Vec<usize> = candidates
        .clone()
        .filter(|&w| family.iter().all(|&g| s.is_apart(w, g)))
        .collect();
    for w in apart.into_iter().chain(candidates) {
        let mut literals = zeros.clone();
        literals.push((w, true));
        if let Some(assignment) = s.extend(&literals) {
            return Some(Witness {
                assignment,
                raised: Some(w),
            });
        }
    }
    Some(Witness {
        assignment: base,
        raised: None,
    })
}

/// Witness that `⋁F ≠ 1` for a family of generators. Prefers raising a
/// generator `d`-related to all of `F`, then any other generator, then
/// falls back to the least point vanishing on `F`.
pub fn nice_property(p: &Presentation, family: &[usize]) -> Option<Witness> {
    witness_with(&mut Solver::new(p), family)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CAlgebraReport {
    pub checks: CheckList,
    /// Largest `|F|` examined for the nice property.
    pub bound: usize,
    pub families_checked: usize,
}

impl CAlgebraReport {
    pub fn passed(&self) -> bool {
        self.checks.passed()
    }
}

fn first_failure<T>(items: impl IntoIterator<Item = T>, mut bad: impl FnMut(&T) -> Option<String>) -> Option<String> {
    items.into_iter().find_map(|x| bad(&x))
}

/// Checks the generator set of `p` against the definition of a c-algebra:
/// blocks are antichains of pairwise-disjoint nonzero elements, no element
/// lies in two blocks, and every `F` with `1 ≤ |F| ≤ max_family` has the
/// nice property with a witness vanishing on `F`.
pub fn is_c_algebra(p: &Presentation, max_family: usize) -> CAlgebraReport {
    let mut s = Solver::new(p);
    let mut checks = CheckList::default();
    let n = p.gens();
    let blocks = p.blocks();

    let mut label_count = vec![0usize; n];
    for &(x, _) in p.block_labels() {
        label_count[x] += 1;
    }
    let unlabelled = (0..n).find(|&x| label_count[x] == 0);
    checks.push(Check::new(
        "blocks total",
        unlabelled.is_none(),
        unlabelled.map_or(String::new(), |x| format!("generator {x} has no block")),
    ));
    let doubled = (0..n).find(|&x| label_count[x] > 1);
    checks.push(Check::new(
        "one block per generator",
        doubled.is_none(),
        doubled.map_or(String::new(), |x| {
            format!("generator {x} is in {} blocks", label_count[x])
        }),
    ));

    let zero = first_failure(0..n, |&g| (!s.consistent(&[(g, true)])).then(|| format!("[{g}] = 0")));
    checks.push(Check::new(
        "generators nonzero",
        zero.is_none(),
        zero.unwrap_or_default(),
    ));

    let mut disjoint = None;
    let mut antichain = None;
    for (b, members) in &blocks {
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                if disjoint.is_none() && s.consistent(&[(x, true), (y, true)]) {
                    disjoint = Some(format!("block {b}: [{x}] ∧ [{y}] ≠ 0"));
                }
                if antichain.is_none()
                    && (!s.consistent(&[(x, true), (y, false)]) || !s.consistent(&[(y, true), (x, false)]))
                {
                    antichain = Some(format!("block {b}: [{x}] and [{y}] are comparable"));
                }
            }
        }
    }
    checks.push(Check::new(
        "blocks pairwise disjoint",
        disjoint.is_none(),
        disjoint.unwrap_or_default(),
    ));
    checks.push(Check::new(
        "blocks are antichains",
        antichain.is_none(),
        antichain.unwrap_or_default(),
    ));

    let mut shared = None;
    let labelled: Vec<(usize, usize)> = p.block_labels().iter().copied().collect();
    'outer: for (i, &(x, bx)) in labelled.iter().enumerate() {
        for &(y, by) in &labelled[i + 1..] {
            if bx != by && x != y && !s.consistent(&[(x, true), (y, false)]) && !s.consistent(&[(y, true), (x, false)])
            {
                shared = Some(format!("[{x}] = [{y}] lies in blocks {bx} and {by}"));
                break 'outer;
            }
        }
    }
    checks.push(Check::new(
        "blocks disjoint as sets",
        shared.is_none(),
        shared.unwrap_or_default(),
    ));

    let bound = max_family.min(n);
    let mut families_checked = 0;
    let mut nice = None;
    let mut family = Vec::with_capacity(bound);
    for size in 1..=bound {
        combinations(n, size, &mut family, 0, &mut |f| {
            if nice.is_some() {
                return;
            }
            families_checked += 1;
            match witness_with(&mut s, f) {
                None => nice = Some(format!("⋁{f:?} = 1")),
                Some(w) if f.iter().any(|&g| w.assignment.get(g)) => {
                    nice = Some(format!("witness for {f:?} does not vanish on F"))
                }
                Some(_) => {}
            }
        });
    }
    checks.push(Check::new(
        "nice property",
        nice.is_none(),
        nice.unwrap_or_else(|| format!("{families_checked} families with |F| ≤ {bound}")),
    ));

    CAlgebraReport {
        checks,
        bound,
        families_checked,
    }
}

fn combinations(n: usize, size: usize, current: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if current.len() == size {
        visit(current);
        return;
    }
    for x in start..n {
        if n - x < size - current.len() {
            break;
        }
        current.push(x);
        combinations(n, size, current, x + 1, visit);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_generator_squeezed_into_a_disjoint_pair_is_zero() {
        let p = Presentation::new(3, vec![(0, 1), (0, 2)], vec![(1, 2)]);
        assert!(!generator_nonzero(&p, 0));
        assert!(generator_nonzero(&p, 1));
        assert!(generator_nonzero(&Presentation::free(1), 0));
    }

    #[test]
    fn free_generator_witness_is_the_zero_point() {
        let p = Presentation::free(1);
        let w = nice_property(&p, &[0]).unwrap();
        assert_eq!(w.assignment, Assignment::zeros(1));
        assert_eq!(w.raised, None);
    }

    #[test]
    fn witness_prefers_a_disjoint_generator() {
        let p = Presentation::new(3, vec![], vec![(0, 2)]);
        let w = nice_property(&p, &[0]).unwrap();
        assert_eq!(w.raised, Some(2));
        assert_eq!(w.assignment.0, vec![false, false, true]);
    }

    #[test]
    fn single_disjoint_block_is_a_c_algebra() {
        let mut p = Presentation::new(3, vec![], vec![(0, 1), (0, 2), (1, 2)]);
        for x in 0..3 {
            p.add_block(x, 0);
        }
        let report = is_c_algebra(&p, 3);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.families_checked, 7);
    }

    #[test]
    fn comparable_block_members_fail() {
        let mut p = Presentation::new(2, vec![(0, 1)], vec![]);
        p.add_block(0, 0);
        p.add_block(1, 0);
        let report = is_c_algebra(&p, 2);
        assert!(!report.checks.get("blocks are antichains").unwrap().passed);
        assert!(!report.checks.get("blocks pairwise disjoint").unwrap().passed);
    }

    #[test]
    fn missing_and_duplicate_blocks_fail() {
        let mut p = Presentation::free(2);
        p.add_block(0, 0);
        p.add_block(0, 1);
        let report = is_c_algebra(&p, 1);
        assert!(!report.checks.get("blocks total").unwrap().passed);
        assert!(!report.checks.get("one block per generator").unwrap().passed);
    }
}
