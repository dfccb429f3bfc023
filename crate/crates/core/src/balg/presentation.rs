use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::lmodel::GenModel;
use crate::text::ParseError;

/// Generators `0..gens` with `≤` and disjointness relations; the algebra is
/// generated freely except for these relations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Presentation {
    gens: usize,
    leq: Vec<(usize, usize)>,
    dis: Vec<(usize, usize)>,
    blocks: BTreeSet<(usize, usize)>,
}

impl Presentation {
    pub fn free(gens: usize) -> Self {
        Presentation {
            gens,
            ..Default::default()
        }
    }

    pub fn new(gens: usize, leq: Vec<(usize, usize)>, dis: Vec<(usize, usize)>) -> Self {
        let mut p = Presentation::free(gens);
        for (x, y) in leq {
            p.add_leq(x, y);
        }
        for (x, y) in dis {
            p.add_dis(x, y);
        }
        p
    }

    pub fn from_model(m: &GenModel) -> Self {
        let mut p = Presentation::free(m.size());
        p.leq = m.leq_pairs().collect();
        p.dis = m.dis_pairs().collect();
        p.blocks = m.block_labels().collect();
        p
    }

    pub fn from_text(input: &str) -> Result<Self, ParseError> {
        GenModel::from_text(input).map(|m| Presentation::from_model(&m))
    }

    pub fn to_model(&self) -> GenModel {
        let mut m = GenModel::new(self.gens);
        for &(x, y) in &self.leq {
            m.add_leq(x, y);
        }
        for &(x, y) in &self.dis {
            m.add_dis(x, y);
        }
        for &(x, b) in &self.blocks {
            m.add_block(x, b);
        }
        m
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn leq(&self) -> &[(usize, usize)] {
        &self.leq
    }

    pub fn dis(&self) -> &[(usize, usize)] {
        &self.dis
    }

    /// `(generator, block)` labels.
    pub fn block_labels(&self) -> &BTreeSet<(usize, usize)> {
        &self.blocks
    }

    /// Members of each block, keyed by block label.
    pub fn blocks(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = Default::default();
        for &(x, b) in &self.blocks {
            out.entry(b).or_default().push(x);
        }
        out
    }

    pub fn add_leq(&mut self, x: usize, y: usize) {
        assert!(x < self.gens && y < self.gens, "generator out of range");
        if x != y && !self.leq.contains(&(x, y)) {
            self.leq.push((x, y));
        }
    }

    pub fn add_dis(&mut self, x: usize, y: usize) {
        assert!(x < self.gens && y < self.gens, "generator out of range");
        let pair = (x.min(y), x.max(y));
        if !self.dis.contains(&pair) {
            self.dis.push(pair);
        }
    }

    pub fn add_block(&mut self, x: usize, block: usize) {
        assert!(x < self.gens, "generator out of range");
        self.blocks.insert((x, block));
    }

    /// Appends a fresh generator and returns its index.
    pub fn add_generator(&mut self) -> usize {
        self.gens += 1;
        self.gens - 1
    }

    pub fn relation_count(&self) -> usize {
        self.leq.len() + self.dis.len()
    }

    /// Copy without relation number `index` (leq relations first, then dis).
    pub fn without_relation(&self, index: usize) -> Presentation {
        let mut p = self.clone();
        if index < p.leq.len() {
            p.leq.remove(index);
        } else {
            p.dis.remove(index - p.leq.len());
        }
        p
    }

    /// Relational sanity: no `d(x,x)` and no pair both `≤` and `d`.
    pub fn sanity_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &(x, y) in &self.dis {
            if x == y {
                out.push(format!("d({x},{x}) is reflexive"));
            } else if self.leq.contains(&(x, y)) || self.leq.contains(&(y, x)) {
                out.push(format!("({x},{y}) is both ≤ and d"));
            }
        }
        out
    }
}

/// A 0/1 valuation of the generators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn zeros(gens: usize) -> Self {
        Assignment(vec![false; gens])
    }

    pub fn from_mask(gens: usize, mask: u64) -> Self {
        Assignment((0..gens).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn get(&self, g: usize) -> bool {
        self.0[g]
    }

    /// Monotone along `≤` and never `1` on both ends of a `d` pair.
    pub fn satisfies(&self, p: &Presentation) -> bool {
        self.0.len() == p.gens()
            && p.leq().iter().all(|&(x, y)| !self.0[x] || self.0[y])
            && p.dis().iter().all(|&(x, y)| !(self.0[x] && self.0[y]))
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn project(&self, onto: &[usize]) -> Assignment {
        Assignment(onto.iter().map(|&g| self.0[g]).collect())
    }
}
