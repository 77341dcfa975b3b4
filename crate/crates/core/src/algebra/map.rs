//! Generator substitutions extended to unital algebra homomorphisms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::gen::Gen;
use super::poly::{Poly, Word};

/// A substitution `g ↦ p`. Generators without an assignment are fixed.
///
/// Identity assignments are dropped on insertion, so two maps that act the
/// same way on every generator compare equal.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct AlgebraMap {
    assignments: BTreeMap<Gen, Poly>,
}

impl AlgebraMap {
    pub fn identity() -> AlgebraMap {
        AlgebraMap::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Gen, Poly)>) -> AlgebraMap {
        let mut m = AlgebraMap::identity();
        for (g, p) in pairs {
            m.set(g, p);
        }
        m
    }

    pub fn set(&mut self, g: Gen, image: Poly) {
        if image == Poly::gen(g) {
            self.assignments.remove(&g);
        } else {
            self.assignments.insert(g, image);
        }
    }

    pub fn is_identity(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Generators with a non-identity image.
    pub fn moved(&self) -> impl Iterator<Item = Gen> + '_ {
        self.assignments.keys().copied()
    }

    pub fn assignments(&self) -> impl Iterator<Item = (Gen, &Poly)> + '_ {
        self.assignments.iter().map(|(g, p)| (*g, p))
    }

    pub fn image(&self, g: Gen) -> Poly {
        self.assignments.get(&g).cloned().unwrap_or_else(|| Poly::gen(g))
    }

    pub fn moves(&self, g: Gen) -> bool {
        self.assignments.contains_key(&g)
    }

    pub fn apply_word(&self, w: &Word) -> Poly {
        let mut acc = Poly::one();
        let mut run: Vec<Gen> = Vec::new();
        for &g in w.letters() {
            match self.assignments.get(&g) {
                None => run.push(g),
                Some(img) => {
                    if !run.is_empty() {
                        acc = acc.mul_ref(&Poly::from_word(Word::from_letters(run.drain(..))));
                    }
                    acc = acc.mul_ref(img);
                    if acc.is_zero() {
                        return acc;
                    }
                }
            }
        }
        if !run.is_empty() {
            acc = acc.mul_ref(&Poly::from_word(Word::from_letters(run)));
        }
        acc
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        if self.is_identity() {
            return p.clone();
        }
        let mut out = Poly::zero();
        for w in p.words() {
            out.add_assign_ref(&self.apply_word(w));
        }
        out
    }

    /// `outer ∘ inner`: first `inner`, then `outer`.
    pub fn compose(outer: &AlgebraMap, inner: &AlgebraMap) -> AlgebraMap {
        let keys: BTreeSet<Gen> = outer.moved().chain(inner.moved()).collect();
        AlgebraMap::from_pairs(keys.into_iter().map(|g| (g, outer.apply(&inner.image(g)))))
    }

    /// `self` composed with itself `k` times (`k = 0` is the identity).
    pub fn power(&self, k: u32) -> AlgebraMap {
        let mut out = AlgebraMap::identity();
        for _ in 0..k {
            out = AlgebraMap::compose(self, &out);
        }
        out
    }

    /// Every generator mentioned by the map, as a key or inside an image.
    pub fn mentioned(&self) -> BTreeSet<Gen> {
        let mut out: BTreeSet<Gen> = self.moved().collect();
        for p in self.assignments.values() {
            out.extend(p.letters());
        }
        out
    }

    /// Assignments in name order, for output.
    pub fn sorted_assignments(&self) -> Vec<(Gen, &Poly)> {
        let mut v: Vec<(Gen, &Poly)> = self.assignments().collect();
        v.sort_by(|a, b| a.0.cmp_by_name(b.0));
        v
    }
}

impl fmt::Debug for AlgebraMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (g, p) in self.sorted_assignments() {
            m.entry(&g.name(), &p.to_string());
        }
        m.finish()
    }
}
