//! Words and polynomials of the free unital algebra over Z2.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul};

use super::gen::Gen;

/// A monomial: an ordered sequence of generators. The empty word is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Gen>);

impl Word {
    pub fn unit() -> Word {
        Word(Vec::new())
    }

    pub fn letter(g: Gen) -> Word {
        Word(vec![g])
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Gen>) -> Word {
        Word(letters.into_iter().collect())
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, g: Gen) -> usize {
        self.0.iter().filter(|&&c| c == g).count()
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.0.contains(&g)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn map_letters(&self, f: impl Fn(Gen) -> Gen) -> Word {
        Word(self.0.iter().map(|&g| f(g)).collect())
    }

    /// Canonical order: shorter words first, then lexicographic by name.
    pub fn cmp_canonical(&self, other: &Word) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0) {
                match a.cmp_by_name(*b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// An element of the free algebra over Z2: a finite set of words, each with
/// coefficient 1. The set representation is the minimal expression.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    words: BTreeSet<Word>,
}

impl Poly {
    pub const fn zero() -> Poly {
        Poly { words: BTreeSet::new() }
    }

    pub fn one() -> Poly {
        Poly::from_word(Word::unit())
    }

    pub fn gen(g: Gen) -> Poly {
        Poly::from_word(Word::letter(g))
    }

    pub fn from_word(w: Word) -> Poly {
        let mut words = BTreeSet::new();
        words.insert(w);
        Poly { words }
    }

    /// Sums the given words mod 2 (repeated words cancel in pairs).
    pub fn from_words(words: impl IntoIterator<Item = Word>) -> Poly {
        let mut p = Poly::zero();
        for w in words {
            p.toggle(w);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains(w)
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> + '_ {
        self.words.iter()
    }

    pub fn into_words(self) -> impl Iterator<Item = Word> {
        self.words.into_iter()
    }

    /// Words in canonical (serialization) order.
    pub fn canonical_words(&self) -> Vec<&Word> {
        let mut ws: Vec<&Word> = self.words.iter().collect();
        ws.sort_by(|a, b| a.cmp_canonical(b));
        ws
    }

    /// Adds a single word mod 2.
    pub fn toggle(&mut self, w: Word) {
        if !self.words.remove(&w) {
            self.words.insert(w);
        }
    }

    pub fn add_assign_ref(&mut self, other: &Poly) {
        for w in &other.words {
            if !self.words.remove(w) {
                self.words.insert(w.clone());
            }
        }
    }

    pub fn mul_ref(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for a in &self.words {
            for b in &other.words {
                out.toggle(a.concat(b));
            }
        }
        out
    }

    /// ℓ(p): the number of words.
    pub fn length(&self) -> usize {
        self.words.len()
    }

    /// The largest number of `g` letters in a single word; 0 for the zero polynomial.
    pub fn max_count(&self, g: Gen) -> usize {
        self.words.iter().map(|w| w.count(g)).max().unwrap_or(0)
    }

    /// τ_g(p): how many words carry exactly `max_count(p, g)` letters `g`.
    /// Zero for the zero polynomial.
    pub fn tau(&self, g: Gen) -> usize {
        let m = self.max_count(g);
        self.words.iter().filter(|w| w.count(g) == m).count()
    }

    /// Every generator occurring in some word.
    pub fn letters(&self) -> BTreeSet<Gen> {
        self.words.iter().flat_map(|w| w.letters().iter().copied()).collect()
    }

    pub fn mentions(&self, g: Gen) -> bool {
        self.words.iter().any(|w| w.contains(g))
    }

    pub fn rename(&self, f: impl Fn(Gen) -> Gen) -> Poly {
        Poly::from_words(self.words.iter().map(|w| w.map_letters(&f)))
    }

    pub fn prefixed(&self, prefix: &str) -> Poly {
        if prefix.is_empty() {
            return self.clone();
        }
        self.rename(|g| g.prefixed(prefix))
    }

    /// `p^k`, with `p^0 = 1`.
    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = out.mul_ref(self);
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        if self.words.len() < rhs.words.len() {
            let mut rhs = rhs;
            rhs.add_assign_ref(&self);
            return rhs;
        }
        self.add_assign_ref(&rhs);
        self
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let words = self.words.symmetric_difference(&rhs.words).cloned().collect();
        Poly { words }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_ref(rhs)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        self.mul_ref(&rhs)
    }
}

impl From<Gen> for Poly {
    fn from(g: Gen) -> Poly {
        Poly::gen(g)
    }
}

impl From<Word> for Poly {
    fn from(w: Word) -> Poly {
        Poly::from_word(w)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return f.write_str("0");
        }
        for (i, w) in self.canonical_words().into_iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
