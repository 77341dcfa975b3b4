//! Named abbreviations for large polynomials, and exact word statistics of
//! formal expressions built from them.
//!
//! A connected sum of many tangles has a closure differential `1 + W₁⋯W_k`
//! whose expansion can hold billions of words. Instead of materialising it, a
//! DGA keeps each associated word `Wᵢ` under a name (an abbreviation letter)
//! and writes the closure differential over those names. Word statistics of
//! the *expansion* (ℓ, max, τ) are then computed exactly from profiles:
//!
//! * a letter not occurring inside any abbreviation used by the polynomial is
//!   *exposed*; words with different sequences of exposed letters have
//!   disjoint expansions;
//! * between exposed letters, factors with pairwise disjoint alphabets
//!   factorise uniquely, so the marker-count profile of a word is the
//!   convolution of its factors' profiles;
//! * a bare skeleton word sharing its exposed letters with one such product
//!   overlaps it in at most one word, decided by the augmentation;
//! * anything else is expanded explicitly if small, or else kept as an
//!   interval of possible marker counts. Queries that would depend on such an
//!   interval fail with [`Error::Intractable`] rather than guess.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::algebra::{AlgebraMap, Gen, Poly, Word};
use crate::error::{Error, Result};

/// Upper bound on the number of words an explicit fallback expansion may produce.
pub const EXPLICIT_LIMIT: u128 = 1 << 20;

/// Number of expanded words by multiplicity of the marker letter.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Profile(Vec<u128>);

impl Profile {
    pub fn zero() -> Profile {
        Profile(Vec::new())
    }

    pub fn delta(k: usize) -> Profile {
        let mut v = vec![0; k + 1];
        v[k] = 1;
        Profile(v)
    }

    fn trim(mut self) -> Profile {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn counts(&self) -> &[u128] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Result<u128> {
        self.0
            .iter()
            .try_fold(0u128, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| overflow("length"))
    }

    /// Smallest and largest marker count that occurs.
    pub fn range(&self) -> Option<(usize, usize)> {
        let lo = self.0.iter().position(|&c| c != 0)?;
        Some((lo, self.0.len() - 1))
    }

    fn add(&mut self, other: &Profile) -> Result<()> {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a = a.checked_add(*b).ok_or_else(|| overflow("sum"))?;
        }
        Ok(())
    }

    fn remove_two(&mut self, k: usize) -> Result<()> {
        match self.0.get_mut(k) {
            Some(c) if *c >= 2 => {
                *c -= 2;
                *self = std::mem::take(self).trim();
                Ok(())
            }
            _ => Err(Error::Intractable("inconsistent overlap correction".into())),
        }
    }

    fn convolve(&self, other: &Profile) -> Result<Profile> {
        if self.is_zero() || other.is_zero() {
            return Ok(Profile::zero());
        }
        let mut out = vec![0u128; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                let term = a.checked_mul(b).ok_or_else(|| overflow("product"))?;
                out[i + j] = out[i + j].checked_add(term).ok_or_else(|| overflow("product"))?;
            }
        }
        Ok(Profile(out).trim())
    }

    fn from_poly(p: &Poly, marker: Option<Gen>) -> Profile {
        let mut v: Vec<u128> = Vec::new();
        for w in p.words() {
            let k = marker.map_or(0, |m| w.count(m));
            if v.len() <= k {
                v.resize(k + 1, 0);
            }
            v[k] += 1;
        }
        Profile(v)
    }
}

fn overflow(what: &str) -> Error {
    Error::Intractable(format!("{what} exceeds 128-bit range"))
}

/// Profile of an expansion, split into an exact part and word groups whose
/// exact contribution could not be determined (only their marker range).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Expansion {
    pub exact: Profile,
    pub undetermined: Vec<(usize, usize)>,
}

impl Expansion {
    /// ℓ of the expansion.
    pub fn length(&self) -> Result<u128> {
        if !self.undetermined.is_empty() {
            return Err(Error::Intractable(
                "some word groups overlap and are too large to expand".into(),
            ));
        }
        self.exact.total()
    }

    /// `(max, τ)` for the marker; `(0, 0)` for the zero polynomial.
    pub fn max_and_tau(&self) -> Result<(usize, u128)> {
        match self.exact.range() {
            None if self.undetermined.is_empty() => Ok((0, 0)),
            None => Err(Error::Intractable(
                "all word groups are undetermined".into(),
            )),
            Some((_, top)) => {
                if self.undetermined.iter().any(|&(_, hi)| hi >= top) {
                    return Err(Error::Intractable(format!(
                        "an undetermined word group may reach marker count {top}"
                    )));
                }
                Ok((top, self.exact.0[top]))
            }
        }
    }
}

/// Table of abbreviations: name ↦ defining polynomial. Definitions may use
/// other abbreviations; the reference graph must be acyclic.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Abbreviations {
    defs: BTreeMap<Gen, Poly>,
}

impl Abbreviations {
    pub fn new() -> Abbreviations {
        Abbreviations::default()
    }

    pub fn from_defs(defs: impl IntoIterator<Item = (Gen, Poly)>) -> Result<Abbreviations> {
        let mut out = Abbreviations::new();
        for (name, def) in defs {
            out.insert(name, def)?;
        }
        out.check_acyclic()?;
        Ok(out)
    }

    pub(crate) fn insert(&mut self, name: Gen, def: Poly) -> Result<()> {
        if self.defs.insert(name, def).is_some() {
            return Err(Error::AbbreviationCollision(name.name().to_string()));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.defs.contains_key(&g)
    }

    pub fn get(&self, g: Gen) -> Option<&Poly> {
        self.defs.get(&g)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Gen, &Poly)> + '_ {
        self.defs.iter().map(|(g, p)| (*g, p))
    }

    pub fn sorted(&self) -> Vec<(Gen, &Poly)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| a.0.cmp_by_name(b.0));
        v
    }

    pub fn prefixed(&self, prefix: &str) -> Abbreviations {
        Abbreviations {
            defs: self
                .defs
                .iter()
                .map(|(g, p)| (g.prefixed(prefix), p.prefixed(prefix)))
                .collect(),
        }
    }

    /// Applies `m` inside every definition (names are kept).
    pub fn substitute(&self, m: &AlgebraMap) -> Abbreviations {
        Abbreviations {
            defs: self.defs.iter().map(|(g, p)| (*g, m.apply(p))).collect(),
        }
    }

    pub(crate) fn merge(&mut self, other: &Abbreviations) -> Result<()> {
        for (g, p) in other.iter() {
            self.insert(g, p.clone())?;
        }
        Ok(())
    }

    pub(crate) fn check_acyclic(&self) -> Result<()> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        fn visit(t: &Abbreviations, g: Gen, marks: &mut HashMap<Gen, Mark>) -> Result<()> {
            match marks.get(&g) {
                Some(Mark::Done) => return Ok(()),
                Some(Mark::Active) => return Err(Error::CyclicAbbreviation(g.name().to_string())),
                None => {}
            }
            marks.insert(g, Mark::Active);
            for l in t.defs[&g].letters() {
                if t.contains(l) {
                    visit(t, l, marks)?;
                }
            }
            marks.insert(g, Mark::Done);
            Ok(())
        }
        let mut marks = HashMap::new();
        for &g in self.defs.keys() {
            visit(self, g, &mut marks)?;
        }
        Ok(())
    }

    /// All non-abbreviation letters in the full expansion of abbreviation `g`.
    pub fn alphabet(&self, g: Gen) -> BTreeSet<Gen> {
        Ctx::new(self, None).alphabet(g).as_ref().clone()
    }

    /// Generators occurring anywhere inside some definition.
    pub fn hidden_letters(&self) -> BTreeSet<Gen> {
        let mut ctx = Ctx::new(self, None);
        let mut out = BTreeSet::new();
        for &g in self.defs.keys() {
            out.extend(ctx.alphabet(g).iter().copied());
        }
        out
    }

    /// Whether the expansion of `p` contains the empty word.
    pub fn augmentation(&self, p: &Poly) -> bool {
        Ctx::new(self, None).augmentation(p)
    }

    /// ℓ mod 2 of the expansion of `p`: the image of `p` under the
    /// homomorphism sending every generator to 1. Needs no expansion.
    pub fn length_is_odd(&self, p: &Poly) -> bool {
        fn go(t: &Abbreviations, p: &Poly, memo: &mut HashMap<Gen, bool>) -> bool {
            let mut odd = false;
            for w in p.words() {
                let mut one = true;
                for &l in w.letters() {
                    if let Some(def) = t.defs.get(&l) {
                        let v = match memo.get(&l) {
                            Some(&v) => v,
                            None => {
                                let v = go(t, def, memo);
                                memo.insert(l, v);
                                v
                            }
                        };
                        if !v {
                            one = false;
                            break;
                        }
                    }
                }
                odd ^= one;
            }
            odd
        }
        go(self, p, &mut HashMap::new())
    }

    /// Inlines every abbreviation, refusing results above `limit` words.
    pub fn expand(&self, p: &Poly, limit: u128) -> Result<Poly> {
        Ctx::new(self, None).with_limit(limit).expand(p)
    }

    /// Marker profile of the expansion of `p`.
    pub fn expansion(&self, p: &Poly, marker: Option<Gen>) -> Result<Expansion> {
        Ctx::new(self, marker).expansion(p, marker.is_some())
    }

    pub fn length(&self, p: &Poly) -> Result<u128> {
        if self.is_empty() || !p.letters().iter().any(|&g| self.contains(g)) {
            return Ok(p.length() as u128);
        }
        self.expansion(p, None)?.length()
    }

    pub fn max_count(&self, p: &Poly, marker: Gen) -> Result<usize> {
        Ok(self.expansion(p, Some(marker))?.max_and_tau()?.0)
    }

    pub fn tau(&self, p: &Poly, marker: Gen) -> Result<u128> {
        Ok(self.expansion(p, Some(marker))?.max_and_tau()?.1)
    }
}

#[derive(Clone)]
enum Factor {
    Letter(Gen),
    Abbrev(Gen),
}

/// Per-query memo tables.
struct Ctx<'a> {
    table: &'a Abbreviations,
    marker: Option<Gen>,
    limit: u128,
    alphabets: HashMap<Gen, Rc<BTreeSet<Gen>>>,
    profiles: HashMap<Gen, Rc<Profile>>,
    augs: HashMap<Gen, bool>,
    expanded: HashMap<Gen, Rc<Poly>>,
}

impl<'a> Ctx<'a> {
    fn new(table: &'a Abbreviations, marker: Option<Gen>) -> Ctx<'a> {
        Ctx {
            table,
            marker,
            limit: EXPLICIT_LIMIT,
            alphabets: HashMap::new(),
            profiles: HashMap::new(),
            augs: HashMap::new(),
            expanded: HashMap::new(),
        }
    }

    fn with_limit(mut self, limit: u128) -> Self {
        self.limit = limit;
        self
    }

    fn alphabet(&mut self, g: Gen) -> Rc<BTreeSet<Gen>> {
        if let Some(a) = self.alphabets.get(&g) {
            return a.clone();
        }
        let mut out = BTreeSet::new();
        for l in self.table.defs[&g].letters() {
            if self.table.contains(l) {
                out.extend(self.alphabet(l).iter().copied());
            } else {
                out.insert(l);
            }
        }
        let out = Rc::new(out);
        self.alphabets.insert(g, out.clone());
        out
    }

    fn factor_alphabet(&mut self, f: &Factor) -> Rc<BTreeSet<Gen>> {
        match *f {
            Factor::Letter(g) => Rc::new(BTreeSet::from([g])),
            Factor::Abbrev(g) => self.alphabet(g),
        }
    }

    fn augmentation(&mut self, p: &Poly) -> bool {
        let mut aug = false;
        for w in p.words() {
            let mut all = true;
            for &l in w.letters() {
                if !self.table.contains(l) || !self.abbrev_augmentation(l) {
                    all = false;
                    break;
                }
            }
            aug ^= all;
        }
        aug
    }

    fn abbrev_augmentation(&mut self, g: Gen) -> bool {
        if let Some(&a) = self.augs.get(&g) {
            return a;
        }
        let def = self.table.defs[&g].clone();
        let a = self.augmentation(&def);
        self.augs.insert(g, a);
        a
    }

    fn abbrev_profile(&mut self, g: Gen) -> Result<Rc<Profile>> {
        if let Some(p) = self.profiles.get(&g) {
            return Ok(p.clone());
        }
        let def = self.table.defs[&g].clone();
        let e = self.expansion(&def, false)?;
        if !e.undetermined.is_empty() {
            return Err(Error::Intractable(format!(
                "the expansion of abbreviation {g} cannot be counted exactly"
            )));
        }
        let p = Rc::new(e.exact);
        self.profiles.insert(g, p.clone());
        Ok(p)
    }

    fn factor_profile(&mut self, f: &Factor) -> Result<Rc<Profile>> {
        match *f {
            Factor::Letter(g) => Ok(Rc::new(Profile::delta(usize::from(Some(g) == self.marker)))),
            Factor::Abbrev(g) => self.abbrev_profile(g),
        }
    }

    fn expand_abbrev(&mut self, g: Gen) -> Result<Rc<Poly>> {
        if let Some(p) = self.expanded.get(&g) {
            return Ok(p.clone());
        }
        let def = self.table.defs[&g].clone();
        let p = Rc::new(self.expand(&def)?);
        self.expanded.insert(g, p.clone());
        Ok(p)
    }

    fn expand_word(&mut self, w: &Word) -> Result<Poly> {
        let mut acc = Poly::one();
        let mut run: Vec<Gen> = Vec::new();
        for &l in w.letters() {
            if !self.table.contains(l) {
                run.push(l);
                continue;
            }
            let e = self.expand_abbrev(l)?;
            let bound = (acc.length() as u128).saturating_mul(e.length() as u128);
            if bound > self.limit {
                return Err(Error::Intractable(format!(
                    "explicit expansion would exceed {} words",
                    self.limit
                )));
            }
            if !run.is_empty() {
                acc = acc.mul_ref(&Poly::from_word(Word::from_letters(run.drain(..))));
            }
            acc = acc.mul_ref(&e);
        }
        if !run.is_empty() {
            acc = acc.mul_ref(&Poly::from_word(Word::from_letters(run)));
        }
        Ok(acc)
    }

    fn expand(&mut self, p: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        for w in p.words() {
            out.add_assign_ref(&self.expand_word(w)?);
            if out.length() as u128 > self.limit {
                return Err(Error::Intractable(format!(
                    "explicit expansion would exceed {} words",
                    self.limit
                )));
            }
        }
        Ok(out)
    }

    /// With `lazy`, overlapping groups are expanded only while their marker
    /// range can still reach the maximum; the rest stay undetermined.
    fn expansion(&mut self, p: &Poly, lazy: bool) -> Result<Expansion> {
        let table = self.table;
        let used: Vec<Gen> = p.letters().into_iter().filter(|&g| table.contains(g)).collect();
        if used.is_empty() {
            return Ok(Expansion {
                exact: Profile::from_poly(p, self.marker),
                undetermined: Vec::new(),
            });
        }
        let mut hidden = BTreeSet::new();
        for &a in &used {
            hidden.extend(self.alphabet(a).iter().copied());
        }
        let exposed = |g: Gen| !table.contains(g) && !hidden.contains(&g);

        let mut groups: BTreeMap<Vec<Gen>, Vec<&Word>> = BTreeMap::new();
        for w in p.words() {
            let skeleton: Vec<Gen> = w.letters().iter().copied().filter(|&g| exposed(g)).collect();
            groups.entry(skeleton).or_default().push(w);
        }

        let mut out = Expansion::default();
        let mut deferred: Vec<((usize, usize), u128, Vec<&Word>)> = Vec::new();
        for (skeleton, words) in groups {
            let skeleton_count = self.marker.map_or(0, |m| skeleton.iter().filter(|&&g| g == m).count());
            let analysed: Vec<WordShape> = words
                .iter()
                .map(|w| self.shape(w, &exposed))
                .collect::<Result<_>>()?;
            let live: Vec<&WordShape> = analysed.iter().filter(|s| s.range.is_some()).collect();
            match live.as_slice() {
                [] => {}
                [only] if only.certain => out.exact.add(&self.word_profile(only)?)?,
                [a, b] if (a.pure && b.certain) || (b.pure && a.certain) => {
                    let (_, w) = if a.pure { (a, b) } else { (b, a) };
                    let mut prof = self.word_profile(w)?;
                    prof.add(&Profile::delta(skeleton_count))?;
                    if w.overlaps_skeleton {
                        prof.remove_two(skeleton_count)?;
                    }
                    out.exact.add(&prof)?;
                }
                _ => {
                    let bound = live.iter().try_fold(0u128, |acc, s| acc.checked_add(s.size)).unwrap_or(u128::MAX);
                    let lo = live.iter().filter_map(|s| s.range).map(|r| r.0).min().unwrap_or(0);
                    let hi = live.iter().filter_map(|s| s.range).map(|r| r.1).max().unwrap_or(0);
                    deferred.push(((lo, hi), bound, live.iter().map(|s| s.word).collect()));
                }
            }
        }
        deferred.sort_by(|a, b| b.0 .1.cmp(&a.0 .1));
        for (range, bound, words) in deferred {
            let below_top = out.exact.range().is_some_and(|(_, top)| range.1 < top);
            if bound > self.limit || (lazy && below_top) {
                out.undetermined.push(range);
                continue;
            }
            let mut sum = Poly::zero();
            for w in words {
                sum.add_assign_ref(&self.expand_word(w)?);
            }
            out.exact.add(&Profile::from_poly(&sum, self.marker))?;
        }
        out.exact = out.exact.trim();
        Ok(out)
    }

    fn shape<'w>(&mut self, w: &'w Word, exposed: &impl Fn(Gen) -> bool) -> Result<WordShape<'w>> {
        let mut factors = Vec::new();
        let mut certain = true;
        let mut segment: Vec<Rc<BTreeSet<Gen>>> = Vec::new();
        let mut pure = true;
        let mut overlaps_skeleton = true;
        for &l in w.letters() {
            if exposed(l) {
                segment.clear();
                factors.push(Factor::Letter(l));
                continue;
            }
            pure = false;
            let f = if self.table.contains(l) {
                if !self.abbrev_augmentation(l) {
                    overlaps_skeleton = false;
                }
                Factor::Abbrev(l)
            } else {
                overlaps_skeleton = false;
                Factor::Letter(l)
            };
            let alpha = self.factor_alphabet(&f);
            if segment.iter().any(|s| !s.is_disjoint(&alpha)) {
                certain = false;
            }
            segment.push(alpha);
            factors.push(f);
        }
        let mut range = Some((0usize, 0usize));
        let mut size: u128 = 1;
        for f in &factors {
            let prof = self.factor_profile(f)?;
            match (prof.range(), range) {
                (Some((lo, hi)), Some((a, b))) => range = Some((a + lo, b + hi)),
                _ => range = None,
            }
            size = size.saturating_mul(prof.total()?);
        }
        Ok(WordShape {
            word: w,
            factors,
            certain,
            pure,
            overlaps_skeleton: !pure && overlaps_skeleton,
            range,
            size,
        })
    }

    fn word_profile(&mut self, s: &WordShape) -> Result<Profile> {
        let mut acc = Profile::delta(0);
        for f in &s.factors {
            acc = acc.convolve(&*self.factor_profile(f)?)?;
        }
        Ok(acc)
    }
}

struct WordShape<'w> {
    word: &'w Word,
    factors: Vec<Factor>,
    /// Unique factorisation holds, so the profile is a convolution.
    certain: bool,
    /// Only exposed letters.
    pure: bool,
    /// The bare skeleton word lies in this word's expansion.
    overlaps_skeleton: bool,
    /// Marker range of the expansion; `None` if it expands to zero.
    range: Option<(usize, usize)>,
    size: u128,
}
