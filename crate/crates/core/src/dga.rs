//! Graded DGA container with the validity checks used throughout: degree drop,
//! d² = 0, action monotonicity, plus height rescaling under shrinking.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::abbrev::{Abbreviations, EXPLICIT_LIMIT};
use crate::algebra::{AlgebraMap, Gen, Poly, Word};
use crate::error::{Error, Result};

/// Reeb chord length.
pub type Height = BigRational;

static ZERO: Poly = Poly::zero();

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: Gen,
    pub degree: i64,
    pub height: Option<Height>,
}

impl Generator {
    pub fn new(name: Gen, degree: i64) -> Generator {
        Generator { name, degree, height: None }
    }

    pub fn with_height(mut self, h: Height) -> Generator {
        self.height = Some(h);
        self
    }
}

/// A Chekanov–Eliashberg style DGA: graded generators, a differential given
/// as data, and optional abbreviations (named degree-homogeneous blocks used
/// inside differentials).
#[derive(Clone, PartialEq, Eq)]
pub struct Dga {
    generators: Vec<Generator>,
    index: HashMap<Gen, usize>,
    differential: BTreeMap<Gen, Poly>,
    abbreviations: Abbreviations,
    abbrev_degrees: HashMap<Gen, i64>,
    rotation_zero: bool,
}

impl fmt::Debug for Dga {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Dga");
        for g in &self.generators {
            d.field(&g.name.name(), &format_args!("|{}| ∂ = {}", g.degree, self.differential(g.name)));
        }
        d.finish()
    }
}

impl Dga {
    pub fn new(
        generators: Vec<Generator>,
        differential: impl IntoIterator<Item = (Gen, Poly)>,
        rotation_zero: bool,
    ) -> Result<Dga> {
        Dga::with_abbreviations(generators, differential, Abbreviations::new(), rotation_zero)
    }

    pub fn with_abbreviations(
        generators: Vec<Generator>,
        differential: impl IntoIterator<Item = (Gen, Poly)>,
        abbreviations: Abbreviations,
        rotation_zero: bool,
    ) -> Result<Dga> {
        let mut index = HashMap::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.name, i).is_some() {
                return Err(Error::DuplicateGenerator(g.name.name().to_string()));
            }
            if let Some(h) = &g.height {
                if !h.is_positive() {
                    return Err(Error::NonPositiveHeight(g.name.name().to_string()));
                }
            }
        }
        for (a, def) in abbreviations.iter() {
            if index.contains_key(&a) {
                return Err(Error::AbbreviationCollision(a.name().to_string()));
            }
            for l in def.letters() {
                if !index.contains_key(&l) && !abbreviations.contains(l) {
                    return Err(Error::UnknownGenerator(l.name().to_string()));
                }
            }
        }
        abbreviations.check_acyclic()?;

        let mut diff = BTreeMap::new();
        for (g, p) in differential {
            if !index.contains_key(&g) {
                return Err(Error::UnknownGenerator(g.name().to_string()));
            }
            for l in p.letters() {
                if !index.contains_key(&l) && !abbreviations.contains(l) {
                    return Err(Error::UnknownGenerator(l.name().to_string()));
                }
            }
            if !p.is_zero() {
                diff.insert(g, p);
            }
        }
        let mut dga = Dga {
            generators,
            index,
            differential: diff,
            abbreviations,
            abbrev_degrees: HashMap::new(),
            rotation_zero,
        };
        dga.abbrev_degrees = dga.compute_abbrev_degrees()?;
        Ok(dga)
    }

    fn compute_abbrev_degrees(&self) -> Result<HashMap<Gen, i64>> {
        fn visit(d: &Dga, a: Gen, out: &mut HashMap<Gen, i64>) -> Result<i64> {
            if let Some(&k) = out.get(&a) {
                return Ok(k);
            }
            let mut degree: Option<i64> = None;
            for w in d.abbreviations.get(a).expect("declared").words() {
                let mut k = 0;
                for &l in w.letters() {
                    k += match d.index.get(&l) {
                        Some(&i) => d.generators[i].degree,
                        None => visit(d, l, out)?,
                    };
                }
                match degree {
                    None => degree = Some(k),
                    Some(prev) if prev != k => {
                        return Err(Error::InhomogeneousAbbreviation(a.name().to_string()))
                    }
                    _ => {}
                }
            }
            let k = degree.unwrap_or(0);
            out.insert(a, k);
            Ok(k)
        }
        let mut out = HashMap::new();
        for (a, _) in self.abbreviations.iter() {
            visit(self, a, &mut out)?;
        }
        Ok(out)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, g: Gen) -> Option<&Generator> {
        self.index.get(&g).map(|&i| &self.generators[i])
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.index.contains_key(&g)
    }

    pub fn degree(&self, g: Gen) -> Result<i64> {
        if let Some(gen) = self.generator(g) {
            return Ok(gen.degree);
        }
        self.abbrev_degrees
            .get(&g)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(g.name().to_string()))
    }

    pub fn differential(&self, g: Gen) -> &Poly {
        self.differential.get(&g).unwrap_or(&ZERO)
    }

    pub fn abbreviations(&self) -> &Abbreviations {
        &self.abbreviations
    }

    pub fn rotation_zero(&self) -> bool {
        self.rotation_zero
    }

    pub fn generators_of_degree(&self, k: i64) -> impl Iterator<Item = Gen> + '_ {
        self.generators.iter().filter(move |g| g.degree == k).map(|g| g.name)
    }

    /// Total degree of a word; the unit has degree 0.
    pub fn word_degree(&self, w: &Word) -> Result<i64> {
        w.letters().iter().try_fold(0, |acc, &g| Ok(acc + self.degree(g)?))
    }

    /// ℓ of the fully expanded polynomial.
    pub fn length(&self, p: &Poly) -> Result<u128> {
        self.abbreviations.length(p)
    }

    pub fn max_count(&self, p: &Poly, marker: Gen) -> Result<usize> {
        self.abbreviations.max_count(p, marker)
    }

    pub fn tau(&self, p: &Poly, marker: Gen) -> Result<u128> {
        self.abbreviations.tau(p, marker)
    }

    /// ∂ extended to words by the Leibniz rule (signs vanish mod 2).
    /// Abbreviation letters are differentiated through their definitions, so
    /// the result may itself contain abbreviations.
    pub fn d_poly(&self, p: &Poly) -> Poly {
        let mut cache = HashMap::new();
        self.d_poly_cached(p, &mut cache)
    }

    fn d_poly_cached(&self, p: &Poly, cache: &mut HashMap<Gen, Poly>) -> Poly {
        let mut out = Poly::zero();
        for w in p.words() {
            let letters = w.letters();
            for (i, &c) in letters.iter().enumerate() {
                let dc = if self.abbreviations.contains(c) {
                    if !cache.contains_key(&c) {
                        let def = self.abbreviations.get(c).expect("declared").clone();
                        let d = self.d_poly_cached(&def, cache);
                        cache.insert(c, d);
                    }
                    cache[&c].clone()
                } else {
                    self.differential(c).clone()
                };
                if dc.is_zero() {
                    continue;
                }
                let left = Poly::from_word(Word::from_letters(letters[..i].iter().copied()));
                let right = Poly::from_word(Word::from_letters(letters[i + 1..].iter().copied()));
                out.add_assign_ref(&left.mul_ref(&dc).mul_ref(&right));
            }
        }
        out
    }

    /// Largest total height over the words in the expansion of `w`, as an
    /// upper bound (cancellation can only lower it). `None` without heights.
    fn word_height_bound(&self, w: &Word, cache: &mut HashMap<Gen, Option<Height>>) -> Option<Height> {
        let mut total = Height::zero();
        for &l in w.letters() {
            let h = if let Some(g) = self.generator(l) {
                g.height.clone()?
            } else {
                if !cache.contains_key(&l) {
                    let def = self.abbreviations.get(l).expect("declared").clone();
                    let mut best: Option<Height> = None;
                    let mut complete = true;
                    for dw in def.words() {
                        match self.word_height_bound(dw, cache) {
                            Some(h) => best = Some(best.map_or(h.clone(), |b: Height| b.max(h))),
                            None => complete = false,
                        }
                    }
                    cache.insert(l, if complete { Some(best.unwrap_or_else(Height::zero)) } else { None });
                }
                cache[&l].clone()?
            };
            total += h;
        }
        Some(total)
    }

    pub fn check_dga(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if !self.rotation_zero {
            report.violations.push(Violation::RotationNonzero);
        }

        for g in &self.generators {
            for w in self.differential(g.name).canonical_words() {
                match self.word_degree(w) {
                    Ok(k) if k == g.degree - 1 => {}
                    Ok(k) => report.violations.push(Violation::DegreeDrop {
                        generator: g.name.name().to_string(),
                        word: w.to_string(),
                        expected: g.degree - 1,
                        found: k,
                    }),
                    Err(e) => report.skipped.push(e.to_string()),
                }
            }
        }

        let mut dcache = HashMap::new();
        for g in &self.generators {
            let d = self.differential(g.name);
            if d.is_zero() {
                continue;
            }
            let dd = self.d_poly_cached(d, &mut dcache);
            if dd.is_zero() {
                continue;
            }
            match self.abbreviations.expand(&dd, EXPLICIT_LIMIT) {
                Ok(e) if e.is_zero() => {}
                Ok(e) => report.violations.push(Violation::DSquaredNonzero {
                    generator: g.name.name().to_string(),
                    residue: e.to_string(),
                }),
                Err(e) => report
                    .skipped
                    .push(format!("d² of {} undetermined: {e}", g.name)),
            }
        }

        if let Some(missing) = self.generators.iter().find(|g| g.height.is_none()) {
            if self.generators.iter().any(|g| g.height.is_some()) {
                report.skipped.push(format!(
                    "action check skipped: {} has no height",
                    missing.name
                ));
            } else {
                report.skipped.push("action check skipped: no heights".into());
            }
        } else {
            let mut hcache = HashMap::new();
            for g in &self.generators {
                let h = g.height.as_ref().expect("checked above");
                for w in self.differential(g.name).canonical_words() {
                    let bound = self.word_height_bound(w, &mut hcache).expect("all heights present");
                    if &bound < h {
                        continue;
                    }
                    let exact_words = match self.abbreviations.expand(&Poly::from_word(w.clone()), EXPLICIT_LIMIT) {
                        Ok(e) => e,
                        Err(e) => {
                            report.skipped.push(format!("action of {} undetermined: {e}", g.name));
                            continue;
                        }
                    };
                    for ew in exact_words.canonical_words() {
                        let eh = self.word_height_bound(ew, &mut hcache).expect("all heights present");
                        if &eh >= h {
                            report.violations.push(Violation::Action {
                                generator: g.name.name().to_string(),
                                word: ew.to_string(),
                            });
                        }
                    }
                }
            }
        }
        report
    }

    /// Multiplies every height by u², the effect of the contact rescaling
    /// (x, y, z) ↦ (ux, uy, u²z) on Reeb chord lengths.
    pub fn shrink(&self, u: &BigRational) -> Result<Dga> {
        if !u.is_positive() || u > &BigRational::one() {
            return Err(Error::BadShrinkFactor(u.to_string()));
        }
        let factor = u * u;
        let mut out = self.clone();
        for g in &mut out.generators {
            match &mut g.height {
                Some(h) => *h = &*h * &factor,
                None => return Err(Error::MissingHeights(g.name.name().to_string())),
            }
        }
        Ok(out)
    }

    /// Checks that `m` sends each generator to an element of the same degree.
    pub fn apply_endomorphism(&self, m: &AlgebraMap) -> Result<DegreeReport> {
        let mut report = DegreeReport::default();
        for (g, image) in m.sorted_assignments() {
            let gen = self
                .generator(g)
                .ok_or_else(|| Error::UnknownGenerator(g.name().to_string()))?;
            for w in image.canonical_words() {
                let k = self.word_degree(w)?;
                if k != gen.degree {
                    report.violations.push(DegreeViolation {
                        generator: g.name().to_string(),
                        word: w.to_string(),
                        expected: gen.degree,
                        found: k,
                    });
                }
            }
        }
        Ok(report)
    }

    /// Copy with every name (generators and abbreviations) put under `prefix`.
    pub fn prefixed(&self, prefix: &str) -> Dga {
        if prefix.is_empty() {
            return self.clone();
        }
        let generators = self
            .generators
            .iter()
            .map(|g| Generator { name: g.name.prefixed(prefix), ..g.clone() })
            .collect();
        let diff: Vec<(Gen, Poly)> = self
            .differential
            .iter()
            .map(|(g, p)| (g.prefixed(prefix), p.prefixed(prefix)))
            .collect();
        Dga::with_abbreviations(generators, diff, self.abbreviations.prefixed(prefix), self.rotation_zero)
            .expect("prefixing preserves validity")
    }

    /// Copy with every name (generators and abbreviations) sent through `f`,
    /// which must be injective on the names in use.
    pub fn renamed(&self, f: impl Fn(Gen) -> Gen) -> Result<Dga> {
        let generators = self
            .generators
            .iter()
            .map(|g| Generator { name: f(g.name), ..g.clone() })
            .collect();
        let diff: Vec<(Gen, Poly)> = self.differential.iter().map(|(g, p)| (f(*g), p.rename(&f))).collect();
        let abbreviations =
            Abbreviations::from_defs(self.abbreviations.iter().map(|(g, p)| (f(g), p.rename(&f))))?;
        Dga::with_abbreviations(generators, diff, abbreviations, self.rotation_zero)
    }

    /// Inlines every abbreviation.
    pub fn inline_abbreviations(&self, limit: u128) -> Result<Dga> {
        let mut diff = Vec::new();
        for (g, p) in &self.differential {
            diff.push((*g, self.abbreviations.expand(p, limit)?));
        }
        Dga::new(self.generators.clone(), diff, self.rotation_zero)
    }

    pub(crate) fn parts(&self) -> (Vec<Generator>, BTreeMap<Gen, Poly>, Abbreviations) {
        (self.generators.clone(), self.differential.clone(), self.abbreviations.clone())
    }
}

/// |c| = −2r − 1/2 for a capping path of rotation r = (2k+1)/4.
pub fn degree_from_rotation(r: &BigRational) -> Result<i64> {
    let four_r = r * BigRational::from_integer(BigInt::from(4));
    if !four_r.is_integer() || (four_r.to_integer() % 2u8).is_zero() {
        return Err(Error::NotQuarterOdd(r.to_string()));
    }
    let num = -(four_r.to_integer() + 1u8);
    let half: BigInt = num / 2u8;
    i64::try_from(half).map_err(|_| Error::NotQuarterOdd(r.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    RotationNonzero,
    DegreeDrop { generator: String, word: String, expected: i64, found: i64 },
    DSquaredNonzero { generator: String, residue: String },
    Action { generator: String, word: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RotationNonzero => f.write_str("rotation number not flagged zero; grading is not well defined"),
            Violation::DegreeDrop { generator, word, expected, found } => write!(
                f,
                "∂({generator}) contains {word} of degree {found}, expected {expected}"
            ),
            Violation::DSquaredNonzero { generator, residue } => {
                write!(f, "∂∂({generator}) = {residue} ≠ 0")
            }
            Violation::Action { generator, word } => {
                write!(f, "∂({generator}) contains {word}, whose action is not smaller")
            }
        }
    }
}

/// Exhaustive list of invariant violations; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Checks that could not be carried out, with the reason.
    pub skipped: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeViolation {
    pub generator: String,
    pub word: String,
    pub expected: i64,
    pub found: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub violations: Vec<DegreeViolation>,
}

impl DegreeReport {
    pub fn is_degree_preserving(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knots::torus_knot_dga;

    fn g(s: &str) -> Gen {
        Gen::new(s).unwrap()
    }
    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }
    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn word_degrees_in_trefoil() {
        let t = torus_knot_dga(3).unwrap();
        assert_eq!(t.word_degree(&Word::unit()).unwrap(), 0);
        assert_eq!(t.word_degree(&"b1 b2 b3".parse().unwrap()).unwrap(), 0);
        assert_eq!(t.word_degree(&"a1 b2".parse().unwrap()).unwrap(), 1);
        assert!(matches!(
            t.word_degree(&"zz".parse().unwrap()),
            Err(Error::UnknownGenerator(_))
        ));
    }

    #[test]
    fn rotation_to_degree() {
        assert_eq!(degree_from_rotation(&q(-1, 4)).unwrap(), 0);
        assert_eq!(degree_from_rotation(&q(-3, 4)).unwrap(), 1);
        assert_eq!(degree_from_rotation(&q(1, 4)).unwrap(), -1);
        assert!(degree_from_rotation(&q(1, 2)).is_err());
        assert!(degree_from_rotation(&q(1, 3)).is_err());
        let hit: std::collections::BTreeSet<i64> =
            (-10..=10).map(|k| degree_from_rotation(&q(2 * k + 1, 4)).unwrap()).collect();
        assert_eq!(hit.len(), 21);
    }

    #[test]
    fn trefoil_is_valid() {
        let r = torus_knot_dga(3).unwrap().check_dga();
        assert!(r.is_valid(), "{r:?}");
    }

    #[test]
    fn degree_drop_violation() {
        let d = Dga::new(vec![Generator::new(g("a"), 1)], [(g("a"), p("a"))], true).unwrap();
        let r = d.check_dga();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DegreeDrop { generator, found: 1, .. } if generator == "a")));
    }

    #[test]
    fn action_violation() {
        let d = Dga::new(
            vec![
                Generator::new(g("x"), 0).with_height(q(2, 1)),
                Generator::new(g("y"), 1).with_height(q(1, 1)),
            ],
            [(g("y"), p("x"))],
            true,
        )
        .unwrap();
        let r = d.check_dga();
        assert_eq!(
            r.violations,
            vec![Violation::Action { generator: "y".into(), word: "x".into() }]
        );
    }

    #[test]
    fn d_squared_violation() {
        // ∂a = b, ∂b = c with |c| = |a| - 2: ∂∂a = c ≠ 0
        let d = Dga::new(
            vec![Generator::new(g("a"), 2), Generator::new(g("b"), 1), Generator::new(g("c"), 0)],
            [(g("a"), p("b")), (g("b"), p("c"))],
            true,
        )
        .unwrap();
        let r = d.check_dga();
        assert_eq!(
            r.violations,
            vec![Violation::DSquaredNonzero { generator: "a".into(), residue: "c".into() }]
        );
    }

    #[test]
    fn undeclared_letters_are_rejected() {
        let r = Dga::new(vec![Generator::new(g("a"), 1)], [(g("a"), p("zz"))], true);
        assert!(matches!(r, Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn shrink_scales_by_u_squared() {
        let d = Dga::new(vec![Generator::new(g("c"), 0).with_height(q(8, 1))], [], true).unwrap();
        let s = d.shrink(&q(1, 2)).unwrap();
        assert_eq!(s.generator(g("c")).unwrap().height, Some(q(2, 1)));
        assert_eq!(d.shrink(&q(1, 1)).unwrap(), d);
        assert!(d.shrink(&q(0, 1)).is_err());
        assert!(d.shrink(&q(3, 2)).is_err());
        assert!(matches!(torus_knot_dga(3).unwrap().shrink(&q(1, 2)), Err(Error::MissingHeights(_))));
    }

    #[test]
    fn endomorphism_degrees() {
        let t = torus_knot_dga(3).unwrap();
        assert!(t.apply_endomorphism(&AlgebraMap::identity()).unwrap().is_degree_preserving());
        let m = AlgebraMap::from_pairs([(g("b3"), p("b1"))]);
        assert!(t.apply_endomorphism(&m).unwrap().is_degree_preserving());
        let bad = AlgebraMap::from_pairs([(g("b1"), p("a1"))]);
        assert_eq!(t.apply_endomorphism(&bad).unwrap().violations.len(), 1);
        let unknown = AlgebraMap::from_pairs([(g("zz9"), p("b1"))]);
        assert!(t.apply_endomorphism(&unknown).is_err());
    }

    #[test]
    fn rotation_flag_is_reported() {
        let d = Dga::new(vec![], [], false).unwrap();
        assert_eq!(d.check_dga().violations, vec![Violation::RotationNonzero]);
    }
}
