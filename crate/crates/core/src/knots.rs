//! Builders for (n,2) torus knots, tangles with their associated words, and
//! connected sums in standard position.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::abbrev::Abbreviations;
use crate::algebra::{validate_prefix, Gen, Poly, Word, NAMESPACE_SEP};
use crate::dga::{Dga, Generator};
use crate::error::{Error, Result};

/// Name of the abbreviation standing for a tangle's word inside a sum.
pub const WORD_ABBREVIATION: &str = "W";

/// Default name of the closure crossing created by [`connect_sum`].
pub const DEFAULT_CLOSURE: &str = "a";

/// 2×2 matrix over the free algebra, indexed `[row][col]` from zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathMatrix {
    pub entries: [[Poly; 2]; 2],
}

impl PathMatrix {
    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i - 1][j - 1]
    }

    pub fn lengths(&self) -> (usize, usize, usize, usize) {
        (
            self.entries[0][0].length(),
            self.entries[0][1].length(),
            self.entries[1][0].length(),
            self.entries[1][1].length(),
        )
    }

    fn mul(&self, rhs: &PathMatrix) -> PathMatrix {
        let e = |i: usize, j: usize| {
            &self.entries[i][0].mul_ref(&rhs.entries[0][j]) + &self.entries[i][1].mul_ref(&rhs.entries[1][j])
        };
        PathMatrix { entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }
}

fn braid_gen(i: u32) -> Gen {
    Gen::new(&format!("b{i}")).expect("valid name")
}

/// Product of the elementary matrices [[bᵢ, 1], [1, 0]] for i = 1..n.
pub fn path_matrix(n: u32) -> Result<PathMatrix> {
    if n == 0 {
        return Err(Error::EmptyBraid);
    }
    let mut m: Option<PathMatrix> = None;
    for i in 1..=n {
        let e = PathMatrix {
            entries: [[Poly::gen(braid_gen(i)), Poly::one()], [Poly::one(), Poly::zero()]],
        };
        m = Some(match m {
            None => e,
            Some(acc) => acc.mul(&e),
        });
    }
    Ok(m.expect("n >= 1"))
}

/// Lengths predicted for `path_matrix(n)`: (F_{n+1}, F_n, F_n, F_{n-1}).
pub fn fibonacci_lengths(n: u32) -> (u128, u128, u128, u128) {
    let (mut prev, mut cur) = (0u128, 1u128); // F_0, F_1
    for _ in 1..n {
        let next = prev + cur;
        prev = cur;
        cur = next;
    }
    // cur = F_n, prev = F_{n-1}
    (prev + cur, cur, cur, prev)
}

/// Largest ℓ(B21)·ℓ(B12) for which ∂a2 is written out word by word.
pub const TORUS_EXPANSION_LIMIT: usize = 1 << 17;

/// Chekanov–Eliashberg DGA of the positive (n,2) torus knot: braid crossings
/// b1..bn in degree 0 and the two kinks a1, a2 in degree 1.
///
/// Past [`TORUS_EXPANSION_LIMIT`] the product in ∂a2 is kept as the
/// abbreviations `B21 B12` instead of being multiplied out.
pub fn torus_knot_dga(n: u32) -> Result<Dga> {
    if n < 3 {
        return Err(Error::TooSmall(n));
    }
    if n.is_multiple_of(2) {
        return Err(Error::EvenParameter(n));
    }
    let m = path_matrix(n)?;
    let mut generators: Vec<Generator> = (1..=n).map(|i| Generator::new(braid_gen(i), 0)).collect();
    let a1 = Gen::new("a1")?;
    let a2 = Gen::new("a2")?;
    generators.push(Generator::new(a1, 1));
    generators.push(Generator::new(a2, 1));
    let d1 = &Poly::one() + m.entry(1, 1);
    let head = &Poly::one() + m.entry(2, 2);
    if m.entry(2, 1).length() * m.entry(1, 2).length() <= TORUS_EXPANSION_LIMIT {
        let d2 = &head + &m.entry(2, 1).mul_ref(m.entry(1, 2));
        return Dga::new(generators, [(a1, d1), (a2, d2)], true);
    }
    let b21 = Gen::new("B21")?;
    let b12 = Gen::new("B12")?;
    let abbreviations = Abbreviations::from_defs([(b21, m.entry(2, 1).clone()), (b12, m.entry(1, 2).clone())])?;
    let d2 = &head + &Poly::from_word(Word::from_letters([b21, b12]));
    Dga::with_abbreviations(generators, [(a1, d1), (a2, d2)], abbreviations, true)
}

/// An open knot: its crossings without the closure, and the associated word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tangle {
    pub internal: Dga,
    pub word: Poly,
    pub prefix: String,
}

impl Tangle {
    /// The trivial tangle, W = 1.
    pub fn empty(prefix: &str) -> Result<Tangle> {
        validate_prefix(prefix)?;
        Ok(Tangle {
            internal: Dga::new(vec![], [], true)?,
            word: Poly::one(),
            prefix: prefix.to_string(),
        })
    }

    pub fn new(internal: Dga, word: Poly, prefix: &str) -> Result<Tangle> {
        validate_prefix(prefix)?;
        for l in word.letters() {
            if !internal.contains(l) && !internal.abbreviations().contains(l) {
                return Err(Error::UnknownGenerator(l.name().to_string()));
            }
        }
        Ok(Tangle { internal, word, prefix: prefix.to_string() })
    }

    /// Name under which this tangle's word is abbreviated in a sum.
    pub fn word_name(&self) -> Gen {
        Gen::new(WORD_ABBREVIATION)
            .expect("valid name")
            .prefixed(&self.prefix)
    }
}

/// Cuts `dga` open at `closure`: W = ∂(closure) + 1, every name put under `prefix`.
pub fn tangle_from_knot(dga: &Dga, closure: Gen, prefix: &str) -> Result<Tangle> {
    validate_prefix(prefix)?;
    let c = dga
        .generator(closure)
        .ok_or_else(|| Error::UnknownGenerator(closure.name().to_string()))?;
    if c.degree != 1 {
        return Err(Error::NotDegreeOne(closure.name().to_string(), c.degree));
    }
    let referenced_by = |by: Gen| Error::ClosureReferenced {
        closure: closure.name().to_string(),
        by: by.name().to_string(),
    };
    for g in dga.generators() {
        if dga.differential(g.name).mentions(closure) {
            return Err(referenced_by(g.name));
        }
    }
    for (a, def) in dga.abbreviations().iter() {
        if def.mentions(closure) {
            return Err(referenced_by(a));
        }
    }

    let (generators, mut differential, abbreviations) = dga.parts();
    let word = &Poly::one() + &differential.remove(&closure).unwrap_or_default();
    let generators: Vec<Generator> = generators.into_iter().filter(|g| g.name != closure).collect();
    let internal = Dga::with_abbreviations(generators, differential, abbreviations, dga.rotation_zero())?;
    Ok(Tangle {
        internal: internal.prefixed(prefix),
        word: word.prefixed(prefix),
        prefix: prefix.to_string(),
    })
}

/// Closes up the ordered concatenation of `tangles` with one fresh degree-1
/// crossing, ∂(closure) = 1 + W₁⋯W_k. Each Wᵢ enters as the abbreviation
/// `<prefix>.W`.
pub fn connect_sum(tangles: &[Tangle], closure: &str) -> Result<Dga> {
    if tangles.is_empty() {
        return Err(Error::EmptyList);
    }
    let closure = Gen::new(closure)?;
    let mut prefixes = HashSet::new();
    for t in tangles {
        if !prefixes.insert(t.prefix.as_str()) {
            return Err(Error::PrefixCollision(t.prefix.clone()));
        }
    }

    let mut seen: BTreeSet<Gen> = BTreeSet::new();
    let mut claim = |g: Gen| -> Result<()> {
        if seen.insert(g) {
            Ok(())
        } else {
            Err(Error::NameCollision(g.name().to_string()))
        }
    };
    let mut generators = Vec::new();
    let mut differential = Vec::new();
    let mut abbreviations = Abbreviations::new();
    let mut product = Poly::one();
    let mut rotation_zero = true;
    for t in tangles {
        let (gens, diff, abbr) = t.internal.parts();
        for g in &gens {
            claim(g.name)?;
        }
        for (a, _) in abbr.iter() {
            claim(a)?;
        }
        let w = t.word_name();
        claim(w)?;
        abbreviations.merge(&abbr)?;
        abbreviations.insert(w, t.word.clone())?;
        generators.extend(gens);
        differential.extend(diff);
        product = product.mul_ref(&Poly::gen(w));
        rotation_zero &= t.internal.rotation_zero();
    }
    claim(closure)?;
    generators.push(Generator::new(closure, 1));
    differential.push((closure, &Poly::one() + &product));
    Dga::with_abbreviations(generators, differential, abbreviations, rotation_zero)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassFailure {
    RotationNonzero,
    OddLength { generator: String },
    NegativeDegree { generator: String, degree: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthEntry {
    pub generator: String,
    /// ℓ(∂c), when the expansion can be counted.
    pub length: Option<u128>,
    pub even: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    /// One entry per degree-1 generator, in name order.
    pub lengths: Vec<LengthEntry>,
    pub failures: Vec<ClassFailure>,
}

/// Even ∂-class test: rotation zero, every degree-1 generator has a
/// differential of even length, and no generator has negative degree.
pub fn is_even_delta_class(dga: &Dga) -> Result<(bool, ClassReport)> {
    let mut report = ClassReport::default();
    if !dga.rotation_zero() {
        report.failures.push(ClassFailure::RotationNonzero);
    }
    let mut gens: Vec<&Generator> = dga.generators().iter().collect();
    gens.sort_by(|a, b| a.name.cmp_by_name(b.name));
    for g in gens {
        if g.degree < 0 {
            report.failures.push(ClassFailure::NegativeDegree {
                generator: g.name.name().to_string(),
                degree: g.degree,
            });
        }
        if g.degree == 1 {
            let d = dga.differential(g.name);
            let even = !dga.abbreviations().length_is_odd(d);
            let length = match dga.length(d) {
                Ok(l) => Some(l),
                Err(Error::Intractable(_)) => None,
                Err(e) => return Err(e),
            };
            report.lengths.push(LengthEntry { generator: g.name.name().to_string(), length, even });
            if !even {
                report.failures.push(ClassFailure::OddLength { generator: g.name.name().to_string() });
            }
        }
    }
    Ok((report.failures.is_empty(), report))
}

/// `k1`, `k2`, ... for summand positions.
pub fn summand_prefix(i: usize) -> String {
    format!("k{}", i + 1)
}

/// Splits `k1.b2` into (`k1`, `b2`); names without a namespace have an empty prefix.
pub fn split_namespace(name: &str) -> (&str, &str) {
    match name.rfind(NAMESPACE_SEP) {
        Some(i) => (&name[..i], &name[i + 1..]),
        None => ("", name),
    }
}
