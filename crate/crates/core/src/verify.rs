//! Reproduction harness behind `legch verify`: each check recomputes a table
//! from the builders and compares it with a separate computation.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{AlgebraMap, Gen, Poly, Word};
use crate::dga::{Dga, Generator};
use crate::error::Result;
use crate::holonomy::{holonomy, kalman_monodromy_with, run_script, KalmanLabels, Mode, MoveEvent, MoveScript};
use crate::knots::{connect_sum, is_even_delta_class, path_matrix, summand_prefix, tangle_from_knot, torus_knot_dga};
use crate::obstruction::{family_instance, tau_parity_certificate, verdict};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub detail: Vec<String>,
    pub millis: u128,
}

impl CheckResult {
    fn finish(name: &str, cases: usize, failures: Vec<String>, start: Instant) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            passed: failures.is_empty(),
            cases,
            detail: failures,
            millis: start.elapsed().as_millis(),
        }
    }

    pub fn elapsed(&self) -> Duration {
        Duration::from_millis(self.millis as u64)
    }
}

fn g(s: &str) -> Gen {
    Gen::new(s).expect("valid name")
}

fn fib(n: u32) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

/// Multisets of size 1..=max_size drawn from `pool`, each as a sorted list.
pub fn multisets(pool: &[u32], max_size: usize) -> Vec<Vec<u32>> {
    fn go(pool: &[u32], start: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            go(pool, i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, 0, max_size, &mut Vec::new(), &mut out);
    out
}

pub fn trefoil() -> CheckResult {
    let start = Instant::now();
    let mut bad = Vec::new();
    let m = path_matrix(3).expect("n >= 1");
    let expected = [
        ((1, 1), "b1 + b3 + b1 b2 b3"),
        ((1, 2), "1 + b1 b2"),
        ((2, 1), "1 + b2 b3"),
        ((2, 2), "b2"),
    ];
    for ((i, j), text) in expected {
        if m.entry(i, j).to_string() != text {
            bad.push(format!("B{i}{j} = {} (expected {text})", m.entry(i, j)));
        }
    }
    let t = torus_knot_dga(3).expect("n = 3");
    for (c, text) in [("a1", "1 + b1 + b3 + b1 b2 b3"), ("a2", "b2 + b1 b2 + b2 b3 + b2 b3 b1 b2")] {
        if t.differential(g(c)).to_string() != text {
            bad.push(format!("∂{c} = {} (expected {text})", t.differential(g(c))));
        }
    }
    CheckResult::finish("trefoil", 6, bad, start)
}

pub fn fibonacci(max_n: u32) -> CheckResult {
    let start = Instant::now();
    let bad: Vec<String> = (1..=max_n)
        .into_par_iter()
        .filter_map(|n| {
            let (a, b, c, d) = path_matrix(n).expect("n >= 1").lengths();
            let got = [a as u128, b as u128, c as u128, d as u128];
            let want = [fib(n + 1), fib(n), fib(n), fib(n - 1)];
            (got != want).then(|| format!("n = {n}: lengths {got:?}, expected {want:?}"))
        })
        .collect();
    CheckResult::finish("fibonacci", max_n as usize, bad, start)
}

pub fn even_class(max_n: u32) -> CheckResult {
    let start = Instant::now();
    let ns: Vec<u32> = (3..=max_n).step_by(2).collect();
    let bad: Vec<String> = ns
        .par_iter()
        .filter_map(|&n| {
            let r = torus_knot_dga(n).and_then(|d| is_even_delta_class(&d));
            match r {
                Ok((even, _)) if even == (n % 3 != 2) => None,
                Ok((even, _)) => Some(format!("n = {n}: classified {even}")),
                Err(e) => Some(format!("n = {n}: {e}")),
            }
        })
        .collect();
    CheckResult::finish("even_class", ns.len(), bad, start)
}

fn sum_case(summands: &[u32]) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    let a2 = g("a2");
    let mut tangles = Vec::new();
    let mut product_length: u128 = 1;
    for (i, &n) in summands.iter().enumerate() {
        let t = tangle_from_knot(&torus_knot_dga(n)?, a2, &summand_prefix(i))?;
        product_length *= t.word.length() as u128;
        tangles.push(t);
    }
    let sum = connect_sum(&tangles, "a")?;
    let expected = &Poly::one() + &Poly::from_word(Word::from_letters(tangles.iter().map(|t| t.word_name())));
    if sum.differential(g("a")) != &expected {
        bad.push(format!("{summands:?}: ∂a = {}", sum.differential(g("a"))));
    }
    for t in &tangles {
        if sum.abbreviations().get(t.word_name()) != Some(&t.word) {
            bad.push(format!("{summands:?}: {} is not the tangle word", t.word_name()));
        }
    }
    let length = sum.length(sum.differential(g("a")))?;
    if length != product_length - 1 || length % 2 != 0 {
        bad.push(format!("{summands:?}: ℓ(∂a) = {length}, expected {}", product_length - 1));
    }
    for (i, &n) in summands.iter().enumerate() {
        let prefix = summand_prefix(i);
        let knot = torus_knot_dga(n)?;
        let inner = knot.differential(g("a1")).prefixed(&prefix);
        if sum.differential(g("a1").prefixed(&prefix)) != &inner {
            bad.push(format!("{summands:?}: internal differential of {prefix}.a1 changed"));
        }
    }
    let report = sum.check_dga();
    if !report.is_valid() {
        bad.push(format!("{summands:?}: {:?}", report.violations));
    }
    Ok(bad)
}

pub fn sums() -> CheckResult {
    let start = Instant::now();
    let cases = multisets(&[3, 7, 9], 3);
    let bad: Vec<String> = cases
        .par_iter()
        .flat_map(|s| sum_case(s).unwrap_or_else(|e| vec![format!("{s:?}: {e}")]))
        .collect();
    CheckResult::finish("connected_sums", cases.len(), bad, start)
}

fn word_length(summands: &[u32]) -> Result<u128> {
    let mut l = 1u128;
    for &n in summands {
        l *= tangle_from_knot(&torus_knot_dga(n)?, g("a2"), "k")?.word.length() as u128;
    }
    Ok(l)
}

fn certificate_case(summands: &[u32]) -> Result<Vec<String>> {
    let inst = family_instance(summands)?;
    let l = word_length(summands)?;
    let (ok, report) = tau_parity_certificate(&inst.dga, g("b3"))?;
    let tau = |c: &str| report.entries.iter().find(|e| e.generator == c).map(|e| e.tau);
    let mut bad = Vec::new();
    if tau("a1") != Some(2) {
        bad.push(format!("{summands:?}: τ(∂a1) = {:?}", tau("a1")));
    }
    if tau("a") != Some(2 * l) {
        bad.push(format!("{summands:?}: τ(∂a) = {:?}, expected {}", tau("a"), 2 * l));
    }
    if !ok {
        bad.push(format!("{summands:?}: certificate fails"));
    }
    Ok(bad)
}

pub fn certificate() -> CheckResult {
    let start = Instant::now();
    let cases = multisets(&[3, 7, 9], 3);
    let bad: Vec<String> = cases
        .par_iter()
        .flat_map(|s| certificate_case(s).unwrap_or_else(|e| vec![format!("{s:?}: {e}")]))
        .collect();
    CheckResult::finish("tau_certificate", cases.len(), bad, start)
}

fn verdict_case(summands: &[u32]) -> Result<Vec<String>> {
    let inst = family_instance(summands)?;
    let l = word_length(summands)?;
    let mut bad = Vec::new();
    for j in 1..=3 {
        let mu = kalman_monodromy_with(&inst.fly_word, j, &KalmanLabels::default())?;
        let v = verdict(&inst.dga, &mu, g("b3"), g("b3"))?;
        let want = match j {
            1 => Some(1),
            3 => Some(2 * l * l + 1),
            _ => None,
        };
        if v.tau_value % 2 != 1 || want.is_some_and(|w| w != v.tau_value) {
            bad.push(format!("{summands:?}, j = {j}: τ = {}, expected {want:?}", v.tau_value));
        }
    }
    Ok(bad)
}

pub fn verdicts() -> CheckResult {
    let start = Instant::now();
    let cases = multisets(&[3, 7, 9], 3);
    let bad: Vec<String> = cases
        .par_iter()
        .flat_map(|s| verdict_case(s).unwrap_or_else(|e| vec![format!("{s:?}: {e}")]))
        .collect();
    CheckResult::finish("monodromy_verdicts", cases.len() * 3, bad, start)
}

fn random_word(rng: &mut StdRng, letters: &[Gen], max_len: usize) -> Word {
    let n = rng.gen_range(0..=max_len);
    Word::from_letters((0..n).map(|_| letters[rng.gen_range(0..letters.len())]))
}

pub fn random_poly(rng: &mut StdRng, letters: &[Gen], max_words: usize, max_len: usize) -> Poly {
    let n = rng.gen_range(0..=max_words);
    Poly::from_words((0..n).map(|_| random_word(rng, letters, max_len)))
}

pub fn random_map(rng: &mut StdRng, letters: &[Gen]) -> AlgebraMap {
    let mut pairs = Vec::new();
    for &l in letters {
        if rng.gen_bool(0.5) {
            pairs.push((l, random_poly(rng, letters, 3, 2)));
        }
    }
    AlgebraMap::from_pairs(pairs)
}

/// A random formal-mode script starting from `initial`; every event is
/// checked against the running state before it is kept.
pub fn random_formal_script(rng: &mut StdRng, initial: &Dga, events: usize, fresh: &mut u32) -> MoveScript {
    let mut state = initial.clone();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < events && tries < events * 20 {
        tries += 1;
        let names: Vec<Gen> = state.generators().iter().map(|g| g.name).collect();
        let pick = |rng: &mut StdRng| names[rng.gen_range(0..names.len())];
        let event = match rng.gen_range(0..5) {
            0 => MoveEvent::RIIIa,
            1 if names.len() >= 2 => {
                let x = pick(rng);
                let (y, z) = (pick(rng), pick(rng));
                MoveEvent::RIIIb { x, y, z }
            }
            2 if !names.is_empty() => {
                let mut shuffled = names.clone();
                shuffled.shuffle(rng);
                MoveEvent::Relabel { perm: names.iter().copied().zip(shuffled).collect() }
            }
            3 => {
                *fresh += 1;
                let x = g(&format!("p{fresh}"));
                let y = g(&format!("q{fresh}"));
                let w = random_poly(rng, &names, 2, 2);
                let dx = &Poly::gen(y) + &w;
                MoveEvent::RII {
                    x: Generator::new(x, 1),
                    y: Generator::new(y, 0),
                    differentials: BTreeMap::from([(x, dx)]),
                }
            }
            _ => {
                let candidates: Vec<(Gen, Gen)> = names
                    .iter()
                    .flat_map(|&x| {
                        state
                            .differential(x)
                            .words()
                            .filter(|w| w.len() == 1)
                            .map(move |w| (x, w.letters()[0]))
                            .collect::<Vec<_>>()
                    })
                    .collect();
                if candidates.is_empty() {
                    continue;
                }
                let (x, y) = candidates[rng.gen_range(0..candidates.len())];
                MoveEvent::RIIInv { x, y }
            }
        };
        if let Ok(step) = holonomy(&event, &state, Mode::Formal, out.len()) {
            state = step.state;
            out.push(event);
        }
    }
    MoveScript { initial: initial.clone(), events: out, mode: Mode::Formal }
}

/// Small DGA used as the starting point for random scripts.
pub fn script_seed_dga() -> Dga {
    let gens = ["u1", "u2", "u3", "u4"].map(|n| Generator::new(g(n), 0));
    let mut generators = gens.to_vec();
    generators.push(Generator::new(g("c1"), 1));
    Dga::new(generators, [(g("c1"), "1 + u1 u2 + u3".parse().expect("valid"))], true).expect("valid")
}

fn restrict(m: &AlgebraMap, to: &Dga) -> AlgebraMap {
    AlgebraMap::from_pairs(to.generators().iter().map(|g| (g.name, m.image(g.name))))
}

/// run(s₁ ++ s₂) = run(s₂) ∘ run(s₁) for one random pair.
pub fn concatenation_case(rng: &mut StdRng) -> Result<Option<String>> {
    let mut fresh = 0;
    let seed = script_seed_dga();
    let s1 = random_formal_script(rng, &seed, 6, &mut fresh);
    let m1 = run_script(&s1)?;
    let s2 = random_formal_script(rng, &m1.final_state, 6, &mut fresh);
    let m2 = run_script(&s2)?;
    let joined = MoveScript {
        initial: seed.clone(),
        events: s1.events.iter().chain(&s2.events).cloned().collect(),
        mode: Mode::Formal,
    };
    let whole = run_script(&joined)?.map;
    let composed = restrict(&AlgebraMap::compose(&m2.map, &m1.map), &seed);
    Ok((whole != composed).then(|| format!("{:?} vs {:?}", whole, composed)))
}

pub fn holonomy_rules(scripts: usize, seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut bad = Vec::new();
    let p = |s: &str| -> Poly { s.parse().expect("valid") };
    let base = Dga::new(
        vec![
            Generator::new(g("x"), 1),
            Generator::new(g("y"), 0),
            Generator::new(g("z"), 0),
            Generator::new(g("w"), 0),
        ],
        [(g("x"), p("y + z w"))],
        true,
    )
    .expect("valid");
    match holonomy(&MoveEvent::RIIInv { x: g("x"), y: g("y") }, &base, Mode::Verified, 0) {
        Ok(s) if s.map == AlgebraMap::from_pairs([(g("x"), Poly::zero()), (g("y"), p("z w"))]) => {}
        other => bad.push(format!("RIIInv: {other:?}")),
    }
    match holonomy(&MoveEvent::RIIIb { x: g("y"), y: g("z"), z: g("w") }, &base, Mode::Formal, 0) {
        Ok(s) if s.map == AlgebraMap::from_pairs([(g("y"), p("y + w z"))]) => {}
        other => bad.push(format!("RIIIb: {other:?}")),
    }
    match holonomy(&MoveEvent::RIIIa, &base, Mode::Verified, 0) {
        Ok(s) if s.map.is_identity() => {}
        other => bad.push(format!("RIIIa: {other:?}")),
    }
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..scripts {
        match concatenation_case(&mut rng) {
            Ok(None) => {}
            Ok(Some(msg)) => bad.push(format!("script pair {i}: {msg}")),
            Err(e) => bad.push(format!("script pair {i}: {e}")),
        }
    }
    CheckResult::finish("holonomy_rules", scripts + 3, bad, start)
}

fn letters(names: &[&str]) -> Vec<Gen> {
    names.iter().map(|n| g(n)).collect()
}

pub fn properties(cases: usize, seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut rng = StdRng::seed_from_u64(seed);
    let alphabet = letters(&["p1", "p2", "p3", "p4"]);
    for i in 0..cases {
        let a = random_poly(&mut rng, &alphabet, 4, 3);
        let b = random_poly(&mut rng, &alphabet, 4, 3);
        let c = random_poly(&mut rng, &alphabet, 4, 3);
        let ring = (&a + &a).is_zero()
            && &Poly::one() * &a == a
            && &a * &Poly::one() == a
            && &(&a * &b) * &c == &a * &(&b * &c)
            && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
            && &(&a + &b) * &c == &(&a * &c) + &(&b * &c);
        if !ring {
            bad.push(format!("ring axioms, case {i}: {a} / {b} / {c}"));
        }
        let m = random_map(&mut rng, &alphabet);
        let n = random_map(&mut rng, &alphabet);
        let hom = m.apply(&(&a * &b)) == &m.apply(&a) * &m.apply(&b)
            && m.apply(&(&a + &b)) == &m.apply(&a) + &m.apply(&b)
            && AlgebraMap::compose(&m, &n).apply(&a) == m.apply(&n.apply(&a));
        if !hom {
            bad.push(format!("map laws, case {i}"));
        }
    }
    for i in 0..cases {
        let q = |rng: &mut StdRng| BigRational::new(rng.gen_range(1..=50i64).into(), 50i64.into());
        let h = BigRational::from_integer(rng.gen_range(1..=1000i64).into());
        let d = Dga::new(vec![Generator::new(g("c"), 0).with_height(h)], [], true).expect("valid");
        let (u, v) = (q(&mut rng), q(&mut rng));
        let ok = matches!(
            (d.shrink(&u).and_then(|x| x.shrink(&v)), d.shrink(&(&u * &v))),
            (Ok(a), Ok(b)) if a == b
        );
        if !ok {
            bad.push(format!("shrink composition, case {i}: u = {u}, v = {v}"));
        }
    }
    match family_instance(&[3]) {
        Ok(inst) => {
            let base = verdict_for(&inst.dga, &inst.fly_word, &KalmanLabels::default());
            for i in 0..cases {
                let tag: u32 = rng.gen_range(0..1_000_000);
                let marker = g("b3");
                let rename = move |x: Gen| if x == marker { x } else { g(&format!("r{tag}_{}", x.name().replace('.', "_"))) };
                let renamed = inst.dga.renamed(rename);
                let labels = KalmanLabels { b1: rename(g("b1")), b2: rename(g("b2")), b3: marker };
                let other = renamed.map(|d| verdict_for(&d, &inst.fly_word.rename(rename), &labels));
                match (&base, other) {
                    (Ok(a), Ok(Ok(b))) if a == &b => {}
                    (a, b) => bad.push(format!("renaming invariance, case {i}: {a:?} vs {b:?}")),
                }
            }
        }
        Err(e) => bad.push(format!("renaming invariance: {e}")),
    }
    CheckResult::finish("properties", cases * 4, bad, start)
}

fn verdict_for(dga: &Dga, fly_word: &Poly, labels: &KalmanLabels) -> Result<Vec<u128>> {
    (1..=3)
        .map(|j| {
            let mu = kalman_monodromy_with(fly_word, j, labels)?;
            Ok(verdict(dga, &mu, labels.b3, labels.b3)?.tau_value)
        })
        .collect()
}

/// Every check, in order.
pub fn all(property_cases: usize, seed: u64) -> Vec<CheckResult> {
    vec![
        trefoil(),
        fibonacci(20),
        even_class(21),
        sums(),
        certificate(),
        verdicts(),
        holonomy_rules(100, seed),
        properties(property_cases, seed),
    ]
}

pub fn names() -> BTreeSet<&'static str> {
    BTreeSet::from(["trefoil", "fibonacci", "even-class", "sums", "certificate", "verdicts", "holonomy", "properties", "all"])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_count() {
        // C(3+k-1, k) for k = 1, 2, 3
        assert_eq!(multisets(&[3, 7, 9], 3).len(), 3 + 6 + 10);
        assert_eq!(multisets(&[3], 2), vec![vec![3], vec![3, 3]]);
    }

    #[test]
    fn quick_checks_pass() {
        for r in [trefoil(), fibonacci(8), even_class(11), holonomy_rules(5, 1), properties(10, 1)] {
            assert!(r.passed, "{}: {:?}", r.name, r.detail);
        }
    }
}
