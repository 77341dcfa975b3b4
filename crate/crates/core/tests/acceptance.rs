//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::rngs::StdRng;
use rand::SeedableRng;

use legch::dga::Generator;
use legch::holonomy::{holonomy, kalman_monodromy, kalman_monodromy_with, run_script, KalmanLabels, Mode, MoveEvent, MoveScript};
use legch::knots::{connect_sum, is_even_delta_class, path_matrix, summand_prefix, tangle_from_knot, torus_knot_dga};
use legch::obstruction::{family_instance, tau_parity_certificate, verdict, Conclusion};
use legch::verify::{multisets, random_formal_script, script_seed_dga};
use legch::{AlgebraMap, Dga, Gen, Poly, Word};

/// Largest word count the brute-force oracles will expand.
const BRUTE_LIMIT: u128 = 40_000;

struct Outcome {
    failures: Vec<String>,
    notes: String,
}

fn g(s: &str) -> Gen {
    Gen::new(s).unwrap()
}

fn p(s: &str) -> Poly {
    s.parse().unwrap()
}

fn fib(n: u32) -> u128 {
    let mut f = vec![0u128, 1];
    while f.len() <= n as usize + 1 {
        let k = f.len();
        f.push(f[k - 1] + f[k - 2]);
    }
    f[n as usize]
}

/// Explicit words of `q` with every abbreviation of `d` substituted.
fn explicit(d: &Dga, q: &Poly) -> Poly {
    d.abbreviations().expand(q, BRUTE_LIMIT).unwrap()
}

/// (max, τ) by counting the marker in every explicit word.
fn brute_tau(q: &Poly, marker: Gen) -> (usize, u128) {
    let counts: Vec<usize> = q.words().map(|w| w.letters().iter().filter(|&&l| l == marker).count()).collect();
    let max = counts.iter().copied().max().unwrap_or(0);
    (max, counts.iter().filter(|&&c| c == max).count() as u128)
}

fn tangle_lengths(summands: &[u32]) -> Vec<u128> {
    summands
        .iter()
        .map(|&n| {
            tangle_from_knot(&torus_knot_dga(n).unwrap(), g("a2"), "t").unwrap().word.length() as u128
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let expected_entries = [
        ((1, 1), "b1 + b3 + b1 b2 b3"),
        ((1, 2), "1 + b1 b2"),
        ((2, 1), "1 + b2 b3"),
        ((2, 2), "b2"),
    ];
    let expected_diff = [("a1", "1 + b1 + b3 + b1 b2 b3"), ("a2", "b2 + b2 b3 + b1 b2 + b2 b3 b1 b2")];
    let start = Instant::now();
    let m = path_matrix(3).unwrap();
    let t = torus_knot_dga(3).unwrap();
    let entries: Vec<String> = expected_entries.iter().map(|&((i, j), _)| m.entry(i, j).to_string()).collect();
    let diffs: Vec<String> = expected_diff.iter().map(|&(c, _)| t.differential(g(c)).to_string()).collect();
    let elapsed = start.elapsed();
    for (((i, j), want), got) in expected_entries.iter().zip(&entries) {
        let canonical = p(want).to_string();
        if got != &canonical {
            failures.push(format!("B{i}{j} = {got}, expected {canonical}"));
        }
    }
    for ((c, want), got) in expected_diff.iter().zip(&diffs) {
        let canonical = p(want).to_string();
        if got != &canonical {
            failures.push(format!("∂{c} = {got}, expected {canonical}"));
        }
    }
    if elapsed >= Duration::from_millis(1) {
        failures.push(format!("took {elapsed:?}, limit 1 ms"));
    }
    Outcome { failures, notes: format!("{elapsed:?}") }
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let start = Instant::now();
    for n in 1..=20u32 {
        let (a, b, c, d) = path_matrix(n).unwrap().lengths();
        let got = [a as u128, b as u128, c as u128, d as u128];
        let want = [fib(n + 1), fib(n), fib(n), fib(n - 1)];
        if got != want {
            failures.push(format!("n = {n}: {got:?}, expected {want:?}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(10) {
        failures.push(format!("took {elapsed:?}, limit 10 s"));
    }
    Outcome { failures, notes: format!("n = 1..20, {elapsed:?}") }
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    let start = Instant::now();
    let ns: Vec<u32> = (3..=21).step_by(2).collect();
    for &n in &ns {
        let d = torus_knot_dga(n).unwrap();
        let (even, _) = is_even_delta_class(&d).unwrap();
        if even != (n % 3 != 2) {
            failures.push(format!("n = {n}: classified {even}"));
        }
        if n <= 11 {
            // explicit recount of every degree-1 differential
            let brute = d.rotation_zero()
                && d.generators().iter().all(|c| c.degree >= 0)
                && d.generators_of_degree(1).all(|c| explicit(&d, d.differential(c)).length().is_multiple_of(2));
            if brute != even {
                failures.push(format!("n = {n}: explicit count says {brute}"));
            }
        }
    }
    Outcome { failures, notes: format!("{} knots, {:?}", ns.len(), start.elapsed()) }
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let cases = multisets(&[3, 7, 9], 3);
    let start = Instant::now();
    for s in &cases {
        let tangles: Vec<_> = s
            .iter()
            .enumerate()
            .map(|(i, &n)| tangle_from_knot(&torus_knot_dga(n).unwrap(), g("a2"), &summand_prefix(i)).unwrap())
            .collect();
        let sum = connect_sum(&tangles, "a").unwrap();
        let da = sum.differential(g("a"));
        let product_len: u128 = tangle_lengths(s).iter().product();
        if product_len <= BRUTE_LIMIT {
            let mut product = Poly::one();
            for t in &tangles {
                product = &product * &t.word;
            }
            let want = &Poly::one() + &product;
            if explicit(&sum, da) != want {
                failures.push(format!("{s:?}: ∂a differs from 1 + ∏W"));
            }
        } else {
            let letters = Word::from_letters(tangles.iter().map(|t| t.word_name()));
            if da != &(&Poly::one() + &Poly::from_word(letters)) {
                failures.push(format!("{s:?}: ∂a = {da}"));
            }
            for t in &tangles {
                if sum.abbreviations().get(t.word_name()) != Some(&t.word) {
                    failures.push(format!("{s:?}: {} is not the tangle word", t.word_name()));
                }
            }
        }
        let len = sum.length(da).unwrap();
        if len != product_len - 1 || !len.is_multiple_of(2) {
            failures.push(format!("{s:?}: ℓ(∂a) = {len}, product of word lengths {product_len}"));
        }
        for (i, &n) in s.iter().enumerate() {
            let prefix = summand_prefix(i);
            let knot = torus_knot_dga(n).unwrap();
            let c = g("a1").prefixed(&prefix);
            if sum.differential(c) != &knot.differential(g("a1")).prefixed(&prefix) {
                failures.push(format!("{s:?}: ∂{c} changed"));
            }
        }
        let report = sum.check_dga();
        if !report.is_valid() {
            failures.push(format!("{s:?}: {:?}", report.violations));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(5) {
        failures.push(format!("took {elapsed:?}, limit 5 s"));
    }
    Outcome { failures, notes: format!("{} sums, {elapsed:?}", cases.len()) }
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let cases = multisets(&[3, 7, 9], 3);
    let b3 = g("b3");
    let start = Instant::now();
    for s in &cases {
        let inst = family_instance(s).unwrap();
        let fly_len: u128 = tangle_lengths(s).iter().product();
        let (ok, report) = tau_parity_certificate(&inst.dga, b3).unwrap();
        let tau = |c: &str| report.entries.iter().find(|e| e.generator == c).map(|e| e.tau);
        if tau("a1") != Some(2) {
            failures.push(format!("{s:?}: τ(∂a1) = {:?}", tau("a1")));
        }
        if tau("a") != Some(2 * fly_len) {
            failures.push(format!("{s:?}: τ(∂a) = {:?}, expected {}", tau("a"), 2 * fly_len));
        }
        if !ok {
            failures.push(format!("{s:?}: certificate rejected"));
        }
        if 5 * fly_len <= BRUTE_LIMIT {
            let brute = brute_tau(&explicit(&inst.dga, inst.dga.differential(g("a"))), b3).1;
            if brute != 2 * fly_len {
                failures.push(format!("{s:?}: explicit τ(∂a) = {brute}"));
            }
        }
    }
    let brute_a1 = brute_tau(torus_knot_dga(3).unwrap().differential(g("a1")), b3).1;
    if brute_a1 != 2 {
        failures.push(format!("explicit τ(∂a1) = {brute_a1}"));
    }
    Outcome { failures, notes: format!("{} instances, {:?}", cases.len(), start.elapsed()) }
}

/// One pass of the loop built from its defining substitution.
fn one_pass(w: &Poly) -> AlgebraMap {
    let (b1, b2, b3) = (Poly::gen(g("b1")), Poly::gen(g("b2")), Poly::gen(g("b3")));
    AlgebraMap::from_pairs([
        (g("b1"), w + &(&(&b1 * &b2) * w)),
        (g("b2"), &Poly::one() + &(&b2 * &b3)),
        (g("b3"), b1),
    ])
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let cases = multisets(&[3, 7, 9], 3);
    let b3 = g("b3");
    let start = Instant::now();
    for s in &cases {
        let inst = family_instance(s).unwrap();
        let l: u128 = tangle_lengths(s).iter().product();
        let (ok, _) = tau_parity_certificate(&inst.dga, b3).unwrap();
        let mut oracle = AlgebraMap::identity();
        for j in 1..=3u32 {
            oracle = AlgebraMap::compose(&oracle, &one_pass(&inst.fly_word));
            let mu = kalman_monodromy(&inst.fly_word, j).unwrap();
            for x in ["b1", "b2", "b3"] {
                if mu.image(g(x)) != oracle.image(g(x)) {
                    failures.push(format!("{s:?}, j = {j}: μ({x}) disagrees with the composed passes"));
                }
            }
            let v = verdict(&inst.dga, &mu, b3, b3).unwrap();
            if v.tau_value % 2 != 1 {
                failures.push(format!("{s:?}, j = {j}: τ = {} is even", v.tau_value));
            }
            let want = match j {
                1 => Some(1),
                3 => Some(2 * l * l + 1),
                _ => None,
            };
            if want.is_some_and(|w| w != v.tau_value) {
                failures.push(format!("{s:?}, j = {j}: τ = {}, expected {want:?}", v.tau_value));
            }
            if ok != v.certificate_ok || (v.conclusion == Conclusion::Nontrivial) != (ok && v.tau_value % 2 == 1) {
                failures.push(format!("{s:?}, j = {j}: conclusion {:?}", v.conclusion));
            }
            if l * l * 3 <= BRUTE_LIMIT {
                let image = &oracle.apply(&Poly::gen(b3)) + &Poly::gen(b3);
                let (_, brute) = brute_tau(&explicit(&inst.dga, &image), b3);
                if brute != v.tau_value {
                    failures.push(format!("{s:?}, j = {j}: explicit τ = {brute}, engine {}", v.tau_value));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(10) {
        failures.push(format!("took {elapsed:?}, limit 10 s"));
    }
    Outcome { failures, notes: format!("{} flies × 3 powers, {elapsed:?}", cases.len()) }
}

fn restrict(m: &AlgebraMap, to: &Dga) -> AlgebraMap {
    AlgebraMap::from_pairs(to.generators().iter().map(|c| (c.name, m.image(c.name))))
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let start = Instant::now();
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
    .unwrap();

    let death = holonomy(&MoveEvent::RIIInv { x: g("x"), y: g("y") }, &base, Mode::Verified, 0).unwrap();
    if death.map.image(g("x")) != Poly::zero() || death.map.image(g("y")) != p("z w") {
        failures.push(format!("RII⁻¹: {:?}", death.map));
    }
    if death.state.contains(g("x")) || death.state.contains(g("y")) {
        failures.push("RII⁻¹ keeps the cancelled pair".into());
    }

    let triple = holonomy(&MoveEvent::RIIIb { x: g("y"), y: g("z"), z: g("w") }, &base, Mode::Formal, 0).unwrap();
    if triple.map != AlgebraMap::from_pairs([(g("y"), p("y + w z"))]) {
        failures.push(format!("RIII_b: {:?}", triple.map));
    }

    let flat = holonomy(&MoveEvent::RIIIa, &base, Mode::Verified, 0).unwrap();
    if !flat.map.is_identity() || flat.state != base {
        failures.push("RIII_a is not the identity".into());
    }

    let birth = MoveEvent::RII {
        x: Generator::new(g("e1"), 1),
        y: Generator::new(g("e2"), 0),
        differentials: BTreeMap::from([(g("e1"), p("e2"))]),
    };
    let born = holonomy(&birth, &base, Mode::Formal, 0).unwrap();
    if !born.map.is_identity() || !born.state.contains(g("e1")) {
        failures.push("RII birth".into());
    }

    let mut rng = StdRng::seed_from_u64(7);
    let seed = script_seed_dga();
    let mut fresh = 0;
    let mut nonempty = 0;
    for i in 0..100 {
        let s1 = random_formal_script(&mut rng, &seed, 6, &mut fresh);
        let m1 = run_script(&s1).unwrap();
        let s2 = random_formal_script(&mut rng, &m1.final_state, 6, &mut fresh);
        let m2 = run_script(&s2).unwrap();
        if !s1.events.is_empty() && !s2.events.is_empty() {
            nonempty += 1;
        }
        let joined = MoveScript {
            initial: seed.clone(),
            events: s1.events.iter().chain(&s2.events).cloned().collect(),
            mode: Mode::Formal,
        };
        let whole = restrict(&run_script(&joined).unwrap().map, &seed);
        let mut composed = AlgebraMap::identity();
        for c in seed.generators() {
            composed.set(c.name, m2.map.apply(&m1.map.image(c.name)));
        }
        if whole != restrict(&composed, &seed) {
            failures.push(format!("script pair {i}: {whole:?} vs {composed:?}"));
        }
    }
    if nonempty < 90 {
        failures.push(format!("only {nonempty} nontrivial script pairs"));
    }
    Outcome { failures, notes: format!("4 rules, 100 script pairs, {:?}", start.elapsed()) }
}

fn letter() -> impl Strategy<Value = Gen> {
    prop::sample::select(vec!["p1", "p2", "p3", "p4"]).prop_map(g)
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(prop::collection::vec(letter(), 0..4), 0..5).prop_map(|ws| {
        let mut q = Poly::zero();
        for w in ws {
            q.toggle(Word::from_letters(w));
        }
        q
    })
}

fn map() -> impl Strategy<Value = AlgebraMap> {
    prop::collection::vec((letter(), poly()), 0..4).prop_map(AlgebraMap::from_pairs)
}

fn ratio() -> impl Strategy<Value = BigRational> {
    (1i64..=60, 1i64..=60).prop_map(|(a, b)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        BigRational::new(lo.into(), hi.into())
    })
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let start = Instant::now();

    let ring = run_property("ring axioms", (poly(), poly(), poly()), |(a, b, c)| {
        prop_assert!((&a + &a).is_zero());
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &Poly::zero(), a.clone());
        prop_assert_eq!(&Poly::one() * &a, a.clone());
        prop_assert_eq!(&a * &Poly::one(), a.clone());
        prop_assert!((&a * &Poly::zero()).is_zero());
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        Ok(())
    });

    let maps = run_property("map homomorphism", (map(), map(), poly(), poly()), |(m, n, a, b)| {
        prop_assert_eq!(m.apply(&(&a * &b)), &m.apply(&a) * &m.apply(&b));
        prop_assert_eq!(m.apply(&(&a + &b)), &m.apply(&a) + &m.apply(&b));
        prop_assert_eq!(m.apply(&Poly::one()), Poly::one());
        prop_assert_eq!(AlgebraMap::compose(&m, &n).apply(&a), m.apply(&n.apply(&a)));
        prop_assert_eq!(AlgebraMap::identity().apply(&a), a.clone());
        Ok(())
    });

    let shrink = run_property(
        "shrink composition",
        (prop::collection::vec(1i64..=1000, 1..4), ratio(), ratio()),
        |(heights, u, v)| {
            let gens = heights
                .iter()
                .enumerate()
                .map(|(i, &h)| Generator::new(g(&format!("h{i}")), 0).with_height(BigRational::from_integer(h.into())))
                .collect();
            let d = Dga::new(gens, [], true).unwrap();
            let twice = d.shrink(&u).and_then(|x| x.shrink(&v)).unwrap();
            let once = d.shrink(&(&u * &v)).unwrap();
            prop_assert_eq!(&twice, &once);
            for (c, &h) in twice.generators().iter().zip(&heights) {
                let want = BigRational::from_integer(h.into()) * &u * &u * &v * &v;
                prop_assert_eq!(c.height.as_ref(), Some(&want));
            }
            Ok(())
        },
    );

    let inst = family_instance(&[3]).unwrap();
    let b3 = g("b3");
    let baseline: Vec<(u128, Conclusion)> = (1..=3)
        .map(|j| {
            let v = verdict(&inst.dga, &kalman_monodromy(&inst.fly_word, j).unwrap(), b3, b3).unwrap();
            (v.tau_value, v.conclusion)
        })
        .collect();
    let renaming = run_property("verdict renaming", ("[a-z]{1,4}", 1u32..=3), |(tag, j)| {
        let tag = format!("z{tag}");
        let rename = |x: Gen| if x == b3 { x } else { g(&format!("{tag}_{}", x.name().replace('.', "_"))) };
        let dga = inst.dga.renamed(rename).unwrap();
        let labels = KalmanLabels { b1: rename(g("b1")), b2: rename(g("b2")), b3 };
        let mu = kalman_monodromy_with(&inst.fly_word.rename(rename), j, &labels).unwrap();
        let v = verdict(&dga, &mu, b3, b3).unwrap();
        prop_assert_eq!((v.tau_value, v.conclusion), baseline[j as usize - 1]);
        Ok(())
    });

    for r in [ring, maps, shrink, renaming] {
        if let Err(e) = r {
            failures.push(e);
        }
    }
    Outcome { failures, notes: format!("4 properties × 1000 cases, {:?}", start.elapsed()) }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("trefoil ground truth", criterion_1),
        ("fibonacci lengths", criterion_2),
        ("even class of torus knots", criterion_3),
        ("connected-sum algebra", criterion_4),
        ("tau certificate", criterion_5),
        ("monodromy verdicts", criterion_6),
        ("holonomy rules", criterion_7),
        ("property suite", criterion_8),
    ];
    let mut failed = BTreeSet::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let status = if outcome.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} {} {name} ({})", i + 1, outcome.notes);
        for f in outcome.failures.iter().take(10) {
            println!("    {f}");
        }
        if !outcome.failures.is_empty() {
            failed.insert(i + 1);
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
