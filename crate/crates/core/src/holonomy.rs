//! Reidemeister move scripts, their holonomy maps and the composite monodromy,
//! plus the closed-form monodromy of the Kálmán loop with a rigid fly.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::abbrev::EXPLICIT_LIMIT;
use crate::algebra::{AlgebraMap, Gen, Poly, Word};
use crate::dga::{DegreeReport, Dga, Generator};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveEvent {
    /// Birth of the pair x, y. `differentials` gives the post-move
    /// differentials of x, y and of any existing generator that changes.
    RII {
        x: Generator,
        y: Generator,
        differentials: BTreeMap<Gen, Poly>,
    },
    /// Death of the pair x, y; needs ∂x = y + w in the current state.
    RIIInv { x: Gen, y: Gen },
    RIIIa,
    RIIIb { x: Gen, y: Gen, z: Gen },
    Relabel { perm: BTreeMap<Gen, Gen> },
}

impl MoveEvent {
    pub fn kind(&self) -> &'static str {
        match self {
            MoveEvent::RII { .. } => "RII",
            MoveEvent::RIIInv { .. } => "RIIInv",
            MoveEvent::RIIIa => "RIIIa",
            MoveEvent::RIIIb { .. } => "RIIIb",
            MoveEvent::Relabel { .. } => "Relabel",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every event is checked against the tracked state.
    #[default]
    Verified,
    /// Maps are composed with shape checks only.
    Formal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveScript {
    pub initial: Dga,
    pub events: Vec<MoveEvent>,
    pub mode: Mode,
}

/// One applied event: its holonomy and the diagram state afterwards.
#[derive(Clone, Debug)]
pub struct Step {
    pub map: AlgebraMap,
    pub state: Dga,
}

#[derive(Clone, Debug)]
pub struct Monodromy {
    /// Composite map on the initial generators.
    pub map: AlgebraMap,
    pub final_state: Dga,
    pub degree: DegreeReport,
}

fn stale(index: usize, reason: impl Into<String>) -> Error {
    Error::StaleEvent { index, reason: reason.into() }
}

fn require(state: &Dga, g: Gen, index: usize) -> Result<&Generator> {
    state
        .generator(g)
        .ok_or_else(|| stale(index, format!("{g} is not a generator of the current diagram")))
}

fn require_unabbreviated(state: &Dga, moved: impl IntoIterator<Item = Gen>) -> Result<()> {
    let hidden = state.abbreviations().hidden_letters();
    for g in moved {
        if hidden.contains(&g) {
            return Err(Error::AbbreviatedGeneratorMoved(g.name().to_string()));
        }
    }
    Ok(())
}

fn rebuild(state: &Dga, generators: Vec<Generator>, differential: BTreeMap<Gen, Poly>) -> Result<Dga> {
    Dga::with_abbreviations(
        generators,
        differential,
        state.abbreviations().clone(),
        state.rotation_zero(),
    )
}

/// Holonomy of a single event applied to `state`, event number `index`.
pub fn holonomy(event: &MoveEvent, state: &Dga, mode: Mode, index: usize) -> Result<Step> {
    let step = match event {
        MoveEvent::RIIIa => Step { map: AlgebraMap::identity(), state: state.clone() },
        MoveEvent::RII { x, y, differentials } => birth(state, x, y, differentials, mode, index)?,
        MoveEvent::RIIInv { x, y } => death(state, *x, *y, mode, index)?,
        MoveEvent::RIIIb { x, y, z } => triple_b(state, *x, *y, *z, mode, index)?,
        MoveEvent::Relabel { perm } => relabel(state, perm, index)?,
    };
    if mode == Mode::Verified {
        check_degrees(state, &step, index)?;
        if !matches!(event, MoveEvent::RII { .. }) {
            check_chain_map(state, &step, index)?;
        }
    }
    Ok(step)
}

fn birth(
    state: &Dga,
    x: &Generator,
    y: &Generator,
    differentials: &BTreeMap<Gen, Poly>,
    mode: Mode,
    index: usize,
) -> Result<Step> {
    for g in [x.name, y.name] {
        if state.contains(g) || state.abbreviations().contains(g) {
            return Err(stale(index, format!("{g} is not fresh")));
        }
    }
    if x.name == y.name {
        return Err(stale(index, "RII needs two distinct generators"));
    }
    let (mut generators, mut diff, _) = state.parts();
    for (&g, p) in differentials {
        if g != x.name && g != y.name && !state.contains(g) {
            return Err(stale(index, format!("differential given for unknown {g}")));
        }
        if p.is_zero() {
            diff.remove(&g);
        } else {
            diff.insert(g, p.clone());
        }
    }
    generators.push(x.clone());
    generators.push(y.clone());
    let next = rebuild(state, generators, diff)?;

    if mode == Mode::Verified {
        if x.degree != y.degree + 1 {
            return Err(stale(index, format!("|{}| must be |{}| + 1", x.name, y.name)));
        }
        for g in state.generators() {
            if next.differential(g.name).is_zero() {
                continue;
            }
            let below = matches!((&g.height, &y.height), (Some(h), Some(hy)) if h < hy);
            if !below {
                return Err(Error::RIIGeneralHolonomyUnsupported(g.name.name().to_string()));
            }
        }
    }
    Ok(Step { map: AlgebraMap::identity(), state: next })
}

fn death(state: &Dga, x: Gen, y: Gen, mode: Mode, index: usize) -> Result<Step> {
    let gx = require(state, x, index)?;
    let gy = require(state, y, index)?;
    if x == y {
        return Err(stale(index, "RIIInv needs two distinct generators"));
    }
    if mode == Mode::Verified && gx.degree != gy.degree + 1 {
        return Err(stale(index, format!("|{x}| must be |{y}| + 1")));
    }
    let dx = state.differential(x);
    if !dx.contains(&Word::letter(y)) {
        return Err(Error::MalformedDifferential {
            x: x.name().to_string(),
            y: y.name().to_string(),
        });
    }
    let w = dx + &Poly::gen(y);
    if w.mentions(x) || w.mentions(y) {
        return Err(stale(index, format!("∂{x} + {y} still mentions {x} or {y}")));
    }
    require_unabbreviated(state, [x, y])?;

    let map = AlgebraMap::from_pairs([(x, Poly::zero()), (y, w)]);
    let (generators, diff, _) = state.parts();
    let generators = generators.into_iter().filter(|g| g.name != x && g.name != y).collect();
    let diff = diff
        .into_iter()
        .filter(|(g, _)| *g != x && *g != y)
        .map(|(g, p)| (g, map.apply(&p)))
        .collect();
    Ok(Step { map, state: rebuild(state, generators, diff)? })
}

fn triple_b(state: &Dga, x: Gen, y: Gen, z: Gen, mode: Mode, index: usize) -> Result<Step> {
    let gx = require(state, x, index)?;
    let gy = require(state, y, index)?;
    let gz = require(state, z, index)?;
    if x == y || x == z {
        return Err(stale(index, "RIIIb needs x distinct from y and z"));
    }
    if mode == Mode::Verified && gx.degree != gy.degree + gz.degree {
        return Err(stale(index, format!("|{x}| must be |{z}| + |{y}|")));
    }
    require_unabbreviated(state, [x])?;

    let zy = Poly::from_word(Word::from_letters([z, y]));
    let map = AlgebraMap::from_pairs([(x, &Poly::gen(x) + &zy)]);
    let (generators, diff, _) = state.parts();
    let mut next: BTreeMap<Gen, Poly> = diff.iter().map(|(&g, p)| (g, map.apply(p))).collect();
    let dx = state.differential(x) + &state.d_poly(&zy);
    next.insert(x, map.apply(&dx));
    Ok(Step { map, state: rebuild(state, generators, next)? })
}

fn relabel(state: &Dga, perm: &BTreeMap<Gen, Gen>, index: usize) -> Result<Step> {
    let mut targets = BTreeSet::new();
    for (&from, &to) in perm {
        require(state, from, index)?;
        if !targets.insert(to) {
            return Err(stale(index, format!("relabel sends two generators to {to}")));
        }
        if state.abbreviations().contains(to) || (state.contains(to) && !perm.contains_key(&to)) {
            return Err(stale(index, format!("relabel target {to} is already taken")));
        }
    }
    require_unabbreviated(state, perm.iter().filter(|(a, b)| a != b).map(|(a, _)| *a))?;

    let rename = |g: Gen| perm.get(&g).copied().unwrap_or(g);
    let map = AlgebraMap::from_pairs(perm.iter().map(|(&a, &b)| (a, Poly::gen(b))));
    let (generators, diff, _) = state.parts();
    let generators = generators
        .into_iter()
        .map(|g| Generator { name: rename(g.name), ..g })
        .collect();
    let diff = diff.into_iter().map(|(g, p)| (rename(g), p.rename(rename))).collect();
    Ok(Step { map, state: rebuild(state, generators, diff)? })
}

fn check_degrees(before: &Dga, step: &Step, index: usize) -> Result<()> {
    for (g, image) in step.map.assignments() {
        let expected = before.degree(g)?;
        for w in image.words() {
            let found = step.state.word_degree(w)?;
            if found != expected {
                return Err(stale(
                    index,
                    format!("holonomy sends {g} (degree {expected}) to {w} (degree {found})"),
                ));
            }
        }
    }
    Ok(())
}

/// g ∘ ∂ = ∂' ∘ g on every pre-move generator, when the expansions fit.
fn check_chain_map(before: &Dga, step: &Step, index: usize) -> Result<()> {
    for g in before.generators() {
        let lhs = step.map.apply(before.differential(g.name));
        let rhs = step.state.d_poly(&step.map.image(g.name));
        let sum = &lhs + &rhs;
        if sum.is_zero() {
            continue;
        }
        match step.state.abbreviations().expand(&sum, EXPLICIT_LIMIT) {
            Ok(e) if e.is_zero() => {}
            Ok(e) => {
                return Err(stale(
                    index,
                    format!("holonomy does not commute with ∂ on {}: residue {e}", g.name),
                ))
            }
            Err(Error::Intractable(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Composes the holonomies of every event. The result is restricted to the
/// initial generators.
pub fn run_script(script: &MoveScript) -> Result<Monodromy> {
    let mut state = script.initial.clone();
    let mut total = AlgebraMap::identity();
    for (i, event) in script.events.iter().enumerate() {
        let step = holonomy(event, &state, script.mode, i)?;
        total = AlgebraMap::compose(&step.map, &total);
        state = step.state;
    }
    let initial: BTreeSet<Gen> = script.initial.generators().iter().map(|g| g.name).collect();
    let map = AlgebraMap::from_pairs(initial.iter().map(|&g| (g, total.image(g))));

    let degree = match script.mode {
        Mode::Verified => {
            let end: BTreeSet<Gen> = state.generators().iter().map(|g| g.name).collect();
            if end != initial {
                let diff: Vec<String> = initial
                    .symmetric_difference(&end)
                    .map(|g| g.name().to_string())
                    .collect();
                return Err(Error::NotAnEndomorphism(diff.join(", ")));
            }
            let report = script.initial.apply_endomorphism(&map)?;
            if let Some(v) = report.violations.first() {
                return Err(Error::NotDegreePreserving(format!(
                    "{} ↦ {} changes degree {} to {}",
                    v.generator, v.word, v.expected, v.found
                )));
            }
            report
        }
        Mode::Formal => DegreeReport::default(),
    };
    Ok(Monodromy { map, final_state: state, degree })
}

/// Crossings of the elephant trefoil moved by the Kálmán loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KalmanLabels {
    pub b1: Gen,
    pub b2: Gen,
    pub b3: Gen,
}

impl Default for KalmanLabels {
    fn default() -> KalmanLabels {
        let g = |s: &str| Gen::new(s).expect("valid name");
        KalmanLabels { b1: g("b1"), b2: g("b2"), b3: g("b3") }
    }
}

/// One pass of the loop: b1 ↦ W + b1 b2 W, b2 ↦ 1 + b2 b3, b3 ↦ b1, where W
/// is the fly's word. The fly's crossings are fixed.
pub fn kalman_one_pass(fly_word: &Poly, labels: &KalmanLabels) -> Result<AlgebraMap> {
    for g in [labels.b1, labels.b2, labels.b3] {
        if fly_word.mentions(g) {
            return Err(Error::FlyCollision(g.name().to_string()));
        }
    }
    let b1b2 = Poly::from_word(Word::from_letters([labels.b1, labels.b2]));
    let b2b3 = Poly::from_word(Word::from_letters([labels.b2, labels.b3]));
    Ok(AlgebraMap::from_pairs([
        (labels.b1, fly_word + &b1b2.mul_ref(fly_word)),
        (labels.b2, &Poly::one() + &b2b3),
        (labels.b3, Poly::gen(labels.b1)),
    ]))
}

/// Monodromy of the j-th power of the Kálmán loop (j = 0 is the identity).
pub fn kalman_monodromy(fly_word: &Poly, j: u32) -> Result<AlgebraMap> {
    kalman_monodromy_with(fly_word, j, &KalmanLabels::default())
}

pub fn kalman_monodromy_with(fly_word: &Poly, j: u32, labels: &KalmanLabels) -> Result<AlgebraMap> {
    Ok(kalman_one_pass(fly_word, labels)?.power(j))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlyViolation {
    pub event: usize,
    pub generator: String,
    pub image: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FlyReport {
    pub violations: Vec<FlyViolation>,
}

impl FlyReport {
    pub fn is_rigid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every event's holonomy fixes every generator in `fly`.
pub fn fly_fixed_check(script: &MoveScript, fly: &BTreeSet<Gen>) -> Result<FlyReport> {
    let mut report = FlyReport::default();
    let mut state = script.initial.clone();
    for (i, event) in script.events.iter().enumerate() {
        let step = holonomy(event, &state, script.mode, i)?;
        let mut moved: Vec<Gen> = fly.iter().copied().filter(|&g| step.map.moves(g)).collect();
        moved.sort_by(|a, b| a.cmp_by_name(*b));
        for g in moved {
            report.violations.push(FlyViolation {
                event: i,
                generator: g.name().to_string(),
                image: step.map.image(g).to_string(),
            });
        }
        state = step.state;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knots::{connect_sum, tangle_from_knot, torus_knot_dga};

    fn g(s: &str) -> Gen {
        Gen::new(s).unwrap()
    }
    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }
    fn gens(list: &[(&str, i64)]) -> Vec<Generator> {
        list.iter().map(|&(n, d)| Generator::new(g(n), d)).collect()
    }

    fn stabilized() -> Dga {
        // ∂x = y + u v, with every other differential zero
        Dga::new(
            gens(&[("x", 1), ("y", 0), ("u", 0), ("v", 0), ("c", 1)]),
            [(g("x"), p("y + u v")), (g("c"), p("1 + y"))],
            true,
        )
        .unwrap()
    }

    #[test]
    fn death_rule() {
        let s = stabilized();
        let step = holonomy(&MoveEvent::RIIInv { x: g("x"), y: g("y") }, &s, Mode::Verified, 0).unwrap();
        assert_eq!(step.map.image(g("x")), Poly::zero());
        assert_eq!(step.map.image(g("y")), p("u v"));
        assert_eq!(step.map.image(g("u")), p("u"));
        assert!(!step.state.contains(g("x")));
        assert_eq!(step.state.differential(g("c")), &p("1 + u v"));
    }

    #[test]
    fn death_needs_y_in_dx() {
        let s = stabilized();
        let r = holonomy(&MoveEvent::RIIInv { x: g("x"), y: g("u") }, &s, Mode::Formal, 0);
        assert!(matches!(r, Err(Error::MalformedDifferential { .. })));
    }

    #[test]
    fn triple_b_rule() {
        let s = torus_knot_dga(3).unwrap();
        let step = holonomy(
            &MoveEvent::RIIIb { x: g("b2"), y: g("b3"), z: g("b1") },
            &s,
            Mode::Verified,
            0,
        )
        .unwrap();
        assert_eq!(step.map, AlgebraMap::from_pairs([(g("b2"), p("b2 + b1 b3"))]));
        assert!(step.state.check_dga().is_valid());
    }

    #[test]
    fn triple_a_is_identity() {
        let s = torus_knot_dga(3).unwrap();
        let step = holonomy(&MoveEvent::RIIIa, &s, Mode::Verified, 0).unwrap();
        assert!(step.map.is_identity());
        assert_eq!(step.state, s);
    }

    #[test]
    fn birth_shortcut() {
        let s = Dga::new(gens(&[("b", 0)]), [], true).unwrap();
        let ev = MoveEvent::RII {
            x: Generator::new(g("x"), 1),
            y: Generator::new(g("y"), 0),
            differentials: BTreeMap::from([(g("x"), p("y"))]),
        };
        let step = holonomy(&ev, &s, Mode::Verified, 0).unwrap();
        assert!(step.map.is_identity());
        assert!(step.state.contains(g("x")));

        let t = torus_knot_dga(3).unwrap();
        let r = holonomy(&ev, &t, Mode::Verified, 0);
        assert!(matches!(r, Err(Error::RIIGeneralHolonomyUnsupported(_))));
        assert!(holonomy(&ev, &t, Mode::Formal, 0).is_ok());
    }

    #[test]
    fn birth_height_exemption() {
        use num_rational::BigRational;
        let h = |n: i64| BigRational::from_integer(n.into());
        let s = Dga::new(
            vec![Generator::new(g("b"), 0).with_height(h(1)), Generator::new(g("c"), 1).with_height(h(2))],
            [(g("c"), p("1 + b"))],
            true,
        )
        .unwrap();
        let ev = |hy: i64| MoveEvent::RII {
            x: Generator::new(g("x"), 1).with_height(h(hy + 1)),
            y: Generator::new(g("y"), 0).with_height(h(hy)),
            differentials: BTreeMap::from([(g("x"), p("y"))]),
        };
        assert!(holonomy(&ev(3), &s, Mode::Verified, 0).is_ok());
        assert!(matches!(
            holonomy(&ev(1), &s, Mode::Verified, 0),
            Err(Error::RIIGeneralHolonomyUnsupported(name)) if name == "c"
        ));
    }

    #[test]
    fn empty_script_is_identity() {
        let s = MoveScript { initial: torus_knot_dga(3).unwrap(), events: vec![], mode: Mode::Verified };
        assert!(run_script(&s).unwrap().map.is_identity());
    }

    #[test]
    fn triple_b_then_relabel() {
        let init = Dga::new(gens(&[("b2", 0), ("y", 0), ("z", 0)]), [], true).unwrap();
        let swap = BTreeMap::from([(g("y"), g("z")), (g("z"), g("y"))]);
        let s = MoveScript {
            initial: init,
            events: vec![
                MoveEvent::Relabel { perm: swap.clone() },
                MoveEvent::RIIIb { x: g("b2"), y: g("z"), z: g("y") },
                MoveEvent::Relabel { perm: swap },
            ],
            mode: Mode::Verified,
        };
        let m = run_script(&s).unwrap();
        assert_eq!(m.map, AlgebraMap::from_pairs([(g("b2"), p("b2 + z y"))]));
    }

    #[test]
    fn unfinished_script_is_not_an_endomorphism() {
        let s = MoveScript {
            initial: stabilized(),
            events: vec![MoveEvent::RIIInv { x: g("x"), y: g("y") }],
            mode: Mode::Verified,
        };
        assert!(matches!(run_script(&s), Err(Error::NotAnEndomorphism(_))));
        let formal = MoveScript { mode: Mode::Formal, ..s };
        assert_eq!(run_script(&formal).unwrap().map.image(g("y")), p("u v"));
    }

    #[test]
    fn death_with_fly_word() {
        // ∂x = b1 + (1 + b3 A) W with W an abbreviated fly block
        let k = torus_knot_dga(3).unwrap();
        let fly = tangle_from_knot(&k, g("a2"), "f").unwrap();
        let sum = connect_sum(&[fly], "a").unwrap();
        let (mut generators, mut diff, abbr) = sum.parts();
        generators.extend(gens(&[("x", 1), ("b1", 0), ("b3", 0), ("A", 0)]));
        diff.insert(g("x"), p("b1 + f.W + b3 A f.W"));
        let d = Dga::with_abbreviations(generators, diff, abbr, true).unwrap();
        let step = holonomy(&MoveEvent::RIIInv { x: g("x"), y: g("b1") }, &d, Mode::Formal, 0).unwrap();
        assert_eq!(step.map.image(g("b1")), p("f.W + b3 A f.W"));
        assert!(matches!(
            holonomy(&MoveEvent::RIIInv { x: g("x"), y: g("f.b1") }, &d, Mode::Formal, 0),
            Err(Error::MalformedDifferential { .. })
        ));
    }

    #[test]
    fn moving_an_abbreviated_crossing_fails() {
        let k = torus_knot_dga(3).unwrap();
        let fly = tangle_from_knot(&k, g("a2"), "f").unwrap();
        let sum = connect_sum(&[fly], "a").unwrap();
        let ev = MoveEvent::RIIIb { x: g("f.b2"), y: g("f.b3"), z: g("f.b1") };
        assert!(matches!(
            holonomy(&ev, &sum, Mode::Formal, 0),
            Err(Error::AbbreviatedGeneratorMoved(_))
        ));
    }

    #[test]
    fn kalman_powers() {
        let w = p("W");
        assert_eq!(kalman_monodromy(&w, 1).unwrap().image(g("b3")), p("b1"));
        assert_eq!(kalman_monodromy(&w, 2).unwrap().image(g("b3")), p("W + b1 b2 W"));
        assert_eq!(
            kalman_monodromy(&w, 3).unwrap().image(g("b3")),
            p("W + W W + W b2 b3 W + b1 b2 W W + b1 b2 W b2 b3 W")
        );
        assert!(kalman_monodromy(&w, 0).unwrap().is_identity());
        assert!(matches!(kalman_monodromy(&p("b2 W"), 1), Err(Error::FlyCollision(_))));
    }

    #[test]
    fn kalman_without_fly() {
        let m = kalman_monodromy(&Poly::one(), 1).unwrap();
        assert_eq!(m.image(g("b3")), p("b1"));
        assert_eq!(m.image(g("b1")), p("1 + b1 b2"));
        assert_eq!(m.image(g("b2")), p("1 + b2 b3"));
    }

    #[test]
    fn kalman_power_law() {
        let w = p("W");
        for (a, b) in [(1, 1), (1, 2), (2, 1), (0, 3)] {
            assert_eq!(
                kalman_monodromy(&w, a + b).unwrap(),
                AlgebraMap::compose(&kalman_monodromy(&w, a).unwrap(), &kalman_monodromy(&w, b).unwrap())
            );
        }
    }

    #[test]
    fn fly_rigidity() {
        let init = Dga::new(gens(&[("x", 0), ("y", 0), ("z", 0), ("f1", 0)]), [], true).unwrap();
        let fly = BTreeSet::from([g("f1"), g("x")]);
        let s = MoveScript { initial: init.clone(), events: vec![MoveEvent::RIIIa; 3], mode: Mode::Verified };
        assert!(fly_fixed_check(&s, &fly).unwrap().is_rigid());
        let s = MoveScript {
            initial: init,
            events: vec![MoveEvent::RIIIb { x: g("x"), y: g("y"), z: g("z") }],
            mode: Mode::Verified,
        };
        let r = fly_fixed_check(&s, &fly).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].generator, "x");
    }
}
