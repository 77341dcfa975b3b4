//! The τ-parity certificate for nontrivial monodromy, and batch verdicts for
//! Kálmán loops carrying a fly of torus knots.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraMap, Gen, Poly};
use crate::dga::Dga;
use crate::error::{Error, Result};
use crate::holonomy::kalman_monodromy;
use crate::knots::{connect_sum, summand_prefix, tangle_from_knot, torus_knot_dga, Tangle, DEFAULT_CLOSURE};

/// Prefix of the fly's crossings inside a family instance.
pub const FLY_PREFIX: &str = "f";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Nontrivial,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TauEntry {
    pub generator: String,
    pub max: usize,
    pub tau: u128,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub marker: String,
    /// τ of ∂c for every degree-1 generator c, in name order.
    pub entries: Vec<TauEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub witness: Gen,
    pub marker: Gen,
    /// μ(witness) + witness.
    pub image: Poly,
    pub max_count: usize,
    pub tau_value: u128,
    pub certificate_ok: bool,
    pub certificate: CertificateReport,
    pub conclusion: Conclusion,
}

fn degree_zero(dga: &Dga, g: Gen) -> bool {
    matches!(dga.generator(g), Some(gen) if gen.degree == 0)
}

/// True iff τ_marker(∂c) is even for every degree-1 generator c.
pub fn tau_parity_certificate(dga: &Dga, marker: Gen) -> Result<(bool, CertificateReport)> {
    if !degree_zero(dga, marker) {
        return Err(Error::NotDegreeZeroMarker(marker.name().to_string()));
    }
    let mut gens: Vec<Gen> = dga.generators_of_degree(1).collect();
    gens.sort_by(|a, b| a.cmp_by_name(*b));
    let entries = gens
        .into_iter()
        .map(|c| {
            let e = dga.abbreviations().expansion(dga.differential(c), Some(marker))?;
            let (max, tau) = e.max_and_tau()?;
            Ok(TauEntry { generator: c.name().to_string(), max, tau })
        })
        .collect::<Result<Vec<_>>>()?;
    let ok = entries.iter().all(|e| e.tau % 2 == 0);
    Ok((ok, CertificateReport { marker: marker.name().to_string(), entries }))
}

pub fn verdict(dga: &Dga, mu: &AlgebraMap, witness: Gen, marker: Gen) -> Result<Verdict> {
    let (ok, report) = tau_parity_certificate(dga, marker)?;
    verdict_with_certificate(dga, mu, witness, marker, ok, report)
}

fn verdict_with_certificate(
    dga: &Dga,
    mu: &AlgebraMap,
    witness: Gen,
    marker: Gen,
    certificate_ok: bool,
    certificate: CertificateReport,
) -> Result<Verdict> {
    if !degree_zero(dga, witness) {
        return Err(Error::NotDegreeZeroWitness(witness.name().to_string()));
    }
    let degrees = dga.apply_endomorphism(mu)?;
    if let Some(v) = degrees.violations.first() {
        return Err(Error::NotDegreePreserving(format!(
            "{} ↦ {} changes degree {} to {}",
            v.generator, v.word, v.expected, v.found
        )));
    }
    let image = &mu.apply(&Poly::gen(witness)) + &Poly::gen(witness);
    let (max_count, tau_value) = dga
        .abbreviations()
        .expansion(&image, Some(marker))?
        .max_and_tau()?;
    let conclusion = if certificate_ok && tau_value % 2 == 1 {
        Conclusion::Nontrivial
    } else {
        Conclusion::Inconclusive
    };
    Ok(Verdict {
        witness,
        marker,
        image,
        max_count,
        tau_value,
        certificate_ok,
        certificate,
        conclusion,
    })
}

/// A fly of torus knots summed with the elephant trefoil.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub summands: Vec<u32>,
    /// K = fly # trefoil; the trefoil keeps the names b1, b2, b3, a1.
    pub dga: Dga,
    /// The fly's word, a single abbreviation letter.
    pub fly_word: Poly,
}

impl FamilyInstance {
    pub fn fly_word_length(&self) -> Result<u128> {
        self.dga.length(&self.fly_word)
    }
}

pub fn check_summand(n: u32) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) || n % 3 == 2 {
        return Err(Error::BadSummand(n));
    }
    Ok(())
}

/// Builds the fly as the connected sum of the (nᵢ, 2) tangles, cuts it open
/// again under the prefix `f`, and closes it up with the elephant trefoil.
pub fn family_instance(summands: &[u32]) -> Result<FamilyInstance> {
    for &n in summands {
        check_summand(n)?;
    }
    let closure = Gen::new("a2")?;
    let fly = if summands.is_empty() {
        Tangle::empty(FLY_PREFIX)?
    } else {
        let tangles = summands
            .iter()
            .enumerate()
            .map(|(i, &n)| tangle_from_knot(&torus_knot_dga(n)?, closure, &summand_prefix(i)))
            .collect::<Result<Vec<_>>>()?;
        let fly_knot = connect_sum(&tangles, DEFAULT_CLOSURE)?;
        tangle_from_knot(&fly_knot, Gen::new(DEFAULT_CLOSURE)?, FLY_PREFIX)?
    };
    let elephant = tangle_from_knot(&torus_knot_dga(3)?, closure, "")?;
    let fly_word = Poly::gen(fly.word_name());
    let dga = connect_sum(&[fly, elephant], DEFAULT_CLOSURE)?;
    Ok(FamilyInstance { summands: summands.to_vec(), dga, fly_word })
}

#[derive(Clone, Debug)]
pub struct FamilyRow {
    pub summands: Vec<u32>,
    pub power: u32,
    pub fly_word_length: u128,
    pub verdict: Verdict,
}

/// Verdicts for the j-th power of the Kálmán loop on fly # trefoil, one row
/// per power, with witness and marker b3.
pub fn family_verdicts(summands: &[u32], powers: &BTreeSet<u32>) -> Result<Vec<FamilyRow>> {
    family_verdicts_with(summands, powers, Gen::new("b3")?, Gen::new("b3")?)
}

pub fn family_verdicts_with(
    summands: &[u32],
    powers: &BTreeSet<u32>,
    witness: Gen,
    marker: Gen,
) -> Result<Vec<FamilyRow>> {
    if let Some(&j) = powers.iter().find(|&&j| !(1..=3).contains(&j)) {
        return Err(Error::BadPower(j));
    }
    let instance = family_instance(summands)?;
    let fly_word_length = instance.fly_word_length()?;
    let (ok, report) = tau_parity_certificate(&instance.dga, marker)?;
    let powers: Vec<u32> = powers.iter().copied().collect();
    powers
        .par_iter()
        .map(|&j| {
            let mu = kalman_monodromy(&instance.fly_word, j)?;
            let verdict = verdict_with_certificate(&instance.dga, &mu, witness, marker, ok, report.clone())?;
            Ok(FamilyRow { summands: summands.to_vec(), power: j, fly_word_length, verdict })
        })
        .collect()
}
