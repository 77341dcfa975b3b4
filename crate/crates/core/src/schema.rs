//! JSON documents: `dga.v1`, `tangle.v1`, `script.v1`, `monodromy.v1` and
//! `verdict.v1`. Output is canonical (sorted maps, canonical polynomial text).

use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::abbrev::Abbreviations;
use crate::algebra::{AlgebraMap, Gen, Poly};
use crate::dga::{Dga, Generator};
use crate::error::{Error, Result};
use crate::holonomy::{Mode, Monodromy, MoveEvent, MoveScript};
use crate::knots::Tangle;
use crate::obstruction::{CertificateReport, Conclusion, FamilyRow, Verdict};

pub const DGA_V1: &str = "dga.v1";
pub const TANGLE_V1: &str = "tangle.v1";
pub const SCRIPT_V1: &str = "script.v1";
pub const MONODROMY_V1: &str = "monodromy.v1";
pub const VERDICT_V1: &str = "verdict.v1";

fn schema_err(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn check_tag(found: &Option<String>, expected: &str) -> Result<()> {
    match found {
        Some(s) if s != expected => Err(schema_err(format!("expected schema {expected}, found {s}"))),
        _ => Ok(()),
    }
}

/// Heights are written as `"p/q"` strings; integers are accepted on input.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum HeightDoc {
    Int(i64),
    Text(String),
}

impl HeightDoc {
    fn parse(&self) -> Result<BigRational> {
        match self {
            HeightDoc::Int(n) => Ok(BigRational::from_integer((*n).into())),
            HeightDoc::Text(s) => BigRational::from_str(s.trim())
                .map_err(|_| schema_err(format!("height {s:?} is not a rational p/q"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub name: String,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<HeightDoc>,
}

impl GeneratorDoc {
    fn from_generator(g: &Generator) -> GeneratorDoc {
        GeneratorDoc {
            name: g.name.name().to_string(),
            degree: g.degree,
            height: g.height.as_ref().map(|h| HeightDoc::Text(h.to_string())),
        }
    }

    fn to_generator(&self) -> Result<Generator> {
        let mut g = Generator::new(Gen::new(&self.name)?, self.degree);
        if let Some(h) = &self.height {
            g.height = Some(h.parse()?);
        }
        Ok(g)
    }
}

fn parse_poly(text: &str) -> Result<Poly> {
    text.parse()
}

fn poly_map(m: &BTreeMap<String, String>) -> Result<Vec<(Gen, Poly)>> {
    m.iter().map(|(k, v)| Ok((Gen::new(k)?, parse_poly(v)?))).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DgaDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub generators: Vec<GeneratorDoc>,
    #[serde(default)]
    pub differential: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub abbreviations: BTreeMap<String, String>,
    pub rotation_zero: bool,
}

impl DgaDoc {
    pub fn from_dga(d: &Dga) -> DgaDoc {
        let differential = d
            .generators()
            .iter()
            .filter(|g| !d.differential(g.name).is_zero())
            .map(|g| (g.name.name().to_string(), d.differential(g.name).to_string()))
            .collect();
        let abbreviations = d
            .abbreviations()
            .iter()
            .map(|(g, p)| (g.name().to_string(), p.to_string()))
            .collect();
        DgaDoc {
            schema: Some(DGA_V1.to_string()),
            generators: d.generators().iter().map(GeneratorDoc::from_generator).collect(),
            differential,
            abbreviations,
            rotation_zero: d.rotation_zero(),
        }
    }

    pub fn to_dga(&self) -> Result<Dga> {
        check_tag(&self.schema, DGA_V1)?;
        let generators = self.generators.iter().map(GeneratorDoc::to_generator).collect::<Result<Vec<_>>>()?;
        let abbreviations = Abbreviations::from_defs(poly_map(&self.abbreviations)?)?;
        Dga::with_abbreviations(generators, poly_map(&self.differential)?, abbreviations, self.rotation_zero)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TangleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub prefix: String,
    pub word: String,
    pub internal: DgaDoc,
}

impl TangleDoc {
    pub fn from_tangle(t: &Tangle) -> TangleDoc {
        TangleDoc {
            schema: Some(TANGLE_V1.to_string()),
            prefix: t.prefix.clone(),
            word: t.word.to_string(),
            internal: DgaDoc::from_dga(&t.internal),
        }
    }

    pub fn to_tangle(&self) -> Result<Tangle> {
        check_tag(&self.schema, TANGLE_V1)?;
        Tangle::new(self.internal.to_dga()?, parse_poly(&self.word)?, &self.prefix)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum EventDoc {
    RII {
        x: GeneratorDoc,
        y: GeneratorDoc,
        #[serde(default)]
        differentials: BTreeMap<String, String>,
    },
    RIIInv {
        x: String,
        y: String,
    },
    RIIIa,
    RIIIb {
        x: String,
        y: String,
        z: String,
    },
    Relabel {
        perm: BTreeMap<String, String>,
    },
}

impl EventDoc {
    pub fn from_event(e: &MoveEvent) -> EventDoc {
        let s = |g: &Gen| g.name().to_string();
        match e {
            MoveEvent::RII { x, y, differentials } => EventDoc::RII {
                x: GeneratorDoc::from_generator(x),
                y: GeneratorDoc::from_generator(y),
                differentials: differentials.iter().map(|(g, p)| (s(g), p.to_string())).collect(),
            },
            MoveEvent::RIIInv { x, y } => EventDoc::RIIInv { x: s(x), y: s(y) },
            MoveEvent::RIIIa => EventDoc::RIIIa,
            MoveEvent::RIIIb { x, y, z } => EventDoc::RIIIb { x: s(x), y: s(y), z: s(z) },
            MoveEvent::Relabel { perm } => EventDoc::Relabel {
                perm: perm.iter().map(|(a, b)| (s(a), s(b))).collect(),
            },
        }
    }

    pub fn to_event(&self) -> Result<MoveEvent> {
        let g = |s: &str| Gen::new(s);
        Ok(match self {
            EventDoc::RII { x, y, differentials } => MoveEvent::RII {
                x: x.to_generator()?,
                y: y.to_generator()?,
                differentials: poly_map(differentials)?.into_iter().collect(),
            },
            EventDoc::RIIInv { x, y } => MoveEvent::RIIInv { x: g(x)?, y: g(y)? },
            EventDoc::RIIIa => MoveEvent::RIIIa,
            EventDoc::RIIIb { x, y, z } => MoveEvent::RIIIb { x: g(x)?, y: g(y)?, z: g(z)? },
            EventDoc::Relabel { perm } => MoveEvent::Relabel {
                perm: perm
                    .iter()
                    .map(|(a, b)| Ok((g(a)?, g(b)?)))
                    .collect::<Result<BTreeMap<_, _>>>()?,
            },
        })
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ModeDoc {
    Verified,
    Formal,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ScriptDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub initial: DgaDoc,
    pub mode: ModeDoc,
    pub events: Vec<EventDoc>,
}

impl ScriptDoc {
    pub fn from_script(s: &MoveScript) -> ScriptDoc {
        ScriptDoc {
            schema: Some(SCRIPT_V1.to_string()),
            initial: DgaDoc::from_dga(&s.initial),
            mode: match s.mode {
                Mode::Verified => ModeDoc::Verified,
                Mode::Formal => ModeDoc::Formal,
            },
            events: s.events.iter().map(EventDoc::from_event).collect(),
        }
    }

    pub fn to_script(&self) -> Result<MoveScript> {
        check_tag(&self.schema, SCRIPT_V1)?;
        Ok(MoveScript {
            initial: self.initial.to_dga()?,
            mode: match self.mode {
                ModeDoc::Verified => Mode::Verified,
                ModeDoc::Formal => Mode::Formal,
            },
            events: self.events.iter().map(EventDoc::to_event).collect::<Result<Vec<_>>>()?,
        })
    }
}

pub fn map_doc(m: &AlgebraMap) -> BTreeMap<String, String> {
    m.assignments().map(|(g, p)| (g.name().to_string(), p.to_string())).collect()
}

pub fn parse_map(m: &BTreeMap<String, String>) -> Result<AlgebraMap> {
    Ok(AlgebraMap::from_pairs(poly_map(m)?))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MonodromyDoc {
    pub schema: String,
    /// Non-identity images of initial generators.
    pub map: BTreeMap<String, String>,
    pub degree_preserving: bool,
    pub final_generators: Vec<String>,
}

impl MonodromyDoc {
    pub fn from_monodromy(m: &Monodromy) -> MonodromyDoc {
        let mut final_generators: Vec<String> =
            m.final_state.generators().iter().map(|g| g.name.name().to_string()).collect();
        final_generators.sort();
        MonodromyDoc {
            schema: MONODROMY_V1.to_string(),
            map: map_doc(&m.map),
            degree_preserving: m.degree.is_degree_preserving(),
            final_generators,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VerdictRowDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summands: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fly_word_length: Option<u128>,
    pub witness: String,
    pub marker: String,
    /// μ(witness), for audit.
    pub mu_witness: String,
    /// μ(witness) + witness.
    pub image: String,
    pub max_count: usize,
    pub tau_value: u128,
    pub certificate_ok: bool,
    pub certificate: CertificateDoc,
    pub conclusion: Conclusion,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateDoc {
    pub marker: String,
    pub entries: Vec<TauEntryDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TauEntryDoc {
    pub generator: String,
    pub max: usize,
    pub tau: u128,
}

impl From<&CertificateReport> for CertificateDoc {
    fn from(r: &CertificateReport) -> CertificateDoc {
        CertificateDoc {
            marker: r.marker.clone(),
            entries: r
                .entries
                .iter()
                .map(|e| TauEntryDoc { generator: e.generator.clone(), max: e.max, tau: e.tau })
                .collect(),
        }
    }
}

impl VerdictRowDoc {
    pub fn from_verdict(v: &Verdict) -> VerdictRowDoc {
        VerdictRowDoc {
            summands: None,
            power: None,
            fly_word_length: None,
            witness: v.witness.name().to_string(),
            marker: v.marker.name().to_string(),
            mu_witness: (&v.image + &Poly::gen(v.witness)).to_string(),
            image: v.image.to_string(),
            max_count: v.max_count,
            tau_value: v.tau_value,
            certificate_ok: v.certificate_ok,
            certificate: (&v.certificate).into(),
            conclusion: v.conclusion,
        }
    }

    pub fn from_row(r: &FamilyRow) -> VerdictRowDoc {
        VerdictRowDoc {
            summands: Some(r.summands.clone()),
            power: Some(r.power),
            fly_word_length: Some(r.fly_word_length),
            ..VerdictRowDoc::from_verdict(&r.verdict)
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VerdictDoc {
    pub schema: String,
    pub rows: Vec<VerdictRowDoc>,
}

impl VerdictDoc {
    pub fn new(rows: Vec<VerdictRowDoc>) -> VerdictDoc {
        VerdictDoc { schema: VERDICT_V1.to_string(), rows }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| schema_err(e.to_string()))
}

pub fn dga_to_json(d: &Dga) -> String {
    to_json(&DgaDoc::from_dga(d))
}

pub fn dga_from_json(text: &str) -> Result<Dga> {
    from_json::<DgaDoc>(text)?.to_dga()
}

pub fn tangle_to_json(t: &Tangle) -> String {
    to_json(&TangleDoc::from_tangle(t))
}

pub fn tangle_from_json(text: &str) -> Result<Tangle> {
    from_json::<TangleDoc>(text)?.to_tangle()
}

pub fn script_from_json(text: &str) -> Result<MoveScript> {
    from_json::<ScriptDoc>(text)?.to_script()
}
