//! Textual polynomial syntax: terms joined by `+`, letters of a word
//! separated by whitespace, `1` for the unit and `0` for zero.
//!
//! `1 + b1 b2 + k1.b3`

use std::str::FromStr;

use super::gen::Gen;
use super::poly::{Poly, Word};
use crate::error::Error;

impl FromStr for Poly {
    type Err = Error;

    fn from_str(text: &str) -> Result<Poly, Error> {
        let fail = |reason: &str| Error::PolyParse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        if text.trim().is_empty() {
            return Err(fail("empty input"));
        }
        let mut out = Poly::zero();
        for term in text.split('+') {
            let term = term.trim();
            match term {
                "" => return Err(fail("empty term")),
                "0" => {}
                "1" => out.toggle(Word::unit()),
                _ => {
                    let mut letters = Vec::new();
                    for tok in term.split_whitespace() {
                        let g = Gen::new(tok).map_err(|_| fail(&format!("bad generator {tok:?}")))?;
                        letters.push(g);
                    }
                    out.toggle(Word::from_letters(letters));
                }
            }
        }
        Ok(out)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(text: &str) -> Result<Word, Error> {
        let p: Poly = text.parse()?;
        let mut words = p.into_words();
        match (words.next(), words.next()) {
            (Some(w), None) => Ok(w),
            _ => Err(Error::PolyParse {
                text: text.to_string(),
                reason: "expected a single word".into(),
            }),
        }
    }
}
