//! Interned generator names.
//!
//! Every crossing label used anywhere in the process is interned once into a
//! global table, so words are stored as short vectors of `u32` ids. Ids are an
//! implementation detail: anything that is printed or serialized is ordered by
//! the generator *name*, never by id.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

/// Namespace separator between a prefix and a local crossing name.
pub const NAMESPACE_SEP: char = '.';

#[derive(Default)]
struct Interner {
    names: Vec<Arc<str>>,
    ids: HashMap<Arc<str>, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

/// A generator (crossing) name, interned.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen(u32);

impl Gen {
    /// Interns `name` after checking it is a valid, possibly namespaced,
    /// identifier such as `b2` or `k1.a1`.
    pub fn new(name: &str) -> Result<Gen> {
        validate_name(name)?;
        Ok(Self::intern(name))
    }

    fn intern(name: &str) -> Gen {
        if let Some(&id) = interner().read().unwrap().ids.get(name) {
            return Gen(id);
        }
        let mut table = interner().write().unwrap();
        if let Some(&id) = table.ids.get(name) {
            return Gen(id);
        }
        let id = u32::try_from(table.names.len()).expect("generator table overflow");
        let name: Arc<str> = Arc::from(name);
        table.names.push(name.clone());
        table.ids.insert(name, id);
        Gen(id)
    }

    pub fn name(self) -> Arc<str> {
        interner().read().unwrap().names[self.0 as usize].clone()
    }

    /// `prefix.name`, or the generator itself for an empty prefix.
    pub fn prefixed(self, prefix: &str) -> Gen {
        if prefix.is_empty() {
            self
        } else {
            Self::intern(&format!("{prefix}{NAMESPACE_SEP}{}", self.name()))
        }
    }

    /// Compares by name; this is the order used by canonical serialization.
    pub fn cmp_by_name(self, other: Gen) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let table = interner().read().unwrap();
        table.names[self.0 as usize].cmp(&table.names[other.0 as usize])
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Debug for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gen({})", self.name())
    }
}

fn valid_segment(seg: &str) -> bool {
    let mut chars = seg.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn validate_name(name: &str) -> Result<()> {
    if !name.is_empty() && name.split(NAMESPACE_SEP).all(valid_segment) {
        Ok(())
    } else {
        Err(Error::InvalidName(name.to_string()))
    }
}

/// A namespace prefix is either empty or a valid dotted identifier.
pub fn validate_prefix(prefix: &str) -> Result<()> {
    if prefix.is_empty() {
        return Ok(());
    }
    validate_name(prefix).map_err(|_| Error::InvalidPrefix(prefix.to_string()))
}
