use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of decimal digits parameters are rounded to before comparison.
pub const PARAM_DIGITS: i32 = 9;

/// Rounds a parameter to [`PARAM_DIGITS`] decimal digits; `-0.0` maps to `0.0`.
pub fn canonical_param(x: f64) -> f64 {
    let scale = 10f64.powi(PARAM_DIGITS);
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    if name == "true" || name == "false" {
        return false;
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PredicateSymbol {
    name: String,
    arity: usize,
}

impl PredicateSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Result<Self> {
        let name = name.into();
        if !valid_name(&name) {
            return Err(Error::InvalidPredicateName(name));
        }
        Ok(Self { name, arity })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

/// An atomic proposition `f(x_f)`: a predicate symbol with a fixed parameter vector.
///
/// Parameters are stored canonically rounded, so equality, ordering and hashing
/// are bitwise on the rounded values.
#[derive(Clone, Debug)]
pub struct PredicateInstance {
    symbol: PredicateSymbol,
    params: Vec<f64>,
}

impl PredicateInstance {
    pub fn new(symbol: PredicateSymbol, params: Vec<f64>) -> Result<Self> {
        if params.len() != symbol.arity {
            return Err(Error::ArityMismatch {
                name: symbol.name.clone(),
                expected: symbol.arity,
                found: params.len(),
            });
        }
        if let Some(p) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite parameter {p} for `{}`",
                symbol.name
            )));
        }
        let params = params.into_iter().map(canonical_param).collect();
        Ok(Self { symbol, params })
    }

    /// Shorthand that infers the arity from `params`.
    pub fn parse_free(name: &str, params: &[f64]) -> Result<Self> {
        Self::new(PredicateSymbol::new(name, params.len())?, params.to_vec())
    }

    /// A zero-arity proposition, e.g. `a()`.
    pub fn prop(name: &str) -> Self {
        Self::parse_free(name, &[]).expect("valid proposition name")
    }

    pub fn symbol(&self) -> &PredicateSymbol {
        &self.symbol
    }

    pub fn name(&self) -> &str {
        &self.symbol.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    fn key(&self) -> (&str, Vec<u64>) {
        (
            self.symbol.name.as_str(),
            self.params.iter().map(|p| p.to_bits()).collect(),
        )
    }
}

impl PartialEq for PredicateInstance {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for PredicateInstance {}

impl Hash for PredicateInstance {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for PredicateInstance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PredicateInstance {
    fn cmp(&self, other: &Self) -> Ordering {
        self.symbol.name.cmp(&other.symbol.name).then_with(|| {
            for (a, b) in self.params.iter().zip(&other.params) {
                match a.total_cmp(b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            self.params.len().cmp(&other.params.len())
        })
    }
}

impl fmt::Display for PredicateInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.symbol.name)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write_param(f, *p)?;
        }
        write!(f, ")")
    }
}

/// Writes a parameter so that it always reads back as a number with a decimal point.
fn write_param(f: &mut fmt::Formatter<'_>, p: f64) -> fmt::Result {
    if p.fract() == 0.0 && p.abs() < 1e15 {
        write!(f, "{p:.1}")
    } else {
        write!(f, "{p}")
    }
}

impl Serialize for PredicateInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PredicateInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        crate::ltl::parse::parse_atom(&text, &Signature::permissive())
            .map_err(serde::de::Error::custom)
    }
}

/// Predicate signature table used while parsing.
///
/// A strict table rejects undeclared names. A permissive table records the
/// arity of each name at first use and rejects later mismatches.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    declared: BTreeMap<String, usize>,
    learned: Option<Arc<Mutex<BTreeMap<String, usize>>>>,
}

impl Signature {
    pub fn strict<'a>(entries: impl IntoIterator<Item = (&'a str, usize)>) -> Self {
        Self {
            declared: entries
                .into_iter()
                .map(|(n, a)| (n.to_string(), a))
                .collect(),
            learned: None,
        }
    }

    pub fn permissive() -> Self {
        Self {
            declared: BTreeMap::new(),
            learned: Some(Arc::new(Mutex::new(BTreeMap::new()))),
        }
    }

    /// `at/3`, `loc/2` and `rad/1`, permissive for any other name.
    pub fn environments() -> Self {
        let mut s = Self::permissive();
        s.declared = [("at", 3), ("loc", 2), ("rad", 1)]
            .into_iter()
            .map(|(n, a)| (n.to_string(), a))
            .collect();
        s
    }

    pub fn with(mut self, name: &str, arity: usize) -> Self {
        self.declared.insert(name.to_string(), arity);
        self
    }

    pub fn resolve(&self, name: &str, found: usize) -> Result<PredicateSymbol> {
        let expected = match self.declared.get(name) {
            Some(a) => *a,
            None => match &self.learned {
                None => return Err(Error::UnknownPredicate(name.to_string())),
                Some(map) => *map
                    .lock()
                    .expect("signature lock")
                    .entry(name.to_string())
                    .or_insert(found),
            },
        };
        if expected != found {
            return Err(Error::ArityMismatch {
                name: name.to_string(),
                expected,
                found,
            });
        }
        PredicateSymbol::new(name, expected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_merges_text_and_numeric_instances() {
        let a = PredicateInstance::parse_free("at", &[0.1 * 3.0, 0.0, 1.0]).unwrap();
        let b = PredicateInstance::parse_free("at", &[0.3, -0.0, 1.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "at(0.3,0.0,1.0)");
    }

    #[test]
    fn names_are_validated() {
        assert!(PredicateSymbol::new("loc_2", 2).is_ok());
        assert!(PredicateSymbol::new("Loc", 2).is_err());
        assert!(PredicateSymbol::new("", 0).is_err());
        assert!(PredicateSymbol::new("true", 0).is_err());
        assert!(PredicateSymbol::new("2x", 0).is_err());
    }

    #[test]
    fn arity_checked() {
        let sym = PredicateSymbol::new("rad", 1).unwrap();
        assert!(matches!(
            PredicateInstance::new(sym, vec![]),
            Err(Error::ArityMismatch { .. })
        ));
        let sig = Signature::strict([("rad", 1)]);
        assert!(matches!(
            sig.resolve("loc", 2),
            Err(Error::UnknownPredicate(_))
        ));
        assert!(matches!(
            sig.resolve("rad", 2),
            Err(Error::ArityMismatch { .. })
        ));
        let perm = Signature::permissive();
        perm.resolve("foo", 2).unwrap();
        assert!(perm.resolve("foo", 1).is_err());
    }
}
