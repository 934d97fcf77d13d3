//! MCCS terms: inactive unit, parallel composition and polarized action
//! prefixes, each prefix tagged with a unique location.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ProcessError;

/// A location tag on an action occurrence. Unique within a term or a
/// proof structure.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Location(pub u64);

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sign of an action or modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Polarity::Pos => 1,
            Polarity::Neg => -1,
        }
    }
}

/// An MCCS term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProcessTerm {
    Unit,
    Par(Box<ProcessTerm>, Box<ProcessTerm>),
    Prefix {
        name: String,
        polarity: Polarity,
        location: Location,
        body: Box<ProcessTerm>,
    },
}

impl ProcessTerm {
    pub fn unit() -> ProcessTerm {
        ProcessTerm::Unit
    }

    pub fn par(left: ProcessTerm, right: ProcessTerm) -> ProcessTerm {
        ProcessTerm::Par(Box::new(left), Box::new(right))
    }

    pub fn prefix(
        name: impl Into<String>,
        polarity: Polarity,
        location: Location,
        body: ProcessTerm,
    ) -> ProcessTerm {
        ProcessTerm::Prefix {
            name: name.into(),
            polarity,
            location,
            body: Box::new(body),
        }
    }

    /// All locations in the term, in prefix-traversal order.
    pub fn locations(&self) -> Vec<Location> {
        let mut out = Vec::new();
        self.collect_locations(&mut out);
        out
    }

    fn collect_locations(&self, out: &mut Vec<Location>) {
        match self {
            ProcessTerm::Unit => {}
            ProcessTerm::Par(l, r) => {
                l.collect_locations(out);
                r.collect_locations(out);
            }
            ProcessTerm::Prefix { location, body, .. } => {
                out.push(*location);
                body.collect_locations(out);
            }
        }
    }

    pub fn location_set(&self) -> BTreeSet<Location> {
        self.locations().into_iter().collect()
    }

    /// Checks location uniqueness and channel-name well-formedness.
    pub fn validate(&self) -> Result<(), ProcessError> {
        let locs = self.locations();
        let mut seen = BTreeSet::new();
        for l in &locs {
            if !seen.insert(*l) {
                return Err(ProcessError::DuplicateLocation(*l));
            }
        }
        self.validate_names()
    }

    fn validate_names(&self) -> Result<(), ProcessError> {
        match self {
            ProcessTerm::Unit => Ok(()),
            ProcessTerm::Par(l, r) => {
                l.validate_names()?;
                r.validate_names()
            }
            ProcessTerm::Prefix { name, body, .. } => {
                if !valid_channel_name(name) {
                    return Err(ProcessError::BadChannelName(name.clone()));
                }
                body.validate_names()
            }
        }
    }

    /// The subject of a location: the channel name it tags.
    pub fn subject(&self, loc: Location) -> Result<&str, ProcessError> {
        self.find_prefix(loc)
            .map(|(name, _, _)| name)
            .ok_or(ProcessError::UnknownLocation(loc))
    }

    /// The polarity of a location.
    pub fn polarity(&self, loc: Location) -> Result<Polarity, ProcessError> {
        self.find_prefix(loc)
            .map(|(_, pol, _)| pol)
            .ok_or(ProcessError::UnknownLocation(loc))
    }

    /// Locates the prefix tagged `loc` and returns its name, polarity and body.
    pub fn find_prefix(&self, loc: Location) -> Option<(&str, Polarity, &ProcessTerm)> {
        match self {
            ProcessTerm::Unit => None,
            ProcessTerm::Par(l, r) => l.find_prefix(loc).or_else(|| r.find_prefix(loc)),
            ProcessTerm::Prefix {
                name,
                polarity,
                location,
                body,
            } => {
                if *location == loc {
                    Some((name, *polarity, body))
                } else {
                    body.find_prefix(loc)
                }
            }
        }
    }

    /// Number of prefixes in the term.
    pub fn prefix_count(&self) -> usize {
        match self {
            ProcessTerm::Unit => 0,
            ProcessTerm::Par(l, r) => l.prefix_count() + r.prefix_count(),
            ProcessTerm::Prefix { body, .. } => 1 + body.prefix_count(),
        }
    }

    /// Number of unit leaves in the term.
    pub fn unit_count(&self) -> usize {
        match self {
            ProcessTerm::Unit => 1,
            ProcessTerm::Par(l, r) => l.unit_count() + r.unit_count(),
            ProcessTerm::Prefix { body, .. } => body.unit_count(),
        }
    }

    /// Top-level parallel components (units included), left to right.
    pub fn components(&self) -> Vec<&ProcessTerm> {
        let mut out = Vec::new();
        self.collect_components(&mut out);
        out
    }

    fn collect_components<'a>(&'a self, out: &mut Vec<&'a ProcessTerm>) {
        match self {
            ProcessTerm::Par(l, r) => {
                l.collect_components(out);
                r.collect_components(out);
            }
            other => out.push(other),
        }
    }
}

pub fn valid_channel_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for ProcessTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessTerm::Unit => write!(f, "1"),
            ProcessTerm::Par(l, r) => {
                // `|` is left-associative, so only a right-nested par needs parens
                write!(f, "{} | ", l)?;
                if matches!(**r, ProcessTerm::Par(..)) {
                    write!(f, "({})", r)
                } else {
                    write!(f, "{}", r)
                }
            }
            ProcessTerm::Prefix {
                name,
                polarity,
                location,
                body,
            } => {
                if *polarity == Polarity::Neg {
                    write!(f, "~")?;
                }
                write!(f, "{}^{}", name, location)?;
                match &**body {
                    ProcessTerm::Unit => Ok(()),
                    ProcessTerm::Prefix { .. } => write!(f, ".{}", body),
                    ProcessTerm::Par(..) => write!(f, ".({})", body),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_checks_names_and_locations() {
        let good = ProcessTerm::prefix(
            "ack_1",
            Polarity::Pos,
            Location(0),
            ProcessTerm::Unit,
        );
        assert!(good.validate().is_ok());
        let bad_name =
            ProcessTerm::prefix("Ack", Polarity::Pos, Location(0), ProcessTerm::Unit);
        assert!(bad_name.validate().is_err());
        let dup = ProcessTerm::par(
            ProcessTerm::prefix("a", Polarity::Pos, Location(0), ProcessTerm::Unit),
            ProcessTerm::prefix("b", Polarity::Neg, Location(0), ProcessTerm::Unit),
        );
        assert!(dup.validate().is_err());
    }

    #[test]
    fn counting() {
        let p = ProcessTerm::par(
            ProcessTerm::Unit,
            ProcessTerm::prefix(
                "a",
                Polarity::Pos,
                Location(3),
                ProcessTerm::par(ProcessTerm::Unit, ProcessTerm::Unit),
            ),
        );
        assert_eq!(p.prefix_count(), 1);
        assert_eq!(p.unit_count(), 3);
        assert_eq!(p.components().len(), 2);
    }

    #[test]
    fn polarity_flip() {
        assert_eq!(Polarity::Pos.flip(), Polarity::Neg);
        assert_eq!(Polarity::Neg.flip(), Polarity::Pos);
        assert_eq!(Polarity::Pos.sign(), 1);
    }
}
