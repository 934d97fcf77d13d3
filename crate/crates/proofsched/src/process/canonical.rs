//! Structural congruence via a recursive multiset normal form.
//!
//! Parallel composition is flattened into a multiset of prefix-rooted
//! subtrees (units are neutral and vanish), each body canonicalized
//! recursively, and the multiset sorted by (subject, polarity, body,
//! location). Two terms are congruent exactly when their canonical
//! forms are equal.

use std::fmt;

use super::term::{Location, Polarity, ProcessTerm};

/// Congruence normal form of a term. The empty component list encodes
/// the inactive unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalTerm {
    pub components: Vec<CanonicalPrefix>,
}

/// A prefix-rooted subtree in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalPrefix {
    pub name: String,
    pub polarity: Polarity,
    pub body: CanonicalTerm,
    pub location: Location,
}

/// Computes the congruence normal form.
pub fn canonicalize(term: &ProcessTerm) -> CanonicalTerm {
    let mut components = Vec::new();
    collect(term, &mut components);
    components.sort();
    CanonicalTerm { components }
}

fn collect(term: &ProcessTerm, out: &mut Vec<CanonicalPrefix>) {
    match term {
        ProcessTerm::Unit => {}
        ProcessTerm::Par(l, r) => {
            collect(l, out);
            collect(r, out);
        }
        ProcessTerm::Prefix {
            name,
            polarity,
            location,
            body,
        } => out.push(CanonicalPrefix {
            name: name.clone(),
            polarity: *polarity,
            body: canonicalize(body),
            location: *location,
        }),
    }
}

/// Structural congruence test.
pub fn congruent(p: &ProcessTerm, q: &ProcessTerm) -> bool {
    canonicalize(p) == canonicalize(q)
}

impl CanonicalTerm {
    /// A representative term of the congruence class: right-nested
    /// parallel composition of the sorted components.
    pub fn to_term(&self) -> ProcessTerm {
        let mut parts: Vec<ProcessTerm> = self
            .components
            .iter()
            .map(|c| {
                ProcessTerm::prefix(
                    c.name.clone(),
                    c.polarity,
                    c.location,
                    c.body.to_term(),
                )
            })
            .collect();
        match parts.len() {
            0 => ProcessTerm::Unit,
            _ => {
                let mut term = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    term = ProcessTerm::par(p, term);
                }
                term
            }
        }
    }
}

impl fmt::Display for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_term;
    use super::*;

    #[test]
    fn unit_is_neutral() {
        let p = parse_term("1 | a^1").unwrap();
        let q = parse_term("a^1").unwrap();
        assert_eq!(canonicalize(&p), canonicalize(&q));
    }

    #[test]
    fn commutative_associative() {
        let p = parse_term("(a^1 | b^2) | c^3").unwrap();
        let q = parse_term("c^3 | (b^2 | a^1)").unwrap();
        assert!(congruent(&p, &q));
    }

    #[test]
    fn congruence_does_not_permute_prefixes() {
        let p = parse_term("a^1.b^2").unwrap();
        let q = parse_term("b^2.a^1").unwrap();
        assert!(!congruent(&p, &q));
    }

    #[test]
    fn congruence_under_prefixes() {
        let p = parse_term("a^1.(b^2 | c^3)").unwrap();
        let q = parse_term("a^1.(c^3 | (b^2 | 1))").unwrap();
        assert!(congruent(&p, &q));
    }

    #[test]
    fn representative_is_in_the_class() {
        let p = parse_term("b^2.a^1 | 1 | a^3").unwrap();
        let c = canonicalize(&p);
        assert!(congruent(&p, &c.to_term()));
    }
}
