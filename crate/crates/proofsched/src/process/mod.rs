//! Multiplicative CCS: terms, structural congruence, located execution
//! and the pairing theory.

pub mod canonical;
pub mod exec;
pub mod parse;
pub mod pairing;
pub mod term;

pub use canonical::{canonicalize, congruent, CanonicalTerm};
pub use exec::{
    action_order, enabled_pairs, execute, permutation_equivalent, reachable,
    reachable_with_witness, step, ActionOrder, ExecutionTrace,
};
pub use pairing::{
    enumerate_pairings, is_consistent, maximal_consistent_subpairings, Inconsistency, Pairing,
};
pub use parse::{parse_term, ParseError};
pub use term::{Location, Polarity, ProcessTerm};

use thiserror::Error;

/// Default cap on locations for exhaustive pairing enumeration.
pub const DEFAULT_LOCATION_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProcessError {
    #[error("location {0} occurs more than once")]
    DuplicateLocation(Location),
    #[error("bad channel name `{0}`")]
    BadChannelName(String),
    #[error("unknown location {0}")]
    UnknownLocation(Location),
    #[error("step ({l},{m}) is not enabled")]
    NotEnabled { l: Location, m: Location },
    #[error("step {index} ({l},{m}) is not enabled")]
    NotEnabledAt {
        index: usize,
        l: Location,
        m: Location,
    },
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("traces start from non-congruent terms")]
    MismatchedInitial,
    #[error("cap exceeded: more than {cap} {what}")]
    CapExceeded { what: String, cap: usize },
}
