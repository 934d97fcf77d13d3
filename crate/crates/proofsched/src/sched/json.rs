//! Schedule serialization: versioned JSON embedding the proof's net
//! JSON, with terms and instantiation images in concrete syntax.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::formula::{parse_formula, Formula, Substitution};
use crate::net::{net_from_json, net_to_json};
use crate::process::parse_term;
use crate::translate::Variant;

use super::{SchedError, Schedule};

#[derive(Debug, Serialize, Deserialize)]
struct ScheduleJson {
    format: u32,
    variant: String,
    source: String,
    target: String,
    proof: serde_json::Value,
    instantiation: BTreeMap<String, String>,
}

/// Serializes a schedule to its JSON form (format 1).
pub fn schedule_to_json(s: &Schedule) -> serde_json::Value {
    serde_json::to_value(ScheduleJson {
        format: 1,
        variant: s.variant.to_string(),
        source: s.source.to_string(),
        target: s.target.to_string(),
        proof: net_to_json(&s.proof),
        instantiation: s
            .instantiation
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
    })
    .expect("schedule serialization cannot fail")
}

/// Parses a schedule from its JSON form and validates every invariant.
pub fn schedule_from_json(value: &serde_json::Value) -> Result<Schedule, SchedError> {
    let sj: ScheduleJson = serde_json::from_value(value.clone())
        .map_err(|e| SchedError::Malformed(format!("bad schedule JSON: {e}")))?;
    if sj.format != 1 {
        return Err(SchedError::Malformed(format!(
            "unsupported schedule format {}",
            sj.format
        )));
    }
    let variant = match sj.variant.as_str() {
        "sync" => Variant::Sync,
        "async" => Variant::Async,
        other => {
            return Err(SchedError::Malformed(format!(
                "unknown variant `{other}`"
            )))
        }
    };
    let source = parse_term(&sj.source)
        .map_err(|e| SchedError::Malformed(format!("source term: {e}")))?;
    let target = parse_term(&sj.target)
        .map_err(|e| SchedError::Malformed(format!("target term: {e}")))?;
    let proof = net_from_json(&sj.proof)?;
    let mut inst: BTreeMap<String, Formula> = BTreeMap::new();
    for (k, v) in &sj.instantiation {
        let f = parse_formula(v)
            .map_err(|e| SchedError::Malformed(format!("instantiation of {k}: {e}")))?;
        inst.insert(k.clone(), f);
    }
    let s = Schedule {
        variant,
        source,
        target,
        proof,
        instantiation: Substitution::from_map(inst),
    };
    s.validate()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Location;
    use crate::sched::step_schedule;

    #[test]
    fn schedule_json_roundtrip() {
        for variant in [Variant::Sync, Variant::Async] {
            let p = parse_term("b^5 | a^1.c^2 | ~a^3").unwrap();
            let s = step_schedule(&p, Location(1), Location(3), variant).unwrap();
            let json = schedule_to_json(&s);
            let back = schedule_from_json(&json).unwrap();
            assert_eq!(back.source, s.source);
            assert_eq!(back.target, s.target);
            assert_eq!(back.proof.canonical_key(), s.proof.canonical_key());
            assert_eq!(back.instantiation, s.instantiation);
        }
    }

    #[test]
    fn schedule_json_rejects_tampering() {
        let p = parse_term("a^1 | ~a^2").unwrap();
        let s = step_schedule(&p, Location(1), Location(2), Variant::Sync).unwrap();
        let mut json = schedule_to_json(&s);
        json["target"] = serde_json::json!("b^9");
        assert!(matches!(
            schedule_from_json(&json),
            Err(SchedError::Invalid(_))
        ));
        json["target"] = serde_json::json!("not a term (");
        assert!(matches!(
            schedule_from_json(&json),
            Err(SchedError::Malformed(_))
        ));
    }
}
