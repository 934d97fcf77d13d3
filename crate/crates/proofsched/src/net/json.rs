//! Net serialization: versioned JSON (wire formulas are the source of
//! typing truth) and DOT export for visual inspection.

use serde::{Deserialize, Serialize};

use super::{LinkKind, NetError, ProofStructure};
use crate::formula::parse_formula;
use crate::process::Location;

#[derive(Debug, Serialize, Deserialize)]
struct NetJson {
    format: u32,
    links: Vec<LinkJson>,
    wires: Vec<WireJson>,
    conclusions: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LinkJson {
    id: u32,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    channel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    location: Option<u64>,
    premisses: Vec<u32>,
    conclusions: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct WireJson {
    id: u32,
    formula: String,
}

fn kind_name(kind: &LinkKind) -> &'static str {
    match kind {
        LinkKind::Axiom => "ax",
        LinkKind::Cut => "cut",
        LinkKind::Tensor => "tensor",
        LinkKind::Par => "par",
        LinkKind::ModPos { .. } => "mod+",
        LinkKind::ModNeg { .. } => "mod-",
    }
}

/// Serializes a structure to its JSON form (format 1).
pub fn net_to_json(ps: &ProofStructure) -> serde_json::Value {
    let links = ps
        .links()
        .map(|l| {
            let (channel, location) = match &l.kind {
                LinkKind::ModPos { channel, location }
                | LinkKind::ModNeg { channel, location } => {
                    (Some(channel.clone()), Some(location.0))
                }
                _ => (None, None),
            };
            LinkJson {
                id: l.id,
                kind: kind_name(&l.kind).to_string(),
                channel,
                location,
                premisses: l.premisses.clone(),
                conclusions: l.conclusions.clone(),
            }
        })
        .collect();
    let wires = ps
        .wires()
        .map(|(id, f)| WireJson {
            id,
            formula: f.to_string(),
        })
        .collect();
    serde_json::to_value(NetJson {
        format: 1,
        links,
        wires,
        conclusions: ps.conclusions().to_vec(),
    })
    .expect("net serialization cannot fail")
}

/// Parses a structure from its JSON form and validates it.
pub fn net_from_json(value: &serde_json::Value) -> Result<ProofStructure, NetError> {
    let net: NetJson = serde_json::from_value(value.clone())
        .map_err(|e| NetError::Malformed(format!("bad net JSON: {e}")))?;
    if net.format != 1 {
        return Err(NetError::Malformed(format!(
            "unsupported net format {}",
            net.format
        )));
    }
    let mut ps = ProofStructure::new();
    for w in &net.wires {
        let f = parse_formula(&w.formula)
            .map_err(|e| NetError::Malformed(format!("wire {}: {}", w.id, e)))?;
        ps.insert_raw_wire(w.id, f);
    }
    for l in &net.links {
        let modality = |pos: bool| -> Result<LinkKind, NetError> {
            let channel = l
                .channel
                .clone()
                .ok_or_else(|| NetError::Malformed(format!("link {} lacks a channel", l.id)))?;
            let location = Location(l.location.ok_or_else(|| {
                NetError::Malformed(format!("link {} lacks a location", l.id))
            })?);
            Ok(if pos {
                LinkKind::ModPos { channel, location }
            } else {
                LinkKind::ModNeg { channel, location }
            })
        };
        let kind = match l.kind.as_str() {
            "ax" => LinkKind::Axiom,
            "cut" => LinkKind::Cut,
            "tensor" => LinkKind::Tensor,
            "par" => LinkKind::Par,
            "mod+" => modality(true)?,
            "mod-" => modality(false)?,
            other => {
                return Err(NetError::Malformed(format!(
                    "unknown link kind `{other}`"
                )))
            }
        };
        ps.insert_raw_link(l.id, kind, l.premisses.clone(), l.conclusions.clone());
    }
    ps.set_conclusions(net.conclusions);
    ps.validate()?;
    Ok(ps)
}

/// Renders a structure as a DOT graph; par premiss edges are dashed.
pub fn dot_export(ps: &ProofStructure, name: &str) -> String {
    let mut out = format!("graph \"{name}\" {{\n  node [shape=box];\n");
    for l in ps.links() {
        let label = match &l.kind {
            LinkKind::Axiom => "ax".to_string(),
            LinkKind::Cut => "cut".to_string(),
            LinkKind::Tensor => "⊗".to_string(),
            LinkKind::Par => "⅋".to_string(),
            LinkKind::ModPos { channel, location } => format!("<{channel}>+ ^{location}"),
            LinkKind::ModNeg { channel, location } => format!("<{channel}>- ^{location}"),
        };
        out.push_str(&format!("  l{} [label=\"{}: {}\"];\n", l.id, l.id, label));
    }
    for (w, f) in ps.wires() {
        let (Some(prod), Some(cons)) = (ps.producer(w), ps.consumer(w)) else {
            continue;
        };
        let dashed = if cons.kind == LinkKind::Par {
            " style=dashed"
        } else {
            ""
        };
        out.push_str(&format!(
            "  l{} -- l{} [label=\"{}\"{}];\n",
            prod.id, cons.id, f, dashed
        ));
    }
    for (i, w) in ps.conclusions().iter().enumerate() {
        let prod = ps.producer(*w).expect("conclusion wire without producer");
        out.push_str(&format!(
            "  c{i} [shape=plaintext label=\"{}\"];\n  l{} -- c{i};\n",
            ps.wire_formula(*w).unwrap(),
            prod.id
        ));
    }
    out.push_str("}\n");
    out
}
