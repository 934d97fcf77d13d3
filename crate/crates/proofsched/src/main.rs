//! Thin command-line surface over the library: every verb maps to one
//! library operation (or a fixed composition), reports are deterministic,
//! and exit codes distinguish success (0), a negative answer (1), usage
//! errors (2), and exceeded caps (3).

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use proofsched::net::{
    dot_export, dr_check_capped, net_from_json, net_to_json, normalize, DrFailure, NetError,
    DEFAULT_SWITCHING_CAP,
};
use proofsched::process::{
    congruent, enumerate_pairings, execute, is_consistent, maximal_consistent_subpairings,
    parse_term, reachable, canonicalize, Inconsistency, Location, Pairing, ProcessTerm,
    DEFAULT_LOCATION_CAP,
};
use proofsched::sched::{
    induced_pairing, pairing_to_schedule, replay, schedule_from_json, schedule_to_json,
    synthesize, SchedError, DEFAULT_SYNTH_ATOM_CAP,
};
use proofsched::translate::{proof_assign, ttype, Variant};

const EXIT_OK: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Sync,
    Async,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Sync => Variant::Sync,
            VariantArg::Async => Variant::Async,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "proofsched",
    about = "Execute multiplicative CCS processes, translate them to proof nets, \
             and synthesize, check, and replay schedules",
    version
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Machine-readable JSON report instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Write a DOT rendering of the resulting net to this file
    #[arg(long, global = true, value_name = "FILE")]
    dot: Option<std::path::PathBuf>,
    /// Cap on generalized atoms during proof search
    #[arg(long, global = true, value_name = "N")]
    cap_atoms: Option<usize>,
    /// Cap on enumerated switchings during correctness checks
    #[arg(long, global = true, value_name = "N")]
    cap_switchings: Option<usize>,
    /// Seed for randomized generation (reports are deterministic per seed)
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Verb {
    /// Parse a process term and print its canonical concrete syntax
    Parse { term: String },
    /// Decide structural congruence of two terms
    Congruent { left: String, right: String },
    /// Run an execution: each step is a location pair `L,M`
    Execute {
        term: String,
        /// Synchronization steps, e.g. `1,2 3,4`
        steps: Vec<String>,
    },
    /// List the reachable pairing/residual pairs, or decide reachability of `--to`
    Reachable {
        term: String,
        /// Target term: exit 0 when reachable, 1 when not
        #[arg(long)]
        to: Option<String>,
    },
    /// Enumerate the pairings of a term with their consistency verdicts
    Pairings {
        term: String,
        /// Only total pairings (every location paired)
        #[arg(long)]
        total: bool,
    },
    /// Check a pairing for consistency; pairs are `L,M` arguments
    Consistent { term: String, pairs: Vec<String> },
    /// Print the type of a term under the chosen translation
    Type {
        term: String,
        #[arg(long, value_enum, default_value = "sync")]
        variant: VariantArg,
    },
    /// Build the canonical cut-free proof of a term's type
    Proof {
        term: String,
        #[arg(long, value_enum, default_value = "sync")]
        variant: VariantArg,
    },
    /// Check a serialized proof structure for correctness (Danos-Regnier)
    CheckNet { file: std::path::PathBuf },
    /// Eliminate all cuts in a serialized proof structure
    Normalize { file: std::path::PathBuf },
    /// Search for a schedule proving `term ⊸ target`
    Synthesize {
        term: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_enum, default_value = "sync")]
        variant: VariantArg,
    },
    /// Replay a serialized schedule as an execution of its source
    Replay { file: std::path::PathBuf },
    /// Print the pairing a serialized schedule induces on its source
    InducedPairing { file: std::path::PathBuf },
    /// Check pairing → schedule → pairing is the identity; pairs are `L,M`
    Roundtrip {
        term: String,
        pairs: Vec<String>,
        #[arg(long, value_enum, default_value = "sync")]
        variant: VariantArg,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    code
}

fn term_arg(src: &str) -> Result<ProcessTerm, u8> {
    parse_term(src).map_err(|e| fail(EXIT_USAGE, format_args!("term `{src}`: {e}")))
}

fn steps_arg(args: &[String]) -> Result<Vec<(Location, Location)>, u8> {
    args.iter()
        .map(|s| {
            let (l, m) = s
                .split_once(',')
                .ok_or_else(|| fail(EXIT_USAGE, format_args!("step `{s}`: expected `L,M`")))?;
            let parse = |t: &str| {
                t.trim()
                    .trim_matches(|c| c == '(' || c == ')')
                    .parse::<u64>()
                    .map(Location)
                    .map_err(|e| fail(EXIT_USAGE, format_args!("step `{s}`: {e}")))
            };
            Ok((parse(l)?, parse(m)?))
        })
        .collect()
}

fn read_json(path: &std::path::Path) -> Result<serde_json::Value, u8> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_USAGE, format_args!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| fail(EXIT_USAGE, format_args!("{}: {e}", path.display())))
}

fn write_dot(
    dot: &Option<std::path::PathBuf>,
    ps: &proofsched::net::ProofStructure,
    name: &str,
) -> Result<(), u8> {
    if let Some(path) = dot {
        std::fs::write(path, dot_export(ps, name))
            .map_err(|e| fail(EXIT_USAGE, format_args!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn sched_exit(e: &SchedError) -> u8 {
    match e {
        SchedError::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_NO,
    }
}

fn inconsistency_text(inc: &Inconsistency) -> String {
    match inc {
        Inconsistency::NotDownwardClosed { location, guard } => {
            format!("not downward closed: {location} is paired but its guard {guard} is not")
        }
        Inconsistency::Cycle(locs) => {
            let items: Vec<String> = locs.iter().map(|l| l.to_string()).collect();
            format!("cycle {{{}}}", items.join(","))
        }
    }
}

fn run(cli: &Cli) -> Result<u8, u8> {
    let atom_cap = cli.cap_atoms.unwrap_or(DEFAULT_SYNTH_ATOM_CAP);
    let switching_cap = cli.cap_switchings.unwrap_or(DEFAULT_SWITCHING_CAP);
    match &cli.verb {
        Verb::Parse { term } => {
            let t = term_arg(term)?;
            if cli.json {
                println!("{}", json!({ "format": 1, "term": t.to_string() }));
            } else {
                println!("{t}");
            }
            Ok(EXIT_OK)
        }
        Verb::Congruent { left, right } => {
            let (p, q) = (term_arg(left)?, term_arg(right)?);
            let ok = congruent(&p, &q);
            if cli.json {
                println!("{}", json!({ "congruent": ok }));
            } else {
                println!("{}", if ok { "congruent" } else { "not congruent" });
            }
            Ok(if ok { EXIT_OK } else { EXIT_NO })
        }
        Verb::Execute { term, steps } => {
            let t = term_arg(term)?;
            let st = steps_arg(steps)?;
            match execute(&t, &st) {
                Ok(trace) => {
                    if cli.json {
                        let steps: Vec<_> =
                            trace.steps.iter().map(|(l, m)| json!([l.0, m.0])).collect();
                        println!(
                            "{}",
                            json!({
                                "initial": trace.initial.to_string(),
                                "steps": steps,
                                "final": trace.r#final.to_string(),
                            })
                        );
                    } else {
                        let mut current = trace.initial.clone();
                        println!("{current}");
                        for &(l, m) in &trace.steps {
                            current = proofsched::process::step(&current, l, m)
                                .expect("trace steps re-execute");
                            println!("  --({l},{m})--> {current}");
                        }
                    }
                    Ok(EXIT_OK)
                }
                Err(e) => Err(fail(EXIT_NO, e)),
            }
        }
        Verb::Reachable { term, to } => {
            let t = term_arg(term)?;
            let states = reachable(&t);
            match to {
                Some(q) => {
                    let target = canonicalize(&term_arg(q)?);
                    let hit = states.iter().any(|(_, c)| *c == target);
                    if cli.json {
                        println!("{}", json!({ "reachable": hit }));
                    } else {
                        println!("{}", if hit { "reachable" } else { "not reachable" });
                    }
                    Ok(if hit { EXIT_OK } else { EXIT_NO })
                }
                None => {
                    if cli.json {
                        let items: Vec<_> = states
                            .iter()
                            .map(|(c, t)| {
                                json!({
                                    "pairing": c.to_string(),
                                    "term": t.to_term().to_string(),
                                })
                            })
                            .collect();
                        println!("{}", json!({ "states": items }));
                    } else {
                        for (c, t) in &states {
                            println!("{c}  {}", t.to_term());
                        }
                    }
                    Ok(EXIT_OK)
                }
            }
        }
        Verb::Pairings { term, total } => {
            let t = term_arg(term)?;
            let cs = enumerate_pairings(&t, *total, DEFAULT_LOCATION_CAP).map_err(|e| match e {
                proofsched::process::ProcessError::CapExceeded { .. } => fail(EXIT_CAP, e),
                e => fail(EXIT_USAGE, e),
            })?;
            let mut items = Vec::new();
            for (i, c) in cs.iter().enumerate() {
                let verdict = is_consistent(&t, c)
                    .expect("enumerated pairings are valid for their term");
                match verdict {
                    Ok(()) => {
                        items.push(json!({ "pairing": c.to_string(), "consistent": true }));
                        if !cli.json {
                            println!("c{}: {c}  consistent", i + 1);
                        }
                    }
                    Err(inc) => {
                        let maximal: Vec<String> = maximal_consistent_subpairings(&t, c)
                            .expect("pairing validated above")
                            .iter()
                            .map(|s| s.to_string())
                            .collect();
                        items.push(json!({
                            "pairing": c.to_string(),
                            "consistent": false,
                            "reason": inconsistency_text(&inc),
                            "maximal_consistent_subpairings": maximal,
                        }));
                        if !cli.json {
                            println!(
                                "c{}: {c}  inconsistent ({}); maximal consistent: {}",
                                i + 1,
                                inconsistency_text(&inc),
                                maximal.join(" ")
                            );
                        }
                    }
                }
            }
            if cli.json {
                println!("{}", json!({ "pairings": items }));
            }
            Ok(EXIT_OK)
        }
        Verb::Consistent { term, pairs } => {
            let t = term_arg(term)?;
            let c = Pairing::from_pairs(steps_arg(pairs)?);
            let verdict = is_consistent(&t, &c).map_err(|e| fail(EXIT_USAGE, e))?;
            match verdict {
                Ok(()) => {
                    if cli.json {
                        println!("{}", json!({ "consistent": true }));
                    } else {
                        println!("consistent");
                    }
                    Ok(EXIT_OK)
                }
                Err(inc) => {
                    let reason = inconsistency_text(&inc);
                    if cli.json {
                        println!("{}", json!({ "consistent": false, "reason": reason }));
                    } else {
                        println!("inconsistent: {reason}");
                    }
                    Ok(EXIT_NO)
                }
            }
        }
        Verb::Type { term, variant } => {
            let t = term_arg(term)?;
            let f = ttype(&t, (*variant).into());
            if cli.json {
                println!("{}", json!({ "type": f.to_string() }));
            } else {
                println!("{f}");
            }
            Ok(EXIT_OK)
        }
        Verb::Proof { term, variant } => {
            let t = term_arg(term)?;
            let tp = proof_assign(&t, (*variant).into());
            write_dot(&cli.dot, &tp.proof, "proof")?;
            if cli.json {
                println!("{}", net_to_json(&tp.proof));
            } else {
                println!("conclusion: {}", tp.formula);
                println!("links: {}", tp.proof.link_count());
            }
            Ok(EXIT_OK)
        }
        Verb::CheckNet { file } => {
            let ps = net_from_json(&read_json(file)?).map_err(|e| fail(EXIT_USAGE, e))?;
            write_dot(&cli.dot, &ps, "net")?;
            match dr_check_capped(&ps, switching_cap) {
                Ok(Ok(())) => {
                    if cli.json {
                        println!("{}", json!({ "correct": true }));
                    } else {
                        println!("correct: every switching is connected and acyclic");
                    }
                    Ok(EXIT_OK)
                }
                Ok(Err(failure)) => {
                    let reason = match &failure {
                        DrFailure::Cycle { cycle, .. } => {
                            format!("a switching has a cycle through {} links", cycle.len())
                        }
                        DrFailure::Disconnected { component, .. } => format!(
                            "a switching is disconnected (component of {} links)",
                            component.len()
                        ),
                    };
                    if cli.json {
                        println!("{}", json!({ "correct": false, "reason": reason }));
                    } else {
                        println!("incorrect: {reason}");
                    }
                    Ok(EXIT_NO)
                }
                Err(NetError::CapExceeded { what, cap }) => Err(fail(
                    EXIT_CAP,
                    format_args!("more than {cap} {what}"),
                )),
                Err(e) => Err(fail(EXIT_USAGE, e)),
            }
        }
        Verb::Normalize { file } => {
            let ps = net_from_json(&read_json(file)?).map_err(|e| fail(EXIT_USAGE, e))?;
            let (nf, emitted) = normalize(&ps).map_err(|e| fail(EXIT_NO, e))?;
            write_dot(&cli.dot, &nf, "normal-form")?;
            if cli.json {
                let pairs: Vec<_> = emitted.iter().map(|(l, m)| json!([l.0, m.0])).collect();
                println!(
                    "{}",
                    json!({ "emitted": pairs, "normal_form": net_to_json(&nf) })
                );
            } else {
                for (l, m) in &emitted {
                    println!("emit ({l},{m})");
                }
                println!("normal form: {} links, cut-free", nf.link_count());
            }
            Ok(EXIT_OK)
        }
        Verb::Synthesize { term, to, variant } => {
            let p = term_arg(term)?;
            let q = term_arg(to)?;
            match synthesize(&p, &q, (*variant).into(), atom_cap) {
                Ok(Some(s)) => {
                    write_dot(&cli.dot, &s.proof, "schedule")?;
                    if cli.json {
                        println!("{}", schedule_to_json(&s));
                    } else {
                        println!("schedule proves: {}", s.implication());
                        let inst: BTreeMap<String, String> = s
                            .instantiation
                            .iter()
                            .map(|(k, v)| (k.clone(), v.to_string()))
                            .collect();
                        for (k, v) in inst {
                            println!("  {k} := {v}");
                        }
                    }
                    Ok(EXIT_OK)
                }
                Ok(None) => {
                    if cli.json {
                        println!("{}", json!({ "schedule": null }));
                    } else {
                        println!("no schedule");
                    }
                    Ok(EXIT_NO)
                }
                Err(e) => Err(fail(sched_exit(&e), e)),
            }
        }
        Verb::Replay { file } => {
            let s = schedule_from_json(&read_json(file)?).map_err(|e| fail(EXIT_USAGE, e))?;
            match replay(&s) {
                Ok(trace) => {
                    if cli.json {
                        let steps: Vec<_> =
                            trace.steps.iter().map(|(l, m)| json!([l.0, m.0])).collect();
                        println!(
                            "{}",
                            json!({
                                "initial": trace.initial.to_string(),
                                "steps": steps,
                                "final": trace.r#final.to_string(),
                            })
                        );
                    } else {
                        let items: Vec<String> = trace
                            .steps
                            .iter()
                            .map(|(l, m)| format!("({l},{m})"))
                            .collect();
                        println!("replays: {}", items.join(" "));
                        println!("ends in: {}", trace.r#final);
                    }
                    Ok(EXIT_OK)
                }
                Err(e) => Err(fail(sched_exit(&e), e)),
            }
        }
        Verb::InducedPairing { file } => {
            let s = schedule_from_json(&read_json(file)?).map_err(|e| fail(EXIT_USAGE, e))?;
            let c = induced_pairing(&s).map_err(|e| fail(sched_exit(&e), e))?;
            if cli.json {
                println!("{}", json!({ "pairing": c.to_string() }));
            } else {
                println!("{c}");
            }
            Ok(EXIT_OK)
        }
        Verb::Roundtrip {
            term,
            pairs,
            variant,
        } => {
            let t = term_arg(term)?;
            let c = Pairing::from_pairs(steps_arg(pairs)?);
            let s = pairing_to_schedule(&t, &c, (*variant).into())
                .map_err(|e| fail(sched_exit(&e), e))?;
            let back = induced_pairing(&s).map_err(|e| fail(sched_exit(&e), e))?;
            let ok = back == c;
            if cli.json {
                println!(
                    "{}",
                    json!({ "identity": ok, "pairing": c.to_string(), "back": back.to_string() })
                );
            } else if ok {
                println!("roundtrip is the identity on {c}");
            } else {
                println!("roundtrip lost information: {c} came back as {back}");
            }
            Ok(if ok { EXIT_OK } else { EXIT_NO })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print to stdout and exit cleanly;
            // anything else is a usage error.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let _ = cli.seed; // all verbs are deterministic; the flag fixes future sampling
    match run(&cli) {
        Ok(code) | Err(code) => ExitCode::from(code),
    }
}
