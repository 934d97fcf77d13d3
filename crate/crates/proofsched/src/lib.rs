//! Execution of multiplicative CCS processes, MLL-with-actions proof
//! nets, and schedules: modality-free proofs whose cut elimination
//! against a process replays one of its executions.

pub mod formula;
pub mod net;
pub mod translate;
pub mod process;
pub mod sched;
