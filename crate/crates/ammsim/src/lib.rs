//! Cycle-level simulation and design-space exploration for multi-ported
//! memory structures.
//!
//! The crate is organized bottom-up:
//!
//! * [`amm`]: functional models of five memory structures (a true multi-port
//!   array, two XOR-based encodings, their composition, and a replica table
//!   design), all checkable against the ideal array on arbitrary request
//!   streams.
//! * [`trace`]: a tiny text format for dependence graphs of memory accesses
//!   and compute operations, with a parser, writer, and validator.
//! * [`kernels`]: deterministic generators that turn kernel parameters
//!   (matrix size, transform length, ...) into traces with realistic
//!   dependence structure.
//! * [`sched`]: a greedy cycle-level list scheduler that maps a trace onto
//!   either a banked memory or a multi-port structure and reports cycle
//!   counts, stalls, and per-cycle issue logs.
//! * [`locality`]: stride-harmonic locality scoring of traces.
//! * [`cost`]: area, power, and clock-period estimates for banked and
//!   multi-port configurations, either analytic or table-driven.
//! * [`dse`]: configuration sweeps, Pareto frontier extraction, and the
//!   summary statistics tying locality to achieved speedup.
//!
//! The `ammsim` binary wraps all of this in a small CLI; the `examples/`
//! directory shows each layer in isolation.

pub mod amm;
pub mod cost;
pub mod dse;
pub mod kernels;
pub mod locality;
pub mod sched;
pub mod trace;
