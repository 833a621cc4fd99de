//! Generalized planning: synthesis of pointer programs that solve whole
//! families of classical planning instances.
//!
//! The crate is organized bottom-up:
//!
//! * [`strips`] - typed STRIPS domains, instances, and canonical grounding;
//! * [`pddl`] - reader and writer for the supported PDDL fragment;
//! * [`program`] - pointer programs and their text format;
//! * [`vm`] - the abstract machine that runs a program on one instance;
//! * [`domains`] - built-in benchmark domains and instance generators.

pub mod bench;
pub mod domains;
pub mod heuristics;
pub mod landmarks;
pub mod search;
pub mod pddl;
pub mod program;
pub mod strips;
pub mod vm;

#[cfg(test)]
pub(crate) mod testutil;
