//! Strongly connected components of stream graphs.
//!
//! A stream graph is a set of nodes and links, each present during a union of
//! closed time intervals. This crate builds stream graphs from text datasets
//! ([`ingest`]), computes their strongly connected components with three
//! algorithms ([`scc`]), one of which rests on a fully dynamic connectivity
//! structure ([`dynconn`]), and measures how much the stream changes under
//! time approximation ([`metrics`]).

pub mod cli;
pub mod dynconn;
pub mod ingest;
pub mod metrics;
pub mod scc;
pub mod stream;
pub mod synth;
