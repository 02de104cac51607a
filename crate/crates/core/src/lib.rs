//! Penalty-upon-decision (PuD) metrics for single-server status-update queues.
//!
//! A two-state source emits a packet at every state change; packets cross a
//! single FCFS server and a decision is made when each one is delivered. A
//! decision is correct when the source is still in the packet's state,
//! incorrect otherwise, and missed when the packet was dropped. Each outcome
//! carries a penalty.
//!
//! The crate provides closed forms for M/GI/1 ([`mg1`]), M/GI/1/1 with
//! blocking ([`mg11`]) and M/M/1/K ([`mm1k`]), a discrete-event simulator
//! ([`sim`]) that serves as their oracle, and the experiment harness behind
//! the `pud` command-line tool ([`experiments`]).

pub mod error;
pub mod experiments;
pub mod mg1;
pub mod mg11;
pub mod mm1k;
pub mod oracle;
pub mod par;
pub mod report;
pub mod service;
pub mod sim;
pub mod stats;

pub use error::{PudError, Result};
pub use mg1::Mg1Config;
pub use mg11::{Mg11Config, MissEventClass};
pub use mm1k::Mm1kConfig;
pub use report::AnalyticReport;
pub use service::ServiceDistribution;
pub use sim::{Capacity, MetricsSummary, PenaltyPolicy, StandardPenalty, SystemConfig};
