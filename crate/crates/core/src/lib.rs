//! Multi-deadline DAG task model and scheduling toolkit.
//!
//! The crate is organised around four layers:
//!
//! - [`taskmodel`]: callback graphs, their decomposition into DAG tasks with
//!   one relative deadline per sink, critical paths and the static tables
//!   used to compute reference absolute deadlines (RAD).
//! - [`simulator`]: a deterministic discrete-event simulator for a task set on
//!   `m` identical cores under GEDF-RAD, work-conserving FIFO or rate
//!   monotonic priorities, in non-preemptive or preemptive mode.
//! - [`workload`]: the shipped Autoware-like template, execution-time
//!   samplers and seeded generation of simulation inputs.
//! - [`experiment`]: Monte-Carlo acceptance-ratio campaigns and their CSV
//!   output.

pub mod experiment;
pub mod rational;
pub mod simulator;
pub mod taskmodel;
pub mod time;
pub mod workload;

pub use experiment::{run_campaign, write_csv, CampaignConfig, CampaignSummary};
pub use rational::Rational;
pub use simulator::{run, Mode, Policy, SimConfig, SimResult};
pub use taskmodel::{
    assign_deadlines, critical_path_length, decompose, descendant_sinks, hyper_period,
    rad_base_table, total_utilization, Callback, CallbackGraph, CallbackKind, DagTask, EdgeKind,
    ExecAssignment, RadBaseTable, TaskSet,
};
pub use time::Time;
pub use workload::{generate, ExecTimeSampler, GenConfig, WorkloadTemplate};
