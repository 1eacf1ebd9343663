//! Deterministic discrete-event simulation of DAG task sets on `m`
//! identical cores.
//!
//! Jobs of every task are released synchronously at `k·T`. A vertex
//! instance becomes ready when its job is released (source) or when its
//! last predecessor finishes. At each event instant the engine processes
//! completions, then releases, then dispatches by the policy's priority key.

mod engine;
mod policy;
mod result;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use engine::{run, run_with_tables, static_tables, SimConfig};
pub use policy::{
    priority_key_gedf_rad, priority_key_rm, priority_key_wc_fifo, rad, Policy, PriorityKey,
    StaticTables, UnknownPolicy,
};
pub use result::{detect_miss, SimResult, SimWarning, SinkRecord, TraceEvent, TraceKind};

use crate::taskmodel::{ModelError, TaskId, VertexId};
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Instances run to completion once dispatched.
    #[default]
    NonPreemptive,
    /// The `m` highest-priority ready-or-running instances run; preemption
    /// and migration are free.
    Preemptive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::NonPreemptive => "non_preemptive",
            Mode::Preemptive => "preemptive",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "non_preemptive" => Ok(Mode::NonPreemptive),
            "preemptive" => Ok(Mode::Preemptive),
            _ => Err(format!(
                "unknown mode `{s}` (expected non_preemptive or preemptive)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceState {
    Waiting,
    Ready,
    Running,
    Done,
}

/// Runtime state of vertex `vertex` in job `k` of a task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexInstance {
    pub task_id: TaskId,
    /// Position of the task in its task set.
    pub task_idx: usize,
    pub k: u64,
    pub vertex: VertexId,
    /// Index of the vertex within its task.
    pub vertex_idx: usize,
    pub exec: Time,
    pub state: InstanceState,
    pub ready_at: Option<Time>,
    pub started_at: Option<Time>,
    pub finished_at: Option<Time>,
    pub remaining: Time,
}

impl VertexInstance {
    pub fn new(
        task_id: TaskId,
        task_idx: usize,
        k: u64,
        vertex: VertexId,
        vertex_idx: usize,
        exec: Time,
    ) -> Self {
        Self {
            task_id,
            task_idx,
            k,
            vertex,
            vertex_idx,
            exec,
            state: InstanceState::Waiting,
            ready_at: None,
            started_at: None,
            finished_at: None,
            remaining: exec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    InvalidExecAssignment(#[from] ModelError),
    #[error("core count must be at least 1")]
    NoCores,
    #[error("duration must be at least 1us")]
    ZeroDuration,
}
