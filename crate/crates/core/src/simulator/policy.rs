use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::VertexInstance;
use crate::taskmodel::{RadBaseTable, TaskId, VertexId};
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Global EDF with reference absolute deadlines as priorities.
    GedfRad,
    /// Work-conserving, first come first served by ready time.
    WcFifo,
    /// Rate monotonic: shorter task period first.
    Rm,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::GedfRad, Policy::WcFifo, Policy::Rm];

    pub fn name(self) -> &'static str {
        match self {
            Policy::GedfRad => "gedf_rad",
            Policy::WcFifo => "wc_fifo",
            Policy::Rm => "rm",
        }
    }

    pub fn key(self, inst: &VertexInstance, tables: &StaticTables) -> PriorityKey {
        match self {
            Policy::GedfRad => priority_key_gedf_rad(inst, tables),
            Policy::WcFifo => priority_key_wc_fifo(inst),
            Policy::Rm => priority_key_rm(inst, tables),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown policy `{0}` (expected gedf_rad, wc_fifo or rm)")]
pub struct UnknownPolicy(pub String);

impl FromStr for Policy {
    type Err = UnknownPolicy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownPolicy(s.to_string()))
    }
}

/// Lower keys run first. The `(task_id, k, vertex)` tail makes the order
/// total, so every policy dispatches deterministically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PriorityKey {
    pub primary: Time,
    pub secondary: Time,
    pub task_id: TaskId,
    pub k: u64,
    pub vertex: VertexId,
}

impl PriorityKey {
    fn new(primary: Time, secondary: Time, inst: &VertexInstance) -> Self {
        Self {
            primary,
            secondary,
            task_id: inst.task_id,
            k: inst.k,
            vertex: inst.vertex,
        }
    }
}

/// Immutable per-task-set tables shared by every run.
#[derive(Debug, Clone)]
pub struct StaticTables {
    pub rad: RadBaseTable,
    pub periods: Vec<Time>,
}

/// `RAD(v^k) = base(v) + k·T`: the earliest absolute deadline among the
/// instance's descendant-or-self sinks.
pub fn rad(inst: &VertexInstance, table: &RadBaseTable, period: Time) -> Time {
    table.base(inst.task_idx, inst.vertex_idx) + inst.k * period
}

pub fn priority_key_gedf_rad(inst: &VertexInstance, tables: &StaticTables) -> PriorityKey {
    let period = tables.periods[inst.task_idx];
    PriorityKey::new(rad(inst, &tables.rad, period), 0, inst)
}

pub fn priority_key_wc_fifo(inst: &VertexInstance) -> PriorityKey {
    PriorityKey::new(inst.ready_at.unwrap_or(Time::MAX), 0, inst)
}

pub fn priority_key_rm(inst: &VertexInstance, tables: &StaticTables) -> PriorityKey {
    PriorityKey::new(
        tables.periods[inst.task_idx],
        inst.ready_at.unwrap_or(Time::MAX),
        inst,
    )
}
