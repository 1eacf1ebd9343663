use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{Mode, Policy};
use crate::rational::{serde_rational, Rational};
use crate::taskmodel::{TaskId, VertexId};
use crate::time::Time;

/// Classification of one sink instance.
///
/// Deadlines past `duration` are never classified; callers filter them out
/// before asking.
pub fn detect_miss(finish: Option<Time>, deadline: Time, duration: Time) -> bool {
    match finish {
        Some(f) => f > deadline,
        None => deadline <= duration,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SinkRecord {
    pub task: TaskId,
    pub k: u64,
    pub sink: VertexId,
    pub finish_us: Option<Time>,
    pub deadline_us: Time,
    pub missed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Release,
    Start,
    Preempt,
    Finish,
    Miss,
}

/// One trace line: `{t_us, core, task, k, vertex, event}`.
///
/// Release events carry the job's source vertex, miss events the sink; both
/// have no core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceEvent {
    pub t_us: Time,
    pub core: Option<usize>,
    pub task: TaskId,
    pub k: u64,
    pub vertex: VertexId,
    pub event: TraceKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimWarning {
    DurationNotHyperPeriodMultiple { duration_us: Time, hyper_period_us: Time },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimResult {
    pub policy: Policy,
    pub mode: Mode,
    pub cores: usize,
    pub duration_us: Time,
    /// Sink instances whose deadline falls within the simulated window,
    /// ordered by `(task position, k, sink id)`.
    pub sinks: Vec<SinkRecord>,
    pub misses: usize,
    #[serde(with = "serde_rational")]
    pub realized_utilization: Rational,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<SimWarning>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<TraceEvent>,
}

impl SimResult {
    pub fn passed(&self) -> bool {
        self.misses == 0
    }

    /// Writes the trace as JSON lines.
    pub fn write_trace<W: Write>(&self, mut out: W) -> io::Result<()> {
        for ev in &self.trace {
            serde_json::to_writer(&mut out, ev)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}
