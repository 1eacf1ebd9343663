use crate::time::Time;

use super::{CallbackId, TaskId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate callback id {0}")]
    DuplicateCallbackId(CallbackId),
    #[error("edge {src} -> {dst} refers to an unknown callback")]
    UnknownEndpoint { src: CallbackId, dst: CallbackId },
    #[error("self-loop on callback {0}")]
    SelfLoop(CallbackId),
    #[error("timer callback {0} has no period")]
    MissingPeriod(CallbackId),
    #[error("non-timer callback {0} must not declare a period")]
    UnexpectedPeriod(CallbackId),
    #[error("callback {0} has a zero period")]
    ZeroPeriod(CallbackId),
    #[error("callback {0} has a zero wcet")]
    ZeroWcet(CallbackId),
    #[error("publish/subscribe edges form a cycle through callbacks {callbacks:?}")]
    CycleAfterSplit { callbacks: Vec<CallbackId> },
    #[error("component {callbacks:?} has no timer callback as its source")]
    ComponentWithoutTimerSource { callbacks: Vec<CallbackId> },
    #[error("component {callbacks:?} has {} sources {sources:?}; exactly one is required", sources.len())]
    MultipleSources {
        sources: Vec<CallbackId>,
        callbacks: Vec<CallbackId>,
    },
    #[error("component {callbacks:?} contains several timer callbacks {timers:?}")]
    MultipleTimers {
        timers: Vec<CallbackId>,
        callbacks: Vec<CallbackId>,
    },

    #[error("task {task}: no vertices")]
    EmptyTask { task: TaskId },
    #[error("task {task}: period must be positive")]
    ZeroTaskPeriod { task: TaskId },
    #[error("task {task}: duplicate vertex id {vertex}")]
    DuplicateVertexId { task: TaskId, vertex: VertexId },
    #[error("task {task}: vertex {vertex} has a zero wcet")]
    ZeroVertexWcet { task: TaskId, vertex: VertexId },
    #[error("task {task}: edge {src} -> {dst} refers to an unknown vertex")]
    UnknownEdgeVertex {
        task: TaskId,
        src: VertexId,
        dst: VertexId,
    },
    #[error("task {task}: duplicate or self edge {src} -> {dst}")]
    InvalidEdge {
        task: TaskId,
        src: VertexId,
        dst: VertexId,
    },
    #[error("task {task}: graph is cyclic")]
    CyclicTask { task: TaskId },
    #[error("task {task}: expected exactly one source vertex, found {sources:?}")]
    SourceCount { task: TaskId, sources: Vec<VertexId> },
    #[error("task {task}: vertex {vertex} is unreachable from the source")]
    Unreachable { task: TaskId, vertex: VertexId },
    #[error("task {task}: sink {vertex} has no relative deadline")]
    MissingDeadline { task: TaskId, vertex: VertexId },
    #[error("task {task}: deadline given for non-sink vertex {vertex}")]
    DeadlineOnNonSink { task: TaskId, vertex: VertexId },
    #[error("task {task}: deadline of sink {vertex} must be positive")]
    ZeroDeadline { task: TaskId, vertex: VertexId },

    #[error("task set is empty")]
    EmptyTaskSet,
    #[error("duplicate task id {0}")]
    DuplicateTaskId(TaskId),
    #[error("task {task}: vertex {vertex} is not a sink")]
    NotASink { task: TaskId, vertex: VertexId },
    #[error("task {task}: unknown vertex {vertex}")]
    UnknownVertex { task: TaskId, vertex: VertexId },
    #[error("unknown task {0}")]
    UnknownTask(TaskId),
    #[error("deadline factor beta must be positive")]
    NonPositiveBeta,
    #[error("{what} overflows the {} range", std::any::type_name::<Time>())]
    Overflow { what: &'static str },
    #[error("task {task}: vertex {vertex} has no positive execution time")]
    InvalidExecAssignment { task: TaskId, vertex: VertexId },
}
