//! Callback graphs, multi-deadline DAG tasks and their static analyses.

mod analysis;
mod decompose;
mod error;
mod graph;
mod task;

pub use analysis::{
    assign_deadlines, critical_path_length, descendant_sinks, hyper_period, rad_base_table,
    total_utilization, RadBaseTable,
};
pub(crate) use analysis::utilization_dense;
pub use decompose::decompose;
pub use error::ModelError;
pub use graph::{Callback, CallbackGraph, CallbackKind, EdgeKind, GraphEdge};
pub use task::{DagTask, ExecAssignment, TaskSet, Vertex};

pub type CallbackId = u32;
pub type TaskId = u32;
/// Vertex ids are the ids of the callbacks they were decomposed from.
pub type VertexId = u32;
