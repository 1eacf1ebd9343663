//! Synthetic workloads: the shipped template, execution-time samplers and
//! seeded generation of `(TaskSet, ExecAssignment)` pairs.

mod generate;
mod sampler;
mod template;

pub use generate::{
    generate, realized_normalized_utilization, Draw, GenConfig, GeneratedWorkload, Generator, LoadFactor,
};
pub use sampler::{ExecTimeSampler, VertexSampler};
pub use template::WorkloadTemplate;

use crate::taskmodel::{ModelError, VertexId};
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorkloadError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("sampler has no entry for vertex {vertex}")]
    SamplerMissingVertex { vertex: VertexId },
    #[error("sampler for vertex {vertex} can draw {sample}us, above its wcet of {wcet}us")]
    SampleExceedsWcet { vertex: VertexId, sample: Time, wcet: Time },
    #[error("sampler for vertex {vertex}: {reason}")]
    InvalidSampler { vertex: VertexId, reason: String },
    #[error("invalid load factor: {0}")]
    InvalidLoad(String),
    #[error("invalid workload file: {0}")]
    Parse(String),
}
