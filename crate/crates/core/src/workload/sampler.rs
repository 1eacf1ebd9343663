use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::WorkloadError;
use crate::rational;
use crate::taskmodel::{CallbackGraph, TaskSet, VertexId};
use crate::time::Time;

/// Execution-time distribution for one vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VertexSampler {
    /// Uniform over the listed measurements.
    Empirical { samples_us: Vec<Time> },
    /// Uniform over the integers `lo_us..=hi_us`.
    Uniform { lo_us: Time, hi_us: Time },
}

impl VertexSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Time {
        match self {
            VertexSampler::Empirical { samples_us } => samples_us[rng.random_range(0..samples_us.len())],
            VertexSampler::Uniform { lo_us, hi_us } => rng.random_range(*lo_us..=*hi_us),
        }
    }

    fn max(&self) -> Option<Time> {
        match self {
            VertexSampler::Empirical { samples_us } => samples_us.iter().copied().max(),
            VertexSampler::Uniform { hi_us, .. } => Some(*hi_us),
        }
    }

    fn check(&self, vertex: VertexId, wcet: Time) -> Result<(), WorkloadError> {
        let invalid = |reason: &str| WorkloadError::InvalidSampler {
            vertex,
            reason: reason.to_string(),
        };
        match self {
            VertexSampler::Empirical { samples_us } => {
                if samples_us.is_empty() {
                    return Err(invalid("empirical sampler has no samples"));
                }
                if samples_us.contains(&0) {
                    return Err(invalid("samples must be positive"));
                }
            }
            VertexSampler::Uniform { lo_us, hi_us } => {
                if *lo_us == 0 || lo_us > hi_us {
                    return Err(invalid("uniform range must satisfy 0 < lo <= hi"));
                }
            }
        }
        match self.max() {
            Some(sample) if sample > wcet => Err(WorkloadError::SampleExceedsWcet { vertex, sample, wcet }),
            _ => Ok(()),
        }
    }
}

/// Per-vertex execution-time samplers keyed by vertex (callback) id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExecTimeSampler {
    pub vertices: BTreeMap<VertexId, VertexSampler>,
}

impl ExecTimeSampler {
    /// Uniform over `[ceil(0.7·wcet), wcet]` for every callback.
    pub fn default_for(graph: &CallbackGraph) -> Self {
        Self::default_uniform(graph.callbacks.iter().map(|c| (c.id, c.wcet_us)))
    }

    /// The same default, built from an already decomposed task set.
    pub fn default_for_taskset(taskset: &TaskSet) -> Self {
        Self::default_uniform(
            taskset
                .tasks()
                .iter()
                .flat_map(|t| t.vertices().iter().map(|v| (v.id, v.wcet_us))),
        )
    }

    fn default_uniform(wcets: impl IntoIterator<Item = (VertexId, Time)>) -> Self {
        let vertices = wcets
            .into_iter()
            .map(|(id, wcet)| {
                let lo = rational::ceil(Ratio::new(7 * u128::from(wcet), 10));
                let lo = Time::try_from(lo).unwrap_or(wcet).max(1);
                (id, VertexSampler::Uniform { lo_us: lo, hi_us: wcet })
            })
            .collect();
        Self { vertices }
    }

    /// Every vertex always takes `value(id)`.
    pub fn fixed(values: impl IntoIterator<Item = (VertexId, Time)>) -> Self {
        Self {
            vertices: values
                .into_iter()
                .map(|(id, v)| (id, VertexSampler::Empirical { samples_us: vec![v] }))
                .collect(),
        }
    }

    pub fn get(&self, vertex: VertexId) -> Option<&VertexSampler> {
        self.vertices.get(&vertex)
    }

    /// Checks coverage of every vertex and `0 < sample <= wcet`.
    pub fn validate(&self, taskset: &TaskSet) -> Result<(), WorkloadError> {
        for task in taskset.tasks() {
            for v in task.vertices() {
                let sampler = self
                    .vertices
                    .get(&v.id)
                    .ok_or(WorkloadError::SamplerMissingVertex { vertex: v.id })?;
                sampler.check(v.id, v.wcet_us)?;
            }
        }
        Ok(())
    }
}
