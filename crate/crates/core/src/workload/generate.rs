use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExecTimeSampler, VertexSampler, WorkloadError, WorkloadTemplate};
use crate::rational::{self, serde_rational, Rational};
use crate::taskmodel::{decompose, total_utilization, ExecAssignment, TaskSet};
use crate::time::Time;

/// Resolution of a swept λ draw.
const SWEEP_STEPS: u64 = 1_000_000;

/// Scale applied to every sampled execution time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadFactor {
    Fixed {
        #[serde(with = "serde_rational")]
        lambda: Rational,
    },
    /// λ drawn uniformly from `[lo, hi]` once per run.
    Sweep {
        #[serde(with = "serde_rational")]
        lo: Rational,
        #[serde(with = "serde_rational")]
        hi: Rational,
    },
}

impl LoadFactor {
    pub fn fixed(lambda: Rational) -> Self {
        LoadFactor::Fixed { lambda }
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        let one = Ratio::from_integer(1);
        let in_range = |x: Rational| *x.numer() > 0 && x <= one;
        match *self {
            LoadFactor::Fixed { lambda } if !in_range(lambda) => {
                Err(WorkloadError::InvalidLoad(format!("λ = {lambda} is outside (0, 1]")))
            }
            LoadFactor::Sweep { lo, hi } if !in_range(lo) || !in_range(hi) || lo > hi => Err(
                WorkloadError::InvalidLoad(format!("sweep [{lo}, {hi}] must satisfy 0 < lo <= hi <= 1")),
            ),
            _ => Ok(()),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Rational {
        match *self {
            LoadFactor::Fixed { lambda } => lambda,
            LoadFactor::Sweep { lo, hi } => {
                let step = rng.random_range(0..=SWEEP_STEPS);
                lo + (hi - lo) * Ratio::new(u128::from(step), u128::from(SWEEP_STEPS))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub beta: Rational,
    pub load: LoadFactor,
}

/// One run's frozen execution times and the λ that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Draw {
    pub lambda: Rational,
    pub exec: ExecAssignment,
}

/// Decomposes a template once and draws per-run execution times from it.
///
/// Deadlines come from WCET critical paths and β only, so they are identical
/// for every draw.
#[derive(Debug, Clone)]
pub struct Generator {
    taskset: TaskSet,
    samplers: Vec<Vec<VertexSampler>>,
    load: LoadFactor,
}

impl Generator {
    pub fn new(
        template: &WorkloadTemplate,
        sampler: &ExecTimeSampler,
        beta: Rational,
        load: LoadFactor,
    ) -> Result<Self, WorkloadError> {
        Self::for_taskset(decompose(&template.graph(), beta)?, sampler, load)
    }

    /// Draws execution times for a task set that was decomposed elsewhere.
    pub fn for_taskset(taskset: TaskSet, sampler: &ExecTimeSampler, load: LoadFactor) -> Result<Self, WorkloadError> {
        load.validate()?;
        sampler.validate(&taskset)?;
        let samplers = taskset
            .tasks()
            .iter()
            .map(|t| {
                t.vertices()
                    .iter()
                    .map(|v| sampler.get(v.id).expect("validated coverage").clone())
                    .collect()
            })
            .collect();
        Ok(Self {
            taskset,
            samplers,
            load,
        })
    }

    pub fn taskset(&self) -> &TaskSet {
        &self.taskset
    }

    /// λ first, then one sample per vertex in task and vertex order.
    pub fn draw(&self, seed: u64) -> Draw {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = self.load.draw(&mut rng);
        let mut exec = ExecAssignment::new();
        for (task, samplers) in self.taskset.tasks().iter().zip(&self.samplers) {
            for (v, sampler) in task.vertices().iter().zip(samplers) {
                let sample = sampler.sample(&mut rng);
                let scaled = rational::round_half_up(lambda * Ratio::from_integer(u128::from(sample)));
                let time = Time::try_from(scaled).expect("scaled sample <= sample").max(1);
                exec.insert(task.task_id(), v.id, time);
            }
        }
        Draw { lambda, exec }
    }
}

/// A generated simulation input as written to disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratedWorkload {
    pub seed: u64,
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    pub taskset: TaskSet,
    pub exec: ExecAssignment,
}

impl GeneratedWorkload {
    /// Parses the file and checks that `exec` covers every vertex within its WCET.
    pub fn from_json(text: &str) -> Result<Self, WorkloadError> {
        let w: Self = serde_json::from_str(text).map_err(|e| WorkloadError::Parse(e.to_string()))?;
        let dense = w.exec.dense(&w.taskset)?;
        for (task, times) in w.taskset.tasks().iter().zip(&dense) {
            for (v, &time) in task.vertices().iter().zip(times) {
                if time > v.wcet_us {
                    return Err(WorkloadError::SampleExceedsWcet {
                        vertex: v.id,
                        sample: time,
                        wcet: v.wcet_us,
                    });
                }
            }
        }
        Ok(w)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("workload serialization is infallible")
    }
}

/// Decomposes `template` with `config.beta` and draws one execution-time
/// assignment from `config.seed`.
pub fn generate(
    template: &WorkloadTemplate,
    sampler: &ExecTimeSampler,
    config: &GenConfig,
) -> Result<(TaskSet, ExecAssignment), WorkloadError> {
    let generator = Generator::new(template, sampler, config.beta, config.load)?;
    let Draw { exec, .. } = generator.draw(config.seed);
    Ok((generator.taskset, exec))
}

/// Total utilization divided by the core count.
pub fn realized_normalized_utilization(
    taskset: &TaskSet,
    exec: &ExecAssignment,
    cores: usize,
) -> Result<Rational, WorkloadError> {
    if cores == 0 {
        return Err(WorkloadError::InvalidLoad("core count must be at least 1".into()));
    }
    Ok(total_utilization(taskset, exec)? / Ratio::from_integer(cores as u128))
}
