use std::collections::BTreeMap;
use std::hash::{DefaultHasher, Hash, Hasher};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rational::{self, serde_rational, Rational};
use crate::simulator::{run_with_tables, static_tables, Mode, Policy, SimConfig, SimError};
use crate::time::{ms, Time};
use crate::workload::{realized_normalized_utilization, Generator, LoadFactor, WorkloadError, WorkloadTemplate};

/// Buckets with fewer runs than this are too thin to compare policies on.
pub const LOW_N_THRESHOLD: u64 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub n_runs: u64,
    pub cores: usize,
    pub duration_us: Time,
    pub policies: Vec<Policy>,
    pub mode: Mode,
    #[serde(with = "serde_rational")]
    pub bucket_width: Rational,
    pub base_seed: u64,
    #[serde(with = "serde_rational")]
    pub beta: Rational,
    #[serde(with = "serde_rational")]
    pub lambda_lo: Rational,
    #[serde(with = "serde_rational")]
    pub lambda_hi: Rational,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            n_runs: 5000,
            cores: 7,
            duration_us: ms(3000),
            policies: Policy::ALL.to_vec(),
            mode: Mode::NonPreemptive,
            bucket_width: Ratio::new(1, 20),
            base_seed: 0,
            beta: Ratio::new(6, 5),
            lambda_lo: Ratio::new(1, 10),
            lambda_hi: Ratio::from_integer(1),
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: &str| Err(ExperimentError::Config(msg.to_string()));
        if self.n_runs == 0 {
            return bad("n_runs must be at least 1");
        }
        if self.cores == 0 {
            return bad("cores must be at least 1");
        }
        if self.duration_us == 0 {
            return bad("duration_us must be positive");
        }
        if *self.bucket_width.numer() == 0 || self.bucket_width > Ratio::from_integer(1) {
            return bad("bucket_width must be in (0, 1]");
        }
        if *self.beta.numer() == 0 {
            return bad("beta must be positive");
        }
        if self.policies.is_empty() {
            return bad("at least one policy is required");
        }
        let mut seen = self.policies.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.policies.len() {
            return bad("policies must not repeat");
        }
        self.load().validate().map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(&self) -> LoadFactor {
        if self.lambda_lo == self.lambda_hi {
            LoadFactor::Fixed { lambda: self.lambda_lo }
        } else {
            LoadFactor::Sweep {
                lo: self.lambda_lo,
                hi: self.lambda_hi,
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid campaign config: {0}")]
    Config(String),
    #[error("workload setup failed: {0}")]
    Setup(#[source] WorkloadError),
    #[error("run {run}: workload generation failed: {source}")]
    Generation { run: u64, source: WorkloadError },
    #[error("run {run}, policy {policy}: simulation failed: {source}")]
    Simulation { run: u64, policy: Policy, source: SimError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-run, per-policy ledger entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub policy: Policy,
    pub run_id: u64,
    pub seed: u64,
    pub realized_norm_util: Rational,
    pub bucket: Rational,
    pub misses: usize,
    pub passed: bool,
    /// Hash of the execution-time assignment the policy was simulated on.
    pub workload_hash: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketSummary {
    pub policy: Policy,
    pub bucket: Rational,
    pub runs: u64,
    pub passes: u64,
}

impl BucketSummary {
    pub fn acceptance_ratio(&self) -> Rational {
        Ratio::new(u128::from(self.passes), u128::from(self.runs))
    }

    pub fn low_n(&self) -> bool {
        self.runs < LOW_N_THRESHOLD
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignSummary {
    /// Sorted by `(policy name, bucket, run_id)`.
    pub runs: Vec<RunRecord>,
    /// Sorted by `(policy name, bucket)`; only non-empty buckets appear.
    pub buckets: Vec<BucketSummary>,
}

impl CampaignSummary {
    pub fn bucket(&self, policy: Policy, bucket: Rational) -> Option<&BucketSummary> {
        self.buckets
            .iter()
            .find(|b| b.policy == policy && b.bucket == bucket)
    }

    /// Builds the sorted ledger and bucket table from records in any order.
    pub fn from_records(mut runs: Vec<RunRecord>) -> Self {
        runs.sort_by(|a, b| {
            (a.policy.name(), a.bucket, a.run_id).cmp(&(b.policy.name(), b.bucket, b.run_id))
        });
        let mut table: BTreeMap<(&'static str, Rational), BucketSummary> = BTreeMap::new();
        for r in &runs {
            let entry = table
                .entry((r.policy.name(), r.bucket))
                .or_insert_with(|| BucketSummary {
                    policy: r.policy,
                    bucket: r.bucket,
                    runs: 0,
                    passes: 0,
                });
            entry.runs += 1;
            entry.passes += u64::from(r.passed);
        }
        Self {
            runs,
            buckets: table.into_values().collect(),
        }
    }
}

/// Nearest multiple of `width`, halves rounded up.
pub fn bucket_of(utilization: Rational, width: Rational) -> Rational {
    let steps = rational::round_half_up(utilization / width);
    width * Ratio::from_integer(steps)
}

/// Runs the campaign on `template` using up to `jobs` worker threads.
///
/// The summary does not depend on `jobs`.
pub fn run_campaign(
    config: &CampaignConfig,
    template: &WorkloadTemplate,
    jobs: usize,
) -> Result<CampaignSummary, ExperimentError> {
    config.validate()?;
    let sampler = template.effective_sampler();
    let generator =
        Generator::new(template, &sampler, config.beta, config.load()).map_err(ExperimentError::Setup)?;
    let tables = static_tables(generator.taskset());

    let one_run = |run_id: u64| -> Result<Vec<RunRecord>, ExperimentError> {
        let seed = config.base_seed.wrapping_add(run_id);
        let draw = generator.draw(seed);
        let util = realized_normalized_utilization(generator.taskset(), &draw.exec, config.cores)
            .map_err(|source| ExperimentError::Generation { run: run_id, source })?;
        let bucket = bucket_of(util, config.bucket_width);
        config
            .policies
            .iter()
            .map(|&policy| {
                let sim = SimConfig::new(config.cores, config.duration_us, policy).mode(config.mode);
                let result = run_with_tables(generator.taskset(), &tables, &draw.exec, &sim)
                    .map_err(|source| ExperimentError::Simulation {
                        run: run_id,
                        policy,
                        source,
                    })?;
                let mut hasher = DefaultHasher::new();
                draw.exec.hash(&mut hasher);
                Ok(RunRecord {
                    policy,
                    run_id,
                    seed,
                    realized_norm_util: util,
                    bucket,
                    misses: result.misses,
                    passed: result.passed(),
                    workload_hash: hasher.finish(),
                })
            })
            .collect()
    };

    let per_run: Vec<Vec<RunRecord>> = if jobs <= 1 {
        (0..config.n_runs).map(one_run).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ExperimentError::Config(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..config.n_runs)
                .into_par_iter()
                .map(one_run)
                .collect::<Result<_, _>>()
        })?
    };
    Ok(CampaignSummary::from_records(per_run.into_iter().flatten().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u128, d: u128) -> Rational {
        Ratio::new(n, d)
    }

    #[test]
    fn bucket_rounding() {
        assert_eq!(bucket_of(r(52, 100), r(1, 20)), r(1, 2));
        assert_eq!(bucket_of(r(53, 100), r(1, 20)), r(11, 20));
        // exactly half way goes up
        assert_eq!(bucket_of(r(525, 1000), r(1, 20)), r(11, 20));
        assert_eq!(bucket_of(r(1, 100), r(1, 20)), r(0, 1));
        assert_eq!(bucket_of(r(7, 10), r(1, 2)), r(1, 2));
    }

    #[test]
    fn config_validation() {
        assert!(CampaignConfig::default().validate().is_ok());
        let bad = [
            CampaignConfig { n_runs: 0, ..Default::default() },
            CampaignConfig { cores: 0, ..Default::default() },
            CampaignConfig { duration_us: 0, ..Default::default() },
            CampaignConfig { bucket_width: r(0, 1), ..Default::default() },
            CampaignConfig { bucket_width: r(3, 2), ..Default::default() },
            CampaignConfig { beta: r(0, 1), ..Default::default() },
            CampaignConfig { policies: vec![], ..Default::default() },
            CampaignConfig { policies: vec![Policy::Rm, Policy::Rm], ..Default::default() },
            CampaignConfig { lambda_lo: r(1, 1), lambda_hi: r(1, 2), ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn config_json_uses_us_suffix_and_defaults() {
        let c = CampaignConfig::from_json(r#"{"n_runs": 10, "duration_us": 1000, "beta": 1.5,
            "policies": ["rm", "gedf_rad"], "mode": "preemptive"}"#)
        .unwrap();
        assert_eq!(c.n_runs, 10);
        assert_eq!(c.duration_us, 1000);
        assert_eq!(c.beta, r(3, 2));
        assert_eq!(c.cores, 7);
        assert_eq!(c.mode, Mode::Preemptive);
        assert!(CampaignConfig::from_json(r#"{"duration_ms": 5}"#).is_err());
        let back = CampaignConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn summary_aggregation() {
        let rec = |policy, run_id, bucket: Rational, passed: bool| RunRecord {
            policy,
            run_id,
            seed: run_id,
            realized_norm_util: bucket,
            bucket,
            misses: usize::from(!passed),
            passed,
            workload_hash: 0,
        };
        let s = CampaignSummary::from_records(vec![
            rec(Policy::WcFifo, 1, r(1, 2), false),
            rec(Policy::GedfRad, 1, r(1, 2), true),
            rec(Policy::GedfRad, 0, r(1, 2), true),
            rec(Policy::WcFifo, 0, r(1, 2), true),
            rec(Policy::GedfRad, 2, r(1, 4), false),
        ]);
        assert_eq!(s.buckets.len(), 3);
        let b = s.bucket(Policy::WcFifo, r(1, 2)).unwrap();
        assert_eq!((b.runs, b.passes), (2, 1));
        assert_eq!(b.acceptance_ratio(), r(1, 2));
        assert!(b.low_n());
        let order: Vec<_> = s.runs.iter().map(|r| (r.policy, r.run_id)).collect();
        assert_eq!(
            order,
            vec![
                (Policy::GedfRad, 2),
                (Policy::GedfRad, 0),
                (Policy::GedfRad, 1),
                (Policy::WcFifo, 0),
                (Policy::WcFifo, 1),
            ]
        );
    }
}
