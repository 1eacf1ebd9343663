//! Monte-Carlo acceptance-ratio campaigns.
//!
//! Run `i` draws one workload from seed `base_seed + i`; every configured
//! policy is simulated on that same workload. Runs are bucketed by realized
//! normalized utilization and a bucket's acceptance ratio is the fraction of
//! its runs without any deadline miss.

mod campaign;
mod csv_out;

pub use campaign::{
    bucket_of, run_campaign, BucketSummary, CampaignConfig, CampaignSummary, ExperimentError, RunRecord,
    LOW_N_THRESHOLD,
};
pub use csv_out::{write_csv, RUNS_CSV, SUMMARY_CSV};
