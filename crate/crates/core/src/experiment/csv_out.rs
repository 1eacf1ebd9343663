use std::fs;
use std::path::{Path, PathBuf};

use super::{CampaignSummary, ExperimentError};
use crate::rational::to_fixed;

pub const RUNS_CSV: &str = "runs.csv";
pub const SUMMARY_CSV: &str = "summary.csv";

const PLACES: u32 = 6;

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, ExperimentError> {
    let file = fs::File::create(path)?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(e: csv::Error) -> ExperimentError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => ExperimentError::Io(io),
        other => ExperimentError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Writes `runs.csv` and `summary.csv` into `dir`, creating it if needed.
pub fn write_csv(summary: &CampaignSummary, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(dir)?;

    let runs_path = dir.join(RUNS_CSV);
    let mut w = writer(&runs_path)?;
    w.write_record(["policy", "run_id", "seed", "realized_norm_util", "bucket", "misses", "passed"])
        .map_err(csv_err)?;
    for r in &summary.runs {
        w.write_record([
            r.policy.name().to_string(),
            r.run_id.to_string(),
            r.seed.to_string(),
            to_fixed(r.realized_norm_util, PLACES),
            to_fixed(r.bucket, PLACES),
            r.misses.to_string(),
            r.passed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;

    let summary_path = dir.join(SUMMARY_CSV);
    let mut w = writer(&summary_path)?;
    w.write_record(["policy", "bucket", "runs", "passes", "acceptance_ratio"])
        .map_err(csv_err)?;
    for b in &summary.buckets {
        w.write_record([
            b.policy.name().to_string(),
            to_fixed(b.bucket, PLACES),
            b.runs.to_string(),
            b.passes.to_string(),
            to_fixed(b.acceptance_ratio(), PLACES),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;

    Ok(vec![runs_path, summary_path])
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;
    use crate::experiment::RunRecord;
    use crate::simulator::Policy;

    fn rec(policy: Policy, run_id: u64, bucket: (u128, u128), passed: bool) -> RunRecord {
        let b = Ratio::new(bucket.0, bucket.1);
        RunRecord {
            policy,
            run_id,
            seed: 100 + run_id,
            realized_norm_util: b,
            bucket: b,
            misses: usize::from(!passed),
            passed,
            workload_hash: 0,
        }
    }

    #[test]
    fn six_summary_rows_for_two_policies_three_buckets() {
        let mut records = Vec::new();
        for (i, b) in [(1, 10), (1, 2), (9, 10)].into_iter().enumerate() {
            for p in [Policy::GedfRad, Policy::Rm] {
                records.push(rec(p, i as u64, b, true));
            }
        }
        let s = CampaignSummary::from_records(records);
        let dir = tempfile::tempdir().unwrap();
        write_csv(&s, dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join(SUMMARY_CSV)).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "policy,bucket,runs,passes,acceptance_ratio");
        assert_eq!(lines[1], "gedf_rad,0.100000,1,1,1.000000");
        assert_eq!(lines[4], "rm,0.100000,1,1,1.000000");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn ratio_formatting_and_empty_buckets() {
        let mut records: Vec<_> = (0..20)
            .map(|i| rec(Policy::WcFifo, i, (17, 20), i < 17))
            .collect();
        records.push(rec(Policy::GedfRad, 99, (3, 10), true));
        let s = CampaignSummary::from_records(records);
        let dir = tempfile::tempdir().unwrap();
        write_csv(&s, &dir.path().join("nested/out")).unwrap();
        let text = fs::read_to_string(dir.path().join("nested/out").join(SUMMARY_CSV)).unwrap();
        assert_eq!(
            text,
            "policy,bucket,runs,passes,acceptance_ratio\n\
             gedf_rad,0.300000,1,1,1.000000\n\
             wc_fifo,0.850000,20,17,0.850000\n"
        );
        let runs = fs::read_to_string(dir.path().join("nested/out").join(RUNS_CSV)).unwrap();
        assert_eq!(runs.lines().count(), 22);
        assert_eq!(
            runs.lines().nth(1).unwrap(),
            "gedf_rad,99,199,0.300000,0.300000,0,true"
        );
    }
}
