//! Parameter sweeps with paired replications and CSV output.
//!
//! Replication `r` of every sweep point runs with seed `base_seed + r`, so
//! schedulers at the same point see identical channels and arrivals.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{run_summary, RunSummary};
use crate::format::sig9;
use crate::model::{ConfigErrors, RawConfig};
use crate::scheduler::SchedulerKind;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "FREEBS_THREADS";

pub const CSV_HEADER: &str = "param,value,rep,scheduler,seed,offloading_factor,throughput,min_delivery_ratio,max_queue_drift,qos_all_met";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Common transmit power of the BS and every user, in dB.
    BsPowerDb,
    NUsers,
    ControlV,
    ArrivalRate,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::BsPowerDb => "bs_power_db",
            SweepParam::NUsers => "n_users",
            SweepParam::ControlV => "control_v",
            SweepParam::ArrivalRate => "arrival_rate",
        }
    }

    /// Returns `base` with this parameter set to `value`.
    pub fn apply(self, base: &RawConfig, value: f64) -> RawConfig {
        let mut raw = base.clone();
        match self {
            SweepParam::BsPowerDb => raw.set_common_power_db(value),
            SweepParam::NUsers => raw.n_users = value as usize,
            SweepParam::ControlV => raw.control_v = value,
            SweepParam::ArrivalRate => raw.arrival_rate = value,
        }
        raw
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bs_power_db" => Ok(SweepParam::BsPowerDb),
            "n_users" => Ok(SweepParam::NUsers),
            "control_v" => Ok(SweepParam::ControlV),
            "arrival_rate" => Ok(SweepParam::ArrivalRate),
            other => Err(format!(
                "unknown sweep parameter {other:?} (expected bs_power_db, n_users, control_v or arrival_rate)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Spec(String),
    #[error("{param} = {value}: {source}")]
    Config {
        param: SweepParam,
        value: f64,
        source: ConfigErrors,
    },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("writing {path}: {source}")]
    Io { path: String, source: io::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
    pub replications: u32,
    pub schedulers: Vec<SchedulerKind>,
}

impl SweepSpec {
    pub fn new(
        parameter: SweepParam,
        values: Vec<f64>,
        replications: u32,
        schedulers: Vec<SchedulerKind>,
    ) -> Result<Self, SweepError> {
        if values.is_empty() {
            return Err(SweepError::Spec("no sweep values".into()));
        }
        if values
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(SweepError::Spec(
                "values must be strictly increasing".into(),
            ));
        }
        if replications == 0 {
            return Err(SweepError::Spec("replications must be ≥ 1".into()));
        }
        if schedulers.is_empty() {
            return Err(SweepError::Spec("no schedulers".into()));
        }
        if parameter == SweepParam::NUsers && values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
            return Err(SweepError::Spec(
                "n_users values must be positive integers".into(),
            ));
        }
        Ok(Self {
            parameter,
            values,
            replications,
            schedulers,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub rep: u32,
    pub scheduler: SchedulerKind,
    pub seed: u64,
    pub summary: RunSummary,
}

/// Runs every `(value, replication, scheduler)` combination. Rows come back
/// in that nesting order regardless of which run finishes first.
///
/// `threads` caps parallelism; `None` uses every core.
pub fn run_sweep(
    base: &RawConfig,
    spec: &SweepSpec,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>, SweepError> {
    let mut jobs = Vec::new();
    for &value in &spec.values {
        let raw = spec.parameter.apply(base, value);
        for rep in 0..spec.replications {
            let seed = base.seed.wrapping_add(u64::from(rep));
            let cfg = RawConfig {
                seed,
                ..raw.clone()
            }
            .validate()
            .map_err(|source| SweepError::Config {
                param: spec.parameter,
                value,
                source,
            })?;
            for &scheduler in &spec.schedulers {
                jobs.push((value, rep, scheduler, cfg.clone()));
            }
        }
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    let rows = pool.install(|| {
        jobs.into_par_iter()
            .map(|(value, rep, scheduler, cfg)| SweepRow {
                param: spec.parameter,
                value,
                rep,
                scheduler,
                seed: cfg.seed,
                summary: run_summary(&cfg, scheduler),
            })
            .collect()
    });
    Ok(rows)
}

/// Reads [`THREADS_ENV`]; unset or unparsable means no cap.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
}

pub fn emit_csv<W: Write>(w: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        let s = &r.summary;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.param,
            sig9(r.value),
            r.rep,
            r.scheduler,
            r.seed,
            sig9(s.offloading_factor),
            sig9(s.throughput),
            sig9(s.min_delivery_ratio()),
            sig9(s.queue_drift.max()),
            s.qos_all_met()
        )?;
    }
    Ok(())
}

pub fn write_csv(path: impl AsRef<Path>, rows: &[SweepRow]) -> Result<(), SweepError> {
    let path = path.as_ref();
    let io_err = |source| SweepError::Io {
        path: path.display().to_string(),
        source,
    };
    if rows.is_empty() {
        return Err(SweepError::Spec("no results to write".into()));
    }
    let mut buf = Vec::new();
    emit_csv(&mut buf, rows).map_err(io_err)?;
    fs::write(path, buf).map_err(io_err)
}

/// Mean and standard error of one column of `rows`, per sweep value, for one
/// scheduler.
pub fn mean_by_value(
    rows: &[SweepRow],
    scheduler: SchedulerKind,
    metric: impl Fn(&RunSummary) -> f64,
) -> Vec<(f64, f64, f64)> {
    let mut values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    values.dedup();
    values
        .into_iter()
        .map(|v| {
            let xs: Vec<f64> = rows
                .iter()
                .filter(|r| r.value == v && r.scheduler == scheduler)
                .map(|r| metric(&r.summary))
                .collect();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = if xs.len() > 1 {
                xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            (v, mean, (var / n).sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_base() -> RawConfig {
        RawConfig {
            n_slots: 500,
            seed: 11,
            ..RawConfig::default()
        }
    }

    #[test]
    fn spec_validation() {
        let s = |v: Vec<f64>, reps| {
            SweepSpec::new(SweepParam::ControlV, v, reps, vec![SchedulerKind::FreeBs])
        };
        assert!(s(vec![], 1).is_err());
        assert!(s(vec![2.0, 1.0], 1).is_err());
        assert!(s(vec![1.0, 1.0], 1).is_err());
        assert!(s(vec![1.0], 0).is_err());
        assert!(s(vec![1.0, 2.0], 3).is_ok());
        assert!(SweepSpec::new(
            SweepParam::NUsers,
            vec![2.5],
            1,
            vec![SchedulerKind::FreeBs]
        )
        .is_err());
    }

    #[test]
    fn row_count_and_order() {
        let spec = SweepSpec::new(
            SweepParam::NUsers,
            vec![2.0, 4.0, 8.0, 16.0],
            3,
            vec![SchedulerKind::FreeBs, SchedulerKind::Baseline],
        )
        .unwrap();
        let rows = run_sweep(&small_base(), &spec, Some(2)).unwrap();
        assert_eq!(rows.len(), 4 * 3 * 2);
        assert_eq!(rows[0].value, 2.0);
        assert_eq!(rows[1].scheduler, SchedulerKind::Baseline);
        assert_eq!(rows[2].rep, 1);
        assert_eq!(rows[2].seed, 12);
        assert_eq!(rows.last().unwrap().summary.delivery_ratio.len(), 16);
    }

    #[test]
    fn csv_is_identical_across_thread_counts() {
        let spec = SweepSpec::new(
            SweepParam::BsPowerDb,
            vec![10.0, 20.0],
            2,
            vec![SchedulerKind::FreeBs, SchedulerKind::Baseline],
        )
        .unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        emit_csv(&mut a, &run_sweep(&small_base(), &spec, Some(1)).unwrap()).unwrap();
        emit_csv(&mut b, &run_sweep(&small_base(), &spec, Some(4)).unwrap()).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
    }

    #[test]
    fn power_sweep_sets_all_nodes() {
        let raw = SweepParam::BsPowerDb.apply(&RawConfig::default(), 10.0);
        let cfg = raw.validate().unwrap();
        assert!((cfg.bs_power - 10.0).abs() < 1e-12);
        assert!(cfg.user_powers.iter().all(|p| (p - 10.0).abs() < 1e-12));
    }

    #[test]
    fn bad_config_surfaces_value() {
        let spec = SweepSpec::new(
            SweepParam::ArrivalRate,
            vec![0.5, 1.5],
            1,
            vec![SchedulerKind::FreeBs],
        )
        .unwrap();
        let err = run_sweep(&small_base(), &spec, Some(1)).unwrap_err();
        assert!(matches!(err, SweepError::Config { value, .. } if value == 1.5));
    }
}
