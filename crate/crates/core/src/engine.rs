//! The slot loop: arrivals, fading draws, scheduling, queue updates and
//! metric accumulation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::channel::FadingModel;
use crate::model::{GainMatrix, SimConfig, SlotDecision, VirtualQueueState};
use crate::scheduler::SchedulerKind;

/// `qos_met` accepts a delivery ratio this far below the target.
pub const QOS_TOLERANCE: f64 = 1e-2;

/// Default threshold on `Q(K)/K` for [`check_stability`].
pub const DEFAULT_STABILITY_EPSILON: f64 = 1e-2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("cannot summarize an empty record stream")]
    EmptyRecords,
}

/// One slot of a trace. Queue values are post-update, i.e. `Y(k+1)`, `Z(k+1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotRecord {
    /// 1-based slot index.
    pub slot: u64,
    pub arrival: bool,
    pub phase1_threshold: Option<f64>,
    pub mu1: f64,
    pub mu2: f64,
    pub relay: Option<usize>,
    pub aux_r: u8,
    pub decoded: Vec<bool>,
    pub y: Vec<f64>,
    pub z: f64,
    pub all_infeasible: bool,
}

impl SlotRecord {
    pub fn decoded_count(&self) -> usize {
        self.decoded.iter().filter(|&&d| d).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueueDrift {
    pub y: Vec<f64>,
    pub z: f64,
}

impl QueueDrift {
    pub fn max(&self) -> f64 {
        self.y.iter().copied().fold(self.z, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub slots: u64,
    pub arrivals: u64,
    /// Mean of `mu_II / T` over all slots.
    pub offloading_factor: f64,
    /// Per user: packets decoded / packets arrived. Reported as 1 when no
    /// packet arrived (the QoS constraint holds vacuously).
    pub delivery_ratio: Vec<f64>,
    /// Mean number of users decoding per slot.
    pub throughput: f64,
    pub queue_drift: QueueDrift,
    pub qos_met: Vec<bool>,
    /// Slots in which a packet arrived but no Phase-I rate fit the slot.
    pub infeasible_slots: u64,
}

impl RunSummary {
    pub fn min_delivery_ratio(&self) -> f64 {
        self.delivery_ratio
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn qos_all_met(&self) -> bool {
        self.qos_met.iter().all(|&m| m)
    }
}

/// Streaming accumulator behind [`summarize`].
#[derive(Debug, Clone)]
pub struct SummaryBuilder {
    slot_duration: f64,
    qos: Vec<f64>,
    slots: u64,
    arrivals: u64,
    mu2_sum: f64,
    decoded: Vec<u64>,
    infeasible: u64,
    last_y: Vec<f64>,
    last_z: f64,
}

impl SummaryBuilder {
    pub fn new(cfg: &SimConfig) -> Self {
        Self {
            slot_duration: cfg.slot_duration,
            qos: cfg.qos.clone(),
            slots: 0,
            arrivals: 0,
            mu2_sum: 0.0,
            decoded: vec![0; cfg.n_users],
            infeasible: 0,
            last_y: vec![0.0; cfg.n_users],
            last_z: 0.0,
        }
    }

    pub fn push(&mut self, r: &SlotRecord) {
        self.slots += 1;
        self.arrivals += u64::from(r.arrival);
        self.mu2_sum += r.mu2 / self.slot_duration;
        for (c, &d) in self.decoded.iter_mut().zip(&r.decoded) {
            *c += u64::from(d);
        }
        self.infeasible += u64::from(r.all_infeasible);
        self.last_y.clone_from(&r.y);
        self.last_z = r.z;
    }

    pub fn finish(self) -> Result<RunSummary, EngineError> {
        if self.slots == 0 {
            return Err(EngineError::EmptyRecords);
        }
        let k = self.slots as f64;
        let delivery_ratio: Vec<f64> = self
            .decoded
            .iter()
            .map(|&d| {
                if self.arrivals == 0 {
                    1.0
                } else {
                    d as f64 / self.arrivals as f64
                }
            })
            .collect();
        let qos_met = delivery_ratio
            .iter()
            .zip(&self.qos)
            .map(|(&ratio, &q)| self.arrivals == 0 || ratio >= q - QOS_TOLERANCE)
            .collect();
        Ok(RunSummary {
            slots: self.slots,
            arrivals: self.arrivals,
            offloading_factor: self.mu2_sum / k,
            delivery_ratio,
            throughput: self.decoded.iter().sum::<u64>() as f64 / k,
            queue_drift: QueueDrift {
                y: self.last_y.iter().map(|y| y / k).collect(),
                z: self.last_z / k,
            },
            qos_met,
            infeasible_slots: self.infeasible,
        })
    }
}

pub fn summarize(records: &[SlotRecord], cfg: &SimConfig) -> Result<RunSummary, EngineError> {
    let mut b = SummaryBuilder::new(cfg);
    records.iter().for_each(|r| b.push(r));
    b.finish()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stability {
    pub y: Vec<bool>,
    pub z: bool,
}

impl Stability {
    pub fn all(&self) -> bool {
        self.z && self.y.iter().all(|&s| s)
    }
}

/// Empirical mean-rate-stability check: queue `Q` passes iff `Q(K)/K < epsilon`.
pub fn check_stability(records: &[SlotRecord], epsilon: f64) -> Stability {
    let Some(last) = records.last() else {
        return Stability {
            y: Vec::new(),
            z: true,
        };
    };
    let k = records.len() as f64;
    Stability {
        y: last.y.iter().map(|y| y / k < epsilon).collect(),
        z: last.z / k < epsilon,
    }
}

/// A running simulation, yielding one [`SlotRecord`] per slot for
/// `cfg.n_slots` slots.
///
/// Gains and arrivals use separate random streams derived from `cfg.seed`, so
/// every scheduler sees the same channel and arrival sequence.
pub struct Simulation<'a> {
    cfg: &'a SimConfig,
    scheduler: SchedulerKind,
    fading: FadingModel,
    arrivals: ChaCha8Rng,
    queues: VirtualQueueState,
    slot: u64,
}

impl<'a> Simulation<'a> {
    pub fn new(cfg: &'a SimConfig, scheduler: SchedulerKind) -> Self {
        let mut arrivals = ChaCha8Rng::seed_from_u64(cfg.seed);
        arrivals.set_stream(1);
        Self {
            cfg,
            scheduler,
            fading: FadingModel::new(cfg.seed),
            arrivals,
            queues: VirtualQueueState::new(cfg.n_users),
            slot: 0,
        }
    }

    pub fn queues(&self) -> &VirtualQueueState {
        &self.queues
    }

    /// Advances one slot.
    pub fn step(&mut self) -> SlotOutcome {
        let cfg = self.cfg;
        self.slot += 1;
        let arrival = self.arrivals.random::<f64>() < cfg.arrival_rate;
        let gains = self.fading.sample_slot_gains(cfg);
        let decision = self.scheduler.decide(&gains, &self.queues, arrival, cfg);
        // aux_r was chosen from the pre-update Z inside the scheduler.
        self.queues.update(
            arrival,
            &cfg.qos,
            &decision.decoded,
            decision.aux_r,
            decision.mu2 / cfg.slot_duration,
        );
        let record = SlotRecord {
            slot: self.slot,
            arrival,
            phase1_threshold: decision.phase1_threshold,
            mu1: decision.mu1,
            mu2: decision.mu2,
            relay: decision.relay,
            aux_r: decision.aux_r,
            decoded: decision.decoded.clone(),
            y: self.queues.y.clone(),
            z: self.queues.z,
            all_infeasible: decision.all_infeasible,
        };
        SlotOutcome {
            gains,
            decision,
            record,
        }
    }
}

/// Everything produced by one [`Simulation::step`].
#[derive(Debug, Clone)]
pub struct SlotOutcome {
    pub gains: GainMatrix,
    pub decision: SlotDecision,
    pub record: SlotRecord,
}

impl Iterator for Simulation<'_> {
    type Item = SlotRecord;

    fn next(&mut self) -> Option<SlotRecord> {
        (self.slot < self.cfg.n_slots).then(|| self.step().record)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.cfg.n_slots - self.slot) as usize;
        (left, Some(left))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<SlotRecord>,
    pub summary: RunSummary,
}

/// Runs a full simulation and keeps the trace.
pub fn run(cfg: &SimConfig, scheduler: SchedulerKind) -> RunOutput {
    let records: Vec<SlotRecord> = Simulation::new(cfg, scheduler).collect();
    let summary = summarize(&records, cfg).expect("n_slots >= 1 for a valid config");
    RunOutput { records, summary }
}

/// Runs a full simulation keeping only the summary.
pub fn run_summary(cfg: &SimConfig, scheduler: SchedulerKind) -> RunSummary {
    let mut b = SummaryBuilder::new(cfg);
    for r in Simulation::new(cfg, scheduler) {
        b.push(&r);
    }
    b.finish().expect("n_slots >= 1 for a valid config")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RawConfig;

    fn cfg(n_slots: u64, arrival_rate: f64) -> SimConfig {
        RawConfig {
            n_slots,
            arrival_rate,
            ..RawConfig::default()
        }
        .validate()
        .unwrap()
    }

    fn record(mu2: f64, decoded: Vec<bool>, arrival: bool) -> SlotRecord {
        SlotRecord {
            slot: 1,
            arrival,
            phase1_threshold: None,
            mu1: 1.0 - mu2,
            mu2,
            relay: None,
            aux_r: 1,
            y: vec![0.0; decoded.len()],
            decoded,
            z: 0.0,
            all_infeasible: false,
        }
    }

    #[test]
    fn no_arrivals_means_fully_offloaded() {
        let c = cfg(2000, 0.0);
        let out = run(&c, SchedulerKind::FreeBs);
        assert_eq!(out.summary.offloading_factor, 1.0);
        assert_eq!(out.summary.arrivals, 0);
        assert!(out.summary.qos_all_met());
        assert!(out
            .records
            .iter()
            .all(|r| r.y.iter().all(|&y| y == 0.0) && r.z == 0.0));
    }

    #[test]
    fn same_seed_same_trace() {
        let c = cfg(500, 0.7);
        assert_eq!(
            run(&c, SchedulerKind::FreeBs).records,
            run(&c, SchedulerKind::FreeBs).records
        );
    }

    #[test]
    fn records_are_ordered_without_gaps() {
        let c = cfg(300, 1.0);
        let out = run(&c, SchedulerKind::Baseline);
        for (k, r) in out.records.iter().enumerate() {
            assert_eq!(r.slot, k as u64 + 1);
        }
    }

    #[test]
    fn streaming_summary_matches_collected() {
        let c = cfg(1000, 0.8);
        assert_eq!(
            run(&c, SchedulerKind::FreeBs).summary,
            run_summary(&c, SchedulerKind::FreeBs)
        );
    }

    #[test]
    fn flow_conservation_and_decode_requires_arrival() {
        let c = cfg(5000, 0.6);
        let out = run(&c, SchedulerKind::FreeBs);
        let total: f64 = out.records.iter().map(|r| r.mu1 + r.mu2).sum();
        assert!((total - 5000.0).abs() < 1e-9);
        for r in &out.records {
            if !r.arrival {
                assert_eq!(r.decoded_count(), 0);
            }
        }
        assert!(out
            .summary
            .delivery_ratio
            .iter()
            .all(|&d| (0.0..=1.0).contains(&d)));
    }

    #[test]
    fn summarize_single_slot() {
        let s = summarize(&[record(0.8, vec![true], true)], &SimConfig::reference(1)).unwrap();
        assert!((s.offloading_factor - 0.8).abs() < 1e-15);
    }

    #[test]
    fn summarize_delivery_ratio() {
        let recs = [
            record(0.5, vec![true], true),
            record(0.5, vec![false], true),
        ];
        let s = summarize(&recs, &SimConfig::reference(1)).unwrap();
        assert_eq!(s.delivery_ratio, vec![0.5]);
        assert_eq!(s.qos_met, vec![false]);
    }

    #[test]
    fn summarize_empty_is_error() {
        assert_eq!(
            summarize(&[], &SimConfig::reference(1)),
            Err(EngineError::EmptyRecords)
        );
    }

    #[test]
    fn stability_of_zero_queues() {
        let recs: Vec<SlotRecord> = (0..1000).map(|_| record(1.0, vec![false], false)).collect();
        assert_eq!(
            check_stability(&recs, 1e-9),
            Stability {
                y: vec![true],
                z: true
            }
        );
    }

    #[test]
    fn infeasible_qos_is_unstable() {
        // q = 1 with a BS far too weak to reach every user in every slot.
        let mut raw = RawConfig {
            n_users: 2,
            n_slots: 5000,
            qos: crate::model::PerUser::Scalar(1.0),
            ..RawConfig::default()
        };
        raw.set_common_power_db(-5.0);
        let c = raw.validate().unwrap();
        let out = run(&c, SchedulerKind::FreeBs);
        let s = check_stability(&out.records, DEFAULT_STABILITY_EPSILON);
        assert!(s.y.iter().all(|&ok| !ok), "{:?}", out.summary.queue_drift);
    }
}
