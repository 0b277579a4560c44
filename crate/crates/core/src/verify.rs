//! Oracle self-test: Free-BS against exhaustive search on random slots.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::FadingModel;
use crate::model::{GainMatrix, SimConfig, SlotDecision, VirtualQueueState};
use crate::scheduler::{brute_force_decide, free_bs_decide};

/// Queue values for random test slots are drawn from `[0, QUEUE_SPAN)`.
pub const QUEUE_SPAN: f64 = 5.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub slots: u64,
    /// Slots where the two objectives differ at all.
    pub mismatches: u64,
    pub max_abs_diff: f64,
    /// Slots whose Free-BS decision broke a structural constraint.
    pub constraint_violations: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.constraint_violations == 0
    }
}

/// Structural constraints every decision must satisfy: the slot is split
/// exactly, the relay (if any) decoded in Phase I, and without a relay the
/// decode set is exactly the Phase-I decoders.
pub fn decision_is_consistent(d: &SlotDecision, gains: &GainMatrix, cfg: &SimConfig) -> bool {
    let t = cfg.slot_duration;
    if d.mu1 < 0.0 || d.mu2 < 0.0 || (d.mu1 + d.mu2 - t).abs() > 1e-12 {
        return false;
    }
    if !d.arrival {
        return d.decoded.iter().all(|&x| !x) && d.mu2 == t && d.relay.is_none();
    }
    let Some(threshold) = d.phase1_threshold else {
        return d.decoded.iter().all(|&x| !x) && d.relay.is_none();
    };
    let direct = |m: usize| gains.bs_to_user[m] >= threshold;
    match d.relay {
        Some(r) => direct(r) && (0..cfg.n_users).all(|m| !direct(m) || d.decoded[m]),
        None => (0..cfg.n_users).all(|m| d.decoded[m] == direct(m)),
    }
}

/// Draws a random queue state with every entry uniform on `[0, span)`.
pub fn random_queues<R: Rng>(rng: &mut R, n: usize, span: f64) -> VirtualQueueState {
    VirtualQueueState {
        y: (0..n).map(|_| rng.random::<f64>() * span).collect(),
        z: rng.random::<f64>() * span,
    }
}

/// Compares Free-BS with the exhaustive oracle on `slots` random slots drawn
/// from `cfg`'s channel model with queues uniform on `[0, 5)`.
pub fn verify_oracle(cfg: &SimConfig, slots: u64, seed: u64) -> VerifyReport {
    let mut fading = FadingModel::new(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let mut report = VerifyReport::default();
    for _ in 0..slots {
        let gains = fading.sample_slot_gains(cfg);
        let queues = random_queues(&mut rng, cfg.n_users, QUEUE_SPAN);
        let fast = free_bs_decide(&gains, &queues, true, cfg);
        let oracle = brute_force_decide(&gains, &queues, true, cfg, None);
        let diff = (fast.objective - oracle.objective).abs();
        report.slots += 1;
        if fast.objective != oracle.objective {
            report.mismatches += 1;
        }
        report.max_abs_diff = report.max_abs_diff.max(diff);
        if !decision_is_consistent(&fast, &gains, cfg) {
            report.constraint_violations += 1;
        }
    }
    report
}
