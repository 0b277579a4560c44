//! Per-slot scheduling: the Free-BS rule, the relay-free baseline and an
//! exhaustive oracle.
//!
//! Every scheduler maximizes the same per-slot objective
//!
//! ```text
//! sum_m Y_m * 1_m  +  Z * mu_II / T
//! ```
//!
//! over the Phase-I threshold and the (optional) Phase-II relay, subject to
//! `mu_I + mu_II = T` and at most one relay.

mod brute_force;

pub use brute_force::brute_force_decide;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{phase1_duration, rate_from_threshold, relay_threshold};
use crate::model::{choose_auxiliary, GainMatrix, SimConfig, SlotDecision, VirtualQueueState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerKind {
    FreeBs,
    Baseline,
    BruteForce,
}

impl SchedulerKind {
    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::FreeBs => "free_bs",
            SchedulerKind::Baseline => "baseline",
            SchedulerKind::BruteForce => "brute_force",
        }
    }

    pub fn decide(
        self,
        gains: &GainMatrix,
        queues: &VirtualQueueState,
        arrival: bool,
        cfg: &SimConfig,
    ) -> SlotDecision {
        match self {
            SchedulerKind::FreeBs => free_bs_decide(gains, queues, arrival, cfg),
            SchedulerKind::Baseline => baseline_decide(gains, queues, arrival, cfg),
            SchedulerKind::BruteForce => brute_force_decide(gains, queues, arrival, cfg, None),
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "free_bs" => Ok(SchedulerKind::FreeBs),
            "baseline" => Ok(SchedulerKind::Baseline),
            "brute_force" => Ok(SchedulerKind::BruteForce),
            other => Err(format!(
                "unknown scheduler {other:?} (expected free_bs, baseline or brute_force)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SchedulerError {
    #[error("candidate {rank}: phase-I duration exceeds the slot")]
    InfeasibleCandidate { rank: usize },
    #[error("relay rank {relay_rank} did not decode in phase I at rank {rank}")]
    RelayNotDecoded { rank: usize, relay_rank: usize },
    #[error("rank {0} out of range")]
    OutOfRange(usize),
}

/// One evaluated `(threshold, relay)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Rank (0-based, descending BS gain) of the user whose gain sets `Gamma_0`.
    pub phase1_index: usize,
    pub threshold: f64,
    /// Relay as a user index.
    pub relay_index: Option<usize>,
    pub relay_threshold: Option<f64>,
    pub mu1: f64,
    pub mu2: f64,
    pub decoded: Vec<bool>,
    pub objective: f64,
}

/// User indices sorted by descending BS gain, ties by ascending index.
pub fn sort_by_bs_gain(gains: &GainMatrix) -> Vec<usize> {
    let g = &gains.bs_to_user;
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|&a, &b| g[b].total_cmp(&g[a]));
    order
}

/// `sum_m Y_m 1_m + Z * mu2_normalized`, summed in user-index order.
///
/// Every scheduler and the oracle score decisions through this one function,
/// so equal decode sets and durations give bit-identical objectives.
#[inline]
pub fn slot_objective(queues: &VirtualQueueState, decoded: &[bool], mu2_normalized: f64) -> f64 {
    let mut weight = 0.0;
    for (&y, &d) in queues.y.iter().zip(decoded) {
        if d {
            weight += y;
        }
    }
    weight + queues.z * mu2_normalized
}

/// Marks every user the relay reaches in Phase II.
#[inline]
fn relay_decodes(gains: &GainMatrix, relay: usize, threshold: f64, decoded: &mut [bool]) {
    for (m, &g) in gains.d2d_row(relay).iter().enumerate() {
        if m != relay && !decoded[m] && g >= threshold {
            decoded[m] = true;
        }
    }
}

/// Evaluates the candidate whose Phase-I threshold is the BS gain of the user
/// at `rank` in `order`, relayed by the user at `relay_rank` (if any).
pub fn evaluate_candidate(
    order: &[usize],
    rank: usize,
    relay_rank: Option<usize>,
    gains: &GainMatrix,
    queues: &VirtualQueueState,
    cfg: &SimConfig,
) -> Result<Candidate, SchedulerError> {
    let user = *order.get(rank).ok_or(SchedulerError::OutOfRange(rank))?;
    if let Some(j) = relay_rank {
        if j > rank {
            return Err(SchedulerError::RelayNotDecoded {
                rank,
                relay_rank: j,
            });
        }
    }
    let threshold = gains.bs_to_user[user];
    let t = cfg.slot_duration;
    let mu1 = phase1_duration(cfg.packet_bits, cfg.bs_power, threshold, t, cfg.log_base)
        .map_err(|_| SchedulerError::InfeasibleCandidate { rank })?;
    let mu2 = t - mu1;
    let mut decoded: Vec<bool> = gains.bs_to_user.iter().map(|&g| g >= threshold).collect();

    let mut relay_index = None;
    let mut relay_gamma = None;
    if let Some(j) = relay_rank {
        let relay = order[j];
        if let Ok(gamma) =
            relay_threshold(cfg.packet_bits, mu2, cfg.user_powers[relay], cfg.log_base)
        {
            relay_decodes(gains, relay, gamma, &mut decoded);
            relay_index = Some(relay);
            relay_gamma = Some(gamma);
        }
    }
    let objective = slot_objective(queues, &decoded, mu2 / t);
    Ok(Candidate {
        phase1_index: rank,
        threshold,
        relay_index,
        relay_threshold: relay_gamma,
        mu1,
        mu2,
        decoded,
        objective,
    })
}

/// Free-BS: try each user's BS gain as the Phase-I threshold and, for each,
/// every Phase-I decoder as relay; keep the best objective.
pub fn free_bs_decide(
    gains: &GainMatrix,
    queues: &VirtualQueueState,
    arrival: bool,
    cfg: &SimConfig,
) -> SlotDecision {
    decide_sorted(gains, queues, arrival, cfg, cfg.relay_enabled)
}

/// Free-BS with Phase II never used for relaying.
pub fn baseline_decide(
    gains: &GainMatrix,
    queues: &VirtualQueueState,
    arrival: bool,
    cfg: &SimConfig,
) -> SlotDecision {
    decide_sorted(gains, queues, arrival, cfg, false)
}

#[derive(Clone, Copy)]
struct Best {
    objective: f64,
    rank: usize,
    relay_rank: Option<usize>,
}

fn decide_sorted(
    gains: &GainMatrix,
    queues: &VirtualQueueState,
    arrival: bool,
    cfg: &SimConfig,
    relays: bool,
) -> SlotDecision {
    let n = cfg.n_users;
    let t = cfg.slot_duration;
    let aux_r = choose_auxiliary(queues.z, cfg.control_v);
    if !arrival {
        return SlotDecision::idle(false, n, t, queues, aux_r);
    }

    let order = sort_by_bs_gain(gains);
    let mut best: Option<Best> = None;
    let mut evaluated = 0;
    let mut phase1 = vec![false; n];
    let mut scratch = vec![false; n];

    for (rank, &user) in order.iter().enumerate() {
        let threshold = gains.bs_to_user[user];
        let Ok(mu1) = phase1_duration(cfg.packet_bits, cfg.bs_power, threshold, t, cfg.log_base)
        else {
            // Lower ranks have lower gains and are infeasible too.
            break;
        };
        let mu2 = t - mu1;
        for (d, &g) in phase1.iter_mut().zip(&gains.bs_to_user) {
            *d = g >= threshold;
        }

        let mut consider = |objective: f64, relay_rank: Option<usize>| {
            if best.is_none_or(|b| objective > b.objective) {
                best = Some(Best {
                    objective,
                    rank,
                    relay_rank,
                });
            }
        };

        evaluated += 1;
        consider(slot_objective(queues, &phase1, mu2 / t), None);

        if !relays || mu2 <= 0.0 {
            continue;
        }
        for (relay_rank, &relay) in order[..=rank].iter().enumerate() {
            let Ok(gamma) =
                relay_threshold(cfg.packet_bits, mu2, cfg.user_powers[relay], cfg.log_base)
            else {
                continue;
            };
            scratch.copy_from_slice(&phase1);
            relay_decodes(gains, relay, gamma, &mut scratch);
            evaluated += 1;
            consider(slot_objective(queues, &scratch, mu2 / t), Some(relay_rank));
        }
    }

    let idle_objective = queues.z;
    let mut decision = match best {
        Some(b) if !(cfg.allow_idle && idle_objective > b.objective) => {
            let c = evaluate_candidate(&order, b.rank, b.relay_rank, gains, queues, cfg)
                .expect("winning candidate was feasible");
            debug_assert_eq!(c.objective, b.objective);
            decision_from_candidate(&c, aux_r, cfg)
        }
        Some(_) => SlotDecision::idle(true, n, t, queues, aux_r),
        None if cfg.allow_idle => SlotDecision::idle(true, n, t, queues, aux_r),
        None => SlotDecision {
            all_infeasible: true,
            ..SlotDecision::idle(true, n, t, queues, aux_r)
        },
    };
    decision.candidates_evaluated = evaluated + usize::from(cfg.allow_idle);
    decision
}

pub(crate) fn decision_from_candidate(c: &Candidate, aux_r: u8, cfg: &SimConfig) -> SlotDecision {
    SlotDecision {
        arrival: true,
        phase1_threshold: Some(c.threshold),
        phase1_rate: rate_from_threshold(cfg.bs_power, c.threshold, cfg.log_base),
        mu1: c.mu1,
        mu2: c.mu2,
        relay: c.relay_index,
        relay_rate: c.relay_index.map(|_| cfg.packet_bits / c.mu2),
        relay_threshold: c.relay_threshold,
        aux_r,
        decoded: c.decoded.clone(),
        objective: c.objective,
        all_infeasible: false,
        candidates_evaluated: 0,
    }
}
