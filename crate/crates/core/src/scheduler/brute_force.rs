use crate::channel::{phase1_duration, rate_from_threshold, relay_threshold};
use crate::model::{choose_auxiliary, GainMatrix, SimConfig, SlotDecision, VirtualQueueState};

use super::slot_objective;

struct Choice {
    threshold: f64,
    mu1: f64,
    relay: Option<(usize, f64)>,
    decoded: Vec<bool>,
    objective: f64,
}

/// Exhaustive search over every Phase-I threshold in `{gamma_0i}` (plus any
/// extra `gamma_grid` points) and every admissible relay.
///
/// Decode sets are rebuilt from the raw gains for each pair, independent of
/// the sorted sweep used by [`super::free_bs_decide`]. A threshold above every
/// user's gain reaches nobody; such a broadcast is the idle action in
/// disguise and is only admitted when `allow_idle` is set.
///
/// Meant for testing: cost is `O(|thresholds| * N^2)` per slot.
pub fn brute_force_decide(
    gains: &GainMatrix,
    queues: &VirtualQueueState,
    arrival: bool,
    cfg: &SimConfig,
    gamma_grid: Option<&[f64]>,
) -> SlotDecision {
    let n = cfg.n_users;
    let t = cfg.slot_duration;
    let aux_r = choose_auxiliary(queues.z, cfg.control_v);
    if !arrival {
        return SlotDecision::idle(false, n, t, queues, aux_r);
    }

    let thresholds = gains
        .bs_to_user
        .iter()
        .chain(gamma_grid.unwrap_or(&[]))
        .copied();

    let mut best: Option<Choice> = None;
    let mut evaluated = 0;
    let mut offer = |c: Choice| {
        if best.as_ref().is_none_or(|b| c.objective > b.objective) {
            best = Some(c);
        }
    };

    for threshold in thresholds {
        let Ok(mu1) = phase1_duration(cfg.packet_bits, cfg.bs_power, threshold, t, cfg.log_base)
        else {
            continue;
        };
        let mu2 = t - mu1;
        let direct: Vec<bool> = (0..n).map(|m| gains.bs_to_user[m] >= threshold).collect();
        let decoders: Vec<usize> = (0..n).filter(|&m| direct[m]).collect();
        if decoders.is_empty() && !cfg.allow_idle {
            continue;
        }

        evaluated += 1;
        offer(Choice {
            threshold,
            mu1,
            relay: None,
            objective: slot_objective(queues, &direct, mu2 / t),
            decoded: direct.clone(),
        });

        if !cfg.relay_enabled {
            continue;
        }
        for &relay in &decoders {
            let Ok(gamma) =
                relay_threshold(cfg.packet_bits, mu2, cfg.user_powers[relay], cfg.log_base)
            else {
                continue;
            };
            let decoded: Vec<bool> = (0..n)
                .map(|m| direct[m] || (m != relay && gains.d2d(relay, m) >= gamma))
                .collect();
            evaluated += 1;
            offer(Choice {
                threshold,
                mu1,
                relay: Some((relay, gamma)),
                objective: slot_objective(queues, &decoded, mu2 / t),
                decoded,
            });
        }
    }

    if cfg.allow_idle {
        evaluated += 1;
        let idle = SlotDecision::idle(true, n, t, queues, aux_r);
        if best.as_ref().is_none_or(|b| idle.objective > b.objective) {
            return SlotDecision {
                candidates_evaluated: evaluated,
                ..idle
            };
        }
    }

    let Some(c) = best else {
        return SlotDecision {
            all_infeasible: true,
            candidates_evaluated: evaluated,
            ..SlotDecision::idle(true, n, t, queues, aux_r)
        };
    };
    let mu2 = t - c.mu1;
    SlotDecision {
        arrival: true,
        phase1_threshold: Some(c.threshold),
        phase1_rate: rate_from_threshold(cfg.bs_power, c.threshold, cfg.log_base),
        mu1: c.mu1,
        mu2,
        relay: c.relay.map(|(r, _)| r),
        relay_rate: c.relay.map(|_| cfg.packet_bits / mu2),
        relay_threshold: c.relay.map(|(_, g)| g),
        aux_r,
        decoded: c.decoded,
        objective: c.objective,
        all_infeasible: false,
        candidates_evaluated: evaluated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheduler::free_bs_decide;

    fn instance() -> (GainMatrix, VirtualQueueState, SimConfig) {
        let gains = GainMatrix::from_rows(vec![0.5, 0.1], &[vec![1.0, 0.02], vec![0.02, 1.0]]);
        let queues = VirtualQueueState {
            y: vec![0.5, 2.0],
            z: 0.3,
        };
        (gains, queues, SimConfig::reference(2))
    }

    #[test]
    fn matches_free_bs_on_two_user_instance() {
        let (g, q, cfg) = instance();
        let oracle = brute_force_decide(&g, &q, true, &cfg, None);
        assert!((oracle.objective - 2.74711).abs() < 1e-5);
        assert_eq!(
            oracle.objective,
            free_bs_decide(&g, &q, true, &cfg).objective
        );
    }

    #[test]
    fn dense_grid_never_beats_gain_thresholds() {
        let (g, q, cfg) = instance();
        let grid: Vec<f64> = (1..=1000).map(|k| 2.0 * 0.5 * k as f64 / 1000.0).collect();
        let gridded = brute_force_decide(&g, &q, true, &cfg, Some(&grid));
        let plain = brute_force_decide(&g, &q, true, &cfg, None);
        assert!(gridded.objective <= plain.objective + 1e-9);
    }

    #[test]
    fn zero_weights_tie_at_zero() {
        let (g, _, cfg) = instance();
        let q = VirtualQueueState::new(2);
        let d = brute_force_decide(&g, &q, true, &cfg, None);
        assert_eq!(d.objective, 0.0);
    }

    #[test]
    fn relays_disabled_restricts_to_direct() {
        let (g, q, mut cfg) = instance();
        cfg.relay_enabled = false;
        let d = brute_force_decide(&g, &q, true, &cfg, None);
        assert_eq!(d.relay, None);
        assert!((d.objective - 2.71328).abs() < 1e-5);
    }
}
