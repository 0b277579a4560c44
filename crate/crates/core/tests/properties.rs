use proptest::prelude::*;

use freebs::channel::{phase1_duration, rate_from_threshold, relay_threshold, threshold_from_rate};
use freebs::model::{choose_auxiliary, update_user_queue, update_z_queue};
use freebs::scheduler::{
    baseline_decide, brute_force_decide, evaluate_candidate, free_bs_decide, sort_by_bs_gain,
};
use freebs::verify::decision_is_consistent;
use freebs::{GainMatrix, LogBase, SimConfig, VirtualQueueState};

/// A random slot: N in 1..=8, exponential-looking positive gains, queues in [0, 5).
fn slot() -> impl Strategy<Value = (GainMatrix, VirtualQueueState)> {
    (1usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(0.001f64..2.0, n),
            prop::collection::vec(0.001f64..2.0, n * n),
            prop::collection::vec(0.0f64..5.0, n),
            0.0f64..5.0,
        )
            .prop_map(|(bs, d2d, y, z)| (GainMatrix::new(bs, d2d), VirtualQueueState { y, z }))
    })
}

proptest! {
    #[test]
    fn queues_stay_nonnegative_and_bounded(
        y in 0.0f64..50.0, z in 0.0f64..50.0, q in 0.0f64..=1.0,
        a: bool, d: bool, r in 0u8..=1, mu2 in 0.0f64..=1.0,
    ) {
        let y2 = update_user_queue(y, a, q, d);
        let z2 = update_z_queue(z, r, mu2);
        prop_assert!(y2 >= 0.0 && z2 >= 0.0);
        prop_assert!((y2 - y).abs() <= q.max(1.0));
        prop_assert!((z2 - z).abs() <= 1.0);
    }

    #[test]
    fn auxiliary_is_monotone(z1 in 0.0f64..2000.0, dz in 0.0f64..2000.0, v in 0.001f64..2000.0) {
        prop_assert!(choose_auxiliary(z1, v) >= choose_auxiliary(z1 + dz, v));
    }

    #[test]
    fn rate_threshold_roundtrip(gamma in 1e-4f64..100.0, p in 0.1f64..1000.0) {
        for b in [LogBase::Two, LogBase::E] {
            let back = threshold_from_rate(p, rate_from_threshold(p, gamma, b), b);
            prop_assert!((back - gamma).abs() <= 1e-12 * gamma.max(1.0));
        }
    }

    #[test]
    fn durations_monotone(g in 0.011f64..5.0, dg in 1e-6f64..1.0, mu in 0.01f64..0.99, dmu in 1e-6f64..0.01) {
        let b = LogBase::Two;
        prop_assert!(rate_from_threshold(100.0, g + dg, b) > rate_from_threshold(100.0, g, b));
        let d0 = phase1_duration(1.0, 100.0, g, 1.0, b).unwrap();
        let d1 = phase1_duration(1.0, 100.0, g + dg, 1.0, b).unwrap();
        prop_assert!(d1 < d0);
        let r0 = relay_threshold(1.0, mu, 100.0, b).unwrap();
        let r1 = relay_threshold(1.0, mu + dmu, 100.0, b).unwrap();
        prop_assert!(r1 < r0);
    }

    #[test]
    fn free_bs_matches_oracle((gains, queues) in slot(), allow_idle: bool) {
        let mut cfg = SimConfig::reference(gains.n_users());
        cfg.allow_idle = allow_idle;
        let fast = free_bs_decide(&gains, &queues, true, &cfg);
        let oracle = brute_force_decide(&gains, &queues, true, &cfg, None);
        prop_assert_eq!(fast.objective, oracle.objective);
        prop_assert!(decision_is_consistent(&fast, &gains, &cfg));
        prop_assert!(decision_is_consistent(&oracle, &gains, &cfg));

        cfg.relay_enabled = false;
        let base = baseline_decide(&gains, &queues, true, &cfg);
        let base_oracle = brute_force_decide(&gains, &queues, true, &cfg, None);
        prop_assert_eq!(base.objective, base_oracle.objective);
        prop_assert!(base.relay.is_none());
        prop_assert!(base.objective <= fast.objective);
    }

    #[test]
    fn candidate_count_within_quadratic_bound((gains, queues) in slot()) {
        let n = gains.n_users();
        let mut cfg = SimConfig::reference(n);
        cfg.allow_idle = true;
        let d = free_bs_decide(&gains, &queues, true, &cfg);
        prop_assert!(d.candidates_evaluated <= n * (n + 1) / 2 + n + 1);
    }

    #[test]
    fn relaying_never_lowers_objective((gains, queues) in slot()) {
        let cfg = SimConfig::reference(gains.n_users());
        let order = sort_by_bs_gain(&gains);
        for rank in 0..order.len() {
            let Ok(direct) = evaluate_candidate(&order, rank, None, &gains, &queues, &cfg) else {
                break;
            };
            for j in 0..=rank {
                let relayed = evaluate_candidate(&order, rank, Some(j), &gains, &queues, &cfg).unwrap();
                prop_assert!(relayed.objective >= direct.objective);
                prop_assert_eq!(relayed.mu1 + relayed.mu2, cfg.slot_duration);
            }
        }
    }

    #[test]
    fn phase1_decode_set_grows_with_rank((gains, queues) in slot()) {
        let cfg = SimConfig::reference(gains.n_users());
        let order = sort_by_bs_gain(&gains);
        let mut prev: Option<Vec<bool>> = None;
        for rank in 0..order.len() {
            let Ok(c) = evaluate_candidate(&order, rank, None, &gains, &queues, &cfg) else {
                break;
            };
            if let Some(p) = &prev {
                prop_assert!(p.iter().zip(&c.decoded).all(|(&a, &b)| !a || b));
            }
            prev = Some(c.decoded);
        }
    }

    #[test]
    fn scaling_queues_keeps_argmax((gains, queues) in slot(), c in 0.1f64..100.0) {
        let cfg = SimConfig::reference(gains.n_users());
        let scaled = VirtualQueueState {
            y: queues.y.iter().map(|y| y * c).collect(),
            z: queues.z * c,
        };
        let a = free_bs_decide(&gains, &queues, true, &cfg);
        let b = free_bs_decide(&gains, &scaled, true, &cfg);
        prop_assert_eq!(a.phase1_threshold, b.phase1_threshold);
        prop_assert_eq!(a.relay, b.relay);
        prop_assert!((b.objective - c * a.objective).abs() <= 1e-9 * b.objective.max(1.0));
    }
}

#[test]
fn zero_user_weights_pick_fastest_feasible_rate() {
    let gains = GainMatrix::from_rows(
        vec![0.7, 0.2, 0.05],
        &[
            vec![1.0, 0.1, 0.1],
            vec![0.1, 1.0, 0.1],
            vec![0.1, 0.1, 1.0],
        ],
    );
    let queues = VirtualQueueState {
        y: vec![0.0; 3],
        z: 1.5,
    };
    let d = free_bs_decide(&gains, &queues, true, &SimConfig::reference(3));
    assert_eq!(d.phase1_threshold, Some(0.7));
    assert_eq!(d.relay, None);
}
