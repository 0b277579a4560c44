//! A single slot worked by hand: two users, one strong and one weak BS link.
//!
//! Free-BS sends at the strong user's rate and lets it relay to the weak one;
//! the baseline has to slow down until both decode directly.
//!
//! ```bash
//! cargo run -p freebs --example slot_decision
//! ```

use freebs::scheduler::{baseline_decide, evaluate_candidate, free_bs_decide, sort_by_bs_gain};
use freebs::{GainMatrix, SimConfig, SlotDecision, VirtualQueueState};

fn show(label: &str, d: &SlotDecision) {
    println!("{label}");
    println!("  Gamma_0   {:?}", d.phase1_threshold);
    println!("  R_0       {:.5} bits", d.phase1_rate);
    println!("  mu_I      {:.5}", d.mu1);
    println!("  mu_II     {:.5}", d.mu2);
    println!(
        "  relay     {:?} (threshold {:?})",
        d.relay, d.relay_threshold
    );
    println!("  decoded   {:?}", d.decoded);
    println!("  objective {:.5}", d.objective);
}

fn main() {
    let cfg = SimConfig::reference(2);
    let gains = GainMatrix::from_rows(vec![0.5, 0.1], &[vec![1.0, 0.02], vec![0.02, 1.0]]);
    let queues = VirtualQueueState {
        y: vec![0.5, 2.0],
        z: 0.3,
    };

    let order = sort_by_bs_gain(&gains);
    println!("every candidate (rank, relay rank):");
    for rank in 0..order.len() {
        for relay in std::iter::once(None).chain((0..=rank).map(Some)) {
            match evaluate_candidate(&order, rank, relay, &gains, &queues, &cfg) {
                Ok(c) => println!(
                    "  ({rank}, {relay:?}): mu_II {:.5}, decoded {:?}, objective {:.5}",
                    c.mu2, c.decoded, c.objective
                ),
                Err(e) => println!("  ({rank}, {relay:?}): {e}"),
            }
        }
    }
    println!();
    show("free_bs", &free_bs_decide(&gains, &queues, true, &cfg));
    show("baseline", &baseline_decide(&gains, &queues, true, &cfg));
}
