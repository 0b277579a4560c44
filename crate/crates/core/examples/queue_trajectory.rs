//! Virtual-queue trajectories over a run: how `Z` settles at `V` and how the
//! QoS queues `Y_i` settle around their equilibrium.
//!
//! ```bash
//! cargo run --release -p freebs --example queue_trajectory -- [control_v] [n_slots]
//! ```

use freebs::engine::Simulation;
use freebs::{SchedulerKind, SimConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let mut cfg = SimConfig::reference(4);
    if let Some(v) = args.next().and_then(|a| a.parse().ok()) {
        cfg.control_v = v;
    }
    if let Some(k) = args.next().and_then(|a| a.parse().ok()) {
        cfg.n_slots = k;
    }
    let every = (cfg.n_slots / 20).max(1);
    println!(
        "{:>8}  {:>10}  {:>10}  {:>10}",
        "slot", "Z", "max Y", "mean Y"
    );
    for r in Simulation::new(&cfg, SchedulerKind::FreeBs) {
        if r.slot % every == 0 || r.slot == cfg.n_slots {
            let max_y = r.y.iter().copied().fold(0.0, f64::max);
            let mean_y = r.y.iter().sum::<f64>() / r.y.len() as f64;
            println!(
                "{:>8}  {:>10.3}  {:>10.3}  {:>10.3}",
                r.slot, r.z, max_y, mean_y
            );
        }
    }
}
