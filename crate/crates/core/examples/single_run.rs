//! One reference-config run of Free-BS and of the relay-free baseline, side by side.
//!
//! ```bash
//! cargo run --release -p freebs --example single_run -- [n_users] [n_slots]
//! ```

use freebs::engine::{check_stability, run, DEFAULT_STABILITY_EPSILON};
use freebs::{SchedulerKind, SimConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let n_users = args.next().and_then(|a| a.parse().ok()).unwrap_or(4);
    let mut cfg = SimConfig::reference(n_users);
    if let Some(k) = args.next().and_then(|a| a.parse().ok()) {
        cfg.n_slots = k;
    }
    println!(
        "N = {}, K = {}, V = {}, C = {:.3} (C/V = {:.2e})",
        cfg.n_users,
        cfg.n_slots,
        cfg.control_v,
        cfg.drift_constant(),
        cfg.drift_constant() / cfg.control_v
    );

    for kind in [SchedulerKind::FreeBs, SchedulerKind::Baseline] {
        let out = run(&cfg, kind);
        let s = &out.summary;
        let stable = check_stability(&out.records, DEFAULT_STABILITY_EPSILON);
        println!("\n{kind}");
        println!("  offloading factor  {:.4}", s.offloading_factor);
        println!("  throughput         {:.4} packets/slot", s.throughput);
        println!("  delivery ratios    {:.4?}", s.delivery_ratio);
        println!("  max Q(K)/K         {:.2e}", s.queue_drift.max());
        println!("  Z(K)/K             {:.2e}", s.queue_drift.z);
        println!("  QoS met            {:?}", s.qos_met);
        println!("  queues stable      {}", stable.all());
        println!("  infeasible slots   {}", s.infeasible_slots);
    }
}
