//! Offloading factor and throughput versus the number of users: Free-BS
//! benefits from relay diversity for small `N` before the per-user QoS load
//! takes over; the baseline only loses as `N` grows.
//!
//! ```bash
//! cargo run --release -p freebs --example user_sweep -- [reps] [n_slots]
//! ```

use freebs::sweep::{mean_by_value, run_sweep, SweepParam, SweepSpec};
use freebs::{RawConfig, SchedulerKind};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    let base = RawConfig {
        n_slots: args.next().and_then(|a| a.parse().ok()).unwrap_or(100_000),
        ..RawConfig::default()
    };
    let spec = SweepSpec::new(
        SweepParam::NUsers,
        vec![2.0, 4.0, 8.0, 12.0, 16.0, 20.0],
        reps,
        vec![SchedulerKind::FreeBs, SchedulerKind::Baseline],
    )?;
    let rows = run_sweep(&base, &spec, None)?;

    for kind in spec.schedulers.iter().copied() {
        println!("{kind}");
        println!(
            "{:>4}  {:>18}  {:>18}  {:>8}",
            "N", "offloading", "throughput", "min R"
        );
        let off = mean_by_value(&rows, kind, |s| s.offloading_factor);
        let tp = mean_by_value(&rows, kind, |s| s.throughput);
        let dr = mean_by_value(&rows, kind, |s| s.min_delivery_ratio());
        for i in 0..off.len() {
            println!(
                "{:>4}  {:.4} ± {:.4}   {:7.4} ± {:.4}  {:>8.4}",
                off[i].0, off[i].1, off[i].2, tp[i].1, tp[i].2, dr[i].1
            );
        }
    }
    Ok(())
}
