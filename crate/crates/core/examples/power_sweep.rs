//! Offloading factor versus transmit power, Free-BS against the relay-free
//! baseline over paired-seed replications.
//!
//! ```bash
//! cargo run --release -p freebs --example power_sweep -- [reps] [n_slots]
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
        SweepParam::BsPowerDb,
        vec![5.0, 10.0, 15.0, 20.0],
        reps,
        vec![SchedulerKind::FreeBs, SchedulerKind::Baseline],
    )?;
    let rows = run_sweep(&base, &spec, None)?;

    let free = mean_by_value(&rows, SchedulerKind::FreeBs, |s| s.offloading_factor);
    let base = mean_by_value(&rows, SchedulerKind::Baseline, |s| s.offloading_factor);
    let free_tp = mean_by_value(&rows, SchedulerKind::FreeBs, |s| s.min_delivery_ratio());
    let base_tp = mean_by_value(&rows, SchedulerKind::Baseline, |s| s.min_delivery_ratio());
    println!(
        "{:>6}  {:>16}  {:>16}  {:>6}  {:>10}  {:>10}",
        "P(dB)", "free_bs", "baseline", "ratio", "min R free", "min R base"
    );
    for i in 0..free.len() {
        println!(
            "{:>6}  {:.4} ± {:.4}  {:.4} ± {:.4}  {:>6.2}  {:>10.4}  {:>10.4}",
            free[i].0,
            free[i].1,
            free[i].2,
            base[i].1,
            base[i].2,
            free[i].1 / base[i].1,
            free_tp[i].1,
            base_tp[i].1,
        );
    }
    Ok(())
}
