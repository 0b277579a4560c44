//! The `V` trade-off: the offloading factor approaches its optimum with a gap
//! of order `C/V`, while `Z` settles near `V`.
//!
//! ```bash
//! cargo run --release -p freebs --example v_tradeoff -- [reps] [n_slots]
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
    let c = base.validate()?.drift_constant();
    let spec = SweepSpec::new(
        SweepParam::ControlV,
        vec![1.0, 10.0, 100.0, 1000.0],
        reps,
        vec![SchedulerKind::FreeBs],
    )?;
    let rows = run_sweep(&base, &spec, None)?;
    let off = mean_by_value(&rows, SchedulerKind::FreeBs, |s| s.offloading_factor);
    let dr = mean_by_value(&rows, SchedulerKind::FreeBs, |s| s.min_delivery_ratio());
    let drift = mean_by_value(&rows, SchedulerKind::FreeBs, |s| s.queue_drift.max());
    println!(
        "{:>6}  {:>8}  {:>18}  {:>8}  {:>10}",
        "V", "C/V", "offloading", "min R", "max Q/K"
    );
    for i in 0..off.len() {
        println!(
            "{:>6}  {:>8.4}  {:.5} ± {:.5}  {:>8.4}  {:>10.2e}",
            off[i].0,
            c / off[i].0,
            off[i].1,
            off[i].2,
            dr[i].1,
            drift[i].1
        );
    }
    Ok(())
}
