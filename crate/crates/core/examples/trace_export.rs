//! Streams a run's per-slot trace to CSV while accumulating its summary, the
//! same way `freebs run --trace` does.
//!
//! ```bash
//! cargo run --release -p freebs --example trace_export -- [config.json] [out.csv]
//! ```

use std::fs::File;
use std::io::{BufWriter, Write};

use freebs::engine::{Simulation, SummaryBuilder};
use freebs::model::load_config;
use freebs::{trace, SchedulerKind};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/reference.json").into());
    let out = args.next().unwrap_or_else(|| "trace.csv".into());

    let mut cfg = load_config(&config)?;
    cfg.n_slots = cfg.n_slots.min(10_000);
    let mut w = BufWriter::new(File::create(&out)?);
    trace::write_header(&mut w, cfg.n_users)?;
    let mut summary = SummaryBuilder::new(&cfg);
    for record in Simulation::new(&cfg, SchedulerKind::FreeBs) {
        trace::write_record(&mut w, &record)?;
        summary.push(&record);
    }
    w.flush()?;
    let summary = summary.finish()?;
    println!("wrote {} slots to {out}", summary.slots);
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
