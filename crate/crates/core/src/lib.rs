//! Deadline-constrained multicast offloading in a single-cell downlink.
//!
//! Each slot the BS broadcasts one packet in Phase I at a rate chosen so that
//! users whose gain clears a threshold decode it; in Phase II at most one of
//! those users rebroadcasts it to the rest while the BS is free. The
//! [Free-BS](scheduler::free_bs_decide) scheduler picks the threshold and the
//! relay each slot by maximizing a queue-weighted objective, which keeps every
//! user's delivery ratio above its QoS target while maximizing the mean
//! fraction of the slot the BS spends idle (the offloading factor).
//!
//! ```
//! use freebs::{engine, scheduler::SchedulerKind, SimConfig};
//!
//! let mut cfg = SimConfig::reference(4);
//! cfg.n_slots = 2_000;
//! let out = engine::run(&cfg, SchedulerKind::FreeBs);
//! assert!((0.0..=1.0).contains(&out.summary.offloading_factor));
//! ```
//!
//! The `examples/` directory has one runnable program per capability; the
//! `freebs` binary exposes single runs, parameter sweeps and the
//! oracle self-test on the command line.

pub mod channel;
pub mod engine;
pub mod format;
pub mod model;
pub mod scheduler;
pub mod sweep;
pub mod trace;
pub mod verify;

pub use channel::{FadingModel, LogBase};
pub use engine::{run, run_summary, RunOutput, RunSummary, SlotRecord};
pub use model::{GainMatrix, RawConfig, SimConfig, SlotDecision, VirtualQueueState};
pub use scheduler::SchedulerKind;
