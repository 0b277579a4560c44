//! Per-slot trace CSV.
//!
//! Columns: `slot,arrival,gamma0,mu1,mu2,relay,r,decoded_count,decoded,y_1..y_N,z`.
//! `gamma0` is empty on silent slots, `relay` is `-1` when Phase II carries no
//! relay, and `decoded` is a `0`/`1` string in user order. Floats use
//! [`sig9`](crate::format::sig9).

use std::io::{self, Write};

use crate::engine::SlotRecord;
use crate::format::sig9;

pub fn write_header<W: Write>(w: &mut W, n_users: usize) -> io::Result<()> {
    write!(
        w,
        "slot,arrival,gamma0,mu1,mu2,relay,r,decoded_count,decoded"
    )?;
    for i in 1..=n_users {
        write!(w, ",y_{i}")?;
    }
    writeln!(w, ",z")
}

pub fn write_record<W: Write>(w: &mut W, r: &SlotRecord) -> io::Result<()> {
    let relay = r.relay.map_or(-1, |i| i as i64);
    let gamma0 = r.phase1_threshold.map(sig9).unwrap_or_default();
    let bits: String = r
        .decoded
        .iter()
        .map(|&d| if d { '1' } else { '0' })
        .collect();
    write!(
        w,
        "{},{},{},{},{},{},{},{},{}",
        r.slot,
        u8::from(r.arrival),
        gamma0,
        sig9(r.mu1),
        sig9(r.mu2),
        relay,
        r.aux_r,
        r.decoded_count(),
        bits
    )?;
    for &y in &r.y {
        write!(w, ",{}", sig9(y))?;
    }
    writeln!(w, ",{}", sig9(r.z))
}

pub fn write_trace<'a, W: Write>(
    w: &mut W,
    n_users: usize,
    records: impl IntoIterator<Item = &'a SlotRecord>,
) -> io::Result<()> {
    write_header(w, n_users)?;
    for r in records {
        write_record(w, r)?;
    }
    Ok(())
}
