//! Free-BS against exhaustive search on random slots, for each `N` up to 8.
//!
//! ```bash
//! cargo run --release -p freebs --example oracle_check -- [slots_per_n]
//! ```

use freebs::verify::verify_oracle;
use freebs::SimConfig;

fn main() {
    let slots = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(5_000);
    let mut all_ok = true;
    for n in 1..=8 {
        let report = verify_oracle(&SimConfig::reference(n), slots, 1000 + n as u64);
        all_ok &= report.passed();
        println!(
            "N={n}: {} slots, {} mismatches, max |diff| {:e}, {} constraint violations",
            report.slots, report.mismatches, report.max_abs_diff, report.constraint_violations
        );
    }
    if !all_ok {
        std::process::exit(2);
    }
}
