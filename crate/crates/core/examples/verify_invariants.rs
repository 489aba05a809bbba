//! Runs the invariant suites and prints each check.
//!
//! ```bash
//! cargo run --release --example verify_invariants -- geometry
//! ```

use linbandit::harness::{verify, DEFAULT_SEED};

fn main() -> linbandit::Result<()> {
    let suite = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    let report = verify(&suite, DEFAULT_SEED)?;
    println!("{report}");
    if !report.all_passed() {
        std::process::exit(1);
    }
    Ok(())
}
