//! Runs every acceptance criterion and prints one line per criterion.
//!
//! `POLYA_ACCEPTANCE_JOBS` sets the number of criteria run in parallel (default 4).
//! Timing criteria are more reliable with 1.

use polya_cli::verify;

fn main() {
    let jobs = std::env::var("POLYA_ACCEPTANCE_JOBS").ok().and_then(|s| s.parse().ok()).unwrap_or(4);
    let ids = verify::all_ids();
    let outcomes = verify::run(&ids, jobs);
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    for o in &outcomes {
        println!("{}", o.line());
    }
    println!("acceptance: {} passed, {} failed", outcomes.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
