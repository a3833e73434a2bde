use std::process::ExitCode;
use std::time::Instant;

use frobforge::selftest::{run_criterion, DEFAULT_SEED};

fn main() -> ExitCode {
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    println!("\nrunning acceptance criteria (seed {DEFAULT_SEED})");
    for id in 1..=13 {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let r = run_criterion(id, DEFAULT_SEED);
        println!("{r} [{:.2}s]", start.elapsed().as_secs_f64());
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed\n");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}\n");
        ExitCode::FAILURE
    }
}
