//! Acceptance run: one line per criterion, in criterion order, at level 3.
//!
//! Every criterion is an exact comparison (rational arithmetic throughout, no
//! tolerance). Two criteria cannot hold as stated and are printed as FAIL with
//! the reason; they do not fail the process. Any other FAIL does.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dualbimod::suite::{self, Status, CHECK_IDS};

const LEVEL: usize = 3;
const BUDGET: Duration = Duration::from_secs(60);

/// Criteria shown to be unattainable as stated:
/// - `actmat-roots`: two of the five displayed 2×2 roots are conjugate under
///   the swap, so there are four orbits, not five.
/// - `factorization`: no map out of `W_k` reaches the top layer of a band, so
///   `α_n` is never `h ∘ ψ_k`; the reverse direction holds and is reported.
const UNATTAINABLE: [&str; 2] = ["actmat-roots", "factorization"];

fn main() -> ExitCode {
    let start = Instant::now();
    let report = suite::run(LEVEL, &[]).expect("valid level");
    let elapsed = start.elapsed();
    assert_eq!(report.checks.len(), CHECK_IDS.len());

    let mut unexpected = Vec::new();
    for (i, c) in report.checks.iter().enumerate() {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        println!("{status} [{:>2}] {:<15} tolerance=exact  {}", i + 1, c.check, c.detail);
        if c.status == Status::Fail && !UNATTAINABLE.contains(&c.check) {
            unexpected.push(c.check);
        }
    }
    let within = elapsed < BUDGET;
    println!(
        "{} total {:.1}s at level {LEVEL} (budget {}s)",
        if within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        BUDGET.as_secs()
    );
    let passed = report.checks.iter().filter(|c| c.status == Status::Pass).count();
    println!("{passed}/{} criteria pass; known unattainable: {}", report.checks.len(), UNATTAINABLE.join(", "));

    if unexpected.is_empty() && within {
        ExitCode::SUCCESS
    } else {
        eprintln!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
