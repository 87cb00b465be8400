//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use roadtopo_cli::checks::{self, Check};

const ORACLE_SEEDS: u64 = 200;
const ORACLE_BUDGET: Duration = Duration::from_secs(10);
const GRADCHECK_INSTANCES: u64 = 20;
const GRAPHS: u64 = 20;
const WEIGHT_BOUND_INSTANCES: u64 = 20;

fn timed_oracle() -> Check {
    let start = Instant::now();
    let mut c = checks::oracle_equivalence(ORACLE_SEEDS);
    let took = start.elapsed();
    if took >= ORACLE_BUDGET {
        c.passed = false;
    }
    c.detail = format!("{} in {took:?}", c.detail);
    c
}

fn main() -> ExitCode {
    let criteria: Vec<fn() -> Check> = vec![
        timed_oracle,
        checks::pair_fixture,
        || checks::gradient_check(GRADCHECK_INSTANCES),
        || checks::zero_at_ground_truth(GRAPHS),
        || checks::weight_bound(WEIGHT_BOUND_INSTANCES),
        checks::gap_closing,
        || checks::metric_identities(GRAPHS),
        checks::apls_fixture,
        checks::end_to_end,
        checks::performance,
    ];
    let count = criteria.len();
    let mut failed = 0;
    for criterion in criteria {
        let c = criterion();
        println!("{}", c.line());
        failed += usize::from(!c.passed);
    }
    println!("{count} criteria, {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
