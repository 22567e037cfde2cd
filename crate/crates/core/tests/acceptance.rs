//! Acceptance criteria on the default build. Prints one line per criterion and
//! exits non-zero if any fails.

use denjoy_twist::verify::{run_suite, Status, Suite};
use denjoy_twist::{BuildConfig, Construction};
use std::process::ExitCode;
use std::time::Instant;

fn main() -> ExitCode {
    let start = Instant::now();
    let construction = match Construction::build(&BuildConfig::default()) {
        Ok(c) => c,
        Err(e) => {
            println!("default build failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!("default build ready in {:.1?}", start.elapsed());

    let mut failed = 0;
    for (i, suite) in Suite::ACCEPTANCE.iter().enumerate() {
        let t = Instant::now();
        let report = run_suite(&construction, &[*suite]);
        let r = &report.results[0];
        let verdict = match r.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
        };
        println!(
            "criterion {:>2} {:<20} {verdict}  measured {:e} tolerance {:e}  ({:.1?}) {}",
            i + 1,
            r.name,
            r.measured,
            r.tolerance,
            t.elapsed(),
            r.details
        );
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1?}",
        Suite::ACCEPTANCE.len() - failed,
        Suite::ACCEPTANCE.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
