//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;

use interlace_lab::acceptance::run_with;

fn main() -> ExitCode {
    let all = run_with(|c| println!("{}", c.report()));
    let passed = all.iter().filter(|c| c.pass).count();
    println!("{passed} of {} criteria pass", all.len());
    if passed == all.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
