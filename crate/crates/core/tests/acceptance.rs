//! Runs every acceptance criterion and prints one PASS/FAIL line each.

use viswalk::verification::{run_suite_with, Suite};

fn main() {
    let outcomes = run_suite_with(Suite::All, None, |o| {
        println!("{}", o.summary_line());
        for m in &o.measurements {
            println!(
                "    {} {} = {} (need {})",
                if m.ok { "ok " } else { "BAD" },
                m.name,
                m.value,
                m.requirement
            );
        }
    });
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
