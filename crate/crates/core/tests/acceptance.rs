//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use halfspace::report::CheckReport;
use halfspace::verification::{self, DEFAULT_SEED};

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Vec<CheckReport>,
}

fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion { id: 1, title: "Gegenbauer oracle equivalence", limit: secs(5), run: verification::suite_gegenbauer },
        Criterion { id: 2, title: "kernel dual-definition equivalence", limit: secs(30), run: verification::suite_kernels },
        Criterion { id: 3, title: "harmonicity", limit: secs(180), run: || verification::suite_harmonicity(DEFAULT_SEED) },
        Criterion { id: 4, title: "boundary conditions", limit: secs(120), run: verification::suite_boundary },
        Criterion { id: 5, title: "differential-difference identities (i)-(viii)", limit: secs(60), run: || verification::suite_prop31(DEFAULT_SEED, 50) },
        Criterion { id: 6, title: "Neumann representations (i)-(v)", limit: secs(300), run: verification::suite_prop32 },
        Criterion { id: 7, title: "growth estimates", limit: secs(300), run: verification::suite_growth },
        Criterion { id: 8, title: "sharpness machinery", limit: secs(300), run: || verification::suite_sharpness(DEFAULT_SEED, 10_000) },
        Criterion { id: 9, title: "expansion example", limit: secs(300), run: verification::suite_expansion },
        Criterion { id: 10, title: "divergence demonstration", limit: secs(1), run: verification::suite_divergence },
    ]
}

fn main() -> ExitCode {
    let mut failed = 0;
    for c in criteria() {
        let start = Instant::now();
        let reports = (c.run)();
        let elapsed = start.elapsed();
        let passed = reports.iter().filter(|r| r.pass).count();
        let in_time = elapsed <= c.limit;
        let ok = !reports.is_empty() && passed == reports.len() && in_time;
        println!(
            "{} criterion {:>2} {}: {}/{} checks, {:.2} s (limit {} s)",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            passed,
            reports.len(),
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
        for r in reports.iter().filter(|r| !r.pass) {
            println!("    {}", r.summary_line());
        }
        if !ok {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
